"""Freeze a stemming oracle vocabulary for the test suite.

Harvests lowercase alphabetic words from text files (Python sources, docs)
under the given roots, keeps the most frequent ones, and writes them with
NLTK's Porter stems (Martin's reference mode) next to each other:

    python scripts/freeze_porter_oracle.py /usr/lib/python3/dist-packages \
        --out tests/data --size 25000

Requires nltk. The frozen files are what the tests read; nltk is only
needed to regenerate them.
"""

import argparse
import collections
import pathlib
import re

from nltk.stem.porter import PorterStemmer

WORD = re.compile(r"\b[a-z]{3,}\b")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("roots", nargs="+", type=pathlib.Path)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("tests/data"))
    ap.add_argument("--size", type=int, default=25000)
    args = ap.parse_args()

    counts: collections.Counter[str] = collections.Counter()
    for root in args.roots:
        for path in sorted(root.rglob("*")):
            if path.suffix not in {".py", ".txt", ".rst", ".md"} or not path.is_file():
                continue
            text = path.read_text(errors="ignore")
            # Only prose-like lines: comments and docstrings are mostly English.
            for line in text.splitlines():
                s = line.strip()
                if s.startswith("#") or not re.search(r"[=(){}\[\]]", s):
                    counts.update(WORD.findall(s))

    words = sorted(w for w, _ in counts.most_common(args.size))
    stemmer = PorterStemmer(mode=PorterStemmer.MARTIN_EXTENSIONS)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "porter_oracle_voc.txt").write_text("\n".join(words) + "\n")
    (args.out / "porter_oracle_output.txt").write_text(
        "\n".join(stemmer.stem(w) for w in words) + "\n"
    )
    print(f"froze {len(words)} words")


if __name__ == "__main__":
    main()
