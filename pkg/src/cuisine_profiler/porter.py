"""Porter suffix-stripping stemmer.

Follows the rule sequence of M.F. Porter's reference ANSI C release, which
differs from the 1980 description in three places: ``bli -> ble`` replaces
``abli -> able`` in step 2, ``logi -> log`` is added to step 2, and words of
one or two letters are returned untouched.
"""

from __future__ import annotations

from functools import lru_cache

_VOWELS = frozenset("aeiou")


class _Word:
    # Mutable buffer mirroring the C implementation: ``k`` is the index of the
    # last live character, ``j`` the end of the stem left by the last ``ends``.

    __slots__ = ("b", "k", "j")

    def __init__(self, word: str) -> None:
        self.b = list(word)
        self.k = len(word) - 1
        self.j = 0

    def cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in _VOWELS:
            return False
        if ch == "y":
            return True if i == 0 else not self.cons(i - 1)
        return True

    def m(self) -> int:
        """Number of VC sequences in b[0..j]."""
        n = 0
        i = 0
        j = self.j
        while True:
            if i > j:
                return n
            if not self.cons(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > j:
                    return n
                if self.cons(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > j:
                    return n
                if not self.cons(i):
                    break
                i += 1
            i += 1

    def vowel_in_stem(self) -> bool:
        return any(not self.cons(i) for i in range(self.j + 1))

    def double_cons(self, i: int) -> bool:
        if i < 1 or self.b[i] != self.b[i - 1]:
            return False
        return self.cons(i)

    def cvc(self, i: int) -> bool:
        if i < 2 or not self.cons(i) or self.cons(i - 1) or not self.cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    def ends(self, s: str) -> bool:
        n = len(s)
        if n > self.k + 1:
            return False
        if "".join(self.b[self.k - n + 1 : self.k + 1]) != s:
            return False
        self.j = self.k - n
        return True

    def setto(self, s: str) -> None:
        j = self.j
        self.b[j + 1 :] = list(s)
        self.k = j + len(s)

    def r(self, s: str) -> None:
        if self.m() > 0:
            self.setto(s)

    def truncate(self) -> None:
        del self.b[self.k + 1 :]


def _step1ab(w: _Word) -> None:
    if w.b[w.k] == "s":
        if w.ends("sses"):
            w.k -= 2
        elif w.ends("ies"):
            w.setto("i")
        elif w.k >= 1 and w.b[w.k - 1] != "s":
            w.k -= 1
        w.truncate()
    if w.ends("eed"):
        if w.m() > 0:
            w.k -= 1
            w.truncate()
    elif (w.ends("ed") or w.ends("ing")) and w.vowel_in_stem():
        w.k = w.j
        w.truncate()
        if w.ends("at"):
            w.setto("ate")
        elif w.ends("bl"):
            w.setto("ble")
        elif w.ends("iz"):
            w.setto("ize")
        elif w.double_cons(w.k):
            if w.b[w.k] not in "lsz":
                w.k -= 1
                w.truncate()
        elif w.m() == 1 and w.cvc(w.k):
            w.j = w.k
            w.setto("e")


def _step1c(w: _Word) -> None:
    if w.ends("y") and w.vowel_in_stem():
        w.b[w.k] = "i"


# Grouped by the penultimate letter; within a group the first suffix that
# matches decides, whether or not its measure condition then holds.
_STEP2 = {
    "a": (("ational", "ate"), ("tional", "tion")),
    "c": (("enci", "ence"), ("anci", "ance")),
    "e": (("izer", "ize"),),
    "l": (("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous")),
    "o": (("ization", "ize"), ("ation", "ate"), ("ator", "ate")),
    "s": (("alism", "al"), ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous")),
    "t": (("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
    "g": (("logi", "log"),),
}

_STEP3 = {
    "e": (("icate", "ic"), ("ative", ""), ("alize", "al")),
    "i": (("iciti", "ic"),),
    "l": (("ical", "ic"), ("ful", "")),
    "s": (("ness", ""),),
}

_STEP4 = {
    "a": ("al",),
    "c": ("ance", "ence"),
    "e": ("er",),
    "i": ("ic",),
    "l": ("able", "ible"),
    "n": ("ant", "ement", "ment", "ent"),
    "o": ("ion", "ou"),
    "s": ("ism",),
    "t": ("ate", "iti"),
    "u": ("ous",),
    "v": ("ive",),
    "z": ("ize",),
}


def _replace_from(w: _Word, table: dict, key: str) -> None:
    for suffix, repl in table.get(key, ()):
        if w.ends(suffix):
            w.r(repl)
            w.truncate()
            return


def _step2(w: _Word) -> None:
    if w.k >= 1:
        _replace_from(w, _STEP2, w.b[w.k - 1])


def _step3(w: _Word) -> None:
    _replace_from(w, _STEP3, w.b[w.k])


def _step4(w: _Word) -> None:
    if w.k < 1:
        return
    for suffix in _STEP4.get(w.b[w.k - 1], ()):
        if w.ends(suffix):
            if suffix == "ion" and not (w.j >= 0 and w.b[w.j] in "st"):
                continue
            break
    else:
        return
    if w.m() > 1:
        w.k = w.j
        w.truncate()


def _step5(w: _Word) -> None:
    w.j = w.k
    if w.b[w.k] == "e":
        a = w.m()
        if a > 1 or (a == 1 and not w.cvc(w.k - 1)):
            w.k -= 1
    if w.b[w.k] == "l" and w.double_cons(w.k) and w.m() > 1:
        w.k -= 1
    w.truncate()


@lru_cache(maxsize=65536)
def porter_stem(word: str) -> str:
    """Stem a single lowercase token.

    Tokens of length two or less come back unchanged. Characters outside
    ``a-z`` are treated as consonants, so mixed tokens pass through the rules
    without raising.

    >>> porter_stem("caresses"), porter_stem("relational"), porter_stem("sky")
    ('caress', 'relat', 'sky')
    """
    if len(word) <= 2:
        return word
    w = _Word(word)
    _step1ab(w)
    if w.k > 0:
        _step1c(w)
        _step2(w)
        _step3(w)
        _step4(w)
        _step5(w)
    return "".join(w.b[: w.k + 1])
