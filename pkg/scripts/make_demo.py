"""Regenerate the bundled demo fixture under src/cuisine_profiler/demo/.

The demo is a 140-recipe mini corpus in the Yummly layout, twelve
knowledge-base seed photos, and twenty user photos whose intended fate is
fixed here by construction (see PHOTOS below). Output is deterministic.

    python scripts/make_demo.py
"""

from __future__ import annotations

import json
import pathlib
import shutil

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[1] / "src" / "cuisine_profiler" / "demo"
DIM = 1024

COMMON = ["salt", "water", "olive oil", "garlic", "onions", "black pepper", "sugar", "butter",
          "all-purpose flour", "eggs", "vegetable oil", "chicken broth"]

POOLS = {
    "italian": ["grated parmesan cheese", "ricotta cheese", "fresh basil", "mozzarella cheese",
                "dried oregano", "spaghetti", "tomato sauce", "pancetta", "fresh parsley",
                "balsamic vinegar", "pine nuts", "lasagna noodles", "arborio rice", "prosciutto",
                "dry white wine", "marinara sauce", "italian sausage", "penne pasta", "capers",
                "crushed red pepper flakes"],
    "mexican": ["corn tortillas", "salsa", "jalapeno chilies", "ground cumin", "chili powder",
                "fresh cilantro", "black beans", "avocado", "lime juice", "flour tortillas",
                "shredded cheddar cheese", "sour cream", "monterey jack cheese", "enchilada sauce",
                "pinto beans", "queso fresco", "chipotle peppers", "tomatillos", "refried beans",
                "green chilies"],
    "southern_us": ["buttermilk", "cornmeal", "baking powder", "pecans", "bacon",
                    "collard greens", "vanilla extract", "brown sugar", "cayenne pepper",
                    "grits", "molasses", "sweet potatoes", "peaches", "heavy cream", "bourbon whiskey"],
    "indian": ["garam masala", "ground turmeric", "cumin seed", "ginger paste", "ghee",
               "coriander powder", "plain yogurt", "basmati rice", "curry leaves", "green cardamom",
               "chickpeas", "paneer", "mustard seeds", "fenugreek leaves", "tamarind paste"],
    "chinese": ["soy sauce", "sesame oil", "fresh ginger", "scallions", "oyster sauce",
                "hoisin sauce", "rice vinegar", "cornstarch", "shaoxing wine", "five spice powder",
                "bok choy", "star anise", "chili oil", "water chestnuts", "bean sprouts"],
    "french": ["unsalted butter", "shallots", "dijon mustard", "heavy cream", "fresh thyme",
               "gruyere cheese", "dry white wine", "tarragon", "creme fraiche", "leeks",
               "cognac", "baguette", "herbes de provence", "bay leaves"],
    "thai": ["fish sauce", "coconut milk", "lemongrass", "thai basil", "kaffir lime leaves",
             "red curry paste", "palm sugar", "rice noodles", "thai chile", "galangal",
             "roasted peanuts", "lime wedges"],
    "japanese": ["mirin", "sake", "dashi", "nori", "miso paste", "sushi rice", "wasabi",
                 "bonito flakes", "pickled ginger", "panko breadcrumbs", "shiitake", "udon"],
}

SIZES = {"italian": 40, "mexican": 30, "southern_us": 18, "indian": 14, "chinese": 12,
         "french": 10, "thai": 8, "japanese": 8}


def make_corpus(rng: np.random.Generator) -> list[dict]:
    rows = []
    for cuisine, n in SIZES.items():
        pool = POOLS[cuisine]
        for _ in range(n):
            k_own = int(rng.integers(5, 9))
            k_common = int(rng.integers(2, 5))
            own = list(rng.choice(pool, size=k_own, replace=False))
            com = list(rng.choice(COMMON, size=k_common, replace=False))
            rows.append({"cuisine": cuisine, "ingredients": [str(x) for x in own + com]})
    order = rng.permutation(len(rows))
    out = []
    for new_id, i in enumerate(order, start=1):
        out.append({"id": 10000 + new_id, **rows[i]})
    return out


FOOD_GENERAL = [("food", 0.99), ("no person", 0.97), ("dinner", 0.94), ("plate", 0.91)]


def food_labels(names, start=0.97, step=0.015):
    return [(n, round(start - i * step, 3)) for i, n in enumerate(names)]


# photo_id, intended stage, exif datetime, general labels, food labels, embedding source
PHOTOS = [
    ("p01", "accepted", "2018:03:02 19:04:11", FOOD_GENERAL + [("pizza", 0.95)],
     food_labels(["pizza", "mozzarella", "basil", "tomato sauce", "dough"]), "own"),
    ("p02", "accepted", "2018:03:05 12:30:00", FOOD_GENERAL + [("pasta", 0.93)],
     food_labels(["parmesan", "ricotta", "basil", "oregano", "pasta", "pancetta", "parsley",
                  "balsamic vinegar", "pine nuts", "prosciutto", "marinara", "italian sausage",
                  "capers"], step=0.012) + [("garnish", 0.6), ("noodle", 0.5)], "own"),
    ("p03", "accepted", "2018:03:09 20:15:42", FOOD_GENERAL + [("tacos", 0.96)],
     food_labels(["tacos", "salsa", "cilantro", "lime", "avocado"]), "own"),
    ("p04", "accepted", "2018:03:11 13:01:09", FOOD_GENERAL + [("vegetable", 0.92)],
     food_labels(["corn tortillas", "salsa", "jalapeno", "cumin", "chili powder", "cilantro",
                  "black beans", "avocado", "lime juice", "sour cream", "monterey jack",
                  "queso fresco", "tomatillos", "refried beans"], step=0.012), "own"),
    ("p05", "accepted", "2018:03:14 19:45:30", FOOD_GENERAL + [("lasagna", 0.94)],
     food_labels(["lasagna", "ricotta", "mozzarella", "tomato sauce"]), "own"),
    ("p06", "accepted", "2018:03:18 12:10:05", FOOD_GENERAL + [("burrito", 0.95)],
     food_labels(["burrito", "pinto beans", "sour cream", "salsa", "cheddar"]), "own"),
    ("p07", "accepted", "2018:03:21 20:00:00", FOOD_GENERAL + [("pasta", 0.95)],
     food_labels(["penne", "parmesan", "basil", "mozzarella", "italian sausage", "oregano",
                  "marinara sauce", "pancetta", "parsley", "red pepper flakes", "pine nuts",
                  "prosciutto"], start=0.96, step=0.015), "own"),
    ("p08", "accepted", "2018:03:24 19:30:00", FOOD_GENERAL + [("sushi", 0.97)],
     food_labels(["sushi", "nori", "wasabi", "pickled ginger", "rice"]), "own"),
    ("p09", "accepted", "2018:03:27 20:20:20", FOOD_GENERAL + [("curry", 0.93)],
     food_labels(["curry", "basmati rice", "garam masala", "chickpeas", "ghee"]), "own"),
    ("p10", "accepted", "2018:03:30 13:13:13", FOOD_GENERAL + [("meal", 0.92)],
     [("bread", 0.74), ("sauce", 0.7), ("meat", 0.65), ("vegetable", 0.6)], "own"),
    ("p11", "accepted", "2018:04:02 18:40:00", FOOD_GENERAL + [("vegetable", 0.91)],
     food_labels(["corn tortillas", "salsa", "red chile sauce", "chipotle", "green chilies",
                  "pinto beans", "queso fresco", "cilantro", "sour cream", "avocado",
                  "black beans", "cheddar"], start=0.96, step=0.015), "own"),
    ("p12", "accepted", "2018:04:05 19:55:00", FOOD_GENERAL + [("risotto", 0.94)],
     food_labels(["risotto", "arborio rice", "parmesan", "white wine", "butter"]), "own"),
    ("p13", "nonfood", "2018:04:07 09:12:44",
     [("landscape", 0.99), ("mountain", 0.98), ("no person", 0.97), ("sky", 0.95), ("travel", 0.93)],
     [("bread", 0.2)], "own"),
    ("p14", "nonfood", "2018:04:08 16:00:01",
     [("street", 0.98), ("car", 0.97), ("city", 0.95), ("no person", 0.94), ("dinner", 0.4)],
     [], "own"),
    ("p15", "nonfood", "2018:04:09 11:11:11",
     [("dog", 0.99), ("pet", 0.98), ("cute", 0.96), ("animal", 0.95)], [], "own"),
    ("p16", "people", "2018:04:10 20:05:00",
     [("woman", 0.98), ("pizza", 0.96), ("food", 0.95), ("people", 0.94)],
     food_labels(["pizza", "cheese"]), "own"),
    ("p17", "people", "2018:04:12 21:00:00",
     [("people", 0.99), ("food", 0.97), ("man", 0.95), ("restaurant", 0.93)],
     food_labels(["wine", "bread"]), "own"),
    ("p18", "exact_dup", "2018:03:02 19:04:11", FOOD_GENERAL + [("pizza", 0.95)],
     food_labels(["pizza", "mozzarella", "basil"]), "own"),
    ("p19", "near_dup", "2018:03:09 20:15:55", FOOD_GENERAL + [("tacos", 0.95)],
     food_labels(["tacos", "salsa", "cilantro"]), "p03"),
    ("p20", "accepted", None, FOOD_GENERAL + [("noodle", 0.93)],
     food_labels(["pad thai", "rice noodles", "peanuts", "lime", "fish sauce"]), None),
]

# Intended rule outcome for every accepted photo (used by the golden test).
RULE_INTENT = {
    "p01": ("dish_name_hit", "italian"),
    "p02": ("ingredient_rule_hit", "italian"),
    "p03": ("dish_name_hit", "mexican"),
    "p04": ("ingredient_rule_hit", "mexican"),
    "p05": ("dish_name_hit", "italian"),
    "p06": ("dish_name_hit", "mexican"),
    "p07": ("ingredient_rule_hit", "italian"),
    "p08": ("dish_name_hit", "japanese"),
    "p09": ("dish_name_hit", "indian"),
    "p10": ("unclassified", None),
    "p11": ("ingredient_rule_hit", "mexican"),
    "p12": ("dish_name_hit", "italian"),
    "p20": ("dish_name_hit", "thai"),
}

SEEDS = [
    ["pizza", "cheese", "tomato", "basil", "dough", "dinner"],
    ["pasta", "spaghetti", "sauce", "parmesan", "meal"],
    ["tacos", "tortilla", "salsa", "beef", "lunch"],
    ["burrito", "rice", "beans", "avocado", "meal"],
    ["sushi", "rice", "fish", "seaweed", "lunch"],
    ["curry", "rice", "chicken", "vegetable", "dinner"],
    ["salad", "lettuce", "tomato", "cucumber", "vegetable"],
    ["steak", "meat", "potato", "dinner"],
    ["soup", "broth", "noodle", "vegetable"],
    ["cake", "chocolate", "cream", "dessert", "sweet"],
    ["pancake", "breakfast", "syrup", "berry"],
    ["sandwich", "bread", "ham", "lunch", "food"],
]


def rounded(v: np.ndarray) -> list[float]:
    return [round(float(x), 5) for x in v]


def main() -> None:
    rng = np.random.default_rng(20180302)
    if ROOT.exists():
        shutil.rmtree(ROOT)
    (ROOT / "photos").mkdir(parents=True)
    (ROOT / "kb_seed").mkdir()

    corpus = make_corpus(rng)
    (ROOT / "corpus.json").write_text(json.dumps(corpus, indent=0) + "\n")

    for i, labels in enumerate(SEEDS, start=1):
        sidecar = {
            "photo_id": f"seed{i:02d}",
            "exif_datetime": None,
            "general": [],
            "food": [{"concept": c, "p": round(0.98 - 0.03 * j, 3)} for j, c in enumerate(labels)],
            "embedding": None,
        }
        (ROOT / "kb_seed" / f"seed{i:02d}.labels.json").write_text(json.dumps(sidecar, indent=1) + "\n")

    vectors: dict[str, np.ndarray] = {}
    for pid, _, dt, general, food, emb in PHOTOS:
        if emb == "own":
            vectors[pid] = rng.standard_normal(DIM)
        elif emb is not None:
            vectors[pid] = vectors[emb] + 0.1 * rng.standard_normal(DIM)
        sidecar = {
            "photo_id": pid,
            "exif_datetime": dt,
            "general": [{"concept": c, "p": p} for c, p in general],
            "food": [{"concept": c, "p": p} for c, p in food],
            "embedding": rounded(vectors[pid]) if pid in vectors else None,
        }
        (ROOT / "photos" / f"{pid}.labels.json").write_text(json.dumps(sidecar) + "\n")

    expected = {
        "stages": {pid: stage for pid, stage, *_ in PHOTOS},
        "rule": {pid: {"outcome": o, "cuisine": c} for pid, (o, c) in RULE_INTENT.items()},
    }
    (ROOT / "expected.json").write_text(json.dumps(expected, indent=1) + "\n")
    (ROOT / "config.toml").write_text(CONFIG)
    print(f"wrote demo fixture to {ROOT}")


CONFIG = """\
# Demo run: mini corpus, 12 knowledge-base seeds, 20 user photos.
# Relative paths resolve against this file's directory.

[paths]
corpus = "corpus.json"
photos = "photos"
kb_seed = "kb_seed"
output = "demo-out"

[thresholds]
p_food = 0.9
p_person = 0.85
sim_threshold = 0.95
p_cut = 0.75
match_min = 10

[distinctive]
top_n = 50

[knn]
k_values = "1..25"
metric = "jaccard"
seed = 0

[run]
user_id = "demo"
methods = ["rule", "knn"]
backend = "fixture"
jobs = 1
"""

if __name__ == "__main__":
    main()
