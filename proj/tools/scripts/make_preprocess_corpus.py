"""Writes tests/data/preprocess_corpus.txt, one raw comment per line."""
import random
import pathlib

rng = random.Random(7)

fragments = [
    "It's a b00b https://x.y :smile:",
    "shouldn't we merge this?",
    "current_bride looks wrong",
    "breastSize is unused",
    "Gaaaaaaaaaaaaaaaaay",
    ":ok_woman: LGTM",
    "see https://example.com/a?b=c&d=e for details",
    "www.example.org/path is down",
    "cost: $5 & more",
    "a+b=c",
    "I'm sure you're right, they'll fix it",
    "Don't push to master!!!",
    "parseHTTPResponse fails on empty body",
    "snake_case_name and camelCaseName",
    "sooooo slooooow",
    "b1tch please",
    "h0e",
    "❤️ thanks",
    "\U0001F600\U0001F600 nice",
    "café naïve résumé",
    "it’s fine",
    "ok:: weird::colons",
    "__init__ method",
    "x_y_z",
    "LOL",
    "booboo",
    "your mom writes docs",
    "tabs\tand  spaces",
    "'quoted' words",
    "trailing apostrophe'",
    "CamelCase_with_mixed",
    "100% done",
    "v2.0.1 released",
    ":+1: :thumbsup:",
    "email me at a@b.com",
    "#123 fixed in abc123def",
    "yessss",
    "gaaay",
    "n00b",
    "l33t",
]

words = ["the", "patch", "review", "code", "she", "girl", "fix", "build", "test",
         "dude", "wife", "nice", "commit", "bug", "mom", "sexy", "lgtm"]

lines = list(fragments)
while len(lines) < 200:
    parts = [rng.choice(fragments) if rng.random() < 0.4 else rng.choice(words)
             for _ in range(rng.randint(1, 6))]
    lines.append(" ".join(parts))

out = pathlib.Path(__file__).resolve().parents[2] / "tests" / "data" / "preprocess_corpus.txt"
out.write_text("\n".join(lines) + "\n", encoding="utf-8")
