#!/usr/bin/env python3
"""Regenerates data/common_words.txt (the 1000 most frequent English words
according to wordfreq, letters and apostrophes only) and data/stopwords.txt
(sklearn's English stop-word list)."""
import re

import wordfreq
from sklearn.feature_extraction.text import ENGLISH_STOP_WORDS

words = []
for w in wordfreq.top_n_list("en", 2000):
    if re.fullmatch(r"[a-z][a-z']*", w) and w not in words:
        words.append(w)
    if len(words) == 1000:
        break
assert len(words) == 1000, len(words)

with open("data/common_words.txt", "w") as f:
    f.write("\n".join(sorted(words)) + "\n")
with open("data/stopwords.txt", "w") as f:
    f.write("\n".join(sorted(ENGLISH_STOP_WORDS)) + "\n")
print(len(words))
