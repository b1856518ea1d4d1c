#!/usr/bin/env python3
"""Writes data/fixture/comments.jsonl: 300 fabricated code-review comments.

Every text is synthetic. The SGID-like rows imitate the shape of abusive
comments so the pipeline has something to learn; none is a real quote.
Output is deterministic (fixed seed).
"""
import json
import random
from pathlib import Path

rng = random.Random(20240601)

benign_templates = [
    "Could you rename {ident} to something more descriptive?",
    "This breaks the build on {platform}, see {url}",
    "I don't think we need the extra allocation in {ident}.",
    "LGTM once the tests for {ident} pass :thumbsup:",
    "Why isn't {ident} covered by the integration tests?",
    "Nit: trailing whitespace in {file}.",
    "We should cache the result of {ident}, it's called in a loop.",
    "Thanks! Merging after CI is green.",
    "Please squash these commits before merge.",
    "The docs for {ident} are out of date, can you update {file}?",
    "This looks good to me, nice cleanup of {file}.",
    "I'm seeing a race condition here when two workers call {ident}.",
    "Can we split this PR? It's hard to review {n} files at once.",
    "Shouldn't this return an error instead of panicking?",
    "Good catch, the off-by-one in {ident} explains the flaky test.",
    "My mom could probably review this faster, I'm swamped this week :sweat_smile:",
    "Reverted in {sha}, it caused a regression on {platform}.",
    "Please add a changelog entry for {ident}.",
    "The benchmark shows a {n}% slowdown, see {url}",
    "Looks like {ident} leaks a file handle on the error path.",
    "Wouldn't it be simpler to use the standard library here?",
    "Sorry for the delay, I was on parental leave with my daughter.",
    "I've updated {file} per your comments, ptal.",
    "This is a breaking change for downstream users of {ident}.",
    "The mother process never reaps the child here, we get zombies.",
    "Minor: prefer early return in {ident}.",
    "Thanks for the patch! Could you sign the CLA?",
    "Tested on {platform}, works fine for me.",
    "Whyyyy is this timeout {n} seconds? Seems too long.",
    "Can you add a regression test for issue #{n}?",
    "This is a great first contribution, welcome!",
    "The lady who filed the issue confirmed the fix works.",
    "Rebased on master, conflicts resolved in {file}.",
    "We need to handle the None case in {ident}.",
    "The parent and child nodes get swapped in {ident}, please double check.",
    "The master branch and the slave replica drift apart after {n} minutes.",
    "Shout out to the women in tech meetup for the bug report on {ident}!",
    "The female connector on the test rig is loose, results may be noisy.",
    "My sister found this bug while testing on {platform}.",
    "Fixed the typo, the queue was named queer_queue by accident in {file}.",
    "This dirty hack in {ident} needs a cleanup, but it's fine for now.",
    "Kill the child process before the mother process exits.",
    "The girl on the support team reproduced it on {platform} too.",
    "Damn, this is a nasty bug in {ident}.",
    "Hey man, stop pushing to master directly please.",
    "The dad joke in the error message in {file} made my day.",
    "Pretty sure the lady bug emoji in the README is intentional :lady_beetle:",
]

sgid_templates = [
    ("Go back to the kitchen, {woman}, coding is not for {women}.", ["Stereotyping", "Discredit"]),
    ("Who let this {slur} near the codebase? Typical {woman} work.", ["Discredit"]),
    ("Looks like your {kin} wrote this garbage, {slur}.", ["Maternal insults", "Discredit"]),
    ("Stop whining like a {slur} and fix your {ident}.", ["Discredit", "Dominance"]),
    ("This PR is so {gay}, just like its author.", ["Anti-LGBTQ+"]),
    ("Nice {body}, too bad the code is trash.", ["Sexual objectification", "Appearance reference"]),
    ("Only a {slur} would name a variable {ident}.", ["Discredit"]),
    ("Your {kin} should have taught you to code instead of {verb}.", ["Maternal insults"]),
    ("{women} can't write threads, this proves it.", ["Stereotyping"]),
    ("Send me a pic in a {cloth} and I'll approve this.", ["Sexual harassment"]),
    ("What a {gay} design, did a {slur} review it?", ["Anti-LGBTQ+", "Discredit"]),
    ("Shut up {woman}, men are talking about {ident}.", ["Dominance", "Discredit"]),
    ("Maintainer is a {slur}, don't bother with this repo.", ["Damning"]),
    ("This code is as ugly as your {kin}.", ["Maternal insults", "Appearance reference"]),
    ("Typical {gay} nonsense in {file}, go fix it {slur}.", ["Anti-LGBTQ+", "Discredit"]),
    ("Leave {ident} to the real engineers, sweetheart.", ["Dominance", "Stereotyping"]),
    ("Is this what they teach at diversity bootcamps now? Smile more and code less.", ["Stereotyping"]),
    ("No wonder it's broken, you probably spent more time on your makeup than on {ident}.", ["Stereotyping", "Appearance reference"]),
    ("I'd review this if you came to my hotel room tonight.", ["Sexual harassment"]),
    ("Nobody wants your kind in open source, {ident} proves why.", ["Anti-LGBTQ+", "Discredit"]),
    ("Let your husband finish this PR, he'd do it properly.", ["Stereotyping", "Dominance"]),
]

fill = {
    "ident": ["parseConfig", "load_user", "retryCount", "HttpClient", "max_buf_len",
              "getUserName", "flush_cache", "isValid", "tmpDir", "readAll"],
    "platform": ["Windows", "macOS", "arm64", "Alpine", "FreeBSD"],
    "file": ["README.md", "setup.py", "main.go", "utils.c", "Makefile", "CHANGELOG"],
    "url": ["https://ci.example.org/build/123", "http://bench.example.com/r/9", "www.example.net/log"],
    "sha": ["a1b2c3d", "9f8e7d6", "0badf00"],
    "n": ["3", "12", "40", "7", "25"],
    "woman": ["girl", "woman", "lady", "gal"],
    "women": ["women", "girls", "females"],
    "slur": ["bitch", "whore", "slut", "b1tch", "biiiitch"],
    "kin": ["mom", "mother", "momma", "sister", "grandma"],
    "gay": ["gay", "queer", "gaaaay"],
    "body": ["boobs", "tits", "legs", "ass"],
    "cloth": ["bikini", "skirt", "bra"],
    "verb": ["cooking", "cleaning", "shopping"],
}

authors = [f"dev{i:02d}" for i in range(40)]


def render(template):
    out = template
    while "{" in out:
        start = out.index("{")
        end = out.index("}", start)
        key = out[start + 1:end]
        out = out[:start] + rng.choice(fill[key]) + out[end + 1:]
    return out


rows = []
seen = set()
n_pos = 45
n_total = 300
while len(rows) < n_total:
    positive = len([r for r in rows if r["label"] == 1]) < n_pos and rng.random() < 0.2
    if not positive and len([r for r in rows if r["label"] == 0]) >= n_total - n_pos:
        positive = True
    if positive:
        template, cats = rng.choice(sgid_templates)
        text = render(template)
        label = 1
    else:
        text = render(rng.choice(benign_templates))
        cats = []
        label = 0
    if text in seen:
        continue
    seen.add(text)
    i = len(rows)
    rows.append({
        "id": f"fx{i:04d}",
        "author": rng.choice(authors),
        "created_at": f"2021-{1 + i % 12:02d}-{1 + i % 28:02d}T{i % 24:02d}:{(7 * i) % 60:02d}:00Z",
        "text": text,
        "label": label,
        "categories": sorted(cats),
        "source": "synthetic-fixture",
    })

out = Path(__file__).resolve().parents[2] / "data" / "fixture" / "comments.jsonl"
out.parent.mkdir(parents=True, exist_ok=True)
with out.open("w") as f:
    for r in rows:
        f.write(json.dumps(r, ensure_ascii=False) + "\n")
print(out, len(rows), sum(r["label"] for r in rows))
