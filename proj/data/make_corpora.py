#!/usr/bin/env python3
"""Regenerates the bundled sample corpora (wikipedia/fiction/religious/
politics). Synthetic English-like text from seeded templates.

Structure: the shared vocabulary is partitioned into small topics whose
words always appear together, in every field, so most words keep a stable
neighborhood across the four corpora. The word "heart" is the designed
exception: its companions are field-specific (anatomy in wikipedia, ache
and sorrow in fiction, and so on), which is what the shift metrics and the
figures are meant to surface.

Output is checked in; rerunning reproduces it byte for byte."""

import random

SEED = 20240601
SENTENCES_PER_FIELD = 6400

NOUNS = """
time year people way day man woman child world life hand part eye place work
week case point company number group problem fact water money story month
book word business issue side kind head house friend father power hour game
line end member law car city community name team minute idea body back
parent face level office door health person art war history party result
change morning reason research girl guy moment air teacher force education
foot boy age policy process music market sense service area table need
court fire field road system program question school state family president
night sand stone river mountain valley tree forest bird horse light voice
ground wind rain cloud star moon sun sea ship bridge tower wall garden gate
path season harvest grain bread wine salt iron gold silver glass paper
letter song dance feast crown sword shield banner council village castle
temple square harbor island coast border province capital empire
kingdom nation army leader soldier farmer merchant builder healer singer
keeper rider hunter guard master student scholar judge witness neighbor
stranger traveler companion
""".split()

VERBS = """
make take know see come think look give find tell ask work seem feel leave
call keep hold turn follow stop create speak read spend grow open walk win
teach offer remember consider appear buy serve send build stay fall reach
raise pass sell decide return explain hope carry break receive
agree support hit produce cover catch draw choose wait
""".split()

ADJECTIVES = """
good new first last long great little own other old right big high small
large young different black white real best free full special easy
clear recent certain strong open true whole deep dark warm cold bright
quiet heavy light early late hard soft wide narrow ancient noble humble
bitter sweet gentle fierce steady hollow sacred common rare plain
""".split()

THEMES = {
    "wikipedia": ["blood", "muscle", "organ", "chamber", "valve", "oxygen",
                  "artery", "pulse"],
    "fiction": ["ache", "sorrow", "longing", "throb", "flame", "shadow",
                "whisper", "grief"],
    "religious": ["soul", "spirit", "prayer", "mercy", "faith", "grace",
                  "blessing", "offering"],
    "politics": ["courage", "resolve", "will", "reform", "duty", "assembly",
                 "debate", "consent"],
}

FIELD_NOUNS = {
    "wikipedia": ["century", "region", "species", "structure", "record",
                  "survey", "article", "museum", "institute", "archive"],
    "fiction": ["dragon", "wizard", "quest", "lantern", "cloak", "raven",
                "ember", "labyrinth", "prophecy", "thorn"],
    "religious": ["covenant", "psalm", "altar", "prophet", "flock",
                  "shepherd", "vineyard", "scripture", "pilgrim", "incense"],
    "politics": ["ballot", "senate", "statute", "committee", "treaty",
                 "mandate", "caucus", "tribunal", "charter", "delegate"],
}

TEMPLATES = [
    "the {a} {n} {v} the {n}",
    "a {n} of {n} {v} near the {a} {n}",
    "{n} and {n} {v} with the {n}",
    "many {n} {v} because the {n} {v}",
    "it is {a} that the {n} {v} the {n}",
    "the {n} {v} and the {a} {n} {v}",
    "every {a} {n} {v} a {n} of {n}",
    "some {n} {v} the {n} before the {n} {v}",
    "in the {a} {n} the {n} {v} the {n}",
    "no {n} {v} without a {a} {n}",
]

HEART_TEMPLATES = [
    "the heart {v} with {t}",
    "{t} and {t} fill the heart",
    "a heart of {t} {v} the {t}",
    "the {a} heart {v} like {t}",
    "every heart {v} its {t}",
    "the {t} of the heart {v} the {t}",
]

FLAVOR_TEMPLATES = [
    "the {f} {v} the {f}",
    "a {f} and a {f} {v}",
    "the {a} {f} {v} a {f}",
]


def chunk(words, size):
    return [words[i:i + size] for i in range(0, len(words) - size + 1, size)]


# Fixed topical clusters, identical in every field: each sentence draws all
# of its content words from one topic, so neighborhoods persist across
# fields. Every theme octet also forms a topic of its own, giving those
# words a stable base meaning everywhere.
TOPICS = []
for noun_group, verb_group, adj_group in zip(
        chunk(NOUNS, 7), chunk(VERBS * 3, 3), chunk(ADJECTIVES * 3, 3)):
    TOPICS.append({"n": noun_group, "v": verb_group, "a": adj_group})
for pool in THEMES.values():
    TOPICS.append({"n": pool, "v": VERBS[:4], "a": ADJECTIVES[:4]})


def make_field(rng, field):
    theme = THEMES[field]
    flavor = FIELD_NOUNS[field]

    def fill(template, topic):
        out = []
        for token in template.split():
            if token == "{n}":
                out.append(rng.choice(topic["n"]))
            elif token == "{v}":
                out.append(rng.choice(topic["v"]))
            elif token == "{a}":
                out.append(rng.choice(topic["a"]))
            elif token == "{t}":
                out.append(rng.choice(theme))
            elif token == "{f}":
                out.append(rng.choice(flavor))
            else:
                out.append(token)
        return out

    sentences = []
    for i in range(SENTENCES_PER_FIELD):
        if i % 20 == 0:
            topic = {"n": theme, "v": VERBS[:6], "a": ADJECTIVES[:6]}
            words = fill(rng.choice(HEART_TEMPLATES), topic)
        elif i % 20 == 10:
            words = fill(rng.choice(FLAVOR_TEMPLATES),
                         {"n": flavor, "v": VERBS[:6], "a": ADJECTIVES[:6]})
        else:
            words = fill(rng.choice(TEMPLATES), rng.choice(TOPICS))
        if rng.random() < 0.25 and len(words) > 4:
            words[rng.randrange(2, len(words) - 1)] += ","
        text = " ".join(words)
        text = text[0].upper() + text[1:]
        ending = rng.random()
        text += "!" if ending < 0.05 else ("?" if ending < 0.1 else ".")
        sentences.append(text)

    lines = []
    for i in range(0, len(sentences), 3):
        lines.append(" ".join(sentences[i:i + 3]))
    return "\n".join(lines) + "\n"


def main():
    rng = random.Random(SEED)
    for field in ["wikipedia", "fiction", "religious", "politics"]:
        with open(field + ".txt", "w") as f:
            f.write(make_field(rng, field))
        print(field, "written")


if __name__ == "__main__":
    main()
