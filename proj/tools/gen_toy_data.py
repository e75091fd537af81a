#!/usr/bin/env python3
# Copyright 2026 The Allusion Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates the synthetic toy dataset under data/toy.

Target verses are built from pseudo-Latin lemmas grouped into synonym
concepts. Each query span alludes to one verse: some lemmas are reused with a
different inflection, others are swapped for a synonym, and function words are
sprinkled in. Query spans sit inside unrelated context in the source passages.
"""

import argparse
import json
import pathlib

import numpy as np

CONSONANTS = list("bcdfglmnprstv")
VOWELS = list("aeiou")

DECLENSIONS = {
    "a": ("a", ["a", "ae", "am", "is", "arum"]),
    "o": ("us", ["us", "i", "o", "um", "orum"]),
    "n": ("um", ["um", "i", "o", "a", "is"]),
    "v": ("o", ["o", "at", "ant", "ere", "it", "abat"]),
}

FUNCTION_WORDS = {
    "et": ["et"], "in": ["in"], "non": ["non"], "ad": ["ad"], "cum": ["cum"],
    "sum": ["est", "sunt", "erat"], "qui": ["qui", "quae", "quod"], "sed": ["sed"],
    "de": ["de"], "ut": ["ut"], "nec": ["nec"], "ego": ["ego", "me", "mihi"],
}


def make_stems(rng, count):
    stems = set()
    while len(stems) < count:
        n = rng.integers(2, 4)
        stem = "".join(rng.choice(CONSONANTS) + rng.choice(VOWELS) for _ in range(n))
        stem += rng.choice(CONSONANTS)
        stems.add(stem)
    return sorted(stems)


class Lexicon:
    def __init__(self, rng, concepts, per_concept):
        stems = make_stems(rng, concepts * per_concept)
        rng.shuffle(stems)
        self.concepts = []
        self.forms = {}
        for c in range(concepts):
            members = []
            for s in stems[c * per_concept:(c + 1) * per_concept]:
                kind = rng.choice(list(DECLENSIONS))
                ending, endings = DECLENSIONS[kind]
                lemma = s + ending
                self.forms[lemma] = [s + e for e in endings]
                members.append(lemma)
            self.concepts.append(members)
        self.concept_of = {l: c for c, ls in enumerate(self.concepts) for l in ls}
        for lemma, forms in FUNCTION_WORDS.items():
            self.forms[lemma] = forms

    def inflect(self, rng, lemma, avoid=None):
        forms = [f for f in self.forms[lemma] if f != avoid] or self.forms[lemma]
        return forms[rng.integers(len(forms))]


def function_word(rng):
    lemma = list(FUNCTION_WORDS)[rng.integers(len(FUNCTION_WORDS))]
    return lemma


def make_verse(rng, lex, length):
    words = []
    content = rng.integers(length // 2 + 1, length - 1)
    concepts = rng.choice(len(lex.concepts), size=content, replace=False)
    for c in concepts:
        members = lex.concepts[c]
        words.append(members[rng.integers(len(members))])
    while len(words) < length:
        words.insert(rng.integers(len(words) + 1), function_word(rng))
    tokens = [lex.inflect(rng, l) for l in words]
    return tokens, words


def allude(rng, lex, verse_tokens, verse_lemmas, args):
    """Returns (tokens, lemmas, anchor offset) of an allusive span."""
    content = [i for i, l in enumerate(verse_lemmas) if l in lex.concept_of]
    keep = rng.choice(content, size=min(len(content), rng.integers(3, 6)), replace=False)
    keep = sorted(keep)
    span_lemmas, span_tokens, allusive = [], [], []
    for i in keep:
        lemma = verse_lemmas[i]
        if rng.random() < args.synonym_rate:
            members = [m for m in lex.concepts[lex.concept_of[lemma]] if m != lemma]
            lemma = members[rng.integers(len(members))]
            token = lex.inflect(rng, lemma)
        else:
            # Lemma reuse, often with a different surface form.
            if rng.random() < args.verbatim_rate:
                token = verse_tokens[i]
            else:
                token = lex.inflect(rng, lemma, avoid=verse_tokens[i])
        allusive.append(len(span_lemmas))
        span_lemmas.append(lemma)
        span_tokens.append(token)
    for _ in range(rng.integers(1, 4)):
        at = rng.integers(len(span_lemmas) + 1)
        fw = function_word(rng)
        span_lemmas.insert(at, fw)
        span_tokens.insert(at, lex.inflect(rng, fw))
        allusive = [a + 1 if a >= at else a for a in allusive]
    # Anchor near one edge so a fixed window misses part of the span.
    anchor = allusive[0] if rng.random() < 0.5 else allusive[-1]
    return span_tokens, span_lemmas, anchor


def noise(rng, lex, length):
    lemmas = []
    for _ in range(length):
        if rng.random() < 0.3:
            lemmas.append(function_word(rng))
        else:
            members = lex.concepts[rng.integers(len(lex.concepts))]
            lemmas.append(members[rng.integers(len(members))])
    return [lex.inflect(rng, l) for l in lemmas], lemmas


def embeddings(rng, lex, dim, args):
    rows = {}
    centers = rng.normal(size=(len(lex.concepts), dim))
    for c, members in enumerate(lex.concepts):
        for lemma in members:
            v = centers[c] + rng.normal(scale=args.lemma_noise / np.sqrt(dim), size=dim) * \
                np.linalg.norm(centers[c])
            rows[lemma] = v
            for form in lex.forms[lemma]:
                if form in rows:
                    continue
                if rng.random() < args.token_oov:
                    continue
                rows[form] = v + rng.normal(scale=args.token_noise / np.sqrt(dim), size=dim) * \
                    np.linalg.norm(v)
    for lemma, forms in FUNCTION_WORDS.items():
        v = rng.normal(size=dim)
        rows[lemma] = v
        for form in forms:
            rows.setdefault(form, v + rng.normal(scale=0.2 / np.sqrt(dim), size=dim) *
                            np.linalg.norm(v))
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent /
                                        "data" / "toy"))
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--concepts", type=int, default=60)
    p.add_argument("--synonyms", type=int, default=3)
    p.add_argument("--verses", type=int, default=200)
    p.add_argument("--passages", type=int, default=30)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--synonym-rate", type=float, default=0.45)
    p.add_argument("--verbatim-rate", type=float, default=0.4)
    p.add_argument("--lemma-noise", type=float, default=0.35)
    p.add_argument("--token-noise", type=float, default=0.45)
    p.add_argument("--token-oov", type=float, default=0.25)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    lex = Lexicon(rng, args.concepts, args.synonyms)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    verses = []
    for v in range(args.verses):
        tokens, lemmas = make_verse(rng, lex, int(rng.integers(9, 15)))
        verses.append({"id": f"v{v + 1:03d}", "tokens": tokens, "lemmas": lemmas})

    passages, queries = [], []
    for s in range(args.passages):
        tokens, lemmas = noise(rng, lex, int(rng.integers(4, 10)))
        for _ in range(int(rng.integers(1, 3))):
            verse = verses[rng.integers(len(verses))]
            span_t, span_l, anchor = allude(rng, lex, verse["tokens"], verse["lemmas"], args)
            start = len(tokens)
            tokens += span_t
            lemmas += span_l
            queries.append({
                "id": f"q{len(queries) + 1:03d}",
                "source_doc": f"s{s + 1:02d}",
                "anchor_start": start + anchor,
                "anchor_end": start + anchor + 1,
                "span_start": start,
                "span_end": start + len(span_t),
                "relevant_doc": verse["id"],
                "discarded": bool(rng.random() < 0.12),
            })
            t, l = noise(rng, lex, int(rng.integers(4, 10)))
            tokens += t
            lemmas += l
        passages.append({"id": f"s{s + 1:02d}", "tokens": tokens, "lemmas": lemmas})

    def write_jsonl(name, records):
        with open(out / name, "w", encoding="utf-8") as f:
            for r in records:
                f.write(json.dumps(r, ensure_ascii=False) + "\n")

    write_jsonl("target.jsonl", verses)
    write_jsonl("source.jsonl", passages)
    write_jsonl("queries.jsonl", queries)

    # 3 annotators x 20 items around an anchor.
    annotations = []
    for item in range(20):
        length = int(rng.integers(15, 40))
        anchor = int(rng.integers(3, length - 3))
        core_left = int(rng.integers(0, 4))
        core_right = int(rng.integers(1, 5))
        for a in ("ann1", "ann2", "ann3"):
            left, right = core_left, core_right
            if rng.random() < 0.6:
                left += int(rng.integers(-2, 4))
                right += int(rng.integers(-2, 4))
            start = max(0, anchor - max(0, left))
            end = min(length, anchor + max(1, right))
            annotations.append({"item_id": f"i{item + 1:02d}", "annotator_id": a,
                                "span_start": start, "span_end": end})
    write_jsonl("annotations.jsonl", annotations)

    rows = embeddings(rng, lex, args.dim, args)
    with open(out / "embeddings.vec", "w", encoding="utf-8") as f:
        f.write(f"{len(rows)} {args.dim}\n")
        for term in sorted(rows):
            f.write(term + " " + " ".join(f"{x:.6f}" for x in rows[term]) + "\n")

    with open(out / "synonyms.tsv", "w", encoding="utf-8") as f:
        f.write("# lemma<TAB>synonyms\n")
        for members in lex.concepts:
            for lemma in members:
                others = [m for m in members if m != lemma]
                f.write(lemma + "\t" + ",".join(others) + "\n")


if __name__ == "__main__":
    main()
