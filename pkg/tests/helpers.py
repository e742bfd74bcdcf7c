"""Shared test utilities: in-memory corpus builders, a deterministic
synthetic tagged-text generator, and independent reference metric
implementations used to cross-check the package's own.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import log2

import numpy as np

from stemtag import Corpus, Interner, Token, load_corpus


def build_corpus(sentences, tags=None, stems=None):
    """Corpus from plain python lists, no file round trip.

    sentences: list of lists of word strings.  tags/stems, when given,
    mirror that structure with tag strings / stem strings.
    """
    vocab = Interner()
    tag_names = Interner() if tags is not None else None
    out = []
    for si, words in enumerate(sentences):
        sent = []
        for ti, w in enumerate(words):
            gt = tag_names.intern(tags[si][ti]) if tags is not None else None
            gs = stems[si][ti] if stems is not None else None
            sent.append(Token(vocab.intern(w), gt, gs))
        out.append(sent)
    return Corpus(out, vocab, tag_names=tag_names)


def write_corpus_file(path, rows):
    """Write token rows to a TSV corpus file.

    rows: list of sentences; each token is a string or a tuple of columns.
    """
    with open(path, "w", encoding="utf-8") as f:
        for sent in rows:
            for tok in sent:
                if isinstance(tok, str):
                    f.write(tok + "\n")
                else:
                    f.write("\t".join(tok) + "\n")
            f.write("\n")
    return path


def corpus_file(tmp_path, rows, name="corpus.tsv", **load_kwargs):
    path = tmp_path / name
    write_corpus_file(path, rows)
    return load_corpus(path, **load_kwargs)


def random_word_sentences(rs: random.Random, max_tokens=8, alphabet="ab", max_len=3):
    """Random pre-tokenized text: 1..max_tokens tokens in 1-2 sentences."""
    n = rs.randint(1, max_tokens)
    words = [
        "".join(rs.choice(alphabet) for _ in range(rs.randint(1, max_len)))
        for _ in range(n)
    ]
    if n >= 2 and rs.random() < 0.5:
        cut = rs.randint(1, n - 1)
        return [words[:cut], words[cut:]]
    return [words]


# ---------------------------------------------------------------------------
# Independent metric references (pure python, fractions where exact).

def ref_many_to_one(table: np.ndarray) -> Fraction:
    """Each induced row mapped to its best gold column; exact rational."""
    n = int(table.sum())
    matched = sum(int(max(row)) for row in table.tolist())
    return Fraction(matched, n)


def ref_vi_bits(table: np.ndarray) -> float:
    """H(induced) + H(gold) - 2*I(induced; gold), all in bits."""
    n = int(table.sum())
    pij = [
        [Fraction(int(c), n) for c in row] for row in table.tolist()
    ]
    pi = [sum(row) for row in pij]
    pj = [sum(col) for col in zip(*pij)]

    def entropy(ps):
        return -sum(float(p) * log2(float(p)) for p in ps if p)

    mi = 0.0
    for i, row in enumerate(pij):
        for j, p in enumerate(row):
            if p:
                mi += float(p) * log2(float(p / (pi[i] * pj[j])))
    return entropy(pi) + entropy(pj) - 2.0 * mi


# ---------------------------------------------------------------------------
# Deterministic synthetic English-like tagged corpus.

def _zipf_pick(rng: random.Random, items, s=1.0, q=2.7):
    weights = [1.0 / (r + q) ** s for r in range(len(items))]
    return rng.choices(items, weights=weights, k=1)[0]


def english_like_sentences(n_tokens=12500, seed=7):
    """Tagged, stemmed sentences with Zipf-tailed vocabulary and English
    suffix morphology; 12 universal-style tag categories.

    Returns a list of sentences, each a list of (word, tag, stem) triples.
    Deterministic for a given (n_tokens, seed).
    """
    rng = random.Random(seed)
    sylA = ["ba","be","bo","ca","co","cu","da","de","do","fa","fe","fo","ga",
            "go","ha","he","ho","ja","jo","ka","ke","ko","la","le","lo","ma",
            "me","mo","na","ne","no","pa","pe","po","ra","re","ro","sa","se",
            "so","ta","te","to","va","ve","vo","wa","we","wo","zu"]
    sylB = ["ble","cket","ddle","ffer","gger","llow","mber","nder","pple",
            "rret","sket","ssel","tter","velt","zzle","ck","ft","ld","lk",
            "mp","nd","nk","nt","rd","rk","rm","rn","rt","sk","sp","st"]

    def make_stems(count, salt, min_len, max_len):
        out, seen = [], set()
        r = random.Random(seed * 104729 + salt)
        while len(out) < count:
            s = r.choice(sylA) + r.choice(sylA) + r.choice(sylB)
            if len(s) < min_len:
                s = r.choice(sylA) + s
            if min_len <= len(s) <= max_len and s not in seen:
                seen.add(s)
                out.append(s)
        return out

    noun_stems = make_stems(420, 1, 5, 9)
    verb_stems = make_stems(260, 2, 5, 9)
    adj_stems = make_stems(130, 3, 5, 9)
    adv_stems = make_stems(70, 4, 5, 9)

    dets = ["the", "a", "this", "that", "each", "some", "no", "every"]
    preps = ["of", "in", "on", "at", "with", "from", "by", "for", "over"]
    prons = ["it", "he", "she", "they", "we", "you", "i", "who"]
    conjs = ["and", "or", "but"]
    prts = ["to", "up", "out", "off", "down"]
    others = ["oh", "hey", "um", "huh"]

    def noun():
        s = _zipf_pick(rng, noun_stems)
        sfx = rng.choices(["", "s"], weights=[0.72, 0.28])[0]
        return (s + sfx, "NOUN", s)

    def verb():
        s = _zipf_pick(rng, verb_stems)
        sfx = rng.choices(["", "s", "ed", "ing"], weights=[0.4, 0.2, 0.25, 0.15])[0]
        return (s + sfx, "VERB", s)

    def adj():
        s = _zipf_pick(rng, adj_stems)
        sfx = rng.choices(["", "er", "est"], weights=[0.78, 0.12, 0.1])[0]
        return (s + sfx, "ADJ", s)

    def adv():
        s = _zipf_pick(rng, adv_stems)
        return (s + "ly", "ADV", s + "ly")

    def num():
        if rng.random() < 0.55:
            w = str(rng.randint(2, 999))
        else:
            w = rng.choice(["one", "two", "three", "ten", "seven", "forty"])
        return (w, "NUM", w)

    def det():
        w = _zipf_pick(rng, dets, q=0.6)
        return (w, "DET", w)

    def prep():
        w = _zipf_pick(rng, preps, q=1.2)
        return (w, "ADP", w)

    def pron():
        w = _zipf_pick(rng, prons, q=1.2)
        return (w, "PRON", w)

    def conj():
        w = _zipf_pick(rng, conjs, q=0.8)
        return (w, "CONJ", w)

    def prt():
        w = _zipf_pick(rng, prts, q=0.7)
        return (w, "PRT", w)

    def stop():
        w = rng.choices([".", "!", "?"], weights=[0.88, 0.06, 0.06])[0]
        return (w, "PUNCT", w)

    def other():
        w = rng.choice(others)
        return (w, "X", w)

    def np():
        out = []
        if rng.random() < 0.22:
            return [pron()]
        out.append(det())
        if rng.random() < 0.12:
            out.append(num())
        if rng.random() < 0.32:
            out.append(adj())
        out.append(noun())
        if rng.random() < 0.18:
            out += [prep(), det(), noun()]
        return out

    def vp():
        out = [verb()]
        if rng.random() < 0.18:
            out.append(prt())
        if rng.random() < 0.2:
            out.append(adv())
        return out

    sentences, total = [], 0
    while total < n_tokens:
        sent = []
        if rng.random() < 0.02:
            sent.append(other())
        sent += np() + vp()
        if rng.random() < 0.55:
            sent += np()
        if rng.random() < 0.35:
            sent += [prep()] + np()
        if rng.random() < 0.18:
            sent.append((",", "PUNCT", ","))
            sent += [conj()] + np() + vp()
        sent.append(stop())
        sentences.append(sent)
        total += len(sent)
    return sentences
