"""Session fixtures: compiled-kernel warmup and the shared synthetic corpus."""

from __future__ import annotations

import pytest

from stemtag import Hyperparams, SamplerConfig, build_split_support, run

from helpers import build_corpus, english_like_sentences, write_corpus_file


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Run every variant once on a tiny corpus so jit compilation happens
    before any timed assertion; the compiled functions are disk-cached.
    """
    corpus = build_corpus([["ab", "b", "ab"], ["b", "a"]])
    support = build_split_support(corpus)
    for variant in ("w", "s", "sm"):
        hp = Hyperparams(
            alpha=0.1, beta=0.1, T=2, variant=variant,
            gamma=0.1 if variant == "sm" else None,
        )
        run(corpus, support, hp, SamplerConfig(iterations=2, seed=0))


@pytest.fixture(scope="session")
def english_corpus_path(tmp_path_factory):
    """Synthetic ~12.5k-token tagged English-like corpus, written once."""
    path = tmp_path_factory.mktemp("data") / "english_like.tsv"
    write_corpus_file(path, english_like_sentences(n_tokens=12500, seed=7))
    return path
