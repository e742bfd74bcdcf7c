"""Brute-force enumeration oracle: posteriors, conditionals, budgets."""

import math
import random

import numpy as np
import pytest

from stemtag import (
    BudgetExceededError,
    EnumerationBudget,
    Hyperparams,
    SamplerState,
    build_split_support,
    enumeration_size,
    exact_conditional,
    exact_posterior,
)

from helpers import build_corpus


def state_of(tags, splits=None):
    tags = np.asarray(tags, dtype=np.int64)
    if splits is None:
        splits = np.zeros_like(tags)
    return SamplerState(tags, np.asarray(splits, dtype=np.int64))


class TestEnumerationSize:
    def test_word_variant(self):
        corpus = build_corpus([["a", "b", "a"]])
        hp = Hyperparams(alpha=0.5, beta=0.5, T=3, variant="w")
        assert enumeration_size(corpus, None, hp) == 27

    def test_stem_variant_counts_splits(self):
        corpus = build_corpus([["ab", "a"]])
        support = build_split_support(corpus)
        hp = Hyperparams(alpha=0.5, beta=0.5, T=2, variant="s")
        # "ab" has 2 splits, "a" has 1: (2*2) * (2*1) = 8.
        assert enumeration_size(corpus, support, hp) == 8


class TestBudget:
    def test_refusal_reports_required_size(self):
        corpus = build_corpus([["a", "b", "a", "b"]])
        hp = Hyperparams(alpha=0.5, beta=0.5, T=3, variant="w")
        with pytest.raises(BudgetExceededError) as e:
            exact_posterior(corpus, None, hp, EnumerationBudget(max_assignments=80))
        assert e.value.required == 81
        assert e.value.budget == 80
        assert "81" in str(e.value)

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            EnumerationBudget(max_assignments=0)

    def test_exact_fit_allowed(self):
        corpus = build_corpus([["a", "b"]])
        hp = Hyperparams(alpha=0.5, beta=0.5, T=2, variant="w")
        post = exact_posterior(corpus, None, hp, EnumerationBudget(max_assignments=4))
        assert len(post) == 4


class TestExactPosterior:
    def test_alternating_three_token_fixture(self):
        """Frozen hand-derived posterior: [a b a], T=2, alpha=beta=1/2.

        By symmetry and direct evaluation of the collapsed joint, the two
        alternating assignments each have probability 1/4 and the remaining
        six each have 1/12.
        """
        corpus = build_corpus([["a", "b", "a"]])
        hp = Hyperparams(alpha=0.5, beta=0.5, T=2, variant="w")
        post = exact_posterior(corpus, None, hp)
        assert len(post) == 8
        assert abs(sum(post.values()) - 1.0) < 1e-12
        key = lambda ts: tuple((t, 0) for t in ts)
        for tags in ((0, 1, 0), (1, 0, 1)):
            assert abs(post[key(tags)] - 0.25) < 1e-12
        for tags in (
            (0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 0, 0), (1, 1, 0), (1, 1, 1),
        ):
            assert abs(post[key(tags)] - 1.0 / 12.0) < 1e-12

    def test_keys_in_lexicographic_order(self):
        corpus = build_corpus([["a", "b"]])
        hp = Hyperparams(alpha=0.5, beta=0.5, T=2, variant="w")
        post = exact_posterior(corpus, None, hp)
        keys = list(post)
        assert keys[0] == ((0, 0), (0, 0))
        assert keys[-1] == ((1, 0), (1, 0))
        assert keys == sorted(keys)

    def test_stem_variant_enumerates_splits(self):
        corpus = build_corpus([["ab", "a"]])
        support = build_split_support(corpus)
        hp = Hyperparams(alpha=0.5, beta=0.5, T=2, variant="s")
        post = exact_posterior(corpus, support, hp)
        assert len(post) == 8
        assert abs(sum(post.values()) - 1.0) < 1e-12
        # Symmetric tags: relabeling 0<->1 leaves probabilities unchanged.
        for (a, ka), (b, kb) in post:
            swapped = ((1 - a, ka), (1 - b, kb))
            assert abs(post[((a, ka), (b, kb))] - post[swapped]) < 1e-12

    def test_sm_variant_sums_to_one(self):
        corpus = build_corpus([["ab"], ["ba"]])
        support = build_split_support(corpus)
        hp = Hyperparams(alpha=0.25, beta=0.5, T=2, variant="sm", gamma=0.75)
        post = exact_posterior(corpus, support, hp)
        assert len(post) == 16
        assert abs(sum(post.values()) - 1.0) < 1e-12

    def test_missing_support_rejected(self):
        corpus = build_corpus([["ab"]])
        hp = Hyperparams(alpha=0.5, beta=0.5, T=2, variant="s")
        with pytest.raises(ValueError):
            exact_posterior(corpus, None, hp)


class TestExactConditional:
    def test_hand_value_on_fixture(self):
        # With t0=0 and t2=0 fixed, P(t1=1 | rest) on [a b a] equals
        # (1/4) / (1/4 + 1/12) = 3/4 from the frozen posterior values.
        corpus = build_corpus([["a", "b", "a"]])
        hp = Hyperparams(alpha=0.5, beta=0.5, T=2, variant="w")
        cond = exact_conditional(corpus, None, hp, state_of([0, 0, 0]), 1)
        assert cond.shape == (2,)
        assert abs(cond[0] - 0.25) < 1e-12
        assert abs(cond[1] - 0.75) < 1e-12

    def test_matches_posterior_restriction(self):
        corpus = build_corpus([["ab", "b"]])
        support = build_split_support(corpus)
        hp = Hyperparams(alpha=0.4, beta=0.6, T=2, variant="s")
        post = exact_posterior(corpus, support, hp)
        fixed = (1, 0)  # token 1 pinned at tag 1, split 0
        cond = exact_conditional(
            corpus, support, hp, state_of([0, 1], [0, 0]), 0
        )
        mass = {
            k[0]: p for k, p in post.items() if k[1] == fixed
        }
        z = sum(mass.values())
        for (t, s), p in mass.items():
            assert abs(cond[t, s] - p / z) < 1e-12

    def test_normalized_and_shaped(self):
        corpus = build_corpus([["ab", "a", "b"]])
        support = build_split_support(corpus)
        hp = Hyperparams(alpha=0.5, beta=0.5, T=3, variant="sm", gamma=0.5)
        rs = random.Random(3)
        tags = [rs.randrange(3) for _ in range(3)]
        splits = [rs.randrange(support.n_splits(int(w))) for w in corpus.word_ids]
        cond = exact_conditional(corpus, support, hp, state_of(tags, splits), 0)
        assert cond.shape == (3, 2)
        assert abs(cond.sum() - 1.0) < 1e-12

    def test_index_validation(self):
        corpus = build_corpus([["a"]])
        hp = Hyperparams(alpha=0.5, beta=0.5, T=2, variant="w")
        with pytest.raises(IndexError):
            exact_conditional(corpus, None, hp, state_of([0]), 5)

    def test_does_not_mutate_state(self):
        corpus = build_corpus([["a", "b"]])
        hp = Hyperparams(alpha=0.5, beta=0.5, T=2, variant="w")
        st = state_of([1, 1])
        exact_conditional(corpus, None, hp, st, 0)
        assert st.tags.tolist() == [1, 1]
