"""Exact brute-force references for tiny instances.

exact_posterior enumerates every full (tag, split) assignment and
normalizes the exact joint; exact_conditional substitutes every candidate
at one site.  chain_rule_log_prob evaluates the same joint a completely
different way (token-by-token predictive probabilities over plain Python
dicts), so the two implementations can cross-check each other.  These
functions are the ground truth the model and sampler are tested against;
nothing here is performance-sensitive.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

import numpy as np

from stemtag.corpus import Corpus, SplitSupport
from stemtag.model import Hyperparams, SamplerState, exact_joint_log_prob

Assignment = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class EnumerationBudget:
    """Cap on how many joint assignments an enumeration may visit."""

    max_assignments: int = 1_000_000

    def __post_init__(self):
        if self.max_assignments < 1:
            raise ValueError("max_assignments must be >= 1")


class BudgetExceededError(Exception):
    """Enumeration refused; .required says how many assignments it needed."""

    def __init__(self, required: int, budget: int):
        super().__init__(
            f"enumeration needs {required} assignments, budget allows {budget}"
        )
        self.required = required
        self.budget = budget


def _candidates_per_token(
    corpus: Corpus, support: Optional[SplitSupport], hp: Hyperparams
) -> list[list[tuple[int, int]]]:
    """Per token, every (tag, split_idx) pair in tag-major order."""
    out = []
    for wid in corpus.word_ids:
        if hp.uses_splits:
            n_splits = support.n_splits(int(wid))
        else:
            n_splits = 1
        out.append([(t, k) for t in range(hp.T) for k in range(n_splits)])
    return out


def enumeration_size(
    corpus: Corpus, support: Optional[SplitSupport], hp: Hyperparams
) -> int:
    size = 1
    for cands in _candidates_per_token(corpus, support, hp):
        size *= len(cands)
    return size


def exact_posterior(
    corpus: Corpus,
    support: Optional[SplitSupport],
    hp: Hyperparams,
    budget: EnumerationBudget = EnumerationBudget(),
) -> dict[Assignment, float]:
    """Posterior probability of every full assignment, by enumeration.

    Keys are tuples of per-token (tag, split_idx) pairs in corpus order
    (split_idx is always 0 for the word variant); values sum to 1.  Log
    joints are max-shifted before exponentiating so corpora this size
    cannot underflow.
    """
    if hp.uses_splits and support is None:
        raise ValueError(f"variant {hp.variant!r} requires a SplitSupport")
    required = enumeration_size(corpus, support, hp)
    if required > budget.max_assignments:
        raise BudgetExceededError(required, budget.max_assignments)
    n = corpus.n_tokens
    state = SamplerState(np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64))
    keys: list[Assignment] = []
    logps = np.empty(required, dtype=np.float64)
    for idx, combo in enumerate(
        itertools.product(*_candidates_per_token(corpus, support, hp))
    ):
        for i, (t, k) in enumerate(combo):
            state.tags[i] = t
            state.split_idx[i] = k
        keys.append(combo)
        logps[idx] = exact_joint_log_prob(corpus, state, hp, support)
    probs = np.exp(logps - logps.max())
    probs /= probs.sum()
    return dict(zip(keys, probs.tolist()))


def exact_conditional(
    corpus: Corpus,
    support: Optional[SplitSupport],
    hp: Hyperparams,
    state: SamplerState,
    i: int,
) -> np.ndarray:
    """Exact single-site conditional at token i given the rest of state.

    Every candidate is substituted into a copy of the state and scored by
    the full joint.  Returns normalized probabilities with shape (T,) for
    the word variant and (T, n_splits) otherwise; this is the
    ratio-of-joints reference the fast conditional weights must match.
    """
    if not (0 <= i < corpus.n_tokens):
        raise IndexError(f"token index {i} out of range")
    work = state.copy()
    if hp.uses_splits:
        n_splits = support.n_splits(int(corpus.word_ids[i]))
    else:
        n_splits = 1
    logps = np.empty(hp.T * n_splits, dtype=np.float64)
    pos = 0
    for t in range(hp.T):
        for k in range(n_splits):
            work.tags[i] = t
            work.split_idx[i] = k
            logps[pos] = exact_joint_log_prob(corpus, work, hp, support)
            pos += 1
    probs = np.exp(logps - logps.max())
    probs /= probs.sum()
    if hp.uses_splits:
        return probs.reshape(hp.T, n_splits)
    return probs


def chain_rule_log_prob(
    corpus: Corpus,
    state: SamplerState,
    hp: Hyperparams,
    support: Optional[SplitSupport] = None,
) -> float:
    """Joint log probability via sequential predictive factors.

    Walks the corpus accumulating log P(draw | preceding draws) for every
    transition and emission, updating dict-based counts as it goes.  The
    boundary context is normalized with T*alpha like any other row, and
    the stem/suffix families both read the per-tag draw total before the
    token increments it.  Mathematically equal to the Gamma-ratio closed
    form by exchangeability; shares no code with it.
    """
    if state.n != corpus.n_tokens:
        raise ValueError("state length does not match corpus")
    T = hp.T
    boundary = T
    e_dim = support.S if hp.uses_splits else corpus.n_types
    trans: dict = defaultdict(int)
    ctx: dict = defaultdict(int)
    emit: dict = defaultdict(int)
    emit_suffix: dict = defaultdict(int)
    tag_total: dict = defaultdict(int)
    lp = 0.0
    pos = 0
    for sent in corpus.sentences:
        prev = boundary
        for tok in sent:
            t = int(state.tags[pos])
            lp += math.log((trans[(prev, t)] + hp.alpha) / (ctx[prev] + T * hp.alpha))
            trans[(prev, t)] += 1
            ctx[prev] += 1
            if hp.uses_splits:
                s, m = support.splits_of(tok.word_id)[int(state.split_idx[pos])]
                lp += math.log(
                    (emit[(t, s)] + hp.beta) / (tag_total[t] + e_dim * hp.beta)
                )
                emit[(t, s)] += 1
                if hp.variant == "sm":
                    lp += math.log(
                        (emit_suffix[(t, m)] + hp.gamma)
                        / (tag_total[t] + support.M * hp.gamma)
                    )
                    emit_suffix[(t, m)] += 1
            else:
                w = tok.word_id
                lp += math.log(
                    (emit[(t, w)] + hp.beta) / (tag_total[t] + e_dim * hp.beta)
                )
                emit[(t, w)] += 1
            tag_total[t] += 1
            prev = t
            pos += 1
        lp += math.log(
            (trans[(prev, boundary)] + hp.alpha) / (ctx[prev] + T * hp.alpha)
        )
        trans[(prev, boundary)] += 1
        ctx[prev] += 1
    return lp
