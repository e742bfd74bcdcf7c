"""Collapsed Dirichlet-multinomial HMM: sufficient statistics, single-site
conditional weights, and the exact joint probability.

Three variants share one transition structure and differ in what a tag
emits: the surface word ("w"), the stem of a latent split ("s"), or the
stem and suffix independently ("sm").  Parameters are integrated out, so
the entire model is a set of integer count tables plus concentrations.

Each sentence is framed by a distinguished boundary tag with index T on
both sides.  Boundary tags emit nothing, are never candidates, and exist
only in the transition tables.  Transition rows are normalized with
T*alpha even though successor cells include the boundary tag (a deficient
measure); this matches the per-draw predictive factors in the conditional
weights, which is what makes weight ratios equal exact joint ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from stemtag import _kernels
from stemtag.corpus import Corpus, SplitSupport

VARIANTS = ("w", "s", "sm")

_VARIANT_CODE = {"w": 0, "s": 1, "sm": 2}

# Shared read-only stand-in for the suffix table in variants that have none;
# kernels only touch it under the sm code path.
_NO_SUFFIX = np.zeros((1, 1), dtype=np.int64)


@dataclass(frozen=True)
class Hyperparams:
    """Concentration parameters, tagset size, and variant selector."""

    alpha: float
    beta: float
    T: int
    variant: str
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")
        if self.variant == "sm":
            if self.gamma is None:
                raise ValueError("variant 'sm' requires gamma")
        if self.gamma is not None:
            g = self.gamma
            if not (isinstance(g, (int, float)) and math.isfinite(g) and g > 0):
                raise ValueError(f"gamma must be a positive finite number, got {g!r}")
        if not (isinstance(self.T, int) and self.T >= 1):
            raise ValueError(f"T must be a positive integer, got {self.T!r}")

    @property
    def variant_code(self) -> int:
        return _VARIANT_CODE[self.variant]

    @property
    def uses_splits(self) -> bool:
        return self.variant != "w"


class SamplerState:
    """Per-token current tag and split index; the Markov-chain state.

    split_idx is carried for all variants but stays 0 under "w".
    """

    __slots__ = ("tags", "split_idx")

    def __init__(self, tags: np.ndarray, split_idx: np.ndarray):
        tags = np.ascontiguousarray(tags, dtype=np.int64)
        split_idx = np.ascontiguousarray(split_idx, dtype=np.int64)
        if tags.shape != split_idx.shape or tags.ndim != 1:
            raise ValueError("tags and split_idx must be 1-d arrays of equal length")
        self.tags = tags
        self.split_idx = split_idx

    @property
    def n(self) -> int:
        return self.tags.shape[0]

    def copy(self) -> "SamplerState":
        return SamplerState(self.tags.copy(), self.split_idx.copy())

    def equals(self, other: "SamplerState") -> bool:
        return bool(
            np.array_equal(self.tags, other.tags)
            and np.array_equal(self.split_idx, other.split_idx)
        )


class CountTables:
    """All sufficient statistics of the collapsed model.

    `included[i]` records whether token i's contributions are currently in
    the tables; remove/add flip it.  A bigram is counted only while both
    endpoints are included, so tokens can be removed or added in any order
    and the tables stay a consistent partial tally.
    """

    __slots__ = ("trans", "trans_ctx", "emit", "emit_suffix", "emit_total", "included")

    def __init__(self, trans, trans_ctx, emit, emit_suffix, emit_total, included):
        self.trans = trans
        self.trans_ctx = trans_ctx
        self.emit = emit
        self.emit_suffix = emit_suffix
        self.emit_total = emit_total
        self.included = included

    @classmethod
    def zeros(
        cls, hp: Hyperparams, corpus: Corpus, support: Optional[SplitSupport] = None
    ) -> "CountTables":
        """Empty tables with every token marked excluded."""
        if hp.uses_splits:
            if support is None:
                raise ValueError(f"variant {hp.variant!r} requires a SplitSupport")
            e_dim = support.S
        else:
            e_dim = corpus.n_types
        T = hp.T
        return cls(
            trans=np.zeros((T + 1, T + 1), dtype=np.int64),
            trans_ctx=np.zeros(T + 1, dtype=np.int64),
            emit=np.zeros((T, e_dim), dtype=np.int64),
            emit_suffix=(
                np.zeros((T, support.M), dtype=np.int64) if hp.variant == "sm" else None
            ),
            emit_total=np.zeros(T, dtype=np.int64),
            included=np.zeros(corpus.n_tokens, dtype=np.uint8),
        )

    @classmethod
    def from_state(
        cls,
        corpus: Corpus,
        support: Optional[SplitSupport],
        hp: Hyperparams,
        state: SamplerState,
    ) -> "CountTables":
        """Full recount from scratch; the reference for incremental updates."""
        if state.n != corpus.n_tokens:
            raise ValueError("state length does not match corpus")
        T = hp.T
        tags = state.tags
        if state.n:
            if int(tags.min()) < 0 or int(tags.max()) >= T:
                raise ValueError("state contains a tag outside [0, T)")
        c = cls.zeros(hp, corpus, support)
        c.included[:] = 1
        if state.n == 0:
            return c
        starts = corpus.prev_index == -1
        np.add.at(
            c.trans, (np.full(int(starts.sum()), T, dtype=np.int64), tags[starts]), 1
        )
        nx = corpus.next_index
        succ = np.where(nx >= 0, tags[np.clip(nx, 0, None)], T)
        np.add.at(c.trans, (tags, succ), 1)
        c.trans_ctx[:] = c.trans.sum(axis=1)
        if hp.uses_splits:
            lens = (
                support.split_offsets[corpus.word_ids + 1]
                - support.split_offsets[corpus.word_ids]
            )
            if np.any(state.split_idx < 0) or np.any(state.split_idx >= lens):
                raise ValueError("state contains a split index out of range")
            j = support.split_offsets[corpus.word_ids] + state.split_idx
            np.add.at(c.emit, (tags, support.split_stems[j]), 1)
            if hp.variant == "sm":
                np.add.at(c.emit_suffix, (tags, support.split_suffixes[j]), 1)
        else:
            np.add.at(c.emit, (tags, corpus.word_ids), 1)
        c.emit_total[:] = np.bincount(tags, minlength=T)
        return c

    def copy(self) -> "CountTables":
        return CountTables(
            self.trans.copy(),
            self.trans_ctx.copy(),
            self.emit.copy(),
            None if self.emit_suffix is None else self.emit_suffix.copy(),
            self.emit_total.copy(),
            self.included.copy(),
        )

    def equals(self, other: "CountTables") -> bool:
        if (self.emit_suffix is None) != (other.emit_suffix is None):
            return False
        return bool(
            np.array_equal(self.trans, other.trans)
            and np.array_equal(self.trans_ctx, other.trans_ctx)
            and np.array_equal(self.emit, other.emit)
            and (
                self.emit_suffix is None
                or np.array_equal(self.emit_suffix, other.emit_suffix)
            )
            and np.array_equal(self.emit_total, other.emit_total)
            and np.array_equal(self.included, other.included)
        )

    def _suffix_arr(self) -> np.ndarray:
        return self.emit_suffix if self.emit_suffix is not None else _NO_SUFFIX


class Model:
    """Bookkeeping facade binding a corpus, split support, and hyperparams.

    remove_token and add_token are exact inverses; the sampler's compiled
    sweep uses the same kernels these wrappers call.
    """

    def __init__(
        self, corpus: Corpus, support: Optional[SplitSupport], hp: Hyperparams
    ):
        if hp.uses_splits and support is None:
            raise ValueError(f"variant {hp.variant!r} requires a SplitSupport")
        self.corpus = corpus
        self.support = support
        self.hp = hp

    def _support_arrays(self):
        if self.support is not None:
            s = self.support
            return s.split_offsets, s.split_stems, s.split_suffixes
        z = np.zeros(0, dtype=np.int64)
        return np.zeros(1, dtype=np.int64), z, z

    def remove_token(self, state: SamplerState, counts: CountTables, i: int) -> None:
        """Take token i's transitions, emissions, and totals out of counts."""
        if not (0 <= i < self.corpus.n_tokens):
            raise IndexError(f"token index {i} out of range")
        offs, stems, sufs = self._support_arrays()
        _kernels._remove_token(
            i, state.tags, state.split_idx,
            self.corpus.word_ids, self.corpus.prev_index, self.corpus.next_index,
            offs, stems, sufs,
            counts.trans, counts.trans_ctx, counts.emit,
            counts._suffix_arr(), counts.emit_total, counts.included,
            self.hp.variant_code,
        )

    def add_token(
        self, state: SamplerState, counts: CountTables, i: int, tag: int, split_idx: int
    ) -> None:
        """Put token i back with the given tag and split, updating state."""
        if not (0 <= i < self.corpus.n_tokens):
            raise IndexError(f"token index {i} out of range")
        if not (0 <= tag < self.hp.T):
            raise ValueError(f"tag {tag} out of range for T={self.hp.T}")
        if self.hp.uses_splits:
            n_splits = self.support.n_splits(int(self.corpus.word_ids[i]))
            if not (0 <= split_idx < n_splits):
                raise ValueError(
                    f"split index {split_idx} out of range for token {i} "
                    f"({n_splits} splits)"
                )
        elif split_idx != 0:
            raise ValueError("variant 'w' has no splits; split_idx must be 0")
        offs, stems, sufs = self._support_arrays()
        _kernels._add_token(
            i, tag, split_idx, state.tags, state.split_idx,
            self.corpus.word_ids, self.corpus.prev_index, self.corpus.next_index,
            offs, stems, sufs,
            counts.trans, counts.trans_ctx, counts.emit,
            counts._suffix_arr(), counts.emit_total, counts.included,
            self.hp.variant_code,
        )

    def recount(self, state: SamplerState) -> CountTables:
        return CountTables.from_state(self.corpus, self.support, self.hp, state)

    def joint_log_prob(self, state: SamplerState) -> float:
        return exact_joint_log_prob(self.corpus, state, self.hp, self.support)


def cond_tag_dist_w(
    counts: CountTables, hp: Hyperparams, w: int, t_prev: int, t_next: int
) -> np.ndarray:
    """Unnormalized tag weights for a removed word-emission token.

    weight[t] = (n(t,w)+b)/(n_t+W*b) * (n(tp,t)+a)/(ctx_tp+T*a)
              * (n(t,tn)+I(tp=t=tn)+a)/(ctx_t+I(tp=t)+T*a)
    with b=beta, a=alpha; the indicator terms account for the removed
    token's own transitions coupling when its neighbors share its tag.
    """
    out = np.empty(hp.T, dtype=np.float64)
    _kernels._weights_w(
        counts.trans, counts.trans_ctx, counts.emit, counts.emit_total,
        hp.alpha, hp.beta, w, t_prev, t_next, out,
    )
    return out


def _split_arrays(splits: Sequence[tuple[int, int]]):
    stems = np.asarray([s for s, _ in splits], dtype=np.int64)
    sufs = np.asarray([m for _, m in splits], dtype=np.int64)
    if stems.shape[0] == 0:
        raise ValueError("splits must be nonempty")
    return stems, sufs


def cond_tag_split_dist_s(
    counts: CountTables,
    hp: Hyperparams,
    splits: Sequence[tuple[int, int]],
    t_prev: int,
    t_next: int,
) -> np.ndarray:
    """Unnormalized (tag, split) weights for a removed stem-emission token.

    Returns shape (T, len(splits)); entry [t, k] swaps the word-emission
    factor for the stem factor (n(t,s_k)+b)/(n_t+S*b).
    """
    stems, _ = _split_arrays(splits)
    L = stems.shape[0]
    out = np.empty(hp.T * L, dtype=np.float64)
    _kernels._weights_s(
        counts.trans, counts.trans_ctx, counts.emit, counts.emit_total,
        hp.alpha, hp.beta, stems, 0, L, t_prev, t_next, out,
    )
    return out.reshape(hp.T, L)


def cond_tag_split_dist_sm(
    counts: CountTables,
    hp: Hyperparams,
    splits: Sequence[tuple[int, int]],
    t_prev: int,
    t_next: int,
) -> np.ndarray:
    """Stem-emission weights times the suffix factor (n(t,m_k)+g)/(n_t+M*g)."""
    stems, sufs = _split_arrays(splits)
    L = stems.shape[0]
    out = np.empty(hp.T * L, dtype=np.float64)
    _kernels._weights_sm(
        counts.trans, counts.trans_ctx, counts.emit, counts._suffix_arr(),
        counts.emit_total, hp.alpha, hp.beta, hp.gamma,
        stems, sufs, 0, L, t_prev, t_next, out,
    )
    return out.reshape(hp.T, L)


def log_prob_from_counts(counts: CountTables, hp: Hyperparams) -> float:
    """Log of the collapsed joint implied by the tables as they stand."""
    gamma = hp.gamma if hp.gamma is not None else 1.0
    return float(
        _kernels._log_prob_from_counts(
            counts.trans, counts.trans_ctx, counts.emit, counts._suffix_arr(),
            counts.emit_total, hp.alpha, hp.beta, gamma, hp.variant_code,
        )
    )


def exact_joint_log_prob(
    corpus: Corpus,
    state: SamplerState,
    hp: Hyperparams,
    support: Optional[SplitSupport] = None,
) -> float:
    """Collapsed joint log probability of a full assignment.

    Product over left contexts of transition Gamma-ratios times, per tag,
    the emission-family Gamma-ratios (stem and suffix families are separate
    for "sm").  Invariant under reordering tokens within each family, hence
    under permuting sentences.
    """
    counts = CountTables.from_state(corpus, support, hp, state)
    return log_prob_from_counts(counts, hp)
