"""Collapsed Gibbs chain driver: seeded init, sweeps, annealing, tracing.

All randomness flows from one splitmix64 stream per run.  Identical
(corpus, hyperparams, config) inputs produce bit-identical results; the
sampling path iterates arrays only, never unordered containers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from stemtag import _kernels
from stemtag._kernels import ICM_INV_TEMP
from stemtag.corpus import Corpus, SplitSupport
from stemtag.model import (
    CountTables,
    Hyperparams,
    SamplerState,
    log_prob_from_counts,
)

__all__ = [
    "ICM_INV_TEMP",
    "RunResult",
    "SamplerConfig",
    "Splitmix64",
    "init_random",
    "run",
    "sweep",
]


class Splitmix64:
    """splitmix64 PRNG: 64-bit state advanced by a fixed odd increment, two
    xor-multiply mixing rounds per output.  Chosen because it is trivially
    portable and its doubles ((x >> 11) * 2**-53) are reproducible exactly
    on any IEEE-754 platform.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)

    def next_u64(self) -> int:
        return int(_kernels._next_u64(self._state))

    def next_double(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return float(_kernels._next_double(self._state))

    @property
    def state(self) -> int:
        return int(self._state[0])


@dataclass(frozen=True)
class SamplerConfig:
    """Run-length, seed, and optional annealing schedule.

    temperature_schedule is a list of (sweep_index, inverse_temperature)
    breakpoints, piecewise-linearly interpolated over 0-based sweep
    indices, held constant outside the breakpoint range.  The final value
    must be 1.0 so the chain ends at the true posterior.  Inverse
    temperatures at or above ICM_INV_TEMP make a sweep take the argmax
    candidate (ties toward the lowest flat index) without consuming a
    random variate.

    variant, when given, must agree with the Hyperparams passed to run();
    it exists so a config file alone pins the whole experiment.
    """

    iterations: int
    seed: int
    temperature_schedule: Optional[tuple[tuple[int, float], ...]] = None
    variant: Optional[str] = None

    def __post_init__(self):
        if not (isinstance(self.iterations, int) and self.iterations >= 1):
            raise ValueError(f"iterations must be >= 1, got {self.iterations!r}")
        if not isinstance(self.seed, int):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        sched = self.temperature_schedule
        if sched is not None:
            sched = tuple((int(s), float(v)) for s, v in sched)
            object.__setattr__(self, "temperature_schedule", sched)
            if len(sched) == 0:
                raise ValueError("temperature_schedule must be None or nonempty")
            last = -1
            for s, v in sched:
                if s < 0 or s <= last:
                    raise ValueError(
                        "schedule sweep indices must be >= 0 and strictly increasing"
                    )
                last = s
                if not (v > 0 and np.isfinite(v)):
                    raise ValueError("inverse temperatures must be positive and finite")
            if sched[-1][1] != 1.0:
                raise ValueError("final schedule breakpoint must have value 1.0")


@dataclass
class RunResult:
    """Final chain state plus the per-sweep joint log probability trace."""

    final_state: SamplerState
    joint_log_prob_trace: np.ndarray
    wall_time: float


def _inv_temp_at(
    schedule: Optional[Sequence[tuple[int, float]]], sweep_index: int
) -> float:
    if schedule is None:
        return 1.0
    if sweep_index <= schedule[0][0]:
        return schedule[0][1]
    if sweep_index >= schedule[-1][0]:
        return schedule[-1][1]
    for (s0, v0), (s1, v1) in zip(schedule, schedule[1:]):
        if s0 <= sweep_index <= s1:
            frac = (sweep_index - s0) / (s1 - s0)
            return v0 + frac * (v1 - v0)
    raise AssertionError("unreachable: schedule indices are strictly increasing")


def _support_arrays(support: Optional[SplitSupport]):
    if support is not None:
        return support.split_offsets, support.split_stems, support.split_suffixes
    z = np.zeros(0, dtype=np.int64)
    return np.zeros(1, dtype=np.int64), z, z


def _init_with_rng(
    corpus: Corpus, support: Optional[SplitSupport], hp: Hyperparams, rng: Splitmix64
) -> tuple[SamplerState, CountTables]:
    n = corpus.n_tokens
    state = SamplerState(np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64))
    offs, _, _ = _support_arrays(support)
    _kernels._init_assign(
        hp.variant_code, hp.T, state.tags, state.split_idx,
        corpus.word_ids, offs, rng._state,
    )
    counts = CountTables.from_state(corpus, support, hp, state)
    return state, counts


def init_random(
    corpus: Corpus, support: Optional[SplitSupport], hp: Hyperparams, seed: int
) -> tuple[SamplerState, CountTables]:
    """Uniform random tag (and split, for stem variants) per token.

    Consumes one double per token for the tag and, under "s"/"sm", one more
    for the split, in corpus order.
    """
    if hp.uses_splits and support is None:
        raise ValueError(f"variant {hp.variant!r} requires a SplitSupport")
    return _init_with_rng(corpus, support, hp, Splitmix64(seed))


def sweep(
    state: SamplerState,
    counts: CountTables,
    corpus: Corpus,
    support: Optional[SplitSupport],
    hp: Hyperparams,
    rng: Splitmix64,
    inv_temp: float = 1.0,
) -> None:
    """One systematic-scan pass: every token in corpus order is removed,
    resampled from its full conditional raised to inv_temp, and re-added.
    """
    if not (inv_temp > 0 and np.isfinite(inv_temp)):
        raise ValueError(f"inv_temp must be positive and finite, got {inv_temp!r}")
    offs, stems, sufs = _support_arrays(support)
    n_candidates = hp.T * (support.max_splits if hp.uses_splits else 1)
    buf = np.empty(max(n_candidates, 1), dtype=np.float64)
    gamma = hp.gamma if hp.gamma is not None else 1.0
    _kernels._sweep(
        hp.variant_code, state.tags, state.split_idx,
        corpus.word_ids, corpus.prev_index, corpus.next_index,
        offs, stems, sufs,
        counts.trans, counts.trans_ctx, counts.emit,
        counts._suffix_arr(), counts.emit_total, counts.included,
        hp.alpha, hp.beta, gamma, rng._state, inv_temp, buf,
    )


def run(
    corpus: Corpus,
    support: Optional[SplitSupport],
    hp: Hyperparams,
    config: SamplerConfig,
    verify_counts: bool = False,
) -> RunResult:
    """Random init, then config.iterations sweeps on one seeded stream.

    The trace records the joint log probability after each sweep.  With
    verify_counts every sweep is followed by a from-scratch recount that
    must match the incrementally maintained tables exactly (test builds
    only; it dominates the runtime).
    """
    if config.variant is not None and config.variant != hp.variant:
        raise ValueError(
            f"config variant {config.variant!r} conflicts with "
            f"hyperparams variant {hp.variant!r}"
        )
    if hp.uses_splits and support is None:
        raise ValueError(f"variant {hp.variant!r} requires a SplitSupport")
    t0 = time.perf_counter()
    rng = Splitmix64(config.seed)
    state, counts = _init_with_rng(corpus, support, hp, rng)
    trace = np.empty(config.iterations, dtype=np.float64)
    for s in range(config.iterations):
        inv_temp = _inv_temp_at(config.temperature_schedule, s)
        sweep(state, counts, corpus, support, hp, rng, inv_temp)
        trace[s] = log_prob_from_counts(counts, hp)
        if verify_counts:
            reference = CountTables.from_state(corpus, support, hp, state)
            if not counts.equals(reference):
                raise RuntimeError(
                    f"incremental counts diverged from recount after sweep {s}"
                )
    return RunResult(state, trace, time.perf_counter() - t0)
