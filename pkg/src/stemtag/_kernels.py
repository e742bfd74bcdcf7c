"""Compiled inner loops shared by the model and sampler layers.

Everything in this module operates on raw numpy arrays so numba can compile
it; the public API lives in `stemtag.model` and `stemtag.sampler`.  All
layers hit the same compiled functions, so there is exactly one
implementation of the conditional weights, the count bookkeeping, and the
collapsed joint probability.

Array conventions (T = tag count, boundary tag = index T):
  trans       int64 (T+1, T+1)  tag-bigram counts, boundary row/col included
  trans_ctx   int64 (T+1,)      left-context totals (row sums of trans)
  emit        int64 (T, E)      emission counts; E = word types or stem types
  emit_suffix int64 (T, M)      suffix emission counts (stem+suffix variant
                                only; a (1, 1) dummy otherwise)
  emit_total  int64 (T,)        tokens currently tagged t
  included    uint8 (n,)        1 while token i's contributions are in the
                                tables, 0 while it is removed
Variant codes: 0 = word emission, 1 = stem emission, 2 = stem+suffix.

The transition rows are normalized with T*alpha while successor cells
include the boundary tag, and the boundary row is normalized the same way:
the model is a deficient measure by construction, matching the conditional
formulas (each factor is the sequential predictive probability of one
draw).  Transition denominators use the left-context totals, emission
denominators the per-tag token totals; these differ because of boundary
framing.
"""

import math

import numpy as np
from numba import njit

# At or above this inverse temperature a sweep takes the argmax candidate
# (ties toward the lowest flat index) and consumes no random variate.
ICM_INV_TEMP = 1e6

_U64 = np.uint64
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True, inline="always")
def _next_u64(rng_state):
    # splitmix64 (Steele, Lea & Flood 2014): fixed odd increment, two
    # xor-multiply mixing rounds.  State is a 1-element uint64 array.
    rng_state[0] += _U64(0x9E3779B97F4A7C15)
    z = rng_state[0]
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


@njit(cache=True, inline="always")
def _next_double(rng_state):
    # Top 53 bits -> uniform double in [0, 1).
    return float(_next_u64(rng_state) >> _U64(11)) * _INV_2_53


@njit(cache=True)
def _weights_w(trans, trans_ctx, emit, emit_total, alpha, beta, w, tp, tn, out):
    T = emit.shape[0]
    ta = T * alpha
    eb = emit.shape[1] * beta
    for t in range(T):
        ind_num = 1.0 if (tp == t and tn == t) else 0.0
        ind_den = 1.0 if tp == t else 0.0
        f = (emit[t, w] + beta) / (emit_total[t] + eb)
        f *= (trans[tp, t] + alpha) / (trans_ctx[tp] + ta)
        f *= (trans[t, tn] + ind_num + alpha) / (trans_ctx[t] + ind_den + ta)
        out[t] = f


@njit(cache=True)
def _weights_s(
    trans, trans_ctx, emit, emit_total, alpha, beta,
    split_stems, lo, hi, tp, tn, out,
):
    T = emit.shape[0]
    ta = T * alpha
    eb = emit.shape[1] * beta
    L = hi - lo
    for t in range(T):
        ind_num = 1.0 if (tp == t and tn == t) else 0.0
        ind_den = 1.0 if tp == t else 0.0
        f = (trans[tp, t] + alpha) / (trans_ctx[tp] + ta)
        f *= (trans[t, tn] + ind_num + alpha) / (trans_ctx[t] + ind_den + ta)
        f /= emit_total[t] + eb
        base = t * L
        for k in range(L):
            out[base + k] = f * (emit[t, split_stems[lo + k]] + beta)


@njit(cache=True)
def _weights_sm(
    trans, trans_ctx, emit, emit_suffix, emit_total, alpha, beta, gamma,
    split_stems, split_suffixes, lo, hi, tp, tn, out,
):
    T = emit.shape[0]
    ta = T * alpha
    eb = emit.shape[1] * beta
    mg = emit_suffix.shape[1] * gamma
    L = hi - lo
    for t in range(T):
        ind_num = 1.0 if (tp == t and tn == t) else 0.0
        ind_den = 1.0 if tp == t else 0.0
        f = (trans[tp, t] + alpha) / (trans_ctx[tp] + ta)
        f *= (trans[t, tn] + ind_num + alpha) / (trans_ctx[t] + ind_den + ta)
        # Stem and suffix families are separate Dirichlet-multinomials that
        # happen to share the per-tag draw count.
        f /= (emit_total[t] + eb) * (emit_total[t] + mg)
        base = t * L
        for k in range(L):
            out[base + k] = (
                f
                * (emit[t, split_stems[lo + k]] + beta)
                * (emit_suffix[t, split_suffixes[lo + k]] + gamma)
            )


@njit(cache=True)
def _remove_token(
    i, tags, split_idx, word_ids, prev_index, next_index,
    split_offsets, split_stems, split_suffixes,
    trans, trans_ctx, emit, emit_suffix, emit_total, included, variant,
):
    if included[i] == 0:
        raise RuntimeError("remove_token: token already removed from the count tables")
    T = emit.shape[0]
    t = tags[i]
    ip = prev_index[i]
    nx = next_index[i]
    bad = False
    # A bigram is only on the books while both endpoints are included, so a
    # removed neighbor's shared transition must not be decremented again.
    if ip < 0 or included[ip] == 1:
        tp = tags[ip] if ip >= 0 else T
        trans[tp, t] -= 1
        trans_ctx[tp] -= 1
        bad = bad or trans[tp, t] < 0 or trans_ctx[tp] < 0
    if nx < 0 or included[nx] == 1:
        tn = tags[nx] if nx >= 0 else T
        trans[t, tn] -= 1
        trans_ctx[t] -= 1
        bad = bad or trans[t, tn] < 0 or trans_ctx[t] < 0
    if variant == 0:
        e = word_ids[i]
        emit[t, e] -= 1
        bad = bad or emit[t, e] < 0
    else:
        j = split_offsets[word_ids[i]] + split_idx[i]
        s = split_stems[j]
        emit[t, s] -= 1
        bad = bad or emit[t, s] < 0
        if variant == 2:
            m = split_suffixes[j]
            emit_suffix[t, m] -= 1
            bad = bad or emit_suffix[t, m] < 0
    emit_total[t] -= 1
    bad = bad or emit_total[t] < 0
    included[i] = 0
    if bad:
        raise RuntimeError(
            "remove_token: a count went negative; count tables are corrupt"
        )


@njit(cache=True)
def _add_token(
    i, tag, k, tags, split_idx, word_ids, prev_index, next_index,
    split_offsets, split_stems, split_suffixes,
    trans, trans_ctx, emit, emit_suffix, emit_total, included, variant,
):
    if included[i] == 1:
        raise RuntimeError("add_token: token already present in the count tables")
    T = emit.shape[0]
    tags[i] = tag
    split_idx[i] = k
    ip = prev_index[i]
    nx = next_index[i]
    if ip < 0 or included[ip] == 1:
        tp = tags[ip] if ip >= 0 else T
        trans[tp, tag] += 1
        trans_ctx[tp] += 1
    if nx < 0 or included[nx] == 1:
        tn = tags[nx] if nx >= 0 else T
        trans[tag, tn] += 1
        trans_ctx[tag] += 1
    if variant == 0:
        emit[tag, word_ids[i]] += 1
    else:
        j = split_offsets[word_ids[i]] + k
        emit[tag, split_stems[j]] += 1
        if variant == 2:
            emit_suffix[tag, split_suffixes[j]] += 1
    emit_total[tag] += 1
    included[i] = 1


@njit(cache=True)
def _init_assign(variant, T, tags, split_idx, word_ids, split_offsets, rng_state):
    # One tag draw per token; stem variants draw a split as well.
    n = tags.shape[0]
    for i in range(n):
        t = np.int64(_next_double(rng_state) * T)
        if t >= T:
            t = T - 1
        tags[i] = t
        if variant == 0:
            split_idx[i] = 0
        else:
            w = word_ids[i]
            L = split_offsets[w + 1] - split_offsets[w]
            k = np.int64(_next_double(rng_state) * L)
            if k >= L:
                k = L - 1
            split_idx[i] = k


@njit(cache=True)
def _sweep(
    variant, tags, split_idx, word_ids, prev_index, next_index,
    split_offsets, split_stems, split_suffixes,
    trans, trans_ctx, emit, emit_suffix, emit_total, included,
    alpha, beta, gamma, rng_state, inv_temp, buf,
):
    T = emit.shape[0]
    n = tags.shape[0]
    icm = inv_temp >= ICM_INV_TEMP
    for i in range(n):
        _remove_token(
            i, tags, split_idx, word_ids, prev_index, next_index,
            split_offsets, split_stems, split_suffixes,
            trans, trans_ctx, emit, emit_suffix, emit_total, included, variant,
        )
        ip = prev_index[i]
        nx = next_index[i]
        tp = tags[ip] if ip >= 0 else T
        tn = tags[nx] if nx >= 0 else T
        if variant == 0:
            L = 1
            C = T
            _weights_w(
                trans, trans_ctx, emit, emit_total,
                alpha, beta, word_ids[i], tp, tn, buf,
            )
        else:
            w = word_ids[i]
            lo = split_offsets[w]
            hi = split_offsets[w + 1]
            L = hi - lo
            C = T * L
            if variant == 1:
                _weights_s(
                    trans, trans_ctx, emit, emit_total, alpha, beta,
                    split_stems, lo, hi, tp, tn, buf,
                )
            else:
                _weights_sm(
                    trans, trans_ctx, emit, emit_suffix, emit_total,
                    alpha, beta, gamma,
                    split_stems, split_suffixes, lo, hi, tp, tn, buf,
                )
        if icm:
            choice = 0
            best = buf[0]
            for c in range(1, C):
                if buf[c] > best:
                    best = buf[c]
                    choice = c
        else:
            total = 0.0
            if inv_temp != 1.0:
                m = buf[0]
                for c in range(1, C):
                    if buf[c] > m:
                        m = buf[c]
                for c in range(C):
                    v = (buf[c] / m) ** inv_temp
                    buf[c] = v
                    total += v
            else:
                for c in range(C):
                    total += buf[c]
            r = _next_double(rng_state) * total
            choice = C - 1
            acc = 0.0
            for c in range(C):
                acc += buf[c]
                if r < acc:
                    choice = c
                    break
        _add_token(
            i, choice // L, choice % L,
            tags, split_idx, word_ids, prev_index, next_index,
            split_offsets, split_stems, split_suffixes,
            trans, trans_ctx, emit, emit_suffix, emit_total, included, variant,
        )


@njit(cache=True)
def _log_prob_from_counts(
    trans, trans_ctx, emit, emit_suffix, emit_total, alpha, beta, gamma, variant,
):
    # Collapsed Dirichlet-multinomial marginal: one Gamma-function ratio per
    # family.  Zero-count cells and empty families contribute exactly 0.
    T = emit.shape[0]
    total = 0.0
    ta = T * alpha
    lg_a = math.lgamma(alpha)
    lg_ta = math.lgamma(ta)
    for p in range(T + 1):
        n_ctx = trans_ctx[p]
        if n_ctx == 0:
            continue
        total += lg_ta - math.lgamma(n_ctx + ta)
        for t in range(T + 1):
            c = trans[p, t]
            if c != 0:
                total += math.lgamma(c + alpha) - lg_a
    eb = emit.shape[1] * beta
    lg_b = math.lgamma(beta)
    lg_eb = math.lgamma(eb)
    for t in range(T):
        n_t = emit_total[t]
        if n_t == 0:
            continue
        total += lg_eb - math.lgamma(n_t + eb)
        for e in range(emit.shape[1]):
            c = emit[t, e]
            if c != 0:
                total += math.lgamma(c + beta) - lg_b
    if variant == 2:
        mg = emit_suffix.shape[1] * gamma
        lg_g = math.lgamma(gamma)
        lg_mg = math.lgamma(mg)
        for t in range(T):
            n_t = emit_total[t]
            if n_t == 0:
                continue
            total += lg_mg - math.lgamma(n_t + mg)
            for m in range(emit_suffix.shape[1]):
                c = emit_suffix[t, m]
                if c != 0:
                    total += math.lgamma(c + gamma) - lg_g
    return total
