"""Numba-compiled training inner loops.

Everything here releases the GIL so corpus shards can be trained hogwild
style from plain Python threads: updates to the shared parameter tables are
unsynchronized and may race.  That is tolerated by design; runs are exactly
reproducible only with a single worker.

Window radii and negative draws come from an inline 64-bit LCG (Knuth MMIX
constants, upper bits used), so a block's update stream is a pure function
of its seed and input ids.  Pair updates run in float32 like the parameter
tables; the fastmath flags are limited to reassociation and FMA contraction,
which keeps results reproducible run to run while letting the dot products
vectorize.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .sgns import SIGMOID_BINS, SIGMOID_CLAMP

LCG_MULT = np.uint64(6364136223846793005)
LCG_INC = np.uint64(1442695040888963407)
_SHIFT = np.uint64(16)
_CLAMP = np.float32(SIGMOID_CLAMP)
_BIN_SCALE = np.float32(SIGMOID_BINS / (2.0 * SIGMOID_CLAMP))
_NBINS = int(SIGMOID_BINS)
_F0 = np.float32(0.0)
_F1 = np.float32(1.0)
_FAST = {"reassoc", "contract"}


def lcg_next(state: int) -> int:
    """Python replica of the kernel RNG step (for tests and seed plumbing)."""
    return (state * 6364136223846793005 + 1442695040888963407) & 0xFFFFFFFFFFFFFFFF


def lcg_draw(state: int, modulus: int) -> int:
    """Python replica of how the kernel turns a state into a bounded draw."""
    return ((state >> 16) & 0xFFFFFFFFFFFFFFFF) % modulus


@njit(nogil=True, inline="always")
def _lcg(state):
    return state * LCG_MULT + LCG_INC


@njit(nogil=True, inline="always")
def _sig(x, sig_table):
    if x <= -_CLAMP:
        return _F0
    if x >= _CLAMP:
        return _F1
    idx = np.int64((x + _CLAMP) * _BIN_SCALE)
    if idx < 0:
        idx = 0
    elif idx >= _NBINS:
        idx = _NBINS - 1
    return sig_table[idx]


@njit(nogil=True, inline="always", fastmath=_FAST)
def _pair_step(center_vec, output, target, neg_ids, n_negative, table_size,
               lr, state, work, sig_table):
    """One center/context pair: positive update plus sampled negatives.

    Context-side rows move first (using the pre-step center); the center
    receives the accumulated gradient last.  Draws equal to the positive
    target id are resampled (bounded, in case the noise table is degenerate).
    """
    d = work.shape[0]
    for j in range(d):
        work[j] = _F0
    out_row = output[target]
    f = _F0
    for j in range(d):
        f += center_vec[j] * out_row[j]
    g = _F1 - _sig(f, sig_table)
    if g != _F0:
        lg = lr * g
        for j in range(d):
            work[j] += g * out_row[j]
            out_row[j] += lg * center_vec[j]
    for _n in range(n_negative):
        neg = np.int64(-1)
        for _try in range(100):
            state = _lcg(state)
            idx = np.int64((state >> _SHIFT) % table_size)
            cand = np.int64(neg_ids[idx])
            if cand != target:
                neg = cand
                break
        if neg < 0:
            continue
        neg_row = output[neg]
        f = _F0
        for j in range(d):
            f += center_vec[j] * neg_row[j]
        g = -_sig(f, sig_table)
        if g != _F0:
            lg = lr * g
            for j in range(d):
                work[j] += g * neg_row[j]
                neg_row[j] += lg * center_vec[j]
    for j in range(d):
        center_vec[j] += lr * work[j]
    return state


@njit(nogil=True, inline="always")
def _predict(centroids, counts, base, ke, cbuf, cnorm):
    """Cosine argmax over used context clusters; unused slots win first."""
    for k in range(ke):
        if counts[base + k] == 0:
            return k
    best = 0
    best_sim = -2.0
    for k in range(ke):
        dot = 0.0
        sq = 0.0
        for j in range(cbuf.shape[0]):
            v = centroids[base + k, j]
            dot += v * cbuf[j]
            sq += v * v
        sim = 0.0
        if sq > 0.0:
            sim = dot / (np.sqrt(sq) * cnorm)
        if sim > best_sim:
            best_sim = sim
            best = k
    return best


@njit(nogil=True, cache=True, fastmath=_FAST)
def train_block(data, offsets, s_lo, s_hi,
                global_vecs, output_vecs, sense_vecs, centroids, counts, keff,
                n_senses, neg_ids, n_negative, window,
                lr0, lr_floor, planned_tokens, progress, seed, sig_table):
    """Train sentences [s_lo, s_hi) of one packed chunk; returns tokens seen.

    data/offsets: concatenated sentence ids with prefix offsets.
    sense_vecs/centroids/counts are flattened to (V*K, d) / (V*K,); with
    n_senses == 1 they are ignored and each pair updates the global table
    only, which is plain skip-gram.  For n_senses > 1 every position first
    averages the global vectors of its context, picks the sense by cosine
    against the word's cluster centroids, then trains both the chosen sense
    vector and the word's global vector against the context-side table, and
    finally folds the context vector into the winning centroid (running
    mean, float64).  progress[0] is the shared processed-token counter
    driving the linear learning-rate decay.
    """
    d = global_vecs.shape[1]
    work = np.empty(d, dtype=np.float32)
    cbuf = np.empty(d, dtype=np.float64)
    state = seed
    table_size = np.uint64(neg_ids.shape[0])
    uwindow = np.uint64(window)
    seen = np.int64(0)
    for s in range(s_lo, s_hi):
        start = offsets[s]
        n = offsets[s + 1] - start
        if n == 0:
            continue
        frac = 1.0 - progress[0] / planned_tokens
        lr = lr0 * frac
        if lr < lr_floor:
            lr = lr_floor
        lr32 = np.float32(lr)
        for t in range(n):
            w = np.int64(data[start + t])
            state = _lcg(state)
            radius = np.int64((state >> _SHIFT) % uwindow) + 1
            lo = t - radius
            if lo < 0:
                lo = 0
            hi = t + radius + 1
            if hi > n:
                hi = n
            if n_senses == 1:
                wvec = global_vecs[w]
                for p in range(lo, hi):
                    if p == t:
                        continue
                    c = np.int64(data[start + p])
                    state = _pair_step(wvec, output_vecs, c, neg_ids,
                                       n_negative, table_size, lr32, state, work, sig_table)
            else:
                cnt = 0
                for j in range(d):
                    cbuf[j] = 0.0
                for p in range(lo, hi):
                    if p == t:
                        continue
                    cvec = global_vecs[np.int64(data[start + p])]
                    for j in range(d):
                        cbuf[j] += cvec[j]
                    cnt += 1
                if cnt == 0:
                    continue
                inv = 1.0 / cnt
                sq = 0.0
                for j in range(d):
                    cbuf[j] *= inv
                    sq += cbuf[j] * cbuf[j]
                if sq == 0.0:
                    continue
                ke = keff[w]
                k = 0
                if ke > 1:
                    k = _predict(centroids, counts, w * n_senses, ke, cbuf, np.sqrt(sq))
                srow = w * n_senses + k
                svec = sense_vecs[srow]
                wvec = global_vecs[w]
                for p in range(lo, hi):
                    if p == t:
                        continue
                    c = np.int64(data[start + p])
                    state = _pair_step(svec, output_vecs, c, neg_ids,
                                       n_negative, table_size, lr32, state, work, sig_table)
                    state = _pair_step(wvec, output_vecs, c, neg_ids,
                                       n_negative, table_size, lr32, state, work, sig_table)
                crow = centroids[srow]
                nk = counts[srow]
                for j in range(d):
                    crow[j] = (nk * crow[j] + cbuf[j]) / (nk + 1)
                counts[srow] = nk + 1
        progress[0] += n
        seen += n
    return seen
