"""Skip-gram with negative sampling: likelihood, gradient step, noise table.

The probability that context word c is observed next to center w is the
logistic of the dot product of their vectors; unobserved (noise) pairs
contribute the complement.  One training step ascends the local objective

    log sigmoid(center . context) + sum_i log sigmoid(-center . negative_i)

updating the context-side rows with the pre-step center value and applying
the accumulated center gradient last.
"""

from __future__ import annotations

import numpy as np

SIGMOID_BINS = 1024
SIGMOID_CLAMP = 6.0

# Bin centers over [-6, 6]; outside the range the logistic saturates to 0/1.
_TABLE_X = (np.arange(SIGMOID_BINS) + 0.5) * (2 * SIGMOID_CLAMP / SIGMOID_BINS) - SIGMOID_CLAMP
SIGMOID_TABLE = (1.0 / (1.0 + np.exp(-_TABLE_X))).astype(np.float32)


class TrainingDiverged(RuntimeError):
    """Non-finite parameters appeared during training (learning rate too hot)."""


def sigmoid(x, table: bool = False):
    """Logistic function 1 / (1 + e^-x).

    With ``table=True`` uses the precomputed 1024-bin lookup on [-6, 6],
    clamped to exactly 0/1 outside, which is what the training hot loop does.
    """
    x = np.asarray(x, dtype=np.float64)
    if table:
        safe = np.nan_to_num(np.clip(x, -SIGMOID_CLAMP, SIGMOID_CLAMP))
        idx = ((safe + SIGMOID_CLAMP) * (SIGMOID_BINS / (2 * SIGMOID_CLAMP))).astype(np.int64)
        out = np.where(
            x <= -SIGMOID_CLAMP,
            0.0,
            np.where(x >= SIGMOID_CLAMP, 1.0, SIGMOID_TABLE[np.clip(idx, 0, SIGMOID_BINS - 1)]),
        )
        out = np.where(np.isnan(x), np.nan, out)
    else:
        out = np.empty_like(x)
        pos = x >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        out[~pos] = ex / (1.0 + ex)
    return float(out) if out.ndim == 0 else out


def log_sigmoid(x) -> np.ndarray:
    """Numerically stable log of the logistic function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.where(x >= 0, -np.log1p(np.exp(-np.abs(x))), x - np.log1p(np.exp(-np.abs(x))))
    return float(out) if out.ndim == 0 else out


def sgns_objective(center, context, negatives) -> float:
    """Local objective for one (center, context, negatives) instance."""
    center = np.asarray(center, dtype=np.float64)
    context = np.asarray(context, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64)
    total = float(log_sigmoid(center @ context))
    if negatives.size:
        total += float(np.sum(log_sigmoid(-(negatives @ center))))
    return total


def sgns_step(center, context, negatives, lr: float, table: bool = False) -> None:
    """One in-place gradient ascent step on the local objective.

    ``center`` and ``context`` are single rows; ``negatives`` is a (k, d)
    block.  Context and negative rows move by lr * g * center using the
    pre-step center; the center then receives the accumulated lr * sum(g *
    row) update.  Saturated pairs (g == 0 in table mode) are skipped.

    Raises:
        TrainingDiverged: a non-finite value appeared in any updated row.
    """
    if lr < 0:
        raise ValueError("lr must be >= 0")
    negatives = np.atleast_2d(negatives) if negatives is not None else np.zeros((0, len(center)))
    grad = np.zeros(len(center), dtype=np.float64)
    g_pos = 1.0 - sigmoid(float(np.dot(center, context)), table=table)
    if g_pos != 0.0:
        grad += g_pos * context
        context += (lr * g_pos) * center
    for row in negatives:
        g_neg = -sigmoid(float(np.dot(center, row)), table=table)
        if g_neg != 0.0:
            grad += g_neg * row
            row += (lr * g_neg) * center
    center += lr * grad
    if not (
        np.isfinite(center).all()
        and np.isfinite(context).all()
        and (negatives.size == 0 or np.isfinite(negatives).all())
    ):
        raise TrainingDiverged(
            f"non-finite parameter after sgns step (lr={lr}); lower the learning rate"
        )


def sgns_step_ids(center, output: np.ndarray, target: int, negative_ids, lr: float,
                  table: bool = False) -> None:
    """Gradient step addressed into a context-side table.

    Same math as :func:`sgns_step` but the context row and negatives are rows
    of ``output``, processed sequentially, which matches the training kernel
    exactly (duplicate negative ids compound instead of overwriting).
    """
    grad = np.zeros(len(center), dtype=np.float64)
    g = 1.0 - sigmoid(float(np.dot(center, output[target])), table=table)
    if g != 0.0:
        grad += g * output[target]
        output[target] += (lr * g) * center
    for neg in negative_ids:
        g = -sigmoid(float(np.dot(center, output[neg])), table=table)
        if g != 0.0:
            grad += g * output[neg]
            output[neg] += (lr * g) * center
    center += lr * grad
    if not np.isfinite(center).all():
        raise TrainingDiverged(
            f"non-finite parameter after sgns step (lr={lr}); lower the learning rate"
        )


class NegativeTable:
    """Noise-word sampling table following the count^0.75 unigram law.

    The table stores ``size`` word ids; each word occupies a slot share
    proportional to count^power, so drawing a uniform slot draws a word from
    the powered unigram distribution.
    """

    DEFAULT_SIZE = 10_000_000

    def __init__(self, counts, size: int = DEFAULT_SIZE, power: float = 0.75):
        counts = np.asarray(counts, dtype=np.float64)
        if counts.size == 0:
            raise ValueError("cannot build a negative table from an empty vocabulary")
        weights = counts**power
        cum = np.cumsum(weights)
        if cum[-1] <= 0:
            raise ValueError("all counts are zero")
        thresholds = (np.arange(size, dtype=np.float64) + 0.5) * (cum[-1] / size)
        self.ids = np.searchsorted(cum, thresholds, side="left").astype(np.int32)
        self.power = power

    def __len__(self) -> int:
        return len(self.ids)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n ids uniformly over the table (test/inspection helper)."""
        return self.ids[rng.integers(0, len(self.ids), size=n)]


def train_skipgram(corpus, vocab, config):
    """Train a single-vector skip-gram model (word2vec baseline).

    Run over a PoS-tagged corpus this is the tag-disambiguated (sense2vec
    style) model: nothing changes except that tokens carry ``|TAG`` suffixes,
    so each word+tag pair gets its own vector.
    """
    from .training import train_model

    return train_model(corpus, vocab, config, n_senses=1)
