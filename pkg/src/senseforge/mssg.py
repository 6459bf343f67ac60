"""Multi-sense skip-gram: online context clustering plus sense-aware updates.

Each word owns a global vector, K sense vectors, and K context clusters.
When a word occurs, its context is represented by the arithmetic mean of the
context words' global vectors (global vectors, not sense vectors, to keep
the step cheap).  The occurrence is assigned to the cluster whose centroid
is most cosine-similar to that context vector; the chosen sense vector is
then trained by an ordinary negative-sampling step, the word's global vector
receives the same kind of step so it stays a usable context representation,
and the context vector is folded into the winning centroid, which is the
running mean of everything assigned to its cluster (k-means style, one pass,
online).

Cold start: while a word still has unused clusters, the next occurrence
seeds the lowest unused one.  Cosine ties break toward the lowest sense
index, so prediction is a pure function of the model state.
"""

from __future__ import annotations

import numpy as np

from .config import TrainingConfig
from .corpus import Vocabulary
from .model import SenseModel
from .sgns import sgns_step_ids


class EmptyContextError(ValueError):
    """A position has no in-window context; the caller should skip it."""


def context_vector(model: SenseModel, context_ids) -> np.ndarray:
    """Mean of the global vectors of the context words (float64)."""
    ids = np.asarray(context_ids, dtype=np.int64)
    if ids.size == 0:
        raise EmptyContextError("context is empty")
    return model.global_vecs[ids].astype(np.float64).mean(axis=0)


def predict_sense(model: SenseModel, word_id: int, ctx: np.ndarray) -> int:
    """Pick the context cluster for one occurrence of ``word_id``.

    Returns the lowest unused cluster while any remain (cold start), else
    the cosine argmax over centroids with ties broken toward the lowest
    index.  A zero context vector or a K=1 model maps to sense 0.
    """
    if model.cluster_counts is None:
        return 0
    counts = model.cluster_counts[word_id]
    ke = model.n_senses
    if model.config.sense_min_count > 0 and model.vocab.counts[word_id] < model.config.sense_min_count:
        ke = 1
    for k in range(ke):
        if counts[k] == 0:
            return k
    ctx = np.asarray(ctx, dtype=np.float64)
    cnorm = np.linalg.norm(ctx)
    if cnorm == 0:
        return 0
    centroids = model.centroids[word_id, :ke]
    norms = np.linalg.norm(centroids, axis=1)
    sims = np.zeros(ke, dtype=np.float64)
    used = norms > 0
    sims[used] = (centroids[used] @ ctx) / (norms[used] * cnorm)
    return int(np.argmax(sims))


def update_centroid(model: SenseModel, word_id: int, sense: int, ctx: np.ndarray) -> None:
    """Fold one context vector into a cluster: running mean plus count."""
    n = model.cluster_counts[word_id, sense]
    model.centroids[word_id, sense] = (n * model.centroids[word_id, sense] + ctx) / (n + 1)
    model.cluster_counts[word_id, sense] = n + 1


def mssg_step(
    model: SenseModel,
    word_id: int,
    context_ids,
    negative_ids,
    lr: float,
    table: bool = False,
) -> int | None:
    """One multi-sense training step at a single corpus position.

    Computes the context vector, predicts the sense, runs a negative-sampling
    step per context word with the chosen sense vector as center, then the
    same with the global vector (so both stay trained), and finally updates
    the winning centroid.  Returns the chosen sense, or None when the
    position is skipped because the context vector is exactly zero.  On a
    K=1 model this is exactly the plain skip-gram update, with no clustering
    book-keeping.
    """
    context_ids = np.asarray(context_ids, dtype=np.int64)
    if context_ids.size == 0:
        raise EmptyContextError("context is empty")
    if model.sense_vecs is None:
        for c in context_ids:
            sgns_step_ids(model.global_vecs[word_id], model.output_vecs, int(c),
                          negative_ids, lr, table=table)
        return 0
    ctx = context_vector(model, context_ids)
    if not np.any(ctx):
        return None
    sense = predict_sense(model, word_id, ctx)
    for c in context_ids:
        sgns_step_ids(model.sense_vecs[word_id, sense], model.output_vecs, int(c),
                      negative_ids, lr, table=table)
        sgns_step_ids(model.global_vecs[word_id], model.output_vecs, int(c),
                      negative_ids, lr, table=table)
    update_centroid(model, word_id, sense, ctx)
    return sense


def train_mssg(corpus, vocab: Vocabulary, config: TrainingConfig) -> SenseModel:
    """Train a multi-sense model with config.senses clusters per word.

    Words seen fewer than config.sense_min_count times are trained with a
    single sense.  With config.senses == 1 the result is bit-identical to
    :func:`senseforge.sgns.train_skipgram` under the same seed.
    """
    from .training import train_model

    return train_model(corpus, vocab, config, n_senses=config.senses)
