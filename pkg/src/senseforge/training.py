"""Shared training driver: streams the corpus per epoch, packs encoded
sentences into chunks, and dispatches them to the compiled kernel, either in
the calling thread (workers=1, fully deterministic) or across a thread pool
with unsynchronized shared-table updates."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._kernels import train_block
from .config import TrainingConfig
from .corpus import Vocabulary, encode_stream
from .model import SenseModel
from .sgns import SIGMOID_TABLE, NegativeTable, TrainingDiverged

logger = logging.getLogger(__name__)

CHUNK_TOKENS = 2_000_000


class EmptyVocabularyError(ValueError):
    """Training was requested against a vocabulary with no entries."""


def _mix64(*parts: int) -> int:
    """splitmix64-style hash of a tuple of ints into a nonzero 64-bit seed."""
    x = 0x9E3779B97F4A7C15
    for p in parts:
        x = (x ^ (p & 0xFFFFFFFFFFFFFFFF)) * 0xBF58476D1CE4E5B9 % 2**64
        x ^= x >> 27
        x = x * 0x94D049BB133111EB % 2**64
        x ^= x >> 31
    return x or 1


def _pack(sentences: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.zeros(len(sentences) + 1, dtype=np.int64)
    np.cumsum([len(s) for s in sentences], out=offsets[1:])
    return np.concatenate(sentences), offsets


def _iter_chunks(encoded, chunk_tokens: int = CHUNK_TOKENS):
    pending: list[np.ndarray] = []
    total = 0
    for ids in encoded:
        if ids.size == 0:
            continue
        pending.append(ids)
        total += ids.size
        if total >= chunk_tokens:
            yield _pack(pending)
            pending, total = [], 0
    if pending:
        yield _pack(pending)


def _check_finite(model: SenseModel) -> None:
    tables = [model.global_vecs, model.output_vecs]
    if model.sense_vecs is not None:
        tables.append(model.sense_vecs)
    for table in tables:
        if not np.isfinite(table).all():
            raise TrainingDiverged(
                "non-finite parameters detected during training; "
                "lower the learning rate"
            )


def train_model(
    corpus,
    vocab: Vocabulary,
    config: TrainingConfig,
    n_senses: int,
    kind: str | None = None,
) -> SenseModel:
    """Run skip-gram (n_senses=1) or multi-sense training over the corpus.

    ``corpus`` must be re-iterable when config.epochs > 1 (LineCorpus is;
    lists of token lists are).  Returns the trained model with a
    ``train_stats`` dict (tokens, seconds, tok_per_sec) attached.
    """
    if len(vocab) == 0:
        raise EmptyVocabularyError("cannot train on an empty vocabulary")
    if kind is None:
        kind = "mssg" if n_senses > 1 else ("tagged" if vocab.looks_tagged else "word")
    model = SenseModel.initialize(vocab, config, kind, n_senses)
    neg_table = NegativeTable(vocab.counts)
    keff = model.effective_senses()
    planned = max(1.0, config.epochs * vocab.expected_retained_tokens(config.subsample_t))
    progress = np.zeros(1, dtype=np.int64)
    if model.sense_vecs is not None:
        senses2d = model.sense_vecs.reshape(-1, model.dim)
        centroids2d = model.centroids.reshape(-1, model.dim)
        counts1d = model.cluster_counts.reshape(-1)
    else:
        senses2d = model.global_vecs
        centroids2d = np.zeros((1, 1), dtype=np.float64)
        counts1d = np.zeros(1, dtype=np.int64)

    def _run_block(data, offsets, lo, hi, seed):
        return train_block(
            data, offsets, lo, hi,
            model.global_vecs, model.output_vecs, senses2d, centroids2d, counts1d,
            keff, n_senses, neg_table.ids, config.negatives, config.window,
            config.lr0, config.lr_floor, planned, progress,
            np.uint64(seed), SIGMOID_TABLE,
        )

    started = time.perf_counter()
    pool = ThreadPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for epoch in range(config.epochs):
            enc_rng = np.random.default_rng(_mix64(config.seed, 0x5EED, epoch))
            encoded = encode_stream(corpus, vocab, config.subsample_t, enc_rng)
            for chunk_idx, (data, offsets) in enumerate(_iter_chunks(encoded)):
                n_sent = len(offsets) - 1
                if pool is None:
                    _run_block(data, offsets, 0, n_sent,
                               _mix64(config.seed, epoch, chunk_idx, 0))
                else:
                    bounds = np.linspace(0, n_sent, config.workers + 1).astype(np.int64)
                    futures = [
                        pool.submit(_run_block, data, offsets, bounds[i], bounds[i + 1],
                                    _mix64(config.seed, epoch, chunk_idx, i))
                        for i in range(config.workers)
                    ]
                    for future in futures:
                        future.result()
                _check_finite(model)
                elapsed = time.perf_counter() - started
                rate = progress[0] / elapsed if elapsed > 0 else 0.0
                logger.info(
                    "epoch %d/%d: %.1f%% of planned tokens, %.0fk tok/s",
                    epoch + 1, config.epochs,
                    100.0 * progress[0] / planned, rate / 1000.0,
                )
    finally:
        if pool is not None:
            pool.shutdown()
    elapsed = time.perf_counter() - started
    tokens = int(progress[0])
    model.train_stats = {
        "tokens": tokens,
        "seconds": elapsed,
        "tok_per_sec": tokens / elapsed if elapsed > 0 else 0.0,
    }
    return model
