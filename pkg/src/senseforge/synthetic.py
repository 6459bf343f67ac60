"""Synthetic corpora with known structure, for oracle-style checks and demos.

The two-topic generator plants a pseudo-ambiguous target word whose
occurrences are split between two disjoint collocate sets (finance-flavoured
and furniture-flavoured by default), giving ground-truth "senses" against
which cluster assignments can be scored.
"""

from __future__ import annotations

import numpy as np

from .model import SenseModel
from .mssg import context_vector, predict_sense

FINANCE_WORDS = [
    "dinheiro", "juros", "crédito", "conta", "empréstimo",
    "investimento", "poupança", "agência", "saldo", "financiamento",
]
FURNITURE_WORDS = [
    "madeira", "assento", "praça", "jardim", "cadeira",
    "mesa", "encosto", "parque", "móvel", "sentar",
]


def two_topic_corpus(
    target: str = "banco",
    sentences_per_topic: int = 50_000,
    collocates_per_topic: int = 10,
    sentence_len: int = 7,
    seed: int = 7,
) -> tuple[list[list[str]], list[int], tuple[list[str], list[str]]]:
    """Sentences mixing a shared target word into two disjoint topics.

    Each sentence draws ``sentence_len - 1`` collocates from one topic and
    inserts the target at a random position.  Collocates are drawn with
    1/rank^2 weights (not uniformly) so each topic has steeply graded
    co-occurrence strengths; the target's strongest neighbors are then
    pinned down by structure instead of by tie-breaking noise, which keeps
    neighbor-based checks on this corpus well conditioned across seeds.
    Returns (sentences, topic per sentence, (topic-0 words, topic-1 words)).
    """
    rng = np.random.default_rng(seed)
    topics = (FINANCE_WORDS[:collocates_per_topic], FURNITURE_WORDS[:collocates_per_topic])
    weights = 1.0 / np.arange(1, collocates_per_topic + 1) ** 2
    weights /= weights.sum()
    sentences: list[list[str]] = []
    labels: list[int] = []
    for topic in (0, 1):
        words = topics[topic]
        for _ in range(sentences_per_topic):
            draws = rng.choice(collocates_per_topic, size=sentence_len - 1, p=weights)
            sent = [words[i] for i in draws]
            sent.insert(int(rng.integers(0, sentence_len)), target)
            sentences.append(sent)
            labels.append(topic)
    order = rng.permutation(len(sentences))
    return [sentences[i] for i in order], [labels[i] for i in order], topics


def monosemous_corpus(
    target: str = "banco",
    n_sentences: int = 50_000,
    collocates: int = 10,
    sentence_len: int = 7,
    seed: int = 7,
) -> list[list[str]]:
    """Single-topic corpus: the target always appears in the same company."""
    sentences, _, _ = two_topic_corpus(
        target, sentences_per_topic=n_sentences, collocates_per_topic=collocates,
        sentence_len=sentence_len, seed=seed,
    )
    return sentences[:n_sentences]


def disjoint_cluster_corpus(
    n_sentences: int = 100_000,
    words_per_cluster: int = 20,
    sentence_len: int = 8,
    seed: int = 11,
) -> tuple[list[list[str]], list[list[str]]]:
    """Two fully disjoint word clusters; sentences never mix them.

    Returns (sentences, [cluster-0 words, cluster-1 words]).
    """
    rng = np.random.default_rng(seed)
    clusters = [
        [f"a{i:02d}" for i in range(words_per_cluster)],
        [f"b{i:02d}" for i in range(words_per_cluster)],
    ]
    sentences = []
    for _ in range(n_sentences):
        words = clusters[int(rng.integers(0, 2))]
        sentences.append([words[i] for i in rng.integers(0, len(words), size=sentence_len)])
    return sentences, clusters


def zipf_corpus(
    vocab_size: int = 20_000,
    n_tokens: int = 2_000_000,
    sentence_len: int = 20,
    exponent: float = 1.1,
    seed: int = 3,
) -> list[list[str]]:
    """Zipf-distributed token stream for throughput measurements."""
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, vocab_size + 1) ** exponent
    weights /= weights.sum()
    words = np.array([f"w{i}" for i in range(vocab_size)])
    n_sentences = n_tokens // sentence_len
    draws = rng.choice(vocab_size, size=(n_sentences, sentence_len), p=weights)
    return [list(words[row]) for row in draws]


def assignment_counts(
    model: SenseModel,
    sentences: list[list[str]],
    topics: list[int],
    target: str,
    window: int | None = None,
) -> np.ndarray:
    """Re-assign every target occurrence with the final model.

    Uses the full symmetric window (default: the training window) around
    each occurrence, the trained global vectors for the context mean, and
    the trained centroids for the cosine assignment.  Returns a
    (senses, n_topics) count matrix.
    """
    window = window or model.config.window
    vocab = model.vocab
    if target not in vocab:
        raise KeyError(f"target {target!r} not in vocabulary")
    wid = vocab.id(target)
    n_topics = max(topics) + 1
    counts = np.zeros((model.n_senses, n_topics), dtype=np.int64)
    for sent, topic in zip(sentences, topics):
        ids = [vocab.index[w] for w in sent if w in vocab.index]
        for pos, token_id in enumerate(ids):
            if token_id != wid:
                continue
            ctx = ids[max(0, pos - window):pos] + ids[pos + 1:pos + 1 + window]
            if not ctx:
                continue
            sense = predict_sense(model, wid, context_vector(model, ctx))
            counts[sense, topic] += 1
    return counts


def cluster_purity(counts: np.ndarray) -> float:
    """Standard clustering purity: sum over clusters of the majority topic."""
    total = counts.sum()
    if total == 0:
        return 0.0
    return float(counts.max(axis=1).sum() / total)


def dominant_topics(counts: np.ndarray) -> list[int]:
    """Majority ground-truth topic per sense (for senses that saw any data)."""
    return [int(np.argmax(row)) if row.sum() else -1 for row in counts]
