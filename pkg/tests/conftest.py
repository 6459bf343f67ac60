import numpy as np
import pytest

import senseforge as sf


@pytest.fixture(scope="session")
def tiny_corpus():
    """Two-topic corpus small enough for fast training smokes."""
    from senseforge.synthetic import two_topic_corpus

    sentences, topics, topic_words = two_topic_corpus(sentences_per_topic=1500, seed=7)
    return sentences, topics, topic_words


@pytest.fixture(scope="session")
def tiny_vocab(tiny_corpus):
    sentences, _, _ = tiny_corpus
    return sf.build_vocab(sentences, min_count=1)


@pytest.fixture(scope="session")
def small_config():
    return sf.TrainingConfig(dim=16, window=5, min_count=1, negatives=5,
                             epochs=1, senses=1, seed=9, workers=1)


def make_model(words, vectors, kind=None):
    """WordVectors from parallel label/row lists (test helper)."""
    return sf.WordVectors(list(words), np.asarray(vectors, dtype=np.float32), kind=kind)
