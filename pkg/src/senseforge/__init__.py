"""senseforge: word, PoS-tagged and multi-sense skip-gram embeddings.

Trains skip-gram negative-sampling models in three flavours (plain word
vectors, tag-disambiguated vectors over ``surface|TAG`` tokens, and
multi-sense vectors with online context clustering) and evaluates them with
the four-word analogy task, nearest-neighbor queries and sense-aware vector
algebra.
"""

from .config import TrainingConfig
from .corpus import (
    LineCorpus,
    MalformedTokenError,
    Token,
    Vocabulary,
    build_vocab,
    encode_stream,
    tokenize_line,
)
from .evaluation import (
    AnalogyDataset,
    AnalogyReport,
    QueryResult,
    evaluate_analogies,
    nearest_neighbors,
    parse_analogy_file,
    solve_analogy,
    vector_algebra,
)
from .model import OOVError, SenseModel, WordVectors
from .mssg import (
    context_vector,
    mssg_step,
    predict_sense,
    train_mssg,
    update_centroid,
)
from .sgns import (
    NegativeTable,
    TrainingDiverged,
    sgns_objective,
    sgns_step,
    sigmoid,
    train_skipgram,
)
from .store import LoadError, load, save_binary, save_text

__version__ = "0.1.0"

__all__ = [
    "TrainingConfig",
    "LineCorpus", "MalformedTokenError", "Token", "Vocabulary",
    "build_vocab", "encode_stream", "tokenize_line",
    "AnalogyDataset", "AnalogyReport", "QueryResult",
    "evaluate_analogies", "nearest_neighbors", "parse_analogy_file",
    "solve_analogy", "vector_algebra",
    "OOVError", "SenseModel", "WordVectors",
    "context_vector", "mssg_step", "predict_sense", "train_mssg", "update_centroid",
    "NegativeTable", "TrainingDiverged", "sgns_objective", "sgns_step",
    "sigmoid", "train_skipgram",
    "LoadError", "load", "save_binary", "save_text",
    "__version__",
]
