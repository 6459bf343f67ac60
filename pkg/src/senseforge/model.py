"""Model containers and the label grammar shared by training, storage and
evaluation.

Row labels follow one grammar everywhere:

* plain word row:   ``surface``            (tagged corpora: ``surface|TAG``)
* sense row:        ``surface#k``          with k = 0, 1, ...

A literal ``#`` inside a stored surface is escaped as ``##``, so sense
suffixes stay unambiguous.  The ``|`` tag separator needs no escaping: tags
never contain ``|`` and the split always happens at the last one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .config import TrainingConfig
from .corpus import TAG_SEP, Vocabulary

SENSE_SEP = "#"
_DIGITS = set("0123456789")


def escape_surface(word: str) -> str:
    return word.replace(SENSE_SEP, SENSE_SEP * 2)


def unescape_surface(label: str) -> str:
    return label.replace(SENSE_SEP * 2, SENSE_SEP)


def sense_label(word: str, k: int) -> str:
    return f"{escape_surface(word)}{SENSE_SEP}{k}"


def parse_label(label: str) -> tuple[str, int | None]:
    """Split a stored label into (word, sense index or None).

    The word part is unescaped; it may still carry a ``|TAG`` suffix.  A
    trailing ``#k`` counts as a sense suffix only when its ``#`` is not part
    of an escaped pair, so the surface ``a#0`` (stored ``a##0``) round-trips.
    """
    i = len(label)
    while i > 0 and label[i - 1] in _DIGITS:
        i -= 1
    if i == len(label) or i == 0:
        return unescape_surface(label), None
    j = i
    while j > 0 and label[j - 1] == SENSE_SEP:
        j -= 1
    run = i - j
    if run % 2 == 1:
        return unescape_surface(label[: i - 1]), int(label[i:])
    return unescape_surface(label), None


def split_tag(word: str) -> tuple[str, str | None]:
    """Split ``surface|TAG`` at the last separator; plain words get tag None."""
    sep = word.rfind(TAG_SEP)
    if sep <= 0 or sep == len(word) - 1:
        return word, None
    return word[:sep], word[sep + 1 :]


@dataclass
class SenseModel:
    """Trained embedding tables plus the online clustering state.

    ``global_vecs`` holds one center/context-representation vector per word;
    ``output_vecs`` is the context-side table the gradient pairs against.
    Multi-sense models additionally keep ``senses`` vectors per word, one
    context-cluster centroid per sense (running mean of assigned context
    vectors, float64) and the per-cluster assignment counts.  With K=1 the
    sense machinery is absent and the model is a plain word model.
    """

    vocab: Vocabulary
    config: TrainingConfig
    kind: str  # "word" | "tagged" | "mssg"
    global_vecs: np.ndarray  # (V, d) float32
    output_vecs: np.ndarray  # (V, d) float32
    sense_vecs: np.ndarray | None = None  # (V, K, d) float32
    centroids: np.ndarray | None = None  # (V, K, d) float64
    cluster_counts: np.ndarray | None = None  # (V, K) int64
    train_stats: "dict | None" = None

    @property
    def n_words(self) -> int:
        return len(self.vocab)

    @property
    def dim(self) -> int:
        return self.global_vecs.shape[1]

    @property
    def n_senses(self) -> int:
        return 1 if self.sense_vecs is None else self.sense_vecs.shape[1]

    @classmethod
    def initialize(
        cls, vocab: Vocabulary, config: TrainingConfig, kind: str, n_senses: int
    ) -> "SenseModel":
        """Fresh model: inputs uniform in [-0.5/d, +0.5/d), output table zero.

        The global table is drawn first, then (for K > 1) the sense table,
        so a K=1 model consumes exactly the same random stream as a plain
        word model with the same seed.
        """
        rng = np.random.default_rng(config.seed & 0xFFFFFFFFFFFFFFFF)
        v, d = len(vocab), config.dim
        bound = 0.5 / d
        global_vecs = rng.uniform(-bound, bound, (v, d)).astype(np.float32)
        output_vecs = np.zeros((v, d), dtype=np.float32)
        if n_senses > 1:
            sense_vecs = rng.uniform(-bound, bound, (v, n_senses, d)).astype(np.float32)
            centroids = np.zeros((v, n_senses, d), dtype=np.float64)
            counts = np.zeros((v, n_senses), dtype=np.int64)
            return cls(vocab, config, kind, global_vecs, output_vecs, sense_vecs, centroids, counts)
        return cls(vocab, config, kind, global_vecs, output_vecs)

    def effective_senses(self) -> np.ndarray:
        """Per-word sense budget: K, or 1 below the sense_min_count threshold."""
        k = self.n_senses
        if k == 1:
            return np.ones(self.n_words, dtype=np.int32)
        eff = np.full(self.n_words, k, dtype=np.int32)
        if self.config.sense_min_count > 0:
            eff[self.vocab.counts < self.config.sense_min_count] = 1
        return eff

    def as_vectors(self, include: str = "both") -> "WordVectors":
        return WordVectors.from_model(self, include=include)


class OOVError(KeyError):
    """A query token cannot be resolved to any stored row."""

    def __init__(self, token: str, space: str = "global"):
        super().__init__(f"token {token!r} not found in the {space} vector space")
        self.token = token
        self.space = space


class WordVectors:
    """Read-only label -> vector table, the form evaluation works against.

    Rows are grouped by label shape: plain word rows (optionally tagged) and
    ``surface#k`` sense rows.  Sense indices must be contiguous from 0 per
    surface.  Row order is meaningful: earlier rows are treated as more
    frequent when a bare surface has several tagged variants.
    """

    def __init__(self, labels: list[str], vectors: np.ndarray, kind: str | None = None,
                 manifest: dict | None = None):
        vectors = np.ascontiguousarray(vectors, dtype=np.float32)
        if vectors.ndim != 2 or len(labels) != vectors.shape[0]:
            raise ValueError("labels and vector rows must match")
        self.labels = list(labels)
        self.vectors = vectors
        self.manifest = manifest
        self.index: dict[str, int] = {}
        self.words: list[str | None] = []  # unescaped word per non-sense row
        self.sense_of: list[int | None] = []
        self.word_rows: dict[str, int] = {}
        self.variant_rows: dict[str, list[int]] = {}  # bare surface -> tagged rows
        self.sense_rows: dict[str, list[int]] = {}  # word -> sense rows ordered by k
        has_tag = False
        for row, label in enumerate(self.labels):
            if label in self.index:
                raise ValueError(f"duplicate label {label!r}")
            self.index[label] = row
            word, k = parse_label(label)
            if not word:
                raise ValueError(f"label {label!r} has an empty surface")
            self.words.append(word)
            self.sense_of.append(k)
            if k is None:
                self.word_rows.setdefault(word, row)
                surface, tag = split_tag(word)
                if tag is not None:
                    has_tag = True
                    self.variant_rows.setdefault(surface, []).append(row)
            else:
                rows = self.sense_rows.setdefault(word, [])
                if k != len(rows):
                    raise ValueError(f"sense indices for {word!r} are not contiguous from 0")
                rows.append(row)
        if kind is None:
            kind = "mssg" if self.sense_rows else ("tagged" if has_tag else "word")
        self.kind = kind

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @cached_property
    def unit_vectors(self) -> np.ndarray:
        norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return self.vectors / norms

    @cached_property
    def word_row_ids(self) -> np.ndarray:
        """Row indices of all non-sense rows, in row order."""
        return np.array([r for r, k in enumerate(self.sense_of) if k is None], dtype=np.int64)

    @cached_property
    def sense_row_ids(self) -> np.ndarray:
        return np.array([r for r, k in enumerate(self.sense_of) if k is not None], dtype=np.int64)

    @cached_property
    def sense_groups(self) -> tuple[list[str], np.ndarray, np.ndarray]:
        """Sense rows grouped by word: (words, flat row ids, group offsets).

        Groups are ordered by each word's first sense row; offsets has one
        extra trailing entry so group i spans rows[offsets[i]:offsets[i+1]].
        """
        items = sorted(self.sense_rows.items(), key=lambda kv: kv[1][0])
        words = [w for w, _ in items]
        rows = np.array([r for _, rr in items for r in rr], dtype=np.int64)
        offsets = np.zeros(len(items) + 1, dtype=np.int64)
        if items:
            np.cumsum([len(rr) for _, rr in items], out=offsets[1:])
        return words, rows, offsets

    def resolve(self, query: str, space: str = "global") -> int:
        """Map a query string to one row.

        Tried in order: exact stored label, escaped plain word, then the most
        frequent tagged variant of the surface; each step also retries the
        lowercased query, since corpora are lowercased by default while
        analogy datasets often are not.
        """
        candidates = [query]
        if query.lower() != query:
            candidates.append(query.lower())
        for q in candidates:
            if q in self.index:
                return self.index[q]
            escaped = escape_surface(q)
            if escaped in self.index:
                return self.index[escaped]
            if q in self.word_rows:
                return self.word_rows[q]
            variants = self.variant_rows.get(q)
            if variants:
                return variants[0]
        raise OOVError(query, space)

    def senses(self, query: str) -> list[int]:
        """Sense rows of a surface (or of its most frequent tagged variant)."""
        for q in (query, query.lower()):
            if q in self.sense_rows:
                return self.sense_rows[q]
            surface, _tag = split_tag(q)
            variants = self.variant_rows.get(surface)
            if variants is None and q in self.word_rows:
                variants = [self.word_rows[q]]
            if variants:
                word = self.words[variants[0]]
                if word in self.sense_rows:
                    return self.sense_rows[word]
        raise OOVError(query, "sense")

    @classmethod
    def from_model(cls, model: SenseModel, include: str = "both") -> "WordVectors":
        """Flatten a trained model into labelled rows.

        ``include`` picks the blocks: "global", "senses", or "both".  A K=1
        model has no sense rows, so "both" degrades to "global".
        """
        if include not in ("global", "senses", "both"):
            raise ValueError("include must be 'global', 'senses' or 'both'")
        labels: list[str] = []
        blocks: list[np.ndarray] = []
        words = model.vocab.words
        if include in ("global", "both"):
            labels.extend(escape_surface(w) for w in words)
            blocks.append(model.global_vecs)
        if include in ("senses", "both") and model.sense_vecs is not None:
            k = model.n_senses
            labels.extend(sense_label(w, j) for w in words for j in range(k))
            blocks.append(model.sense_vecs.reshape(-1, model.dim))
        if not blocks:
            raise ValueError("model has no sense rows to export")
        matrix = blocks[0] if len(blocks) == 1 else np.vstack(blocks)
        return cls(labels, matrix, kind=model.kind)
