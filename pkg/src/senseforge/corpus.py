"""Corpus streaming, token normalization, and vocabulary indexing.

Input corpora are UTF-8 plain text, one sentence per line, tokens separated
by whitespace.  A PoS-tagged corpus writes each token as ``surface|TAG``;
tagged tokens are kept as distinct vocabulary entries, so e.g. the noun and
the verb reading of an ambiguous word get separate vectors downstream.

Normalization defaults: surfaces are lowercased and surrounding punctuation
is stripped (internal hyphens survive, so ``centro-direita`` stays intact).
Both behaviours can be switched off per call.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

TAG_SEP = "|"


class MalformedTokenError(ValueError):
    """A token in a tagged corpus is missing its ``surface|TAG`` structure."""

    def __init__(self, token: str, lineno: int | None = None):
        at = f" at line {lineno}" if lineno is not None else ""
        super().__init__(f"malformed tagged token {token!r}{at}: expected 'surface|TAG'")
        self.token = token
        self.lineno = lineno


@dataclass(frozen=True)
class Token:
    """One corpus token: a surface form plus an optional PoS tag."""

    surface: str
    tag: str | None = None

    @property
    def text(self) -> str:
        """Serialized form: ``surface`` or ``surface|TAG``."""
        if self.tag is None:
            return self.surface
        return f"{self.surface}{TAG_SEP}{self.tag}"


def _strip_outer_punct(s: str) -> str:
    start, end = 0, len(s)
    while start < end and unicodedata.category(s[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(s[end - 1]).startswith("P"):
        end -= 1
    return s[start:end]


def normalize_surface(surface: str, lowercase: bool = True, strip_punct: bool = True) -> str:
    """Normalize one surface form; may return the empty string (drop the token)."""
    if strip_punct:
        surface = _strip_outer_punct(surface)
    if lowercase:
        surface = surface.lower()
    return surface


def tokenize_line(
    line: str,
    tagged: bool = False,
    lowercase: bool = True,
    strip_punct: bool = True,
    lineno: int | None = None,
) -> list[Token]:
    """Split one sentence into normalized tokens.

    In tagged mode every raw token must contain a ``|``; the split happens at
    the last one (tags never contain ``|``, surfaces may).  Tags are
    uppercased.  Tokens whose surface normalizes to the empty string are
    dropped.

    Raises:
        MalformedTokenError: tagged mode and a token has no usable ``|`` split.
    """
    tokens = []
    for raw in line.split():
        tag = None
        surface = raw
        if tagged:
            sep = raw.rfind(TAG_SEP)
            if sep <= 0 or sep == len(raw) - 1:
                raise MalformedTokenError(raw, lineno)
            surface, tag = raw[:sep], raw[sep + 1 :].upper()
        surface = normalize_surface(surface, lowercase=lowercase, strip_punct=strip_punct)
        if surface:
            tokens.append(Token(surface, tag))
    return tokens


class LineCorpus:
    """Re-iterable sentence stream over a one-sentence-per-line text file.

    Iterating yields each sentence as a list of serialized token strings
    (``surface`` or ``surface|TAG``), ready for vocabulary building and
    encoding.  The file is re-opened on every pass, so the same instance can
    drive multi-epoch training.
    """

    def __init__(
        self,
        path: str | Path,
        tagged: bool = False,
        lowercase: bool = True,
        strip_punct: bool = True,
    ):
        self.path = Path(path)
        self.tagged = tagged
        self.lowercase = lowercase
        self.strip_punct = strip_punct

    def __iter__(self) -> Iterator[list[str]]:
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                toks = tokenize_line(
                    line,
                    tagged=self.tagged,
                    lowercase=self.lowercase,
                    strip_punct=self.strip_punct,
                    lineno=lineno,
                )
                yield [t.text for t in toks]

    def __repr__(self) -> str:
        mode = "tagged" if self.tagged else "untagged"
        return f"LineCorpus({str(self.path)!r}, {mode})"


class Vocabulary:
    """Dense token index ordered by descending count (ties lexicographic).

    Entry ``i`` has id ``i``; ``total_tokens`` is the sum of retained counts.
    """

    __slots__ = ("words", "counts", "index", "total_tokens")

    def __init__(self, words: Sequence[str], counts: Sequence[int]):
        if len(words) != len(counts):
            raise ValueError("words and counts must have equal length")
        self.words = list(words)
        self.counts = np.asarray(counts, dtype=np.int64)
        if len(self.counts) and self.counts.min() < 0:
            raise ValueError("counts must be non-negative")
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValueError("duplicate tokens in vocabulary")
        self.total_tokens = int(self.counts.sum()) if len(self.words) else 0

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def id(self, token: str) -> int:
        return self.index[token]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.words[i] for i in ids]

    @property
    def frequencies(self) -> np.ndarray:
        """Relative frequency of each entry among retained tokens."""
        if self.total_tokens == 0:
            return np.zeros(0, dtype=np.float64)
        return self.counts / float(self.total_tokens)

    def keep_probs(self, subsample_t: float) -> np.ndarray:
        """Per-token retention probability under frequency subsampling.

        A token with relative frequency f is kept with probability
        min(1, sqrt(t / f)); t <= 0 disables subsampling.
        """
        if subsample_t <= 0:
            return np.ones(len(self), dtype=np.float64)
        freq = self.frequencies
        probs = np.ones(len(self), dtype=np.float64)
        nz = freq > 0
        probs[nz] = np.minimum(1.0, np.sqrt(subsample_t / freq[nz]))
        return probs

    def expected_retained_tokens(self, subsample_t: float) -> float:
        """Expected number of tokens per corpus pass after subsampling."""
        return float(np.dot(self.counts, self.keep_probs(subsample_t)))

    @property
    def looks_tagged(self) -> bool:
        """True when every entry carries a PoS tag separator."""
        return len(self.words) > 0 and all(TAG_SEP in w for w in self.words)

    def save(self, path: str | Path) -> None:
        """Write one ``token<TAB>count`` line per entry, in stored order."""
        with open(path, "w", encoding="utf-8") as fh:
            for word, count in zip(self.words, self.counts):
                fh.write(f"{word}\t{int(count)}\n")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        words, counts = [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    word, count = line.split("\t")
                    counts.append(int(count))
                except ValueError as exc:
                    raise ValueError(f"bad vocabulary line {lineno}: {line!r}") from exc
                words.append(word)
        return cls(words, counts)


def build_vocab(sentences: Iterable[Sequence[str]], min_count: int = 10) -> Vocabulary:
    """Count serialized token strings and keep those seen >= min_count times.

    Tagged tokens count as distinct strings, so ``livro|N`` and ``livro|V``
    become separate entries.  An empty corpus yields an empty vocabulary.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts: Counter[str] = Counter()
    for sentence in sentences:
        counts.update(sentence)
    retained = sorted(
        (w for w, c in counts.items() if c >= min_count),
        key=lambda w: (-counts[w], w),
    )
    return Vocabulary(retained, [counts[w] for w in retained])


def encode_stream(
    sentences: Iterable[Sequence[str]],
    vocab: Vocabulary,
    subsample_t: float = 0.0,
    rng: np.random.Generator | int | None = None,
) -> Iterator[np.ndarray]:
    """Yield each sentence as an int32 id array; OOV tokens are dropped.

    With ``subsample_t > 0`` each in-vocabulary token is independently
    discarded with probability max(0, 1 - sqrt(t / f)).  Deterministic for a
    given generator state.
    """
    if rng is None or isinstance(rng, int):
        rng = np.random.default_rng(0 if rng is None else rng)
    index = vocab.index
    keep = vocab.keep_probs(subsample_t) if subsample_t > 0 else None
    for sentence in sentences:
        ids = np.array([index[w] for w in sentence if w in index], dtype=np.int32)
        if keep is not None and ids.size:
            ids = ids[rng.random(ids.size) < keep[ids]]
        yield ids
