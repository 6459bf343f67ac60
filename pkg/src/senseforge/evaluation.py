"""Analogy evaluation, nearest-neighbor queries, and sense-aware algebra.

The analogy task: given (a, b, c), predict d from the arithmetic
``v(b) + v(c) - v(a)`` over unit-normalized rows, scored by rank-1 accuracy
(percentage of correctly predicted fourth words).  Quadruples containing
out-of-vocabulary tokens are skipped and reported separately by default.

Resolution policy for word-level queries: a token maps to its stored row;
on tagged models an untagged token maps to its most frequent tagged variant
and predictions are compared tag-stripped; on multi-sense models the
arithmetic uses global vectors, and ``space="sense"`` switches the ranking
to max-over-senses cosine instead.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import OOVError, SenseModel, WordVectors, split_tag

logger = logging.getLogger(__name__)

SYNTACTIC_CATEGORIES = frozenset({
    "adjective-to-adverb", "opposite", "comparative", "superlative",
    "present-participle", "nationality-adjective", "past-tense",
    "plural", "plural-verbs",
})
SEMANTIC_CATEGORIES = frozenset({
    "capital-common-countries", "capital-world", "currency",
    "city-in-state", "family",
})

# Candidate-score blocks are capped around this many floats per batch.
_BATCH_BUDGET = 50_000_000


class AnalogyParseError(ValueError):
    pass


@dataclass(frozen=True)
class Category:
    name: str
    kind: str  # "syntactic" | "semantic" | "unknown"
    quadruples: tuple[tuple[str, str, str, str], ...]


@dataclass(frozen=True)
class AnalogyDataset:
    categories: tuple[Category, ...]

    def __len__(self) -> int:
        return sum(len(c.quadruples) for c in self.categories)


def category_kind(name: str) -> str:
    """Kind of a category name; tolerates the common ``gramN-`` prefix."""
    key = name.strip().lower()
    if key.startswith("gram") and "-" in key:
        head, rest = key.split("-", 1)
        if head[4:].isdigit():
            key = rest
    if key in SYNTACTIC_CATEGORIES:
        return "syntactic"
    if key in SEMANTIC_CATEGORIES:
        return "semantic"
    return "unknown"


def parse_analogy_file(path: str | Path) -> AnalogyDataset:
    """Parse the ``: category`` / four-tokens-per-line analogy format.

    Lines before the first header go into an implicit unknown category.
    Blank lines are ignored; any other line must hold exactly four tokens.
    """
    categories: list[Category] = []
    name = None
    quads: list[tuple[str, str, str, str]] = []

    def flush():
        if name is not None or quads:
            cat_name = name if name is not None else "(uncategorized)"
            categories.append(Category(cat_name, category_kind(cat_name), tuple(quads)))

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith(":"):
                flush()
                name = stripped[1:].strip()
                quads = []
                continue
            tokens = stripped.split()
            if len(tokens) != 4:
                raise AnalogyParseError(
                    f"line {lineno}: expected 4 tokens, got {len(tokens)}"
                )
            quads.append(tuple(tokens))
    flush()
    return AnalogyDataset(tuple(categories))


@dataclass
class CategoryScore:
    name: str
    kind: str
    correct: int = 0
    attempted: int = 0
    skipped_oov: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.attempted if self.attempted else 0.0

    @property
    def total(self) -> int:
        return self.attempted + self.skipped_oov


@dataclass
class AnalogyReport:
    categories: list[CategoryScore]
    policy: str = ""

    def aggregate(self, kind: str | None = None) -> CategoryScore:
        """Sum category scores; kind=None aggregates everything."""
        agg = CategoryScore(kind or "all", "aggregate")
        for cat in self.categories:
            if kind is not None and cat.kind != kind:
                continue
            agg.correct += cat.correct
            agg.attempted += cat.attempted
            agg.skipped_oov += cat.skipped_oov
        return agg

    def _rows(self) -> list[CategoryScore]:
        return list(self.categories) + [
            self.aggregate("syntactic"),
            self.aggregate("semantic"),
            self.aggregate(),
        ]

    def table(self) -> str:
        width = max([len("category")] + [len(r.name) for r in self._rows()]) + 2
        lines = []
        if self.policy:
            lines.append(f"# {self.policy}")
        lines.append(
            f"{'category':<{width}}{'kind':<12}{'correct':>8}{'attempted':>10}"
            f"{'skipped':>8}{'accuracy':>10}"
        )
        for r in self._rows():
            lines.append(
                f"{r.name:<{width}}{r.kind:<12}{r.correct:>8}{r.attempted:>10}"
                f"{r.skipped_oov:>8}{100.0 * r.accuracy:>9.2f}%"
            )
        return "\n".join(lines)

    def machine_lines(self) -> list[str]:
        return [
            f"{r.name}\t{r.kind}\t{r.correct}\t{r.attempted}\t{r.skipped_oov}\t{r.accuracy:.4f}"
            for r in self._rows()
        ]


@dataclass
class QueryResult:
    """Ranked (label, cosine) pairs, scores non-increasing."""

    pairs: list[tuple[str, float]]
    note: str | None = None

    def __len__(self) -> int:
        return len(self.pairs)


def _as_vectors(model) -> WordVectors:
    if isinstance(model, WordVectors):
        return model
    if isinstance(model, SenseModel):
        return model.as_vectors("both")
    raise TypeError(f"expected SenseModel or WordVectors, got {type(model)!r}")


def _strip(word: str) -> str:
    return split_tag(word)[0]


def _top_pairs(labels, scores, order, topn) -> list[tuple[str, float]]:
    return [(labels[i], float(scores[i])) for i in order[:topn]]


def _rank(scores: np.ndarray, topn: int) -> np.ndarray:
    topn = min(topn, len(scores))
    if topn <= 0:
        return np.zeros(0, dtype=np.int64)
    part = np.argpartition(-scores, topn - 1)[:topn]
    return part[np.argsort(-scores[part], kind="stable")]


def _word_candidates(wv: WordVectors, restrict_vocab: int | None) -> np.ndarray:
    rows = wv.word_row_ids
    if restrict_vocab is not None:
        rows = rows[:restrict_vocab]
    return rows


def nearest_neighbors(model, label: str, topn: int = 10, space: str = "global") -> QueryResult:
    """Rank rows of the chosen space by cosine to the query row.

    space="global" ranks word rows, space="sense" ranks sense rows; the
    query itself may name either kind of row and is excluded from results.
    """
    wv = _as_vectors(model)
    if space == "sense":
        if label in wv.index and wv.sense_of[wv.index[label]] is not None:
            qrow = wv.index[label]
        else:
            senses = wv.senses(label)
            qrow = senses[0] if senses else None
            if qrow is None:
                raise OOVError(label, space)
        cand = wv.sense_row_ids
    else:
        qrow = wv.resolve(label, space)
        cand = wv.word_row_ids
    unit = wv.unit_vectors
    scores = unit[cand] @ unit[qrow]
    mask = cand != qrow
    cand, scores = cand[mask], scores[mask]
    order = _rank(scores, topn)
    return QueryResult([(wv.labels[cand[i]], float(scores[i])) for i in order])


def parse_expression(text: str) -> list[tuple[int, str]]:
    """Parse ``banco + dados - dinheiro`` style signed label lists.

    Operators are standalone ``+``/``-`` tokens or a single-character prefix
    of a term; the first term defaults to ``+``.  Internal hyphens are part
    of the word (``centro-direita``).
    """
    terms: list[tuple[int, str]] = []
    pending = 1
    have_op = False
    for tok in text.split():
        if tok in ("+", "-"):
            if have_op:
                raise ValueError(f"two consecutive operators near {tok!r}")
            pending = 1 if tok == "+" else -1
            have_op = True
            continue
        sign = pending
        if tok[0] in "+-" and len(tok) > 1:
            sign *= 1 if tok[0] == "+" else -1
            tok = tok[1:]
        terms.append((sign, tok))
        pending = 1
        have_op = False
    if have_op:
        raise ValueError("expression ends with a dangling operator")
    if not terms:
        raise ValueError("empty expression")
    return terms


def vector_algebra(model, expression, topn: int = 10, space: str = "global",
                   restrict_vocab: int | None = None) -> QueryResult:
    """Sum signed unit vectors and rank candidates by cosine to the result.

    ``expression`` is either a string (see :func:`parse_expression`) or a
    pre-parsed list of (sign, label) pairs.  Labels may select sense rows
    (``word#k``) or tagged rows (``word|TAG``).  All operand rows are
    excluded from the ranking.  An exactly-zero result vector yields an
    empty result with an explanatory note instead of ranking noise.
    """
    wv = _as_vectors(model)
    terms = parse_expression(expression) if isinstance(expression, str) else list(expression)
    if not terms:
        raise ValueError("empty expression")
    unit = wv.unit_vectors
    target = np.zeros(wv.dim, dtype=np.float64)
    used = []
    for sign, label in terms:
        if label in wv.index:
            row = wv.index[label]
        else:
            row = wv.resolve(label, space)
        used.append(row)
        target += sign * unit[row].astype(np.float64)
    if not np.any(target):
        note = "operands cancel to the zero vector; no ranking is meaningful"
        logger.warning(note)
        return QueryResult([], note=note)
    cand = wv.sense_row_ids if space == "sense" else _word_candidates(wv, restrict_vocab)
    mask = ~np.isin(cand, np.array(used, dtype=np.int64))
    cand = cand[mask]
    tnorm = target / np.linalg.norm(target)
    scores = unit[cand] @ tnorm.astype(np.float32)
    order = _rank(scores, topn)
    return QueryResult([(wv.labels[cand[i]], float(scores[i])) for i in order])


def solve_analogy(model, a: str, b: str, c: str, topn: int = 10, space: str = "global",
                  restrict_vocab: int | None = None) -> QueryResult:
    """Predict d for a:b :: c:d via ``v(b) + v(c) - v(a)`` on unit rows.

    The rows used for a, b and c never appear in the result.  With
    space="sense" each candidate surface scores as the maximum cosine over
    its sense rows and the winning sense label is reported.
    """
    wv = _as_vectors(model)
    rows = [wv.resolve(q) for q in (a, b, c)]
    unit = wv.unit_vectors
    target = (unit[rows[1]].astype(np.float64) + unit[rows[2]] - unit[rows[0]])
    tnorm = np.linalg.norm(target)
    if tnorm > 0:
        target = target / tnorm
    target32 = target.astype(np.float32)
    if space == "sense":
        words, srows, starts = wv.sense_groups
        scores = unit[srows] @ target32
        group_max = np.maximum.reduceat(scores, starts[:-1]) if len(words) else np.zeros(0)
        exclude = {_strip(wv.words[r]) for r in rows} | {wv.words[r] for r in rows}
        pairs = []
        for gi in _rank(group_max, topn + 3):
            if words[gi] in exclude or _strip(words[gi]) in exclude:
                continue
            lo, hi = starts[gi], starts[gi + 1]
            best = lo + int(np.argmax(scores[lo:hi]))
            pairs.append((wv.labels[srows[best]], float(scores[best])))
            if len(pairs) >= topn:
                break
        return QueryResult(pairs)
    cand = _word_candidates(wv, restrict_vocab)
    mask = ~np.isin(cand, np.array(rows, dtype=np.int64))
    cand = cand[mask]
    scores = unit[cand] @ target32
    order = _rank(scores, topn)
    return QueryResult([(wv.labels[cand[i]], float(scores[i])) for i in order])


def _resolution_policy(wv: WordVectors, space: str) -> str:
    bits = [f"space={space}"]
    if wv.kind == "tagged":
        bits.append("queries resolve to the most frequent tagged variant; "
                    "predictions compared tag-stripped")
    if wv.kind == "mssg":
        if space == "sense":
            bits.append("candidates scored as max cosine over sense rows")
        else:
            bits.append("arithmetic over global vectors")
    bits.append("OOV quadruples skipped" )
    return "; ".join(bits)


def evaluate_analogies(model, dataset: AnalogyDataset, space: str = "global",
                       restrict_vocab: int | None = None,
                       oov_as_wrong: bool = False) -> AnalogyReport:
    """Score every quadruple at rank 1 and report per-category accuracy.

    A quadruple counts as correct when the top-ranked candidate, stripped of
    tag and sense markers, equals its fourth token (case-insensitive).
    Quadruples with any unresolvable token are skipped (or counted wrong
    with ``oov_as_wrong``).
    """
    wv = _as_vectors(model)
    unit = wv.unit_vectors
    if space == "sense":
        group_words, srows, starts = wv.sense_groups
        cand_matrix = unit[srows]
        cand_words = [_strip(w).lower() for w in group_words]
        word_to_group = {w: i for i, w in enumerate(group_words)}
    else:
        cand = _word_candidates(wv, restrict_vocab)
        cand_matrix = unit[cand]
        cand_words = [_strip(wv.words[r]).lower() for r in cand]
        row_to_pos = {int(r): i for i, r in enumerate(cand)}

    report = AnalogyReport([], policy=_resolution_policy(wv, space))
    batch = max(1, min(512, _BATCH_BUDGET // max(1, cand_matrix.shape[0])))
    for category in dataset.categories:
        score = CategoryScore(category.name, category.kind)
        resolved: list[tuple[tuple[int, int, int], str]] = []
        for quad in category.quadruples:
            a, b, c, d = quad
            try:
                rows = (wv.resolve(a), wv.resolve(b), wv.resolve(c))
                # d must be reachable as a candidate in the ranking space
                if space == "sense":
                    wv.senses(d)
                else:
                    wv.resolve(d)
            except OOVError:
                if oov_as_wrong:
                    score.attempted += 1
                else:
                    score.skipped_oov += 1
                continue
            resolved.append((rows, d.lower()))
        for base in range(0, len(resolved), batch):
            block = resolved[base:base + batch]
            targets = np.stack([
                unit[rb].astype(np.float64) + unit[rc] - unit[ra]
                for (ra, rb, rc), _ in block
            ]).astype(np.float32)
            scores = targets @ cand_matrix.T
            for qi, ((ra, rb, rc), d_key) in enumerate(block):
                row_scores = scores[qi]
                if space == "sense":
                    group_max = np.maximum.reduceat(row_scores, starts[:-1])
                    for r in (ra, rb, rc):
                        gi = word_to_group.get(wv.words[r])
                        if gi is not None:
                            group_max[gi] = -np.inf
                    pred = cand_words[int(np.argmax(group_max))] if len(group_max) else None
                else:
                    masked = row_scores
                    for r in (ra, rb, rc):
                        pos = row_to_pos.get(int(r))
                        if pos is not None:
                            masked[pos] = -np.inf
                    pred = cand_words[int(np.argmax(masked))] if len(masked) else None
                score.attempted += 1
                if pred is not None and pred == d_key:
                    score.correct += 1
        report.categories.append(score)
    return report
