"""Training hyperparameters shared by all model flavours."""

from __future__ import annotations

from dataclasses import dataclass, field, fields


@dataclass
class TrainingConfig:
    """Hyperparameters for skip-gram and multi-sense skip-gram training.

    Defaults follow the reference setup: 300-dimensional vectors, a context
    window of five words, initial learning rate 0.025, minimum token
    frequency 10, and at most 3 senses per word.  ``negatives``, ``epochs``
    and ``subsample_t`` are not pinned by that setup; the defaults here are
    common skip-gram practice.
    """

    dim: int = 300
    window: int = 5
    lr0: float = 0.025
    min_count: int = 10
    negatives: int = 5
    epochs: int = 1
    subsample_t: float = 0.0
    senses: int = 3
    sense_min_count: int = 0
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.lr0 <= 0:
            raise ValueError("lr0 must be > 0")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.subsample_t < 0:
            raise ValueError("subsample_t must be >= 0")
        if self.senses < 1:
            raise ValueError("senses must be >= 1")
        if self.sense_min_count < 0:
            raise ValueError("sense_min_count must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def lr_floor(self) -> float:
        """Learning-rate floor: the linear decay never goes below lr0 * 1e-4."""
        return self.lr0 * 1e-4

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
