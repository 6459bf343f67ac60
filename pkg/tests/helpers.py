"""Shared fixtures-as-functions for constructed-vector oracles."""

import numpy as np

from senseforge.model import WordVectors


def exact_analogy_model(n_quads, kind=None, labeler=lambda stem, i: f"{stem}{i}"):
    """Block-orthogonal vectors where v(d) = unit(v(b)+v(c)-v(a)) exactly.

    Each quadruple lives in its own 4-dim block, so cross-quadruple cosines
    are zero and rank-1 retrieval of d is guaranteed.
    """
    d = 4 * n_quads
    labels, rows, quads = [], [], []
    for i in range(n_quads):
        block = np.zeros((4, d), dtype=np.float64)
        block[0, 4 * i] = 1.0  # a
        block[1, 4 * i + 1] = 1.0  # b
        block[2, 4 * i + 2] = 1.0  # c
        target = block[1] + block[2] - block[0]
        block[3] = target / np.linalg.norm(target)  # d
        names = [labeler(stem, i) for stem in ("a", "b", "c", "d")]
        labels.extend(names)
        rows.extend(block)
        quads.append(tuple(names))
    return WordVectors(labels, np.array(rows, dtype=np.float32), kind=kind), quads


def write_analogy_file(path, categories):
    """categories: list of (name, [quadruples])."""
    with open(path, "w", encoding="utf-8") as fh:
        for name, quads in categories:
            fh.write(f": {name}\n")
            for quad in quads:
                fh.write(" ".join(quad) + "\n")
    return path
