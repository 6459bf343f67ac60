"""Model persistence: word2vec-compatible text, a compact binary format,
and a key:value manifest sidecar.

Text format: first line ``ROWS DIM``, then one ``label v1 ... vDIM`` row per
line with 6-significant-digit values.  With a single-sense untagged model
this is exactly the common word2vec text format; sense rows use ``label#k``.

Binary format (little-endian throughout):

    bytes 0..7    magic ``SFVEC001``
    u32           manifest length, then that many bytes of JSON manifest
    u64           label blob length, then newline-joined UTF-8 labels
    u64 rows, u32 dim, then rows*dim float32 vector data
    u8            1 if cluster state follows, else 0
    (if 1)        u64 words, u32 senses, u32 dim,
                  words*senses*dim float64 centroids,
                  words*senses int64 cluster counts

Cluster state (centroids and counts) is stored only in binary dumps of
multi-sense models; text dumps and loaded evaluation models never carry it.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .model import SenseModel, WordVectors

MAGIC = b"SFVEC001"
FORMAT_VERSION = 1


class LoadError(ValueError):
    pass


def _to_vectors(model, include: str) -> tuple[WordVectors, SenseModel | None]:
    if isinstance(model, SenseModel):
        return model.as_vectors(include), model
    if isinstance(model, WordVectors):
        if include == "global":
            rows = model.word_row_ids
        elif include == "senses":
            rows = model.sense_row_ids
        elif include == "both":
            return model, None
        else:
            raise ValueError("include must be 'global', 'senses' or 'both'")
        labels = [model.labels[i] for i in rows]
        return WordVectors(labels, model.vectors[rows], kind=model.kind), None
    raise TypeError(f"cannot save object of type {type(model)!r}")


def build_manifest(model, include: str = "both") -> dict:
    vectors, source = _to_vectors(model, include)
    manifest = {
        "format_version": FORMAT_VERSION,
        "model_kind": vectors.kind,
        "rows": len(vectors),
        "dim": vectors.dim,
        "senses": source.n_senses if source is not None else
                  (max((len(v) for v in vectors.sense_rows.values()), default=1)),
    }
    if source is not None:
        manifest["words"] = source.n_words
        manifest["config"] = source.config.as_dict()
    return manifest


def write_manifest(path: str | Path, manifest: dict) -> None:
    """Write the sidecar ``<path>.manifest`` in flat ``key: value`` lines."""
    lines = []
    for key, value in manifest.items():
        if isinstance(value, dict):
            for sub, subval in value.items():
                lines.append(f"{key}.{sub}: {subval}")
        else:
            lines.append(f"{key}: {value}")
    Path(str(path) + ".manifest").write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_text(model, path: str | Path, include: str = "both") -> int:
    """Write the text format; returns the number of vector rows written."""
    vectors, _ = _to_vectors(model, include)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(vectors)} {vectors.dim}\n")
        for label, row in zip(vectors.labels, vectors.vectors):
            fh.write(label + " " + " ".join(f"{v:.6g}" for v in row) + "\n")
    write_manifest(path, build_manifest(model, include))
    return len(vectors)


def save_binary(model, path: str | Path, include: str = "both") -> int:
    """Write the binary format; returns the number of vector rows written.

    Saving a multi-sense SenseModel with include="both" produces a full dump
    (cluster centroids and counts included).
    """
    vectors, source = _to_vectors(model, include)
    manifest = build_manifest(model, include)
    manifest_blob = json.dumps(manifest, ensure_ascii=False).encode("utf-8")
    label_blob = "\n".join(vectors.labels).encode("utf-8")
    matrix = np.ascontiguousarray(vectors.vectors, dtype="<f4")
    full = (source is not None and source.centroids is not None and include == "both")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(manifest_blob)))
        fh.write(manifest_blob)
        fh.write(struct.pack("<Q", len(label_blob)))
        fh.write(label_blob)
        fh.write(struct.pack("<QI", matrix.shape[0], matrix.shape[1]))
        fh.write(matrix.tobytes())
        fh.write(struct.pack("<B", 1 if full else 0))
        if full:
            v, k = source.cluster_counts.shape
            fh.write(struct.pack("<QII", v, k, source.dim))
            fh.write(np.ascontiguousarray(source.centroids, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(source.cluster_counts, dtype="<i8").tobytes())
    write_manifest(path, manifest)
    return len(vectors)


def _read_exact(fh, n: int, what: str) -> bytes:
    blob = fh.read(n)
    if len(blob) != n:
        raise LoadError(f"truncated file while reading {what}")
    return blob


def _load_binary(fh) -> WordVectors:
    (manifest_len,) = struct.unpack("<I", _read_exact(fh, 4, "manifest length"))
    try:
        manifest = json.loads(_read_exact(fh, manifest_len, "manifest"))
    except json.JSONDecodeError as exc:
        raise LoadError(f"corrupt manifest block: {exc}") from exc
    (label_len,) = struct.unpack("<Q", _read_exact(fh, 8, "label length"))
    labels = _read_exact(fh, label_len, "labels").decode("utf-8").split("\n") if label_len else []
    rows, dim = struct.unpack("<QI", _read_exact(fh, 12, "matrix header"))
    if rows != len(labels):
        raise LoadError(f"row count mismatch: header says {rows}, found {len(labels)} labels")
    data = _read_exact(fh, rows * dim * 4, "vector data")
    matrix = np.frombuffer(data, dtype="<f4").reshape(rows, dim)
    try:
        return WordVectors(labels, matrix, kind=manifest.get("model_kind"), manifest=manifest)
    except ValueError as exc:
        raise LoadError(str(exc)) from exc


def _load_text(path: str | Path) -> WordVectors:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise LoadError("malformed header: expected 'ROWS DIM'")
        try:
            rows, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise LoadError("malformed header: expected 'ROWS DIM'") from exc
        labels: list[str] = []
        matrix = np.empty((rows, dim), dtype=np.float32)
        count = 0
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            if count >= rows:
                raise LoadError(f"row count mismatch: more than {rows} rows")
            parts = line.split()
            if len(parts) != dim + 1:
                raise LoadError(f"line {lineno}: expected {dim} values, got {len(parts) - 1}")
            labels.append(parts[0])
            try:
                matrix[count] = np.asarray(parts[1:], dtype=np.float32)
            except ValueError as exc:
                raise LoadError(f"line {lineno}: non-numeric vector value") from exc
            count += 1
        if count != rows:
            raise LoadError(f"row count mismatch: header says {rows}, found {count}")
    try:
        return WordVectors(labels, matrix)
    except ValueError as exc:
        raise LoadError(str(exc)) from exc


def load(path: str | Path) -> WordVectors:
    """Load a model file in either format (sniffed by the magic bytes).

    Returns the read-only evaluation form: labelled rows only, cluster state
    (if present in a binary full dump) is skipped.
    """
    with open(path, "rb") as fh:
        if fh.read(len(MAGIC)) == MAGIC:
            return _load_binary(fh)
    try:
        return _load_text(path)
    except UnicodeDecodeError as exc:
        raise LoadError(f"not a recognized model file: {exc}") from exc
