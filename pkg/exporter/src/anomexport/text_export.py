"""Prompt-ensembled text embeddings, written in the engine interchange format."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .encoders import TextEncoder
from .errors import FormatError, IoError
from .prompts import PromptSet


def write_npy(array: np.ndarray, path) -> Path:
    """Atomic NPY v1.0 write (temp file + rename) with the export dtypes."""
    path = Path(path)
    if array.dtype not in (np.float32, np.uint8):
        raise FormatError(f"refusing to export dtype {array.dtype}")
    out = np.ascontiguousarray(array)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "wb") as fp:
            np.lib.format.write_array(fp, out, version=(1, 0), allow_pickle=False)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return path


def class_embeddings(prompts: PromptSet, encoder: TextEncoder) -> np.ndarray:
    """Encode all filled templates per class, average, unit-normalize, stack."""
    rows = []
    for name in prompts.class_names:
        embedded = np.asarray(encoder.encode(prompts.filled(name)), np.float64)
        if embedded.ndim != 2 or embedded.shape[0] != len(prompts.templates):
            raise FormatError(
                f"encoder returned shape {embedded.shape} for class {name!r}")
        mean = embedded.mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm == 0.0:
            raise FormatError(f"class {name!r} averaged to a zero embedding")
        rows.append(mean / norm)
    return np.stack(rows).astype(np.float32)


def export_text_embeddings(prompts: PromptSet, encoder: TextEncoder,
                           out_path) -> np.ndarray:
    """Write the (C, N) embedding matrix to out_path; returns the matrix."""
    matrix = class_embeddings(prompts, encoder)
    write_npy(matrix, out_path)
    return matrix
