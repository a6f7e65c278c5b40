"""Dense tensor containers and their NPY v1.0 file interchange.

This module is the data boundary of the engine: everything arriving from an
exporter comes through :func:`load_tensor`, everything leaving goes through
:func:`save_tensor`. Files are NPY version 1.0 with element type ``<f4``
(real grids) or ``|u1`` (label masks), C order, little endian. Label masks
may alternatively be 8-bit grayscale PNGs with the same value convention.

Containers are immutable after construction and validate their invariants
eagerly, so a loaded tensor is safe to share across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
from numpy.lib import format as npy_format

from .errors import FormatError, IoError, ShapeError, ValidationError

REAL_DTYPE = np.dtype("<f4")
MASK_DTYPE = np.dtype("|u1")
MASK_VALUES = (0, 1, 255)


def _require_finite(data: np.ndarray, what: str) -> None:
    if not np.isfinite(data).all():
        raise ValidationError(f"{what} contains non-finite values")


@dataclass(frozen=True, eq=False)
class LogitsMap:
    """Per-pixel class logits, shape (C, H, W) with C >= 2, all finite."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 3:
            raise ValidationError(f"logits must be 3-D (C,H,W), got shape {arr.shape}")
        if arr.shape[0] < 2 or arr.shape[1] < 1 or arr.shape[2] < 1:
            raise ValidationError(f"logits need C>=2 and H,W>=1, got shape {arr.shape}")
        _require_finite(arr, "logits")
        object.__setattr__(self, "data", arr)

    @property
    def class_count(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """Backbone feature volume, shape (N, H, W), all finite."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 3:
            raise ValidationError(f"features must be 3-D (N,H,W), got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValidationError(f"features need all dims >= 1, got shape {arr.shape}")
        _require_finite(arr, "features")
        object.__setattr__(self, "data", arr)

    @property
    def embed_dim(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """Per-class text embeddings, shape (C, N); rows act as 1x1 conv weights.

    All-zero rows are rejected: such a class would project every pixel to a
    constant 0 and silently poison cosine normalization.
    """

    data: np.ndarray
    class_names: Optional[tuple] = None

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValidationError(f"embeddings must be 2-D (C,N), got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValidationError(f"embeddings need all dims >= 1, got shape {arr.shape}")
        _require_finite(arr, "embeddings")
        if np.any(~arr.any(axis=1)):
            rows = np.flatnonzero(~arr.any(axis=1)).tolist()
            raise ValidationError(f"embedding rows {rows} are all-zero")
        names = self.class_names
        if names is not None:
            names = tuple(str(n) for n in names)
            if len(names) != arr.shape[0]:
                raise ValidationError(
                    f"{len(names)} class names for {arr.shape[0]} embedding rows")
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "class_names", names)

    @property
    def class_count(self) -> int:
        return self.data.shape[0]

    @property
    def embed_dim(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class AnomalyScoreMap:
    """Per-pixel anomaly scores, shape (H, W); higher = more anomalous.

    Keeps float64 data as-is (scores are computed in double precision);
    anything else is converted to float64. Saved to disk as float32.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float64)
        if arr.ndim != 2:
            raise ValidationError(f"score map must be 2-D (H,W), got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValidationError(f"score map needs H,W >= 1, got shape {arr.shape}")
        _require_finite(arr, "score map")
        object.__setattr__(self, "data", arr)

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True, eq=False)
class LabelMask:
    """Ground-truth labels, shape (H, W): 0 inlier, 1 anomaly, 255 ignore."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ValidationError(f"label mask must be 2-D (H,W), got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValidationError(f"label mask needs H,W >= 1, got shape {arr.shape}")
        if not np.isin(arr, MASK_VALUES).all():
            bad = sorted(set(np.unique(arr).tolist()) - set(MASK_VALUES))
            raise ValidationError(f"label mask holds illegal values {bad}")
        object.__setattr__(self, "data", arr.astype(np.uint8, copy=False))

    @property
    def shape(self):
        return self.data.shape


Tensor = Union[LogitsMap, FeatureMap, EmbeddingMatrix, AnomalyScoreMap, LabelMask]

_KINDS = {
    "logits": LogitsMap,
    "feature": FeatureMap,
    "embedding": EmbeddingMatrix,
    "score": AnomalyScoreMap,
    "mask": LabelMask,
}


def _read_npy(path: Path) -> np.ndarray:
    try:
        fp = open(path, "rb")
    except OSError as exc:
        raise IoError(f"cannot open {path}: {exc}") from exc
    with fp:
        try:
            version = npy_format.read_magic(fp)
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from exc
        if version != (1, 0):
            raise FormatError(f"{path}: unsupported NPY version {version}, need 1.0")
        try:
            shape, fortran_order, dtype = npy_format.read_array_header_1_0(fp)
        except ValueError as exc:
            raise FormatError(f"{path}: malformed header: {exc}") from exc
        if fortran_order:
            raise FormatError(f"{path}: fortran_order payloads are not supported")
        if dtype not in (REAL_DTYPE, MASK_DTYPE):
            raise FormatError(f"{path}: unsupported element type {dtype!r}")
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        data = np.fromfile(fp, dtype=dtype, count=count)
        if data.size != count:
            raise FormatError(
                f"{path}: payload holds {data.size} elements, header declares {count}")
        if fp.read(1):
            raise FormatError(f"{path}: trailing bytes after the declared payload")
    return data.reshape(shape)


def _read_png_mask(path: Path) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as img:
            if img.mode not in ("L", "P"):
                raise FormatError(
                    f"{path}: mask PNG must be 8-bit grayscale, got mode {img.mode}")
            arr = np.asarray(img)
    except UnidentifiedImageError as exc:
        raise FormatError(f"{path}: not a PNG image: {exc}") from exc
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if arr.ndim != 2 or arr.dtype != np.uint8:
        raise FormatError(f"{path}: mask PNG decoded to {arr.dtype} {arr.shape}")
    return arr


def load_tensor(path, kind: str) -> Tensor:
    """Load one tensor from an NPY file (or PNG, for masks).

    ``kind`` names the expected container: logits, feature, embedding,
    score, or mask. Shape and values always come from the file itself;
    a file whose element type does not match the kind is a FormatError,
    non-finite or illegal values are a ValidationError.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown tensor kind {kind!r}")
    path = Path(path)
    if kind == "mask" and path.suffix.lower() == ".png":
        data = _read_png_mask(path)
    else:
        data = _read_npy(path)
    want = MASK_DTYPE if kind == "mask" else REAL_DTYPE
    if data.dtype != want:
        raise FormatError(
            f"{path}: element type {data.dtype!r} does not match kind {kind!r}")
    return _KINDS[kind](data)


def load_mask(path) -> LabelMask:
    """Shorthand for ``load_tensor(path, "mask")`` (handles .npy and .png)."""
    return load_tensor(path, "mask")


def save_tensor(tensor: Tensor, path) -> None:
    """Write a tensor as an NPY v1.0 file loadable by :func:`load_tensor`.

    Float64 score maps are cast to the float32 interchange type; every
    other container already holds its interchange dtype.
    """
    data = tensor.data
    if isinstance(tensor, LabelMask):
        out = np.ascontiguousarray(data, dtype=MASK_DTYPE)
    else:
        out = np.ascontiguousarray(data, dtype=REAL_DTYPE)
    path = Path(path)
    try:
        with open(path, "wb") as fp:
            npy_format.write_array(fp, out, version=(1, 0), allow_pickle=False)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def validate_pair(score: AnomalyScoreMap, mask: LabelMask) -> None:
    """Check that a score map and a label mask cover the same H x W grid."""
    if score.data.shape != mask.data.shape:
        raise ShapeError(
            f"score map {score.data.shape} does not match mask {mask.data.shape}",
            score.data.shape, mask.data.shape)
