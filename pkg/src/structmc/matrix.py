"""Dense matrices, observation masks, and the norms used throughout.

Matrices are plain float64 numpy arrays; :func:`as_matrix` is the validating
constructor (finite entries, positive dims) and freezes the result read-only
so validated payloads can be shared across threads without copies.
"""

from __future__ import annotations

import operator

import numpy as np

from .errors import DimensionMismatchError, NumericalError

__all__ = [
    "as_matrix",
    "ObservationMask",
    "project",
    "nuclear_norm",
    "frobenius_norm",
    "entrywise_l1",
]


def as_matrix(values) -> np.ndarray:
    """Coerce ``values`` to a frozen float64 2-D array with finite entries.

    Raises ValueError for ragged input, empty dimensions, or NaN/Inf entries.
    Validation happens here, at ingestion, so the solvers never feed a
    non-finite matrix to an SVD.
    """
    a = np.array(values, dtype=np.float64, order="C")
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got {a.ndim}-D input")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"matrix dimensions must be positive, got {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    a.setflags(write=False)
    return a


class ObservationMask:
    """The set of observed (row, col) index pairs of an n1 x n2 matrix.

    Stores both the explicit index set and a same-shape boolean lookup table,
    so membership tests during solver sweeps are O(1).  Instances are
    immutable.
    """

    def __init__(self, rows: int, cols: int, observed) -> None:
        rows = operator.index(rows)
        cols = operator.index(cols)
        if rows < 1 or cols < 1:
            raise ValueError(f"mask dimensions must be positive, got ({rows}, {cols})")
        lookup = np.zeros((rows, cols), dtype=bool)
        for pair in observed:
            i, j = pair
            i = operator.index(i)
            j = operator.index(j)
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"index ({i}, {j}) outside a {rows}x{cols} mask")
            if lookup[i, j]:
                raise ValueError(f"duplicate index pair ({i}, {j})")
            lookup[i, j] = True
        lookup.setflags(write=False)
        self._rows = rows
        self._cols = cols
        self._lookup = lookup

    @classmethod
    def from_lookup(cls, keep) -> "ObservationMask":
        """Build a mask from a boolean array (True = observed)."""
        keep = np.asarray(keep)
        if keep.ndim != 2 or keep.dtype != np.bool_:
            raise ValueError("lookup must be a 2-D boolean array")
        mask = cls.__new__(cls)
        mask._rows, mask._cols = keep.shape
        lookup = keep.copy()
        lookup.setflags(write=False)
        mask._lookup = lookup
        return mask

    @classmethod
    def full(cls, rows: int, cols: int) -> "ObservationMask":
        return cls.from_lookup(np.ones((rows, cols), dtype=bool))

    @classmethod
    def empty(cls, rows: int, cols: int) -> "ObservationMask":
        return cls.from_lookup(np.zeros((rows, cols), dtype=bool))

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return (self._rows, self._cols)

    @property
    def lookup(self) -> np.ndarray:
        """Read-only boolean table, True where observed."""
        return self._lookup

    @property
    def size(self) -> int:
        """Number of observed entries, |Omega|."""
        return int(self._lookup.sum())

    def indices(self) -> list[tuple[int, int]]:
        """Observed pairs in row-major order."""
        return [(int(i), int(j)) for i, j in np.argwhere(self._lookup)]

    def complement(self) -> "ObservationMask":
        """Mask of the unobserved entries; involutive."""
        return ObservationMask.from_lookup(~self._lookup)

    def __contains__(self, pair) -> bool:
        i, j = pair
        if not (0 <= i < self._rows and 0 <= j < self._cols):
            return False
        return bool(self._lookup[i, j])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ObservationMask):
            return NotImplemented
        return self.shape == other.shape and bool(
            np.array_equal(self._lookup, other._lookup)
        )

    def __hash__(self):
        return hash((self.shape, self._lookup.tobytes()))

    def __repr__(self) -> str:
        return f"ObservationMask({self._rows}x{self._cols}, observed={self.size})"


def _check_shape(m: np.ndarray, mask: ObservationMask) -> None:
    if m.shape != mask.shape:
        raise DimensionMismatchError(
            f"matrix shape {m.shape} does not match mask shape {mask.shape}"
        )


def project(m: np.ndarray, mask: ObservationMask) -> np.ndarray:
    """Keep entries inside the mask, zero the rest (the sampling projector)."""
    m = np.asarray(m, dtype=np.float64)
    _check_shape(m, mask)
    return np.where(mask.lookup, m, 0.0)


def nuclear_norm(m: np.ndarray) -> float:
    """Sum of singular values, from a full SVD."""
    try:
        s = np.linalg.svd(np.asarray(m, dtype=np.float64), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed while computing the nuclear norm: {exc}") from exc
    return float(s.sum())


def frobenius_norm(m: np.ndarray) -> float:
    """sqrt of the sum of squared entries."""
    return float(np.linalg.norm(np.asarray(m, dtype=np.float64), "fro"))


def entrywise_l1(m: np.ndarray) -> float:
    """Sum of absolute entries."""
    return float(np.abs(np.asarray(m, dtype=np.float64)).sum())
