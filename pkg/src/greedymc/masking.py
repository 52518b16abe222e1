"""Observation-set bookkeeping: masks, densities, projections, serialization.

A mask is the set of matrix positions whose values are known.  Masks are
immutable; entries are kept as sorted flat (row-major) indices, which gives
deterministic iteration order for reproducible experiments.  The canonical
fill value outside the mask is exactly 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .numkit import as_matrix

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ObservationMask:
    """A set of observed (row, col) positions in an ``rows x cols`` grid."""

    rows: int
    cols: int
    flat: np.ndarray = field(repr=False)  # sorted unique row-major indices, int64

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ArgumentError("mask dimensions must be positive")
        flat = np.asarray(self.flat, dtype=np.int64).ravel()
        if flat.size:
            if flat.min() < 0 or flat.max() >= self.rows * self.cols:
                raise ArgumentError("mask entry out of range")
            if np.any(np.diff(flat) <= 0):
                raise ArgumentError("mask entries must be strictly sorted and unique")
        object.__setattr__(self, "flat", flat)

    @classmethod
    def from_pairs(cls, rows: int, cols: int, pairs) -> "ObservationMask":
        pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        if pairs.size:
            if pairs.min() < 0 or pairs[:, 0].max() >= rows or pairs[:, 1].max() >= cols:
                raise ArgumentError("mask pair out of range")
        flat = np.unique(pairs[:, 0] * cols + pairs[:, 1])
        if flat.size != pairs.shape[0]:
            raise ArgumentError("duplicate mask pairs")
        return cls(rows, cols, flat)

    @classmethod
    def full(cls, rows: int, cols: int) -> "ObservationMask":
        return cls(rows, cols, np.arange(rows * cols, dtype=np.int64))

    @classmethod
    def empty(cls, rows: int, cols: int) -> "ObservationMask":
        return cls(rows, cols, np.empty(0, dtype=np.int64))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ObservationMask):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and np.array_equal(
            self.flat, other.flat
        )

    @property
    def size(self) -> int:
        return int(self.flat.size)

    @property
    def density(self) -> float:
        """Fraction of the grid that is observed, in [0, 1]."""
        return self.flat.size / (self.rows * self.cols)

    def pairs(self) -> np.ndarray:
        """Entries as an (k, 2) array of (row, col), row-major sorted."""
        return np.column_stack(np.divmod(self.flat, self.cols))

    def boolean(self) -> np.ndarray:
        """Dense boolean indicator matrix of the mask."""
        out = np.zeros(self.rows * self.cols, dtype=bool)
        out[self.flat] = True
        return out.reshape(self.rows, self.cols)

    def complement(self) -> "ObservationMask":
        comp = np.setdiff1d(np.arange(self.rows * self.cols, dtype=np.int64), self.flat)
        return ObservationMask(self.rows, self.cols, comp)

    def issubset(self, other: "ObservationMask") -> bool:
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return np.isin(self.flat, other.flat, assume_unique=True).all()

    def remove(self, victims) -> "ObservationMask":
        """Return the mask minus ``victims`` (pairs or another mask).

        Victims that are in range but not currently in the mask are ignored
        (a debug diagnostic counts them); out-of-range victims raise.
        """
        if isinstance(victims, ObservationMask):
            if (victims.rows, victims.cols) != (self.rows, self.cols):
                raise ArgumentError("victim mask dimensions differ")
            victim_flat = victims.flat
        else:
            victim_flat = ObservationMask.from_pairs(self.rows, self.cols, victims).flat
        kept = np.setdiff1d(self.flat, victim_flat, assume_unique=True)
        ignored = victim_flat.size - (self.flat.size - kept.size)
        if ignored:
            log.debug("remove: %d of %d victims were not in the mask", ignored, victim_flat.size)
        return ObservationMask(self.rows, self.cols, kept)

    def to_lines(self) -> list[str]:
        """Serialize as one ``row,col`` ASCII line per entry, sorted."""
        return [f"{r},{c}" for r, c in self.pairs()]

    @classmethod
    def from_lines(cls, rows: int, cols: int, lines) -> "ObservationMask":
        pairs = []
        for line in lines:
            line = line.strip()
            if not line:
                continue
            try:
                r, c = line.split(",")
                pairs.append((int(r), int(c)))
            except ValueError as exc:
                raise ArgumentError(f"malformed mask line: {line!r}") from exc
        return cls.from_pairs(rows, cols, pairs)


def project(a, mask: ObservationMask) -> np.ndarray:
    """Copy of ``a`` with every entry outside the mask set to exactly 0."""
    mat = as_matrix(a)
    if mat.shape != (mask.rows, mask.cols):
        raise ArgumentError(
            f"matrix shape {mat.shape} does not match mask {(mask.rows, mask.cols)}"
        )
    out = np.zeros_like(mat)
    out.ravel()[mask.flat] = mat.ravel()[mask.flat]
    return out


@dataclass(frozen=True, eq=False)
class MaskedMatrix:
    """Matrix values known on a mask; entries off the mask are stored as 0."""

    values: np.ndarray
    mask: ObservationMask

    def __post_init__(self):
        object.__setattr__(self, "values", project(self.values, self.mask))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MaskedMatrix):
            return NotImplemented
        return self.mask == other.mask and np.array_equal(self.values, other.values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def observed(self) -> np.ndarray:
        """The observed values as a flat vector, in mask order."""
        return self.values.ravel()[self.mask.flat]
