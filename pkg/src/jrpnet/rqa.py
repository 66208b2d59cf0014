"""Recurrence quantification: determinism and laminarity.

Determinism is the fraction of recurrence points lying on diagonal lines
of length at least ``l_min``; laminarity is the same for vertical lines
and ``v_min``.  Both exclude the main diagonal (the trivial line of
identity) from numerator and denominator, which matters doubly for joint
plots whose diagonal is always full.  Lines cut off by the matrix border
count at their truncated length.

Computed on a joint recurrence plot these are the joint determinism and
joint laminarity used as coupling weights downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .recurrence import RecurrenceMatrix

__all__ = [
    "RqaSummary",
    "determinism",
    "laminarity",
    "recurrence_rate",
    "mean_diagonal_length",
    "mean_vertical_length",
    "summarize",
]

DEFAULT_L_MIN = 3
DEFAULT_V_MIN = 3


@dataclass(frozen=True)
class RqaSummary:
    """Determinism, laminarity and density of one recurrence matrix."""

    det: float
    lam: float
    recurrence_rate: float
    l_min: int
    v_min: int


def _bits(matrix: RecurrenceMatrix | np.ndarray) -> np.ndarray:
    bits = matrix.bits if isinstance(matrix, RecurrenceMatrix) else np.asarray(matrix)
    if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
        raise InputError("recurrence matrix must be square")
    return bits.astype(bool)


def _run_lengths(chunks: list[np.ndarray]) -> np.ndarray:
    """Lengths of all maximal 1-runs across the given binary vectors."""
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    sep = np.zeros(1, dtype=np.int8)
    parts: list[np.ndarray] = [sep]
    for chunk in chunks:
        parts.append(chunk.astype(np.int8))
        parts.append(sep)
    flat = np.concatenate(parts)
    edges = np.diff(flat)
    starts = np.nonzero(edges == 1)[0]
    ends = np.nonzero(edges == -1)[0]
    return ends - starts


def _diagonal_runs(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[0]
    # Shear the matrix so each diagonal becomes a column (diagonal j-i = d
    # lands in column d+n-1, contiguous along rows), then scan all columns
    # in one pass; the middle column is the main diagonal and is dropped.
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    sheared = np.zeros((n, 2 * n - 1), dtype=bool)
    sheared[np.broadcast_to(i, (n, n)), j - i + n - 1] = bits
    sheared[:, n - 1] = False
    stacked = np.vstack([sheared, np.zeros((1, 2 * n - 1), dtype=bool)])
    return _run_lengths([stacked.ravel(order="F")])


def _vertical_runs(bits: np.ndarray) -> np.ndarray:
    masked = bits.copy()
    np.fill_diagonal(masked, False)
    n = masked.shape[0]
    # Append a zero row and flatten column-major so each column ends in a
    # separator; all columns can then be scanned in one pass.
    stacked = np.vstack([masked, np.zeros((1, n), dtype=bool)])
    return _run_lengths([stacked.ravel(order="F")])


def _off_diagonal_total(bits: np.ndarray) -> int:
    return int(bits.sum()) - int(np.diagonal(bits).sum())


def determinism(matrix: RecurrenceMatrix | np.ndarray, l_min: int = DEFAULT_L_MIN) -> float:
    """Fraction of off-diagonal recurrence points on diagonal lines of
    length >= l_min; 0 when no off-diagonal points exist."""
    if l_min < 2:
        raise InputError(f"l_min must be >= 2, got {l_min}")
    bits = _bits(matrix)
    total = _off_diagonal_total(bits)
    if total == 0:
        return 0.0
    runs = _diagonal_runs(bits)
    return float(runs[runs >= l_min].sum()) / total


def laminarity(matrix: RecurrenceMatrix | np.ndarray, v_min: int = DEFAULT_V_MIN) -> float:
    """Fraction of off-diagonal recurrence points on vertical lines of
    length >= v_min; main-diagonal points are removed before runs form."""
    if v_min < 2:
        raise InputError(f"v_min must be >= 2, got {v_min}")
    bits = _bits(matrix)
    total = _off_diagonal_total(bits)
    if total == 0:
        return 0.0
    runs = _vertical_runs(bits)
    return float(runs[runs >= v_min].sum()) / total


def recurrence_rate(matrix: RecurrenceMatrix | np.ndarray) -> float:
    """Off-diagonal density of the matrix."""
    bits = _bits(matrix)
    n = bits.shape[0]
    if n < 2:
        return 0.0
    return _off_diagonal_total(bits) / float(n * n - n)


def mean_diagonal_length(
    matrix: RecurrenceMatrix | np.ndarray, l_min: int = DEFAULT_L_MIN
) -> float:
    """Mean length of diagonal lines of length >= l_min (0 if none).

    Auxiliary reading of determinism as an average line length rather
    than a point fraction.
    """
    if l_min < 2:
        raise InputError(f"l_min must be >= 2, got {l_min}")
    runs = _diagonal_runs(_bits(matrix))
    runs = runs[runs >= l_min]
    return float(runs.mean()) if runs.size else 0.0


def mean_vertical_length(
    matrix: RecurrenceMatrix | np.ndarray, v_min: int = DEFAULT_V_MIN
) -> float:
    """Mean length of vertical lines of length >= v_min (0 if none)."""
    if v_min < 2:
        raise InputError(f"v_min must be >= 2, got {v_min}")
    runs = _vertical_runs(_bits(matrix))
    runs = runs[runs >= v_min]
    return float(runs.mean()) if runs.size else 0.0


def summarize(
    matrix: RecurrenceMatrix | np.ndarray,
    l_min: int = DEFAULT_L_MIN,
    v_min: int = DEFAULT_V_MIN,
) -> RqaSummary:
    """Bundle determinism, laminarity and recurrence rate of one matrix."""
    return RqaSummary(
        det=determinism(matrix, l_min),
        lam=laminarity(matrix, v_min),
        recurrence_rate=recurrence_rate(matrix),
        l_min=l_min,
        v_min=v_min,
    )
