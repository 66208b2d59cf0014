"""Delay-embedding parameter estimation and trajectory reconstruction.

The delay tau comes from the first local minimum of the average mutual
information (AMI) between a channel and its lagged copy; the dimension m
comes from the false-nearest-neighbors criterion.  Both estimators run
once per channel on the full trial, and every window of that channel
reuses the same parameters so recurrence plots stay size-aligned across
windows.

AMI uses a plug-in histogram estimate over 16 equal-width bins.  Finite
sampling biases such a histogram away from zero even for independent
variables, so "the AMI has reached its minimum" is judged against the
first-order chi-square bias floor (bins-1)^2 / (2 n) rather than against
zero, and plateau-shaped minima are resolved to the midpoint of their
basin instead of to whichever lag float jitter happens to favor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateInputError, InputError

__all__ = [
    "EmbeddingParams",
    "EmbeddedTrajectory",
    "DimensionEstimate",
    "ami_curve",
    "estimate_delay",
    "estimate_dimension",
    "embed",
]

#: Histogram bins for the AMI estimate.
AMI_BINS = 16
#: Smallest signal the delay estimator accepts.
MIN_DELAY_SAMPLES = 64
#: Largest embedding dimension the FNN scan will try.
DEFAULT_M_MAX = 10
#: Kennel criteria: relative growth and absolute size thresholds.
FNN_RTOL = 10.0
FNN_ATOL = 2.0
#: A dimension is accepted once the false-neighbor fraction drops below this.
FNN_THRESHOLD = 0.05


@dataclass(frozen=True)
class EmbeddingParams:
    """Delay (in samples) and dimension of a phase-space reconstruction."""

    delay_tau: int
    dimension_m: int

    def __post_init__(self) -> None:
        if self.delay_tau < 1:
            raise InputError(f"delay_tau must be >= 1, got {self.delay_tau}")
        if self.dimension_m < 1:
            raise InputError(f"dimension_m must be >= 1, got {self.dimension_m}")


@dataclass(frozen=True)
class EmbeddedTrajectory:
    """Reconstructed state sequence of one channel.

    ``states`` has shape (N, m) with N = L - (m-1)*tau; row i is
    (s_i, s_{i+tau}, ..., s_{i+(m-1)tau}).
    """

    states: np.ndarray
    source_channel: str
    params: EmbeddingParams


class DimensionEstimate(NamedTuple):
    dimension: int
    saturated: bool


def _as_signal(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise InputError("signal contains non-finite values")
    return x


def _bin_codes(x: np.ndarray, bins: int) -> np.ndarray:
    lo = x.min()
    width = x.max() - lo
    return np.minimum((x - lo) * (bins / width), bins - 1).astype(np.int64)


def ami_curve(samples, tau_max: int, bins: int = AMI_BINS) -> np.ndarray:
    """Average mutual information (nats) between x(t) and x(t+k), k=1..tau_max.

    The estimate is the plug-in MI of the joint histogram over ``bins``
    equal-width bins spanning the sample range.
    """
    x = _as_signal(samples)
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("AMI of a constant signal is undefined")
    if tau_max >= x.size:
        raise InputError(f"tau_max {tau_max} must be below the signal length {x.size}")
    codes = _bin_codes(x, bins)
    out = np.empty(tau_max)
    for k in range(1, tau_max + 1):
        a = codes[:-k]
        b = codes[k:]
        joint = np.bincount(a * bins + b, minlength=bins * bins).astype(float)
        joint /= a.size
        pa = joint.reshape(bins, bins).sum(axis=1)
        pb = joint.reshape(bins, bins).sum(axis=0)
        denom = np.outer(pa, pb).ravel()
        nz = joint > 0.0
        out[k - 1] = float(np.sum(joint[nz] * np.log(joint[nz] / denom[nz])))
    return out


def estimate_delay(samples, tau_max: int | None = None, bins: int = AMI_BINS) -> int:
    """Embedding delay: lag of the first local minimum of the AMI curve.

    Scans lags 1..tau_max (default: length/4).  A minimum that sits at
    the histogram bias floor is reported at the first lag reaching the
    floor; a plateau-shaped minimum is reported at its basin midpoint
    (basin = contiguous lags within 2% of the AMI range above the
    minimum).  If the curve decays without any local minimum, the first
    lag where AMI drops below AMI(1)/e is used; failing that, tau = 1.
    """
    x = _as_signal(samples)
    if x.size < MIN_DELAY_SAMPLES:
        raise DegenerateInputError(
            f"delay estimation needs >= {MIN_DELAY_SAMPLES} samples, got {x.size}"
        )
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("cannot estimate a delay for a constant signal")
    if tau_max is None:
        tau_max = max(2, x.size // 4)
    tau_max = min(tau_max, x.size - 1)
    v = ami_curve(x, tau_max, bins)

    # Independence-level AMI for this sample size (chi-square bias of the
    # plug-in histogram estimate); curves at or below twice this floor
    # carry no dependence structure worth waiting for.
    floor = (bins - 1) ** 2 / (2.0 * (x.size - 1))
    if v[0] <= 2.0 * floor:
        return 1

    interior = np.nonzero(
        (v[1:-1] <= v[:-2]) & (v[1:-1] <= v[2:])
    )[0]
    if interior.size == 0:
        drops = np.nonzero(v < v[0] / np.e)[0]
        return int(drops[0]) + 1 if drops.size else 1
    kstar = int(interior[0]) + 1  # 0-based index into v

    if v[kstar] <= 2.0 * floor:
        return int(np.nonzero(v <= 2.0 * floor)[0][0]) + 1

    level = v[kstar] + 0.02 * (v.max() - v.min())
    a = kstar
    while a > 0 and v[a - 1] <= level:
        a -= 1
    b = kstar
    while b + 1 < v.size and v[b + 1] <= level:
        b += 1
    return (a + b) // 2 + 1


def _fnn_fraction(x: np.ndarray, m: int, tau: int, rtol: float, atol: float) -> float:
    """Kennel false-neighbor fraction when growing dimension m -> m+1."""
    n_usable = x.size - m * tau
    states = np.stack([x[i * tau : i * tau + n_usable] for i in range(m)], axis=1)
    ahead = x[m * tau : m * tau + n_usable]
    tree = cKDTree(states)
    dist, idx = tree.query(states, k=2)
    dist = dist[:, 1]
    neighbor = idx[:, 1]
    extra = np.abs(ahead - ahead[neighbor])
    scale = x.std()
    # Exact repeats of periodic signals give dist ~ 0 with extra at float
    # noise; those are true recurrences, not false neighbors, so the
    # relative criterion also demands growth above machine noise.
    noise_floor = 1e-9 * scale
    crit_rel = (extra > rtol * dist) & (extra > noise_floor)
    crit_abs = np.sqrt(dist**2 + extra**2) > atol * scale
    return float(np.mean(crit_rel | crit_abs))


def estimate_dimension(
    samples,
    tau: int,
    m_max: int = DEFAULT_M_MAX,
    rtol: float = FNN_RTOL,
    atol: float = FNN_ATOL,
    threshold: float = FNN_THRESHOLD,
) -> DimensionEstimate:
    """Embedding dimension via false nearest neighbors.

    Returns the smallest m in 1..m_max whose false-neighbor fraction
    falls below ``threshold``; if none does, returns m_max with the
    saturation flag set (typical of noise-dominated signals).
    """
    x = _as_signal(samples)
    if tau < 1:
        raise InputError(f"tau must be >= 1, got {tau}")
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("cannot estimate a dimension for a constant signal")
    if x.size < m_max * tau + 2:
        raise DegenerateInputError(
            f"need more than {m_max * tau + 1} samples to scan dimensions "
            f"up to {m_max} at tau={tau}, got {x.size}"
        )
    for m in range(1, m_max + 1):
        if _fnn_fraction(x, m, tau, rtol, atol) < threshold:
            return DimensionEstimate(dimension=m, saturated=False)
    return DimensionEstimate(dimension=m_max, saturated=True)


def embed(samples, params: EmbeddingParams, source_channel: str = "") -> EmbeddedTrajectory:
    """Reconstruct the delay-embedded trajectory of one channel."""
    x = _as_signal(samples)
    tau, m = params.delay_tau, params.dimension_m
    n_states = x.size - (m - 1) * tau
    if n_states < 2:
        raise InputError(
            f"cannot embed {x.size} samples with m={m}, tau={tau}: "
            f"would yield {n_states} states, need >= 2"
        )
    states = np.stack([x[i * tau : i * tau + n_states] for i in range(m)], axis=1)
    return EmbeddedTrajectory(states=states, source_channel=source_channel, params=params)
