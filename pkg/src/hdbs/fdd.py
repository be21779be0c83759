"""Static frequency-division benchmark.

The uplink gets a fraction ``mu`` of the band and the downlink ``1 - mu``;
each link concentrates its average power in its share, a gain of
``1/fraction`` against the same normalized channel (noise is not rescaled).
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

DEFAULT_RATE_GRID = np.geomspace(0.05, 20.0, 200)


def _fractions(mu: float) -> tuple:
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu out of [0,1]: {mu}")
    return mu, 1.0 - mu


def fdd_link_rate(gamma: np.ndarray, frac: float, pbar: float) -> float:
    """``frac * mean(log2(1 + (pbar/frac) * gamma))``; 0 for an empty band."""
    if frac <= 0:
        return 0.0
    # log2(frac + pbar*g) - log2(frac) does not overflow for tiny fractions
    g = np.asarray(gamma, dtype=float)
    return frac * float(np.mean(np.log2(frac + pbar * g) - math.log2(frac)))


def fdd_rate_pair(trace, mu: float, pbar1: float, pbarB: float) -> tuple:
    f1, fB = _fractions(mu)
    return (fdd_link_rate(trace.gamma1, f1, pbar1), fdd_link_rate(trace.gammaB, fB, pbarB))


def fdd_success(gamma: np.ndarray, frac: float, pbar: float, rate: float) -> np.ndarray:
    """Per-slot indicator that the boosted capacity carries ``rate``."""
    if frac <= 0:
        return np.zeros(np.shape(gamma), dtype=bool)
    return np.log2(1.0 + (pbar / frac) * np.asarray(gamma)) >= rate


def fdd_link_throughput(gamma: np.ndarray, frac: float, pbar: float, rate: float) -> float:
    if not rate > 0:
        raise ValueError("rate must be > 0")
    if frac <= 0:
        return 0.0
    return frac * rate * float(np.mean(fdd_success(gamma, frac, pbar, rate)))


def fdd_throughput_pair(trace, mu: float, pbar1: float, pbarB: float, rate1: float,
                        rateB: float) -> tuple:
    f1, fB = _fractions(mu)
    return (fdd_link_throughput(trace.gamma1, f1, pbar1, rate1),
            fdd_link_throughput(trace.gammaB, fB, pbarB, rateB))


def fdd_outage(gamma: np.ndarray, frac: float, pbar: float, rate: float) -> float:
    """Fraction of slots whose boosted capacity is below ``rate``."""
    return 1.0 - float(np.mean(fdd_success(gamma, frac, pbar, rate)))


def best_rate(gamma: np.ndarray, frac: float, pbar: float,
              grid: Sequence[float]) -> tuple:
    """Grid rate maximizing one link's throughput; returns ``(rate, throughput)``.

    Sorting the boosted capacities once gives every candidate's success
    count by a single ``searchsorted``. Ties go to the smaller rate.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("rate grid must not be empty")
    if np.any(~np.isfinite(grid)) or np.any(grid <= 0):
        raise ValueError("rate grid must be positive")
    if frac <= 0:
        return float(grid.min()), 0.0
    cap = np.sort(np.log2(1.0 + (pbar / frac) * np.asarray(gamma)))
    success = cap.size - np.searchsorted(cap, grid, side="left")
    thr = frac * grid * success / cap.size
    best = thr.max()
    j = int(np.flatnonzero(thr == best)[np.argmin(grid[thr == best])])
    return float(grid[j]), float(thr[j])


def fdd_optimize_rates(trace, mu: float, pbar1: float, pbarB: float,
                       grid: Optional[Sequence[float]] = None) -> tuple:
    """Per-link grid rates maximizing FDD throughput (the links decouple)."""
    grid = DEFAULT_RATE_GRID if grid is None else grid
    f1, fB = _fractions(mu)
    r1, _ = best_rate(trace.gamma1, f1, pbar1, grid)
    rB, _ = best_rate(trace.gammaB, fB, pbarB, grid)
    return r1, rB


def fdd_outage_closed_form(mean_gamma: float, frac: float, pbar: float, rate: float) -> float:
    """Rayleigh outage of one FDD link: ``1 - exp(-(2^R - 1) frac/(pbar mean))``."""
    if frac <= 0:
        return 1.0
    return 1.0 - math.exp(-(2.0 ** rate - 1.0) * frac / (pbar * mean_gamma))
