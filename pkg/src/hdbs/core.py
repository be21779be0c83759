"""Per-slot domain types and formulas shared by every scheme.

Everything here is a pure function of value types. The vectorized helpers at
the bottom mirror the scalar ones and are what the simulators use on whole
traces.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


def _check_finite_nonneg(name: str, value: float) -> None:
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


class NetworkState(enum.IntEnum):
    """Which of the three half-duplex states the network is in for a slot."""

    SILENT = 0
    UPLINK = 1
    DOWNLINK = 2

    @property
    def q1(self) -> int:
        return int(self is NetworkState.UPLINK)

    @property
    def qB(self) -> int:
        return int(self is NetworkState.DOWNLINK)


@dataclass(frozen=True)
class SlotGains:
    """Normalized magnitude-squared gains (|h|^2 / noise) of both links."""

    gamma1: float
    gammaB: float

    def __post_init__(self):
        _check_finite_nonneg("gamma1", self.gamma1)
        _check_finite_nonneg("gammaB", self.gammaB)


@dataclass(frozen=True)
class DiscreteRateSet:
    """Strictly increasing set of positive transmission rates (bits/symbol)."""

    rates: tuple

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        if not rates:
            raise ValueError("rate set must not be empty")
        if any(not math.isfinite(r) or r <= 0 for r in rates):
            raise ValueError("rates must be finite and > 0")
        if any(b <= a for a, b in zip(rates, rates[1:])):
            raise ValueError("rates must be strictly increasing")
        object.__setattr__(self, "rates", rates)

    @classmethod
    def ladder(cls, levels: int, step: float) -> "DiscreteRateSet":
        """Rates ``step, 2*step, ..., levels*step``."""
        if levels < 1:
            raise ValueError("levels must be >= 1")
        return cls(tuple(k * step for k in range(1, levels + 1)))

    def __len__(self) -> int:
        return len(self.rates)

    def __getitem__(self, idx: int) -> float:
        return self.rates[idx]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.rates, dtype=float)


@dataclass(frozen=True)
class SlotDecision:
    state: NetworkState
    power: float = 0.0
    rate: float = 0.0
    rate_index: Optional[int] = None
    outage: bool = False

    @property
    def q1(self) -> int:
        return self.state.q1

    @property
    def qB(self) -> int:
        return self.state.qB


@dataclass(frozen=True)
class SelectionMetrics:
    lambda1: float
    lambdaB: float


def capacity(power: float, gain: float) -> float:
    """Shannon capacity ``log2(1 + power * gain)`` in bits/symbol."""
    _check_finite_nonneg("power", power)
    _check_finite_nonneg("gain", gain)
    return math.log2(1.0 + power * gain)


def select_state(metrics: SelectionMetrics) -> NetworkState:
    """Three-way state selection from the two link metrics.

    Uplink wins ties (``lambda1 == lambdaB > 0``).

    >>> select_state(SelectionMetrics(0.2, 0.2))
    <NetworkState.UPLINK: 1>
    """
    l1, lB = metrics.lambda1, metrics.lambdaB
    if not (math.isfinite(l1) and math.isfinite(lB)):
        raise ValueError("selection metrics must be finite")
    if l1 >= lB and l1 > 0:
        return NetworkState.UPLINK
    if lB > l1 and lB > 0:
        return NetworkState.DOWNLINK
    return NetworkState.SILENT


def discrete_supportable(power: float, gain: float, rate: float) -> bool:
    """True iff the channel at this power carries ``rate`` without outage."""
    if rate <= 0:
        raise ValueError("rate must be > 0")
    return math.log2(1.0 + power * gain) >= rate


def best_discrete_rate(power: float, gain: float,
                       rates: DiscreteRateSet) -> tuple[float, Optional[int]]:
    """Largest supportable rate in ``rates`` and its index, or ``(0.0, None)``."""
    cap = math.log2(1.0 + power * gain)
    # number of rates <= cap; exact comparison, no epsilon
    idx = int(np.searchsorted(rates.as_array(), cap, side="right")) - 1
    if idx < 0:
        return 0.0, None
    return rates[idx], idx


# ---------------------------------------------------------------------------
# vectorized counterparts
# ---------------------------------------------------------------------------

def capacities(power, gain) -> np.ndarray:
    return np.log2(1.0 + np.asarray(power, dtype=float) * np.asarray(gain, dtype=float))


def select_states(lambda1: np.ndarray, lambdaB: np.ndarray) -> np.ndarray:
    """Vectorized :func:`select_state`; returns int8 codes of :class:`NetworkState`."""
    up = (lambda1 >= lambdaB) & (lambda1 > 0)
    down = (lambdaB > lambda1) & (lambdaB > 0)
    state = np.zeros(np.shape(lambda1), dtype=np.int8)
    state[up] = NetworkState.UPLINK
    state[down] = NetworkState.DOWNLINK
    return state


def best_discrete_rates(cap: np.ndarray, rates: Sequence[float] | np.ndarray):
    """Per-slot largest supportable rate and its index (-1 when none)."""
    table = np.asarray(rates, dtype=float)
    idx = np.searchsorted(table, cap, side="right") - 1
    value = np.where(idx >= 0, table[np.maximum(idx, 0)], 0.0)
    return value, idx
