"""Per-slot scheduling decisions for the adaptive-power, fixed-power and
discrete-rate schemes, plus vectorized simulation over whole traces.

Every scheme follows the same pipeline: link powers -> link metrics ->
three-way state selection. Link metrics are a weighted rate minus the
power price, ``w_k * r_k - zeta_k * P_k`` with ``w_1 = mu`` and
``w_B = 1 - mu``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (DiscreteRateSet, NetworkState, SelectionMetrics, SlotDecision,
                   SlotGains, best_discrete_rate, best_discrete_rates, select_state,
                   select_states)

LN2 = math.log(2.0)


class Scheme(str, enum.Enum):
    ADAPTIVE = "adaptive"
    FIXED = "fixed"
    DISCRETE = "discrete"


class Link(str, enum.Enum):
    UP = "1"
    DOWN = "B"


@dataclass(frozen=True)
class SchemeConfig:
    scheme: Scheme
    rates1: Optional[DiscreteRateSet] = None
    ratesB: Optional[DiscreteRateSet] = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.scheme is Scheme.DISCRETE and (self.rates1 is None or self.ratesB is None):
            raise ValueError("discrete scheme needs both rate sets")

    @classmethod
    def adaptive(cls) -> "SchemeConfig":
        return cls(Scheme.ADAPTIVE)

    @classmethod
    def fixed(cls) -> "SchemeConfig":
        return cls(Scheme.FIXED)

    @classmethod
    def discrete(cls, rates1: DiscreteRateSet,
                 ratesB: Optional[DiscreteRateSet] = None) -> "SchemeConfig":
        return cls(Scheme.DISCRETE, rates1, ratesB if ratesB is not None else rates1)

    def rates(self, link: Link) -> Optional[DiscreteRateSet]:
        return self.rates1 if Link(link) is Link.UP else self.ratesB


@dataclass(frozen=True)
class DualState:
    """Power prices, fixed powers and the uplink weight ``mu``."""

    zeta1: float
    zetaB: float
    p1: float = 0.0
    pB: float = 0.0
    mu: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.mu <= 1.0):
            raise ValueError(f"mu out of [0,1]: {self.mu}")
        for name in ("zeta1", "zetaB", "p1", "pB"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")

    def weight(self, link: Link) -> float:
        return self.mu if Link(link) is Link.UP else 1.0 - self.mu

    def zeta(self, link: Link) -> float:
        return self.zeta1 if Link(link) is Link.UP else self.zetaB

    def power(self, link: Link) -> float:
        return self.p1 if Link(link) is Link.UP else self.pB


def waterfill_power(gain: float, weight: float, zeta: float) -> float:
    """Per-slot power maximizing ``weight*log2(1+P*gain) - zeta*P`` over P >= 0.

    Positive only when ``gain > zeta*ln2/weight``; then it is the water level
    ``weight/(zeta*ln2)`` minus ``1/gain``.
    """
    if not zeta > 0:
        raise ValueError("zeta must be > 0 for water-filling (power is unbounded otherwise)")
    if gain <= 0 or weight <= 0:
        return 0.0
    return max(0.0, weight / (zeta * LN2) - 1.0 / gain)


def _decision(metrics: SelectionMetrics, up: tuple, down: tuple) -> SlotDecision:
    state = select_state(metrics)
    if state is NetworkState.UPLINK:
        return SlotDecision(state, up[0], up[1], up[2], outage=False)
    if state is NetworkState.DOWNLINK:
        return SlotDecision(state, down[0], down[1], down[2], outage=False)
    return SlotDecision(NetworkState.SILENT, 0.0, 0.0, None, outage=False)


def decide_adaptive(gains: SlotGains, dual: DualState) -> SlotDecision:
    w1, wB = dual.mu, 1.0 - dual.mu
    p1 = waterfill_power(gains.gamma1, w1, dual.zeta1)
    pB = waterfill_power(gains.gammaB, wB, dual.zetaB)
    c1 = math.log2(1.0 + p1 * gains.gamma1)
    cB = math.log2(1.0 + pB * gains.gammaB)
    metrics = SelectionMetrics(w1 * c1 - dual.zeta1 * p1, wB * cB - dual.zetaB * pB)
    return _decision(metrics, (p1, c1, None), (pB, cB, None))


def decide_fixed(gains: SlotGains, dual: DualState) -> SlotDecision:
    w1, wB = dual.mu, 1.0 - dual.mu
    c1 = math.log2(1.0 + dual.p1 * gains.gamma1)
    cB = math.log2(1.0 + dual.pB * gains.gammaB)
    metrics = SelectionMetrics(w1 * c1 - dual.zeta1 * dual.p1, wB * cB - dual.zetaB * dual.pB)
    return _decision(metrics, (dual.p1, c1, None), (dual.pB, cB, None))


def decide_discrete(gains: SlotGains, dual: DualState, rates1: DiscreteRateSet,
                    ratesB: DiscreteRateSet) -> SlotDecision:
    """Discrete-rate decision; a silent slot is an outage on both links."""
    u, iu = best_discrete_rate(dual.p1, gains.gamma1, rates1)
    d, idn = best_discrete_rate(dual.pB, gains.gammaB, ratesB)
    metrics = SelectionMetrics(dual.mu * u - dual.zeta1 * dual.p1,
                               (1.0 - dual.mu) * d - dual.zetaB * dual.pB)
    state = select_state(metrics)
    if state is NetworkState.UPLINK:
        return SlotDecision(state, dual.p1, u, iu, outage=iu is None)
    if state is NetworkState.DOWNLINK:
        return SlotDecision(state, dual.pB, d, idn, outage=idn is None)
    return SlotDecision(NetworkState.SILENT, 0.0, 0.0, None, outage=True)


def decide(gains: SlotGains, dual: DualState, config: SchemeConfig) -> SlotDecision:
    if config.scheme is Scheme.ADAPTIVE:
        return decide_adaptive(gains, dual)
    if config.scheme is Scheme.FIXED:
        return decide_fixed(gains, dual)
    return decide_discrete(gains, dual, config.rates1, config.ratesB)


# ---------------------------------------------------------------------------
# vectorized path
# ---------------------------------------------------------------------------

@dataclass
class LinkMetric:
    """One link's per-slot quantities for a whole trace."""

    lam: np.ndarray
    power: np.ndarray
    rate: np.ndarray
    index: Optional[np.ndarray] = None


def waterfill_powers(gain: np.ndarray, weight: float, zeta: float) -> np.ndarray:
    if not zeta > 0:
        raise ValueError("zeta must be > 0 for water-filling (power is unbounded otherwise)")
    if weight <= 0:
        return np.zeros_like(gain)
    with np.errstate(divide="ignore"):
        inv = 1.0 / gain
    return np.maximum(0.0, weight / (zeta * LN2) - inv)


def link_metric(gamma: np.ndarray, weight: float, zeta: float, config: SchemeConfig,
                link: Link, p_fixed: float = 0.0,
                cap: Optional[np.ndarray] = None) -> LinkMetric:
    """Metric, power and rate of one link over a trace.

    ``cap`` may carry precomputed ``log2(1 + p_fixed*gamma)`` for the
    fixed-power schemes; calibration loops reuse it across price updates.
    """
    if config.scheme is Scheme.ADAPTIVE:
        power = waterfill_powers(gamma, weight, zeta)
        rate = np.log2(1.0 + power * gamma)
        return LinkMetric(weight * rate - zeta * power, power, rate)
    if cap is None:
        cap = np.log2(1.0 + p_fixed * gamma)
    power = np.full(gamma.shape, float(p_fixed))
    if config.scheme is Scheme.FIXED:
        return LinkMetric(weight * cap - zeta * p_fixed, power, cap)
    rate, idx = best_discrete_rates(cap, config.rates(link).rates)
    return LinkMetric(weight * rate - zeta * p_fixed, power, rate, idx)


@dataclass
class Decisions:
    state: np.ndarray
    power1: np.ndarray
    powerB: np.ndarray
    rate1: np.ndarray
    rateB: np.ndarray
    out1: Optional[np.ndarray] = None
    outB: Optional[np.ndarray] = None


@dataclass(frozen=True)
class RunStats:
    """Long-run averages of one simulated trace."""

    n: int
    r1: float
    rB: float
    p1: float
    pB: float
    silent: int
    outage1: Optional[int] = None
    outageB: Optional[int] = None

    def weighted(self, mu: float) -> float:
        return mu * self.r1 + (1.0 - mu) * self.rB

    @property
    def sum_rate(self) -> float:
        return self.r1 + self.rB


def combine(m1: LinkMetric, mB: LinkMetric, discrete: bool = False) -> Decisions:
    state = select_states(m1.lam, mB.lam)
    q1 = state == NetworkState.UPLINK
    qB = state == NetworkState.DOWNLINK
    out = Decisions(state, np.where(q1, m1.power, 0.0), np.where(qB, mB.power, 0.0),
                    np.where(q1, m1.rate, 0.0), np.where(qB, mB.rate, 0.0))
    if discrete:
        silent = state == NetworkState.SILENT
        out.out1 = (q1 & (m1.index < 0)) | silent
        out.outB = (qB & (mB.index < 0)) | silent
    return out


def simulate(gamma1: np.ndarray, gammaB: np.ndarray, config: SchemeConfig,
             dual: DualState) -> Decisions:
    """Decisions for every slot of a trace under a frozen dual state."""
    m1 = link_metric(gamma1, dual.mu, dual.zeta1, config, Link.UP, dual.p1)
    mB = link_metric(gammaB, 1.0 - dual.mu, dual.zetaB, config, Link.DOWN, dual.pB)
    return combine(m1, mB, config.scheme is Scheme.DISCRETE)


def run_stats(dec: Decisions) -> RunStats:
    n = len(dec.state)
    return RunStats(
        n=n,
        r1=float(dec.rate1.mean()), rB=float(dec.rateB.mean()),
        p1=float(dec.power1.mean()), pB=float(dec.powerB.mean()),
        silent=int(np.count_nonzero(dec.state == NetworkState.SILENT)),
        outage1=None if dec.out1 is None else int(np.count_nonzero(dec.out1)),
        outageB=None if dec.outB is None else int(np.count_nonzero(dec.outB)),
    )


def evaluate(trace, config: SchemeConfig, dual: DualState) -> RunStats:
    """Simulate ``trace`` and reduce to long-run averages."""
    return run_stats(simulate(trace.gamma1, trace.gammaB, config, dual))
