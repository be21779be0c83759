"""Real-time estimators: price and fixed-power tracking, and the fairness
controllers that steer ``mu``.

All ``update_*`` functions mutate the :class:`EstimatorState` they are given
and return it, so they can be chained. ``est.slot`` holds the index ``i`` of
the slot being processed (1-based); :func:`run_online` advances it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import DiscreteRateSet, NetworkState, SlotDecision, SlotGains
from .schedulers import LN2, DualState, Link, Scheme, SchemeConfig, decide

# decisions never use a price below this (water-filling is unbounded at 0)
ZETA_DECISION_FLOOR = 1e-9


@dataclass(frozen=True)
class StepPolicy:
    """Step size ``delta0 * i**(-exponent)``."""

    delta0: float = 0.5
    exponent: float = 0.6

    def __post_init__(self):
        if not 0.0 < self.delta0 < 1.0:
            raise ValueError("delta0 must be in (0, 1)")
        if not 0.5 < self.exponent <= 1.0:
            raise ValueError("exponent must be in (0.5, 1]")

    def __call__(self, i: int) -> float:
        return self.delta0 * float(i) ** (-self.exponent)


TRACKER_POLICY = StepPolicy(0.5, 0.6)
MU_POLICY = StepPolicy(0.5, 0.51)


@dataclass
class EstimatorState:
    zeta1: float = 1.0
    zetaB: float = 1.0
    p1: float = 0.0
    pB: float = 0.0
    e1: float = 0.0
    eB: float = 0.0
    p1avg: float = 0.0
    pBavg: float = 0.0
    mu: float = 0.5
    r1avg: float = 0.0
    rBavg: float = 0.0
    slot: int = 0
    # previous-slot gains for the discrete window; None before slot 1
    prev_gamma1: Optional[float] = None
    prev_gammaB: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu out of [0,1]: {self.mu}")
        if self.slot < 0:
            raise ValueError("slot must be >= 0")

    def get(self, name: str, link: Link) -> float:
        return getattr(self, name + Link(link).value)

    def set(self, name: str, link: Link, value: float) -> None:
        setattr(self, name + Link(link).value, value)

    def dual(self) -> DualState:
        return DualState(max(self.zeta1, ZETA_DECISION_FLOOR), max(self.zetaB, ZETA_DECISION_FLOOR),
                         self.p1, self.pB, self.mu)


def _index(est: EstimatorState) -> int:
    if est.slot < 1:
        raise ValueError("est.slot must be >= 1 inside a slot")
    return est.slot


def _running(prev: float, sample: float, i: int) -> float:
    return ((i - 1) / i) * prev + sample / i


def _chosen(decision: SlotDecision, link: Link) -> bool:
    want = NetworkState.UPLINK if Link(link) is Link.UP else NetworkState.DOWNLINK
    return decision.state is want


def update_power_average(est: EstimatorState, decision: SlotDecision,
                         link: Link) -> EstimatorState:
    i = _index(est)
    sample = decision.power if _chosen(decision, link) else 0.0
    name = "p1avg" if Link(link) is Link.UP else "pBavg"
    setattr(est, name, _running(getattr(est, name), sample, i))
    return est


def update_rate_average(est: EstimatorState, decision: SlotDecision,
                        link: Link) -> EstimatorState:
    i = _index(est)
    sample = decision.rate if _chosen(decision, link) else 0.0
    name = "r1avg" if Link(link) is Link.UP else "rBavg"
    setattr(est, name, _running(getattr(est, name), sample, i))
    return est


def update_zeta(est: EstimatorState, pbar: float, policy: StepPolicy,
                link: Link) -> EstimatorState:
    """Projected dual ascent: the price rises while the link overspends."""
    if not pbar > 0:
        raise ValueError("pbar must be > 0")
    i = _index(est)
    avg = est.p1avg if Link(link) is Link.UP else est.pBavg
    est.set("zeta", link, max(0.0, est.get("zeta", link) + policy(i) * (avg - pbar)))
    return est


def _weight(mu: float, link: Link) -> float:
    return mu if Link(link) is Link.UP else 1.0 - mu


def _gain(gains: SlotGains, link: Link) -> float:
    return gains.gamma1 if Link(link) is Link.UP else gains.gammaB


def _nudge_power(est: EstimatorState, link: Link, sample: float, policy: StepPolicy) -> None:
    i = _index(est)
    e = _running(est.get("e", link), sample, i)
    est.set("e", link, e)
    est.set("p", link, max(0.0, est.get("p", link) + policy(i) * e))


def update_fixed_power(est: EstimatorState, gains: SlotGains, decision: SlotDecision,
                       mu: float, policy: StepPolicy, link: Link) -> EstimatorState:
    """Running stationarity residual and a power step along it."""
    q = 1.0 if _chosen(decision, link) else 0.0
    g = _gain(gains, link)
    p = est.get("p", link)
    sample = (_weight(mu, link) * q * g / (LN2 * (1.0 + p * g))
              - est.get("zeta", link) * q)
    _nudge_power(est, link, sample, policy)
    return est


def delta_window(cap_prev: float, cap_now: float, rates: Sequence[float]) -> list:
    """``Delta^j = 1`` iff ``cap_prev <= R^j <= cap_now``."""
    return [1 if cap_prev <= r <= cap_now else 0 for r in rates]


def update_discrete_power(est: EstimatorState, gains: SlotGains, decision: SlotDecision,
                          mu: float, rates: DiscreteRateSet, policy: StepPolicy,
                          link: Link) -> EstimatorState:
    """Discrete-rate counterpart of :func:`update_fixed_power`.

    The bracket ``sum_m R^m Delta^m - sum_{m<M} R^m Delta^{m+1}`` is built
    from the capacities at the current power estimate in the previous and
    the current slot. The previous gain is read from and then stored to
    ``est.prev_gamma*``; at slot 1 it defaults to the current gain.
    """
    up = Link(link) is Link.UP
    g = _gain(gains, link)
    prev = est.prev_gamma1 if up else est.prev_gammaB
    if prev is None:
        prev = g
    p = est.get("p", link)
    r = rates.rates
    d = delta_window(math.log2(1.0 + p * prev), math.log2(1.0 + p * g), r)
    bracket = (sum(rm * dm for rm, dm in zip(r, d))
               - sum(r[m] * d[m + 1] for m in range(len(r) - 1)))
    q = 1.0 if _chosen(decision, link) else 0.0
    sample = (_weight(mu, link) * q * g * bracket / (LN2 * (1.0 + p * g))
              - est.get("zeta", link) * q)
    _nudge_power(est, link, sample, policy)
    if up:
        est.prev_gamma1 = g
    else:
        est.prev_gammaB = g
    return est


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def update_mu_prioritized(est: EstimatorState, r1des: float,
                          policy: StepPolicy) -> EstimatorState:
    """Negative feedback on the uplink rate error: below target raises ``mu``."""
    if r1des < 0:
        raise ValueError("r1des must be >= 0")
    i = _index(est)
    est.mu = _clamp01(est.mu - policy(i) * (est.r1avg - r1des))
    return est


def update_mu_proportional(est: EstimatorState, alpha: float,
                           policy: StepPolicy) -> EstimatorState:
    """Negative feedback on ``r1avg - alpha * rBavg``."""
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    i = _index(est)
    est.mu = _clamp01(est.mu - policy(i) * (est.r1avg - alpha * est.rBavg))
    return est


# ---------------------------------------------------------------------------
# trajectory runner
# ---------------------------------------------------------------------------

TRACE_COLUMNS = ("slot", "zeta1", "zetaB", "p1", "pB", "mu", "r1avg", "rBavg",
                 "p1avg", "pBavg")


@dataclass(frozen=True)
class Controller:
    """``mode`` is ``prioritized`` (target = desired uplink rate) or
    ``proportional`` (target = alpha)."""

    mode: str
    target: float

    def __post_init__(self):
        if self.mode not in ("prioritized", "proportional"):
            raise ValueError(f"unknown controller mode {self.mode!r}")


@dataclass(frozen=True)
class ZetaTable:
    """Prices calibrated on a ``mu`` grid, linearly interpolated."""

    mu: np.ndarray
    zeta1: np.ndarray
    zetaB: np.ndarray

    def __call__(self, mu: float) -> tuple:
        return (float(np.interp(mu, self.mu, self.zeta1)),
                float(np.interp(mu, self.mu, self.zetaB)))


@dataclass
class OnlineResult:
    state: EstimatorState
    rows: list = field(default_factory=list)
    # consumed power and rates per slot, kept for windowed statistics
    power1: Optional[np.ndarray] = None
    powerB: Optional[np.ndarray] = None
    rate1: Optional[np.ndarray] = None
    rateB: Optional[np.ndarray] = None

    def window_mean(self, name: str, last: int) -> float:
        return float(getattr(self, name)[-last:].mean())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(",".join(TRACE_COLUMNS) + "\n")
            for row in self.rows:
                fh.write(",".join([str(row[0])] + [repr(float(v)) for v in row[1:]]) + "\n")


def run_online(trace, config: SchemeConfig, pbar1: float, pbarB: float, *,
               init: Optional[EstimatorState] = None, adapt_zeta: bool = True,
               adapt_power: Optional[bool] = None, controller: Optional[Controller] = None,
               zeta_table: Optional[ZetaTable] = None,
               tracker_policy: StepPolicy = TRACKER_POLICY, mu_policy: StepPolicy = MU_POLICY,
               record_every: int = 1, keep_series: bool = False) -> OnlineResult:
    """Run the estimators slot by slot over ``trace``.

    Order inside slot ``i``: decide with the current estimates, update the
    power and rate averages, then the power trackers, the prices and
    finally ``mu``. With ``zeta_table`` the prices follow ``mu`` through the
    table instead of being tracked. ``adapt_power`` defaults to true for the
    fixed-power and discrete schemes.
    """
    est = EstimatorState() if init is None else init
    scheme = config.scheme
    if adapt_power is None:
        adapt_power = scheme is not Scheme.ADAPTIVE
    if zeta_table is not None:
        est.zeta1, est.zetaB = zeta_table(est.mu)
    n = len(trace)
    g1s, gBs = trace.gamma1.tolist(), trace.gammaB.tolist()
    series = {k: np.zeros(n) for k in ("power1", "powerB", "rate1", "rateB")} if keep_series else None
    out = OnlineResult(est)
    for j in range(n):
        est.slot += 1
        gains = SlotGains(g1s[j], gBs[j])
        dual = est.dual()
        mu = est.mu
        dec = decide(gains, dual, config)
        for link in Link:
            update_power_average(est, dec, link)
            update_rate_average(est, dec, link)
        if adapt_power:
            for link in Link:
                if scheme is Scheme.DISCRETE:
                    update_discrete_power(est, gains, dec, mu, config.rates(link),
                                          tracker_policy, link)
                else:
                    update_fixed_power(est, gains, dec, mu, tracker_policy, link)
        if adapt_zeta and zeta_table is None:
            update_zeta(est, pbar1, tracker_policy, Link.UP)
            update_zeta(est, pbarB, tracker_policy, Link.DOWN)
        if controller is not None:
            if controller.mode == "prioritized":
                update_mu_prioritized(est, controller.target, mu_policy)
            else:
                update_mu_proportional(est, controller.target, mu_policy)
            if zeta_table is not None:
                est.zeta1, est.zetaB = zeta_table(est.mu)
        if series is not None:
            up = dec.state is NetworkState.UPLINK
            down = dec.state is NetworkState.DOWNLINK
            series["power1"][j] = dec.power if up else 0.0
            series["powerB"][j] = dec.power if down else 0.0
            series["rate1"][j] = dec.rate if up else 0.0
            series["rateB"][j] = dec.rate if down else 0.0
        if est.slot % record_every == 0 or j == n - 1:
            out.rows.append((est.slot, est.zeta1, est.zetaB, est.p1, est.pB, est.mu,
                             est.r1avg, est.rBavg, est.p1avg, est.pBavg))
    if series is not None:
        for k, v in series.items():
            setattr(out, k, v)
    return out
