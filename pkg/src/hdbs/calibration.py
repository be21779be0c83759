"""Offline calibration of power prices and fixed powers against a trace.

Optimal prices ``zeta_1, zeta_B`` make each long-term power constraint hold
with equality. On a finite trace the consumed power
of a link is nonincreasing in its own price, so each price is found by a
bracketed root search in ``log(zeta)``. State selection couples the links,
so the downlink price is searched in an outer loop with the uplink price
solved exactly inside it. A link whose budget cannot be used up
even at the floor price is slack and keeps the floor price.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .core import DiscreteRateSet, NetworkState, select_states
from .schedulers import (LN2, DualState, Link, LinkMetric, RunStats, Scheme, SchemeConfig,
                         combine, link_metric, run_stats)

log = logging.getLogger(__name__)

ZETA_LO = 1e-9
DEFAULT_TOL = 1e-3
MAX_ITER = 200
_WIDEN = 10.0
_MAX_WIDEN = 6


class CalibrationError(RuntimeError):
    """Raised when a calibration loop fails; ``last`` holds the last iterate."""

    def __init__(self, message: str, last=None):
        super().__init__(message)
        self.last = last


@dataclass
class Calibration:
    """Calibrated constants for one scheme at one ``mu`` plus diagnostics."""

    scheme: str
    mu: float
    zeta1: float
    zetaB: float
    p1: float
    pB: float
    pbar1: float
    pbarB: float
    consumed1: float
    consumedB: float
    trace_seed: int
    n_slots: int
    residuals: dict = field(default_factory=dict)

    def dual(self, mu: Optional[float] = None) -> DualState:
        return DualState(self.zeta1, self.zetaB, self.p1, self.pB,
                         self.mu if mu is None else mu)

    def to_record(self) -> dict:
        keys = ("mu", "zeta1", "zetaB", "p1", "pB", "trace_seed", "n_slots", "residuals")
        rec = {k: getattr(self, k) for k in keys}
        rec["scheme"] = self.scheme
        return rec

    def to_json(self) -> str:
        return json.dumps(self.to_record(), indent=2, sort_keys=True)

    @classmethod
    def from_record(cls, rec: dict, pbar1: float = float("nan"),
                    pbarB: float = float("nan")) -> "Calibration":
        return cls(rec.get("scheme", ""), rec["mu"], rec["zeta1"], rec["zetaB"], rec["p1"],
                   rec["pB"], pbar1, pbarB, float("nan"), float("nan"),
                   rec["trace_seed"], rec["n_slots"], dict(rec.get("residuals", {})))


def average_consumed_power(trace, config: SchemeConfig, dual: DualState, link: Link) -> float:
    """``(1/N) sum q_k(i) P_k(i)`` under the scheme's decisions on ``trace``."""
    m1 = link_metric(trace.gamma1, dual.mu, dual.zeta1, config, Link.UP, dual.p1)
    mB = link_metric(trace.gammaB, 1.0 - dual.mu, dual.zetaB, config, Link.DOWN, dual.pB)
    dec = combine(m1, mB)
    return float((dec.power1 if Link(link) is Link.UP else dec.powerB).mean())


class _PriceProblem:
    """Caches everything that does not depend on the prices."""

    def __init__(self, trace, config: SchemeConfig, mu: float, p1: float, pB: float):
        self.config = config
        self.mu = mu
        self.n = len(trace)
        self.gamma = {Link.UP: trace.gamma1, Link.DOWN: trace.gammaB}
        self.weight = {Link.UP: mu, Link.DOWN: 1.0 - mu}
        self.pfix = {Link.UP: p1, Link.DOWN: pB}
        self.base = {}
        if config.scheme is not Scheme.ADAPTIVE:
            # rates and powers do not depend on the price here
            for k in Link:
                self.base[k] = link_metric(self.gamma[k], self.weight[k], 0.0, config, k,
                                           self.pfix[k])
        self.evaluations = 0

    def metric(self, link: Link, zeta: float) -> LinkMetric:
        if self.config.scheme is Scheme.ADAPTIVE:
            return link_metric(self.gamma[link], self.weight[link], zeta, self.config, link)
        b = self.base[link]
        return LinkMetric(b.lam - zeta * self.pfix[link], b.power, b.rate, b.index)

    def consumed(self, link: Link, own: LinkMetric, other: Optional[LinkMetric]) -> float:
        self.evaluations += 1
        if other is None:
            chosen = own.lam > 0
        elif link is Link.UP:
            chosen = (own.lam >= other.lam) & (own.lam > 0)
        else:
            chosen = (own.lam > other.lam) & (own.lam > 0)
        # same reduction as run_stats so reported and re-simulated values agree bitwise
        return float(np.where(chosen, own.power, 0.0).mean())

    def no_transmit_price(self, link: Link) -> float:
        """Smallest price at which every slot has a nonpositive metric."""
        w = self.weight[link]
        g = self.gamma[link]
        if self.config.scheme is Scheme.ADAPTIVE:
            return w * float(g.max()) / LN2
        p = self.pfix[link]
        if p <= 0:
            return ZETA_LO
        return w * float(self.base[link].rate.max()) / p

    def uplink_exact(self, mB: LinkMetric, target: float, tol: float) -> "_Root":
        """Uplink price for a given downlink metric by an order statistic.

        With constant power the uplink is chosen exactly when its price is
        below ``t = (mu*r1 - max(0, LambdaB))/P1``, so spending the budget
        means choosing the ``k = floor(N*pbar/P1)`` largest ``t``. With tied
        ``t`` the price sits just above the tie (the feasible side).
        """
        p = self.pfix[Link.UP]
        if p <= 0 or self.weight[Link.UP] <= 0:
            m1 = self.metric(Link.UP, ZETA_LO)
            return _Root(ZETA_LO, self.consumed(Link.UP, m1, mB), "slack", m1)
        m1 = self.metric(Link.UP, ZETA_LO)
        c = self.consumed(Link.UP, m1, mB)
        if c <= target * (1.0 + tol):
            return _Root(ZETA_LO, c, "equal" if c >= target * (1 - tol) else "slack", m1)
        t = (self.base[Link.UP].lam - np.maximum(mB.lam, 0.0)) / p
        n = self.n
        k = min(int(math.floor(n * target / p * (1.0 + 1e-12))), n - 1)
        if k == 0:
            zeta = float(np.nextafter(t.max(), np.inf))
        else:
            part = np.partition(t, (n - k - 1, n - k))
            zeta = float(part[n - k])
            if part[n - k - 1] == zeta:
                zeta = float(np.nextafter(zeta, np.inf))
        zeta = max(zeta, ZETA_LO)
        bump = 1e-12
        while True:
            # guard against rounding in t versus the selection comparison
            m1 = self.metric(Link.UP, zeta)
            c = self.consumed(Link.UP, m1, mB)
            if c <= target * (1.0 + tol) or bump > 1.0:
                break
            zeta *= 1.0 + bump
            bump *= 16.0
        return _Root(zeta, c, "equal" if c >= target * (1 - tol) else "jump", m1)


@dataclass
class _Root:
    zeta: float
    consumed: float
    status: str  # "equal", "slack" or "jump"
    payload: object = None


def _price_root(g: Callable, target: float, tol: float, hi: float,
                max_iter: int = MAX_ITER, collapse: float = 1e-10) -> _Root:
    """Price where the nonincreasing consumption ``g(z)[0]`` meets ``target``.

    Illinois false position in ``log(zeta)`` with a bisection fallback. When
    the consumption jumps across the target (ties in the metrics), the
    bracket collapses and the feasible side is returned.
    """
    c_lo, pay_lo = g(ZETA_LO)
    if c_lo <= target * (1.0 + tol):
        status = "equal" if c_lo >= target * (1.0 - tol) else "slack"
        return _Root(ZETA_LO, c_lo, status, pay_lo)

    hi = max(hi * (1.0 + 1e-9), 2.0 * ZETA_LO)
    c_hi, pay_hi = g(hi)
    widen = 0
    while c_hi > target * (1.0 + tol):
        if widen >= _MAX_WIDEN:
            raise CalibrationError("price bracket does not close", last=hi)
        hi *= _WIDEN
        widen += 1
        c_hi, pay_hi = g(hi)
    if c_hi >= target * (1.0 - tol):
        return _Root(hi, c_hi, "equal", pay_hi)

    xa, ga = math.log(ZETA_LO), c_lo - target
    xb, gb, pb = math.log(hi), c_hi - target, pay_hi
    side = 0
    for _ in range(max_iter):
        if xb - xa < collapse:
            return _Root(math.exp(xb), gb + target, "jump", pb)
        width = xb - xa
        x = xb - gb * width / (gb - ga)
        if not (xa + 0.01 * width < x < xb - 0.01 * width):
            x = 0.5 * (xa + xb)
        cx, px = g(math.exp(x))
        gx = cx - target
        if abs(gx) <= tol * target:
            return _Root(math.exp(x), cx, "equal", px)
        if gx > 0:
            xa, ga = x, gx
            if side == 1:
                gb *= 0.5
            side = 1
        else:
            xb, gb, pb = x, gx, px
            if side == -1:
                ga *= 0.5
            side = -1
    raise CalibrationError(f"price search did not converge in {max_iter} steps",
                           last=math.exp(xb))


def _calibrate(prob: _PriceProblem, pbar1: float, pbarB: float, tol: float,
               max_iter: int = MAX_ITER) -> tuple:
    """Nested search: downlink price outside, uplink price inside.

    For every downlink price the uplink price is solved first, which makes
    the downlink consumption a nonincreasing function of its own price (the
    partial minimum of the convex dual function stays convex).
    """
    inner_tol = tol / 4.0

    def uplink(mB):
        if prob.config.scheme is not Scheme.ADAPTIVE:
            return prob.uplink_exact(mB, pbar1, inner_tol)

        def g1(z1):
            m1 = prob.metric(Link.UP, z1)
            return prob.consumed(Link.UP, m1, mB), m1
        return _price_root(g1, pbar1, inner_tol, prob.no_transmit_price(Link.UP), max_iter)

    def gB(zB):
        mB = prob.metric(Link.DOWN, zB)
        r1 = uplink(mB)
        return prob.consumed(Link.DOWN, mB, r1.payload), r1

    rB = _price_root(gB, pbarB, tol, prob.no_transmit_price(Link.DOWN), max_iter)
    r1 = rB.payload
    return r1.zeta, rB.zeta, r1.consumed, rB.consumed, {"1": r1.status, "B": rB.status}


def _finish(prob: _PriceProblem, trace, z1, zB, c1, cB, pbar1, pbarB, residuals) -> Calibration:
    return Calibration(prob.config.scheme.value, prob.mu, z1, zB, prob.pfix[Link.UP],
                       prob.pfix[Link.DOWN], pbar1, pbarB, c1, cB, int(trace.seed), len(trace),
                       residuals)


def calibrate_zeta(trace, config: SchemeConfig, mu: float, pbar1: float, pbarB: float,
                   tol: float = DEFAULT_TOL, *, p1: float = 0.0, pB: float = 0.0,
                   max_iter: int = MAX_ITER) -> Calibration:
    """Prices making each link consume its average-power budget on ``trace``.

    ``p1``/``pB`` are the fixed powers of the fixed-power and discrete
    schemes and are ignored by the adaptive scheme. A link that cannot
    spend its budget even at the floor price ``ZETA_LO`` is reported as
    ``slack``; one whose consumption jumps over the budget (tied metrics in
    the discrete scheme) as ``jump``, on the side that respects the budget.
    """
    if not (pbar1 > 0 and pbarB > 0):
        raise ValueError("power budgets must be > 0")
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu out of [0,1]: {mu}")
    prob = _PriceProblem(trace, config, mu, p1, pB)
    z1, zB, c1, cB, status = _calibrate(prob, pbar1, pbarB, tol, max_iter)
    residuals = {"power1": (c1 - pbar1) / pbar1, "powerB": (cB - pbarB) / pbarB,
                 "status1": status["1"], "statusB": status["B"],
                 "evaluations": prob.evaluations}
    return _finish(prob, trace, z1, zB, c1, cB, pbar1, pbarB, residuals)


# ---------------------------------------------------------------------------
# fixed powers
# ---------------------------------------------------------------------------

def stationarity_residuals(trace, mu: float, dual: DualState) -> dict:
    """Sample averages of ``w q g/(ln2 (1+P g)) - zeta q`` per link.

    Returned both raw and relative to the marginal-utility term so a
    tolerance is dimensionless.
    """
    config = SchemeConfig.fixed()
    m1 = link_metric(trace.gamma1, mu, dual.zeta1, config, Link.UP, dual.p1)
    mB = link_metric(trace.gammaB, 1.0 - mu, dual.zetaB, config, Link.DOWN, dual.pB)
    state = select_states(m1.lam, mB.lam)
    out = {}
    for link, g, w, p, z, code in ((Link.UP, trace.gamma1, mu, dual.p1, dual.zeta1,
                                    NetworkState.UPLINK),
                                   (Link.DOWN, trace.gammaB, 1 - mu, dual.pB, dual.zetaB,
                                    NetworkState.DOWNLINK)):
        q = state == code
        util = float((w * g[q] / (LN2 * (1.0 + p * g[q]))).sum()) / len(g)
        price = z * float(np.count_nonzero(q)) / len(g)
        out[link] = (util - price, (util - price) / util if util > 0 else 0.0)
    return out


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
COARSE_SLOTS = 50_000


def _golden_max(f: Callable[[float], float], a: float, b: float, xtol: float):
    """Maximize ``f`` over ``[a, b]`` in log space; returns ``(value, point)``."""
    la, lb = math.log(a), math.log(b)
    c = lb - _GOLDEN * (lb - la)
    d = la + _GOLDEN * (lb - la)
    fc, fd = f(math.exp(c)), f(math.exp(d))
    best = max((fc, math.exp(c)), (fd, math.exp(d)))
    while lb - la > xtol:
        if fc >= fd:
            lb, d, fd = d, c, fc
            c = lb - _GOLDEN * (lb - la)
            fc = f(math.exp(c))
            best = max(best, (fc, math.exp(c)))
        else:
            la, c, fc = c, d, fd
            d = la + _GOLDEN * (lb - la)
            fd = f(math.exp(d))
            best = max(best, (fd, math.exp(d)))
    return best


class _PowerSearch:
    """Weighted-throughput maximization over a pair of constant powers.

    Every candidate pair gets freshly calibrated prices so both budgets
    hold; candidates that cannot meet them score ``-inf``.
    """

    def __init__(self, trace, config: SchemeConfig, mu: float, pbar1: float, pbarB: float,
                 tol: float, xtol: float):
        self.trace, self.config, self.mu, self.tol, self.xtol = trace, config, mu, tol, xtol
        self.pbar = {Link.UP: pbar1, Link.DOWN: pbarB}
        self.powers = dict(self.pbar)
        self.memo = {}

    def objective(self, p1: float, pB: float) -> float:
        key = (p1, pB)
        if key not in self.memo:
            pb1, pbB = self.pbar[Link.UP], self.pbar[Link.DOWN]
            try:
                cal = calibrate_zeta(self.trace, self.config, self.mu, pb1, pbB, self.tol,
                                     p1=p1, pB=pB)
            except CalibrationError:
                self.memo[key] = (-math.inf, None)
                return -math.inf
            st = _stats(self.trace, self.config, cal.dual())
            ok = st.p1 <= pb1 * (1 + self.tol) and st.pB <= pbB * (1 + self.tol)
            self.memo[key] = (st.weighted(self.mu) if ok else -math.inf, cal)
        return self.memo[key][0]

    def line(self, link: Link, lo: float, hi: float, points: int) -> None:
        def f(p):
            pw = dict(self.powers)
            pw[link] = p
            return self.objective(pw[Link.UP], pw[Link.DOWN])

        grid = np.geomspace(lo, hi, points)
        values = [f(p) for p in grid]
        j = int(np.argmax(values))
        best = (values[j], grid[j])
        if math.isfinite(values[j]):
            a, b = grid[max(j - 1, 0)], grid[min(j + 1, points - 1)]
            best = max(best, _golden_max(f, a, b, self.xtol))
        self.powers[link] = float(best[1])

    def polish(self, scale: float) -> None:
        """Nelder-Mead on log powers; handles the ridge where coordinate
        search stalls (both budgets tight, prices not unique)."""
        x0 = np.log([self.powers[Link.UP], self.powers[Link.DOWN]])
        simplex = np.array([x0, x0 + [scale, 0.0], x0 + [0.0, scale]])
        floor = np.log([self.pbar[Link.UP], self.pbar[Link.DOWN]])

        def f(x):
            x = np.maximum(x, floor)
            v = self.objective(float(np.exp(x[0])), float(np.exp(x[1])))
            return -v if math.isfinite(v) else 1e6

        optimize.minimize(f, x0, method="Nelder-Mead",
                          options={"initial_simplex": simplex, "xatol": self.xtol,
                                   "fatol": 1e-7, "maxfev": 200})
        (p1, pB), _ = max(self.memo.items(), key=lambda kv: kv[1][0])
        self.powers = {Link.UP: p1, Link.DOWN: pB}

    def result(self) -> tuple:
        return self.memo[(self.powers[Link.UP], self.powers[Link.DOWN])]


def _search_powers(trace, config: SchemeConfig, mu: float, pbar1: float, pbarB: float,
                   tol: float, span: float, grid_points: int, xtol: float,
                   coarse_slots: Optional[int], start: Optional[tuple],
                   polish: bool = True) -> Calibration:
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu out of [0,1]: {mu}")
    active = [k for k, w in ((Link.UP, mu), (Link.DOWN, 1.0 - mu)) if w > 0]
    if start is None and coarse_slots and len(trace) > 2 * coarse_slots:
        rough = _search_powers(trace.head(coarse_slots), config, mu, pbar1, pbarB, tol, span,
                               grid_points, xtol, None, None, polish)
        start = (rough.p1, rough.pB)
    search = _PowerSearch(trace, config, mu, pbar1, pbarB, tol, xtol)
    if start is None:
        for link in active:
            search.line(link, search.pbar[link], search.pbar[link] * span, grid_points)
        scale = 0.15
    else:
        search.powers = {Link.UP: float(start[0]), Link.DOWN: float(start[1])}
        scale = 0.05
    if len(active) == 2 and polish:
        search.polish(scale)
    elif start is not None:
        link = active[0]
        p = search.powers[link]
        search.line(link, max(p / (1 + 4 * scale), search.pbar[link]), p * (1 + 4 * scale), 5)
    value, cal = search.result()
    if cal is None or not math.isfinite(value):
        raise CalibrationError("no feasible power pair found", last=search.powers)
    cal.residuals.update({"objective": value, "candidates": len(search.memo)})
    return cal


def _stationary_free_prices(trace, cal: Calibration) -> None:
    """Move each price to its stationarity value when that leaves every
    slot's decision unchanged (the budget then does not pin the price)."""
    config = SchemeConfig.fixed()
    before = _states(trace, config, cal.dual())
    for link, code in ((Link.UP, NetworkState.UPLINK), (Link.DOWN, NetworkState.DOWNLINK)):
        q = before == code
        if not q.any():
            continue
        g = (trace.gamma1 if link is Link.UP else trace.gammaB)[q]
        w = cal.mu if link is Link.UP else 1.0 - cal.mu
        p = cal.p1 if link is Link.UP else cal.pB
        zeta = float((w * g / (LN2 * (1.0 + p * g))).mean())
        old = cal.zeta1 if link is Link.UP else cal.zetaB
        if link is Link.UP:
            cal.zeta1 = zeta
        else:
            cal.zetaB = zeta
        if np.array_equal(_states(trace, config, cal.dual()), before):
            cal.residuals["status" + link.value] += "+stationary"
        elif link is Link.UP:
            cal.zeta1 = old
        else:
            cal.zetaB = old


def _states(trace, config: SchemeConfig, dual: DualState) -> np.ndarray:
    m1 = link_metric(trace.gamma1, dual.mu, dual.zeta1, config, Link.UP, dual.p1)
    mB = link_metric(trace.gammaB, 1.0 - dual.mu, dual.zetaB, config, Link.DOWN, dual.pB)
    return select_states(m1.lam, mB.lam)


def solve_fixed_powers(trace, mu: float, pbar1: float, pbarB: float,
                       tol: float = DEFAULT_TOL, *, span: float = 1e3, grid_points: int = 13,
                       xtol: float = 1e-3, coarse_slots: Optional[int] = COARSE_SLOTS,
                       start: Optional[tuple] = None) -> Calibration:
    """Constant powers and prices of the fixed-power scheme.

    Powers maximize the sample weighted throughput with prices recalibrated
    per candidate (coordinate log-grid scan, then golden section). Long
    traces are first solved on their leading ``coarse_slots`` slots and then
    refined locally. The stationarity residuals of the result are stored as
    diagnostics; a zero-weight link keeps its budget as power.
    """
    cal = _search_powers(trace, SchemeConfig.fixed(), mu, pbar1, pbarB, tol, span,
                         grid_points, xtol, coarse_slots, start)
    _stationary_free_prices(trace, cal)
    res = stationarity_residuals(trace, mu, cal.dual())
    cal.residuals.update({"stationarity1": res[Link.UP][1], "stationarityB": res[Link.DOWN][1]})
    return cal


def solve_discrete_powers(trace, mu: float, pbar1: float, pbarB: float,
                          rates1: DiscreteRateSet, ratesB: Optional[DiscreteRateSet] = None,
                          tol: float = DEFAULT_TOL, *, span: float = 1e4,
                          grid_points: int = 25, xtol: float = 1e-3,
                          coarse_slots: Optional[int] = COARSE_SLOTS,
                          start: Optional[tuple] = None, polish: bool = True) -> Calibration:
    """Fixed powers of the discrete-rate scheme maximizing weighted throughput.

    Same search as :func:`solve_fixed_powers`, over ``[pbar, pbar*span]``
    per link. The objective is piecewise smooth here, so the scan is denser.
    ``polish=False`` skips the joint simplex refinement (cheap screening).
    """
    ratesB = rates1 if ratesB is None else ratesB
    return _search_powers(trace, SchemeConfig.discrete(rates1, ratesB), mu, pbar1, pbarB, tol,
                          span, grid_points, xtol, coarse_slots, start, polish)


def _stats(trace, config: SchemeConfig, dual: DualState) -> RunStats:
    m1 = link_metric(trace.gamma1, dual.mu, dual.zeta1, config, Link.UP, dual.p1)
    mB = link_metric(trace.gammaB, 1.0 - dual.mu, dual.zetaB, config, Link.DOWN, dual.pB)
    return run_stats(combine(m1, mB, config.scheme is Scheme.DISCRETE))


def calibrate(trace, config: SchemeConfig, mu: float, pbar1: float, pbarB: float,
              tol: float = DEFAULT_TOL, **kw) -> Calibration:
    """Scheme-appropriate calibration: prices only, or prices and powers."""
    if config.scheme is Scheme.ADAPTIVE:
        return calibrate_zeta(trace, config, mu, pbar1, pbarB, tol, **kw)
    if config.scheme is Scheme.FIXED:
        return solve_fixed_powers(trace, mu, pbar1, pbarB, tol, **kw)
    return solve_discrete_powers(trace, mu, pbar1, pbarB, config.rates1, config.ratesB, tol, **kw)


