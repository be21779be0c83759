"""Sweeps behind the rate-region, sum-rate, outage and fairness studies.

Seeding: every experiment draws its traces from ``derive_seed(cfg.seed,
experiment, role)``. All points of one sweep share the same underlying
uniforms (scaled to each point's mean gain), so schemes and grid points are
compared on matched traces. Calibration and evaluation traces always use
different seeds.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .calibration import (ZETA_LO, CalibrationError, calibrate_zeta, solve_discrete_powers,
                          solve_fixed_powers)
from .channel import ChannelTrace, derive_seed, generate_trace
from .config import Config
from .core import DiscreteRateSet
from .fdd import DEFAULT_RATE_GRID, best_rate, fdd_link_throughput, fdd_rate_pair, fdd_success
from .online import (Controller, EstimatorState, OnlineResult, StepPolicy, ZetaTable,
                     run_online)
from .schedulers import DualState, SchemeConfig, evaluate, simulate

log = logging.getLogger(__name__)

EXP_REGION, EXP_SUMRATE, EXP_OUTAGE, EXP_FAIRNESS, EXP_CALIBRATE = 1, 2, 3, 4, 5
RATE_SEARCH_SLOTS = 20_000

REGION_COLUMNS = ("scheme", "mu", "r1", "rB", "p1_consumed", "pB_consumed", "zeta1", "zetaB")
SUMRATE_COLUMNS = ("scheme", "snr_db", "sum_rate", "r1", "rB")
OUTAGE_COLUMNS = ("scheme", "snr_db", "pout1", "poutB", "slots")
FAIRNESS_COLUMNS = ("slot", "mu", "r1avg", "rBavg")

NAN = float("nan")


@dataclass(frozen=True)
class RegionPoint:
    scheme: str
    mu: float
    r1: float
    rB: float
    p1_consumed: float = NAN
    pB_consumed: float = NAN
    zeta1: float = NAN
    zetaB: float = NAN
    ok: bool = True
    note: str = ""
    # in-sample (calibration trace) rates and consumption, not written to CSV
    cal_r1: float = NAN
    cal_rB: float = NAN
    cal_p1: float = NAN
    cal_pB: float = NAN

    def row(self) -> tuple:
        return tuple(getattr(self, c) for c in REGION_COLUMNS)

    def cal_weighted(self) -> float:
        return self.mu * self.cal_r1 + (1.0 - self.mu) * self.cal_rB

    def weighted(self) -> float:
        return self.mu * self.r1 + (1.0 - self.mu) * self.rB


@dataclass(frozen=True)
class SumRatePoint:
    scheme: str
    snr_db: float
    r1: float
    rB: float
    ok: bool = True
    note: str = ""

    @property
    def sum_rate(self) -> float:
        return self.r1 + self.rB

    def row(self) -> tuple:
        return (self.scheme, self.snr_db, self.sum_rate, self.r1, self.rB)


@dataclass(frozen=True)
class OutageResult:
    scheme: str
    snr_db: float
    pout1: float
    poutB: float
    slots: int
    events1: int = 0
    eventsB: int = 0
    # slots with the uplink chosen although it cannot carry the rate
    false_tx1: int = 0
    low_confidence: bool = False

    def __post_init__(self):
        for p in (self.pout1, self.poutB):
            if not 0.0 <= p <= 1.0:
                raise ValueError("outage probabilities must be in [0, 1]")

    def row(self) -> tuple:
        return (self.scheme, self.snr_db, self.pout1, self.poutB, self.slots)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def parallel_map(func: Callable, items: Sequence, threads: int = 1) -> list:
    """Ordered map, in worker processes when ``threads > 1``."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))


def _scaled(unit: ChannelTrace, mean1: float, meanB: float) -> ChannelTrace:
    return ChannelTrace(unit.gamma1 * mean1, unit.gammaB * meanB, unit.seed, mean1, meanB)


def unit_traces(cfg: Config, experiment: int) -> tuple:
    """Unit-mean calibration and evaluation traces of an experiment."""
    cal = generate_trace(cfg.cal_slots, 1.0, 1.0, derive_seed(cfg.seed, experiment, 0))
    ev = generate_trace(cfg.eval_slots, 1.0, 1.0, derive_seed(cfg.seed, experiment, 1))
    return cal, ev


def discrete_rates(levels: int, top: float) -> DiscreteRateSet:
    """``levels`` equally spaced rates ending at ``top``."""
    return DiscreteRateSet.ladder(levels, top / levels)


def optimize_discrete_tops(trace: ChannelTrace, mu: float, pbar1: float, pbarB: float,
                           levels: int, grid: Sequence[float], tol: float,
                           slots: int = RATE_SEARCH_SLOTS) -> tuple:
    """Top rates of both links' ladders maximizing weighted throughput.

    Coordinate scans over ``grid`` on the first ``slots`` slots: a common
    top rate first, then each weighted link on its own.
    """
    short = trace.head(min(slots, len(trace)))
    memo = {}

    def score(t1, tB):
        if (t1, tB) not in memo:
            try:
                cal = solve_discrete_powers(short, mu, pbar1, pbarB, discrete_rates(levels, t1),
                                            discrete_rates(levels, tB), tol, grid_points=13,
                                            xtol=1e-2, coarse_slots=None, polish=False)
                memo[(t1, tB)] = cal.residuals["objective"]
            except CalibrationError:
                memo[(t1, tB)] = -math.inf
        return memo[(t1, tB)]

    grid = [float(g) for g in grid]
    best = max(grid, key=lambda t: score(t, t))
    t1 = tB = best
    if mu > 0:
        t1 = max(grid, key=lambda t: score(t, tB))
    if mu < 1:
        tB = max(grid, key=lambda t: score(t1, t))
    return t1, tB


def _scheme_point(scheme: str, cal_tr, ev_tr, mu: float, pbar1: float, pbarB: float,
                  cfg: Config, levels: int = 1) -> tuple:
    """Calibrate one scheme on ``cal_tr``; returns (stats, calibration, config)."""
    if scheme == "adaptive":
        config = SchemeConfig.adaptive()
        cal = calibrate_zeta(cal_tr, config, mu, pbar1, pbarB, cfg.tol)
    elif scheme == "fixed":
        config = SchemeConfig.fixed()
        cal = solve_fixed_powers(cal_tr, mu, pbar1, pbarB, cfg.tol)
    elif scheme == "discrete":
        if cfg.rate is None:
            t1, tB = optimize_discrete_tops(cal_tr, mu, pbar1, pbarB, levels, cfg.rate_grid,
                                            cfg.tol, cfg.search_slots)
        else:
            t1 = tB = cfg.rate
        config = SchemeConfig.discrete(discrete_rates(levels, t1), discrete_rates(levels, tB))
        cal = solve_discrete_powers(cal_tr, mu, pbar1, pbarB, config.rates1, config.ratesB,
                                    cfg.tol)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return evaluate(ev_tr, config, cal.dual()), cal, config


def _discrete_tag(levels: int, all_levels: Sequence[int]) -> str:
    return "discrete" if len(all_levels) == 1 else f"discrete_m{levels}"


# ---------------------------------------------------------------------------
# rate region
# ---------------------------------------------------------------------------

def _region_item(args) -> list:
    cfg, mu = args
    cal_u, ev_u = unit_traces(cfg, EXP_REGION)
    m1, mB = cfg.mean_gains()
    cal_tr, ev_tr = _scaled(cal_u, m1, mB), _scaled(ev_u, m1, mB)
    pbar1, pbarB = cfg.budgets()
    out = []
    for scheme in cfg.schemes:
        for levels in (cfg.levels if scheme == "discrete" else (None,)):
            tag = scheme if levels is None else _discrete_tag(levels, cfg.levels)
            try:
                st, cal, config = _scheme_point(scheme, cal_tr, ev_tr, mu, pbar1, pbarB, cfg,
                                                levels or 1)
                ins = evaluate(cal_tr, config, cal.dual())
                out.append(RegionPoint(tag, mu, st.r1, st.rB, st.p1, st.pB, cal.zeta1,
                                       cal.zetaB, cal_r1=ins.r1, cal_rB=ins.rB, cal_p1=ins.p1,
                                       cal_pB=ins.pB))
            except (CalibrationError, ValueError) as exc:
                log.warning("region point %s mu=%g failed: %s", tag, mu, exc)
                out.append(RegionPoint(tag, mu, NAN, NAN, ok=False, note=str(exc)))
    r1, rB = fdd_rate_pair(ev_tr, mu, pbar1, pbarB)
    used1, usedB = (pbar1 if mu > 0 else 0.0), (pbarB if mu < 1 else 0.0)
    out.append(RegionPoint("fdd", mu, r1, rB, used1, usedB))
    if "discrete" in cfg.schemes:
        t1, tB = _fdd_throughputs(cal_tr, ev_tr, mu, pbar1, pbarB)
        out.append(RegionPoint("fdd_discrete", mu, t1, tB, used1, usedB))
    return out


def _fdd_throughputs(cal_tr, ev_tr, mu, pbar1, pbarB) -> tuple:
    """Rates optimized on the calibration trace, throughput on the evaluation one."""
    out = []
    for g_cal, g_ev, frac, pbar in ((cal_tr.gamma1, ev_tr.gamma1, mu, pbar1),
                                    (cal_tr.gammaB, ev_tr.gammaB, 1 - mu, pbarB)):
        if frac <= 0:
            out.append(0.0)
            continue
        rate, _ = best_rate(g_cal, frac, pbar, DEFAULT_RATE_GRID)
        out.append(fdd_link_throughput(g_ev, frac, pbar, rate))
    return tuple(out)


def sweep_region(cfg: Config, mu_grid: Optional[Sequence[float]] = None,
                 threads: Optional[int] = None) -> list:
    """Region points for every enabled scheme plus the FDD benchmark(s)."""
    grid = list(cfg.mu_grid if mu_grid is None else mu_grid)
    if any(not 0.0 <= m <= 1.0 for m in grid):
        raise ValueError("mu out of [0,1] in grid")
    if grid != sorted(grid):
        raise ValueError("mu grid must be sorted")
    threads = cfg.threads_effective() if threads is None else threads
    chunks = parallel_map(_region_item, [(cfg, float(m)) for m in grid], threads)
    return [p for chunk in chunks for p in chunk]


def upper_envelope(x: Sequence[float], y: Sequence[float]) -> tuple:
    """Upper concave envelope of points ``(x, y) >= 0`` under time sharing.

    The axis points ``(0, max y)`` and ``(max x, 0)`` are added, so the
    envelope spans ``[0, max x]``. Returns the hull vertices sorted by x.
    """
    pts = [(float(a), float(b)) for a, b in zip(x, y) if np.isfinite(a) and np.isfinite(b)]
    if not pts:
        raise ValueError("no finite points")
    pts += [(0.0, max(b for _, b in pts)), (max(a for a, _ in pts), 0.0)]
    pts.sort(key=lambda p: (p[0], -p[1]))
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) >= 0:
                hull.pop()
            else:
                break
        if not hull or p[0] > hull[-1][0]:
            hull.append(p)
    return np.array([p[0] for p in hull]), np.array([p[1] for p in hull])


def uplink_at_downlink(points: Sequence[RegionPoint], scheme: str, rB: float) -> float:
    """Largest uplink rate of ``scheme`` at downlink rate ``rB`` (0 beyond the region)."""
    sel = [p for p in points if p.scheme == scheme and p.ok]
    hx, hy = upper_envelope([p.rB for p in sel], [p.r1 for p in sel])
    if rB > hx[-1]:
        return 0.0
    return float(np.interp(rB, hx, hy))


def region_gain(points: Sequence[RegionPoint], scheme: str, benchmark: str,
                rB: float) -> float:
    """Relative uplink gain of ``scheme`` over ``benchmark`` at downlink rate ``rB``."""
    base = uplink_at_downlink(points, benchmark, rB)
    if base <= 0:
        raise ValueError(f"benchmark has no uplink rate at rB = {rB}")
    return uplink_at_downlink(points, scheme, rB) / base - 1.0


# ---------------------------------------------------------------------------
# sum rate vs SNR
# ---------------------------------------------------------------------------

def _sumrate_item(args) -> list:
    cfg, snr = args
    cal_u, ev_u = unit_traces(cfg, EXP_SUMRATE)
    m1, mB = cfg.mean_gains(snr)
    cal_tr, ev_tr = _scaled(cal_u, m1, mB), _scaled(ev_u, m1, mB)
    pbar1, pbarB = cfg.budgets()
    mu = cfg.sumrate_mu
    out = []
    for scheme in cfg.schemes:
        for levels in (cfg.levels if scheme == "discrete" else (None,)):
            tag = scheme if levels is None else _discrete_tag(levels, cfg.levels)
            try:
                st, _, _ = _scheme_point(scheme, cal_tr, ev_tr, mu, pbar1, pbarB, cfg,
                                         levels or 1)
                out.append(SumRatePoint(tag, snr, st.r1, st.rB))
            except (CalibrationError, ValueError) as exc:
                log.warning("sum-rate point %s snr=%g failed: %s", tag, snr, exc)
                out.append(SumRatePoint(tag, snr, NAN, NAN, ok=False, note=str(exc)))
    r1, rB = fdd_rate_pair(ev_tr, mu, pbar1, pbarB)
    out.append(SumRatePoint("fdd", snr, r1, rB))
    if "discrete" in cfg.schemes:
        t1, tB = _fdd_throughputs(cal_tr, ev_tr, mu, pbar1, pbarB)
        out.append(SumRatePoint("fdd_discrete", snr, t1, tB))
    return out


def sweep_sum_rate(cfg: Config, snr_grid_db: Optional[Sequence[float]] = None,
                   threads: Optional[int] = None) -> list:
    grid = list(cfg.snr_grid if snr_grid_db is None else snr_grid_db)
    if not grid:
        raise ValueError("SNR grid must not be empty")
    threads = cfg.threads_effective() if threads is None else threads
    chunks = parallel_map(_sumrate_item, [(cfg, float(s)) for s in grid], threads)
    return [p for chunk in chunks for p in chunk]


def snr_gap_db(snr: Sequence[float], proposed: Sequence[float], benchmark: Sequence[float],
               reference_snr: float = 20.0, fraction: float = 0.5) -> float:
    """Horizontal gap between two increasing curves.

    The level is ``fraction`` of the benchmark at ``reference_snr``; both
    curves are linearly interpolated to find the SNR reaching it.
    """
    snr = np.asarray(snr, dtype=float)
    bench = np.asarray(benchmark, dtype=float)
    prop = np.asarray(proposed, dtype=float)
    level = fraction * float(np.interp(reference_snr, snr, bench))
    return _crossing(snr, bench, level) - _crossing(snr, prop, level)


def _crossing(x: np.ndarray, y: np.ndarray, level: float) -> float:
    above = np.flatnonzero(y >= level)
    if above.size == 0 or above[0] == 0:
        if above.size and y[0] == level:
            return float(x[0])
        raise ValueError("level not bracketed by the curve")
    j = int(above[0])
    return float(x[j - 1] + (level - y[j - 1]) * (x[j] - x[j - 1]) / (y[j] - y[j - 1]))


# ---------------------------------------------------------------------------
# outage
# ---------------------------------------------------------------------------

def outage_closed_form(mean_gamma: float, power: float, r0: float) -> float:
    """Symmetric single-rate outage ``(1 - exp(-gamma_th/mean))**2``."""
    th = (2.0 ** r0 - 1.0) / power
    return (1.0 - math.exp(-th / mean_gamma)) ** 2


def outage_closed_form_pair(mean1: float, meanB: float, p1: float, pB: float,
                            r0: float) -> float:
    """Both links unable to carry ``r0``: the slot is wasted for both."""
    c = 2.0 ** r0 - 1.0
    return (1.0 - math.exp(-c / (p1 * mean1))) * (1.0 - math.exp(-c / (pB * meanB)))


def _outage_item(args) -> list:
    cfg, snr = args
    m1, mB = cfg.mean_gains(snr)
    pbar1, pbarB = cfg.budgets()
    mu = cfg.outage_mu
    rates = DiscreteRateSet((cfg.r0,))
    config = SchemeConfig.discrete(rates, rates)
    # equal powers at the budgets: never overspends, prices at the floor
    dual = DualState(ZETA_LO, ZETA_LO * pbar1 / pbarB, pbar1, pbarB, mu)
    n = ev1 = evB = false1 = 0
    f1 = fB = 0
    chunk = 0
    while True:
        g = generate_trace(cfg.chunk_slots, m1, mB, derive_seed(cfg.seed, EXP_OUTAGE, chunk))
        dec = simulate(g.gamma1, g.gammaB, config, dual)
        ev1 += int(np.count_nonzero(dec.out1))
        evB += int(np.count_nonzero(dec.outB))
        false1 += int(np.count_nonzero((dec.state == 1) & (dec.rate1 <= 0)))
        if mu > 0:
            f1 += int(np.count_nonzero(~fdd_success(g.gamma1, mu, pbar1, cfg.r0)))
        if mu < 1:
            fB += int(np.count_nonzero(~fdd_success(g.gammaB, 1 - mu, pbarB, cfg.r0)))
        n += len(g)
        chunk += 1
        enough = min(ev1, evB) >= cfg.min_events and n >= cfg.min_slots
        if enough or n + cfg.chunk_slots > cfg.max_slots:
            break
    low = min(ev1, evB) < cfg.min_events
    fdd_low = min(f1 if mu > 0 else cfg.min_events, fB if mu < 1 else cfg.min_events)
    return [OutageResult("discrete", snr, ev1 / n, evB / n, n, ev1, evB, false1, low),
            OutageResult("fdd", snr, f1 / n if mu > 0 else 1.0, fB / n if mu < 1 else 1.0, n,
                         f1, fB, 0, fdd_low < cfg.min_events)]


def sweep_outage(cfg: Config, snr_grid_db: Optional[Sequence[float]] = None,
                 r0: Optional[float] = None, threads: Optional[int] = None) -> list:
    """Monte Carlo outage of the single-rate scheme and of FDD per SNR.

    Slots are drawn in chunks until both links saw ``min_events`` outages
    (and at least ``min_slots`` slots), or ``max_slots`` is reached, in
    which case the point is flagged ``low_confidence``.
    """
    if r0 is not None:
        cfg = replace(cfg, r0=float(r0))
    grid = list(cfg.snr_grid if snr_grid_db is None else snr_grid_db)
    threads = cfg.threads_effective() if threads is None else threads
    chunks = parallel_map(_outage_item, [(cfg, float(s)) for s in grid], threads)
    res = [p for chunk in chunks for p in chunk]
    return sorted(res, key=lambda r: (r.scheme != "discrete", r.snr_db))


def fit_diversity_order(results: Sequence[OutageResult], window: tuple = (15.0, 30.0),
                        scheme: Optional[str] = None) -> dict:
    """Negated least-squares slope of ``log10(P_out)`` against ``SNR_dB/10``."""
    out = {}
    for link in ("1", "B"):
        pts = [(r.snr_db, getattr(r, "pout" + link)) for r in results
               if (scheme is None or r.scheme == scheme)
               and window[0] <= r.snr_db <= window[1]]
        pts = [(s, p) for s, p in pts if p > 0]
        if len(pts) < 4:
            raise ValueError(f"need >= 4 positive outage points in window, got {len(pts)}")
        x = np.array([s for s, _ in pts]) / 10.0
        y = np.log10([p for _, p in pts])
        slope = np.polyfit(x, y, 1)[0]
        out[link] = float(-slope)
    return out


# ---------------------------------------------------------------------------
# fairness
# ---------------------------------------------------------------------------

def zeta_table(trace: ChannelTrace, pbar1: float, pbarB: float, points: int,
               tol: float) -> ZetaTable:
    """Adaptive-scheme prices calibrated on a uniform ``mu`` grid."""
    grid = np.linspace(0.0, 1.0, points)
    z1, zB = [], []
    for mu in grid:
        cal = calibrate_zeta(trace, SchemeConfig.adaptive(), float(mu), pbar1, pbarB, tol)
        z1.append(cal.zeta1)
        zB.append(cal.zetaB)
    return ZetaTable(grid, np.array(z1), np.array(zB))


def run_fairness(cfg: Config, mode: Optional[str] = None,
                 target: Optional[float] = None) -> OnlineResult:
    """Adaptive-power scheme under a ``mu`` controller.

    By default the prices follow ``mu`` through a table calibrated offline;
    with ``cfg.fairness_joint`` they are tracked online as well.
    """
    mode = cfg.fairness_mode if mode is None else mode
    target = cfg.fairness_target if target is None else target
    m1, mB = cfg.mean_gains()
    pbar1, pbarB = cfg.budgets()
    table_tr = generate_trace(cfg.table_slots, m1, mB, derive_seed(cfg.seed, EXP_FAIRNESS, 0))
    table = zeta_table(table_tr, pbar1, pbarB, cfg.table_points, cfg.tol)
    if mode == "prioritized":
        top = evaluate(table_tr, SchemeConfig.adaptive(),
                       DualState(*table(1.0), mu=1.0)).r1
        if target > top:
            log.warning("uplink target %.3g exceeds the largest uplink rate %.3g; "
                        "the controller will saturate at mu = 1", target, top)
    trace = generate_trace(cfg.fairness_slots, m1, mB, derive_seed(cfg.seed, EXP_FAIRNESS, 1))
    z1, zB = table(0.5)
    init = EstimatorState(zeta1=z1, zetaB=zB, mu=0.5)
    return run_online(trace, SchemeConfig.adaptive(), pbar1, pbarB, init=init,
                      adapt_zeta=cfg.fairness_joint, controller=Controller(mode, target),
                      zeta_table=None if cfg.fairness_joint else table,
                      tracker_policy=StepPolicy(cfg.delta0, cfg.exponent),
                      mu_policy=StepPolicy(cfg.mu_delta0, cfg.mu_exponent),
                      record_every=cfg.record_every)


# ---------------------------------------------------------------------------
# calibration records
# ---------------------------------------------------------------------------

def calibrate_schemes(cfg: Config) -> list:
    """Calibrations of every enabled scheme at ``cfg.mu`` on the calibration trace."""
    cal_u, _ = unit_traces(cfg, EXP_CALIBRATE)
    m1, mB = cfg.mean_gains()
    tr = _scaled(cal_u, m1, mB)
    pbar1, pbarB = cfg.budgets()
    out = []
    for scheme in cfg.schemes:
        for levels in (cfg.levels if scheme == "discrete" else (None,)):
            if scheme == "adaptive":
                cal = calibrate_zeta(tr, SchemeConfig.adaptive(), cfg.mu, pbar1, pbarB, cfg.tol)
            elif scheme == "fixed":
                cal = solve_fixed_powers(tr, cfg.mu, pbar1, pbarB, cfg.tol)
            else:
                if cfg.rate is None:
                    t1, tB = optimize_discrete_tops(tr, cfg.mu, pbar1, pbarB, levels,
                                                    cfg.rate_grid, cfg.tol, cfg.search_slots)
                else:
                    t1 = tB = cfg.rate
                cal = solve_discrete_powers(tr, cfg.mu, pbar1, pbarB, discrete_rates(levels, t1),
                                            discrete_rates(levels, tB), cfg.tol)
                cal.residuals["rate_top1"], cal.residuals["rate_topB"] = t1, tB
                cal.scheme = _discrete_tag(levels, cfg.levels)
            out.append(cal)
    return out


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def write_csv(path, columns: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_region(path, points: Sequence[RegionPoint]) -> None:
    write_csv(path, REGION_COLUMNS, [p.row() for p in points])


def write_sum_rate(path, points: Sequence[SumRatePoint]) -> None:
    write_csv(path, SUMRATE_COLUMNS, [p.row() for p in points])


def write_outage(path, results: Sequence[OutageResult]) -> None:
    write_csv(path, OUTAGE_COLUMNS, [r.row() for r in results])


def write_fairness(path, result: OnlineResult) -> None:
    # rows are (slot, zeta1, zetaB, p1, pB, mu, r1avg, rBavg, p1avg, pBavg)
    write_csv(path, FAIRNESS_COLUMNS, [(r[0], r[5], r[6], r[7]) for r in result.rows])


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path
