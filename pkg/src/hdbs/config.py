"""Experiment configuration: an INI file read with :mod:`configparser`.

Grammar: ``[section]`` headers and ``key = value`` lines, ``#``/``;``
comments. Every key has a default (see ``DEFAULTS``); unknown sections or
keys are errors. Lists are comma separated; grids are ``start:stop:step``
(stop inclusive). dB/dBm values exist only here and are converted at parse
time. Precedence, highest first: command-line flags, the ``HDBS_OUTPUT_DIR``
environment variable (output directory only), the file, the defaults.
"""

from __future__ import annotations

import configparser
import math
import os
from io import StringIO
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import LinkBudget, db_to_linear, dbm_to_watt, mean_normalized_gain

OUTPUT_ENV = "HDBS_OUTPUT_DIR"
SCHEMES = ("adaptive", "fixed", "discrete")

DEFAULTS = {
    "run": {
        "schemes": "adaptive, fixed, discrete",
        "mode": "snr",
        "seed": "1",
        "output_dir": "results",
        "threads": "0",
    },
    "snr": {
        "snr_db": "15",
        "snr_grid": "0:30:5",
        "pbar": "1.0",
    },
    "physical": {
        "carrier_hz": "1.9e9",
        "distance1_m": "700",
        "distanceB_m": "700",
        "path_loss_exp": "3.6",
        "bandwidth_hz": "200e3",
        "p1_dbm": "24",
        "pB_dbm": "46",
        "user_gain_dbi": "0",
        "bs_gain_dbi": "16",
        "nf_bs_db": "2",
        "nf_user_db": "7",
        "noise_floor_dbm_hz": "-174",
    },
    "slots": {
        "calibration": "1000000",
        "evaluation": "1000000",
    },
    "calibration": {
        "tol": "1e-3",
        "mu": "0.5",
    },
    "region": {
        "mu_points": "41",
        "mu_grid": "",
    },
    "sumrate": {
        "mu": "0.5",
    },
    "discrete": {
        "levels": "1",
        "rate": "optimize",
        "rate_grid": "1:14:1",
        "search_slots": "20000",
    },
    "outage": {
        "r0": "1",
        "mu": "0.5",
        "min_events": "100",
        "chunk_slots": "1000000",
        "max_slots": "200000000",
        "min_slots": "1000000",
    },
    "fairness": {
        "mode": "prioritized",
        "target": "5",
        "slots": "1000000",
        "joint": "false",
        "table_points": "101",
        "table_slots": "50000",
        "record_every": "1000",
    },
    "estimator": {
        "delta0": "0.5",
        "exponent": "0.6",
        "mu_delta0": "0.5",
        "mu_exponent": "0.51",
    },
}


class ConfigError(ValueError):
    pass


def parse_grid(text: str) -> np.ndarray:
    """``a:b:c`` (inclusive of ``b`` up to rounding) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r} must be start:stop:step")
        a, b, c = (float(p) for p in parts)
        if c <= 0 or b < a:
            raise ConfigError(f"grid {text!r} needs step > 0 and stop >= start")
        n = int(math.floor((b - a) / c + 1e-9)) + 1
        return np.round(a + c * np.arange(n), 12)
    if not text:
        return np.array([])
    return np.array([float(v) for v in text.split(",")])


def cosine_grid(points: int) -> np.ndarray:
    """``points`` values in [0, 1], denser near the ends."""
    if points < 2:
        raise ConfigError("mu_points must be >= 2")
    return 0.5 * (1.0 - np.cos(np.pi * np.arange(points) / (points - 1)))


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _check_mu(name: str, mu: float) -> float:
    if not 0.0 <= mu <= 1.0:
        raise ConfigError(f"{name}: mu out of [0,1]: {mu}")
    return mu


@dataclass(frozen=True)
class Config:
    schemes: tuple = ("adaptive", "fixed", "discrete")
    mode: str = "snr"
    seed: int = 1
    output_dir: str = "results"
    threads: int = 0
    snr_db: float = 15.0
    snr_grid: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    pbar: float = 1.0
    budget1: Optional[LinkBudget] = None
    budgetB: Optional[LinkBudget] = None
    p1_watt: float = dbm_to_watt(24.0)
    pB_watt: float = dbm_to_watt(46.0)
    cal_slots: int = 1_000_000
    eval_slots: int = 1_000_000
    tol: float = 1e-3
    mu: float = 0.5
    mu_grid: tuple = tuple(cosine_grid(41))
    sumrate_mu: float = 0.5
    levels: tuple = (1,)
    rate: Optional[float] = None  # top rate M*R; None means optimize
    rate_grid: tuple = tuple(float(x) for x in range(1, 15))
    search_slots: int = 20_000
    r0: float = 1.0
    outage_mu: float = 0.5
    min_events: int = 100
    chunk_slots: int = 1_000_000
    max_slots: int = 200_000_000
    min_slots: int = 1_000_000
    fairness_mode: str = "prioritized"
    fairness_target: float = 5.0
    fairness_slots: int = 1_000_000
    fairness_joint: bool = False
    table_points: int = 101
    table_slots: int = 50_000
    record_every: int = 1000
    delta0: float = 0.5
    exponent: float = 0.6
    mu_delta0: float = 0.5
    mu_exponent: float = 0.51
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    # --- derived quantities -------------------------------------------------

    def mean_gains(self, snr_db: Optional[float] = None) -> tuple:
        """Mean normalized gains of both links (1/W)."""
        if self.mode == "physical":
            return mean_normalized_gain(self.budget1), mean_normalized_gain(self.budgetB)
        g = db_to_linear(self.snr_db if snr_db is None else snr_db) / self.pbar
        return g, g

    def budgets(self) -> tuple:
        """Average power budgets ``(pbar1, pbarB)`` in W."""
        if self.mode == "physical":
            return self.p1_watt, self.pB_watt
        return self.pbar, self.pbar

    def threads_effective(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def to_ini(self) -> str:
        """Effective configuration, every key explicit."""
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        for sec, items in self.raw.items():
            cp[sec] = dict(items)
        buf = StringIO()
        cp.write(buf)
        return buf.getvalue()


def _raw_sections(cp: configparser.ConfigParser) -> dict:
    unknown = []
    for sec in cp.sections():
        if sec not in DEFAULTS:
            unknown.append(f"[{sec}]")
            continue
        for key in cp[sec]:
            if key not in DEFAULTS[sec]:
                unknown.append(f"{sec}.{key}")
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(unknown))
    raw = {}
    for sec, items in DEFAULTS.items():
        raw[sec] = dict(items)
        if cp.has_section(sec):
            raw[sec].update({k: v for k, v in cp[sec].items()})
    return raw


def _field(raw: dict, sec: str, key: str, conv):
    text = raw[sec][key]
    try:
        return conv(text)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{sec}.{key}: cannot parse {text!r} ({exc})") from None


def _int(text: str) -> int:
    v = float(text)
    if v != int(v):
        raise ValueError("not an integer")
    return int(v)


def build_config(raw: dict) -> Config:
    f = lambda sec, key, conv=float: _field(raw, sec, key, conv)  # noqa: E731
    schemes = tuple(s.strip() for s in raw["run"]["schemes"].split(",") if s.strip())
    bad = [s for s in schemes if s not in SCHEMES]
    if bad or not schemes:
        raise ConfigError(f"run.schemes: unknown scheme(s) {bad}; choose from {SCHEMES}")
    mode = raw["run"]["mode"].strip()
    if mode not in ("snr", "physical"):
        raise ConfigError("run.mode must be 'snr' or 'physical'")

    ph = lambda key: f("physical", key)  # noqa: E731
    bs_gain = db_to_linear(ph("bs_gain_dbi"))
    user_gain = db_to_linear(ph("user_gain_dbi"))
    common = dict(carrier_hz=ph("carrier_hz"), path_loss_exp=ph("path_loss_exp"),
                  tx_antenna_gain=user_gain, bandwidth_hz=ph("bandwidth_hz"),
                  noise_floor_dbm_per_hz=ph("noise_floor_dbm_hz"))
    budget1 = LinkBudget(distance_m=ph("distance1_m"), rx_antenna_gain=bs_gain,
                         noise_figure_db=ph("nf_bs_db"), **common)
    common["tx_antenna_gain"] = bs_gain
    budgetB = LinkBudget(distance_m=ph("distanceB_m"), rx_antenna_gain=user_gain,
                         noise_figure_db=ph("nf_user_db"), **common)

    mu_grid_text = raw["region"]["mu_grid"].strip()
    if mu_grid_text:
        mu_grid = tuple(float(m) for m in _field(raw, "region", "mu_grid", parse_grid))
    else:
        mu_grid = tuple(float(m) for m in cosine_grid(f("region", "mu_points", _int)))
    for m in mu_grid:
        _check_mu("region.mu_grid", m)
    if list(mu_grid) != sorted(mu_grid):
        raise ConfigError("region.mu_grid must be sorted")

    rate_text = raw["discrete"]["rate"].strip().lower()
    rate = None if rate_text == "optimize" else f("discrete", "rate")
    if rate is not None and not rate > 0:
        raise ConfigError("discrete.rate must be > 0 or 'optimize'")
    levels = tuple(_field(raw, "discrete", "levels",
                          lambda t: [_int(v) for v in t.split(",") if v.strip()]))
    if not levels or min(levels) < 1:
        raise ConfigError("discrete.levels must be integers >= 1")

    fmode = raw["fairness"]["mode"].strip()
    if fmode not in ("prioritized", "proportional"):
        raise ConfigError("fairness.mode must be 'prioritized' or 'proportional'")

    cfg = Config(
        schemes=schemes, mode=mode, seed=f("run", "seed", _int),
        output_dir=raw["run"]["output_dir"].strip(), threads=f("run", "threads", _int),
        snr_db=f("snr", "snr_db"),
        snr_grid=tuple(float(x) for x in _field(raw, "snr", "snr_grid", parse_grid)),
        pbar=f("snr", "pbar"), budget1=budget1, budgetB=budgetB,
        p1_watt=dbm_to_watt(ph("p1_dbm")), pB_watt=dbm_to_watt(ph("pB_dbm")),
        cal_slots=f("slots", "calibration", _int), eval_slots=f("slots", "evaluation", _int),
        tol=f("calibration", "tol"), mu=_check_mu("calibration.mu", f("calibration", "mu")),
        mu_grid=mu_grid, sumrate_mu=_check_mu("sumrate.mu", f("sumrate", "mu")),
        levels=levels, rate=rate,
        rate_grid=tuple(float(x) for x in _field(raw, "discrete", "rate_grid", parse_grid)),
        search_slots=f("discrete", "search_slots", _int),
        r0=f("outage", "r0"), outage_mu=_check_mu("outage.mu", f("outage", "mu")),
        min_events=f("outage", "min_events", _int),
        chunk_slots=f("outage", "chunk_slots", _int), max_slots=f("outage", "max_slots", _int),
        min_slots=f("outage", "min_slots", _int),
        fairness_mode=fmode, fairness_target=f("fairness", "target"),
        fairness_slots=f("fairness", "slots", _int),
        fairness_joint=_field(raw, "fairness", "joint", _bool),
        table_points=f("fairness", "table_points", _int),
        table_slots=f("fairness", "table_slots", _int),
        record_every=f("fairness", "record_every", _int),
        delta0=f("estimator", "delta0"), exponent=f("estimator", "exponent"),
        mu_delta0=f("estimator", "mu_delta0"), mu_exponent=f("estimator", "mu_exponent"),
        raw=raw,
    )
    _validate(cfg)
    return cfg


def _validate(cfg: Config) -> None:
    if cfg.pbar <= 0:
        raise ConfigError("snr.pbar must be > 0")
    if not cfg.snr_grid:
        raise ConfigError("snr.snr_grid must not be empty")
    for name in ("cal_slots", "eval_slots", "fairness_slots", "table_slots", "chunk_slots",
                 "max_slots", "min_slots", "record_every", "min_events", "search_slots"):
        if getattr(cfg, name) < 1:
            raise ConfigError(f"{name} must be >= 1")
    if cfg.table_points < 2:
        raise ConfigError("fairness.table_points must be >= 2")
    if not 0 < cfg.tol < 1:
        raise ConfigError("calibration.tol must be in (0, 1)")
    if cfg.r0 <= 0:
        raise ConfigError("outage.r0 must be > 0")
    if not cfg.rate_grid or min(cfg.rate_grid) <= 0:
        raise ConfigError("discrete.rate_grid must be positive")
    if cfg.fairness_target < 0 or (cfg.fairness_mode == "proportional"
                                   and cfg.fairness_target <= 0):
        raise ConfigError("fairness.target out of range")
    if cfg.mode == "physical" and any(b.distance_m <= 0 for b in (cfg.budget1, cfg.budgetB)):
        raise ConfigError("physical distances must be > 0")
    if not (0 < cfg.delta0 < 1 and 0 < cfg.mu_delta0 < 1):
        raise ConfigError("estimator delta0 values must be in (0, 1)")
    if not (0.5 < cfg.exponent <= 1 and 0.5 < cfg.mu_exponent <= 1):
        raise ConfigError("estimator exponents must be in (0.5, 1]")


def parse_config_text(text: str, overrides: Optional[dict] = None,
                      env: Optional[dict] = None) -> Config:
    """Parse INI text; ``overrides`` maps ``section.key`` to string values."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    raw = _raw_sections(cp)
    env = os.environ if env is None else env
    if env.get(OUTPUT_ENV):
        raw["run"]["output_dir"] = env[OUTPUT_ENV]
    for dotted, value in (overrides or {}).items():
        sec, _, key = dotted.partition(".")
        if sec not in DEFAULTS or key not in DEFAULTS[sec]:
            raise ConfigError(f"unknown override {dotted}")
        raw[sec][key] = str(value)
    return build_config(raw)


def parse_config(path=None, overrides: Optional[dict] = None,
                 env: Optional[dict] = None) -> Config:
    """Read and validate a config file (``None`` means all defaults)."""
    text = ""
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_config_text(text, overrides, env)
