"""Block-fading channel traces and the path-loss link budget.

Random numbers come from numpy's PCG64 bit generator (``numpy.random.PCG64``,
stable stream since numpy 1.17). Uniforms are drawn with
``Generator.random`` as an ``(n, 2)`` array, column 0 feeding ``gamma1`` and
column 1 feeding ``gammaB``, and mapped to exponentials by the inverse CDF
``-mean * log1p(-u)``. Exponential |h|^2 is a Rayleigh envelope.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import SlotGains

SPEED_OF_LIGHT = 299_792_458.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def derive_seed(base: int, *keys: int) -> int:
    """Deterministic 63-bit child seed of ``base`` for the given integer keys."""
    ss = np.random.SeedSequence(entropy=int(base), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class LinkBudget:
    carrier_hz: float
    distance_m: float
    path_loss_exp: float
    tx_antenna_gain: float = 1.0
    rx_antenna_gain: float = 1.0
    noise_figure_db: float = 0.0
    bandwidth_hz: float = 1.0
    noise_floor_dbm_per_hz: float = -174.0


def mean_channel_gain(budget: LinkBudget) -> float:
    """Mean of |h|^2 under free-space reference loss and exponent ``beta``."""
    if budget.distance_m <= 0 or budget.carrier_hz <= 0:
        raise ValueError("distance and carrier frequency must be > 0")
    ref = (SPEED_OF_LIGHT / (4.0 * math.pi * budget.carrier_hz)) ** 2
    return (ref * budget.distance_m ** (-budget.path_loss_exp)
            * budget.tx_antenna_gain * budget.rx_antenna_gain)


def noise_power(budget: LinkBudget) -> float:
    """Thermal noise power in watts over the budget's bandwidth."""
    mw_per_hz = 10.0 ** ((budget.noise_floor_dbm_per_hz + budget.noise_figure_db) / 10.0)
    return mw_per_hz * budget.bandwidth_hz * 1e-3


def mean_normalized_gain(budget: LinkBudget) -> float:
    """Mean of gamma = |h|^2 / sigma^2, in 1/W."""
    return mean_channel_gain(budget) / noise_power(budget)


@dataclass(frozen=True, eq=False)
class ChannelTrace:
    gamma1: np.ndarray
    gammaB: np.ndarray
    seed: int
    mean_gamma1: float
    mean_gammaB: float

    def __post_init__(self):
        if len(self.gamma1) < 1 or len(self.gamma1) != len(self.gammaB):
            raise ValueError("trace needs >= 1 slot and equal-length links")

    def __len__(self) -> int:
        return len(self.gamma1)

    @property
    def slots(self) -> Iterator[SlotGains]:
        for g1, gB in zip(self.gamma1.tolist(), self.gammaB.tolist()):
            yield SlotGains(g1, gB)

    def head(self, n: int) -> "ChannelTrace":
        return ChannelTrace(self.gamma1[:n], self.gammaB[:n], self.seed,
                            self.mean_gamma1, self.mean_gammaB)

    def swapped(self) -> "ChannelTrace":
        """Same trace with the two links exchanged."""
        return ChannelTrace(self.gammaB, self.gamma1, self.seed,
                            self.mean_gammaB, self.mean_gamma1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write("slot,gamma1,gammaB\n")
            for i, (g1, gB) in enumerate(zip(self.gamma1.tolist(), self.gammaB.tolist())):
                fh.write(f"{i},{g1!r},{gB!r}\n")

    @classmethod
    def from_csv(cls, path, seed: int = 0) -> "ChannelTrace":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        g1 = np.array([float(r["gamma1"]) for r in rows])
        gB = np.array([float(r["gammaB"]) for r in rows])
        return cls(g1, gB, seed, float(g1.mean()), float(gB.mean()))


def generate_trace(n: int, mean_gamma1: float, mean_gammaB: float, seed: int) -> ChannelTrace:
    """I.i.d. Rayleigh block-fading trace; bit-identical for identical arguments."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (mean_gamma1 > 0 and mean_gammaB > 0):
        raise ValueError("mean gains must be > 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random((n, 2))
    g1 = -mean_gamma1 * np.log1p(-u[:, 0])
    gB = -mean_gammaB * np.log1p(-u[:, 1])
    return ChannelTrace(g1, gB, seed, float(mean_gamma1), float(mean_gammaB))


def snr_mean_gain(snr_db: float, pbar: float = 1.0) -> float:
    """Mean gamma giving average received SNR ``snr_db`` at average power ``pbar``."""
    return db_to_linear(snr_db) / pbar

