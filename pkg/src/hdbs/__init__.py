"""Scheduling of in-band uplink and downlink at a half-duplex base station."""

from .core import (DiscreteRateSet, NetworkState, SelectionMetrics, SlotDecision, SlotGains,
                   best_discrete_rate, capacity, discrete_supportable, select_state)
from .channel import ChannelTrace, LinkBudget, derive_seed, generate_trace, snr_mean_gain
from .schedulers import (DualState, Scheme, SchemeConfig, decide, decide_adaptive,
                         decide_discrete, decide_fixed, evaluate, waterfill_power)
from .calibration import (Calibration, CalibrationError, average_consumed_power, calibrate,
                          calibrate_zeta, solve_discrete_powers, solve_fixed_powers)

__version__ = "0.1.0"
