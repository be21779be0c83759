import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hdbs.core import (DiscreteRateSet, NetworkState, SelectionMetrics, SlotDecision,
                       SlotGains, best_discrete_rate, best_discrete_rates, capacities,
                       capacity, discrete_supportable, select_state, select_states)

finite = st.floats(-10, 10, allow_nan=False)
nonneg = st.floats(0, 1e3, allow_nan=False)


@pytest.mark.parametrize("power,gain,expected", [(0, 5.0, 0.0), (3.0, 1.0, 2.0), (1.0, 1.0, 1.0)])
def test_capacity_examples(power, gain, expected):
    assert capacity(power, gain) == expected


@pytest.mark.parametrize("power,gain", [(-1, 1), (1, -1), (math.inf, 1), (1, math.nan)])
def test_capacity_rejects_bad_input(power, gain):
    with pytest.raises(ValueError):
        capacity(power, gain)


@pytest.mark.parametrize("l1,lB,state", [
    (0.5, 0.3, NetworkState.UPLINK),
    (0.2, 0.2, NetworkState.UPLINK),
    (-0.1, 0.0, NetworkState.SILENT),
    (0.1, 0.4, NetworkState.DOWNLINK),
    (0.0, 0.0, NetworkState.SILENT),
])
def test_select_state_examples(l1, lB, state):
    assert select_state(SelectionMetrics(l1, lB)) is state


def test_select_state_rejects_nan():
    with pytest.raises(ValueError):
        select_state(SelectionMetrics(math.nan, 0.0))


def test_select_state_partition_dense_grid():
    # axes and the diagonal are on the grid
    vals = np.linspace(-1, 1, 81)
    for a in vals:
        for b in vals:
            up = a >= b and a > 0
            down = b > a and b > 0
            silent = a <= 0 and b <= 0
            assert up + down + silent == 1
            s = select_state(SelectionMetrics(float(a), float(b)))
            assert s is (NetworkState.UPLINK if up else NetworkState.DOWNLINK if down
                         else NetworkState.SILENT)


@given(finite, finite)
def test_select_states_matches_scalar(a, b):
    vec = select_states(np.array([a]), np.array([b]))[0]
    assert vec == select_state(SelectionMetrics(a, b))


def test_state_indicators_half_duplex():
    for s in NetworkState:
        assert s.q1 + s.qB in (0, 1)
        d = SlotDecision(s)
        assert d.q1 == s.q1 and d.qB == s.qB


@pytest.mark.parametrize("p,g,r,ok", [(1.0, 1.0, 1.0, True), (1.0, 0.5, 1.0, False),
                                      (3.0, 1.0, 2.0, True)])
def test_discrete_supportable_examples(p, g, r, ok):
    assert discrete_supportable(p, g, r) is ok


def test_discrete_supportable_rejects_nonpositive_rate():
    with pytest.raises(ValueError):
        discrete_supportable(1, 1, 0)


def _gain_for_cap(cap, power=1.0):
    return (2.0 ** cap - 1.0) / power


def test_best_discrete_rate_examples():
    rates = DiscreteRateSet((1, 2, 3))
    assert best_discrete_rate(1.0, _gain_for_cap(2.5), rates) == (2.0, 1)
    assert best_discrete_rate(1.0, _gain_for_cap(0.5), rates) == (0.0, None)
    # 2**3 - 1 = 7 exactly, capacity 3.0 is inclusive
    assert best_discrete_rate(1.0, 7.0, rates) == (3.0, 2)


def test_rate_set_validation():
    for bad in [(), (0,), (1, 1), (2, 1), (1, math.inf)]:
        with pytest.raises(ValueError):
            DiscreteRateSet(bad)
    assert DiscreteRateSet.ladder(4, 2.5).rates == (2.5, 5.0, 7.5, 10.0)
    with pytest.raises(ValueError):
        DiscreteRateSet.ladder(0, 1.0)


def test_slot_gains_validation():
    with pytest.raises(ValueError):
        SlotGains(-1.0, 1.0)
    with pytest.raises(ValueError):
        SlotGains(1.0, math.nan)


rate_sets = st.lists(st.floats(0.05, 12), min_size=1, max_size=6, unique=True).map(
    lambda xs: DiscreteRateSet(tuple(sorted(xs))))


@given(nonneg, nonneg, nonneg)
def test_capacity_monotone(p, g, extra):
    assert capacity(p + extra, g) >= capacity(p, g)
    assert capacity(p, g + extra) >= capacity(p, g)


@given(st.floats(0, 100), st.floats(0, 1e3), st.floats(0, 1e3), rate_sets)
def test_best_rate_monotone_in_gain(p, g, extra, rates):
    assert best_discrete_rate(p, g + extra, rates)[0] >= best_discrete_rate(p, g, rates)[0]


@given(st.floats(0, 100), st.floats(0, 1e3), rate_sets)
def test_best_rate_indicator_consistency(p, g, rates):
    r, idx = best_discrete_rate(p, g, rates)
    if r > 0:
        assert discrete_supportable(p, g, r)
        assert rates[idx] == r
        assert not any(discrete_supportable(p, g, x) for x in rates.rates[idx + 1:])
    else:
        assert idx is None
        assert not any(discrete_supportable(p, g, x) for x in rates.rates)
    # max over m of R^m O^m
    assert r == max([x for x in rates.rates if discrete_supportable(p, g, x)], default=0.0)


@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=20), st.floats(0, 50), rate_sets)
def test_vectorized_rates_match_scalar(gains, p, rates):
    cap = capacities(p, np.array(gains))
    val, idx = best_discrete_rates(cap, rates.rates)
    for g, v, i in zip(gains, val, idx):
        r, j = best_discrete_rate(p, g, rates)
        assert v == r
        assert (j is None and i == -1) or i == j
