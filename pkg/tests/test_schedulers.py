import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdbs.channel import generate_trace
from hdbs.core import DiscreteRateSet, NetworkState, SlotGains, discrete_supportable
from hdbs.schedulers import (LN2, DualState, Link, SchemeConfig, decide, decide_adaptive,
                             decide_discrete, decide_fixed, evaluate, simulate, waterfill_power,
                             waterfill_powers)

gain = st.floats(0, 50, allow_nan=False)
price = st.floats(1e-3, 5)
weight = st.floats(0, 1)


def lagrangian(mu, zeta1, zetaB, state, p, r):
    if state is NetworkState.UPLINK:
        return mu * r - zeta1 * p
    if state is NetworkState.DOWNLINK:
        return (1 - mu) * r - zetaB * p
    return 0.0


def test_waterfill_grid_oracle():
    w, z, g = 0.5, 0.5 / (2 * LN2), 1.0
    grid = np.arange(0, 100, 1e-4)
    best = grid[np.argmax(w * np.log2(1 + grid * g) - z * grid)]
    assert waterfill_power(g, w, z) == pytest.approx(1.0, abs=1e-12)
    assert abs(best - 1.0) <= 1e-4


def test_waterfill_threshold_and_zero():
    w, z = 0.5, 0.2
    th = z * LN2 / w
    assert waterfill_power(th * 0.999, w, z) == 0.0
    assert waterfill_power(th * 1.001, w, z) > 0.0
    assert waterfill_power(0.0, w, z) == 0.0
    assert waterfill_power(3.0, 0.0, z) == 0.0
    with pytest.raises(ValueError):
        waterfill_power(1.0, 0.5, 0.0)
    with pytest.raises(ValueError):
        waterfill_powers(np.ones(3), 0.5, 0.0)


@given(gain, weight, price)
def test_waterfill_vector_matches_scalar(g, w, z):
    assert waterfill_powers(np.array([g]), w, z)[0] == pytest.approx(waterfill_power(g, w, z),
                                                                     abs=1e-12)


def test_adaptive_examples():
    d = decide_adaptive(SlotGains(5.0, 5.0), DualState(0.1, 0.1, mu=1.0))
    assert d.state is NetworkState.UPLINK
    d = decide_adaptive(SlotGains(0.01, 0.01), DualState(1.0, 1.0, mu=0.5))
    assert d.state is NetworkState.SILENT and d.power == 0 and d.rate == 0
    d = decide_adaptive(SlotGains(4.0, 3.0), DualState(0.2, 0.2, mu=0.5))
    assert d.state is NetworkState.UPLINK
    assert d.power == pytest.approx(0.5 / (0.2 * LN2) - 0.25)
    assert d.rate == pytest.approx(math.log2(1 + 4 * d.power))


def test_fixed_examples():
    assert decide_fixed(SlotGains(0, 0), DualState(0.1, 0.1, 1, 1)).state is NetworkState.SILENT
    assert decide_fixed(SlotGains(2, 1), DualState(0.1, 0.1, 1, 1)).state is NetworkState.UPLINK
    # Lambda1 = 0.5*log2(4) - 0.1 = 0.9 versus a downlink that cannot beat it
    d = decide_fixed(SlotGains(3.0, 0.0), DualState(0.1, 0.1, 1.0, 1.0, mu=0.5))
    assert d.state is NetworkState.UPLINK and d.rate == 2.0 and d.power == 1.0
    assert lagrangian(0.5, 0.1, 0.1, d.state, d.power, d.rate) == pytest.approx(0.9)


def test_discrete_examples():
    rates = DiscreteRateSet((1.0,))
    dual = DualState(0.1, 0.1, 1.0, 1.0, mu=0.5)
    d = decide_discrete(SlotGains(0.1, 0.1), dual, rates, rates)
    assert d.state is NetworkState.SILENT and d.outage
    d = decide_discrete(SlotGains(1.0, 0.5), dual, rates, rates)
    assert d.state is NetworkState.UPLINK and d.rate == 1.0 and not d.outage
    two = DiscreteRateSet((1.0, 2.0))
    # capacities 2.5 and 1.5: Lambda1 = 0.5*2 - 0.1 > LambdaB = 0.5*1 - 0.1
    d = decide_discrete(SlotGains(2 ** 2.5 - 1, 2 ** 1.5 - 1), dual, two, two)
    assert d.state is NetworkState.UPLINK and d.rate == 2.0 and d.rate_index == 1


def test_endpoint_exclusion_random_slots():
    t = generate_trace(10 ** 5, 3.0, 3.0, 11)
    rates = DiscreteRateSet((1.0, 2.0))
    for cfg in (SchemeConfig.adaptive(), SchemeConfig.fixed(), SchemeConfig.discrete(rates, rates)):
        up = simulate(t.gamma1, t.gammaB, cfg, DualState(0.2, 0.2, 1.0, 1.0, mu=1.0))
        assert not np.any(up.state == NetworkState.DOWNLINK)
        down = simulate(t.gamma1, t.gammaB, cfg, DualState(0.2, 0.2, 1.0, 1.0, mu=0.0))
        assert not np.any(down.state == NetworkState.UPLINK)


def test_discrete_no_false_transmissions():
    t = generate_trace(10 ** 5, 1.0, 1.0, 12)
    rates = DiscreteRateSet((1.0, 2.0, 3.0))
    dec = simulate(t.gamma1, t.gammaB, SchemeConfig.discrete(rates, rates),
                   DualState(0.05, 0.05, 1.5, 1.5, 0.5))
    up = dec.state == NetworkState.UPLINK
    assert np.all(np.log2(1 + 1.5 * t.gamma1[up]) >= dec.rate1[up])
    assert np.all(dec.rate1[up] > 0)
    assert np.array_equal(dec.out1 & up, np.zeros_like(up))


def _enumerate(config, g, dual, grid):
    best = 0.0
    for link, gg, w, z, p_fix in ((Link.UP, g.gamma1, dual.mu, dual.zeta1, dual.p1),
                                  (Link.DOWN, g.gammaB, 1 - dual.mu, dual.zetaB, dual.pB)):
        if config.scheme.value == "adaptive":
            vals = w * np.log2(1 + grid * gg) - z * grid
            best = max(best, float(vals.max()), w * math.log2(1 + grid[-1] * gg) - z * grid[-1])
        elif config.scheme.value == "fixed":
            best = max(best, w * math.log2(1 + p_fix * gg) - z * p_fix)
        else:
            for r in config.rates(link).rates:
                ok = discrete_supportable(p_fix, gg, r)
                best = max(best, w * r * ok - z * p_fix)
    return best


rates_st = st.lists(st.floats(0.1, 8), min_size=1, max_size=4, unique=True).map(
    lambda xs: DiscreteRateSet(tuple(sorted(xs))))
duals = st.builds(DualState, price, price, st.floats(0, 10), st.floats(0, 10), weight)


@settings(max_examples=300, deadline=None)
@given(gain, gain, duals, rates_st)
def test_per_slot_lagrangian_optimality(g1, gB, dual, rates):
    g = SlotGains(g1, gB)
    for cfg in (SchemeConfig.fixed(), SchemeConfig.discrete(rates, rates)):
        d = decide(g, dual, cfg)
        got = lagrangian(dual.mu, dual.zeta1, dual.zetaB, d.state, d.power, d.rate)
        assert got >= _enumerate(cfg, g, dual, None) - 1e-9
    d = decide(g, dual, SchemeConfig.adaptive())
    got = lagrangian(dual.mu, dual.zeta1, dual.zetaB, d.state, d.power, d.rate)
    top = max(waterfill_power(g1, dual.mu, dual.zeta1), waterfill_power(gB, 1 - dual.mu,
                                                                        dual.zetaB), 1.0)
    grid = np.linspace(0, 2 * top, 2001)
    assert got >= _enumerate(SchemeConfig.adaptive(), g, dual, grid) - 1e-9


def test_vectorized_matches_scalar():
    t = generate_trace(300, 2.0, 1.0, 3)
    rates = DiscreteRateSet((0.5, 1.5, 3.0))
    dual = DualState(0.3, 0.2, 1.2, 0.8, 0.4)
    for cfg in (SchemeConfig.adaptive(), SchemeConfig.fixed(), SchemeConfig.discrete(rates, rates)):
        dec = simulate(t.gamma1, t.gammaB, cfg, dual)
        for i, g in enumerate(t.slots):
            d = decide(g, dual, cfg)
            assert dec.state[i] == d.state
            r = dec.rate1[i] if d.state is NetworkState.UPLINK else dec.rateB[i]
            assert r == pytest.approx(d.rate, abs=1e-12)
            if dec.out1 is not None:
                assert bool(dec.out1[i]) == (d.outage and d.state is not NetworkState.DOWNLINK)


def test_evaluate_stats():
    t = generate_trace(1000, 1.0, 1.0, 4)
    st_ = evaluate(t, SchemeConfig.fixed(), DualState(100.0, 100.0, 1.0, 1.0))
    assert st_.r1 == st_.rB == 0 and st_.silent == 1000
    st_ = evaluate(t, SchemeConfig.fixed(), DualState(0.0, 0.0, 1.0, 1.0))
    assert st_.silent == 0 and st_.p1 + st_.pB == pytest.approx(1.0)
    assert st_.weighted(0.5) == pytest.approx(0.5 * st_.sum_rate)


def test_dual_state_validation():
    with pytest.raises(ValueError, match="mu out of"):
        DualState(1, 1, mu=1.2)
    with pytest.raises(ValueError):
        DualState(-1, 1)
    with pytest.raises(ValueError):
        SchemeConfig.discrete(None, None)
