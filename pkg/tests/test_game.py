import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ofalab.errors import ParameterError
from ofalab.game import (
    AuctionConfig,
    AuctionOutcome,
    BuilderParams,
    StrategyProfile,
    expected_utility,
    realized_revenue,
    sample_revenue_monte_carlo,
    utility_gradient,
    utility_second_derivative,
    win_probabilities,
    win_probability,
)

WORKED = AuctionConfig.from_arrays([100, 200], [40, 80])


def test_builder_params_reject_v_above_f():
    with pytest.raises(ParameterError, match="f_bar >= v_bar"):
        BuilderParams(10.0, 20.0)
    with pytest.raises(ParameterError):
        BuilderParams(10.0, 0.0)


def test_builder_defaults():
    b = BuilderParams(100.0, 40.0)
    assert b.r_max == 140.0
    assert 0 < b.r_min < b.r_max


def test_auction_config_validates_mu_and_epsilon():
    with pytest.raises(ParameterError):
        AuctionConfig.from_arrays([100], [40], mu=1.5)
    with pytest.raises(ParameterError):
        AuctionConfig.from_arrays([100], [40], epsilon=200.0)
    assert WORKED.epsilon == pytest.approx(1e-6 * 140)


def test_profile_must_be_positive():
    with pytest.raises(ParameterError):
        StrategyProfile([1.0, 0.0])


def test_win_probabilities():
    assert win_probability([1.0, 3.0], 1) == 0.75
    assert win_probabilities([2.0, 2.0, 4.0]).tolist() == [0.25, 0.25, 0.5]
    assert win_probability([5.0], 0) == 1.0
    with pytest.raises(IndexError):
        win_probability([1.0, 2.0], 2)


def test_revenue_table():
    o = dict(f=10.0, v=4.0, r=6.0)
    assert realized_revenue(AuctionOutcome(True, True, **o), 0.3) == 8.0
    assert realized_revenue(AuctionOutcome(True, False, **o), 0.3) == pytest.approx(-1.8)
    assert realized_revenue(AuctionOutcome(False, True, **o), 0.3) == pytest.approx(10.0 - 0.7 * 6.0)
    assert realized_revenue(AuctionOutcome(False, False, **o), 0.3) == 0.0


def test_utility_symmetric_profile():
    cfg = AuctionConfig.from_arrays([10, 10], [4, 4])
    # p = 1/2: f/2 + v/4 - h/2
    assert expected_utility(0, [3.0, 3.0], cfg) == pytest.approx(5 + 1 - 1.5)


def test_single_builder_utility():
    cfg = AuctionConfig.from_arrays([10], [4])
    assert expected_utility(0, [3.0], cfg) == pytest.approx(14 - 3)


def test_gradient_matches_printed_numerator():
    h = np.array([49.0, 82.0])
    f, v, hi, H = 100.0, 40.0, 49.0, 131.0
    printed = (-f * hi * H + f * H**2 + 2 * v * hi * H - 2 * v * hi**2 - 2 * hi * H**2 + hi**2 * H) / H**3
    assert utility_gradient(0, h, WORKED) == pytest.approx(printed, rel=1e-12)


def test_curvature_needs_two_builders():
    with pytest.raises(ParameterError):
        utility_second_derivative(0, [3.0], AuctionConfig.from_arrays([10], [4]))


def _random_config(seed, m=3):
    rng = np.random.default_rng(seed)
    f = 10 ** rng.uniform(0, 3, m)
    return AuctionConfig.from_arrays(f, f * (1 - 0.99 * rng.random(m))), rng


@pytest.mark.parametrize("seed", range(20))
def test_gradient_and_curvature_finite_differences(seed):
    cfg, rng = _random_config(seed)
    h = rng.uniform(0.05, 1.0, 3) * (cfg.f_bar + cfg.v_bar)
    for i in range(3):
        step = 1e-5 * h[i]
        up, dn = h.copy(), h.copy()
        up[i] += step
        dn[i] -= step
        fd = (expected_utility(i, up, cfg) - expected_utility(i, dn, cfg)) / (2 * step)
        assert utility_gradient(i, h, cfg) == pytest.approx(fd, rel=1e-6, abs=1e-9)
        fd2 = (utility_gradient(i, up, cfg) - utility_gradient(i, dn, cfg)) / (2 * step)
        assert utility_second_derivative(i, h, cfg) == pytest.approx(fd2, rel=1e-5, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(
    f=st.floats(0.1, 1e4), k=st.floats(1e-3, 1.0),
    own=st.floats(1e-3, 1.0), rest=st.floats(1e-3, 1e4),
)
def test_utility_strictly_concave_in_own_bid(f, k, own, rest):
    cfg = AuctionConfig.from_arrays([f, 1.0], [k * f, 0.5])
    h = [own * (f + k * f), rest]
    assert utility_second_derivative(0, h, cfg) < 0


def test_no_best_response_at_or_above_upper_bound():
    cfg, rng = _random_config(7, m=2)
    for _ in range(50):
        rest = 10 ** rng.uniform(-2, 3)
        upper = cfg.f_bar[0] + cfg.v_bar[0]
        assert utility_gradient(0, [upper, rest], cfg) < 0


@pytest.mark.parametrize("spread", [0.0, 5.0])
def test_monte_carlo_revenue_matches_utility(spread):
    cfg = AuctionConfig.from_arrays([100, 200, 60], [40, 80, 30], mu=0.3)
    h = [40.0, 70.0, 20.0]
    for i in range(3):
        mean, se = sample_revenue_monte_carlo(i, h, cfg, 200_000, seed=i, spread=spread)
        assert abs(mean - expected_utility(i, h, cfg)) < 4 * se


def test_monte_carlo_single_builder_is_deterministic():
    cfg = AuctionConfig.from_arrays([10], [4])
    mean, se = sample_revenue_monte_carlo(0, [3.0], cfg, 100, seed=0)
    assert mean == 11.0 and se == 0.0


def test_scaled_config():
    s = WORKED.scaled(2.0)
    assert s.f_bar.tolist() == [200.0, 400.0]
    assert s.epsilon == pytest.approx(2 * WORKED.epsilon)
    assert math.isclose(expected_utility(1, [100.0, 160.0], s), 2 * expected_utility(1, [50.0, 80.0], WORKED))
