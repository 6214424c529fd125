import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ofalab.errors import ParameterError
from ofalab.seeding import SeedPolicy
from ofalab.stakes import (
    RewardModel,
    StakeConfig,
    chebyshev_stability,
    growth_rate,
    limiting_distribution_residual,
    martingale_statistics,
    mean_reward,
    sample_reward,
    share_distribution,
    simulate,
    simulate_ensemble,
    step,
    variance_recursion,
)

REWARD = RewardModel(mu=0.7, beta_v=11.0, builder_bids=(15.0, 20.0))


def config(gamma=1.5, alpha=8.0, horizon=1000, stakes=(10.0, 20.0, 30.0), reward=REWARD):
    return StakeConfig(stakes, alpha, gamma, reward, horizon)


def test_two_point_reward():
    values, probs = REWARD.atoms()
    assert values.tolist() == [11.0, 14.0]
    assert probs == pytest.approx([15 / 35, 20 / 35])
    assert mean_reward(REWARD) == pytest.approx(445 / 35, abs=1e-12)
    assert (REWARD.r_min, REWARD.r_max) == (11.0, 14.0)


def test_reward_dominated_by_beta_v():
    r = RewardModel(mu=0.5, beta_v=50.0, builder_bids=(15.0, 20.0))
    assert mean_reward(r) == 50.0
    assert np.all(sample_reward(r, np.random.default_rng(0), 100) == 50.0)


def test_single_builder_mean():
    assert mean_reward(RewardModel(mu=0.7, beta_v=1.0, builder_bids=(20.0,))) == pytest.approx(14.0)


def test_spread_above_beta_keeps_mean():
    r = RewardModel(mu=0.5, beta_v=1.0, builder_bids=(15.0, 20.0), spread=4.0)
    assert mean_reward(r) == pytest.approx(0.5 * (15 * 15 + 20 * 20) / 35)


def test_spread_mean_matches_sampling():
    r = RewardModel(mu=0.7, beta_v=11.0, builder_bids=(15.0, 20.0), spread=6.0,
                    builder_supports=((10.0, 19.0), (16.0, 30.0)))
    x = sample_reward(r, np.random.default_rng(1), 1_000_000)
    assert abs(x.mean() - mean_reward(r)) < 3 * x.std() / 1000
    assert x.min() >= r.r_min and x.max() <= r.r_max


def test_empirical_reward_mean():
    x = sample_reward(REWARD, np.random.default_rng(2), 1_000_000)
    assert set(np.unique(x).tolist()) == {11.0, 14.0}
    assert abs(x.mean() - 445 / 35) < 3 * x.std() / 1000


def test_alternative_payment_rule():
    r = RewardModel(mu=0.7, beta_v=1.0, builder_bids=(20.0,), validator_payment="one_minus_mu")
    assert mean_reward(r) == pytest.approx(6.0)


def test_step_example():
    new = step([10, 20, 30], 14, 2, 8, 0)
    assert new == pytest.approx([8.6666666667, 17.3333333333, 40.0])
    assert new.sum() == pytest.approx(66.0, abs=1e-12)


def test_step_without_cost_changes_only_the_winner():
    assert step([10.0, 20.0], 5.0, 0, 0.0, 0.7).tolist() == [15.0, 20.0]


@settings(max_examples=200, deadline=None)
@given(
    stakes=st.lists(st.floats(0.1, 1e4), min_size=1, max_size=6),
    reward=st.floats(1.0, 100.0), gamma=st.floats(0.0, 2.0), frac=st.floats(0.0, 0.99),
    data=st.data(),
)
def test_step_total_identity(stakes, reward, gamma, frac, data):
    S = sum(stakes)
    alpha = frac * min(S**gamma * reward, S, reward)
    j = data.draw(st.integers(0, len(stakes) - 1))
    if len(stakes) > 1 and alpha >= S ** (1 + gamma):
        # the cost bound alone does not keep unselected stakes positive when S < 1
        with pytest.raises(ParameterError, match="non-positive"):
            step(stakes, reward, j, alpha, gamma)
        return
    new = step(stakes, reward, j, alpha, gamma)
    assert new.sum() == pytest.approx(S + reward - alpha / S**gamma, rel=1e-12)
    assert new.sum() > S and np.all(new > 0)


def test_cost_bound_does_not_protect_small_individual_stakes():
    # alpha = 0.25 satisfies the bound for S = 0.5, gamma = 1, R = 1, yet the
    # cost factor alpha / S^(1 + gamma) equals 1 and wipes out the unselected stake
    r = RewardModel(mu=0.5, beta_v=1.0, builder_bids=(1.0,))
    StakeConfig((0.25, 0.25), 0.25, 1.0, r, 1)
    with pytest.raises(ParameterError, match="non-positive"):
        step([0.25, 0.25], 1.0, 0, 0.25, 1.0)


def test_step_rejects_excess_cost():
    with pytest.raises(ParameterError):
        step([1.0, 1.0], 1.0, 0, 5.0, 0.0)


def test_config_enforces_cost_bound():
    with pytest.raises(ParameterError, match="staking cost"):
        config(alpha=11.0, gamma=1.5)
    with pytest.raises(ParameterError, match="strictly positive"):
        config(stakes=(10.0, 0.0))


def test_simulate_is_deterministic_and_consistent():
    cfg = config()
    a, b = simulate(cfg, 5), simulate(cfg, 5)
    assert np.array_equal(a.stakes, b.stakes) and np.array_equal(a.selected, b.selected)
    assert np.allclose(a.stakes.sum(axis=1), a.totals, rtol=1e-12)
    assert np.all(np.diff(a.totals) > 0)
    assert np.allclose(a.shares.sum(axis=1), 1.0)
    assert a.stakes.shape == (1001, 3) and a.rewards.shape == (1000,)
    assert set(np.unique(a.rewards).tolist()) <= {11.0, 14.0}


def test_single_validator_keeps_full_share():
    tr = simulate(config(stakes=(60.0,), horizon=50), 0)
    assert np.all(tr.shares == 1.0)


def test_ensemble_rows_match_single_runs():
    cfg = config(horizon=300)
    policy = SeedPolicy(11)
    ens = simulate_ensemble(cfg, 8, policy, task="t")
    for r in (0, 5):
        tr = simulate(cfg, policy.seed_sequence("t", r))
        assert np.array_equal(tr.stakes[-1], ens.final_stakes[r])
        assert np.array_equal(tr.stakes[150], ens.midpoint_stakes[r])


def test_ensemble_aggregates():
    ens = simulate_ensemble(config(horizon=200), 50, 0)
    assert ens.mean_totals.shape == (201,)
    assert ens.mean_shares[0] == pytest.approx([1 / 6, 1 / 3, 1 / 2])
    assert ens.sd_totals[0] == 0.0


def test_symmetric_martingale():
    cfg = config(stakes=(30.0, 30.0), horizon=300)
    ens = simulate_ensemble(cfg, 2000, 3)
    for s in martingale_statistics(ens.final_shares, cfg.initial_shares):
        assert s.within_3se and s.initial == 0.5


def test_martingale_without_cost():
    cfg = config(alpha=0.0, horizon=300)
    ens = simulate_ensemble(cfg, 3000, 4)
    assert all(s.within_3se for s in martingale_statistics(ens.final_shares, cfg.initial_shares))


def test_growth_with_constant_reward_is_exact():
    r = RewardModel(mu=0.5, beta_v=5.0, builder_bids=(2.0,))
    cfg = config(alpha=0.0, gamma=0.0, reward=r, horizon=200)
    ens = simulate_ensemble(cfg, 3, 0)
    est = growth_rate(ens.mean_totals, cfg)
    assert est.slope == pytest.approx(5.0, rel=1e-12)


def test_growth_flags_short_horizon():
    cfg = config(gamma=1.5, horizon=60)
    est = growth_rate(simulate_ensemble(cfg, 5, 0).mean_totals, cfg)
    assert not est.sufficient


def test_variance_recursion_properties():
    cfg = config(gamma=0.0)
    rec = variance_recursion(cfg)
    assert rec.method == "exact" and rec.a[0] == 0.0
    assert np.all(np.diff(rec.a) >= 0) and np.all(rec.a <= min(1.0, rec.upper_bound))
    mc = variance_recursion(cfg, t_max=100, z_estimator="monte_carlo", paths=50_000, seed=0)
    assert mc.a[100] == pytest.approx(rec.a[100], rel=5e-3)


def test_variance_recursion_needs_gamma_zero():
    with pytest.raises(ParameterError):
        variance_recursion(config(gamma=1.5))


def test_variance_recursion_deterministic_reward():
    r = RewardModel(mu=0.5, beta_v=5.0, builder_bids=(2.0,))
    cfg = config(alpha=1.0, gamma=0.0, reward=r, horizon=10)
    rec = variance_recursion(cfg)
    S = 60 + 4 * np.arange(1, 11)
    assert rec.z[1:] == pytest.approx((5 / S) ** 2)


def test_chebyshev_vacuous_and_halving():
    cfg = config(gamma=0.0)
    shares = np.tile(cfg.initial_shares, (10, 1))
    small = chebyshev_stability(cfg, 0.1, shares)
    assert all(c.status == "vacuous" for c in small)
    big = config(gamma=0.0, stakes=(1e5, 2e5, 3e5))
    checks = chebyshev_stability(big, 0.1, np.tile(big.initial_shares, (10, 1)))
    assert checks[0].status == "pass" and checks[0].empirical == 0.0
    assert checks[1].bound == pytest.approx(checks[0].bound / 2)


def test_share_distribution_boundaries():
    assert np.all(share_distribution(0.0, 60.0, REWARD, 100, 20) == 0.0)
    assert np.all(share_distribution(60.0, 0.0, REWARD, 100, 20) == 1.0)


def test_symmetric_urn_median():
    # compare the two sides of 1/2 rather than P(x <= 1/2) with 1/2
    x = share_distribution(30.0, 30.0, REWARD, 300, 20_000, 2)
    below, above = np.mean(x < 0.5), np.mean(x > 0.5)
    assert abs(below - above) < 3 * np.sqrt((below + above) / x.size)


def test_functional_equation_small():
    cfg = config(alpha=0.0, gamma=0.0, horizon=200)
    fe = limiting_distribution_residual(cfg, validator=1, replications=3000, seeds=1)
    assert fe.passes
    with pytest.raises(ParameterError):
        limiting_distribution_residual(config(gamma=0.0), replications=10)


def test_trajectory_rows():
    tr = simulate(config(horizon=5), 0)
    rows = list(tr.rows())
    assert tr.header()[:4] == ["t", "S_t", "R_t", "selected"]
    assert len(rows) == 6 and rows[0][2] == "" and rows[1][3] in (1, 2, 3)
