"""Validators' stake shares: a Polya urn with random rewards and staking costs.

Each round one validator is selected with probability equal to its stake share
and receives the reward ``R_t = max(beta_w, beta_v)``, where ``beta_w`` is the
winning builder's payment to the validator and ``beta_v`` the value of a
self-built block.  Every validator also pays ``alpha * s_j / S**(1 + gamma)``:

    s_j <- s_j + R_t * 1{j selected} - alpha * s_j / S**(1 + gamma)
    S   <- S + R_t - alpha / S**gamma

Shares ``s_j / S`` form a martingale.

Randomness: every replication owns one generator.  Each step consumes two
uniforms from it (validator selection, winning builder) plus a third when bids
are spread, so a replication is reproducible on its own and independent of how
many replications run alongside it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Sequence

import numpy as np
from scipy import stats

from .errors import ParameterError
from .seeding import SeedPolicy

__all__ = [
    "RewardModel",
    "StakeConfig",
    "Trajectory",
    "Ensemble",
    "sample_reward",
    "mean_reward",
    "step",
    "simulate",
    "simulate_ensemble",
    "GrowthEstimate",
    "growth_rate",
    "ShareStatistic",
    "martingale_statistics",
    "VarianceRecursion",
    "variance_recursion",
    "StabilityCheck",
    "chebyshev_stability",
    "share_distribution",
    "FunctionalEquationCheck",
    "limiting_distribution_residual",
]

PAYMENT_RULES = ("mu", "one_minus_mu")
_CHUNK = 256


@dataclass(frozen=True)
class RewardModel:
    """Distribution of the proposer's per-block reward.

    The winning builder is drawn with probability ``h_i / sum(h)``; its bid is
    a point mass at ``h_i`` or, with ``spread > 0``, uniform on
    ``[h_i - spread, h_i + spread]`` clipped to ``builder_supports[i]``.  The
    validator is paid ``mu * r`` by default; ``validator_payment="one_minus_mu"``
    pays ``(1 - mu) * r`` instead.
    """

    mu: float
    beta_v: float
    builder_bids: tuple[float, ...]
    builder_supports: tuple[tuple[float, float], ...] | None = None
    spread: float = 0.0
    validator_payment: str = "mu"

    def __post_init__(self):
        bids = tuple(float(h) for h in np.atleast_1d(self.builder_bids))
        if not bids or any(not h > 0 for h in bids):
            raise ParameterError("builder bids must be positive")
        if not 0.0 <= self.mu <= 1.0:
            raise ParameterError(f"mu must lie in [0, 1] (got {self.mu!r})")
        if self.beta_v < 0:
            raise ParameterError("beta_v must be non-negative")
        if self.spread < 0:
            raise ParameterError("spread must be non-negative")
        if self.validator_payment not in PAYMENT_RULES:
            raise ParameterError(f"validator_payment must be one of {PAYMENT_RULES}")
        if self.builder_supports is None:
            supports = tuple((h - self.spread, h + self.spread) for h in bids)
        else:
            supports = tuple((float(lo), float(hi)) for lo, hi in self.builder_supports)
        if len(supports) != len(bids):
            raise ParameterError("one support interval per builder is required")
        for h, (lo, hi) in zip(bids, supports):
            if not 0 < lo <= h <= hi:
                raise ParameterError(f"bid support [{lo}, {hi}] must be positive and contain h={h}")
        object.__setattr__(self, "builder_bids", bids)
        object.__setattr__(self, "builder_supports", supports)
        if not self.r_min > 0:
            raise ParameterError("the smallest possible reward R_min must be positive")

    @property
    def payment_fraction(self) -> float:
        return self.mu if self.validator_payment == "mu" else 1.0 - self.mu

    @property
    def probabilities(self) -> np.ndarray:
        h = np.asarray(self.builder_bids)
        return h / h.sum()

    @property
    def r_min(self) -> float:
        c = self.payment_fraction
        return min(max(self.beta_v, c * lo) for lo, _ in self.builder_supports)

    @property
    def r_max(self) -> float:
        c = self.payment_fraction
        return max(max(self.beta_v, c * hi) for _, hi in self.builder_supports)

    def atoms(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Distinct reward values and their probabilities; ``None`` when continuous."""
        if self.spread > 0:
            return None
        c = self.payment_fraction
        values = np.array([max(self.beta_v, c * h) for h in self.builder_bids])
        uniq = np.unique(values)
        probs = np.array([self.probabilities[values == u].sum() for u in uniq])
        return uniq, probs

    def from_uniforms(self, u_builder, u_spread=None) -> np.ndarray:
        cdf = np.cumsum(self.probabilities)
        cdf[-1] = 1.0
        idx = np.searchsorted(cdf, u_builder, side="right")
        h = np.asarray(self.builder_bids)
        r = h[idx]
        if self.spread > 0:
            lo = np.array([s[0] for s in self.builder_supports])
            hi = np.array([s[1] for s in self.builder_supports])
            r = np.clip(r + self.spread * (2.0 * u_spread - 1.0), lo[idx], hi[idx])
        return np.maximum(self.beta_v, self.payment_fraction * r)

    @property
    def uniforms_per_draw(self) -> int:
        return 2 if self.spread > 0 else 1


def sample_reward(reward: RewardModel, rng: np.random.Generator, size=None):
    """I.i.d. reward draw(s); returns a float when ``size`` is None."""
    shape = () if size is None else tuple(np.atleast_1d(size))
    u = rng.random(shape + (reward.uniforms_per_draw,))
    out = reward.from_uniforms(u[..., 0], u[..., 1] if reward.spread > 0 else None)
    return float(out) if size is None else out


def _expected_max_clipped_uniform(beta, c, centre, half_width, lo, hi):
    """E[max(beta, c * clip(centre + half_width * (2U - 1), lo, hi))], U ~ Uniform(0, 1).

    The integrand is piecewise linear in U; integrate exactly with midpoints.
    """
    def g(u):
        return max(beta, c * min(max(centre + half_width * (2.0 * u - 1.0), lo), hi))

    if half_width == 0:
        return g(0.5)
    knots = {0.0, 1.0}
    targets = [lo, hi] + ([beta / c] if c > 0 else [])
    for x in targets:
        u = (x - centre + half_width) / (2.0 * half_width)
        if 0.0 < u < 1.0:
            knots.add(u)
    knots = sorted(knots)
    return sum((b - a) * g(0.5 * (a + b)) for a, b in zip(knots[:-1], knots[1:]))


def mean_reward(reward: RewardModel) -> float:
    c = reward.payment_fraction
    total = 0.0
    for p, h, (lo, hi) in zip(reward.probabilities, reward.builder_bids, reward.builder_supports):
        total += p * _expected_max_clipped_uniform(reward.beta_v, c, h, reward.spread, lo, hi)
    return float(total)


@dataclass(frozen=True)
class StakeConfig:
    initial_stakes: tuple[float, ...]
    alpha: float
    gamma: float
    reward: RewardModel
    horizon: int = 1000

    def __post_init__(self):
        stakes = tuple(float(s) for s in np.atleast_1d(self.initial_stakes))
        if not stakes or any(not s > 0 for s in stakes):
            raise ParameterError("every initial stake must be strictly positive")
        if self.gamma < 0:
            raise ParameterError("gamma must be non-negative")
        if self.alpha < 0:
            raise ParameterError("alpha must be non-negative")
        if int(self.horizon) < 1:
            raise ParameterError("horizon must be at least one step")
        object.__setattr__(self, "initial_stakes", stakes)
        object.__setattr__(self, "horizon", int(self.horizon))
        s0, r_min = sum(stakes), self.reward.r_min
        limit = min(s0**self.gamma * r_min, s0, r_min)
        if not self.alpha < limit:
            raise ParameterError(
                f"staking cost too large: need alpha < min(S0^gamma * R_min, S0, R_min) = {limit:.6g} "
                f"(alpha={self.alpha!r}, S0={s0:.6g}, R_min={r_min:.6g})"
            )

    @property
    def n_validators(self) -> int:
        return len(self.initial_stakes)

    @property
    def total_stake(self) -> float:
        return float(sum(self.initial_stakes))

    @property
    def initial_shares(self) -> np.ndarray:
        s = np.asarray(self.initial_stakes)
        return s / s.sum()

    def replace(self, **changes) -> "StakeConfig":
        fields = dict(initial_stakes=self.initial_stakes, alpha=self.alpha, gamma=self.gamma,
                      reward=self.reward, horizon=self.horizon)
        fields.update(changes)
        return StakeConfig(**fields)


def _step_rows(stakes: np.ndarray, rewards: np.ndarray, selected: np.ndarray, alpha: float,
               gamma: float) -> np.ndarray:
    totals = stakes.sum(axis=1)
    new = stakes - alpha * stakes / (totals ** (1.0 + gamma))[:, None]
    new[np.arange(stakes.shape[0]), selected] += rewards
    new_totals = new.sum(axis=1)
    if np.any(new_totals <= totals):
        raise ParameterError("total stake failed to increase; alpha violates the staking-cost bound")
    if np.any(new[stakes > 0] <= 0):
        raise ParameterError("an individual stake became non-positive")
    return new


def step(stakes, R: float, j_sel: int, alpha: float, gamma: float) -> np.ndarray:
    """One round of the stake update; returns a new vector."""
    stakes = np.asarray(stakes, dtype=float)
    if stakes.ndim != 1 or np.any(stakes <= 0):
        raise ParameterError("stakes must be a vector of positive numbers")
    if not 0 <= j_sel < stakes.size:
        raise IndexError(f"validator index {j_sel} out of range")
    return _step_rows(stakes[None, :], np.array([float(R)]), np.array([j_sel]), alpha, gamma)[0]


def _select(stakes: np.ndarray, totals: np.ndarray, u: np.ndarray) -> np.ndarray:
    cum = np.cumsum(stakes, axis=1)
    idx = (cum <= (u * totals)[:, None]).sum(axis=1)
    return np.minimum(idx, stakes.shape[1] - 1)


def _run(reward: RewardModel, alpha: float, gamma: float, stakes0: np.ndarray,
         gens: Sequence[np.random.Generator], horizon: int, record: bool = False,
         aggregate: bool = False, snapshot: int | None = None) -> dict:
    """Shared kernel: every row of ``stakes0`` is one replication driven by ``gens[row]``."""
    stakes = np.array(stakes0, dtype=float)
    reps, n = stakes.shape
    k = 1 + reward.uniforms_per_draw
    out: dict = {}
    if record:
        hist = np.empty((horizon + 1, reps, n))
        hist[0] = stakes
        rewards_hist = np.empty((horizon, reps))
        sel_hist = np.empty((horizon, reps), dtype=np.int64)
    if aggregate:
        mean_tot = np.empty(horizon + 1)
        sd_tot = np.empty(horizon + 1)
        mean_sh = np.empty((horizon + 1, n))
        sd_sh = np.empty((horizon + 1, n))

        def observe(t, s):
            tot = s.sum(axis=1)
            sh = s / tot[:, None]
            mean_tot[t] = tot.mean()
            sd_tot[t] = tot.std()
            mean_sh[t] = sh.mean(axis=0)
            sd_sh[t] = sh.std(axis=0)

        observe(0, stakes)
    t = 0
    while t < horizon:
        m = min(_CHUNK, horizon - t)
        u = np.stack([g.random((m, k)) for g in gens], axis=0)
        for s in range(m):
            totals = stakes.sum(axis=1)
            selected = _select(stakes, totals, u[:, s, 0])
            rewards = reward.from_uniforms(u[:, s, 1], u[:, s, 2] if k == 3 else None)
            stakes = _step_rows(stakes, rewards, selected, alpha, gamma)
            t += 1
            if record:
                hist[t] = stakes
                rewards_hist[t - 1] = rewards
                sel_hist[t - 1] = selected
            if aggregate:
                observe(t, stakes)
            if snapshot is not None and t == snapshot:
                out["snapshot"] = stakes.copy()
    out["final"] = stakes
    if record:
        out["history"] = hist
        out["rewards"] = rewards_hist
        out["selected"] = sel_hist
    if aggregate:
        out.update(mean_totals=mean_tot, sd_totals=sd_tot, mean_shares=mean_sh, sd_shares=sd_sh)
    return out


@dataclass(frozen=True)
class Trajectory:
    """One replication.  Row ``t`` of ``stakes`` is the state after ``t`` rounds
    (row 0 is the initial state); ``rewards[t-1]`` and ``selected[t-1]``
    belong to round ``t``."""

    stakes: np.ndarray
    totals: np.ndarray
    shares: np.ndarray
    rewards: np.ndarray
    selected: np.ndarray
    seed: object = field(default=None, compare=False)

    def rows(self):
        """CSV rows: t, S_t, R_t, selected, s_1..s_N, w_1..w_N."""
        for t in range(self.totals.size):
            r = "" if t == 0 else float(self.rewards[t - 1])
            j = "" if t == 0 else int(self.selected[t - 1]) + 1
            yield [t, float(self.totals[t]), r, j, *map(float, self.stakes[t]), *map(float, self.shares[t])]

    def header(self) -> list[str]:
        n = self.stakes.shape[1]
        return ["t", "S_t", "R_t", "selected"] + [f"s_{j + 1}" for j in range(n)] + [f"w_{j + 1}" for j in range(n)]


def _generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def simulate(config: StakeConfig, seed=None) -> Trajectory:
    out = _run(config.reward, config.alpha, config.gamma, np.asarray([config.initial_stakes]),
               [_generator(seed)], config.horizon, record=True)
    stakes = out["history"][:, 0, :]
    totals = stakes.sum(axis=1)
    return Trajectory(stakes, totals, stakes / totals[:, None], out["rewards"][:, 0],
                      out["selected"][:, 0], seed)


@dataclass(frozen=True)
class Ensemble:
    """Summary of many replications of one configuration."""

    config: StakeConfig
    final_stakes: np.ndarray        # (reps, N)
    midpoint_stakes: np.ndarray     # (reps, N) at t = horizon // 2
    mean_totals: np.ndarray         # (T + 1,)
    sd_totals: np.ndarray
    mean_shares: np.ndarray         # (T + 1, N)
    sd_shares: np.ndarray

    @property
    def replications(self) -> int:
        return self.final_stakes.shape[0]

    @property
    def final_shares(self) -> np.ndarray:
        return self.final_stakes / self.final_stakes.sum(axis=1, keepdims=True)

    @property
    def midpoint_shares(self) -> np.ndarray:
        return self.midpoint_stakes / self.midpoint_stakes.sum(axis=1, keepdims=True)

    def convergence_gap(self) -> np.ndarray:
        """``|w_T - w_{T/2}|`` per replication and validator."""
        return np.abs(self.final_shares - self.midpoint_shares)


def simulate_ensemble(config: StakeConfig, replications: int, seeds: SeedPolicy | int = 0,
                      task: str = "simulate") -> Ensemble:
    """Replication ``r`` uses ``seeds.generator(task, r)``; it matches
    ``simulate(config, seeds.seed_sequence(task, r))`` exactly."""
    policy = seeds if isinstance(seeds, SeedPolicy) else SeedPolicy(int(seeds))
    gens = policy.generators(task, replications)
    stakes0 = np.tile(np.asarray(config.initial_stakes, dtype=float), (replications, 1))
    out = _run(config.reward, config.alpha, config.gamma, stakes0, gens, config.horizon,
               aggregate=True, snapshot=max(config.horizon // 2, 1))
    return Ensemble(config, out["final"], out["snapshot"], out["mean_totals"], out["sd_totals"],
                    out["mean_shares"], out["sd_shares"])


@dataclass(frozen=True)
class GrowthEstimate:
    slope: float
    target: float
    relative_error: float
    tail_fraction: float
    tail_cost_ratio: float   # alpha / S^gamma at the start of the tail, relative to the mean reward
    sufficient: bool


def growth_rate(mean_totals: np.ndarray, config: StakeConfig, tail_fraction: float = 0.5) -> GrowthEstimate:
    """Least-squares slope of the mean total stake over the last ``tail_fraction``
    of the horizon; the long-run target is ``R`` for ``gamma > 0`` and ``R - alpha``
    for ``gamma = 0``."""
    mean_totals = np.asarray(mean_totals, dtype=float)
    T = mean_totals.size - 1
    start = int(round(T * (1.0 - tail_fraction)))
    t = np.arange(start, T + 1)
    slope = float(np.polyfit(t, mean_totals[start:], 1)[0])
    R = mean_reward(config.reward)
    target = R - config.alpha if config.gamma == 0 else R
    cost_ratio = config.alpha / mean_totals[start] ** config.gamma / R
    if config.gamma == 0:
        sufficient = T - start >= 50
    else:
        sufficient = T - start >= 50 and cost_ratio < 1e-3
    return GrowthEstimate(slope, target, abs(slope - target) / abs(target), tail_fraction,
                          float(cost_ratio), bool(sufficient))


@dataclass(frozen=True)
class ShareStatistic:
    validator: int
    mean: float
    se: float
    initial: float

    @property
    def z(self) -> float:
        return (self.mean - self.initial) / self.se if self.se > 0 else (0.0 if self.mean == self.initial else math.inf)

    @property
    def within_3se(self) -> bool:
        return abs(self.mean - self.initial) <= 3.0 * self.se


def martingale_statistics(final_shares: np.ndarray, initial_shares) -> list[ShareStatistic]:
    final_shares = np.asarray(final_shares, dtype=float)
    n = final_shares.shape[0]
    if n < 2:
        raise ValueError("need at least two replications")
    mean = final_shares.mean(axis=0)
    se = final_shares.std(axis=0, ddof=1) / math.sqrt(n)
    return [ShareStatistic(j, float(mean[j]), float(se[j]), float(w0))
            for j, w0 in enumerate(np.asarray(initial_shares, dtype=float))]


@dataclass(frozen=True)
class VarianceRecursion:
    a: np.ndarray      # a_0 .. a_T, with a_0 = 0
    z: np.ndarray      # z_1 .. z_T (z[0] unused, set to 0)
    method: str
    upper_bound: float

    def predicted_variance(self, w0, t: int | None = None):
        t = self.a.size - 1 if t is None else t
        w0 = np.asarray(w0, dtype=float)
        return self.a[t] * w0 * (1.0 - w0)


def _z_exact_two_point(config: StakeConfig, t_max: int, values, probs) -> np.ndarray:
    s0, alpha = config.total_stake, config.alpha
    z = np.zeros(t_max + 1)
    if values.size == 1:
        t = np.arange(1, t_max + 1)
        z[1:] = (values[0] / (s0 + t * (values[0] - alpha))) ** 2
        return z
    lo, hi = values
    p_hi = probs[1]
    for t in range(1, t_max + 1):
        k = np.arange(t)                     # high draws among the other t - 1 rewards
        w = stats.binom.pmf(k, t - 1, p_hi)
        others = k * hi + (t - 1 - k) * lo
        base = s0 - t * alpha + others
        z[t] = sum(p * np.dot(w, (r / (base + r)) ** 2) for r, p in zip(values, probs))
    return z


def _z_monte_carlo(config: StakeConfig, t_max: int, paths: int, rng: np.random.Generator) -> np.ndarray:
    z = np.zeros(t_max + 1)
    S = np.full(paths, config.total_stake)
    t = 0
    while t < t_max:
        m = min(_CHUNK, t_max - t)
        R = sample_reward(config.reward, rng, size=(paths, m))
        for s in range(m):
            S = S + R[:, s] - config.alpha
            t += 1
            z[t] = np.mean((R[:, s] / S) ** 2)
    return z


def variance_recursion(config: StakeConfig, t_max: int | None = None, z_estimator: str = "auto",
                       paths: int = 20_000, seed=None) -> VarianceRecursion:
    """``a_{t+1} = a_t + z_{t+1} (1 - a_t)`` with ``z_t = E[(R_t / S_t)^2]``, so that
    ``Var(w_{j,t}) = a_t w_{j,0} (1 - w_{j,0})``.

    With ``gamma = 0`` the total stake is ``S_0 + sum(R) - t alpha`` regardless of
    who is selected.  ``z_estimator="exact"`` sums over binomial reward counts and
    needs rewards taking at most two values; ``"monte_carlo"`` averages over
    ``paths`` simulated reward sequences; ``"auto"`` picks exact when possible.
    """
    if config.gamma != 0:
        raise ParameterError("the variance recursion holds only for gamma = 0")
    t_max = config.horizon if t_max is None else int(t_max)
    atoms = config.reward.atoms()
    if z_estimator == "auto":
        z_estimator = "exact" if atoms is not None and atoms[0].size <= 2 else "monte_carlo"
    if z_estimator == "exact":
        if atoms is None or atoms[0].size > 2:
            raise ParameterError("exact z_t needs a reward with at most two values")
        z = _z_exact_two_point(config, t_max, *atoms)
    elif z_estimator == "monte_carlo":
        z = _z_monte_carlo(config, t_max, paths, _generator(seed))
    else:
        raise ValueError(f"unknown z estimator {z_estimator!r}")
    a = np.zeros(t_max + 1)
    for t in range(1, t_max + 1):
        a[t] = a[t - 1] + z[t] * (1.0 - a[t - 1])
    reward = config.reward
    bound = reward.r_max**2 / (config.total_stake * (reward.r_min - config.alpha))
    return VarianceRecursion(a, z, z_estimator, float(bound))


@dataclass(frozen=True)
class StabilityCheck:
    validator: int
    initial_stake: float
    bound: float
    empirical: float
    se: float

    @property
    def status(self) -> str:
        if self.bound >= 1.0:
            return "vacuous"
        return "pass" if self.empirical <= self.bound + 3.0 * self.se else "fail"


def chebyshev_stability(config: StakeConfig, epsilon_dev: float, final_shares: np.ndarray) -> list[StabilityCheck]:
    """Empirical ``P(|w_T / w_0 - 1| > epsilon_dev)`` against
    ``R_max^2 / ((R_min - alpha) epsilon_dev^2 s_{j,0})``."""
    if config.gamma != 0:
        raise ParameterError("the stability bound is stated for gamma = 0")
    if epsilon_dev <= 0:
        raise ValueError("epsilon_dev must be positive")
    reward = config.reward
    gap = reward.r_min - config.alpha
    if gap <= 0:
        raise ParameterError("R_min must exceed alpha")
    final_shares = np.asarray(final_shares, dtype=float)
    n = final_shares.shape[0]
    w0 = config.initial_shares
    out = []
    for j, s in enumerate(config.initial_stakes):
        p = float(np.mean(np.abs(final_shares[:, j] / w0[j] - 1.0) > epsilon_dev))
        bound = reward.r_max**2 / (gap * epsilon_dev**2 * s)
        out.append(StabilityCheck(j, s, float(bound), p, math.sqrt(p * (1.0 - p) / n)))
    return out


def share_distribution(own: float, rest: float, reward: RewardModel, horizon: int,
                       replications: int, seeds: SeedPolicy | int = 0, task: str = "urn",
                       own_offsets=None, rest_offsets=None) -> np.ndarray:
    """Final share of one validator against the aggregated rest, with no staking
    cost.  Zero starting stakes are allowed (a zero stake is never selected).
    Optional per-replication offsets shift the starting stakes."""
    policy = seeds if isinstance(seeds, SeedPolicy) else SeedPolicy(int(seeds))
    stakes0 = np.empty((replications, 2))
    stakes0[:, 0] = own if own_offsets is None else own + np.asarray(own_offsets)
    stakes0[:, 1] = rest if rest_offsets is None else rest + np.asarray(rest_offsets)
    if np.any(stakes0 < 0) or np.any(stakes0.sum(axis=1) <= 0):
        raise ParameterError("starting stakes must be non-negative and not both zero")
    if horizon == 0:
        final = stakes0
    else:
        final = _run(reward, 0.0, 0.0, stakes0, policy.generators(task, replications), horizon)["final"]
    return final[:, 0] / final.sum(axis=1)


@dataclass(frozen=True)
class FunctionalEquationCheck:
    grid: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray
    band: np.ndarray
    confidence: float
    replications: int

    @property
    def max_residual(self) -> float:
        return float(self.residual.max())

    @property
    def passes(self) -> bool:
        return bool(np.all(self.residual <= self.band))


def limiting_distribution_residual(config: StakeConfig, validator: int = 0, grid=None,
                                   replications: int = 10_000, seeds: SeedPolicy | int = 0,
                                   confidence: float = 0.95, simultaneous: bool = True) -> FunctionalEquationCheck:
    """Self-consistency of the limiting-share distribution under ``alpha = 0``.

    Left side: ``F(s, a)(x) = P(w_T <= x)`` from fresh runs started at
    ``(s, a) = (s_{j,0}, S_0 - s_{j,0})``.  Right side: draw a first-round reward
    ``m`` per replication, continue ``T - 1`` rounds from ``(s + m, a)`` and from
    ``(s, a + m)`` on independent streams, and mix with weights ``w_0`` and
    ``1 - w_0``.  At a finite horizon the identity is exact, so the residual is
    Monte-Carlo noise.  The band is a normal-approximation interval, widened to
    a simultaneous (Sidak) band across the grid when ``simultaneous``.
    """
    if config.alpha != 0:
        raise ParameterError("the functional equation holds only without staking cost (alpha = 0)")
    policy = seeds if isinstance(seeds, SeedPolicy) else SeedPolicy(int(seeds))
    grid = np.linspace(0.1, 0.9, 5) if grid is None else np.asarray(grid, dtype=float)
    s = config.initial_stakes[validator]
    a = config.total_stake - s
    w0 = s / config.total_stake
    T = config.horizon
    n = replications
    lhs_shares = share_distribution(s, a, config.reward, T, n, policy, "fe-lhs")
    m = sample_reward(config.reward, policy.generator("fe-first-reward"), size=n)
    own_up = share_distribution(s, a, config.reward, T - 1, n, policy, "fe-own", own_offsets=m)
    rest_up = share_distribution(s, a, config.reward, T - 1, n, policy, "fe-rest", rest_offsets=m)
    lhs = np.array([(lhs_shares <= x).mean() for x in grid])
    A = np.array([(own_up <= x).mean() for x in grid])
    B = np.array([(rest_up <= x).mean() for x in grid])
    rhs = w0 * A + (1.0 - w0) * B
    var = (lhs * (1 - lhs) + w0**2 * A * (1 - A) + (1 - w0) ** 2 * B * (1 - B)) / n
    level = confidence ** (1.0 / grid.size) if simultaneous else confidence
    zcrit = NormalDist().inv_cdf(0.5 + level / 2.0)
    return FunctionalEquationCheck(grid, lhs, rhs, np.abs(lhs - rhs), zcrit * np.sqrt(var),
                                   confidence, n)
