"""Executable checks of the model's claims, with independent oracles.

Tolerance policy: published table values use absolute 0.01 (they are printed to
two decimals); cross-method numerics use 1e-6 relative; statistical checks use
3 standard errors and report the sample size.  A Chebyshev bound of 1 or more
says nothing and is reported as ``vacuous`` rather than ``pass``.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import quartic
from .equilibrium import ratio_diagnostics, solve_m_player, solve_two_player_closed_form
from .errors import ConvergenceError
from .game import AuctionConfig, expected_utility, sample_revenue_monte_carlo, utility_gradient
from .reference import TABLES, builder_arrays
from .seeding import SeedPolicy
from .stakes import (
    RewardModel,
    StakeConfig,
    chebyshev_stability,
    growth_rate,
    limiting_distribution_residual,
    martingale_statistics,
    mean_reward,
    sample_reward,
    simulate,
    simulate_ensemble,
    variance_recursion,
)

__all__ = [
    "CheckReport",
    "Sizes",
    "QUICK",
    "FULL",
    "GridOracle",
    "brute_force_equilibrium_2p",
    "random_pair",
    "reference_stake_config",
    "run_table_reproduction",
    "run_property_suite",
    "run_stake_suite",
    "run_checks",
    "write_report",
    "summarize",
]

STATUSES = ("pass", "fail", "vacuous")


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    claim_ref: str
    status: str
    measured: object
    target: object
    tolerance: str
    runtime: float
    seed: int | None = None
    detail: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Sizes:
    closed_vs_br: int = 1000
    grid_instances: int = 50
    grid_n: int = 2000
    quartic_instances: int = 10_000
    positivity_samples: int = 100_000
    ratio_instances: int = 1000
    homogeneity_instances: int = 20
    revenue_draws: int = 200_000
    reward_draws: int = 1_000_000
    martingale_reps: int = 10_000
    growth_reps: int = 200
    growth_horizon: int = 10_000
    variance_reps: int = 10_000
    stability_reps: int = 10_000
    fe_reps: int = 10_000
    horizon: int = 1000


FULL = Sizes()
QUICK = Sizes(closed_vs_br=100, grid_instances=5, grid_n=1000, quartic_instances=1000,
              positivity_samples=10_000, ratio_instances=100, homogeneity_instances=5,
              revenue_draws=50_000, reward_draws=100_000, martingale_reps=1000, growth_reps=20,
              variance_reps=2000, stability_reps=2000, fe_reps=2000)


def _timed(fn: Callable[[], dict], check_id: str, claim_ref: str, seed=None) -> CheckReport:
    start = time.perf_counter()
    out = fn()
    return CheckReport(check_id=check_id, claim_ref=claim_ref, runtime=time.perf_counter() - start,
                       seed=seed, **out)


def _plain(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


# -- instance generators ------------------------------------------------------------

def random_pair(rng: np.random.Generator) -> AuctionConfig:
    """Two builders with ``f_bar`` log-uniform on [1, 1000] and ``v_bar / f_bar`` in [0.01, 1]."""
    f = 10.0 ** rng.uniform(0.0, 3.0, 2)
    v = f * (1.0 - 0.99 * rng.random(2))
    return AuctionConfig.from_arrays(f, v)


def reference_stake_config(gamma: float = 1.5, alpha: float = 8.0, horizon: int = 1000,
                    scale: float = 1.0) -> StakeConfig:
    """Three validators with stakes (10, 20, 30), two builders bidding (15, 20),
    mu = 0.7 and beta_v = 11."""
    reward = RewardModel(mu=0.7, beta_v=11.0, builder_bids=(15.0, 20.0))
    stakes = tuple(scale * s for s in (10.0, 20.0, 30.0))
    return StakeConfig(stakes, alpha, gamma, reward, horizon)


# -- grid oracle ----------------------------------------------------------------------

@dataclass(frozen=True)
class GridOracle:
    grid1: np.ndarray
    grid2: np.ndarray
    cells: tuple[np.ndarray, ...]    # each cell: (k, 2) array of grid bid pairs

    @property
    def spacing(self) -> tuple[float, float]:
        return float(self.grid1[1] - self.grid1[0]), float(self.grid2[1] - self.grid2[0])

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def distance_in_cells(self, h) -> float:
        """Grid distance from ``h`` to the nearest point of any cell (Chebyshev norm, in cell widths)."""
        d1, d2 = self.spacing
        best = math.inf
        for cell in self.cells:
            dist = np.maximum(np.abs(cell[:, 0] - h[0]) / d1, np.abs(cell[:, 1] - h[1]) / d2)
            best = min(best, float(dist.min()))
        return best


def _utility_grid(f, v, own, other):
    H = own[:, None] + other[None, :]
    share = own[:, None] / H
    return f * share + v * share * share - own[:, None] * share


def brute_force_equilibrium_2p(params: AuctionConfig, grid_n: int = 2000) -> GridOracle:
    """Best-response fixed cells of the two-builder game on a uniform grid.

    Each builder's grid best response to every grid bid of the other is found by
    exhaustive search on ``[epsilon, f_bar + v_bar]``.  Discrete best-response
    maps can cycle between neighbouring grid points instead of having an exact
    fixed point, so a fixed *cell* is a cycle of ``j -> b2(b1(j))``; cycles on
    adjacent grid indices are merged into one cell.
    """
    if params.n_builders != 2:
        raise ValueError("the grid oracle is for two builders")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    b1, b2 = params.builders
    eps = params.epsilon
    g1 = np.linspace(eps, b1.upper_bound, grid_n)
    g2 = np.linspace(eps, b2.upper_bound, grid_n)
    br1 = np.argmax(_utility_grid(b1.f_bar, b1.v_bar, g1, g2), axis=0)   # best g1 index per g2 index
    br2 = np.argmax(_utility_grid(b2.f_bar, b2.v_bar, g2, g1), axis=0)   # best g2 index per g1 index
    phi = br2[br1]
    state = np.zeros(grid_n, dtype=np.int8)   # 0 new, 1 on current path, 2 done
    cycles: list[list[int]] = []
    for start in range(grid_n):
        if state[start]:
            continue
        path, j = [], start
        while state[j] == 0:
            state[j] = 1
            path.append(j)
            j = int(phi[j])
        if state[j] == 1:
            cycles.append(path[path.index(j):])
        for p in path:
            state[p] = 2
    # union cycles that touch on adjacent indices
    parent = list(range(len(cycles)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    owner = {j: c for c, cyc in enumerate(cycles) for j in cyc}
    for j, c in owner.items():
        for nb in (j - 1, j + 1):
            if nb in owner:
                ra, rb = find(c), find(owner[nb])
                if ra != rb:
                    parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for j, c in owner.items():
        groups.setdefault(find(c), []).append(j)
    cells = tuple(
        np.array([[g1[br1[j]], g2[j]] for j in sorted(js)]) for _, js in sorted(groups.items(), key=lambda kv: min(kv[1]))
    )
    return GridOracle(g1, g2, cells)


# -- tables ---------------------------------------------------------------------------

def run_table_reproduction(table_id: int, perturb: float = 0.0) -> CheckReport:
    """Solve every column of a published table and compare all entries at 0.01.

    ``perturb`` shifts one reference value; it exists to prove the harness can fail.
    """
    table = TABLES[table_id]

    def body():
        worst, failures, notes = 0.0, 0, []
        measured, target = [], []
        for c in range(len(table.columns)):
            f, v = builder_arrays(table, c)
            ref_h = np.array(table.h)[:, c].copy()
            ref_u = np.array(table.utility)[:, c]
            if c == 0:
                ref_h[0] += perturb
            try:
                res = solve_m_player(AuctionConfig.from_arrays(f, v))
            except ConvergenceError as exc:
                failures += 1
                notes.append(f"column {table.columns[c]}: {exc}")
                continue
            if not res.converged:
                failures += 1
                notes.append(f"column {table.columns[c]}: not converged")
            err = np.concatenate([np.abs(res.h_star - ref_h), np.abs(res.utilities - ref_u)])
            worst = max(worst, float(err.max()))
            failures += int(np.sum(err > 0.01))
            measured.append(np.concatenate([res.h_star, res.utilities]).tolist())
            target.append(np.concatenate([ref_h, ref_u]).tolist())
        notes.insert(0, f"largest absolute deviation {worst:.4g}")
        return dict(status=_verdict(failures == 0), measured=measured, target=target,
                    tolerance="absolute 0.01 on every h and expected utility",
                    detail="; ".join(notes))

    return _timed(body, f"table-{table_id}", f"published table: {table.label}")


# -- equilibrium and quartic properties ------------------------------------------------

def check_worked_example() -> CheckReport:
    def body():
        res = solve_two_player_closed_form(AuctionConfig.from_arrays([100, 200], [40, 80]))
        measured = np.concatenate([res.h_star, res.utilities])
        target = np.array([49.94, 82.17, 24.64, 104.23])
        ok = bool(np.all(np.abs(measured - target) <= 0.01))
        return dict(status=_verdict(ok), measured=measured.tolist(), target=target.tolist(),
                    tolerance="absolute 0.01")
    return _timed(body, "eq-worked-example", "two-builder worked example (f=(100,200), v=(40,80))")


def check_closed_vs_best_response(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        rng = policy.generator("closed-vs-br")
        worst = 0.0
        for _ in range(sizes.closed_vs_br):
            cfg = random_pair(rng)
            a = solve_two_player_closed_form(cfg).h_star
            b = solve_m_player(cfg).h_star
            worst = max(worst, float(np.max(np.abs(a - b) / np.abs(a))))
        return dict(status=_verdict(worst <= 1e-6), measured=worst, target=0.0,
                    tolerance=f"relative 1e-6 over {sizes.closed_vs_br} instances")
    return _timed(body, "eq-closed-vs-best-response", "two-builder closed form equals iterated best response",
                  policy.master_seed)


def check_grid_oracle(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        rng = policy.generator("grid-oracle")
        instances = [AuctionConfig.from_arrays([100, 200], [40, 80]),
                     AuctionConfig.from_arrays([100, 100], [40, 40])]
        instances += [random_pair(rng) for _ in range(max(sizes.grid_instances - 2, 0))]
        bad, counts, dists = 0, [], []
        for cfg in instances:
            h = solve_two_player_closed_form(cfg).h_star
            oracle = brute_force_equilibrium_2p(cfg, sizes.grid_n)
            d = oracle.distance_in_cells(h) if oracle.n_cells else math.inf
            counts.append(oracle.n_cells)
            dists.append(d)
            bad += int(oracle.n_cells != 1 or d > 1.0)
        return dict(status=_verdict(bad == 0), measured={"instances_failing": bad, "max_cells": max(counts),
                                                         "max_distance_cells": max(dists)},
                    target={"instances_failing": 0}, tolerance=f"exactly one fixed cell within one cell of h*, "
                    f"{len(instances)} instances on a {sizes.grid_n}^2 grid")
    return _timed(body, "eq-grid-oracle", "uniqueness of the two-builder equilibrium", policy.master_seed)


def check_quartic_structure(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        rng = policy.generator("quartic-structure")
        counts = dict(positive_root_count=0, p_at_0=0, p_at_minus_half=0, p_at_minus_two=0, residual=0)
        worst_residual = 0.0
        for _ in range(sizes.quartic_instances):
            cfg = random_pair(rng)
            pair = cfg.builders
            c = quartic.build_quartic(pair)
            roots = quartic.quartic_real_roots(c)
            counts["positive_root_count"] += int(sum(r > 0 for r in roots) != 1)
            counts["p_at_0"] += int(not c(0.0) < 0)
            counts["p_at_minus_half"] += int(not c(-0.5) > 0)
            counts["p_at_minus_two"] += int(not c(-2.0) < 0)
            lam = quartic.largest_root_closed_form(pair)
            rel = abs(c(lam)) / c.norm
            worst_residual = max(worst_residual, rel)
            counts["residual"] += int(not rel < 1e-8)
        ok = not any(counts.values())
        return dict(status=_verdict(ok), measured={"violations": counts, "max_relative_residual": worst_residual},
                    target={"violations": 0}, tolerance=f"no violation in {sizes.quartic_instances} instances; "
                    "|P(lambda*)| < 1e-8 ||c||")
    return _timed(body, "quartic-structure", "sign pattern and single positive root of the equilibrium quartic",
                  policy.master_seed)


def check_positivity(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        search = quartic.minimize_positivity_margin(sizes.positivity_samples,
                                                    seed=policy.seed_sequence("positivity-margin"))
        return dict(status=_verdict(search.all_positive), measured=search.minimum, target=3.0,
                    tolerance=f"hard: 8S^3 - q > 0 on {search.samples} samples; minimum near 3 is report-only",
                    detail=f"argmin (f1, f2, v1, v2) = {search.argmin}; smallest full margin {search.min_margin:.6g}")
    return _timed(body, "quartic-positivity-margin", "closed-form branch selects the largest root",
                  policy.master_seed)


def check_ratio_ordering(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        rng = policy.generator("ratio")
        failures, n = 0, sizes.ratio_instances
        for idx in range(n):
            k1 = 1.0 - rng.random()
            k2 = 1.0 if idx % 10 == 0 else 10.0 ** rng.uniform(-1.0, 1.0)
            f2 = 10.0 ** rng.uniform(0.0, 2.0)
            f1 = k2 * f2
            rep = ratio_diagnostics(AuctionConfig.from_arrays([f1, f2], [k1 * f1, k1 * f2]))
            failures += int(not rep.holds)
        return dict(status=_verdict(failures == 0), measured=failures, target=0,
                    tolerance=f"branch relation in all {n} instances (every 10th has k2 = 1)")
    return _timed(body, "eq-ratio-ordering", "bid ratio against capability ratio under a common v/f",
                  policy.master_seed)


def check_homogeneity(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        rng = policy.generator("homogeneity")
        worst = 0.0
        bases = [AuctionConfig.from_arrays(*builder_arrays(2, 0))]
        bases += [random_pair(rng) for _ in range(sizes.homogeneity_instances)]
        for cfg in bases:
            base = solve_m_player(cfg)
            for k in (0.5, 2.0, 10.0):
                res = solve_m_player(cfg.scaled(k))
                for a, b in ((res.h_star, base.h_star), (res.utilities, base.utilities)):
                    worst = max(worst, float(np.max(np.abs(a - k * b) / np.abs(k * b))))
        return dict(status=_verdict(worst <= 1e-9), measured=worst, target=0.0,
                    tolerance="relative 1e-9 for k in {0.5, 2, 10}")
    return _timed(body, "eq-homogeneity", "bids and utilities scale linearly with the builders' values",
                  policy.master_seed)


def check_gradient(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        rng = policy.generator("gradient")
        worst = 0.0
        for _ in range(200):
            f = 10.0 ** rng.uniform(0.0, 3.0, 3)
            cfg = AuctionConfig.from_arrays(f, f * (1.0 - 0.99 * rng.random(3)))
            h = rng.uniform(0.05, 1.0, 3) * (cfg.f_bar + cfg.v_bar)
            for i in range(3):
                step = 1e-5 * h[i]
                up, dn = h.copy(), h.copy()
                up[i] += step
                dn[i] -= step
                fd = (expected_utility(i, up, cfg) - expected_utility(i, dn, cfg)) / (2 * step)
                g = utility_gradient(i, h, cfg)
                scale = max(1.0, abs(g), cfg.f_bar[i] / h.sum())
                worst = max(worst, abs(fd - g) / scale)
        return dict(status=_verdict(worst <= 1e-6), measured=worst, target=0.0,
                    tolerance="central difference, relative 1e-6")
    return _timed(body, "game-gradient", "closed-form utility gradient", policy.master_seed)


def check_revenue_monte_carlo(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        cfg = AuctionConfig.from_arrays(*builder_arrays(2, 0), mu=0.5)
        h = solve_m_player(cfg).h_star
        worst_z = 0.0
        for i in range(3):
            mean, se = sample_revenue_monte_carlo(i, h, cfg, sizes.revenue_draws, seed=policy.seed_sequence("revenue", i))
            worst_z = max(worst_z, abs(mean - expected_utility(i, h, cfg)) / se)
        return dict(status=_verdict(worst_z <= 3.0), measured=worst_z, target=0.0,
                    tolerance=f"|MC - analytic| <= 3 SE, {sizes.revenue_draws} draws per builder")
    return _timed(body, "game-revenue-monte-carlo", "expected utility from the two-auction revenue table",
                  policy.master_seed)


# -- stake properties ----------------------------------------------------------------

def check_reward_mean(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        reward = reference_stake_config().reward
        x = sample_reward(reward, policy.generator("reward-mean"), size=sizes.reward_draws)
        se = x.std(ddof=1) / math.sqrt(x.size)
        target = mean_reward(reward)
        z = abs(x.mean() - target) / se
        ok = z <= 3.0 and abs(target - 445 / 35) < 1e-12
        return dict(status=_verdict(ok), measured=float(x.mean()), target=target,
                    tolerance=f"3 SE ({se:.3g}) over {x.size} draws; analytic mean 445/35")
    return _timed(body, "stake-reward-mean", "mean per-block reward", policy.master_seed)


def check_martingale(sizes: Sizes, policy: SeedPolicy, gamma: float) -> CheckReport:
    def body():
        cfg = reference_stake_config(gamma=gamma, horizon=sizes.horizon)
        ens = simulate_ensemble(cfg, sizes.martingale_reps, policy, task=f"martingale-{gamma}")
        stats_ = martingale_statistics(ens.final_shares, cfg.initial_shares)
        ok = all(s.within_3se for s in stats_)
        gap = ens.convergence_gap()
        return dict(status=_verdict(ok), measured=[s.mean for s in stats_], target=[s.initial for s in stats_],
                    tolerance=f"3 SE ({', '.join(f'{s.se:.2g}' for s in stats_)}), {ens.replications} replications, T={cfg.horizon}",
                    detail=f"median |w_T - w_T/2| = {float(np.median(gap)):.3g}")
    return _timed(body, f"stake-martingale-gamma-{gamma:g}", "validator stake shares form a martingale",
                  policy.master_seed)


def check_growth(sizes: Sizes, policy: SeedPolicy, gamma: float) -> CheckReport:
    def body():
        cfg = reference_stake_config(gamma=gamma, horizon=sizes.growth_horizon)
        ens = simulate_ensemble(cfg, sizes.growth_reps, policy, task=f"growth-{gamma}")
        est = growth_rate(ens.mean_totals, cfg)
        ok = est.sufficient and est.relative_error <= 0.01
        return dict(status=_verdict(ok), measured=est.slope, target=est.target,
                    tolerance=f"relative 1% (tail fraction {est.tail_fraction}, {ens.replications} replications, "
                    f"T={cfg.horizon})", detail="" if est.sufficient else "horizon too short for the limit")
    return _timed(body, f"stake-growth-gamma-{gamma:g}", "long-run growth rate of the total stake",
                  policy.master_seed)


def _variance_se(x: np.ndarray) -> tuple[float, float]:
    """Sample variance and its standard error, ``sqrt((m4 - s^4) / n)``."""
    n = x.size
    dev2 = (x - x.mean()) ** 2
    var = dev2.sum() / (n - 1)
    return float(var), float(dev2.std(ddof=1) / math.sqrt(n))


def check_variance_recursion(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        cfg = reference_stake_config(gamma=0.0, horizon=sizes.horizon)
        rec = variance_recursion(cfg)
        a = rec.a
        shape_ok = bool(np.all(np.diff(a) >= 0) and a[0] == 0 and np.all(a <= 1) and np.all(a <= rec.upper_bound))
        ens = simulate_ensemble(cfg, sizes.variance_reps, policy, task="variance")
        predicted = rec.predicted_variance(cfg.initial_shares)
        measured, zs = [], []
        for j in range(cfg.n_validators):
            var, se = _variance_se(ens.final_shares[:, j])
            measured.append(var)
            zs.append(abs(var - predicted[j]) / se)
        ok = shape_ok and max(zs) <= 3.0
        return dict(status=_verdict(ok), measured=measured, target=predicted.tolist(),
                    tolerance=f"3 SE over {ens.replications} replications; a_t nondecreasing in [0, 1] "
                    f"and <= {rec.upper_bound:.4g}",
                    detail=f"a_T = {a[-1]:.6g} ({rec.method} z_t); max |z| = {max(zs):.3g}")
    return _timed(body, "stake-variance-recursion", "variance factor of the stake shares", policy.master_seed)


def check_stability(sizes: Sizes, policy: SeedPolicy) -> list[CheckReport]:
    reports = []
    bounds = {}
    for scale in (100.0, 1000.0):
        def body(scale=scale):
            cfg = reference_stake_config(gamma=0.0, horizon=sizes.horizon, scale=scale)
            ens = simulate_ensemble(cfg, sizes.stability_reps, policy, task=f"stability-{scale:g}")
            checks = chebyshev_stability(cfg, 0.1, ens.final_shares)
            bounds[scale] = checks[0].bound
            statuses = [c.status for c in checks]
            status = "fail" if "fail" in statuses else ("pass" if "pass" in statuses else "vacuous")
            return dict(status=status, measured=[c.empirical for c in checks], target=[c.bound for c in checks],
                        tolerance=f"empirical <= bound + 3 binomial SE, epsilon 0.1, {ens.replications} replications",
                        detail=", ".join(f"s0={c.initial_stake:g}: {c.status}" for c in checks))
        reports.append(_timed(body, f"stake-stability-s0-{int(10 * scale)}",
                              "limiting share concentrates near the initial share", policy.master_seed))

    def halving():
        cfg = reference_stake_config(gamma=0.0)
        ens = np.full((2, cfg.n_validators), 1.0 / 6.0)   # shares are irrelevant to the bound
        b1 = chebyshev_stability(cfg, 0.1, ens)[0].bound
        b2 = chebyshev_stability(cfg.replace(initial_stakes=tuple(2 * s for s in cfg.initial_stakes)), 0.1, ens)[0].bound
        ok = abs(b2 / b1 - 0.5) < 1e-12
        return dict(status=_verdict(ok), measured=b2 / b1, target=0.5, tolerance="1e-12")
    reports.append(_timed(halving, "stake-stability-halving", "stability bound is inverse in the initial stake"))
    return reports


def check_functional_equation(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        cfg = reference_stake_config(gamma=0.0, alpha=0.0, horizon=sizes.horizon)
        fe = limiting_distribution_residual(cfg, validator=0, replications=sizes.fe_reps, seeds=policy)
        return dict(status=_verdict(fe.passes), measured=fe.residual.tolist(), target=fe.band.tolist(),
                    tolerance=f"|LHS - RHS| within the simultaneous 95% Monte-Carlo band at {fe.grid.size} "
                    f"grid points, {fe.replications} replications per estimate",
                    detail=f"max residual {fe.max_residual:.3g}")
    return _timed(body, "stake-functional-equation", "distribution of the limiting share (no staking cost)",
                  policy.master_seed)


def check_trajectory_invariants(sizes: Sizes, policy: SeedPolicy) -> CheckReport:
    def body():
        worst_cons, increasing, bounded = 0.0, True, True
        for gamma in (0.0, 0.1, 0.2, 0.3, 1.5):
            cfg = reference_stake_config(gamma=gamma, horizon=sizes.horizon)
            for r in range(5):
                tr = simulate(cfg, policy.seed_sequence(f"invariants-{gamma}", r))
                worst_cons = max(worst_cons, float(np.max(np.abs(tr.stakes.sum(axis=1) - tr.totals) / tr.totals)))
                increasing &= bool(np.all(np.diff(tr.totals) > 0))
                bounded &= bool(np.all((tr.shares >= 0) & (tr.shares <= 1)))
                bounded &= bool(np.allclose(tr.shares.sum(axis=1), 1.0, rtol=0, atol=1e-12))
        ok = worst_cons <= 1e-9 and increasing and bounded
        return dict(status=_verdict(ok), measured=worst_cons, target=0.0,
                    tolerance="conservation 1e-9 relative; total strictly increasing; shares in [0, 1] summing to 1")
    return _timed(body, "stake-trajectory-invariants", "conservation and monotone total stake",
                  policy.master_seed)


# -- suites --------------------------------------------------------------------------

def _property_tasks(sizes, policy):
    return [
        check_worked_example,
        lambda: check_closed_vs_best_response(sizes, policy),
        lambda: check_grid_oracle(sizes, policy),
        lambda: check_quartic_structure(sizes, policy),
        lambda: check_positivity(sizes, policy),
        lambda: check_ratio_ordering(sizes, policy),
        lambda: check_homogeneity(sizes, policy),
        lambda: check_gradient(sizes, policy),
        lambda: check_revenue_monte_carlo(sizes, policy),
    ]


def _stake_tasks(sizes, policy):
    return [
        lambda: check_reward_mean(sizes, policy),
        lambda: check_trajectory_invariants(sizes, policy),
        lambda: check_martingale(sizes, policy, 0.0),
        lambda: check_martingale(sizes, policy, 1.5),
        lambda: check_growth(sizes, policy, 1.5),
        lambda: check_growth(sizes, policy, 0.0),
        lambda: check_variance_recursion(sizes, policy),
        lambda: check_stability(sizes, policy),
        lambda: check_functional_equation(sizes, policy),
    ]


def _execute(tasks, threads: int) -> list[CheckReport]:
    out: list[CheckReport] = []
    if threads <= 1:
        results = [t() for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda t: t(), tasks))
    for r in results:
        out.extend(r if isinstance(r, list) else [r])
    return sorted(out, key=lambda r: r.check_id)


def run_property_suite(seed_policy: SeedPolicy | None = None, sizes: Sizes = FULL, threads: int = 1) -> list[CheckReport]:
    return _execute(_property_tasks(sizes, seed_policy or SeedPolicy()), threads)


def run_stake_suite(seed_policy: SeedPolicy | None = None, sizes: Sizes = FULL, threads: int = 1) -> list[CheckReport]:
    return _execute(_stake_tasks(sizes, seed_policy or SeedPolicy()), threads)


def run_checks(tables: bool = False, properties: bool = False, stakes: bool = False,
               seed_policy: SeedPolicy | None = None, sizes: Sizes = FULL, threads: int = 1,
               inject_fault: bool = False) -> list[CheckReport]:
    policy = seed_policy or SeedPolicy()
    tasks = []
    if tables:
        perturb = 1.0 if inject_fault else 0.0
        tasks += [lambda t=t: run_table_reproduction(t, perturb) for t in sorted(TABLES)]
    if properties:
        tasks += _property_tasks(sizes, policy)
    if stakes:
        tasks += _stake_tasks(sizes, policy)
    return _execute(tasks, threads)


def summarize(reports: list[CheckReport]) -> str:
    lines = []
    for r in reports:
        lines.append(f"{r.status.upper():8s} {r.check_id:36s} {r.runtime:8.2f}s  {r.claim_ref}")
        if r.detail:
            lines.append(f"{'':8s} {r.detail}")
    counts = {s: sum(r.status == s for r in reports) for s in STATUSES}
    lines.append(f"{counts['pass']} passed, {counts['fail']} failed, {counts['vacuous']} vacuous")
    return "\n".join(lines)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    obj = _plain(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_report(reports: list[CheckReport], out_dir: Path, header: str = "") -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "report.json"
    text_path = out_dir / "report.txt"
    json_path.write_text(json.dumps([_jsonable(r.to_dict()) for r in reports], indent=2) + "\n")
    text_path.write_text((f"# {header}\n" if header else "") + summarize(reports) + "\n")
    return json_path, text_path
