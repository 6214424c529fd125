"""Nash equilibria of the builders' game.

Two builders: exact closed form through the equilibrium quartic.  Any number of
builders: Gauss-Seidel iterated best response.  Each builder's utility is
strictly concave in its own bid and no best response exceeds
``f_bar + v_bar``, so every best response is a one-dimensional root search of
a strictly decreasing gradient on ``[epsilon, f_bar + v_bar]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quartic
from .errors import ConvergenceError, DomainError, ParameterError
from .game import (
    AuctionConfig,
    BuilderParams,
    _curvature,
    _gradient,
    expected_utility,
)

__all__ = [
    "EquilibriumResult",
    "solve_two_player_closed_form",
    "best_response",
    "solve_m_player",
    "multi_start_equilibria",
    "foc_residuals",
    "RatioReport",
    "ratio_diagnostics",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _frozen(a) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class EquilibriumResult:
    h_star: np.ndarray
    utilities: np.ndarray
    foc_residuals: np.ndarray
    clamped: np.ndarray
    iterations: int
    converged: bool
    lambda_star: float | None = None
    method: str = "best_response"
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("h_star", "utilities", "foc_residuals", "clamped"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "h_star": self.h_star.tolist(),
            "lambda_star": self.lambda_star,
            "utilities": self.utilities.tolist(),
            "foc_residuals": self.foc_residuals.tolist(),
            "clamped": [bool(c) for c in self.clamped],
            "iterations": self.iterations,
            "converged": self.converged,
            "diagnostics": self.diagnostics,
        }


def _as_config(params, epsilon=None) -> AuctionConfig:
    if isinstance(params, AuctionConfig):
        if epsilon is None or epsilon == params.epsilon:
            return params
        return AuctionConfig(params.builders, mu=params.mu, epsilon=epsilon)
    builders = tuple(b if isinstance(b, BuilderParams) else BuilderParams(*b) for b in params)
    return AuctionConfig(builders, epsilon=epsilon)


def foc_residuals(h, params: AuctionConfig) -> np.ndarray:
    """Each builder's utility gradient in its own bid at profile ``h``."""
    h = np.asarray(h, dtype=float)
    total = h.sum()
    return np.array([
        _gradient(b.f_bar, b.v_bar, h[i], total - h[i]) for i, b in enumerate(params.builders)
    ])


def _finish(h, config: AuctionConfig, clamped, iterations, converged, method, lam=None, **diag):
    h = np.asarray(h, dtype=float)
    utilities = np.array([expected_utility(i, h, config) for i in range(h.size)])
    return EquilibriumResult(
        h_star=h,
        utilities=utilities,
        foc_residuals=np.abs(foc_residuals(h, config)),
        clamped=np.asarray(clamped, dtype=bool),
        iterations=int(iterations),
        converged=bool(converged),
        lambda_star=lam,
        method=method,
        diagnostics={k: float(val) for k, val in diag.items()},
    )


def solve_two_player_closed_form(params, epsilon: float | None = None) -> EquilibriumResult:
    """Unique equilibrium of the two-builder game from the quartic resolvent."""
    config = _as_config(params, epsilon)
    if config.n_builders != 2:
        raise ParameterError("closed form requires exactly two builders")
    b1, b2 = config.builders
    f1, f2, v1, v2 = b1.f_bar, b2.f_bar, b1.v_bar, b2.v_bar
    inter = quartic.resolvent((b1, b2))
    lam = quartic.largest_root_closed_form((b1, b2), inter)
    poly = quartic.build_quartic((b1, b2))
    residual = abs(poly(lam))
    if not lam > 0:
        raise DomainError(f"closed-form root is not positive: {lam!r}")
    if residual > 1e-8 * poly.norm:
        raise DomainError(f"closed-form root misses the quartic: |P(lambda)| = {residual:.3e}")
    h1_a = lam * (f1 * lam + f1 + 2 * v1) / ((1 + 2 * lam) * (1 + lam))
    h1_b = (f2 + (f2 + 2 * v2) * lam) / (lam * (2 + lam) * (1 + lam))
    rel_gap = abs(h1_a - h1_b) / abs(h1_a)
    if rel_gap > 1e-9:
        raise DomainError(f"the two expressions for h1 disagree (relative gap {rel_gap:.3e})")
    raw = np.array([h1_a, lam * h1_a])
    h = np.maximum(raw, config.epsilon)
    return _finish(
        h, config, raw < config.epsilon, 0, True, "closed_form", lam,
        p=inter.p, q=inter.q, delta0=inter.delta0, delta1=inter.delta1, phi=inter.phi, S=inter.S,
        quartic_residual=residual, h1_relative_gap=rel_gap,
    )


def _golden_max(fun, lo, hi, tol):
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def _best_response_scalar(f, v, rest, lo, hi, tol, max_iter=200):
    """Maximiser of the builder's utility on ``[lo, hi]`` given the others' total.

    Returns ``(x, at_lower_bound, iterations)``.
    """
    g_lo = _gradient(f, v, lo, rest)
    if g_lo <= 0:
        return lo, True, 0
    g_hi = _gradient(f, v, hi, rest)
    if g_hi >= 0:
        return hi, False, 0
    a, b = lo, hi
    x = min(max((f + v) / 3.0, lo), hi)
    for it in range(1, max_iter + 1):
        g = _gradient(f, v, x, rest)
        if abs(g) < tol:
            return x, False, it
        if g > 0:
            a = x
        else:
            b = x
        d = _curvature(f, v, x, rest)
        x_new = x - g / d if d < 0 else 0.5 * (a + b)
        if not a < x_new < b:
            x_new = 0.5 * (a + b)
        if b - a <= 4e-16 * b:
            return x_new, False, it
        x = x_new
    # concavity should make the bracketed Newton loop converge; golden section as a fallback
    def util(h):
        H = h + rest
        return f * h / H + v * (h / H) ** 2 - h * h / H

    x = _golden_max(util, lo, hi, 1e-15)
    if abs(_gradient(f, v, x, rest)) < tol:
        return x, False, max_iter
    raise ConvergenceError(f"best response did not converge (gradient {_gradient(f, v, x, rest):.3e})")


def best_response(i: int, h_minus_i, params: AuctionConfig, bounds=None, tol: float = 1e-12) -> float:
    """Builder ``i``'s unique best response to the other builders' bids.

    ``h_minus_i`` lists the other builders' bids (only their sum matters);
    ``bounds`` defaults to ``[epsilon, f_bar_i + v_bar_i]``.
    """
    config = params
    b = config.builders[i]
    h_minus_i = np.atleast_1d(np.asarray(h_minus_i, dtype=float))
    if np.any(h_minus_i <= 0):
        raise ParameterError("the other builders' bids must be positive")
    lo, hi = bounds if bounds is not None else (config.epsilon, b.upper_bound)
    x, _, _ = _best_response_scalar(b.f_bar, b.v_bar, float(h_minus_i.sum()), lo, hi, tol)
    return x


def _gauss_seidel(config: AuctionConfig, h0, tol, max_iter, br_tol):
    h = np.array(h0, dtype=float)
    f = config.f_bar
    v = config.v_bar
    upper = f + v
    eps = config.epsilon
    m = h.size
    at_lower = np.zeros(m, dtype=bool)
    total = h.sum()
    for sweep in range(1, max_iter + 1):
        moved = False
        for i in range(m):
            rest = total - h[i]
            new, at_lower[i], _ = _best_response_scalar(f[i], v[i], rest, eps, upper[i], br_tol)
            if abs(new - h[i]) >= tol * (1.0 + abs(h[i])):
                moved = True
            h[i] = new
            total = rest + new
        if not moved:
            return h, at_lower, sweep, True
    return h, at_lower, max_iter, False


def solve_m_player(params, tol: float = 1e-10, max_iter: int = 10_000, h0=None,
                   br_tol: float = 1e-13) -> EquilibriumResult:
    """Equilibrium by Gauss-Seidel best response from ``h_i = (f_bar_i + v_bar_i) / 3``.

    Best responses live on ``[epsilon, f_bar_i + v_bar_i]``, so a builder whose
    unconstrained optimum sits below ``epsilon`` ends at ``epsilon`` and is
    flagged ``clamped``.  After convergence one more round of best responses
    confirms the fixed point.
    """
    config = _as_config(params)
    if config.n_builders < 2:
        raise ParameterError("need at least two builders")
    start = (config.f_bar + config.v_bar) / 3.0 if h0 is None else np.asarray(h0, dtype=float)
    h, at_lower, sweeps, converged = _gauss_seidel(config, start, tol, max_iter, br_tol)
    confirm_shift = 0.0
    if converged:
        total = h.sum()
        for i, b in enumerate(config.builders):
            x, _, _ = _best_response_scalar(b.f_bar, b.v_bar, total - h[i], config.epsilon,
                                            b.upper_bound, br_tol)
            confirm_shift = max(confirm_shift, abs(x - h[i]) / (1.0 + abs(h[i])))
        converged = confirm_shift < max(tol, 1e-12) * 10
    lam = float(h[1] / h[0]) if config.n_builders == 2 else None
    return _finish(h, config, at_lower, sweeps, converged, "best_response", lam,
                   confirm_shift=confirm_shift)


def multi_start_equilibria(params, starts: int = 20, seed=None, tol: float = 1e-10,
                           max_iter: int = 10_000) -> list[EquilibriumResult]:
    """Distinct fixed points reached from the canonical start plus random starts.

    Starts are uniform in each builder's box; two fixed points are the same
    when their bids agree to ``1e-6`` relative.
    """
    config = _as_config(params)
    rng = np.random.default_rng(seed)
    upper = config.f_bar + config.v_bar
    found: list[EquilibriumResult] = []
    inits = [None] + [config.epsilon + rng.random(upper.size) * (upper - config.epsilon) for _ in range(starts)]
    for h0 in inits:
        res = solve_m_player(config, tol=tol, max_iter=max_iter, h0=h0)
        if not res.converged:
            continue
        if not any(np.allclose(res.h_star, r.h_star, rtol=1e-6, atol=0) for r in found):
            found.append(res)
    return found


@dataclass(frozen=True)
class RatioReport:
    k1: float
    k2: float
    h_ratio: float
    relation: str   # "greater", "equal" or "less": h1/h2 compared with k2
    holds: bool


def ratio_diagnostics(params, tol: float = 1e-9) -> RatioReport:
    """Check how ``h1/h2`` compares with ``k2 = f1/f2`` when ``v/f`` is common.

    Expected: ``k2 < 1`` gives ``h1/h2 > k2``, ``k2 = 1`` gives ``h1/h2 = 1`` and
    ``k2 > 1`` gives ``h1/h2 < k2``.
    """
    config = _as_config(params)
    if config.n_builders != 2:
        raise ParameterError("ratio diagnostics need exactly two builders")
    b1, b2 = config.builders
    k1a, k1b = b1.v_bar / b1.f_bar, b2.v_bar / b2.f_bar
    if abs(k1a - k1b) > 1e-9 * max(k1a, k1b):
        raise ParameterError(f"v_bar/f_bar must be common to both builders (got {k1a!r}, {k1b!r})")
    k2 = b1.f_bar / b2.f_bar
    res = solve_two_player_closed_form(config)
    ratio = float(res.h_star[0] / res.h_star[1])
    if abs(k2 - 1.0) <= tol:
        relation, holds = "equal", abs(ratio - 1.0) <= tol
    elif k2 < 1.0:
        relation, holds = "greater", ratio > k2
    else:
        relation, holds = "less", ratio < k2
    return RatioReport(k1a, k2, ratio, relation, bool(holds))
