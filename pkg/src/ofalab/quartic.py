"""The two-builder equilibrium quartic and its closed-form resolvent.

With ``lam = h2 / h1`` the first-order conditions of the two-builder game reduce to

    P(lam) = f1 lam^4 + (3 f1 + 2 v1) lam^3 + (2 f1 - 2 f2 + 4 v1 - 4 v2) lam^2
             - (3 f2 + 2 v2) lam - f2 = 0,

which has exactly one positive root.  All four roots are real, so the largest
one can be written with a trigonometric (Ferrari/Viete) resolvent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError
from .game import BuilderParams

__all__ = [
    "QuarticCoefficients",
    "ResolventIntermediates",
    "build_quartic",
    "resolvent",
    "largest_root_closed_form",
    "quartic_real_roots",
    "positivity_margin",
    "PositivitySearch",
    "minimize_positivity_margin",
]

# round-off allowance for arccos arguments and square-root radicands
SLACK = 1e-12


@dataclass(frozen=True)
class QuarticCoefficients:
    a4: float
    a3: float
    a2: float
    a1: float
    a0: float

    def as_array(self) -> np.ndarray:
        """Highest degree first, as ``np.polyval`` expects."""
        return np.array([self.a4, self.a3, self.a2, self.a1, self.a0])

    def __call__(self, x):
        return (((self.a4 * x + self.a3) * x + self.a2) * x + self.a1) * x + self.a0

    def derivative(self, x):
        return ((4.0 * self.a4 * x + 3.0 * self.a3) * x + 2.0 * self.a2) * x + self.a1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


@dataclass(frozen=True)
class ResolventIntermediates:
    p: float
    q: float
    delta0: float
    delta1: float
    phi: float
    S: float


def _pair(params) -> tuple[float, float, float, float]:
    b1, b2 = params
    if not isinstance(b1, BuilderParams):
        b1 = BuilderParams(*b1)
    if not isinstance(b2, BuilderParams):
        b2 = BuilderParams(*b2)
    return b1.f_bar, b2.f_bar, b1.v_bar, b2.v_bar


def build_quartic(params) -> QuarticCoefficients:
    """Coefficients of the equilibrium quartic for a pair of builders."""
    f1, f2, v1, v2 = _pair(params)
    return QuarticCoefficients(
        f1,
        3 * f1 + 2 * v1,
        2 * f1 - 2 * f2 + 4 * v1 - 4 * v2,
        -(3 * f2 + 2 * v2),
        -f2,
    )


def _clamped_sqrt(x: float, what: str, scale: float = 1.0) -> float:
    if x < 0:
        if x < -SLACK * max(scale, 1.0):
            raise DomainError(f"negative radicand in {what}: {x!r}")
        return 0.0
    return math.sqrt(x)


def resolvent(params) -> ResolventIntermediates:
    f1, f2, v1, v2 = _pair(params)
    p = -(11 * f1**2 + 12 * v1**2 + 4 * f1 * (4 * f2 + v1 + 8 * v2)) / (8 * f1**2)
    q = (3 * f1**3 + 8 * v1**3 + 4 * f1 * v1 * (4 * f2 + v1 + 8 * v2)
         + f1**2 * (-10 * v1 + 32 * v2)) / (8 * f1**3)
    c3 = 3 * f1 + 2 * v1
    c2 = 2 * f1 - 2 * f2 + 4 * v1 - 4 * v2
    c1 = 3 * f2 + 2 * v2
    delta0 = c2**2 + 3 * c3 * c1 - 12 * f1 * f2
    delta1 = (-27 * f2 * c3**2 + 72 * f1 * f2 * c2 + 2 * c2**3
              + 9 * c3 * c2 * c1 + 27 * f1 * c1**2)
    if delta0 <= 0:
        raise DomainError(f"delta0 must be positive (got {delta0!r})")
    arg = delta1 / (2.0 * math.sqrt(delta0**3))
    if abs(arg) > 1.0:
        if abs(arg) - 1.0 > SLACK:
            raise DomainError(f"arccos argument {arg!r} outside [-1, 1]")
        arg = math.copysign(1.0, arg)
    phi = math.acos(arg)
    inner = -2.0 * p / 3.0 + 2.0 / (3.0 * f1) * math.sqrt(delta0) * math.cos(phi / 3.0)
    S = 0.5 * _clamped_sqrt(inner, "S", abs(p))
    if S <= 0:
        raise DomainError("resolvent S must be positive")
    return ResolventIntermediates(p, q, delta0, delta1, phi, S)


def largest_root_closed_form(params, intermediates: ResolventIntermediates | None = None) -> float:
    """The positive (largest) root of the equilibrium quartic."""
    f1, _, v1, _ = _pair(params)
    r = intermediates or resolvent(params)
    rad = -4.0 * r.S**2 - 2.0 * r.p - r.q / r.S
    return -(3 * f1 + 2 * v1) / (4 * f1) + r.S + 0.5 * _clamped_sqrt(rad, "lambda*", abs(r.p))


def positivity_margin(params) -> float:
    """``8 S^3 - q + 4 S^2 sqrt(-4 S^2 - 2 p - q / S)``; positive whenever the
    closed-form branch picks out the largest root."""
    r = resolvent(params)
    rad = -4.0 * r.S**2 - 2.0 * r.p - r.q / r.S
    return 8 * r.S**3 - r.q + 4 * r.S**2 * _clamped_sqrt(rad, "margin", abs(r.p))


@dataclass(frozen=True)
class PositivitySearch:
    minimum: float          # smallest 8 S^3 - q seen
    argmin: tuple[float, float, float, float]   # (f1, f2, v1, v2) with f2 = 1
    min_margin: float       # smallest full margin seen
    samples: int
    all_positive: bool


def minimize_positivity_margin(samples: int, seed=None, log_ratio_range: float = 3.0) -> PositivitySearch:
    """Random search of ``8 S^3 - q`` over ``f1 >= v1 > 0, f2 >= v2 > 0``.

    The expression is invariant under a common rescaling, so ``f2 = 1`` and
    ``f1`` is drawn log-uniformly on ``10**[-r, r]``; each ``v`` is a uniform
    fraction in ``(0, 1]`` of its ``f``.
    """
    rng = np.random.default_rng(seed)
    f1s = 10.0 ** rng.uniform(-log_ratio_range, log_ratio_range, samples)
    k1 = 1.0 - rng.random(samples)
    k2 = 1.0 - rng.random(samples)
    best, arg, best_margin = math.inf, None, math.inf
    for f1, a, b in zip(f1s, k1, k2):
        pair = (BuilderParams(f1, f1 * a), BuilderParams(1.0, b))
        r = resolvent(pair)
        value = 8 * r.S**3 - r.q
        margin = positivity_margin(pair)
        if value < best:
            best, arg = value, (float(f1), 1.0, float(f1 * a), float(b))
        best_margin = min(best_margin, margin)
    return PositivitySearch(best, arg, best_margin, samples, bool(best > 0 and best_margin > 0))


def _polish(c: QuarticCoefficients, x: float, iters: int = 8) -> float:
    for _ in range(iters):
        d = c.derivative(x)
        if d == 0:
            break
        step = c(x) / d
        x_new = x - step
        if abs(c(x_new)) >= abs(c(x)):
            break
        x = x_new
    return x


def quartic_real_roots(c: QuarticCoefficients, tol: float = 1e-10) -> list[float]:
    """Real roots of a quartic, ascending, repeated according to multiplicity.

    Eigenvalues of the companion matrix are refined by Newton's method; a root
    counts as real when, after polishing its real part, ``|P(x)| <= tol * ||c||``.
    """
    if c.a4 == 0:
        raise ParameterError("leading coefficient must be non-zero")
    coeffs = c.as_array()
    scale = c.norm
    out = []
    for z in np.roots(coeffs):
        if abs(z.imag) > 1e-6 * max(1.0, abs(z)):
            continue
        x = _polish(c, float(z.real))
        if abs(c(x)) <= tol * scale:
            out.append(x)
    return sorted(out)
