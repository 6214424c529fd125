"""Builders' game: two sequential first-price auctions with Plackett-Luce winners.

Each builder ``i`` submits a total bid ``r_i`` with mean ``h_i``.  The order flow
auction and the block-building auction pick their winners independently, each
with probability ``h_i / sum(h)``.  A fraction ``mu`` of the bid goes to users
and the remainder to the selected validator.  Only the means ``f_bar`` (standalone
MEV) and ``v_bar`` (value of the auctioned order flow) enter the expected utility

    pi_i(h) = f_bar_i * h_i / H + v_bar_i * (h_i / H)**2 - h_i**2 / H,   H = sum(h).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ParameterError

__all__ = [
    "BuilderParams",
    "AuctionConfig",
    "StrategyProfile",
    "AuctionOutcome",
    "default_epsilon",
    "win_probability",
    "win_probabilities",
    "realized_revenue",
    "expected_utility",
    "utility_gradient",
    "utility_second_derivative",
    "sample_revenue_monte_carlo",
]


@dataclass(frozen=True)
class BuilderParams:
    """Expected values and bid support of a single builder.

    ``r_min``/``r_max`` bound the realized bid.  When omitted, ``r_max`` defaults
    to ``f_bar + v_bar`` (no best response exceeds it) and ``r_min`` to a tiny
    positive fraction of that.
    """

    f_bar: float
    v_bar: float
    r_min: float | None = None
    r_max: float | None = None

    def __post_init__(self):
        f, v = float(self.f_bar), float(self.v_bar)
        if not (math.isfinite(f) and math.isfinite(v)):
            raise ParameterError("f_bar and v_bar must be finite")
        if not (f > 0 and v > 0 and f >= v):
            raise ParameterError(
                f"builder parameters must satisfy f_bar >= v_bar > 0 "
                f"(got f_bar={f!r}, v_bar={v!r})"
            )
        r_max = f + v if self.r_max is None else float(self.r_max)
        r_min = 1e-6 * (f + v) if self.r_min is None else float(self.r_min)
        if not (0 < r_min <= r_max):
            raise ParameterError(f"bid support needs 0 < r_min <= r_max (got [{r_min}, {r_max}])")
        object.__setattr__(self, "f_bar", f)
        object.__setattr__(self, "v_bar", v)
        object.__setattr__(self, "r_min", r_min)
        object.__setattr__(self, "r_max", r_max)

    @property
    def upper_bound(self) -> float:
        """No best response reaches ``f_bar + v_bar``."""
        return self.f_bar + self.v_bar


def default_epsilon(builders: Sequence[BuilderParams]) -> float:
    return 1e-6 * min(b.f_bar + b.v_bar for b in builders)


@dataclass(frozen=True)
class AuctionConfig:
    builders: tuple[BuilderParams, ...]
    mu: float = 0.5
    epsilon: float | None = None

    def __post_init__(self):
        builders = tuple(self.builders)
        if len(builders) < 1:
            raise ParameterError("need at least one builder")
        if not 0.0 <= self.mu <= 1.0:
            raise ParameterError(f"mu must lie in [0, 1] (got {self.mu!r})")
        eps = default_epsilon(builders) if self.epsilon is None else float(self.epsilon)
        if not 0 < eps < min(b.f_bar + b.v_bar for b in builders):
            raise ParameterError(f"epsilon must satisfy 0 < epsilon < min(f_bar + v_bar) (got {eps!r})")
        object.__setattr__(self, "builders", builders)
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def from_arrays(cls, f_bar, v_bar, mu=0.5, epsilon=None) -> "AuctionConfig":
        f_bar = np.atleast_1d(np.asarray(f_bar, dtype=float))
        v_bar = np.atleast_1d(np.asarray(v_bar, dtype=float))
        if f_bar.shape != v_bar.shape:
            raise ParameterError("f_bar and v_bar must have the same length")
        return cls(tuple(BuilderParams(f, v) for f, v in zip(f_bar, v_bar)), mu=mu, epsilon=epsilon)

    @property
    def n_builders(self) -> int:
        return len(self.builders)

    @property
    def f_bar(self) -> np.ndarray:
        return np.array([b.f_bar for b in self.builders])

    @property
    def v_bar(self) -> np.ndarray:
        return np.array([b.v_bar for b in self.builders])

    def scaled(self, k: float) -> "AuctionConfig":
        """All monetary parameters multiplied by ``k``."""
        return AuctionConfig(
            tuple(BuilderParams(k * b.f_bar, k * b.v_bar, k * b.r_min, k * b.r_max) for b in self.builders),
            mu=self.mu,
            epsilon=k * self.epsilon,
        )


@dataclass(frozen=True)
class StrategyProfile:
    h: np.ndarray = field()

    def __post_init__(self):
        h = np.array(self.h, dtype=float).reshape(-1)
        if h.size == 0 or not np.all(np.isfinite(h)) or np.any(h <= 0):
            raise ParameterError("every expected bid h_i must be a finite positive number")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def total(self) -> float:
        return float(self.h.sum())

    def others(self, i: int) -> float:
        """Sum of every bid except builder ``i``'s."""
        return float(self.h.sum() - self.h[i])


@dataclass(frozen=True)
class AuctionOutcome:
    won_ofa: bool
    won_block: bool
    f: float = 0.0
    v: float = 0.0
    r: float = 0.0


def _profile(h) -> StrategyProfile:
    return h if isinstance(h, StrategyProfile) else StrategyProfile(h)


def _check_index(i: int, m: int) -> None:
    if not 0 <= i < m:
        raise IndexError(f"builder index {i} out of range for {m} builders")


def win_probability(h, i: int) -> float:
    profile = _profile(h)
    _check_index(i, profile.h.size)
    return float(profile.h[i] / profile.total)


def win_probabilities(h) -> np.ndarray:
    profile = _profile(h)
    return profile.h / profile.total


def realized_revenue(outcome: AuctionOutcome, mu: float) -> float:
    if outcome.won_ofa and outcome.won_block:
        return outcome.f + outcome.v - outcome.r
    if outcome.won_ofa:
        return -mu * outcome.r
    if outcome.won_block:
        return outcome.f - (1.0 - mu) * outcome.r
    return 0.0


def _unpack(i, h, params: AuctionConfig):
    profile = _profile(h)
    m = profile.h.size
    _check_index(i, m)
    if m != params.n_builders:
        raise ParameterError(f"profile has {m} bids but the game has {params.n_builders} builders")
    b = params.builders[i]
    return b.f_bar, b.v_bar, float(profile.h[i]), profile.others(i)


def expected_utility(i: int, h, params: AuctionConfig) -> float:
    f, v, hi, rest = _unpack(i, h, params)
    H = hi + rest
    share = hi / H
    return f * share + v * share * share - hi * share


def utility_gradient(i: int, h, params: AuctionConfig) -> float:
    """Partial derivative of builder ``i``'s expected utility in its own bid.

    Algebraically equal to
    ``(-f h H + f H^2 + 2 v h H - 2 v h^2 - 2 h H^2 + h^2 H) / H^3``;
    evaluated in the factored form ``f R/H^2 + 2 v h R/H^3 - h (h + 2R)/H^2``
    with ``R = H - h``, which avoids cancelling large terms.
    """
    f, v, hi, rest = _unpack(i, h, params)
    return _gradient(f, v, hi, rest)


def _gradient(f: float, v: float, hi: float, rest: float) -> float:
    H = hi + rest
    return (f * rest + 2.0 * v * hi * rest / H - hi * (hi + 2.0 * rest)) / (H * H)


def _curvature(f: float, v: float, hi: float, rest: float) -> float:
    H = hi + rest
    return -2.0 * rest * (f * H + rest * (rest - v) + hi * (rest + 2.0 * v)) / H**4


def utility_second_derivative(i: int, h, params: AuctionConfig) -> float:
    f, v, hi, rest = _unpack(i, h, params)
    if params.n_builders < 2:
        raise ParameterError("curvature is only defined for two or more builders")
    return _curvature(f, v, hi, rest)


def _draw_bids(rng: np.random.Generator, h: np.ndarray, idx: np.ndarray, spread: float,
               r_min: np.ndarray, r_max: np.ndarray) -> np.ndarray:
    centre = h[idx]
    if spread <= 0:
        return centre
    r = centre + spread * (2.0 * rng.random(idx.shape) - 1.0)
    return np.clip(r, r_min[idx], r_max[idx])


def sample_revenue_monte_carlo(i: int, h, params: AuctionConfig, draws: int, seed=None,
                               spread: float = 0.0) -> tuple[float, float]:
    """Monte-Carlo estimate of builder ``i``'s revenue and its standard error.

    Both auction winners are drawn independently from the Plackett-Luce
    probabilities; ``f`` and ``v`` sit at their means.  With ``spread > 0`` the
    realized bid is uniform on ``[h_i - spread, h_i + spread]`` clipped to the
    builder's support, drawn independently of who wins.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    profile = _profile(h)
    f, v, hi, _ = _unpack(i, profile, params)
    rng = np.random.default_rng(seed)
    m = profile.h.size
    if m == 1:
        ofa = np.ones(draws, dtype=bool)
        block = np.ones(draws, dtype=bool)
    else:
        cdf = np.cumsum(win_probabilities(profile))
        cdf[-1] = 1.0
        ofa = np.searchsorted(cdf, rng.random(draws), side="right") == i
        block = np.searchsorted(cdf, rng.random(draws), side="right") == i
    idx = np.full(draws, i)
    r_min = np.array([b.r_min for b in params.builders])
    r_max = np.array([b.r_max for b in params.builders])
    r = _draw_bids(rng, profile.h, idx, spread, r_min, r_max)
    revenue = np.where(
        ofa & block, f + v - r,
        np.where(ofa, -params.mu * r, np.where(block, f - (1.0 - params.mu) * r, 0.0)),
    )
    mean = float(revenue.mean())
    se = float(revenue.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
    return mean, se
