"""Equilibrium bidding of block builders in order flow auctions, and the
stake-share dynamics of the validators they pay."""
from .errors import ConvergenceError, DomainError, ParameterError
from .game import AuctionConfig, BuilderParams, StrategyProfile, expected_utility, utility_gradient
from .equilibrium import EquilibriumResult, best_response, solve_m_player, solve_two_player_closed_form
from .seeding import SeedPolicy
from .stakes import RewardModel, StakeConfig, mean_reward, simulate, simulate_ensemble

__version__ = "0.1.0"

__all__ = [
    "AuctionConfig",
    "BuilderParams",
    "ConvergenceError",
    "DomainError",
    "EquilibriumResult",
    "ParameterError",
    "RewardModel",
    "SeedPolicy",
    "StakeConfig",
    "StrategyProfile",
    "best_response",
    "expected_utility",
    "mean_reward",
    "simulate",
    "simulate_ensemble",
    "solve_m_player",
    "solve_two_player_closed_form",
    "utility_gradient",
]
