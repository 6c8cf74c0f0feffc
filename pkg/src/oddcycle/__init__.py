"""Odd-cycle nonlocal game: simulator, referee protocol, Bell analysis and graph bounds."""
from .bell import (
    BellEstimate,
    SettingCounts,
    advantage_window,
    calibrate_visibility,
    estimate_omega,
    nonlocal_content,
    nonsignaling_check,
    run_bell_test,
)
from .game import (
    ClassicalStrategy,
    GameSizeError,
    Query,
    QueryKind,
    brute_force_optimum,
    enumerate_queries,
    omega_c,
    omega_c_exact,
    wins,
)
from .kernels import BACKEND
from .protocol import GameConfig, GameStats, run_game
from .quantum import IDEAL, HeraldPattern, NoiseModel, TwoQubitState, omega_q, win_probability_exact

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BellEstimate", "ClassicalStrategy", "GameConfig", "GameSizeError", "GameStats", "HeraldPattern",
    "IDEAL", "NoiseModel", "Query", "QueryKind", "SettingCounts", "TwoQubitState", "advantage_window",
    "brute_force_optimum", "calibrate_visibility", "enumerate_queries", "estimate_omega", "nonlocal_content",
    "nonsignaling_check", "omega_c", "omega_c_exact", "omega_q", "run_bell_test", "run_game",
    "win_probability_exact", "wins",
]
