"""Referee/player protocol: phase machine, actors, transports."""
from .actors import BELL_LOG_HEADER, ROUND_LOG_HEADER, BellRecord, Player, Referee, RoundRecord, Source
from .inproc import GameConfig, run_game
from .machine import IllegalTransition, Phase, RefereeState
from .stats import GameStats, game_stats, sigma_above_classical, sigma_from
from .wire import Message, ProtocolError, decode

__all__ = [
    "BELL_LOG_HEADER", "ROUND_LOG_HEADER", "BellRecord", "GameConfig", "GameStats", "IllegalTransition",
    "Message", "Phase", "Player", "ProtocolError", "Referee", "RefereeState", "RoundRecord", "Source",
    "decode", "game_stats", "run_game", "sigma_above_classical", "sigma_from",
]
