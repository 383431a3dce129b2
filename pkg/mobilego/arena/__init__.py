"""Tournaments between networks and inference benchmarks.
"""

from mobilego.arena.bench import SpeedReport, SpeedRow, throughput_bench
from mobilego.arena.tournament import (
    GameOutcome,
    Player,
    TournamentTable,
    play_game,
    round_robin,
)
