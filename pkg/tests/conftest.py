from __future__ import annotations

import pytest

from subaudit.ingest import Role
from subaudit.metrics import PlayerSliceState
from subaudit.system import build_bundled_system

NEUTRAL_STATE = dict(
    match_id=1,
    player_id=10,
    team_id=100,
    tempo_partida=50,
    minutes_played=50,
    score_tecnico_fatia=0.0,
    score_rede_fatia=0.0,
    playerank_fatia_raw=0.0,
    playerank_fatia_percentil=0.5,
    playerank_acumulativo_media_raw=0.0,
    playerank_acumulativo_media_percentil=0.5,
    momentum_rate=0.0,
    cartao_amarelo=0,
    player_age=27,
    player_position=Role.MIDFIELDER,
    goals_scored=0,
    assists=0,
)


def make_state(**overrides) -> PlayerSliceState:
    data = {**NEUTRAL_STATE, **overrides}
    return PlayerSliceState(**data)


@pytest.fixture(scope="session")
def bundled_system():
    return build_bundled_system()
