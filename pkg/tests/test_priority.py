from __future__ import annotations

from datetime import date

import numpy as np
import pytest

from subaudit.ingest import MatchRecord, Role, Substitution
from subaudit.metrics import InvalidStateError
from subaudit.priority import (
    OverrideError,
    PriorityConfig,
    audit_match,
    audit_slice,
    baseline,
    final_priority,
    fuzzy_inputs,
    score_state,
    what_if,
)

from conftest import make_state


class TestBaseline:
    def test_extremes(self):
        assert baseline(0.0) == 100.0
        assert baseline(1.0) == 0.0

    def test_implied_p_cum_for_72(self):
        assert baseline(0.28) == pytest.approx(72.0)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            baseline(1.2)
        with pytest.raises(ValueError):
            baseline(-0.1)


class TestFinalPriority:
    def test_zero_modifier_identity(self):
        assert final_priority(72.0, 0.0) == 72.0

    def test_upper_clamp(self):
        assert final_priority(95.0, 60.0) == 100.0

    def test_lower_clamp(self):
        assert final_priority(10.0, -60.0) == 0.0

    def test_alpha_scaling(self):
        assert final_priority(50.0, 40.0, PriorityConfig(alpha=0.25)) == 60.0

    def test_clamp_invariant_random(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            base = rng.uniform(0, 100)
            modifier = rng.uniform(-100, 100)
            assert 0.0 <= final_priority(base, modifier) <= 100.0


class TestScoreState:
    def test_neutral_state_keeps_baseline(self, bundled_system):
        result = score_state(make_state(), bundled_system)
        assert result.baseline == 50.0
        assert abs(result.modifier) <= 2.0
        assert result.p_final == pytest.approx(result.baseline, abs=0.5)

    def test_trace_replay_matches_modifier(self, bundled_system):
        state = make_state(
            player_position=Role.FORWARD,
            playerank_acumulativo_media_percentil=0.2,
            momentum_rate=-0.1,
            minutes_played=85,
            tempo_partida=85,
        )
        result = score_state(state, bundled_system)
        replayed = bundled_system.engine().replay(result.trace)
        assert replayed == pytest.approx(result.modifier, abs=1e-6)

    def test_modifier_bounded_deviation(self, bundled_system):
        # |p_final - baseline| <= 100 * alpha before clamping
        rng = np.random.default_rng(9)
        roles = [Role.DEFENDER, Role.MIDFIELDER, Role.FORWARD]
        for _ in range(300):
            state = make_state(
                playerank_acumulativo_media_percentil=rng.uniform(0, 1),
                momentum_rate=rng.uniform(-1, 1),
                minutes_played=int(rng.integers(1, 26)) * 5,
                player_age=int(rng.integers(15, 46)),
                cartao_amarelo=int(rng.integers(0, 2)),
                goals_scored=int(rng.integers(0, 4)),
                assists=int(rng.integers(0, 4)),
                player_position=roles[rng.integers(0, 3)],
            )
            result = score_state(state, bundled_system)
            assert abs(result.modifier) * 0.25 <= 25.0 + 1e-9
            assert 0.0 <= result.p_final <= 100.0


class TestAuditSlice:
    def test_ranks_descending(self, bundled_system):
        strong = make_state(player_id=1, playerank_acumulativo_media_percentil=0.9)
        weak = make_state(player_id=2, playerank_acumulativo_media_percentil=0.1)
        results = audit_slice([strong, weak], bundled_system)
        assert [r.player_id for r in results] == [2, 1]
        assert [r.rank for r in results] == [1, 2]
        assert results[0].p_final > results[1].p_final

    def test_tie_break_deterministic(self, bundled_system):
        states = [make_state(player_id=pid) for pid in (3, 1, 2)]
        results = audit_slice(states, bundled_system)
        assert [r.player_id for r in results] == [1, 2, 3]
        assert [r.rank for r in results] == [1, 2, 3]

    def test_goalkeeper_rejected(self, bundled_system):
        with pytest.raises(InvalidStateError):
            audit_slice([make_state(player_position=Role.GOALKEEPER)], bundled_system)

    def test_invalid_state_rejected_with_player_id(self, bundled_system):
        bad = make_state(player_id=77, playerank_acumulativo_media_percentil=1.5)
        with pytest.raises(InvalidStateError) as excinfo:
            audit_slice([bad], bundled_system)
        assert excinfo.value.player_id == 77

    def test_empty_slice_rejected(self, bundled_system):
        with pytest.raises(ValueError):
            audit_slice([], bundled_system)


def two_slice_match(bundled_system):
    states = [
        make_state(player_id=1, tempo_partida=5, minutes_played=5,
                   playerank_acumulativo_media_percentil=0.05),
        make_state(player_id=2, tempo_partida=5, minutes_played=5),
        make_state(player_id=1, tempo_partida=10, minutes_played=10,
                   playerank_acumulativo_media_percentil=0.05),
        make_state(player_id=2, tempo_partida=10, minutes_played=10),
    ]
    match = MatchRecord(
        match_id=1,
        date=date(2018, 7, 6),
        teams=(100, 200),
        lineups={100: (1, 2), 200: (3, 4)},
        substitutions=(Substitution(team_id=100, minute=58, player_out=1, player_in=9),),
    )
    return audit_match(states, match, bundled_system)


class TestAuditMatch:
    def test_covers_every_state_once(self, bundled_system):
        audit = two_slice_match(bundled_system)
        assert audit.slice_labels() == (5, 10)
        for label in (5, 10):
            assert sorted(r.player_id for r in audit.results_for(label)) == [1, 2]

    def test_goalkeepers_excluded(self, bundled_system):
        states = [
            make_state(player_id=1),
            make_state(player_id=2, player_position=Role.GOALKEEPER),
        ]
        audit = audit_match(states, None, bundled_system)
        assert [r.player_id for r in audit.results_for(50)] == [1]

    def test_empty_match_gives_empty_audit(self, bundled_system):
        audit = audit_match([], None, bundled_system)
        assert audit.slices == ()
        assert audit.latency == ()
        assert audit.post_entry == ()

    def test_mixed_matches_rejected(self, bundled_system):
        states = [make_state(match_id=1), make_state(match_id=2)]
        with pytest.raises(ValueError):
            audit_match(states, None, bundled_system)

    def test_tidy_frame_shape(self, bundled_system):
        audit = two_slice_match(bundled_system)
        frame = audit.to_frame()
        assert len(frame) == 4
        assert set(frame["slice_label"]) == {5, 10}
        assert {"baseline", "modifier", "p_final", "rank"} <= set(frame.columns)

    def test_json_round_trip(self, bundled_system):
        import json

        audit = two_slice_match(bundled_system)
        data = json.loads(audit.to_json())
        assert data["match_id"] == 1
        assert len(data["slices"]) == 2
        first = data["slices"][0]["results"][0]
        assert {"player_id", "baseline", "modifier", "p_final", "rank", "trace"} <= set(first)


class TestDecisionLatency:
    def _audit(self, labels_critical, sub_minute, bundled_system, player_id=1):
        # synthetic audit with chosen critical labels for one player
        states = []
        for label in (35, 40, 85, 90):
            p_cum = 0.01 if label in labels_critical else 0.5
            states.append(
                make_state(
                    player_id=player_id,
                    tempo_partida=label,
                    minutes_played=label,
                    playerank_acumulativo_media_percentil=p_cum,
                )
            )
        subs = ()
        if sub_minute is not None:
            subs = (Substitution(team_id=100, minute=sub_minute, player_out=player_id,
                                 player_in=99),)
        match = MatchRecord(
            match_id=1, date=date(2018, 7, 6), teams=(100, 200),
            lineups={100: (player_id, 2), 200: (3, 4)}, substitutions=subs,
        )
        return audit_match(states, match, bundled_system)

    def test_latency_52_minutes(self, bundled_system):
        audit = self._audit({35, 40, 85, 90}, sub_minute=87, bundled_system=bundled_system)
        entry = next(e for e in audit.latency if e.player_id == 1)
        assert entry.first_critical_minute == 35
        assert entry.substitution_minute == 87
        assert entry.latency_minutes == 52

    def test_never_substituted_unresolved(self, bundled_system):
        audit = self._audit({35, 40, 85, 90}, sub_minute=None, bundled_system=bundled_system)
        entry = next(e for e in audit.latency if e.player_id == 1)
        assert entry.first_critical_minute == 35
        assert entry.substitution_minute is None
        assert entry.latency_minutes is None
        assert entry.as_dict()["unresolved_critical"] is True

    def test_never_critical_gives_none(self, bundled_system):
        audit = self._audit(set(), sub_minute=87, bundled_system=bundled_system)
        entry = next(e for e in audit.latency if e.player_id == 1)
        assert entry.first_critical_minute is None
        assert entry.latency_minutes is None
        assert entry.as_dict()["unresolved_critical"] is False

    def test_substitution_before_critical_floors_at_zero(self, bundled_system):
        audit = self._audit({85, 90}, sub_minute=40, bundled_system=bundled_system)
        entry = next(e for e in audit.latency if e.player_id == 1)
        assert entry.first_critical_minute == 85
        assert entry.latency_minutes == 0


class TestPostEntry:
    def test_decreasing_series_labeled_high_impact(self, bundled_system):
        states = [
            make_state(player_id=9, tempo_partida=65, minutes_played=5,
                       playerank_acumulativo_media_percentil=0.3),
            make_state(player_id=9, tempo_partida=70, minutes_played=10,
                       playerank_acumulativo_media_percentil=0.5),
            make_state(player_id=9, tempo_partida=75, minutes_played=15,
                       playerank_acumulativo_media_percentil=0.7),
            make_state(player_id=1, tempo_partida=65, minutes_played=65),
        ]
        match = MatchRecord(
            match_id=1, date=date(2018, 7, 6), teams=(100, 200),
            lineups={100: (1, 2), 200: (3, 4)},
            substitutions=(Substitution(team_id=100, minute=58, player_out=2, player_in=9),),
        )
        audit = audit_match(states, match, bundled_system)
        track = next(t for t in audit.post_entry if t.player_id == 9)
        assert [label for label, _ in track.series] == [65, 70, 75]
        assert track.high_impact is True

    def test_flat_series_not_high_impact(self, bundled_system):
        states = [
            make_state(player_id=9, tempo_partida=65, minutes_played=5),
            make_state(player_id=9, tempo_partida=70, minutes_played=10),
        ]
        match = MatchRecord(
            match_id=1, date=date(2018, 7, 6), teams=(100, 200),
            lineups={100: (1, 2), 200: (3, 4)},
            substitutions=(Substitution(team_id=100, minute=58, player_out=2, player_in=9),),
        )
        audit = audit_match(states, match, bundled_system)
        track = next(t for t in audit.post_entry if t.player_id == 9)
        assert track.high_impact is False


class TestWhatIf:
    def test_empty_override_is_identity(self, bundled_system):
        state = make_state()
        direct = score_state(state, bundled_system)
        queried = what_if(state, {}, bundled_system)
        assert queried.p_final == direct.p_final
        assert queried.modifier == direct.modifier
        assert queried.trace.overridden == ()

    def test_defender_card_override_increases_priority(self, bundled_system):
        state = make_state(player_position=Role.DEFENDER)
        before = score_state(state, bundled_system)
        after = what_if(state, {"Card_Y": 1.0}, bundled_system)
        assert after.p_final > before.p_final
        assert "Card_Y" in after.trace.overridden

    def test_override_magnitude_matches_full_inference(self, bundled_system):
        # overriding an input must equal scoring the equivalently mutated state
        from dataclasses import replace

        state = make_state(player_position=Role.DEFENDER)
        overridden = what_if(state, {"Card_Y": 1.0}, bundled_system)
        mutated = score_state(replace(state, cartao_amarelo=1), bundled_system)
        assert overridden.p_final == pytest.approx(mutated.p_final, abs=1e-12)
        assert overridden.modifier == pytest.approx(mutated.modifier, abs=1e-12)

    def test_out_of_universe_override_names_field_and_bounds(self, bundled_system):
        with pytest.raises(OverrideError) as excinfo:
            what_if(make_state(), {"P_cum": 1.2}, bundled_system)
        assert excinfo.value.field == "P_cum"
        assert "[0, 1]" in str(excinfo.value)

    def test_unknown_field_rejected(self, bundled_system):
        with pytest.raises(OverrideError):
            what_if(make_state(), {"Stamina": 1.0}, bundled_system)

    def test_position_override_switches_flags(self, bundled_system):
        state = make_state(player_position=Role.MIDFIELDER, cartao_amarelo=1)
        as_defender = what_if(state, {"position": "Defender"}, bundled_system)
        assert as_defender.trace.inputs["is_Defender"] == 1.0
        assert as_defender.trace.inputs["is_Midfielder"] == 0.0
        baseline_result = score_state(state, bundled_system)
        assert as_defender.p_final > baseline_result.p_final  # card now matters

    def test_goalkeeper_position_override_rejected(self, bundled_system):
        with pytest.raises(OverrideError):
            what_if(make_state(), {"position": "Goalkeeper"}, bundled_system)


class TestContextualModulation:
    def test_carded_defender_outranks_carded_forward(self, bundled_system):
        defender = make_state(player_id=1, player_position=Role.DEFENDER, cartao_amarelo=1)
        forward = make_state(player_id=2, player_position=Role.FORWARD, cartao_amarelo=1)
        results = audit_slice([defender, forward], bundled_system)
        by_id = {r.player_id: r for r in results}
        assert by_id[1].p_final >= by_id[2].p_final
        assert by_id[1].rank <= by_id[2].rank


def test_fuzzy_inputs_mapping():
    state = make_state(player_position=Role.FORWARD, goals_scored=2, cartao_amarelo=1)
    inputs = fuzzy_inputs(state)
    assert inputs["is_Forward"] == 1.0
    assert inputs["is_Defender"] == 0.0
    assert inputs["Goals"] == 2.0
    assert inputs["Card_Y"] == 1.0
    assert inputs["P_cum"] == 0.5
