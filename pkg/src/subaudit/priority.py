"""Substitution-priority computation, per-slice rankings, match audits,
decision latency, and what-if queries.

The final priority combines a statistical baseline (inverse of the
cumulative percentile, on a 0-100 scale) with the fuzzy modifier scaled by
a damping factor, clamped into [0, 100]:

    baseline = 100 * (1 - P_cum)
    p_final  = clip(baseline + modifier * alpha, 0, 100)

Every scored slice keeps its full rule-activation trace, so any published
number can be replayed from the recorded firing strengths.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import pandas as pd

from .fuzzy import ActivationTrace
from .ingest import MatchRecord, Role, Substitution
from .metrics import DATASET_COLUMNS, InvalidStateError, PlayerSliceState
from .system import SystemConfig


class OverrideError(ValueError):
    """A what-if override referenced an unknown field or out-of-range value."""

    def __init__(self, fieldname: str, message: str):
        super().__init__(message)
        self.field = fieldname


@dataclass(frozen=True)
class PriorityConfig:
    alpha: float = 0.25
    critical_threshold: float = 90.0

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 <= self.critical_threshold <= 100.0:
            raise ValueError(
                f"critical threshold must be in [0, 100], got {self.critical_threshold}"
            )


def baseline(p_cum: float) -> float:
    """Statistical urgency floor: 100 * (1 - P_cum)."""
    if not 0.0 <= p_cum <= 1.0:
        raise ValueError(f"P_cum must be in [0, 1], got {p_cum}")
    return 100.0 * (1.0 - p_cum)


def final_priority(base: float, modifier: float, config: PriorityConfig = PriorityConfig()) -> float:
    """Clamped affine combination of baseline and scaled modifier."""
    return float(min(100.0, max(0.0, base + modifier * config.alpha)))


@dataclass(frozen=True)
class PriorityResult:
    """Scored snapshot of one player at one slice, with its audit trace."""

    player_id: int
    slice_label: int
    baseline: float
    modifier: float
    p_final: float
    rank: int | None
    trace: ActivationTrace

    def as_dict(self, include_trace: bool = True) -> dict:
        data = {
            "player_id": self.player_id,
            "slice_label": self.slice_label,
            "baseline": self.baseline,
            "modifier": self.modifier,
            "p_final": self.p_final,
            "rank": self.rank,
        }
        if include_trace:
            data["trace"] = self.trace.as_dict()
        return data


@dataclass(frozen=True)
class LatencyEntry:
    """Gap between the first critical slice and the actual substitution."""

    player_id: int
    first_critical_minute: int | None
    substitution_minute: int | None
    latency_minutes: int | None

    def as_dict(self) -> dict:
        return {
            "player_id": self.player_id,
            "first_critical_minute": self.first_critical_minute,
            "substitution_minute": self.substitution_minute,
            "latency_minutes": self.latency_minutes,
            "unresolved_critical": self.first_critical_minute is not None
            and self.substitution_minute is None,
        }


@dataclass(frozen=True)
class PostEntryTrack:
    """A substitute's priority series after entering the pitch."""

    player_id: int
    entry_minute: int
    series: tuple[tuple[int, float], ...]  # (slice label, p_final)
    high_impact: bool  # strictly decreasing priority over >= 2 slices

    def as_dict(self) -> dict:
        return {
            "player_id": self.player_id,
            "entry_minute": self.entry_minute,
            "series": [{"label": label, "p_final": p} for label, p in self.series],
            "high_impact": self.high_impact,
        }


@dataclass(frozen=True)
class MatchAudit:
    """Complete per-slice priority timeline and decision audit of one match."""

    match_id: int
    slices: tuple[tuple[int, tuple[PriorityResult, ...]], ...]  # (label, ranked results)
    substitutions: tuple[Substitution, ...]
    latency: tuple[LatencyEntry, ...]
    post_entry: tuple[PostEntryTrack, ...]
    players: Mapping[int, dict]  # player_id -> {"team_id", "role"}
    config: PriorityConfig

    def slice_labels(self) -> tuple[int, ...]:
        return tuple(label for label, _ in self.slices)

    def results_for(self, label: int) -> tuple[PriorityResult, ...]:
        for slice_label, results in self.slices:
            if slice_label == label:
                return results
        raise KeyError(f"match {self.match_id} has no slice {label}")

    def player_series(self, player_id: int) -> list[PriorityResult]:
        return [
            result
            for _, results in self.slices
            for result in results
            if result.player_id == player_id
        ]

    def as_dict(self, include_traces: bool = True) -> dict:
        return {
            "match_id": self.match_id,
            "alpha": self.config.alpha,
            "critical_threshold": self.config.critical_threshold,
            "players": {
                str(pid): dict(info) for pid, info in sorted(self.players.items())
            },
            "slices": [
                {
                    "label": label,
                    "results": [r.as_dict(include_trace=include_traces) for r in results],
                }
                for label, results in self.slices
            ],
            "substitutions": [
                {
                    "team_id": sub.team_id,
                    "minute": sub.minute,
                    "player_out": sub.player_out,
                    "player_in": sub.player_in,
                }
                for sub in self.substitutions
            ],
            "latency": [entry.as_dict() for entry in self.latency],
            "post_entry": [track.as_dict() for track in self.post_entry],
        }

    def to_json(self, include_traces: bool = True, indent: int = 2) -> str:
        return json.dumps(self.as_dict(include_traces=include_traces), indent=indent)

    def to_frame(self) -> pd.DataFrame:
        """Tidy per-slice table, ready for plotting priority timelines."""
        rows = []
        for label, results in self.slices:
            for result in results:
                info = self.players.get(result.player_id, {})
                rows.append(
                    {
                        "match_id": self.match_id,
                        "slice_label": label,
                        "player_id": result.player_id,
                        "team_id": info.get("team_id"),
                        "role": info.get("role"),
                        "baseline": result.baseline,
                        "modifier": result.modifier,
                        "p_final": result.p_final,
                        "rank": result.rank,
                    }
                )
        return pd.DataFrame(
            rows,
            columns=[
                "match_id", "slice_label", "player_id", "team_id", "role",
                "baseline", "modifier", "p_final", "rank",
            ],
        )


def fuzzy_inputs(state: PlayerSliceState) -> dict[str, float]:
    """Crisp fuzzy-system inputs read off one slice state."""
    role = state.player_position
    return {
        "P_cum": state.playerank_acumulativo_media_percentil,
        "Momentum": state.momentum_rate,
        "Min_played": float(state.minutes_played),
        "Age": float(state.player_age),
        "Card_Y": float(state.cartao_amarelo),
        "Goals": float(state.goals_scored),
        "Assists": float(state.assists),
        "is_Defender": 1.0 if role is Role.DEFENDER else 0.0,
        "is_Midfielder": 1.0 if role is Role.MIDFIELDER else 0.0,
        "is_Forward": 1.0 if role is Role.FORWARD else 0.0,
    }


def score_state(
    state: PlayerSliceState,
    system: SystemConfig,
    config: PriorityConfig = PriorityConfig(),
    inputs: Mapping[str, float] | None = None,
    overridden: Iterable[str] = (),
) -> PriorityResult:
    """Run inference for one state and apply the hybrid priority formula."""
    crisp = dict(fuzzy_inputs(state)) if inputs is None else dict(inputs)
    modifier, trace = system.engine().evaluate(crisp, overridden=overridden)
    base = baseline(crisp["P_cum"])
    return PriorityResult(
        player_id=state.player_id,
        slice_label=state.tempo_partida,
        baseline=base,
        modifier=modifier,
        p_final=final_priority(base, modifier, config),
        rank=None,
        trace=trace,
    )


def _rank(results: list[PriorityResult]) -> list[PriorityResult]:
    # Descending priority; ties broken by lower P_cum (= higher baseline),
    # then lexicographic player id, so rankings are reproducible.
    ordered = sorted(
        results, key=lambda r: (-r.p_final, -r.baseline, str(r.player_id))
    )
    return [replace(result, rank=position + 1) for position, result in enumerate(ordered)]


def audit_slice(
    states: Sequence[PlayerSliceState],
    system: SystemConfig,
    config: PriorityConfig = PriorityConfig(),
) -> list[PriorityResult]:
    """Score and rank the on-field outfield players of one slice."""
    if not states:
        raise ValueError("audit_slice needs at least one state")
    for state in states:
        if state.player_position is Role.GOALKEEPER:
            raise InvalidStateError(state.player_id, "goalkeepers are not ranked")
        state.validate()
    return _rank([score_state(state, system, config) for state in states])


def audit_match(
    states: pd.DataFrame | Sequence[PlayerSliceState],
    match: MatchRecord | None,
    system: SystemConfig,
    config: PriorityConfig = PriorityConfig(),
) -> MatchAudit:
    """Audit every retained slice of one match and derive latency and
    post-entry reports. Goalkeeper rows are excluded from rankings."""
    if isinstance(states, pd.DataFrame):
        state_list = [PlayerSliceState.from_row(row) for _, row in states.iterrows()]
    else:
        state_list = list(states)
    state_list = [s for s in state_list if s.player_position is not Role.GOALKEEPER]

    match_ids = {s.match_id for s in state_list}
    if match is not None:
        match_ids.add(match.match_id)
    if len(match_ids) > 1:
        raise ValueError(f"audit_match got states from multiple matches: {sorted(match_ids)}")
    match_id = match.match_id if match is not None else (match_ids.pop() if match_ids else 0)

    by_label: dict[int, list[PlayerSliceState]] = {}
    for state in state_list:
        by_label.setdefault(state.tempo_partida, []).append(state)

    slices = tuple(
        (label, tuple(audit_slice(by_label[label], system, config)))
        for label in sorted(by_label)
    )
    players = {
        state.player_id: {"team_id": state.team_id, "role": state.player_position.value}
        for state in state_list
    }
    substitutions = match.substitutions if match is not None else ()

    audit = MatchAudit(
        match_id=match_id,
        slices=slices,
        substitutions=substitutions,
        latency=(),
        post_entry=(),
        players=players,
        config=config,
    )
    latency = tuple(decision_latency(audit, config))
    post_entry = tuple(_post_entry_tracks(audit))
    return replace(audit, latency=latency, post_entry=post_entry)


def decision_latency(
    audit: MatchAudit, config: PriorityConfig = PriorityConfig()
) -> list[LatencyEntry]:
    """Latency entry per audited player.

    first_critical is the earliest slice label whose priority exceeds the
    critical threshold; latency is floored at 0 and is None whenever the
    player was never critical or never substituted.
    """
    sub_minutes = {sub.player_out: sub.minute for sub in audit.substitutions}
    first_critical: dict[int, int] = {}
    for label, results in audit.slices:
        for result in results:
            if result.p_final > config.critical_threshold and result.player_id not in first_critical:
                first_critical[result.player_id] = label
    entries = []
    for player_id in sorted(audit.players, key=str):
        critical = first_critical.get(player_id)
        substituted = sub_minutes.get(player_id)
        latency = (
            max(0, substituted - critical)
            if critical is not None and substituted is not None
            else None
        )
        entries.append(
            LatencyEntry(
                player_id=player_id,
                first_critical_minute=critical,
                substitution_minute=substituted,
                latency_minutes=latency,
            )
        )
    return entries


def _post_entry_tracks(audit: MatchAudit) -> list[PostEntryTrack]:
    tracks = []
    for sub in audit.substitutions:
        series = tuple(
            (result.slice_label, result.p_final)
            for result in audit.player_series(sub.player_in)
        )
        if not series:
            continue
        values = [p for _, p in series]
        decreasing = len(values) >= 2 and all(b < a for a, b in zip(values, values[1:]))
        tracks.append(
            PostEntryTrack(
                player_id=sub.player_in,
                entry_minute=sub.minute,
                series=series,
                high_impact=decreasing,
            )
        )
    return tracks


# What-if override surface: fuzzy input names plus the positional role.
_NUMERIC_OVERRIDES = ("P_cum", "Momentum", "Min_played", "Age", "Card_Y", "Goals", "Assists")
_ROLE_OVERRIDE = "position"


def what_if(
    state: PlayerSliceState,
    overrides: Mapping[str, float | str],
    system: SystemConfig,
    config: PriorityConfig = PriorityConfig(),
) -> PriorityResult:
    """Re-score one state under hypothetical inputs, keeping the full trace.

    Override keys are the fuzzy input names (P_cum, Momentum, Min_played,
    Age, Card_Y, Goals, Assists) or `position`; numeric values must lie
    within the corresponding variable universe. The returned trace marks
    which inputs were overridden; rank is not assigned (caller re-ranks
    against peers when needed).
    """
    inputs = fuzzy_inputs(state)
    touched: list[str] = []
    for key, value in overrides.items():
        if key == _ROLE_OVERRIDE:
            try:
                role = Role(str(value))
            except ValueError:
                raise OverrideError(key, f"position must be one of {[r.value for r in Role]}")
            if role is Role.GOALKEEPER:
                raise OverrideError(key, "goalkeepers are outside the audited population")
            for flag_role, flag in (
                (Role.DEFENDER, "is_Defender"),
                (Role.MIDFIELDER, "is_Midfielder"),
                (Role.FORWARD, "is_Forward"),
            ):
                inputs[flag] = 1.0 if role is flag_role else 0.0
                touched.append(flag)
            continue
        if key not in _NUMERIC_OVERRIDES:
            raise OverrideError(
                key,
                f"unknown override {key!r}; expected one of "
                f"{list(_NUMERIC_OVERRIDES) + [_ROLE_OVERRIDE]}",
            )
        try:
            numeric = float(value)
        except (TypeError, ValueError):
            raise OverrideError(key, f"{key} must be numeric, got {value!r}")
        universe = system.input_universe(key)
        if not universe.contains(numeric):
            raise OverrideError(
                key, f"{key} must be within [{universe.lo:g}, {universe.hi:g}], got {numeric:g}"
            )
        inputs[key] = numeric
        touched.append(key)
    return score_state(state, system, config, inputs=inputs, overridden=tuple(touched))


def states_from_frame(frame: pd.DataFrame) -> list[PlayerSliceState]:
    """Convert a pipeline output frame into typed slice states."""
    missing = [c for c in DATASET_COLUMNS if c not in frame.columns and c != "position"]
    if missing:
        raise ValueError(f"state frame missing columns: {missing}")
    return [PlayerSliceState.from_row(row) for _, row in frame.iterrows()]
