"""Per-slice performance pipeline: technical and network scores, their
combination, role-aware percentiles, the cumulative-mean metric, momentum,
and contextual enrichment.

The exported table replaces a running *sum* of contributions with the
running *mean* of per-slice percentiles, so a player's curve can fall when
their per-slice efficiency falls -- long minutes alone no longer inflate
the score.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from .ingest import (
    MatchRecord,
    PlayerRecord,
    RawEvent,
    Role,
    Tables,
    TAG_ACCURATE,
    TAG_ASSIST,
    TAG_GOAL,
    TAG_INACCURATE,
    TAG_YELLOW_CARD,
    ValidationError,
    events_frame,
    on_field_intervals,
)

log = logging.getLogger(__name__)

PASS_EVENT = "Pass"
SHOT_EVENT = "Shot"
GOAL_SUB_EVENT = "Goal"

DEFAULT_AGE = 26  # fallback when a birth date is missing (mid-universe)

DATASET_COLUMNS = [
    "matchId", "playerId", "teamId", "Tempo_Partida", "minutes_played",
    "playerank_fatia_raw", "playerank_acumulativo_media_raw",
    "score_tecnico_fatia", "score_rede_fatia",
    "playerank_fatia_percentil", "playerank_acumulativo_media_percentil",
    "momentum_rate", "cartao_amarelo", "player_age", "player_position",
    "goals_scored", "assists", "position",
]


class ConvergenceError(RuntimeError):
    """Power iteration failed to converge (unreachable with teleport > 0)."""


@dataclass(frozen=True)
class WeightRule:
    """One technical-weight lookup: an event pattern and its signed weight.

    A rule matches when the event name and sub-event name equal the given
    ones (None = wildcard), every `requires` tag is present, and no
    `forbids` tag is. The first matching rule in the table wins.
    """

    weight: float
    event_name: str | None = None
    sub_event_name: str | None = None
    requires: frozenset[int] = frozenset()
    forbids: frozenset[int] = frozenset()

    def matches(self, event_name: str, sub_event_name: str, tags: Iterable[int]) -> bool:
        tag_set = set(tags)
        if self.event_name is not None and event_name != self.event_name:
            return False
        if self.sub_event_name is not None and sub_event_name != self.sub_event_name:
            return False
        return self.requires <= tag_set and not (self.forbids & tag_set)

    def as_dict(self) -> dict:
        return {
            "weight": self.weight,
            "event_name": self.event_name,
            "sub_event_name": self.sub_event_name,
            "requires": sorted(self.requires),
            "forbids": sorted(self.forbids),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "WeightRule":
        return cls(
            weight=float(data["weight"]),
            event_name=data.get("event_name"),
            sub_event_name=data.get("sub_event_name"),
            requires=frozenset(int(t) for t in data.get("requires", ())),
            forbids=frozenset(int(t) for t in data.get("forbids", ())),
        )


# Replaceable default weight table: positive for accurate passes, shots on
# target, won duels, interceptions, and clearances; negative for inaccurate
# passes, lost duels, and fouls. Swap in any calibrated table via
# PipelineConfig.from_json without touching code.
DEFAULT_WEIGHT_RULES: tuple[WeightRule, ...] = (
    WeightRule(+1.0, PASS_EVENT, requires=frozenset({TAG_ACCURATE})),
    WeightRule(-1.0, PASS_EVENT, requires=frozenset({TAG_INACCURATE})),
    WeightRule(+1.5, SHOT_EVENT, requires=frozenset({TAG_ACCURATE})),
    WeightRule(-0.3, SHOT_EVENT, requires=frozenset({TAG_INACCURATE})),
    WeightRule(+0.5, "Duel", requires=frozenset({703})),   # duel won
    WeightRule(-0.5, "Duel", requires=frozenset({701})),   # duel lost
    WeightRule(-0.5, "Foul"),
    WeightRule(+0.3, "Others on the ball", sub_event_name="Clearance"),
    WeightRule(+0.6, requires=frozenset({1401})),          # interception, any event
)


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable knobs of the slice pipeline."""

    alpha_net: float = 0.2
    weight_rules: tuple[WeightRule, ...] = DEFAULT_WEIGHT_RULES
    slice_seconds: int = 300
    teleport: float = 0.01
    team_normalization: str = "abs_volume"  # or "none"
    percentile_tie_rule: str = "average_rank"
    goal_tag_fallback: bool = True  # also count Shot events tagged as goals

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha_net <= 1.0:
            raise ValueError(f"alpha_net must be in [0, 1], got {self.alpha_net}")
        if any(not np.isfinite(rule.weight) for rule in self.weight_rules):
            raise ValueError("technical weights must be finite")
        if self.team_normalization not in ("abs_volume", "none"):
            raise ValueError(f"unknown team_normalization {self.team_normalization!r}")
        if self.percentile_tie_rule != "average_rank":
            raise ValueError(f"unsupported percentile tie rule {self.percentile_tie_rule!r}")

    def to_json(self) -> str:
        data = {
            "alpha_net": self.alpha_net,
            "weight_rules": [rule.as_dict() for rule in self.weight_rules],
            "slice_seconds": self.slice_seconds,
            "teleport": self.teleport,
            "team_normalization": self.team_normalization,
            "percentile_tie_rule": self.percentile_tie_rule,
            "goal_tag_fallback": self.goal_tag_fallback,
        }
        return json.dumps(data, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        data = json.loads(text)
        if "weight_rules" in data:
            data["weight_rules"] = tuple(WeightRule.from_dict(r) for r in data["weight_rules"])
        return cls(**data)


def event_weight(
    event_name: str,
    sub_event_name: str,
    tags: Iterable[int],
    rules: Sequence[WeightRule] = DEFAULT_WEIGHT_RULES,
) -> float:
    """Signed technical weight of one event; unknown actions contribute 0."""
    for rule in rules:
        if rule.matches(event_name, sub_event_name, tags):
            return rule.weight
    return 0.0


def technical_score(
    player_events: Sequence[RawEvent],
    config: PipelineConfig,
    team_events: Sequence[RawEvent] | None = None,
) -> float:
    """Weighted action sum for one player-slice, normalized by the team's
    total absolute weighted volume in that slice."""
    if team_events is None:
        team_events = player_events
    total = sum(event_weight(e.event_name, e.sub_event_name, e.tags, config.weight_rules)
                for e in player_events)
    if config.team_normalization == "none":
        return total
    volume = sum(abs(event_weight(e.event_name, e.sub_event_name, e.tags, config.weight_rules))
                 for e in team_events)
    return total / volume if volume > 0 else 0.0


class PassGraph:
    """Directed weighted graph of completed passes: passer -> receiver."""

    def __init__(self) -> None:
        self._weights: dict[tuple[int, int], int] = {}
        self._nodes: set[int] = set()

    def add_pass(self, passer: int, receiver: int) -> None:
        if passer == receiver:
            return  # no self-loops
        self._nodes.add(passer)
        self._nodes.add(receiver)
        key = (passer, receiver)
        self._weights[key] = self._weights.get(key, 0) + 1

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted(self._nodes))

    def weight(self, passer: int, receiver: int) -> int:
        return self._weights.get((passer, receiver), 0)

    def __len__(self) -> int:
        return len(self._nodes)

    def matrix(self) -> tuple[tuple[int, ...], np.ndarray]:
        """Node ids plus the adjacency matrix A with A[i, j] = passes i -> j."""
        ids = self.nodes
        index = {pid: i for i, pid in enumerate(ids)}
        adj = np.zeros((len(ids), len(ids)))
        for (p, r), w in self._weights.items():
            adj[index[p], index[r]] = w
        return ids, adj


def network_score(
    graph: PassGraph,
    teleport: float = 0.01,
    max_iter: int = 1000,
    tol: float = 1e-10,
) -> dict[int, float]:
    """Eigenvector centrality of the pass graph, max-normalized to [0, 1].

    Power iteration runs on the transpose (centrality flows to receivers)
    with a uniform teleport term added to every entry, which makes the
    matrix primitive and the iteration provably convergent. An empty graph
    yields an empty map (callers treat absent players as 0).
    """
    ids, adj = graph.matrix()
    n = len(ids)
    if n == 0:
        return {}
    matrix = adj.T + teleport
    # Diagonal shift: keeps the dominant eigenvector unchanged while pushing
    # every other eigenvalue strictly inside the spectral radius, so heavy
    # two-player pass cycles (near-periodic matrices) still converge fast.
    shift = float(np.max(matrix.sum(axis=1)))
    matrix = matrix + shift * np.eye(n)
    vec = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = matrix @ vec
        nxt /= np.linalg.norm(nxt)
        if np.max(np.abs(nxt - vec)) < tol:
            vec = nxt
            break
        vec = nxt
    else:
        raise ConvergenceError(
            f"power iteration did not converge in {max_iter} iterations at tol {tol}"
        )
    vec = np.abs(vec)
    vec /= vec.max()
    return {pid: float(c) for pid, c in zip(ids, vec)}


def build_pass_graphs(frame: pd.DataFrame) -> dict[tuple[int, int], PassGraph]:
    """One PassGraph per (team_id, slice_idx) from a normalized event frame.

    The receiver of a completed pass is the player of the next event when it
    belongs to the same team; possession-losing rows produce no edge. The
    edge is attributed to the slice the pass started in.
    """
    graphs: dict[tuple[int, int], PassGraph] = {}
    names = frame["event_name"].to_numpy()
    tags = frame["tags"].to_numpy()
    teams = frame["team_id"].to_numpy()
    players = frame["player_id"].to_numpy()
    slices = frame["slice_idx"].to_numpy()
    for i in range(len(frame) - 1):
        if names[i] != PASS_EVENT or TAG_ACCURATE not in tags[i]:
            continue
        if teams[i + 1] != teams[i] or players[i + 1] == players[i]:
            continue
        key = (int(teams[i]), int(slices[i]))
        graphs.setdefault(key, PassGraph()).add_pass(int(players[i]), int(players[i + 1]))
    return graphs


def raw_slice_score(tech: float, net: float, alpha_net: float) -> float:
    """Linear blend of the technical and network components."""
    if not 0.0 <= alpha_net <= 1.0:
        raise ValueError(f"alpha_net must be in [0, 1], got {alpha_net}")
    return (1.0 - alpha_net) * tech + alpha_net * net


def role_percentile(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Fractional average rank: percentile = mean rank / group size.

    Rank-based, so any strictly increasing transform of the inputs leaves
    the output unchanged; ties share their average rank.
    """
    series = pd.Series(np.asarray(values, dtype=float))
    if series.empty:
        return np.array([])
    return (series.rank(method="average") / len(series)).to_numpy()


def cumulative_mean(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Expanding mean: element t is the mean of elements 1..t."""
    return pd.Series(np.asarray(values, dtype=float)).expanding().mean().to_numpy()


def momentum(series: Sequence[float] | np.ndarray) -> np.ndarray:
    """First difference of the cumulative percentile; the first element is 0."""
    arr = np.asarray(series, dtype=float)
    if arr.size == 0:
        return arr.copy()
    return np.diff(arr, prepend=arr[:1])


def age_on(birth: date | None, on_date: date, player_id: int | None = None) -> int:
    """Whole years between birth and a reference date; missing birth -> 26."""
    if birth is None:
        log.warning("player %s has no birth date; defaulting age to %d", player_id, DEFAULT_AGE)
        return DEFAULT_AGE
    years = on_date.year - birth.year - ((on_date.month, on_date.day) < (birth.month, birth.day))
    return int(min(45, max(15, years)))


class InvalidStateError(ValueError):
    """A slice state violates its type invariants; carries the player id."""

    def __init__(self, player_id, message: str):
        super().__init__(f"player {player_id}: {message}")
        self.player_id = player_id


@dataclass(frozen=True)
class PlayerSliceState:
    """One player's snapshot at the end of a 5-minute slice."""

    match_id: int
    player_id: int
    team_id: int
    tempo_partida: int
    minutes_played: int
    score_tecnico_fatia: float
    score_rede_fatia: float
    playerank_fatia_raw: float
    playerank_fatia_percentil: float
    playerank_acumulativo_media_raw: float
    playerank_acumulativo_media_percentil: float
    momentum_rate: float
    cartao_amarelo: int
    player_age: int
    player_position: Role
    goals_scored: int
    assists: int

    def __post_init__(self) -> None:
        if not isinstance(self.player_position, Role):
            object.__setattr__(self, "player_position", Role(self.player_position))

    def validate(self) -> None:
        checks = [
            (0.0 <= self.playerank_fatia_percentil <= 1.0, "slice percentile outside [0, 1]"),
            (0.0 <= self.playerank_acumulativo_media_percentil <= 1.0,
             "cumulative percentile outside [0, 1]"),
            (-1.0 <= self.momentum_rate <= 1.0, "momentum outside [-1, 1]"),
            (self.cartao_amarelo in (0, 1), "yellow-card flag must be 0 or 1"),
            (15 <= self.player_age <= 45, "age outside [15, 45]"),
            (self.goals_scored >= 0, "negative goal count"),
            (self.assists >= 0, "negative assist count"),
            (self.minutes_played > 0 and self.minutes_played % 5 == 0,
             "minutes_played must be a positive multiple of 5"),
            (self.tempo_partida > 0 and self.tempo_partida % 5 == 0,
             "slice label must be a positive multiple of 5"),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidStateError(self.player_id, message)

    @classmethod
    def from_row(cls, row: Mapping) -> "PlayerSliceState":
        return cls(
            match_id=int(row["matchId"]),
            player_id=int(row["playerId"]),
            team_id=int(row["teamId"]),
            tempo_partida=int(row["Tempo_Partida"]),
            minutes_played=int(row["minutes_played"]),
            score_tecnico_fatia=float(row["score_tecnico_fatia"]),
            score_rede_fatia=float(row["score_rede_fatia"]),
            playerank_fatia_raw=float(row["playerank_fatia_raw"]),
            playerank_fatia_percentil=float(row["playerank_fatia_percentil"]),
            playerank_acumulativo_media_raw=float(row["playerank_acumulativo_media_raw"]),
            playerank_acumulativo_media_percentil=float(
                row["playerank_acumulativo_media_percentil"]
            ),
            momentum_rate=float(row["momentum_rate"]),
            cartao_amarelo=int(row["cartao_amarelo"]),
            player_age=int(row["player_age"]),
            player_position=Role(row["player_position"]),
            goals_scored=int(row["goals_scored"]),
            assists=int(row["assists"]),
        )


def _cumulative_by_slice(
    frame: pd.DataFrame, mask: pd.Series, n_slices: int
) -> dict[int, np.ndarray]:
    """Per player: cumulative count of masked events up to each slice index."""
    out: dict[int, np.ndarray] = {}
    selected = frame[mask]
    if selected.empty:
        return out
    counts = selected.groupby(["player_id", "slice_idx"]).size()
    for (pid, k), n in counts.items():
        arr = out.setdefault(int(pid), np.zeros(n_slices))
        if k < n_slices:
            arr[int(k)] += n
    return {pid: arr.cumsum() for pid, arr in out.items()}


def _is_goal(name: str, sub_name: str, tags: tuple[int, ...], config: PipelineConfig) -> bool:
    if name != SHOT_EVENT:
        return False
    return sub_name == GOAL_SUB_EVENT or (config.goal_tag_fallback and TAG_GOAL in tags)


def build_match_states(
    events: Sequence[RawEvent],
    match: MatchRecord,
    players: Mapping[int, PlayerRecord],
    config: PipelineConfig = PipelineConfig(),
) -> pd.DataFrame:
    """Full pipeline for one match: events in, dense per-slice state table out.

    A row exists for every slice a player overlaps on the field (goalkeepers
    keep the whole match), including event-less slices at score 0; slices
    outside the on-field interval are dropped so cumulative metrics reflect
    presence, not roster membership.
    """
    frame = events_frame(events)
    frame = frame[frame["match_id"] == match.match_id].reset_index(drop=True)
    if frame.empty:
        return pd.DataFrame(columns=DATASET_COLUMNS)
    n_slices = int(frame["slice_idx"].max()) + 1
    intervals = on_field_intervals(match, events, players)

    roster_team: dict[int, int] = {}
    for team_id, lineup in match.lineups.items():
        for pid in lineup:
            roster_team[pid] = team_id
    for sub in match.substitutions:
        roster_team.setdefault(sub.player_in, sub.team_id)

    weights = np.array(
        [
            event_weight(name, sub_name, tags, config.weight_rules)
            for name, sub_name, tags in zip(
                frame["event_name"], frame["sub_event_name"], frame["tags"]
            )
        ]
    )
    work = frame.assign(_w=weights, _aw=np.abs(weights))
    player_totals = work.groupby(["team_id", "slice_idx", "player_id"])["_w"].sum()
    team_volumes = work.groupby(["team_id", "slice_idx"])["_aw"].sum()

    tech: dict[tuple[int, int], float] = {}
    for (team_id, k, pid), total in player_totals.items():
        if config.team_normalization == "none":
            tech[(int(pid), int(k))] = float(total)
        else:
            volume = float(team_volumes.loc[(team_id, k)])
            tech[(int(pid), int(k))] = float(total) / volume if volume > 0 else 0.0

    net: dict[tuple[int, int], float] = {}
    for (team_id, k), graph in build_pass_graphs(frame).items():
        for pid, centrality in network_score(graph, config.teleport).items():
            net[(pid, k)] = centrality

    rows = []
    for interval in sorted(intervals, key=lambda i: i.player_id):
        team_id = roster_team.get(interval.player_id)
        if team_id is None:
            continue
        for k in range(n_slices):
            if interval.overlaps_slice(k):
                rows.append((interval.player_id, team_id, k))
    if not rows:
        return pd.DataFrame(columns=DATASET_COLUMNS)
    grid = pd.DataFrame(rows, columns=["playerId", "teamId", "slice_idx"])
    grid = grid.sort_values(["playerId", "slice_idx"], kind="stable").reset_index(drop=True)

    keys = list(zip(grid["playerId"], grid["slice_idx"]))
    grid["score_tecnico_fatia"] = [tech.get(key, 0.0) for key in keys]
    grid["score_rede_fatia"] = [net.get(key, 0.0) for key in keys]
    grid["playerank_fatia_raw"] = (
        (1.0 - config.alpha_net) * grid["score_tecnico_fatia"]
        + config.alpha_net * grid["score_rede_fatia"]
    )
    grid["Tempo_Partida"] = 5 * (grid["slice_idx"] + 1)
    grid["minutes_played"] = 5 * (grid.groupby("playerId").cumcount() + 1)
    grid["playerank_acumulativo_media_raw"] = grid.groupby("playerId")[
        "playerank_fatia_raw"
    ].transform(lambda s: cumulative_mean(s.to_numpy()))

    def role_of(pid: int) -> str:
        record = players.get(pid)
        if record is None:
            log.warning("player %s missing from players table; defaulting role to Midfielder", pid)
            return Role.MIDFIELDER.value
        return record.role.value

    grid["player_position"] = [role_of(pid) for pid in grid["playerId"]]
    for source, target in (
        ("playerank_fatia_raw", "playerank_fatia_percentil"),
        ("playerank_acumulativo_media_raw", "playerank_acumulativo_media_percentil"),
    ):
        grid[target] = grid.groupby("player_position")[source].transform(
            lambda s: role_percentile(s.to_numpy())
        )
    grid["momentum_rate"] = grid.groupby("playerId")[
        "playerank_acumulativo_media_percentil"
    ].transform(lambda s: momentum(s.to_numpy()))

    cards = _cumulative_by_slice(
        frame, frame["tags"].apply(lambda t: TAG_YELLOW_CARD in t), n_slices
    )
    assists = _cumulative_by_slice(
        frame, frame["tags"].apply(lambda t: TAG_ASSIST in t), n_slices
    )
    goal_mask = pd.Series(
        [
            _is_goal(name, sub_name, tags, config)
            for name, sub_name, tags in zip(
                frame["event_name"], frame["sub_event_name"], frame["tags"]
            )
        ],
        index=frame.index,
    )
    goals = _cumulative_by_slice(frame, goal_mask, n_slices)

    def running(table: dict[int, np.ndarray], pid: int, k: int) -> int:
        arr = table.get(pid)
        return int(arr[k]) if arr is not None else 0

    grid["cartao_amarelo"] = [
        1 if running(cards, pid, k) > 0 else 0 for pid, k in keys
    ]
    grid["goals_scored"] = [running(goals, pid, k) for pid, k in keys]
    grid["assists"] = [running(assists, pid, k) for pid, k in keys]

    ages = {
        pid: age_on(players[pid].birth_date if pid in players else None, match.date, pid)
        for pid in grid["playerId"].unique()
    }
    grid["player_age"] = grid["playerId"].map(ages)
    grid["matchId"] = match.match_id
    grid["position"] = grid["player_position"]
    return grid[DATASET_COLUMNS].reset_index(drop=True)


def build_dataset(
    tables: Tables,
    config: PipelineConfig = PipelineConfig(),
    match_ids: Sequence[int] | None = None,
) -> pd.DataFrame:
    """Run the pipeline for every requested match and stack the results."""
    wanted = sorted(match_ids) if match_ids else sorted(tables.matches)
    frames = []
    for match_id in wanted:
        if match_id not in tables.matches:
            raise ValidationError(f"match {match_id} not present in the matches tables")
        events = tables.events.get(match_id, [])
        if not events:
            log.warning("match %s has no events; skipping", match_id)
            continue
        frames.append(
            build_match_states(events, tables.matches[match_id], tables.players, config)
        )
    if not frames:
        return pd.DataFrame(columns=DATASET_COLUMNS)
    return pd.concat(frames, ignore_index=True)


def write_dataset_csv(frame: pd.DataFrame, path) -> None:
    frame.to_csv(path, index=False)


def read_dataset_csv(path) -> pd.DataFrame:
    return pd.read_csv(path)
