"""Parsing of raw match/event/player tables and time normalization.

Input files follow the public soccer event dataset layout: ``events_*.csv``
(one action per row), ``matches_*.csv`` (lineups and substitutions inside a
``teamsData`` blob), ``players.csv``, and ``tags2name.csv``. Parsing is
tolerant of both JSON and Python-repr encodings of the nested cells, since
both occur in the wild.

All derived times are absolute seconds from kickoff: second-half events are
offset by a nominal 2700 s, extra time by 5400/6300 s. Penalty shootouts
carry no slice semantics and are rejected/dropped.
"""
from __future__ import annotations

import ast
import csv
import glob
import json
import logging
import os
import re
from dataclasses import dataclass
from datetime import date, datetime
from enum import Enum
from typing import IO, Iterable, Mapping, Sequence

import pandas as pd

log = logging.getLogger(__name__)

SLICE_SECONDS = 300
NOMINAL_REGULATION_END = 5400.0
NOMINAL_EXTRA_TIME_END = 7200.0

# Nominal period offsets in absolute seconds. Stoppage time compresses into
# the last slice of its period; see the module docs for the trade-off.
PERIOD_OFFSETS = {"1H": 0.0, "2H": 2700.0, "E1": 5400.0, "E2": 6300.0}
SHOOTOUT_PERIOD = "P"
VALID_PERIODS = frozenset(PERIOD_OFFSETS) | {SHOOTOUT_PERIOD}

TAG_ASSIST = 302
TAG_YELLOW_CARD = 1702
TAG_GOAL = 101
TAG_ACCURATE = 1801
TAG_INACCURATE = 1802


class SchemaError(ValueError):
    """Input table is missing required columns."""


class RowError(ValueError):
    """One row failed to parse; carries the 1-based file row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class ValidationError(ValueError):
    """Parsed data violates a cross-record invariant."""


class Role(str, Enum):
    GOALKEEPER = "Goalkeeper"
    DEFENDER = "Defender"
    MIDFIELDER = "Midfielder"
    FORWARD = "Forward"


_ROLE_ALIASES = {
    "goalkeeper": Role.GOALKEEPER, "gk": Role.GOALKEEPER,
    "defender": Role.DEFENDER, "df": Role.DEFENDER, "def": Role.DEFENDER,
    "midfielder": Role.MIDFIELDER, "mf": Role.MIDFIELDER, "mid": Role.MIDFIELDER,
    "forward": Role.FORWARD, "fw": Role.FORWARD, "fwd": Role.FORWARD,
}


@dataclass(frozen=True)
class RawEvent:
    """One on-pitch action."""

    match_id: int
    team_id: int
    player_id: int
    event_name: str
    sub_event_name: str
    tags: tuple[int, ...]
    event_sec: float
    match_period: str

    def __post_init__(self) -> None:
        if self.event_sec < 0:
            raise ValueError(f"event_sec must be >= 0, got {self.event_sec}")
        if self.match_period not in VALID_PERIODS:
            raise ValueError(f"unknown match period {self.match_period!r}")
        if any(t < 0 for t in self.tags):
            raise ValueError(f"tag codes must be non-negative, got {self.tags}")


@dataclass(frozen=True)
class Substitution:
    team_id: int
    minute: int
    player_out: int
    player_in: int


@dataclass(frozen=True)
class MatchRecord:
    match_id: int
    date: date
    teams: tuple[int, int]
    lineups: Mapping[int, tuple[int, ...]]
    substitutions: tuple[Substitution, ...]

    def __post_init__(self) -> None:
        on_field: set[int] = {p for lineup in self.lineups.values() for p in lineup}
        for sub in sorted(self.substitutions, key=lambda s: s.minute):
            if not 0 <= sub.minute <= 130:
                raise ValidationError(
                    f"match {self.match_id}: substitution minute {sub.minute} outside [0, 130]"
                )
            if sub.player_out not in on_field:
                raise ValidationError(
                    f"match {self.match_id}: substituted player {sub.player_out} "
                    "is neither a starter nor a prior substitute"
                )
            on_field.add(sub.player_in)


@dataclass(frozen=True)
class PlayerRecord:
    player_id: int
    birth_date: date | None
    role: Role


@dataclass(frozen=True)
class OnFieldInterval:
    """Contiguous presence of one player in one match, in absolute seconds."""

    player_id: int
    match_id: int
    start_sec: float
    end_sec: float

    def __post_init__(self) -> None:
        if not self.start_sec < self.end_sec:
            raise ValidationError(
                f"player {self.player_id}: empty on-field interval "
                f"[{self.start_sec}, {self.end_sec}]"
            )

    def overlaps_slice(self, index: int) -> bool:
        lo, hi = index * SLICE_SECONDS, (index + 1) * SLICE_SECONDS
        return self.start_sec < hi and self.end_sec > lo


def parse_tags(cell: str | None) -> tuple[int, ...]:
    """Decode a tag cell: JSON/Python lists of {'id': n} dicts, bare ints,
    or simple ';'/','-separated code lists."""
    if cell is None:
        return ()
    text = str(cell).strip()
    if not text or text in ("[]", "nan"):
        return ()
    if text.startswith("["):
        try:
            items = ast.literal_eval(text)
        except (ValueError, SyntaxError) as exc:
            raise ValueError(f"unparseable tag list {text!r}") from exc
        codes = []
        for item in items:
            codes.append(int(item["id"]) if isinstance(item, dict) else int(item))
        return tuple(codes)
    return tuple(int(part) for part in re.split(r"[;,]", text) if part.strip())


_EVENT_COLUMNS = {
    "matchId": "match_id",
    "teamId": "team_id",
    "playerId": "player_id",
    "eventName": "event_name",
    "subEventName": "sub_event_name",
    "tags": "tags",
    "eventSec": "event_sec",
    "matchPeriod": "match_period",
}


def parse_event_log(
    source: IO[str] | str | os.PathLike,
    tag_names: Mapping[int, str] | None = None,
) -> list[RawEvent]:
    """Parse an events table into RawEvents, preserving row order.

    `source` is an open text stream or a path. Unknown columns are ignored;
    a missing required column raises SchemaError, and a malformed value
    raises RowError with the offending file row number. `tag_names` is
    accepted for interface symmetry (unknown tag codes are legal and kept).
    """
    if hasattr(source, "read"):
        return _parse_event_stream(source, tag_names)
    with open(source, newline="", encoding="utf-8") as handle:
        return _parse_event_stream(handle, tag_names)


def _parse_event_stream(stream: IO[str], tag_names) -> list[RawEvent]:
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        raise SchemaError("event table has no header row")
    missing = [col for col in _EVENT_COLUMNS if col not in reader.fieldnames]
    if missing:
        raise SchemaError(f"event table missing required columns: {', '.join(missing)}")
    events: list[RawEvent] = []
    for record in reader:
        try:
            events.append(
                RawEvent(
                    match_id=int(record["matchId"]),
                    team_id=int(record["teamId"]),
                    player_id=int(record["playerId"]),
                    event_name=record["eventName"].strip(),
                    sub_event_name=(record["subEventName"] or "").strip(),
                    tags=parse_tags(record["tags"]),
                    event_sec=float(record["eventSec"]),
                    match_period=record["matchPeriod"].strip(),
                )
            )
        except (ValueError, TypeError, KeyError) as exc:
            raise RowError(reader.line_num, str(exc)) from exc
    return events


def _parse_nested(cell: str):
    """Parse a teamsData/role cell that may be JSON or Python repr."""
    text = cell.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return ast.literal_eval(text)


def _parse_date(text: str) -> date:
    text = text.strip()
    for fmt in ("%Y-%m-%d", "%Y-%m-%d %H:%M:%S", "%B %d, %Y at %I:%M:%S %p %Z"):
        try:
            return datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    # Last resort: leading ISO date inside a longer string.
    match = re.match(r"(\d{4}-\d{2}-\d{2})", text)
    if match:
        return datetime.strptime(match.group(1), "%Y-%m-%d").date()
    raise ValueError(f"unparseable date {text!r}")


def parse_matches(source: IO[str] | str | os.PathLike) -> list[MatchRecord]:
    """Parse a matches table (lineups/substitutions from the teamsData blob)."""
    if not hasattr(source, "read"):
        with open(source, newline="", encoding="utf-8") as handle:
            return parse_matches(handle)
    reader = csv.DictReader(source)
    if reader.fieldnames is None or "wyId" not in reader.fieldnames:
        raise SchemaError("matches table must carry wyId and teamsData columns")
    records = []
    for record in reader:
        try:
            teams_data = _parse_nested(record["teamsData"])
            lineups: dict[int, tuple[int, ...]] = {}
            subs: list[Substitution] = []
            for team_key, team_blob in teams_data.items():
                team_id = int(team_key)
                formation = team_blob.get("formation") or {}
                lineup = formation.get("lineup") or []
                lineups[team_id] = tuple(int(p["playerId"]) for p in lineup)
                raw_subs = formation.get("substitutions")
                if isinstance(raw_subs, list):
                    for sub in raw_subs:
                        subs.append(
                            Substitution(
                                team_id=team_id,
                                minute=int(sub["minute"]),
                                player_out=int(sub["playerOut"]),
                                player_in=int(sub["playerIn"]),
                            )
                        )
            team_ids = tuple(sorted(lineups))
            if len(team_ids) != 2:
                raise ValueError(f"expected 2 teams, found {len(team_ids)}")
            records.append(
                MatchRecord(
                    match_id=int(record["wyId"]),
                    date=_parse_date(record.get("dateutc") or record.get("date") or ""),
                    teams=team_ids,  # type: ignore[arg-type]
                    lineups=lineups,
                    substitutions=tuple(sorted(subs, key=lambda s: (s.minute, s.player_out))),
                )
            )
        except ValidationError:
            raise
        except (ValueError, TypeError, KeyError, SyntaxError) as exc:
            raise RowError(reader.line_num, str(exc)) from exc
    return records


def parse_players(source: IO[str] | str | os.PathLike) -> dict[int, PlayerRecord]:
    """Parse the players table into a player_id -> PlayerRecord map."""
    if not hasattr(source, "read"):
        with open(source, newline="", encoding="utf-8") as handle:
            return parse_players(handle)
    reader = csv.DictReader(source)
    if reader.fieldnames is None or "wyId" not in reader.fieldnames:
        raise SchemaError("players table must carry wyId, birthDate, role columns")
    players: dict[int, PlayerRecord] = {}
    for record in reader:
        try:
            role_cell = record.get("role", "")
            if role_cell and role_cell.strip().startswith("{"):
                role_name = str(_parse_nested(role_cell).get("name", ""))
            else:
                role_name = role_cell
            role = _ROLE_ALIASES.get(role_name.strip().lower())
            if role is None:
                raise ValueError(f"unknown role {role_name!r}")
            birth_cell = (record.get("birthDate") or "").strip()
            birth = _parse_date(birth_cell) if birth_cell else None
            player_id = int(record["wyId"])
            players[player_id] = PlayerRecord(player_id=player_id, birth_date=birth, role=role)
        except (ValueError, TypeError, KeyError, SyntaxError) as exc:
            raise RowError(reader.line_num, str(exc)) from exc
    return players


def parse_tag_names(source: IO[str] | str | os.PathLike) -> dict[int, str]:
    """Parse tags2name.csv into a tag code -> label map."""
    if not hasattr(source, "read"):
        with open(source, newline="", encoding="utf-8") as handle:
            return parse_tag_names(handle)
    reader = csv.DictReader(source)
    if reader.fieldnames is None:
        raise SchemaError("tag table has no header row")
    id_col = next((c for c in ("Tag", "tagId", "tag") if c in reader.fieldnames), None)
    label_col = next((c for c in ("Label", "label", "Description") if c in reader.fieldnames), None)
    if id_col is None or label_col is None:
        raise SchemaError("tag table needs a tag id column and a label column")
    return {int(r[id_col]): r[label_col] for r in reader if r[id_col]}


def absolute_seconds(event: RawEvent) -> float:
    """Seconds from kickoff: period offset plus the within-period clock."""
    if event.match_period == SHOOTOUT_PERIOD:
        raise ValueError("penalty-shootout events carry no slice semantics")
    return PERIOD_OFFSETS[event.match_period] + event.event_sec


def slice_index(abs_sec: float) -> int:
    """Index of the half-open 300 s slice [300k, 300(k+1)) containing abs_sec."""
    if abs_sec < 0:
        raise ValueError(f"absolute seconds must be >= 0, got {abs_sec}")
    return int(abs_sec // SLICE_SECONDS)


def slice_label(index: int) -> int:
    """Reporting label of a slice: the minute its window ends (5, 10, ...)."""
    return 5 * (index + 1)


def match_end_seconds(events: Iterable[RawEvent]) -> float:
    """Nominal match end: at least 90' (120' with extra time), or the last event."""
    end = NOMINAL_REGULATION_END
    for event in events:
        if event.match_period == SHOOTOUT_PERIOD:
            continue
        if event.match_period in ("E1", "E2"):
            end = max(end, NOMINAL_EXTRA_TIME_END)
        end = max(end, absolute_seconds(event))
    return end


def on_field_intervals(
    match: MatchRecord,
    events: Sequence[RawEvent],
    players: Mapping[int, PlayerRecord] | None = None,
) -> list[OnFieldInterval]:
    """Presence interval per player: starters from 0, substitutes from entry.

    Goalkeepers (when `players` provides roles) always get the full match;
    their interval is never shortened by substitution records.
    """
    end = match_end_seconds(events)
    entries: dict[int, float] = {p: 0.0 for lineup in match.lineups.values() for p in lineup}
    exits: dict[int, float] = {}
    for sub in match.substitutions:
        sub_sec = sub.minute * 60.0
        if sub.player_out not in entries:
            raise ValidationError(
                f"match {match.match_id}: substitution references unknown player {sub.player_out}"
            )
        exits[sub.player_out] = sub_sec
        entries[sub.player_in] = sub_sec
    intervals = []
    for player_id in sorted(entries):
        start = entries[player_id]
        stop = exits.get(player_id, end)
        if players is not None:
            record = players.get(player_id)
            if record is not None and record.role is Role.GOALKEEPER:
                start, stop = 0.0, end
        intervals.append(
            OnFieldInterval(player_id=player_id, match_id=match.match_id, start_sec=start, end_sec=stop)
        )
    return intervals


def events_frame(events: Sequence[RawEvent]) -> pd.DataFrame:
    """Normalized event table with absolute seconds and slice indexing.

    Shootout events are dropped entirely. Row order is preserved within
    equal timestamps (stable sort on absolute seconds).
    """
    rows = []
    for order, event in enumerate(events):
        if event.match_period == SHOOTOUT_PERIOD:
            continue
        abs_sec = absolute_seconds(event)
        rows.append(
            {
                "match_id": event.match_id,
                "team_id": event.team_id,
                "player_id": event.player_id,
                "event_name": event.event_name,
                "sub_event_name": event.sub_event_name,
                "tags": event.tags,
                "event_sec": event.event_sec,
                "match_period": event.match_period,
                "abs_sec": abs_sec,
                "slice_idx": slice_index(abs_sec),
                "slice_label": slice_label(slice_index(abs_sec)),
                "_order": order,
            }
        )
    frame = pd.DataFrame(
        rows,
        columns=[
            "match_id", "team_id", "player_id", "event_name", "sub_event_name",
            "tags", "event_sec", "match_period", "abs_sec", "slice_idx",
            "slice_label", "_order",
        ],
    )
    if len(frame):
        frame = frame.sort_values(["abs_sec", "_order"], kind="stable").reset_index(drop=True)
    return frame.drop(columns="_order")


def dump_events_jsonl(frame: pd.DataFrame, path: str | os.PathLike) -> int:
    """Write the normalized event stream as JSON lines; returns the row count."""
    with open(path, "w", encoding="utf-8") as handle:
        for record in frame.to_dict(orient="records"):
            record["tags"] = list(record["tags"])
            handle.write(json.dumps(record) + "\n")
    return len(frame)


@dataclass
class Tables:
    """All parsed inputs for a run, indexed for per-match work."""

    events: dict[int, list[RawEvent]]
    matches: dict[int, MatchRecord]
    players: dict[int, PlayerRecord]
    tag_names: dict[int, str]


def load_tables(input_dir: str | os.PathLike, match_ids: Sequence[int] | None = None) -> Tables:
    """Load every events_*/matches_* file plus players.csv and tags2name.csv."""
    input_dir = os.fspath(input_dir)
    event_files = sorted(glob.glob(os.path.join(input_dir, "events_*.csv")))
    match_files = sorted(glob.glob(os.path.join(input_dir, "matches_*.csv")))
    players_file = os.path.join(input_dir, "players.csv")
    if not event_files or not match_files:
        raise SchemaError(f"no events_*.csv / matches_*.csv found under {input_dir}")
    if not os.path.exists(players_file):
        raise SchemaError(f"players.csv not found under {input_dir}")

    wanted = set(match_ids) if match_ids else None
    matches: dict[int, MatchRecord] = {}
    for path in match_files:
        for record in parse_matches(path):
            if wanted is None or record.match_id in wanted:
                matches[record.match_id] = record

    events: dict[int, list[RawEvent]] = {}
    for path in event_files:
        for event in parse_event_log(path):
            if wanted is None or event.match_id in wanted:
                events.setdefault(event.match_id, []).append(event)

    players = parse_players(players_file)
    tags_file = os.path.join(input_dir, "tags2name.csv")
    tag_names = parse_tag_names(tags_file) if os.path.exists(tags_file) else {}
    missing = sorted(set(matches) - set(events))
    if missing:
        log.warning("no events found for matches: %s", missing)
    return Tables(events=events, matches=matches, players=players, tag_names=tag_names)
