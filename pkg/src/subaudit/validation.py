"""Input-validation helpers shared by the estimator layer."""
from __future__ import annotations

from typing import Sequence

import pandas as pd

from .ingest import RawEvent


def require_columns(frame: pd.DataFrame, columns: Sequence[str], name: str = "frame") -> None:
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ValueError(f"{name} is missing required columns: {missing}")


def as_event_list(X) -> list[RawEvent]:
    """Accept a list of RawEvents or a normalized/raw event DataFrame."""
    if isinstance(X, pd.DataFrame):
        require_columns(
            X,
            ["match_id", "team_id", "player_id", "event_name", "sub_event_name",
             "tags", "event_sec", "match_period"],
            name="events",
        )
        return [
            RawEvent(
                match_id=int(row.match_id),
                team_id=int(row.team_id),
                player_id=int(row.player_id),
                event_name=str(row.event_name),
                sub_event_name=str(row.sub_event_name or ""),
                tags=tuple(row.tags),
                event_sec=float(row.event_sec),
                match_period=str(row.match_period),
            )
            for row in X.itertuples(index=False)
        ]
    events = list(X)
    if events and not isinstance(events[0], RawEvent):
        raise TypeError(f"expected RawEvent sequence or DataFrame, got {type(events[0])}")
    return events
