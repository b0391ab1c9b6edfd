"""Substitution-priority auditing for soccer event streams.

Pipeline: raw event tables -> per-player 5-minute slice states -> fuzzy
substitution-priority scores with full rule-activation traces -> ranked
timelines, decision-latency reports, and what-if queries.
"""
from .ingest import (
    MatchRecord,
    OnFieldInterval,
    PlayerRecord,
    RawEvent,
    Role,
    RowError,
    SchemaError,
    Substitution,
    Tables,
    ValidationError,
    absolute_seconds,
    events_frame,
    load_tables,
    on_field_intervals,
    parse_event_log,
    parse_matches,
    parse_players,
    slice_index,
    slice_label,
)
from .metrics import (
    DATASET_COLUMNS,
    InvalidStateError,
    PassGraph,
    PipelineConfig,
    PlayerSliceState,
    WeightRule,
    build_dataset,
    build_match_states,
    cumulative_mean,
    momentum,
    network_score,
    raw_slice_score,
    role_percentile,
    technical_score,
)
from .system import SystemConfig, build_bundled_system, validate_system
from .priority import (
    LatencyEntry,
    MatchAudit,
    OverrideError,
    PostEntryTrack,
    PriorityConfig,
    PriorityResult,
    audit_match,
    audit_slice,
    baseline,
    decision_latency,
    final_priority,
    fuzzy_inputs,
    score_state,
    states_from_frame,
    what_if,
)
from .estimators import PriorityModel, SliceStateTransformer

__version__ = "0.1.0"

__all__ = [
    "DATASET_COLUMNS",
    "InvalidStateError",
    "LatencyEntry",
    "MatchAudit",
    "MatchRecord",
    "OnFieldInterval",
    "OverrideError",
    "PassGraph",
    "PipelineConfig",
    "PlayerRecord",
    "PlayerSliceState",
    "PostEntryTrack",
    "PriorityConfig",
    "PriorityModel",
    "PriorityResult",
    "RawEvent",
    "Role",
    "RowError",
    "SchemaError",
    "SliceStateTransformer",
    "Substitution",
    "SystemConfig",
    "Tables",
    "ValidationError",
    "WeightRule",
    "absolute_seconds",
    "audit_match",
    "audit_slice",
    "baseline",
    "build_bundled_system",
    "build_dataset",
    "build_match_states",
    "cumulative_mean",
    "decision_latency",
    "events_frame",
    "final_priority",
    "fuzzy_inputs",
    "load_tables",
    "momentum",
    "network_score",
    "on_field_intervals",
    "parse_event_log",
    "parse_matches",
    "parse_players",
    "raw_slice_score",
    "role_percentile",
    "score_state",
    "slice_index",
    "slice_label",
    "states_from_frame",
    "technical_score",
    "validate_system",
    "what_if",
]
