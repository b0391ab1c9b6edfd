"""Scikit-learn style wrappers around the pipeline and the priority model.

Both classes follow the estimator contract (``get_params``/``set_params``,
``fit`` returning self, fitted attributes with a trailing underscore) so the
whole flow composes with sklearn pipelines:

    Pipeline([
        ("states", SliceStateTransformer(matches=..., players=...)),
        ("priority", PriorityModel()),
    ]).fit(events).predict(events)
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .ingest import MatchRecord, PlayerRecord, Role
from .metrics import DATASET_COLUMNS, PipelineConfig, WeightRule, build_match_states
from .priority import MatchAudit, PriorityConfig, audit_match, score_state, states_from_frame
from .system import SystemConfig, build_bundled_system, validate_system
from .validation import as_event_list, require_columns


class SliceStateTransformer(BaseEstimator, TransformerMixin):
    """Transform raw events into the per-player 5-minute state table.

    X is a sequence of RawEvents (or the equivalent DataFrame) possibly
    spanning several matches; `matches` and `players` supply the reference
    records the slice grid is built against.
    """

    def __init__(
        self,
        matches: Mapping[int, MatchRecord] | None = None,
        players: Mapping[int, PlayerRecord] | None = None,
        alpha_net: float = 0.2,
        weight_rules: Sequence[WeightRule] | None = None,
        teleport: float = 0.01,
        team_normalization: str = "abs_volume",
    ):
        self.matches = matches
        self.players = players
        self.alpha_net = alpha_net
        self.weight_rules = weight_rules
        self.teleport = teleport
        self.team_normalization = team_normalization

    def _config(self) -> PipelineConfig:
        kwargs = {
            "alpha_net": self.alpha_net,
            "teleport": self.teleport,
            "team_normalization": self.team_normalization,
        }
        if self.weight_rules is not None:
            kwargs["weight_rules"] = tuple(self.weight_rules)
        return PipelineConfig(**kwargs)

    def fit(self, X, y=None):
        if not self.matches:
            raise ValueError("SliceStateTransformer requires the matches mapping")
        if self.players is None:
            raise ValueError("SliceStateTransformer requires the players mapping")
        self.config_ = self._config()
        return self

    def transform(self, X) -> pd.DataFrame:
        check_is_fitted(self, "config_")
        events = as_event_list(X)
        by_match: dict[int, list] = {}
        for event in events:
            by_match.setdefault(event.match_id, []).append(event)
        frames = []
        for match_id in sorted(by_match):
            if match_id not in self.matches:
                raise ValueError(f"events reference unknown match {match_id}")
            frames.append(
                build_match_states(
                    by_match[match_id], self.matches[match_id], self.players, self.config_
                )
            )
        if not frames:
            return pd.DataFrame(columns=DATASET_COLUMNS)
        return pd.concat(frames, ignore_index=True)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(DATASET_COLUMNS, dtype=object)


class PriorityModel(BaseEstimator):
    """Fuzzy substitution-priority scorer over slice-state tables.

    ``predict`` returns the final priority per input row (NaN for
    goalkeeper rows, which are outside the audited population);
    ``audit`` produces complete per-match audits with traces.
    """

    def __init__(
        self,
        alpha: float = 0.25,
        critical_threshold: float = 90.0,
        output_resolution: int = 2001,
        system: SystemConfig | None = None,
    ):
        self.alpha = alpha
        self.critical_threshold = critical_threshold
        self.output_resolution = output_resolution
        self.system = system

    def fit(self, X=None, y=None):
        system = self.system or build_bundled_system(self.output_resolution)
        violations = validate_system(system)
        if violations:
            raise ValueError("fuzzy system failed validation: " + "; ".join(violations))
        self.system_ = system
        self.config_ = PriorityConfig(
            alpha=self.alpha, critical_threshold=self.critical_threshold
        )
        return self

    def _check_frame(self, X) -> pd.DataFrame:
        if not isinstance(X, pd.DataFrame):
            raise TypeError("PriorityModel expects the slice-state DataFrame")
        require_columns(X, [c for c in DATASET_COLUMNS if c != "position"], name="states")
        return X

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "system_")
        frame = self._check_frame(X)
        components = self.predict_components(frame)
        return components["p_final"].to_numpy()

    def predict_components(self, X) -> pd.DataFrame:
        """Baseline, modifier, and p_final per row (NaN rows for goalkeepers)."""
        check_is_fitted(self, "system_")
        frame = self._check_frame(X)
        rows = []
        for state in states_from_frame(frame):
            if state.player_position is Role.GOALKEEPER:
                rows.append((np.nan, np.nan, np.nan))
                continue
            result = score_state(state, self.system_, self.config_)
            rows.append((result.baseline, result.modifier, result.p_final))
        return pd.DataFrame(rows, columns=["baseline", "modifier", "p_final"], index=frame.index)

    def audit(
        self, X, matches: Mapping[int, MatchRecord] | None = None
    ) -> dict[int, MatchAudit]:
        """One MatchAudit per match id present in the state table."""
        check_is_fitted(self, "system_")
        frame = self._check_frame(X)
        audits: dict[int, MatchAudit] = {}
        for match_id, group in frame.groupby("matchId", sort=True):
            match = matches.get(match_id) if matches else None
            audits[int(match_id)] = audit_match(group, match, self.system_, self.config_)
        return audits
