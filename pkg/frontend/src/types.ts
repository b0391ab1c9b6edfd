// Payload types mirroring the audit service's committed JSON schemas.

export interface MatchSummary {
  match_id: number;
  teams: number[];
  date: string | null;
  n_slices: number;
}

export interface TimelineEntry {
  player_id: number;
  slice_label: number;
  baseline: number;
  modifier: number;
  p_final: number;
  rank: number | null;
}

export interface RuleActivation {
  rule: string;
  strength: number;
  consequent: string;
  contributed: boolean;
}

export interface Trace {
  inputs: Record<string, number>;
  overridden: string[];
  activations: RuleActivation[];
}

export interface PriorityResult extends TimelineEntry {
  trace?: Trace;
}

export interface PlayerInfo {
  team_id: number;
  role: string;
}

export interface Substitution {
  team_id: number;
  minute: number;
  player_out: number;
  player_in: number;
}

export interface LatencyEntry {
  player_id: number;
  first_critical_minute: number | null;
  substitution_minute: number | null;
  latency_minutes: number | null;
  unresolved_critical: boolean;
}

export interface PostEntryTrack {
  player_id: number;
  entry_minute: number;
  series: Array<{ label: number; p_final: number }>;
  high_impact: boolean;
}

export interface TimelineSlice {
  label: number;
  entries: TimelineEntry[];
}

export interface MatchTimeline {
  match_id: number;
  critical_threshold: number;
  alpha: number;
  players: Record<string, PlayerInfo>;
  slices: TimelineSlice[];
  substitutions: Substitution[];
  latency: LatencyEntry[];
  post_entry: PostEntryTrack[];
}

export interface PlayerSeries {
  match_id: number;
  player_id: number;
  player: PlayerInfo;
  series: PriorityResult[];
}

export type OverrideValue = number | string;

export interface WhatIfRequest {
  slice: number;
  player: number;
  overrides: Record<string, OverrideValue>;
}

export interface WhatIfResponse {
  match_id: number;
  result: PriorityResult & { trace: Trace };
  stored: TimelineEntry | null;
}

// Human-readable rule labels shown next to rule ids in the trace panel.
export const RULE_LABELS: Record<string, string> = {
  R01: 'Untouchable star',
  R02a: 'Critical fatigue',
  R02b: 'Early fatigue',
  R03: 'Defensive risk',
  R04: 'Rapid decline',
  R07: 'Positive momentum',
  R08: 'Ineffective forward',
  R09a: 'Striker under pressure (form)',
  R09b: 'Striker under pressure (fatigue)',
  R10a: 'Invisible playmaker',
  R10b: 'Invisible playmaker (strong)',
  R11a: 'Creator bonus',
  R11b: 'Creator bonus (strong)',
  R12: 'Veteran fatigue',
  R13: 'Young talent protection',
  R14a: 'Goal protection',
  R14b: 'Goal protection (strong)',
  R15: 'Neutral state',
};

// Client-side bounds for what-if overrides; mirrors whatif_request.schema.json.
export interface OverrideBound {
  min: number;
  max: number;
  step: number;
}

export const OVERRIDE_BOUNDS: Record<string, OverrideBound> = {
  P_cum: { min: 0, max: 1, step: 0.01 },
  Momentum: { min: -1, max: 1, step: 0.01 },
  Min_played: { min: 0, max: 100, step: 5 },
  Age: { min: 15, max: 45, step: 1 },
  Card_Y: { min: 0, max: 1, step: 1 },
  Goals: { min: 0, max: 10, step: 1 },
  Assists: { min: 0, max: 10, step: 1 },
};

export const POSITION_CHOICES = ['Defender', 'Midfielder', 'Forward'] as const;

export function validateOverride(field: string, value: OverrideValue): string | null {
  if (field === 'position') {
    return POSITION_CHOICES.includes(value as (typeof POSITION_CHOICES)[number])
      ? null
      : `position must be one of ${POSITION_CHOICES.join(', ')}`;
  }
  const bound = OVERRIDE_BOUNDS[field];
  if (!bound) {
    return `unknown override field ${field}`;
  }
  const num = Number(value);
  if (!Number.isFinite(num)) {
    return `${field} must be a number`;
  }
  if (num < bound.min || num > bound.max) {
    return `${field} must be within [${bound.min}, ${bound.max}]`;
  }
  return null;
}
