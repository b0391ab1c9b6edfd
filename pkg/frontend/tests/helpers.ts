// Shared fixtures: a small three-player timeline and a stub API client that
// honors the service contract (override validation, 422 with field names,
// the defender-card direction) without a network.
import { ApiError, type AuditApi } from '../src/api.js';
import type { AppElements } from '../src/app.js';
import {
  RULE_LABELS,
  validateOverride,
  type MatchSummary,
  type MatchTimeline,
  type PlayerSeries,
  type PriorityResult,
  type RuleActivation,
  type TimelineEntry,
  type Trace,
  type WhatIfRequest,
  type WhatIfResponse,
} from '../src/types.js';

export const MATCH_ID = 7001;
export const RULE_IDS = Object.keys(RULE_LABELS);

export function neutralTrace(overridden: string[] = [], firing: Record<string, number> = {}):
  Trace {
  const activations: RuleActivation[] = RULE_IDS.map((rule) => {
    const strength = firing[rule] ?? (rule === 'R15' ? 1.0 : 0.0);
    return {
      rule,
      strength,
      consequent: rule === 'R15' ? 'Zero' : 'MP',
      contributed: strength > 0,
    };
  });
  return {
    inputs: {
      P_cum: 0.5, Momentum: 0, Min_played: 50, Age: 27, Card_Y: 0,
      Goals: 0, Assists: 0, is_Defender: 0, is_Midfielder: 0, is_Forward: 0,
    },
    overridden,
    activations,
  };
}

function entry(playerId: number, label: number, pFinal: number, rank: number): TimelineEntry {
  return {
    player_id: playerId,
    slice_label: label,
    baseline: pFinal,
    modifier: 0,
    p_final: pFinal,
    rank,
  };
}

export function fixtureTimeline(): MatchTimeline {
  const labels = [5, 10, 15];
  const base: Record<number, number[]> = {
    1: [60, 65, 70],
    2: [80, 75, 85],
    3: [40, 35, 30],
  };
  return {
    match_id: MATCH_ID,
    critical_threshold: 90,
    alpha: 0.25,
    players: {
      '1': { team_id: 100, role: 'Defender' },
      '2': { team_id: 100, role: 'Forward' },
      '3': { team_id: 200, role: 'Midfielder' },
    },
    slices: labels.map((label, i) => {
      const values: Array<[number, number]> = [1, 2, 3].map(
        (pid) => [pid, base[pid]![i]!] as [number, number],
      );
      values.sort((a, b) => b[1] - a[1]);
      return {
        label,
        entries: values.map(([pid, p], rank) => entry(pid, label, p, rank + 1)),
      };
    }),
    substitutions: [{ team_id: 200, minute: 12, player_out: 3, player_in: 9 }],
    latency: [
      {
        player_id: 3, first_critical_minute: null, substitution_minute: 12,
        latency_minutes: null, unresolved_critical: false,
      },
    ],
    post_entry: [],
  };
}

export class StubApi implements AuditApi {
  timelineData = fixtureTimeline();
  whatIfCalls: WhatIfRequest[] = [];
  failTimeline = false;

  async health() {
    return { status: 'ok', matches: 1 };
  }

  async matches(): Promise<MatchSummary[]> {
    return [{ match_id: MATCH_ID, teams: [100, 200], date: null, n_slices: 3 }];
  }

  async timeline(matchId: number): Promise<MatchTimeline> {
    if (this.failTimeline) {
      throw new ApiError(503, 'service unavailable');
    }
    if (matchId !== MATCH_ID) {
      throw new ApiError(404, `unknown match ${matchId}`);
    }
    return structuredClone(this.timelineData);
  }

  async playerSeries(matchId: number, playerId: number): Promise<PlayerSeries> {
    const timeline = await this.timeline(matchId);
    const info = timeline.players[String(playerId)];
    if (!info) {
      throw new ApiError(404, `no audited slices for player ${playerId}`);
    }
    const series: PriorityResult[] = [];
    for (const slice of timeline.slices) {
      const found = slice.entries.find((e) => e.player_id === playerId);
      if (found) {
        series.push({ ...found, trace: neutralTrace() });
      }
    }
    return { match_id: matchId, player_id: playerId, player: info, series };
  }

  async whatIf(matchId: number, request: WhatIfRequest): Promise<WhatIfResponse> {
    this.whatIfCalls.push(request);
    const timeline = await this.timeline(matchId);
    for (const [field, value] of Object.entries(request.overrides)) {
      const problem = validateOverride(field, value);
      if (problem) {
        throw new ApiError(422, problem, field);
      }
    }
    const slice = timeline.slices.find((s) => s.label === request.slice);
    const stored = slice?.entries.find((e) => e.player_id === request.player);
    if (!slice || !stored) {
      throw new ApiError(404, `no audited state for player ${request.player}`);
    }
    const role = timeline.players[String(request.player)]?.role;
    const cardStaged = Number(request.overrides['Card_Y'] ?? 0) >= 0.5;
    const firing: Record<string, number> = {};
    let modifier = stored.modifier;
    if (cardStaged && role === 'Defender') {
      firing['R03'] = 1.0; // defensive-risk rule dominates
      modifier += 35;
    }
    const pCum = request.overrides['P_cum'];
    const baseline = pCum !== undefined ? 100 * (1 - Number(pCum)) : stored.baseline;
    const pFinal = Math.min(100, Math.max(0, baseline + modifier * timeline.alpha));
    return {
      match_id: matchId,
      result: {
        player_id: request.player,
        slice_label: request.slice,
        baseline,
        modifier,
        p_final: pFinal,
        rank: stored.rank,
        trace: neutralTrace(Object.keys(request.overrides), firing),
      },
      stored,
    };
  }
}

export function buildShell(): AppElements {
  document.body.innerHTML = `
    <select id="match-select"></select>
    <button id="slice-prev"></button>
    <input id="slice-slider" type="range" min="0" max="0" value="0">
    <button id="slice-next"></button>
    <span id="slice-label"></span>
    <span id="status"></span>
    <div id="timeline"></div>
    <div id="trace-panel"></div>
    <div id="whatif-panel"></div>
  `;
  const get = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;
  return {
    matchSelect: get<HTMLSelectElement>('match-select'),
    sliceSlider: get<HTMLInputElement>('slice-slider'),
    sliceLabel: get('slice-label'),
    prevButton: get<HTMLButtonElement>('slice-prev'),
    nextButton: get<HTMLButtonElement>('slice-next'),
    timeline: get('timeline'),
    trace: get('trace-panel'),
    whatif: get('whatif-panel'),
    status: get('status'),
  };
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
