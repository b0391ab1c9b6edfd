// Typed client for the audit service. Everything the UI reads goes through
// this interface, so tests swap in a stub without touching any renderer.
import type {
  MatchSummary,
  MatchTimeline,
  PlayerSeries,
  WhatIfRequest,
  WhatIfResponse,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;
  readonly field: string | null;

  constructor(status: number, message: string, field: string | null = null) {
    super(message);
    this.status = status;
    this.field = field;
  }
}

export interface AuditApi {
  health(): Promise<{ status: string; matches: number }>;
  matches(): Promise<MatchSummary[]>;
  timeline(matchId: number): Promise<MatchTimeline>;
  playerSeries(matchId: number, playerId: number): Promise<PlayerSeries>;
  whatIf(matchId: number, request: WhatIfRequest): Promise<WhatIfResponse>;
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = `${response.status} ${response.statusText}`;
  let field: string | null = null;
  try {
    const body = await response.json();
    if (typeof body.detail === 'string') {
      detail = body.detail;
    }
    if (typeof body.field === 'string') {
      field = body.field;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(response.status, detail, field);
}

export class HttpAuditApi implements AuditApi {
  constructor(private readonly baseUrl: string) {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`);
    if (!response.ok) {
      throw await parseError(response);
    }
    return response.json() as Promise<T>;
  }

  health(): Promise<{ status: string; matches: number }> {
    return this.get('/health');
  }

  matches(): Promise<MatchSummary[]> {
    return this.get('/matches');
  }

  timeline(matchId: number): Promise<MatchTimeline> {
    return this.get(`/matches/${matchId}/timeline`);
  }

  playerSeries(matchId: number, playerId: number): Promise<PlayerSeries> {
    return this.get(`/matches/${matchId}/players/${playerId}`);
  }

  async whatIf(matchId: number, request: WhatIfRequest): Promise<WhatIfResponse> {
    const response = await fetch(`${this.baseUrl}/matches/${matchId}/whatif`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(request),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return response.json() as Promise<WhatIfResponse>;
  }
}
