// Single observable view-state store. Fetched audit data is deep-frozen on
// the way in: replay controls move a cursor over immutable history, they
// never rewrite it.
import type { MatchTimeline, OverrideValue, WhatIfResponse } from './types.js';

export interface ViewState {
  matches: Array<{ match_id: number; n_slices: number }>;
  matchId: number | null;
  timeline: MatchTimeline | null;
  cursor: number; // index into timeline.slices
  selectedPlayer: number | null;
  pendingOverrides: Record<string, OverrideValue>;
  whatIfResult: WhatIfResponse | null;
  error: string | null;
  loading: boolean;
}

export const initialState: ViewState = {
  matches: [],
  matchId: null,
  timeline: null,
  cursor: 0,
  selectedPlayer: null,
  pendingOverrides: {},
  whatIfResult: null,
  error: null,
  loading: false,
};

export function deepFreeze<T>(value: T): T {
  if (value && typeof value === 'object' && !Object.isFrozen(value)) {
    Object.freeze(value);
    for (const key of Object.keys(value as object)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
  }
  return value;
}

function clampCursor(state: ViewState): ViewState {
  const max = state.timeline ? Math.max(0, state.timeline.slices.length - 1) : 0;
  const cursor = Math.min(Math.max(state.cursor, 0), max);
  return cursor === state.cursor ? state : { ...state, cursor };
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState;
  private listeners: Listener[] = [];

  constructor(state: ViewState = initialState) {
    this.state = state;
  }

  get(): ViewState {
    return this.state;
  }

  update(patch: Partial<ViewState>): ViewState {
    if (patch.timeline) {
      deepFreeze(patch.timeline);
    }
    this.state = clampCursor({ ...this.state, ...patch });
    for (const listener of this.listeners) {
      listener(this.state);
    }
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  stepCursor(delta: number): ViewState {
    return this.update({ cursor: this.state.cursor + delta });
  }

  currentSliceLabel(): number | null {
    const { timeline, cursor } = this.state;
    if (!timeline || timeline.slices.length === 0) {
      return null;
    }
    const slice = timeline.slices[Math.min(cursor, timeline.slices.length - 1)];
    return slice ? slice.label : null;
  }

  setOverride(field: string, value: OverrideValue | null): ViewState {
    const pending = { ...this.state.pendingOverrides };
    if (value === null) {
      delete pending[field];
    } else {
      pending[field] = value;
    }
    return this.update({ pendingOverrides: pending });
  }

  clearOverrides(): ViewState {
    return this.update({ pendingOverrides: {}, whatIfResult: null });
  }
}
