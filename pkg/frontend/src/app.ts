// Composition root: wires the store, API client, and panel renderers into
// the static page shell. All data flows one way: API -> store -> render.
import type { AuditApi } from './api.js';
import { ApiError } from './api.js';
import { Store } from './state.js';
import { renderTimeline, renderTimelineError } from './timeline.js';
import { renderTracePanel, renderTraceNotFound } from './tracePanel.js';
import { renderWhatIfPanel } from './whatifPanel.js';
import type { PriorityResult } from './types.js';

export interface AppElements {
  matchSelect: HTMLSelectElement;
  sliceSlider: HTMLInputElement;
  sliceLabel: HTMLElement;
  prevButton: HTMLButtonElement;
  nextButton: HTMLButtonElement;
  timeline: HTMLElement;
  trace: HTMLElement;
  whatif: HTMLElement;
  status: HTMLElement;
}

export class App {
  readonly store = new Store();
  private traceCache = new Map<string, PriorityResult[]>();

  constructor(private readonly api: AuditApi, private readonly el: AppElements) {
    this.el.prevButton.addEventListener('click', () => {
      this.store.stepCursor(-1);
    });
    this.el.nextButton.addEventListener('click', () => {
      this.store.stepCursor(+1);
    });
    this.el.sliceSlider.addEventListener('input', () => {
      this.store.update({ cursor: Number(this.el.sliceSlider.value) });
    });
    this.el.matchSelect.addEventListener('change', () => {
      void this.loadMatch(Number(this.el.matchSelect.value));
    });
    this.store.subscribe(() => this.render());
  }

  async start(): Promise<void> {
    try {
      const matches = await this.api.matches();
      this.store.update({ matches });
      if (matches.length > 0 && matches[0]) {
        this.el.matchSelect.replaceChildren(
          ...matches.map((m) => {
            const option = document.createElement('option');
            option.value = String(m.match_id);
            option.textContent = `match ${m.match_id}`;
            return option;
          }),
        );
        await this.loadMatch(matches[0].match_id);
      } else {
        this.store.update({ error: 'no audited matches on the server' });
      }
    } catch (error) {
      this.store.update({ error: describe(error) });
    }
  }

  async loadMatch(matchId: number): Promise<void> {
    this.store.update({ loading: true, error: null, whatIfResult: null });
    this.traceCache.clear();
    try {
      const timeline = await this.api.timeline(matchId);
      this.store.update({
        matchId,
        timeline,
        cursor: 0,
        selectedPlayer: null,
        pendingOverrides: {},
        whatIfResult: null,
        loading: false,
      });
    } catch (error) {
      this.store.update({ loading: false, error: describe(error), timeline: null, matchId });
    }
  }

  async selectPlayer(playerId: number): Promise<void> {
    this.store.update({ selectedPlayer: playerId, whatIfResult: null });
    const { matchId } = this.store.get();
    if (matchId === null) {
      return;
    }
    const key = `${matchId}:${playerId}`;
    if (!this.traceCache.has(key)) {
      try {
        const series = await this.api.playerSeries(matchId, playerId);
        this.traceCache.set(key, series.series);
      } catch (error) {
        this.traceCache.set(key, []);
        this.store.update({ error: describe(error) });
        return;
      }
    }
    this.render();
  }

  tracedResult(): PriorityResult | null {
    const state = this.store.get();
    if (state.matchId === null || state.selectedPlayer === null) {
      return null;
    }
    const label = this.store.currentSliceLabel();
    const series = this.traceCache.get(`${state.matchId}:${state.selectedPlayer}`) ?? [];
    return series.find((r) => r.slice_label === label) ?? null;
  }

  async runWhatIf(): Promise<void> {
    const state = this.store.get();
    const label = this.store.currentSliceLabel();
    if (state.matchId === null || state.selectedPlayer === null || label === null) {
      return;
    }
    try {
      const result = await this.api.whatIf(state.matchId, {
        slice: label,
        player: state.selectedPlayer,
        overrides: state.pendingOverrides,
      });
      this.store.update({ whatIfResult: result, error: null });
    } catch (error) {
      this.store.update({ error: describe(error) });
    }
  }

  render(): void {
    const state = this.store.get();
    const label = this.store.currentSliceLabel();

    this.el.status.textContent = state.loading
      ? 'loading...'
      : state.matchId !== null
        ? `match ${state.matchId}`
        : 'no match loaded';

    const slices = state.timeline?.slices.length ?? 0;
    this.el.sliceSlider.max = String(Math.max(0, slices - 1));
    this.el.sliceSlider.value = String(state.cursor);
    this.el.sliceLabel.textContent = label === null ? '-' : `${label}'`;

    if (state.error && !state.timeline) {
      renderTimelineError(this.el.timeline, state.error);
    } else {
      renderTimeline(this.el.timeline, state.timeline, {
        cursorLabel: label,
        selectedPlayer: state.selectedPlayer,
        onSelectPlayer: (playerId) => void this.selectPlayer(playerId),
      });
    }

    const traced = this.tracedResult();
    if (state.selectedPlayer === null) {
      renderTraceNotFound(this.el.trace, 'Click a curve to inspect its rule trace.');
    } else if (traced === null) {
      renderTraceNotFound(
        this.el.trace,
        `No audited slice for player ${state.selectedPlayer} at ${label ?? '-'}'.`,
      );
    } else {
      renderTracePanel(
        this.el.trace, traced, `player ${state.selectedPlayer} @ ${label}'`,
      );
    }

    renderWhatIfPanel(
      this.el.whatif,
      {
        playerId: state.selectedPlayer,
        sliceLabel: label,
        pending: state.pendingOverrides,
        result: state.whatIfResult,
        error: state.error,
      },
      {
        onStage: (field, value) => {
          this.store.setOverride(field, value);
        },
        onRun: () => void this.runWhatIf(),
        onClear: () => {
          this.store.clearOverrides();
        },
      },
    );
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return error.field ? `${error.message}` : error.message;
  }
  return error instanceof Error ? error.message : String(error);
}
