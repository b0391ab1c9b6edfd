// What-if probe panel: analysts stage hypothetical input overrides, run
// them against the service, and read the before/after decomposition plus
// the trace diff. Results stay on screen until cleared so probes chain.
import {
  OVERRIDE_BOUNDS,
  POSITION_CHOICES,
  RULE_LABELS,
  validateOverride,
  type OverrideValue,
  type TimelineEntry,
  type WhatIfResponse,
} from './types.js';

export interface WhatIfHandlers {
  onStage: (field: string, value: OverrideValue | null) => void;
  onRun: () => void;
  onClear: () => void;
}

export interface WhatIfViewModel {
  playerId: number | null;
  sliceLabel: number | null;
  pending: Record<string, OverrideValue>;
  result: WhatIfResponse | null;
  error: string | null;
}

export function stagedOverrideError(pending: Record<string, OverrideValue>): string | null {
  for (const [field, value] of Object.entries(pending)) {
    const problem = validateOverride(field, value);
    if (problem) {
      return problem;
    }
  }
  return null;
}

function numberInput(
  field: string,
  value: OverrideValue | undefined,
  onStage: WhatIfHandlers['onStage'],
): HTMLElement {
  const bound = OVERRIDE_BOUNDS[field];
  const wrap = document.createElement('label');
  wrap.className = 'override-field';
  wrap.textContent = field;
  const input = document.createElement('input');
  input.type = 'number';
  input.name = field;
  if (bound) {
    input.min = String(bound.min);
    input.max = String(bound.max);
    input.step = String(bound.step);
  }
  if (value !== undefined) {
    input.value = String(value);
  }
  input.addEventListener('change', () => {
    if (input.value === '') {
      onStage(field, null);
      return;
    }
    onStage(field, Number(input.value));
  });
  wrap.appendChild(input);
  return wrap;
}

function positionSelect(
  value: OverrideValue | undefined,
  onStage: WhatIfHandlers['onStage'],
): HTMLElement {
  const wrap = document.createElement('label');
  wrap.className = 'override-field';
  wrap.textContent = 'position';
  const select = document.createElement('select');
  select.name = 'position';
  const keep = document.createElement('option');
  keep.value = '';
  keep.textContent = '(keep)';
  select.appendChild(keep);
  for (const role of POSITION_CHOICES) {
    const option = document.createElement('option');
    option.value = role;
    option.textContent = role;
    if (value === role) {
      option.selected = true;
    }
    select.appendChild(option);
  }
  select.addEventListener('change', () => {
    onStage('position', select.value === '' ? null : select.value);
  });
  wrap.appendChild(select);
  return wrap;
}

function traceDiff(response: WhatIfResponse, container: HTMLElement): void {
  const stored = response.stored;
  const table = document.createElement('table');
  table.className = 'whatif-diff';
  const header = document.createElement('tr');
  for (const column of ['', 'before', 'after']) {
    const th = document.createElement('th');
    th.textContent = column;
    header.appendChild(th);
  }
  table.appendChild(header);
  const rows: Array<[string, string, string]> = [
    ['baseline', stored ? stored.baseline.toFixed(1) : '-', response.result.baseline.toFixed(1)],
    ['modifier', stored ? stored.modifier.toFixed(1) : '-', response.result.modifier.toFixed(1)],
    ['p_final', stored ? stored.p_final.toFixed(1) : '-', response.result.p_final.toFixed(1)],
    ['rank', stored && stored.rank !== null ? String(stored.rank) : '-',
     response.result.rank !== null ? String(response.result.rank) : '-'],
  ];
  for (const [name, before, after] of rows) {
    const tr = document.createElement('tr');
    tr.dataset.metric = name;
    for (const text of [name, before, after]) {
      const td = document.createElement('td');
      td.textContent = text;
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  container.appendChild(table);

  const fired = response.result.trace.activations.filter((a) => a.contributed);
  const firedList = document.createElement('div');
  firedList.className = 'whatif-fired';
  firedList.textContent = fired.length
    ? 'firing: ' + fired
        .map((a) => `${a.rule} ${RULE_LABELS[a.rule] ?? ''} (${a.strength.toFixed(2)})`)
        .join('; ')
    : 'no rules firing';
  container.appendChild(firedList);
}

export function renderWhatIfPanel(
  container: HTMLElement,
  model: WhatIfViewModel,
  handlers: WhatIfHandlers,
): void {
  container.replaceChildren();
  const title = document.createElement('h3');
  title.textContent = 'what-if probe';
  container.appendChild(title);

  if (model.playerId === null || model.sliceLabel === null) {
    const hint = document.createElement('div');
    hint.className = 'whatif-hint';
    hint.textContent = 'Select a player and slice to probe.';
    container.appendChild(hint);
    return;
  }

  const target = document.createElement('div');
  target.className = 'whatif-target';
  target.textContent = `player ${model.playerId} @ ${model.sliceLabel}'`;
  container.appendChild(target);

  const form = document.createElement('form');
  form.className = 'whatif-form';
  form.addEventListener('submit', (event) => event.preventDefault());
  for (const field of Object.keys(OVERRIDE_BOUNDS)) {
    form.appendChild(numberInput(field, model.pending[field], handlers.onStage));
  }
  form.appendChild(positionSelect(model.pending['position'], handlers.onStage));
  container.appendChild(form);

  const staged = Object.keys(model.pending);
  const stagedInfo = document.createElement('div');
  stagedInfo.className = 'whatif-staged';
  stagedInfo.textContent = staged.length
    ? `staged: ${staged.join(', ')}`
    : 'no overrides staged (runs the stored inputs)';
  container.appendChild(stagedInfo);

  const clientError = stagedOverrideError(model.pending);
  const problem = clientError ?? model.error;
  if (problem) {
    const error = document.createElement('div');
    error.className = 'field-error';
    error.setAttribute('role', 'alert');
    error.textContent = problem;
    container.appendChild(error);
  }

  const run = document.createElement('button');
  run.className = 'whatif-run';
  run.type = 'button';
  run.textContent = 'run probe';
  run.disabled = clientError !== null; // out-of-range values never reach the API
  run.addEventListener('click', () => handlers.onRun());
  container.appendChild(run);

  const clear = document.createElement('button');
  clear.className = 'whatif-clear';
  clear.type = 'button';
  clear.textContent = 'clear';
  clear.addEventListener('click', () => handlers.onClear());
  container.appendChild(clear);

  if (model.result) {
    const resultBox = document.createElement('div');
    resultBox.className = 'whatif-result';
    traceDiff(model.result, resultBox);
    container.appendChild(resultBox);
  }
}
