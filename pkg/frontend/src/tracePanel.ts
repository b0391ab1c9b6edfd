// Rule-activation trace panel: every rule in the base, zeros included, with
// firing strength, consequent band, and the linguistic label; rules that
// contributed area are highlighted.
import { RULE_LABELS, type PriorityResult, type Trace } from './types.js';

export function renderTraceNotFound(container: HTMLElement, message: string): void {
  container.replaceChildren();
  const div = document.createElement('div');
  div.className = 'trace-not-found';
  div.textContent = message;
  container.appendChild(div);
}

function decomposition(result: PriorityResult): string {
  const sign = result.modifier >= 0 ? '+' : '';
  return (
    `baseline ${result.baseline.toFixed(1)} ${sign}${result.modifier.toFixed(1)} modifier ` +
    `-> p_final ${result.p_final.toFixed(1)}` +
    (result.rank !== null ? ` (rank ${result.rank})` : '')
  );
}

export function renderTracePanel(
  container: HTMLElement,
  result: PriorityResult | null,
  heading: string,
): void {
  container.replaceChildren();
  if (!result || !result.trace) {
    renderTraceNotFound(container, 'No trace available for this selection.');
    return;
  }
  const trace: Trace = result.trace;

  const title = document.createElement('h3');
  title.textContent = heading;
  container.appendChild(title);

  const summary = document.createElement('div');
  summary.className = 'trace-summary';
  summary.textContent = decomposition(result);
  container.appendChild(summary);

  if (trace.overridden.length > 0) {
    const overridden = document.createElement('div');
    overridden.className = 'trace-overridden';
    overridden.textContent = `overridden inputs: ${trace.overridden.join(', ')}`;
    container.appendChild(overridden);
  }

  const inputs = document.createElement('div');
  inputs.className = 'trace-inputs';
  inputs.textContent = Object.entries(trace.inputs)
    .map(([name, value]) => `${name}=${Number(value.toFixed(3))}`)
    .join('  ');
  container.appendChild(inputs);

  const table = document.createElement('table');
  table.className = 'trace-table';
  const head = document.createElement('tr');
  for (const column of ['rule', '', 'strength', 'band']) {
    const th = document.createElement('th');
    th.textContent = column;
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const activation of trace.activations) {
    const row = document.createElement('tr');
    row.className = activation.contributed ? 'rule-row active' : 'rule-row';
    row.dataset.rule = activation.rule;

    const id = document.createElement('td');
    id.textContent = activation.rule;
    const label = document.createElement('td');
    label.className = 'rule-label';
    label.textContent = RULE_LABELS[activation.rule] ?? '';
    const strength = document.createElement('td');
    strength.className = 'rule-strength';
    strength.textContent = activation.strength.toFixed(3);
    const band = document.createElement('td');
    band.textContent = activation.consequent;

    row.append(id, label, strength, band);
    table.appendChild(row);
  }
  container.appendChild(table);
}
