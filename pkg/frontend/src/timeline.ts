// SVG priority-timeline renderer: one curve per player over slice labels,
// a critical-threshold line, substitution markers at actual minutes, and a
// cursor line for the replay stepper. Pure DOM output, no canvas, so the
// whole render is assertable under jsdom.
import type { MatchTimeline } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export interface TimelineOptions {
  cursorLabel: number | null;
  selectedPlayer: number | null;
  onSelectPlayer?: (playerId: number) => void;
  width?: number;
  height?: number;
}

const TEAM_PALETTES: string[][] = [
  ['#4fc3f7', '#0288d1', '#81d4fa', '#01579b', '#29b6f6', '#0277bd', '#03a9f4',
   '#4dd0e1', '#00acc1', '#26c6da', '#00838f'],
  ['#ffb74d', '#f57c00', '#ffe082', '#e65100', '#ffa726', '#fb8c00', '#ff9800',
   '#ff8a65', '#d84315', '#ffab91', '#bf360c'],
];

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export function renderEmptyTimeline(container: HTMLElement, message: string): void {
  container.replaceChildren();
  const empty = document.createElement('div');
  empty.className = 'empty-state';
  empty.textContent = message;
  container.appendChild(empty);
}

export function renderTimelineError(container: HTMLElement, message: string): void {
  container.replaceChildren();
  const error = document.createElement('div');
  error.className = 'error-state';
  error.setAttribute('role', 'alert');
  error.textContent = message;
  container.appendChild(error);
}

export function renderTimeline(
  container: HTMLElement,
  timeline: MatchTimeline | null,
  options: TimelineOptions,
): void {
  if (!timeline || timeline.slices.length === 0) {
    renderEmptyTimeline(container, 'No audited slices for this match.');
    return;
  }
  container.replaceChildren();

  const width = options.width ?? 860;
  const height = options.height ?? 380;
  const margin = { top: 16, right: 130, bottom: 28, left: 40 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const labels = timeline.slices.map((slice) => slice.label);
  const maxMinute = Math.max(...labels);
  const x = (minute: number) => margin.left + (minute / maxMinute) * plotW;
  const y = (p: number) => margin.top + (1 - p / 100) * plotH;

  const svg = svgEl('svg', {
    viewBox: `0 0 ${width} ${height}`,
    width,
    height,
    class: 'timeline-svg',
  });

  // axes
  for (const tick of [0, 25, 50, 75, 100]) {
    svg.appendChild(
      svgEl('line', {
        x1: margin.left, y1: y(tick), x2: margin.left + plotW, y2: y(tick),
        class: 'grid-line',
      }),
    );
    const text = svgEl('text', { x: margin.left - 6, y: y(tick) + 4, class: 'axis-label' });
    text.setAttribute('text-anchor', 'end');
    text.textContent = String(tick);
    svg.appendChild(text);
  }
  for (const label of labels) {
    if (label % 15 === 0) {
      const text = svgEl('text', {
        x: x(label), y: margin.top + plotH + 18, class: 'axis-label',
      });
      text.setAttribute('text-anchor', 'middle');
      text.textContent = `${label}'`;
      svg.appendChild(text);
    }
  }

  // critical-threshold line
  svg.appendChild(
    svgEl('line', {
      x1: margin.left, y1: y(timeline.critical_threshold),
      x2: margin.left + plotW, y2: y(timeline.critical_threshold),
      class: 'threshold-line',
    }),
  );

  // per-player series
  const byPlayer = new Map<number, Array<{ label: number; p: number; baseline: number; modifier: number }>>();
  for (const slice of timeline.slices) {
    for (const entry of slice.entries) {
      const series = byPlayer.get(entry.player_id) ?? [];
      series.push({
        label: slice.label, p: entry.p_final,
        baseline: entry.baseline, modifier: entry.modifier,
      });
      byPlayer.set(entry.player_id, series);
    }
  }

  const teams = [...new Set(Object.values(timeline.players).map((p) => p.team_id))].sort();
  const teamIndex = new Map(teams.map((team, i) => [team, i]));
  const colorCounters = new Map<number, number>();

  const sortedPlayers = [...byPlayer.keys()].sort((a, b) => a - b);
  for (const playerId of sortedPlayers) {
    const info = timeline.players[String(playerId)];
    const palette = TEAM_PALETTES[(teamIndex.get(info?.team_id ?? teams[0] ?? 0) ?? 0) % 2] ?? [];
    const used = colorCounters.get(info?.team_id ?? 0) ?? 0;
    colorCounters.set(info?.team_id ?? 0, used + 1);
    const color = palette[used % palette.length] ?? '#999999';

    const series = byPlayer.get(playerId) ?? [];
    const points = series.map((s) => `${x(s.label)},${y(s.p)}`).join(' ');
    const selected = options.selectedPlayer === playerId;
    const curve = svgEl('polyline', {
      points,
      class: `player-curve${selected ? ' selected' : ''}`,
      fill: 'none',
      stroke: color,
      'stroke-width': selected ? 3 : 1.5,
      'data-player': playerId,
    });
    curve.addEventListener('click', () => options.onSelectPlayer?.(playerId));
    svg.appendChild(curve);

    for (const point of series) {
      const dot = svgEl('circle', {
        cx: x(point.label), cy: y(point.p), r: selected ? 3 : 2,
        fill: color,
        class: 'curve-point',
        'data-player': playerId,
        'data-label': point.label,
      });
      // hover decomposition: baseline + scaled modifier -> p_final
      const title = svgEl('title');
      title.textContent =
        `player ${playerId} @ ${point.label}'\n` +
        `baseline ${point.baseline.toFixed(1)}  modifier ${point.modifier >= 0 ? '+' : ''}` +
        `${point.modifier.toFixed(1)}  p_final ${point.p.toFixed(1)}`;
      dot.appendChild(title);
      dot.addEventListener('click', () => options.onSelectPlayer?.(playerId));
      svg.appendChild(dot);
    }
  }

  // substitution markers at the actual minute
  for (const sub of timeline.substitutions) {
    const marker = svgEl('line', {
      x1: x(sub.minute), y1: margin.top, x2: x(sub.minute), y2: margin.top + plotH,
      class: 'sub-marker',
      'data-minute': sub.minute,
    });
    const title = svgEl('title');
    title.textContent = `${sub.minute}': ${sub.player_out} off, ${sub.player_in} on`;
    marker.appendChild(title);
    svg.appendChild(marker);
  }

  // replay cursor
  if (options.cursorLabel !== null) {
    svg.appendChild(
      svgEl('line', {
        x1: x(options.cursorLabel), y1: margin.top,
        x2: x(options.cursorLabel), y2: margin.top + plotH,
        class: 'cursor-line',
      }),
    );
  }

  // legend
  let legendY = margin.top + 4;
  const legendX = margin.left + plotW + 12;
  colorCounters.clear();
  for (const playerId of sortedPlayers) {
    const info = timeline.players[String(playerId)];
    const palette = TEAM_PALETTES[(teamIndex.get(info?.team_id ?? teams[0] ?? 0) ?? 0) % 2] ?? [];
    const used = colorCounters.get(info?.team_id ?? 0) ?? 0;
    colorCounters.set(info?.team_id ?? 0, used + 1);
    const color = palette[used % palette.length] ?? '#999999';
    const swatch = svgEl('rect', {
      x: legendX, y: legendY - 8, width: 10, height: 3, fill: color,
      class: 'legend-swatch', 'data-player': playerId,
    });
    const label = svgEl('text', { x: legendX + 14, y: legendY - 4, class: 'legend-label' });
    label.textContent = `${playerId}${info ? ` (${info.role[0]})` : ''}`;
    label.addEventListener('click', () => options.onSelectPlayer?.(playerId));
    svg.appendChild(swatch);
    svg.appendChild(label);
    legendY += 13;
    if (legendY > margin.top + plotH) {
      break; // legend overflow: remaining players selectable via curves
    }
  }

  container.appendChild(svg);
}
