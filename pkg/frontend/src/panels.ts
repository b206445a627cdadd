/** Boxplot-panel layout and SVG rendering for plot-data documents.
 *
 * Every number drawn comes straight from a document field; the only
 * computation here is geometry.  The observed statistic is a line over
 * per-bin boxplots; bins where it exits the simulated [min, max] whiskers
 * are highlighted.
 */

import { PlotBin, PlotDataDoc, PlotPanel, checkSchema } from './types.js';

export interface BoxGeometry {
  label: string;
  x: number; // bin center, px
  whiskerLow: number; // y px of the simulated minimum
  whiskerHigh: number;
  boxLow: number; // y px of q1
  boxHigh: number; // y px of q3
  median: number;
  observed: number;
  highlighted: boolean;
}

export interface PanelLayout {
  name: string;
  title: string;
  width: number;
  height: number;
  boxes: BoxGeometry[];
  observedPath: { x: number; y: number }[];
  yTicks: { y: number; value: number }[];
}

export const PANEL_TITLES: Record<string, string> = {
  degree: 'degree',
  esp: 'edge-wise shared partners',
  geodesic: 'minimum geodesic distance',
  triad_census: 'triad census',
};

/** Observed value outside the simulated whiskers (logit scale). */
export function isHighlighted(bin: PlotBin): boolean {
  return bin.observed_logit < bin.min || bin.observed_logit > bin.max;
}

export function highlightedBins(panel: PlotPanel): string[] {
  return panel.bins.filter(isHighlighted).map((b) => b.label);
}

const MARGIN = { top: 24, right: 12, bottom: 28, left: 46 };

export function layoutPanel(
  panel: PlotPanel,
  width = 320,
  height = 240,
): PanelLayout {
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;
  const values: number[] = [];
  for (const b of panel.bins) {
    values.push(b.min, b.max, b.observed_logit);
  }
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (!(hi > lo)) {
    lo -= 1;
    hi += 1;
  }
  const pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const yOf = (v: number) => MARGIN.top + ((hi - v) / (hi - lo)) * innerH;
  const step = innerW / panel.bins.length;
  const boxes: BoxGeometry[] = panel.bins.map((b, i) => ({
    label: b.label,
    x: MARGIN.left + step * (i + 0.5),
    whiskerLow: yOf(b.min),
    whiskerHigh: yOf(b.max),
    boxLow: yOf(b.q1),
    boxHigh: yOf(b.q3),
    median: yOf(b.median),
    observed: yOf(b.observed_logit),
    highlighted: isHighlighted(b),
  }));
  const tickCount = 5;
  const yTicks = Array.from({ length: tickCount }, (_, i) => {
    const value = lo + ((hi - lo) * i) / (tickCount - 1);
    return { y: yOf(value), value };
  });
  return {
    name: panel.name,
    title: PANEL_TITLES[panel.name] ?? panel.name,
    width,
    height,
    boxes,
    observedPath: boxes.map((b) => ({ x: b.x, y: b.observed })),
    yTicks,
  };
}

function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

/** Render one panel layout as a standalone SVG string. */
export function panelSvg(layout: PanelLayout): string {
  const out: string[] = [];
  out.push(
    `<svg class="gof-panel" data-panel="${esc(layout.name)}" ` +
      `viewBox="0 0 ${layout.width} ${layout.height}" ` +
      `width="${layout.width}" height="${layout.height}" ` +
      `xmlns="http://www.w3.org/2000/svg">`,
  );
  out.push(
    `<text x="${layout.width / 2}" y="14" text-anchor="middle" ` +
      `class="panel-title">${esc(layout.title)}</text>`,
  );
  for (const t of layout.yTicks) {
    out.push(
      `<text x="${MARGIN.left - 6}" y="${t.y.toFixed(1)}" text-anchor="end" ` +
        `class="tick">${t.value.toFixed(1)}</text>`,
    );
  }
  const half = Math.max(
    3,
    Math.min(10, (layout.width - MARGIN.left - MARGIN.right) / layout.boxes.length / 3),
  );
  for (const b of layout.boxes) {
    const cls = b.highlighted ? 'box highlight' : 'box';
    out.push(`<g class="${cls}" data-bin="${esc(b.label)}">`);
    out.push(
      `<line x1="${b.x}" y1="${b.whiskerLow.toFixed(1)}" ` +
        `x2="${b.x}" y2="${b.whiskerHigh.toFixed(1)}" class="whisker"/>`,
    );
    out.push(
      `<rect x="${(b.x - half).toFixed(1)}" y="${b.boxHigh.toFixed(1)}" ` +
        `width="${(2 * half).toFixed(1)}" ` +
        `height="${Math.max(0, b.boxLow - b.boxHigh).toFixed(1)}" class="iqr"/>`,
    );
    out.push(
      `<line x1="${(b.x - half).toFixed(1)}" y1="${b.median.toFixed(1)}" ` +
        `x2="${(b.x + half).toFixed(1)}" y2="${b.median.toFixed(1)}" class="median"/>`,
    );
    out.push(
      `<text x="${b.x}" y="${layout.height - 10}" text-anchor="middle" ` +
        `class="bin-label">${esc(b.label)}</text>`,
    );
    out.push('</g>');
  }
  const path = layout.observedPath
    .map((p, i) => `${i === 0 ? 'M' : 'L'}${p.x.toFixed(1)},${p.y.toFixed(1)}`)
    .join(' ');
  out.push(`<path d="${path}" class="observed" fill="none"/>`);
  out.push('</svg>');
  return out.join('\n');
}

/** Render the four panels of a plot-data document. */
export function renderPanels(doc: PlotDataDoc, width = 320, height = 240): string[] {
  checkSchema(doc);
  return doc.panels.map((p) => {
    if (p.bins.length === 0) {
      return (
        `<svg class="gof-panel empty" data-panel="${esc(p.name)}" ` +
        `viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" ` +
        `xmlns="http://www.w3.org/2000/svg">` +
        `<text x="${width / 2}" y="${height / 2}" text-anchor="middle">no data</text>` +
        `</svg>`
      );
    }
    return panelSvg(layoutPanel(p, width, height));
  });
}
