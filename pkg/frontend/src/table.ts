/** Comparison table of tried models.
 *
 * Rows are built only from result-document fields; nothing is computed
 * client-side beyond formatting.  Failed jobs keep their row (showing the
 * error class) but are excluded from score-based ordering.
 */

import { FitResultDoc } from './types.js';
import { TriedModel } from './session.js';

export interface TableRow {
  jobId: string;
  terms: string;
  /** per-term estimate, aligned with `columns`; null renders as a dash */
  estimates: (number | null)[];
  aic: number | null;
  score: number | null;
  status: string;
  errorClass: string | null;
  final: boolean;
}

export interface ComparisonTable {
  columns: string[];
  rows: TableRow[];
}

/** Union of term labels across fitted models, in first-seen order. */
export function termColumns(fits: (FitResultDoc | null)[]): string[] {
  const cols: string[] = [];
  for (const fit of fits) {
    if (!fit) continue;
    for (const label of fit.model) {
      if (!cols.includes(label)) cols.push(label);
    }
  }
  return cols;
}

export function buildTable(entries: TriedModel[]): ComparisonTable {
  const columns = termColumns(entries.map((e) => e.fit ?? null));
  const rows = entries.map((e): TableRow => {
    const fit = e.fit ?? null;
    const estimates = columns.map((col) => {
      if (!fit) return null;
      const idx = fit.model.indexOf(col);
      return idx >= 0 ? fit.theta[idx] : null;
    });
    return {
      jobId: e.jobId,
      terms: e.terms,
      estimates,
      aic: fit ? fit.aic : null,
      score: e.score ?? null,
      status: e.status,
      errorClass: e.errorClass ?? null,
      final: e.final === true,
    };
  });
  return { columns, rows };
}

export type SortKey = 'score' | 'aic' | 'terms';

/**
 * Stable sort; rows without the sort value (failed jobs, pending fits)
 * sink to the bottom in their original order.
 */
export function sortRows(
  rows: TableRow[],
  key: SortKey,
  descending = true,
): TableRow[] {
  const keyed = rows.map((row, index) => ({ row, index }));
  const value = (r: TableRow): number | string | null =>
    key === 'terms' ? r.terms : key === 'aic' ? r.aic : r.score;
  keyed.sort((a, b) => {
    const va = value(a.row);
    const vb = value(b.row);
    if (va === null && vb === null) return a.index - b.index;
    if (va === null) return 1;
    if (vb === null) return -1;
    if (va < vb) return descending ? 1 : -1;
    if (va > vb) return descending ? -1 : 1;
    return a.index - b.index;
  });
  return keyed.map((k) => k.row);
}

export function formatEstimate(v: number | null): string {
  return v === null ? '–' : v.toFixed(2);
}
