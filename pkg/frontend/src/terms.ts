/** Term-toggle state and its translation to the engine's term grammar. */

export interface TermToggles {
  edges: boolean;
  twopath: boolean;
  gwesp: boolean;
  gwdsp: boolean;
  gwnsp: boolean;
  gwd: boolean;
  nodematch: boolean;
  /** decay shared by the geometrically weighted families */
  tau: number;
  /** attribute name used when nodematch is toggled */
  attribute: string;
}

export const DEFAULT_TOGGLES: TermToggles = {
  edges: true,
  twopath: false,
  gwesp: false,
  gwdsp: false,
  gwnsp: false,
  gwd: false,
  nodematch: false,
  tau: 0.75,
  attribute: '',
};

/** Category structure mirrored from the candidate-metric table. */
export const TOGGLE_GROUPS: { label: string; keys: (keyof TermToggles)[] }[] = [
  { label: 'Connectedness', keys: ['edges', 'twopath'] },
  { label: 'Local clustering / efficiency', keys: ['gwesp', 'gwdsp'] },
  { label: 'Global efficiency', keys: ['gwnsp'] },
  { label: 'Degree distribution', keys: ['gwd'] },
  { label: 'Location', keys: ['nodematch'] },
];

function formatTau(tau: number): string {
  // match the engine's shortest-form float rendering for common values
  return String(tau);
}

/**
 * Build the exact comma-separated term string the engine expects,
 * e.g. `edges,gwesp:0.75,gwnsp:0.75`.
 */
export function termString(t: TermToggles): string {
  const parts: string[] = [];
  if (t.edges) parts.push('edges');
  if (t.twopath) parts.push('twopath');
  if (t.gwesp) parts.push(`gwesp:${formatTau(t.tau)}`);
  if (t.gwdsp) parts.push(`gwdsp:${formatTau(t.tau)}`);
  if (t.gwnsp) parts.push(`gwnsp:${formatTau(t.tau)}`);
  if (t.gwd) parts.push(`gwd:${formatTau(t.tau)}`);
  if (t.nodematch) {
    parts.push(t.attribute ? `nodematch:${t.attribute}` : 'nodematch');
  }
  return parts.join(',');
}

export function anyToggled(t: TermToggles): boolean {
  return termString(t).length > 0;
}
