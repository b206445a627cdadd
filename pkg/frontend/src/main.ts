/** DOM wiring for the model-selection workbench.
 *
 * All statistics shown come from engine result documents; this layer only
 * submits jobs, polls, and renders.
 */

import { Client } from './api.js';
import { highlightedBins, renderPanels } from './panels.js';
import { SessionStore } from './session.js';
import { buildTable, formatEstimate, SortKey, sortRows } from './table.js';
import { DEFAULT_TOGGLES, TOGGLE_GROUPS, anyToggled, termString, TermToggles } from './terms.js';
import { FitResultDoc, GofReportDoc, PlotDataDoc } from './types.js';

const client = new Client('');
const session = new SessionStore(window.localStorage);
const toggles: TermToggles = { ...DEFAULT_TOGGLES };

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderToggles(): void {
  const host = el<HTMLDivElement>('toggles');
  host.innerHTML = '';
  for (const group of TOGGLE_GROUPS) {
    const fieldset = document.createElement('fieldset');
    const legend = document.createElement('legend');
    legend.textContent = group.label;
    fieldset.appendChild(legend);
    for (const key of group.keys) {
      const label = document.createElement('label');
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.checked = Boolean(toggles[key]);
      box.addEventListener('change', () => {
        (toggles as unknown as Record<string, boolean>)[key as string] = box.checked;
        syncSubmit();
      });
      label.appendChild(box);
      label.appendChild(document.createTextNode(` ${key}`));
      fieldset.appendChild(label);
    }
    host.appendChild(fieldset);
  }
  const tau = el<HTMLInputElement>('tau');
  tau.value = String(toggles.tau);
  tau.addEventListener('change', () => {
    toggles.tau = Number(tau.value) || 0.75;
    syncSubmit();
  });
}

function syncSubmit(): void {
  const button = el<HTMLButtonElement>('submit-model');
  button.disabled = !anyToggled(toggles) || !session.state.networkId;
  el<HTMLSpanElement>('term-preview').textContent = termString(toggles) || '(none)';
  const dup = anyToggled(toggles) && session.isDuplicate(termString(toggles));
  el<HTMLSpanElement>('dup-warning').textContent = dup
    ? 'already tried; resubmission allowed'
    : '';
}

async function refreshNetworks(): Promise<void> {
  const list = await client.listNetworks();
  const select = el<HTMLSelectElement>('network');
  select.innerHTML = '';
  for (const net of list) {
    const opt = document.createElement('option');
    opt.value = net.id;
    opt.textContent = `${net.name} (n=${net.n}, m=${net.m})`;
    select.appendChild(opt);
  }
  if (list.length && !session.state.networkId) {
    session.selectNetwork(list[0].id);
  }
  if (session.state.networkId) select.value = session.state.networkId;
  syncSubmit();
}

async function submitModel(): Promise<void> {
  const terms = termString(toggles);
  const networkId = session.state.networkId;
  if (!terms || !networkId) return;
  const seed = Math.floor(Math.random() * 2 ** 31);
  try {
    const { id } = await client.submitJob({
      kind: 'fit',
      network_id: networkId,
      terms,
      seed,
    });
    session.addPending(id, terms, seed);
    renderTable();
    void watchFit(id, networkId, terms, seed);
  } catch (err) {
    showError(err);
  }
}

async function watchFit(
  jobId: string,
  networkId: string,
  terms: string,
  seed: number,
): Promise<void> {
  const job = await client.pollJob(jobId, { onUpdate: () => renderTable() });
  if (job.status === 'failed') {
    session.update(jobId, { status: 'failed', errorClass: job.error_class });
    renderTable();
    return;
  }
  const fit = await client.getResult<FitResultDoc>(jobId);
  session.update(jobId, { status: 'done', fit });
  renderTable();

  const gof = await client.submitJob({
    kind: 'gof',
    network_id: networkId,
    fit_job_id: jobId,
    seed,
  });
  const gofJob = await client.pollJob(gof.id);
  if (gofJob.status === 'done') {
    const report = await client.getResult<GofReportDoc>(gof.id);
    session.attachScore(jobId, gof.id, report);
    renderTable();
    renderReport(report, terms);
  }
}

function renderReport(report: GofReportDoc, terms: string): void {
  const doc: PlotDataDoc = {
    schema_version: report.schema_version,
    kind: 'gof_plot_data',
    seed: report.seed,
    simulation_count: report.simulation_count,
    fit_reference: {},
    panels: report.panels.map((p) => ({
      name: p.name,
      bins: p.labels.map((label, b) => ({
        label,
        observed: p.observed[b],
        observed_logit: p.observed_logit[b],
        min: p.summary_logit.min[b],
        q1: p.summary_logit.q1[b],
        median: p.summary_logit.median[b],
        q3: p.summary_logit.q3[b],
        max: p.summary_logit.max[b],
      })),
    })),
  };
  el<HTMLDivElement>('panels').innerHTML = renderPanels(doc).join('\n');
  const exceed = doc.panels
    .map((p) => `${p.name}: ${highlightedBins(p).join(', ') || 'none'}`)
    .join(' | ');
  el<HTMLDivElement>('panel-caption').textContent =
    `model ${terms} — bins outside simulated range — ${exceed}`;
}

let sortKey: SortKey = 'score';

function renderTable(): void {
  const table = buildTable(session.state.tried);
  const host = el<HTMLTableElement>('comparison');
  const head = ['model', ...table.columns, 'AIC', 'GOF score', 'status', ''];
  const rows = sortRows(table.rows, sortKey);
  const html: string[] = ['<thead><tr>'];
  for (const h of head) html.push(`<th>${h}</th>`);
  html.push('</tr></thead><tbody>');
  for (const row of rows) {
    html.push(`<tr class="${row.final ? 'final' : ''}">`);
    html.push(`<td>${row.terms}</td>`);
    for (const v of row.estimates) html.push(`<td>${formatEstimate(v)}</td>`);
    html.push(`<td>${row.aic === null ? '–' : row.aic.toFixed(2)}</td>`);
    html.push(`<td>${row.score === null ? '–' : row.score.toFixed(3)}</td>`);
    html.push(
      `<td>${row.status}${row.errorClass ? ` (${row.errorClass})` : ''}</td>`,
    );
    html.push(
      row.status === 'done' && row.score !== null
        ? `<td><button data-final="${row.jobId}">mark final</button></td>`
        : '<td></td>',
    );
    html.push('</tr>');
  }
  html.push('</tbody>');
  host.innerHTML = html.join('');
  host.querySelectorAll('button[data-final]').forEach((b) =>
    b.addEventListener('click', () => {
      session.markFinal((b as HTMLButtonElement).dataset.final!);
      renderTable();
    }),
  );
}

function showError(err: unknown): void {
  el<HTMLDivElement>('errors').textContent = String(err);
}

function wire(): void {
  renderToggles();
  syncSubmit();
  el<HTMLButtonElement>('submit-model').addEventListener('click', () => {
    void submitModel();
  });
  el<HTMLSelectElement>('network').addEventListener('change', (e) => {
    session.selectNetwork((e.target as HTMLSelectElement).value);
    syncSubmit();
  });
  el<HTMLButtonElement>('refresh-networks').addEventListener('click', () => {
    void refreshNetworks().catch(showError);
  });
  el<HTMLSelectElement>('sort-key').addEventListener('change', (e) => {
    sortKey = (e.target as HTMLSelectElement).value as SortKey;
    renderTable();
  });
  el<HTMLButtonElement>('export-session').addEventListener('click', () => {
    const blob = new Blob([JSON.stringify(session.state, null, 2)], {
      type: 'application/json',
    });
    const a = document.createElement('a');
    a.href = URL.createObjectURL(blob);
    a.download = 'ergmkit-session.json';
    a.click();
  });
  void refreshNetworks().catch(showError);
  renderTable();
}

if (typeof document !== 'undefined') {
  document.addEventListener('DOMContentLoaded', wire);
}
