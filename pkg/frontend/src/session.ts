/** Session state: the audit trail of the human's model exploration.
 *
 * Every tried model references its job ids and seeds, so an exported
 * session is a replayable record of how the final model was chosen.
 */

import { FitResultDoc, GofReportDoc, JobStatus } from './types.js';

export interface TriedModel {
  jobId: string;
  gofJobId?: string;
  terms: string;
  seed: number;
  status: JobStatus | 'pending';
  errorClass?: string | null;
  fit?: FitResultDoc | null;
  score?: number | null;
  final?: boolean;
}

export interface SessionState {
  schema_version: number;
  networkId: string | null;
  tried: TriedModel[];
  finalJobId: string | null;
}

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const STORAGE_KEY = 'ergmkit-workbench-session';

export function emptySession(): SessionState {
  return { schema_version: 1, networkId: null, tried: [], finalJobId: null };
}

export class SessionStore {
  state: SessionState;

  constructor(private storage: KeyValueStore | null = null) {
    this.state = emptySession();
    const raw = this.storage?.getItem(STORAGE_KEY);
    if (raw) {
      try {
        this.state = importSession(raw);
      } catch {
        this.state = emptySession();
      }
    }
  }

  private persist(): void {
    this.storage?.setItem(STORAGE_KEY, exportSession(this.state));
  }

  selectNetwork(id: string): void {
    this.state.networkId = id;
    this.persist();
  }

  /** Returns true when the same term string was already tried. */
  isDuplicate(terms: string): boolean {
    return this.state.tried.some((t) => t.terms === terms);
  }

  addPending(jobId: string, terms: string, seed: number): TriedModel {
    const entry: TriedModel = {
      jobId,
      terms,
      seed,
      status: 'pending',
      fit: null,
      score: null,
    };
    this.state.tried.push(entry);
    this.persist();
    return entry;
  }

  update(jobId: string, patch: Partial<TriedModel>): void {
    const entry = this.state.tried.find((t) => t.jobId === jobId);
    if (!entry) return;
    Object.assign(entry, patch);
    this.persist();
  }

  /**
   * Pin the final model.  Only a finished fit that carries a
   * goodness-of-fit score can be final.
   */
  markFinal(jobId: string): void {
    const entry = this.state.tried.find((t) => t.jobId === jobId);
    if (!entry || entry.status !== 'done' || entry.score == null) {
      throw new Error('final model must reference a finished fit with a GOF report');
    }
    for (const t of this.state.tried) t.final = t.jobId === jobId;
    this.state.finalJobId = jobId;
    this.persist();
  }

  attachScore(jobId: string, gofJobId: string, report: GofReportDoc): void {
    this.update(jobId, { gofJobId, score: report.overall_score });
  }
}

export function exportSession(state: SessionState): string {
  return JSON.stringify(state, null, 2);
}

export function importSession(raw: string): SessionState {
  const parsed = JSON.parse(raw) as SessionState;
  if (parsed.schema_version !== 1) {
    throw new Error(`unsupported session version ${parsed.schema_version}`);
  }
  if (!Array.isArray(parsed.tried)) {
    throw new Error('malformed session: tried is not a list');
  }
  return parsed;
}
