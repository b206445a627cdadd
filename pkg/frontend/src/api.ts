/** Typed client for the engine's HTTP job service. */

import { JobDoc, NetworkInfo } from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface JobSubmission {
  kind: 'fit' | 'gof' | 'simulate' | 'select';
  network_id?: string;
  terms?: string;
  theta?: number[];
  tau?: number;
  method?: string;
  fit_job_id?: string;
  seed?: number;
  control?: { burn_in?: number; interval?: number; sample_count?: number };
}

export interface PollOptions {
  /** first delay in ms; grows by `factor` up to `maxDelayMs` */
  initialDelayMs?: number;
  factor?: number;
  maxDelayMs?: number;
  /** injectable for tests */
  sleep?: (ms: number) => Promise<void>;
  onUpdate?: (job: JobDoc) => void;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorClass: string,
    detail: string,
  ) {
    super(`${errorClass}: ${detail}`);
  }
}

async function asJson<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let errorClass = `HTTP${res.status}`;
    let detail = res.statusText;
    try {
      const body = (await res.json()) as { error?: string; detail?: string };
      if (body.error) errorClass = body.error;
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(res.status, errorClass, detail);
  }
  return (await res.json()) as T;
}

export class Client {
  constructor(
    private base = '',
    private fetchImpl: FetchLike = (...a) => fetch(...a),
  ) {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  async uploadNetwork(
    format: 'adjacency-matrix' | 'edge-list',
    content: string,
    name?: string,
  ): Promise<NetworkInfo> {
    const res = await this.fetchImpl(this.url('/v1/networks'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ format, content, name }),
    });
    return asJson<NetworkInfo>(res);
  }

  async listNetworks(): Promise<NetworkInfo[]> {
    return asJson(await this.fetchImpl(this.url('/v1/networks')));
  }

  async submitJob(body: JobSubmission): Promise<{ id: string }> {
    const res = await this.fetchImpl(this.url('/v1/jobs'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    return asJson(res);
  }

  async getJob(id: string): Promise<JobDoc> {
    return asJson(await this.fetchImpl(this.url(`/v1/jobs/${id}`)));
  }

  async getResult<T>(id: string): Promise<T> {
    return asJson(await this.fetchImpl(this.url(`/v1/jobs/${id}/result`)));
  }

  async cancelJob(id: string): Promise<void> {
    await asJson(await this.fetchImpl(this.url(`/v1/jobs/${id}`), { method: 'DELETE' }));
  }

  /**
   * Poll a job until it reaches a terminal state.  The delay backs off
   * geometrically; the terminal document is always returned (never dropped),
   * and every observed update is forwarded to `onUpdate`.
   */
  async pollJob(id: string, opts: PollOptions = {}): Promise<JobDoc> {
    const sleep = opts.sleep ?? defaultSleep;
    let delay = opts.initialDelayMs ?? 250;
    const factor = opts.factor ?? 1.6;
    const max = opts.maxDelayMs ?? 4000;
    for (;;) {
      const job = await this.getJob(id);
      opts.onUpdate?.(job);
      if (job.status === 'done' || job.status === 'failed') {
        return job;
      }
      await sleep(delay);
      delay = Math.min(max, delay * factor);
    }
  }
}
