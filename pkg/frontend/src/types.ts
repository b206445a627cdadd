/** Document schemas shared with the engine (schema_version 1). */

export interface PlotBin {
  label: string;
  observed: number;
  observed_logit: number;
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

export interface PlotPanel {
  name: string;
  bins: PlotBin[];
}

export interface PlotDataDoc {
  schema_version: number;
  kind: 'gof_plot_data';
  seed: number;
  simulation_count: number;
  fit_reference: {
    terms?: string[];
    theta?: number[];
    method?: string;
    seed?: number;
  };
  panels: PlotPanel[];
}

export interface FitResultDoc {
  schema_version: number;
  kind: 'fit_result';
  seed: number;
  model: string[];
  theta: number[];
  se: number[];
  wald_p: number[];
  loglik: number | null;
  loglik_kind: string;
  aic: number | null;
  method: string;
  converged: boolean;
  iterations: number;
  n: number;
}

export interface GofReportDoc {
  schema_version: number;
  kind: 'gof_report';
  seed: number;
  simulation_count: number;
  overall_score: number;
  panels: {
    name: string;
    labels: string[];
    observed: number[];
    observed_logit: number[];
    summary: Record<string, number[]>;
    summary_logit: Record<string, number[]>;
    coverage: number;
  }[];
}

export type JobStatus = 'queued' | 'running' | 'done' | 'failed';

export interface JobDoc {
  id: string;
  kind: string;
  status: JobStatus;
  progress: number;
  error_class: string | null;
  error_message: string | null;
  has_result: boolean;
}

export interface NetworkInfo {
  id: string;
  name: string;
  n: number;
  m: number;
  density: number;
  has_attributes: boolean;
}

export const SCHEMA_VERSION = 1;

/** Throws when a document does not carry the supported schema version. */
export function checkSchema(doc: { schema_version?: number }): void {
  if (doc.schema_version !== SCHEMA_VERSION) {
    throw new Error(
      `unsupported schema version ${doc.schema_version} (want ${SCHEMA_VERSION})`,
    );
  }
}
