// Thin typed client for the campustrace HTTP API. Every method
// unwraps the schema-versioned envelope and throws ApiError with the
// server's `detail` text on non-2xx responses, so views can show the
// backend's own validation messages inline.

import type {
  AnalysisRun,
  CommonLocationsPayload,
  DatasetSummary,
  Envelope,
  EventsPage,
  GeoJsonDoc,
  LevelsPayload,
  ReportPayload,
  ScoresPayload,
  SimulationPayload,
} from './types.js';

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function parseDetail(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    if (typeof body.detail === 'string') return body.detail;
    if (body.detail) return JSON.stringify(body.detail);
  } catch {
    /* non-JSON error body */
  }
  return `${resp.status} ${resp.statusText}`;
}

export class ApiClient {
  constructor(readonly baseUrl: string = '') {}

  private async unwrap<T>(resp: Response): Promise<T> {
    if (!resp.ok) {
      throw new ApiError(await parseDetail(resp), resp.status);
    }
    const envelope = (await resp.json()) as Envelope<T>;
    return envelope.data;
  }

  async uploadDataset(files: { name: string; content: Blob | string }[]): Promise<DatasetSummary> {
    const form = new FormData();
    for (const f of files) {
      const blob = typeof f.content === 'string' ? new Blob([f.content], { type: 'application/json' }) : f.content;
      form.append('files', blob, f.name);
    }
    const resp = await fetch(`${this.baseUrl}/datasets`, { method: 'POST', body: form });
    return this.unwrap<DatasetSummary>(resp);
  }

  async getDataset(datasetId: string): Promise<DatasetSummary> {
    return this.unwrap(await fetch(`${this.baseUrl}/datasets/${datasetId}`));
  }

  async createAnalysis(datasetId: string, body: Record<string, unknown>): Promise<AnalysisRun> {
    const resp = await fetch(`${this.baseUrl}/datasets/${datasetId}/analyses`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    return this.unwrap<AnalysisRun>(resp);
  }

  async getAnalysis(runId: string): Promise<AnalysisRun> {
    return this.unwrap(await fetch(`${this.baseUrl}/analyses/${runId}`));
  }

  /** Poll until the run reaches a terminal state; throws on failure. */
  async waitForAnalysis(runId: string, intervalMs = 500, timeoutMs = 120000): Promise<AnalysisRun> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const run = await this.getAnalysis(runId);
      if (run.status === 'done') return run;
      if (run.status === 'failed') throw new ApiError(run.error ?? 'analysis failed', 422);
      if (Date.now() > deadline) throw new ApiError(`analysis ${runId} timed out`, 504);
      await new Promise((r) => setTimeout(r, intervalMs));
    }
  }

  async getEvents(runId: string, offset = 0, limit = 1000): Promise<EventsPage> {
    return this.unwrap(await fetch(`${this.baseUrl}/analyses/${runId}/events?offset=${offset}&limit=${limit}`));
  }

  async getLevels(runId: string, indexUser: string): Promise<LevelsPayload> {
    return this.unwrap(
      await fetch(`${this.baseUrl}/analyses/${runId}/levels?index_user=${encodeURIComponent(indexUser)}`),
    );
  }

  async getScores(runId: string, indexUser: string): Promise<ScoresPayload> {
    return this.unwrap(
      await fetch(`${this.baseUrl}/analyses/${runId}/scores?index_user=${encodeURIComponent(indexUser)}`),
    );
  }

  async getReport(runId: string, indexUser: string): Promise<ReportPayload> {
    return this.unwrap(
      await fetch(`${this.baseUrl}/analyses/${runId}/report?index_user=${encodeURIComponent(indexUser)}`),
    );
  }

  async getCommonLocations(datasetId: string, cellM = 10.0, minUsers = 2): Promise<CommonLocationsPayload> {
    return this.unwrap(
      await fetch(`${this.baseUrl}/datasets/${datasetId}/common-locations?cell_m=${cellM}&min_users=${minUsers}`),
    );
  }

  async getGeojson(datasetId: string, analysisId?: string, indexUser?: string): Promise<GeoJsonDoc> {
    const params = new URLSearchParams();
    if (analysisId) params.set('analysis_id', analysisId);
    if (indexUser) params.set('index_user', indexUser);
    const qs = params.toString();
    const resp = await fetch(`${this.baseUrl}/datasets/${datasetId}/geojson${qs ? `?${qs}` : ''}`);
    if (!resp.ok) throw new ApiError(await parseDetail(resp), resp.status);
    return (await resp.json()) as GeoJsonDoc; // geojson is served bare, not enveloped
  }

  async simulate(body: Record<string, unknown>): Promise<SimulationPayload> {
    const resp = await fetch(`${this.baseUrl}/simulations`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    return this.unwrap<SimulationPayload>(resp);
  }
}
