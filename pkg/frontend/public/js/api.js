// Thin typed client for the campustrace HTTP API. Every method
// unwraps the schema-versioned envelope and throws ApiError with the
// server's `detail` text on non-2xx responses, so views can show the
// backend's own validation messages inline.
export class ApiError extends Error {
    status;
    constructor(message, status) {
        super(message);
        this.status = status;
    }
}
async function parseDetail(resp) {
    try {
        const body = await resp.json();
        if (typeof body.detail === 'string')
            return body.detail;
        if (body.detail)
            return JSON.stringify(body.detail);
    }
    catch {
        /* non-JSON error body */
    }
    return `${resp.status} ${resp.statusText}`;
}
export class ApiClient {
    baseUrl;
    constructor(baseUrl = '') {
        this.baseUrl = baseUrl;
    }
    async unwrap(resp) {
        if (!resp.ok) {
            throw new ApiError(await parseDetail(resp), resp.status);
        }
        const envelope = (await resp.json());
        return envelope.data;
    }
    async uploadDataset(files) {
        const form = new FormData();
        for (const f of files) {
            const blob = typeof f.content === 'string' ? new Blob([f.content], { type: 'application/json' }) : f.content;
            form.append('files', blob, f.name);
        }
        const resp = await fetch(`${this.baseUrl}/datasets`, { method: 'POST', body: form });
        return this.unwrap(resp);
    }
    async getDataset(datasetId) {
        return this.unwrap(await fetch(`${this.baseUrl}/datasets/${datasetId}`));
    }
    async createAnalysis(datasetId, body) {
        const resp = await fetch(`${this.baseUrl}/datasets/${datasetId}/analyses`, {
            method: 'POST',
            headers: { 'content-type': 'application/json' },
            body: JSON.stringify(body),
        });
        return this.unwrap(resp);
    }
    async getAnalysis(runId) {
        return this.unwrap(await fetch(`${this.baseUrl}/analyses/${runId}`));
    }
    /** Poll until the run reaches a terminal state; throws on failure. */
    async waitForAnalysis(runId, intervalMs = 500, timeoutMs = 120000) {
        const deadline = Date.now() + timeoutMs;
        for (;;) {
            const run = await this.getAnalysis(runId);
            if (run.status === 'done')
                return run;
            if (run.status === 'failed')
                throw new ApiError(run.error ?? 'analysis failed', 422);
            if (Date.now() > deadline)
                throw new ApiError(`analysis ${runId} timed out`, 504);
            await new Promise((r) => setTimeout(r, intervalMs));
        }
    }
    async getEvents(runId, offset = 0, limit = 1000) {
        return this.unwrap(await fetch(`${this.baseUrl}/analyses/${runId}/events?offset=${offset}&limit=${limit}`));
    }
    async getLevels(runId, indexUser) {
        return this.unwrap(await fetch(`${this.baseUrl}/analyses/${runId}/levels?index_user=${encodeURIComponent(indexUser)}`));
    }
    async getScores(runId, indexUser) {
        return this.unwrap(await fetch(`${this.baseUrl}/analyses/${runId}/scores?index_user=${encodeURIComponent(indexUser)}`));
    }
    async getReport(runId, indexUser) {
        return this.unwrap(await fetch(`${this.baseUrl}/analyses/${runId}/report?index_user=${encodeURIComponent(indexUser)}`));
    }
    async getCommonLocations(datasetId, cellM = 10.0, minUsers = 2) {
        return this.unwrap(await fetch(`${this.baseUrl}/datasets/${datasetId}/common-locations?cell_m=${cellM}&min_users=${minUsers}`));
    }
    async getGeojson(datasetId, analysisId, indexUser) {
        const params = new URLSearchParams();
        if (analysisId)
            params.set('analysis_id', analysisId);
        if (indexUser)
            params.set('index_user', indexUser);
        const qs = params.toString();
        const resp = await fetch(`${this.baseUrl}/datasets/${datasetId}/geojson${qs ? `?${qs}` : ''}`);
        if (!resp.ok)
            throw new ApiError(await parseDetail(resp), resp.status);
        return (await resp.json()); // geojson is served bare, not enveloped
    }
    async simulate(body) {
        const resp = await fetch(`${this.baseUrl}/simulations`, {
            method: 'POST',
            headers: { 'content-type': 'application/json' },
            body: JSON.stringify(body),
        });
        return this.unwrap(resp);
    }
}
