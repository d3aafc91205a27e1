// @vitest-environment node
//
// End-to-end against the real service: spawn the Python backend, push
// the 2-user fixture through upload -> analysis -> views, and check the
// rendered models against live payloads. Run with `npm run test:live`.
// Node environment: the browser sandbox's same-origin policy would
// block cross-port requests, and nothing here touches the DOM.

import { type ChildProcess, spawn } from 'node:child_process';
import { readFileSync } from 'node:fs';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { buildChartView, seriesSpread } from '../src/chart.js';
import { buildSubmission, DEFAULT_FORM } from '../src/form.js';
import { buildMapView } from '../src/mapview.js';
import { buildTableView } from '../src/tableview.js';

let proc: ChildProcess;
let api: ApiClient;
let fixtureFiles: Record<string, string>;

beforeAll(async () => {
  proc = spawn('python3', ['scripts/live_server.py'], { stdio: ['ignore', 'pipe', 'inherit'] });
  const info = await new Promise<{ port: number; files: Record<string, string> }>((resolve, reject) => {
    let buffer = '';
    proc.stdout!.on('data', (chunk) => {
      buffer += String(chunk);
      const line = buffer.split('\n')[0];
      if (line && buffer.includes('\n')) resolve(JSON.parse(line));
    });
    proc.on('exit', (code) => reject(new Error(`service exited early (${code})`)));
    setTimeout(() => reject(new Error('service did not report a port')), 60000);
  });
  fixtureFiles = info.files;
  api = new ApiClient(`http://127.0.0.1:${info.port}`);
  for (let attempt = 0; ; attempt++) {
    try {
      const resp = await fetch(`${api.baseUrl}/health`);
      if (resp.ok) break;
    } catch {
      /* not up yet */
    }
    if (attempt > 100) throw new Error('service never became healthy');
    await new Promise((r) => setTimeout(r, 200));
  }
});

afterAll(() => {
  proc?.kill();
});

describe('live console flow on the 2-user fixture', () => {
  let datasetId: string;
  let runId: string;

  it('uploads one file per user', async () => {
    const files = Object.entries(fixtureFiles).map(([user, path]) => ({
      name: `${user}.json`,
      content: readFileSync(path, 'utf8'),
    }));
    const summary = await api.uploadDataset(files);
    datasetId = summary.dataset_id;
    expect(summary.n_users).toBe(2);
  });

  it('submits the form and completes the analysis', async () => {
    const plan = buildSubmission({ ...DEFAULT_FORM, collisionUser: 'U00' });
    const run = await api.createAnalysis(datasetId, { ...plan.analysisBody, window_days: 2 });
    const done = await api.waitForAnalysis(run.run_id);
    runId = done.run_id;
    expect(done.n_events).toBe(1);
  });

  it('map shows 2 tracks and 1 contact marker from live geojson', async () => {
    const doc = await api.getGeojson(datasetId, runId, 'U00');
    const vm = buildMapView(doc);
    expect(vm.tracks).toHaveLength(2);
    expect(vm.markers).toHaveLength(1);
    expect(vm.markers[0]!.level).toBe(1);
  });

  it('screening table groups match the live report ordering', async () => {
    const report = await api.getReport(runId, 'U00');
    const vm = buildTableView(report.rows);
    expect(vm.groups.map((g) => g.level)).toEqual([1]);
    expect(vm.groups.flatMap((g) => g.rows)).toEqual(report.rows);
  });

  it('common-location cells arrive with geographic bounds', async () => {
    const common = await api.getCommonLocations(datasetId, 10.0, 2);
    expect(common.cells.length).toBeGreaterThanOrEqual(1);
    const doc = await api.getGeojson(datasetId, runId, 'U00');
    const vm = buildMapView(doc, null, undefined, undefined, common.cells);
    expect(vm.cells).toHaveLength(common.cells.length);
  });

  it('rejects an invalid config with the backend detail', async () => {
    await expect(
      api.createAnalysis(datasetId, {
        start_date: '2022-04-14',
        step_s: 60,
        collision_interval_s: 30,
      }),
    ).rejects.toThrow(/collision_interval_s/);
  });

  it('mu slider at 1 renders a flat susceptible curve from live data', async () => {
    const payload = await api.simulate({
      params: { beta: 0.5, alpha: 0.2, gamma: 0.1, model_kind: 'SEIR' },
      initial: { s: 0.97, e: 0.02, i: 0.01, r: 0.0 },
      t_end_days: 120,
      mu_values: [1.0],
    });
    const vm = buildChartView(payload.runs[0]!);
    const sLine = vm.lines.find((l) => l.key === 's')!;
    expect(seriesSpread(sLine.values)).toBe(0);
    expect(sLine.values[0]).toBe(0.97);
  });

  it('mu slider at 0 gives a falling susceptible curve', async () => {
    const payload = await api.simulate({
      params: { beta: 0.5, alpha: 0.2, gamma: 0.1, model_kind: 'SEIR' },
      initial: { s: 0.97, e: 0.02, i: 0.01, r: 0.0 },
      t_end_days: 120,
      mu_values: [0.0],
    });
    const vm = buildChartView(payload.runs[0]!);
    expect(seriesSpread(vm.lines.find((l) => l.key === 's')!.values)).toBeGreaterThan(0.1);
  });
});
