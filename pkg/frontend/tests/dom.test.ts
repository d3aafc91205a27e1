// App wiring against the real index.html markup with fetch stubbed to
// serve the recorded API fixtures: upload -> run -> map/table render,
// level filter, slider-commit simulation, and the error banner.

import { readFileSync } from 'node:fs';
import { beforeEach, describe, expect, it, vi } from 'vitest';

import { boot } from '../src/app.js';

function fixture(name: string): unknown {
  return JSON.parse(readFileSync(`tests/fixtures/${name}`, 'utf8'));
}

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

let failNextFetch = false;

function routedFetch(input: RequestInfo | URL, init?: RequestInit): Promise<Response> {
  const url = String(input);
  const method = init?.method ?? 'GET';
  if (failNextFetch) {
    failNextFetch = false;
    return Promise.resolve(jsonResponse({ detail: 'backend unreachable (stubbed outage)' }, 503));
  }
  if (method === 'POST' && url.endsWith('/datasets')) return Promise.resolve(jsonResponse(fixture('dataset.json')));
  if (method === 'POST' && /\/datasets\/.+\/analyses$/.test(url))
    return Promise.resolve(jsonResponse(fixture('analysis_run.json')));
  if (/\/analyses\/[^/]+$/.test(url)) return Promise.resolve(jsonResponse(fixture('analysis_run.json')));
  if (url.includes('/geojson')) return Promise.resolve(jsonResponse(fixture('geojson.json')));
  if (url.includes('/common-locations')) return Promise.resolve(jsonResponse(fixture('common_locations.json')));
  if (url.includes('/levels')) return Promise.resolve(jsonResponse(fixture('levels.json')));
  if (url.includes('/report')) return Promise.resolve(jsonResponse(fixture('report.json')));
  if (url.includes('/scores')) return Promise.resolve(jsonResponse(fixture('scores.json')));
  if (method === 'POST' && url.endsWith('/simulations')) {
    const body = JSON.parse(String(init?.body ?? '{}')) as { mu_values?: number[] };
    const name = body.mu_values?.[0] === 1 ? 'simulation_mu1.json' : 'simulation_mu0.json';
    return Promise.resolve(jsonResponse(fixture(name)));
  }
  return Promise.resolve(jsonResponse({ detail: `unrouted: ${method} ${url}` }, 404));
}

function loadMarkup(): void {
  const html = readFileSync('index.html', 'utf8');
  const body = html.slice(html.indexOf('<body>') + 6, html.indexOf('</body>'));
  document.body.innerHTML = body.replace(/<script[\s\S]*?<\/script>/g, '');
}

function setFiles(): void {
  const input = document.getElementById('upload-files') as HTMLInputElement;
  const files = ['U00.json', 'U01.json'].map((n) => new File(['{"locations":[]}'], n));
  try {
    // @ts-expect-error happy-dom allows assignment
    input.files = files;
  } catch {
    Object.defineProperty(input, 'files', { value: files });
  }
}

async function runFullAnalysis(): Promise<void> {
  setFiles();
  document.getElementById('upload-btn')!.click();
  await vi.waitFor(() => {
    expect(document.getElementById('dataset-summary')!.textContent).toContain('2 users');
  });
  const select = document.getElementById('form-collision-user') as HTMLSelectElement;
  select.value = 'U00';
  document.getElementById('run-btn')!.click();
  await vi.waitFor(() => {
    expect(document.getElementById('run-status')!.textContent).toContain('done');
  });
}

beforeEach(() => {
  failNextFetch = false;
  vi.stubGlobal('fetch', routedFetch);
  loadMarkup();
  boot();
});

describe('console wiring', () => {
  it('upload populates the summary and the collision-user dropdown', async () => {
    setFiles();
    document.getElementById('upload-btn')!.click();
    await vi.waitFor(() => {
      expect(document.getElementById('dataset-summary')!.textContent).toContain('2 users');
    });
    const options = Array.from(document.querySelectorAll('#form-collision-user option')).map((o) => o.textContent);
    expect(options).toContain('U00');
    expect(options).toContain('U01');
    expect((document.getElementById('run-btn') as HTMLButtonElement).disabled).toBe(false);
  });

  it('run renders the map with 2 tracks + 1 marker and the grouped table', async () => {
    await runFullAnalysis();
    expect(document.querySelectorAll('#map-host path.track')).toHaveLength(2);
    expect(document.querySelectorAll('#map-host g.contact-marker')).toHaveLength(1);
    expect(document.querySelectorAll('#table-host tbody.level-group')).toHaveLength(1);
    expect(document.querySelector('#scores-host table')).toBeTruthy();
  });

  it('missing collision user blocks the request with inline validation', async () => {
    setFiles();
    document.getElementById('upload-btn')!.click();
    await vi.waitFor(() => {
      expect(document.getElementById('dataset-summary')!.textContent).toContain('2 users');
    });
    document.getElementById('run-btn')!.click();
    await vi.waitFor(() => {
      expect(document.getElementById('err-collisionUser')!.textContent).toContain('index case');
    });
    expect(document.getElementById('run-status')!.textContent).not.toContain('done');
  });

  it('common-cells toggle adds and removes the overlay layer', async () => {
    await runFullAnalysis();
    expect(document.querySelectorAll('#map-host rect.common-cell')).toHaveLength(0);
    const toggle = document.getElementById('cells-toggle') as HTMLInputElement;
    toggle.checked = true;
    toggle.dispatchEvent(new Event('change'));
    await vi.waitFor(() => {
      expect(document.querySelectorAll('#map-host rect.common-cell')).toHaveLength(1);
    });
    toggle.checked = false;
    toggle.dispatchEvent(new Event('change'));
    await vi.waitFor(() => {
      expect(document.querySelectorAll('#map-host rect.common-cell')).toHaveLength(0);
    });
  });

  it('level filter hides non-matching markers but keeps tracks', async () => {
    await runFullAnalysis();
    const filter = document.getElementById('level-filter') as HTMLSelectElement;
    filter.value = '2';
    filter.dispatchEvent(new Event('change'));
    await vi.waitFor(() => {
      expect(document.querySelectorAll('#map-host g.contact-marker')).toHaveLength(0);
    });
    expect(document.querySelectorAll('#map-host path.track')).toHaveLength(2);
    filter.value = '1';
    filter.dispatchEvent(new Event('change'));
    await vi.waitFor(() => {
      expect(document.querySelectorAll('#map-host g.contact-marker')).toHaveLength(1);
    });
  });

  it('slider commit at mu=1 renders a flat susceptible polyline and readouts', async () => {
    const slider = document.getElementById('mu-slider') as HTMLInputElement;
    slider.value = '1';
    slider.dispatchEvent(new Event('change'));
    await vi.waitFor(() => {
      expect(document.querySelector('#chart-host polyline.series-s')).toBeTruthy();
    });
    const points = document.querySelector('#chart-host polyline.series-s')!.getAttribute('points')!;
    const ys = new Set(points.split(' ').map((p) => p.split(',')[1]));
    expect(ys.size).toBe(1);
    expect(document.getElementById('readout-peak')!.textContent).not.toBe('–');
    expect(document.getElementById('readout-final')!.textContent).not.toBe('–');
  });

  it('API failure surfaces in the error banner, never a silent empty view', async () => {
    failNextFetch = true;
    document.getElementById('sim-btn')!.click();
    await vi.waitFor(() => {
      const banner = document.getElementById('error-banner')!;
      expect(banner.style.display).toBe('block');
      expect(banner.textContent).toContain('backend unreachable');
    });
  });
});
