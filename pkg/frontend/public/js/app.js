// Console wiring: upload -> configure analysis -> map + screening table
// -> what-if simulation panel. All state lives in this module; views
// re-render from API payloads only.
import { ApiClient, ApiError } from './api.js';
import { buildChartView, renderChartSvg } from './chart.js';
import { DEFAULT_FORM, buildSubmission, validateForm } from './form.js';
import { buildMapView, renderMapSvg } from './mapview.js';
import { buildTableView, renderTableHtml } from './tableview.js';
const api = new ApiClient('');
const state = {
    dataset: null,
    runId: null,
    geojson: null,
    levels: null,
    report: null,
    scores: null,
    commonCells: [],
    showCells: false,
    levelFilter: null,
    indexUser: '',
};
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing element #${id}`);
    return node;
}
function showError(message) {
    const banner = el('error-banner');
    banner.textContent = message ?? '';
    banner.style.display = message ? 'block' : 'none';
}
async function guarded(fn) {
    try {
        showError(null);
        await fn();
    }
    catch (err) {
        showError(err instanceof ApiError ? `API error: ${err.message}` : String(err));
    }
}
// -- upload ---------------------------------------------------------------
function wireUpload() {
    el('upload-btn').addEventListener('click', () => guarded(async () => {
        const input = el('upload-files');
        if (!input.files || input.files.length === 0) {
            showError('choose one or more Takeout JSON files first (one file per user)');
            return;
        }
        const files = Array.from(input.files).map((f) => ({ name: f.name, content: f }));
        state.dataset = await api.uploadDataset(files);
        renderDatasetSummary();
        populateUserDropdown();
        el('run-btn').disabled = false;
    }));
}
function renderDatasetSummary() {
    const ds = state.dataset;
    const box = el('dataset-summary');
    if (!ds) {
        box.textContent = '';
        return;
    }
    const span = ds.time_span ? `${ds.time_span[0]} → ${ds.time_span[1]}` : 'empty';
    box.innerHTML =
        `<strong>dataset ${ds.dataset_id}</strong>: ${ds.n_users} users, ${span}<br>` +
            ds.users.map((u) => `${u.user_id}: ${u.stored} fixes (${u.skipped} skipped, ${u.dropped_by_accuracy} dropped)`).join('<br>');
}
function populateUserDropdown() {
    const select = el('form-collision-user');
    select.innerHTML = '<option value="">— choose index case —</option>';
    for (const u of state.dataset?.users ?? []) {
        const opt = document.createElement('option');
        opt.value = u.user_id;
        opt.textContent = u.user_id;
        select.appendChild(opt);
    }
}
// -- analysis form -----------------------------------------------------------
function readForm() {
    return {
        startDate: el('form-start-date').value,
        startTime: el('form-start-time').value,
        intervalS: Number(el('form-interval').value),
        collisionDistanceM: Number(el('form-distance').value),
        collisionIntervalS: Number(el('form-collision-interval').value),
        collisionUser: el('form-collision-user').value,
    };
}
function renderFieldErrors(model) {
    const errors = validateForm(model);
    for (const field of ['startDate', 'startTime', 'intervalS', 'collisionDistanceM', 'collisionIntervalS']) {
        const msg = errors.find((e) => e.field === field)?.message ?? '';
        el(`err-${field}`).textContent = msg;
    }
    return errors.length === 0;
}
function wireAnalysisForm() {
    el('run-btn').addEventListener('click', () => guarded(async () => {
        if (!state.dataset)
            return;
        const model = readForm();
        if (!renderFieldErrors(model))
            return;
        if (!model.collisionUser) {
            el('err-collisionUser').textContent = 'choose an index case';
            return; // request not sent without an index user
        }
        el('err-collisionUser').textContent = '';
        const plan = buildSubmission(model);
        const status = el('run-status');
        status.textContent = 'running…';
        const run = await api.createAnalysis(state.dataset.dataset_id, plan.analysisBody);
        const done = await api.waitForAnalysis(run.run_id);
        state.runId = done.run_id;
        state.indexUser = plan.traceQuery.index_user;
        status.textContent = `done: ${done.n_events} events`;
        const [geojson, levels, report, scores, common] = await Promise.all([
            api.getGeojson(state.dataset.dataset_id, done.run_id, state.indexUser),
            api.getLevels(done.run_id, state.indexUser),
            api.getReport(done.run_id, state.indexUser),
            api.getScores(done.run_id, state.indexUser),
            api.getCommonLocations(state.dataset.dataset_id),
        ]);
        state.geojson = geojson;
        state.levels = levels;
        state.report = report;
        state.scores = scores;
        state.commonCells = common.cells;
        renderMap();
        renderTable();
        renderScores();
    }));
    el('level-filter').addEventListener('change', (ev) => {
        const value = ev.target.value;
        state.levelFilter = value === '' ? null : Number(value);
        renderMap();
    });
    el('cells-toggle').addEventListener('change', (ev) => {
        state.showCells = ev.target.checked;
        renderMap();
    });
}
// -- map + table -------------------------------------------------------------
function renderMap() {
    const host = el('map-host');
    if (!state.geojson) {
        host.innerHTML = '<p class="empty-state">upload a dataset and run an analysis to see the map</p>';
        return;
    }
    host.innerHTML = renderMapSvg(buildMapView(state.geojson, state.levelFilter, undefined, undefined, state.showCells ? state.commonCells : []));
}
function renderTable() {
    const host = el('table-host');
    host.innerHTML = renderTableHtml(buildTableView(state.report?.rows ?? []));
    host.querySelectorAll('tr[data-user]').forEach((row) => {
        row.addEventListener('click', () => {
            host.querySelectorAll('tr.selected').forEach((r) => r.classList.remove('selected'));
            row.classList.add('selected');
            panMapTo(Number(row.getAttribute('data-lat')), Number(row.getAttribute('data-lon')));
        });
    });
}
function panMapTo(lat, lon) {
    if (!state.geojson)
        return;
    const vm = buildMapView(state.geojson, state.levelFilter, undefined, undefined, state.showCells ? state.commonCells : []);
    const host = el('map-host');
    host.innerHTML = renderMapSvg(vm);
    // the clicked report row carries the event midpoint; find that contact
    // point in the geojson and ring the corresponding marker
    const match = state.geojson.features.find((f) => f.geometry.type === 'Point' &&
        Math.abs(f.geometry.coordinates[1] - lat) < 1e-4 &&
        Math.abs(f.geometry.coordinates[0] - lon) < 1e-4);
    const svg = host.querySelector('svg');
    if (!svg || !match || match.geometry.type !== 'Point')
        return;
    const tStart = match.properties.t_start;
    const marker = vm.markers.find((m) => m.tStart === tStart);
    if (!marker)
        return;
    const ring = document.createElementNS('http://www.w3.org/2000/svg', 'circle');
    ring.setAttribute('cx', marker.x.toFixed(1));
    ring.setAttribute('cy', marker.y.toFixed(1));
    ring.setAttribute('r', '12');
    ring.setAttribute('class', 'pan-ring');
    svg.appendChild(ring);
    ring.scrollIntoView({ block: 'center', inline: 'center' });
}
function renderScores() {
    const host = el('scores-host');
    const scores = state.scores?.scores ?? [];
    if (!scores.length) {
        host.innerHTML = '';
        return;
    }
    host.innerHTML =
        '<table class="scores-table"><tr><th>subject</th><th>kind</th><th>score</th><th>mean distance [m]</th></tr>' +
            scores
                .map((s) => `<tr><td>${s.subject}</td><td>${s.kind}</td><td>${s.value.toPrecision(6)}</td><td>${s.mean_distance_m.toFixed(3)}</td></tr>`)
                .join('') +
            '</table>';
}
// -- what-if panel --------------------------------------------------------------
function wireSimulation() {
    const slider = el('mu-slider');
    const muLabel = el('mu-value');
    slider.addEventListener('input', () => {
        muLabel.textContent = Number(slider.value).toFixed(2);
    });
    // simulate on commit (change), not on every drag tick
    slider.addEventListener('change', () => guarded(runSimulation));
    el('sim-model').addEventListener('change', () => guarded(runSimulation));
    el('sim-btn').addEventListener('click', () => guarded(runSimulation));
}
async function runSimulation() {
    const modelKind = el('sim-model').value;
    const mu = Number(el('mu-slider').value);
    const body = {
        params: {
            beta: Number(el('sim-beta').value),
            alpha: Number(el('sim-alpha').value),
            gamma: Number(el('sim-gamma').value),
            model_kind: modelKind,
            population_n: state.dataset?.n_users || 50,
        },
        initial: {
            s: Number(el('sim-s0').value),
            e: Number(el('sim-e0').value),
            i: Number(el('sim-i0').value),
            r: Number(el('sim-r0').value),
        },
        t_end_days: 180,
        mu_values: [mu],
    };
    const payload = await api.simulate(body);
    const run = payload.runs[0];
    if (!run)
        return;
    const vm = buildChartView(run, modelKind);
    el('chart-host').innerHTML = renderChartSvg(vm);
    el('readout-peak').textContent = `${vm.peakI.toFixed(4)} at day ${vm.peakTimeDays.toFixed(1)}`;
    el('readout-final').textContent = vm.finalR.toFixed(4);
}
// -- boot ------------------------------------------------------------------------
export function boot() {
    el('form-start-date').value = DEFAULT_FORM.startDate;
    el('form-start-time').value = DEFAULT_FORM.startTime;
    el('form-interval').value = String(DEFAULT_FORM.intervalS);
    el('form-distance').value = String(DEFAULT_FORM.collisionDistanceM);
    el('form-collision-interval').value = String(DEFAULT_FORM.collisionIntervalS);
    wireUpload();
    wireAnalysisForm();
    wireSimulation();
    renderMap();
}
if (typeof document !== 'undefined' && document.getElementById('map-host')) {
    boot();
}
