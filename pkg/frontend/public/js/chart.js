// Epidemic chart view model: API simulation states -> SVG polylines.
// Values pass through untouched (scaled only to pixels); the console
// does no integration of its own.
export const COMPARTMENTS = [
    { key: 's', label: 'susceptible', color: '#1f77b4' },
    { key: 'e', label: 'exposed', color: '#ff7f0e' },
    { key: 'i', label: 'infectious', color: '#d62728' },
    { key: 'r', label: 'recovered', color: '#2ca02c' },
];
/** Max-minus-min of a rendered series; a frozen compartment stays at 0. */
export function seriesSpread(values) {
    return values.length ? Math.max(...values) - Math.min(...values) : 0;
}
export function buildChartView(run, modelKind = 'SEIR', width = 720, height = 420) {
    const pad = 34;
    const states = run.states;
    const tMax = states.length ? states[states.length - 1].t : 1;
    const x = (t) => pad + (t / Math.max(tMax, 1e-9)) * (width - 2 * pad);
    const y = (v) => height - pad - v * (height - 2 * pad);
    const lines = [];
    for (const c of COMPARTMENTS) {
        if (c.key === 'e' && modelKind === 'SIR')
            continue;
        const values = states.map((st) => st[c.key]);
        const points = states.map((st, k) => `${x(st.t).toFixed(1)},${y(values[k]).toFixed(1)}`).join(' ');
        lines.push({ key: c.key, label: c.label, color: c.color, points, values });
    }
    return {
        width,
        height,
        lines,
        tMax,
        peakI: run.summary.peak_i,
        peakTimeDays: run.summary.peak_time_days,
        finalR: run.summary.final_r,
    };
}
export function renderChartSvg(vm) {
    const parts = [`<svg viewBox="0 0 ${vm.width} ${vm.height}" class="chart-svg">`];
    parts.push(`<line x1="34" y1="${vm.height - 34}" x2="${vm.width - 34}" y2="${vm.height - 34}" stroke="#999"/>`, `<line x1="34" y1="34" x2="34" y2="${vm.height - 34}" stroke="#999"/>`);
    for (const line of vm.lines) {
        parts.push(`<polyline class="series series-${line.key}" fill="none" stroke="${line.color}" stroke-width="1.8" points="${line.points}"><title>${line.label}</title></polyline>`);
    }
    parts.push('</svg>');
    return parts.join('');
}
