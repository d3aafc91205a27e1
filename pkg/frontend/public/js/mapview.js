// GeoJSON -> SVG view model. Pure: geometry in, pixel-space polylines
// and markers out, so rendering is a dumb template and everything is
// unit-testable. Longitude/latitude are projected with a plain
// equirectangular fit into the viewport (tracks span a campus, not a
// hemisphere).
function fitProjection(coords, width, height, pad) {
    let minLon = Infinity;
    let maxLon = -Infinity;
    let minLat = Infinity;
    let maxLat = -Infinity;
    for (const [lon, lat] of coords) {
        minLon = Math.min(minLon, lon);
        maxLon = Math.max(maxLon, lon);
        minLat = Math.min(minLat, lat);
        maxLat = Math.max(maxLat, lat);
    }
    const spanLon = Math.max(maxLon - minLon, 1e-9);
    const spanLat = Math.max(maxLat - minLat, 1e-9);
    const scale = Math.min((width - 2 * pad) / spanLon, (height - 2 * pad) / spanLat);
    return {
        x: (lon) => pad + (lon - minLon) * scale,
        y: (lat) => height - pad - (lat - minLat) * scale, // north up
    };
}
/**
 * Build the map view model. ``levelFilter`` keeps only contact markers
 * of that level (null = all); tracks are never filtered.
 * ``commonCells``, when given, become a rectangle overlay layer.
 */
export function buildMapView(doc, levelFilter = null, width = 860, height = 640, commonCells = []) {
    const allCoords = [];
    for (const f of doc.features) {
        if (f.geometry.type === 'LineString')
            allCoords.push(...f.geometry.coordinates);
        else
            allCoords.push(f.geometry.coordinates);
    }
    if (allCoords.length === 0) {
        return { width, height, tracks: [], markers: [], cells: [], empty: true };
    }
    const proj = fitProjection(allCoords, width, height, 24);
    const cells = commonCells.map((c) => {
        const [latMin, lonMin, latMax, lonMax] = c.bounds;
        const x0 = proj.x(lonMin);
        const y0 = proj.y(latMax); // north edge is the smaller y
        return {
            label: c.label,
            x: x0,
            y: y0,
            w: Math.max(proj.x(lonMax) - x0, 2),
            h: Math.max(proj.y(latMin) - y0, 2),
            visitors: c.visitors.length,
        };
    });
    const tracks = [];
    const markers = [];
    for (const f of doc.features) {
        if (f.geometry.type === 'LineString' && f.properties.kind === 'track') {
            const points = f.geometry.coordinates.map(([lon, lat]) => [proj.x(lon), proj.y(lat)]);
            const path = points.map(([x, y], k) => `${k === 0 ? 'M' : 'L'}${x.toFixed(1)} ${y.toFixed(1)}`).join(' ');
            tracks.push({ userId: f.properties.user_id, path, points });
        }
        else if (f.geometry.type === 'Point' && f.properties.kind === 'contact') {
            const props = f.properties;
            const level = props.level ?? null;
            if (levelFilter !== null && level !== levelFilter)
                continue;
            const [lon, lat] = f.geometry.coordinates;
            markers.push({
                x: proj.x(lon),
                y: proj.y(lat),
                userA: props.user_a,
                userB: props.user_b,
                tStart: props.t_start,
                minDistanceM: props.min_distance_m,
                level,
                label: `${props.user_a} × ${props.user_b} @ ${props.t_start}` + (level !== null ? ` (level ${level})` : ''),
            });
        }
    }
    tracks.sort((a, b) => a.userId.localeCompare(b.userId));
    return { width, height, tracks, markers, cells, empty: false };
}
const LEVEL_COLORS = { 1: '#d62728', 2: '#ff7f0e', 3: '#e6b800' };
const TRACK_COLORS = ['#1f77b4', '#2ca02c', '#9467bd', '#8c564b', '#17becf', '#7f7f7f', '#bcbd22', '#ff7f0e'];
/** Render the view model as an SVG string. */
export function renderMapSvg(vm) {
    if (vm.empty) {
        return `<svg viewBox="0 0 ${vm.width} ${vm.height}" class="map-svg"><text x="50%" y="50%" text-anchor="middle" class="empty-state">no location data in this dataset</text></svg>`;
    }
    const parts = [`<svg viewBox="0 0 ${vm.width} ${vm.height}" class="map-svg">`];
    for (const c of vm.cells) {
        parts.push(`<rect class="common-cell" x="${c.x.toFixed(1)}" y="${c.y.toFixed(1)}" width="${c.w.toFixed(1)}" height="${c.h.toFixed(1)}" fill="#9467bd" fill-opacity="0.25" stroke="#9467bd"><title>${c.label}: ${c.visitors} visitors</title></rect>`);
    }
    vm.tracks.forEach((t, k) => {
        const color = TRACK_COLORS[k % TRACK_COLORS.length];
        parts.push(`<path class="track" data-user="${t.userId}" d="${t.path}" fill="none" stroke="${color}" stroke-width="1.4"><title>${t.userId}</title></path>`);
    });
    for (const m of vm.markers) {
        const color = m.level !== null ? (LEVEL_COLORS[m.level] ?? '#d62728') : '#d62728';
        parts.push(`<g class="contact-marker" data-level="${m.level ?? ''}"><circle cx="${m.x.toFixed(1)}" cy="${m.y.toFixed(1)}" r="6" fill="${color}" fill-opacity="0.85" stroke="#222"/><title>${m.label}</title></g>`);
    }
    parts.push('</svg>');
    return parts.join('');
}
