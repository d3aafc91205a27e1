import { readFileSync } from 'node:fs';
import { describe, expect, it } from 'vitest';

import { RESULT_COLUMNS, buildTableView, renderTableHtml } from '../src/tableview.js';
import type { Envelope, ReportPayload, ReportRow } from '../src/types.js';

const recorded = JSON.parse(
  readFileSync('tests/fixtures/report.json', 'utf8'),
) as Envelope<ReportPayload>;

function row(user: string, level: number, time = '09:00:00'): ReportRow {
  return {
    user_id: user,
    date: '2022-04-14',
    time,
    latitude: 2.993405,
    longitude: 101.707,
    visited_location: 'r0c0',
    contact_level: level,
  };
}

describe('screening table view model', () => {
  it('exposes exactly the six result columns', () => {
    expect([...RESULT_COLUMNS]).toEqual([
      'date',
      'time',
      'latitude',
      'longitude',
      'visited_location',
      'contact_level',
    ]);
  });

  it('groups the recorded report by level in API order', () => {
    const vm = buildTableView(recorded.data.rows);
    expect(vm.totalRows).toBe(recorded.data.rows.length);
    const flattened = vm.groups.flatMap((g) => g.rows);
    expect(flattened).toEqual(recorded.data.rows); // never re-ranked
  });

  it('three-level input produces three groups in order', () => {
    const rows = [row('A', 1), row('B', 1, '10:00:00'), row('C', 2), row('D', 3)];
    const vm = buildTableView(rows);
    expect(vm.groups.map((g) => g.level)).toEqual([1, 2, 3]);
    expect(vm.groups[0]!.rows).toHaveLength(2);
  });

  it('empty report renders guidance text', () => {
    const vm = buildTableView([]);
    expect(vm.empty).toBe(true);
    expect(renderTableHtml(vm)).toContain('no contacts found');
  });
});

describe('table rendering', () => {
  it('renders grouped tbodies with six columns per row', () => {
    const rows = [row('A', 1), row('C', 2), row('D', 3)];
    document.body.innerHTML = renderTableHtml(buildTableView(rows));
    expect(document.querySelectorAll('tbody.level-group')).toHaveLength(3);
    const firstDataRow = document.querySelector('tr[data-user]')!;
    expect(firstDataRow.querySelectorAll('td')).toHaveLength(6);
  });

  it('rows carry coordinates for map panning', () => {
    document.body.innerHTML = renderTableHtml(buildTableView([row('A', 1)]));
    const tr = document.querySelector('tr[data-user]')!;
    expect(tr.getAttribute('data-lat')).toBe('2.993405');
    expect(tr.getAttribute('data-lon')).toBe('101.707');
  });

  it('cell text comes verbatim from the payload fields', () => {
    const rows = recorded.data.rows;
    document.body.innerHTML = renderTableHtml(buildTableView(rows));
    const tds = document.querySelector('tr[data-user]')!.querySelectorAll('td');
    expect(tds[0]!.textContent).toBe(rows[0]!.date);
    expect(tds[1]!.textContent).toBe(rows[0]!.time);
    expect(Number(tds[2]!.textContent)).toBeCloseTo(rows[0]!.latitude, 6);
    expect(tds[4]!.textContent).toBe(rows[0]!.visited_location);
    expect(tds[5]!.textContent).toBe(String(rows[0]!.contact_level));
  });
});
