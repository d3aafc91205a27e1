// Screening-table view model: the six result columns, grouped by
// contact level in the order the API returned them (the backend sorts
// by screening priority; the console must not re-rank).

import type { ReportRow } from './types.js';

export const RESULT_COLUMNS = ['date', 'time', 'latitude', 'longitude', 'visited_location', 'contact_level'] as const;

export interface LevelGroup {
  level: number;
  rows: ReportRow[];
}

export interface TableViewModel {
  groups: LevelGroup[];
  totalRows: number;
  empty: boolean;
}

export function buildTableView(rows: ReportRow[]): TableViewModel {
  const groups: LevelGroup[] = [];
  for (const row of rows) {
    const last = groups[groups.length - 1];
    if (last && last.level === row.contact_level) {
      last.rows.push(row);
    } else {
      groups.push({ level: row.contact_level, rows: [row] });
    }
  }
  return { groups, totalRows: rows.length, empty: rows.length === 0 };
}

function cell(row: ReportRow, column: (typeof RESULT_COLUMNS)[number]): string {
  const value = row[column];
  return typeof value === 'number' && !Number.isInteger(value) ? value.toFixed(6) : String(value);
}

/** Render the grouped table; rows carry data-user for map panning. */
export function renderTableHtml(vm: TableViewModel): string {
  if (vm.empty) {
    return '<p class="empty-state">no contacts found for this index user — widen the collision distance or interval to check sensitivity</p>';
  }
  const head = `<tr>${RESULT_COLUMNS.map((c) => `<th>${c.replace(/_/g, ' ')}</th>`).join('')}</tr>`;
  const bodies = vm.groups
    .map((g) => {
      const rows = g.rows
        .map(
          (r) =>
            `<tr class="level-${g.level}" data-user="${r.user_id}" data-lat="${r.latitude}" data-lon="${r.longitude}">` +
            RESULT_COLUMNS.map((c) => `<td>${cell(r, c)}</td>`).join('') +
            '</tr>',
        )
        .join('');
      return `<tbody class="level-group" data-level="${g.level}"><tr class="group-header"><td colspan="${RESULT_COLUMNS.length}">Level ${g.level} — ${g.rows.length} contact${g.rows.length === 1 ? '' : 's'}</td></tr>${rows}</tbody>`;
    })
    .join('');
  return `<table class="result-table"><thead>${head}</thead>${bodies}</table>`;
}
