/**
 * Sortable, filterable peak table.
 *
 * Rows are rendered in exactly the order the service returned them; sort
 * and filter controls only change the query the app sends. The table never
 * reorders rows itself, so what the scientist sees is always the server's
 * answer for the active sort key and class filter.
 */

import { formatKev, formatT } from './format.js';
import type { PanelState } from './state.js';
import type { AnomalyClass, PeakRow, PeakStatus, SortKey } from './types.js';
import { ANOMALY_CLASSES } from './types.js';

export interface PeakListOptions {
  onSort: (key: SortKey) => void;
  onFilter: (cls: AnomalyClass | null) => void;
  onSelect: (peak: PeakRow) => void;
  onStatus: (peak: PeakRow, status: PeakStatus) => void;
}

const COLUMNS: { label: string; sort: SortKey | null }[] = [
  { label: 'Loc', sort: 'location_id' },
  { label: 'Channel', sort: null },
  { label: 'Energy (keV)', sort: 'energy' },
  { label: '|t|', sort: 't_abs' },
  { label: 'Class', sort: null },
  { label: 'Status', sort: null },
  { label: 'Review', sort: null },
];

const STATUS_BADGE: Record<PeakStatus, string> = {
  Unreviewed: 'unreviewed',
  ConfirmedDiffraction: 'confirmed',
  FalsePositive: 'false-positive',
};

export class PeakList {
  private readonly opts: PeakListOptions;
  private readonly filter: HTMLSelectElement;
  private readonly head: HTMLTableSectionElement;
  private readonly body: HTMLTableSectionElement;
  private readonly count: HTMLElement;
  private byKey = new Map<string, PeakRow>();

  constructor(root: HTMLElement, opts: PeakListOptions) {
    this.opts = opts;
    root.classList.add('peak-list');

    const toolbar = document.createElement('div');
    toolbar.className = 'toolbar';
    const label = document.createElement('label');
    label.textContent = 'Class ';
    this.filter = document.createElement('select');
    this.filter.className = 'class-filter';
    const all = document.createElement('option');
    all.value = '';
    all.textContent = 'All';
    this.filter.appendChild(all);
    for (const cls of ANOMALY_CLASSES) {
      const option = document.createElement('option');
      option.value = cls;
      option.textContent = cls;
      this.filter.appendChild(option);
    }
    this.filter.addEventListener('change', () => {
      const value = this.filter.value;
      this.opts.onFilter(value === '' ? null : (value as AnomalyClass));
    });
    label.appendChild(this.filter);
    this.count = document.createElement('span');
    this.count.className = 'peak-count';
    toolbar.append(label, this.count);
    root.appendChild(toolbar);

    const table = document.createElement('table');
    table.className = 'peaks';
    this.head = table.createTHead();
    const headRow = this.head.insertRow();
    for (const col of COLUMNS) {
      const th = document.createElement('th');
      th.textContent = col.label;
      if (col.sort) {
        th.dataset['sort'] = col.sort;
        th.classList.add('sortable');
        th.addEventListener('click', () => this.opts.onSort(col.sort as SortKey));
      }
      headRow.appendChild(th);
    }
    this.body = table.createTBody();
    this.body.addEventListener('click', (ev) => this.onBodyClick(ev as MouseEvent));
    root.appendChild(table);
  }

  render(peaks: PeakRow[], total: number, panel: PanelState): void {
    this.byKey = new Map(peaks.map((p) => [p.key, p]));
    this.filter.value = panel.classFilter ?? '';
    this.count.textContent = `${peaks.length} of ${total}`;

    for (const th of Array.from(this.head.querySelectorAll('th'))) {
      const key = th.dataset['sort'];
      const base = COLUMNS.find((c) => c.sort === key)?.label ?? th.textContent ?? '';
      if (!key) continue;
      if (key === panel.sortKey) {
        th.textContent = `${base} ${panel.sortOrder === 'desc' ? '▼' : '▲'}`;
        th.classList.add('sorted');
      } else {
        th.textContent = base;
        th.classList.remove('sorted');
      }
    }

    // Row order is the server's; do not sort here.
    this.body.innerHTML = peaks
      .map((p) => {
        const selected = p.key === panel.selectedPeak ? ' selected' : '';
        return (
          `<tr data-key="${p.key}" class="status-${STATUS_BADGE[p.status]}${selected}">` +
          `<td>${p.location_id}</td>` +
          `<td>${p.center_channel}</td>` +
          `<td>${formatKev(p.energy_kev)}</td>` +
          `<td>${formatT(p.t_abs)}</td>` +
          `<td>${p.class}</td>` +
          `<td><span class="badge ${STATUS_BADGE[p.status]}">${p.status}</span></td>` +
          `<td class="actions">` +
          `<button class="confirm" title="Confirm diffraction">✓</button>` +
          `<button class="reject" title="Mark false positive">✗</button>` +
          `</td></tr>`
        );
      })
      .join('');
  }

  private onBodyClick(ev: MouseEvent): void {
    const target = ev.target as HTMLElement;
    const row = target.closest('tr[data-key]') as HTMLElement | null;
    if (!row) return;
    const peak = this.byKey.get(row.dataset['key'] ?? '');
    if (!peak) return;
    if (target.closest('button.confirm')) {
      this.opts.onStatus(peak, 'ConfirmedDiffraction');
    } else if (target.closest('button.reject')) {
      this.opts.onStatus(peak, 'FalsePositive');
    } else {
      this.opts.onSelect(peak);
    }
  }
}
