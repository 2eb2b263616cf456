/**
 * Sort/filter fidelity: for every sort key, both directions, and every
 * class filter, the rendered row order must equal the service's answer for
 * the same query. The fixture contains two peaks 0.008 keV apart at
 * different locations, so any client-side re-sorting that breaks the
 * server's tie order would be caught.
 */

import { beforeAll, describe, expect, it } from 'vitest';
import type { App } from '../src/app.js';
import type { AnomalyClass, SortKey, SortOrder } from '../src/types.js';
import { ANOMALY_CLASSES, SORT_KEYS } from '../src/types.js';
import { api, click, newApp, rowKeys, waitFor } from './helpers.js';

let app: App;
let root: HTMLElement;

beforeAll(async () => {
  ({ app, root } = await newApp());
});

/** Click the column header until the panel is at (key, order). */
async function sortTo(key: SortKey, order: SortOrder): Promise<void> {
  const th = root.querySelector(`th[data-sort="${key}"]`);
  if (!th) throw new Error(`no sortable header for ${key}`);
  for (let i = 0; i < 3; i += 1) {
    const panel = app.store.getState().panel;
    if (panel.sortKey === key && panel.sortOrder === order) return;
    click(th);
  }
  const panel = app.store.getState().panel;
  expect([panel.sortKey, panel.sortOrder]).toEqual([key, order]);
}

async function setFilter(cls: AnomalyClass | null): Promise<void> {
  const select = root.querySelector('select.class-filter') as HTMLSelectElement;
  select.value = cls ?? '';
  select.dispatchEvent(new Event('change', { bubbles: true }));
}

describe('list order matches the server for every sort key', () => {
  const cases: [SortKey, SortOrder][] = SORT_KEYS.flatMap((key) => [
    [key, 'desc'] as [SortKey, SortOrder],
    [key, 'asc'] as [SortKey, SortOrder],
  ]);

  it.each(cases)('%s %s', async (key, order) => {
    await setFilter(null);
    await sortTo(key, order);
    const expected = (await api().peaks({ sort: key, order })).peaks.map((p) => p.key);
    await waitFor(
      () => JSON.stringify(rowKeys(root)) === JSON.stringify(expected),
      `rows sorted by ${key} ${order}`,
    );
    expect(rowKeys(root)).toEqual(expected);
  });
});

describe('class filter matches the server', () => {
  const filters: (AnomalyClass | null)[] = [null, ...ANOMALY_CLASSES];

  it.each(filters.map((f) => [f ?? 'All'] as [string]))('%s', async (label) => {
    const cls = label === 'All' ? null : (label as AnomalyClass);
    await sortTo('t_abs', 'desc');
    await setFilter(cls);
    const query = cls === null ? {} : { cls };
    const expected = (
      await api().peaks({ sort: 't_abs', order: 'desc', ...query })
    ).peaks.map((p) => p.key);
    await waitFor(
      () => JSON.stringify(rowKeys(root)) === JSON.stringify(expected),
      `rows filtered to ${label}`,
    );
    expect(rowKeys(root)).toEqual(expected);
    if (cls !== null) {
      const classes = Array.from(root.querySelectorAll('tbody tr td:nth-child(5)')).map(
        (td) => td.textContent,
      );
      expect(classes.every((c) => c === cls)).toBe(true);
    }
  });

  it('filter and sort combine: ascending energy over Diffraction only', async () => {
    await setFilter('Diffraction');
    await sortTo('energy', 'asc');
    const expected = (
      await api().peaks({ sort: 'energy', order: 'asc', cls: 'Diffraction' })
    ).peaks.map((p) => p.key);
    await waitFor(
      () => JSON.stringify(rowKeys(root)) === JSON.stringify(expected),
      'diffraction rows by ascending energy',
    );
    expect(rowKeys(root)).toEqual(expected);
  });
});
