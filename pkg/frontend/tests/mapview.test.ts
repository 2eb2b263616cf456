/**
 * Density map rendering: monotone color ramp, uniform zero map, highlight
 * rings, mode toggle, and the narrowing passthrough against the live
 * service.
 */

import { describe, expect, it, vi } from 'vitest';
import { MapView } from '../src/mapview.js';
import type { MapCell } from '../src/types.js';
import { api, mount } from './helpers.js';

function makeView(onMode = vi.fn()) {
  const root = mount();
  const view = new MapView(root, { width: 380, height: 380, onMode });
  return { root, view, onMode };
}

function grid(densities: number[]): MapCell[] {
  return densities.map((d, i) => ({
    location_id: i,
    x: i % 2,
    y: Math.floor(i / 2),
    density: d,
  }));
}

function cellAttrs(root: HTMLElement): { density: number; intensity: number; fill: string }[] {
  return Array.from(root.querySelectorAll('rect.cell')).map((el) => {
    const cell = el as HTMLElement;
    return {
      density: Number(cell.dataset['density']),
      intensity: Number(cell.dataset['intensity']),
      fill: cell.getAttribute('fill') ?? '',
    };
  });
}

describe('color ramp', () => {
  it('an all-zero map renders uniformly in the base color', () => {
    const { root, view } = makeView();
    view.render(grid([0, 0, 0, 0]), [], 'diffraction');
    const attrs = cellAttrs(root);
    expect(attrs).toHaveLength(4);
    expect(new Set(attrs.map((a) => a.fill)).size).toBe(1);
    expect(attrs[0]!.fill).toBe('rgb(226, 232, 240)');
    expect(root.textContent).toContain('no density');
  });

  it('cell intensity is strictly monotone in density', () => {
    const { root, view } = makeView();
    view.render(grid([0, 1, 2, 5]), [], 'diffraction');
    const attrs = cellAttrs(root);
    for (let i = 1; i < attrs.length; i += 1) {
      expect(attrs[i]!.intensity).toBeGreaterThan(attrs[i - 1]!.intensity);
    }
    // The green channel moves from base 232 toward hot 28, so it must
    // strictly decrease as density grows.
    const greens = attrs.map((a) => Number(/rgb\(\d+, (\d+), \d+\)/.exec(a.fill)![1]));
    for (let i = 1; i < greens.length; i += 1) {
      expect(greens[i]!).toBeLessThan(greens[i - 1]!);
    }
  });

  it('equal densities get equal colors regardless of neighbors', () => {
    const { root: r1, view: v1 } = makeView();
    v1.render(grid([1, 9, 0, 0]), [], 'diffraction');
    const { root: r2, view: v2 } = makeView();
    v2.render(grid([1, 0, 0, 0]), [], 'diffraction');
    expect(cellAttrs(r1)[0]!.fill).toBe(cellAttrs(r2)[0]!.fill);
  });
});

describe('highlights and modes', () => {
  it('rings exactly the highlighted locations', () => {
    const { root, view } = makeView();
    view.render(grid([0, 1, 2, 0]), [1, 3], 'diffraction');
    const ringed = Array.from(root.querySelectorAll('rect.cell.hl')).map((el) =>
      Number((el as HTMLElement).dataset['location']),
    );
    expect(ringed).toEqual([1, 3]);
  });

  it('mode buttons report clicks and mark the active mode', () => {
    const { root, view, onMode } = makeView();
    view.render(grid([0, 0, 0, 0]), [], 'roughness');
    const active = root.querySelector('.toolbar button.active')!;
    expect(active.className).toContain('mode-roughness');
    (root.querySelector('.toolbar button.mode-diffraction') as HTMLElement).click();
    expect(onMode).toHaveBeenCalledWith('diffraction');
  });
});

describe('narrowing passthrough (live)', () => {
  it('narrowing the energy range never brightens a cell', async () => {
    const full = await api().map('diffraction');
    const narrow = await api().map('diffraction', [10.0, 10.3]);
    const fullByLoc = new Map(full.cells.map((c) => [c.location_id, c.density]));
    for (const cell of narrow.cells) {
      expect(cell.density).toBeLessThanOrEqual(fullByLoc.get(cell.location_id)!);
    }

    const a = makeView();
    a.view.render(full.cells, [], 'diffraction');
    const b = makeView();
    b.view.render(narrow.cells, [], 'diffraction');
    const fullAttrs = cellAttrs(a.root);
    const narrowAttrs = cellAttrs(b.root);
    for (let i = 0; i < narrowAttrs.length; i += 1) {
      expect(narrowAttrs[i]!.intensity).toBeLessThanOrEqual(fullAttrs[i]!.intensity);
    }
  });
});
