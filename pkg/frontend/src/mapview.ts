/**
 * Anomaly density map over the beam-location grid.
 *
 * Each cell is one beam location drawn at its grid coordinate, filled by a
 * two-color ramp whose mix parameter is density / (density + k), a
 * saturating map of the cell's own density. The parameter depends on no
 * other cell, so a cell's color is monotone in its server-reported density
 * both within one render and across renders: narrowing the energy filter
 * can only lower densities, hence never brightens a cell. An all-zero map
 * renders uniformly in the base color. Locations in the highlight set (the
 * brushed-range selection) get a ring.
 */

import { mixColor } from './format.js';
import type { MapCell, MapMode } from './types.js';

export interface MapOptions {
  width: number;
  height: number;
  onMode: (mode: MapMode) => void;
}

const BASE_RGB: [number, number, number] = [226, 232, 240];

/** Density at which a cell reaches half saturation. */
const HALF_SATURATION = 2;

const HOT_RGB: Record<MapMode, [number, number, number]> = {
  diffraction: [185, 28, 28],
  roughness: [76, 29, 149],
};

export class MapView {
  private readonly opts: MapOptions;
  private readonly svg: SVGSVGElement;
  private readonly legend: HTMLElement;
  private readonly buttons: Record<MapMode, HTMLButtonElement>;

  constructor(root: HTMLElement, opts: MapOptions) {
    this.opts = opts;
    root.classList.add('map-view');

    const toolbar = document.createElement('div');
    toolbar.className = 'toolbar';
    const make = (mode: MapMode, label: string): HTMLButtonElement => {
      const button = document.createElement('button');
      button.className = `mode-${mode}`;
      button.textContent = label;
      button.addEventListener('click', () => this.opts.onMode(mode));
      toolbar.appendChild(button);
      return button;
    };
    this.buttons = {
      diffraction: make('diffraction', 'Diffraction'),
      roughness: make('roughness', 'Roughness'),
    };
    this.legend = document.createElement('span');
    this.legend.className = 'map-legend';
    toolbar.appendChild(this.legend);
    root.appendChild(toolbar);

    this.svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
    this.svg.setAttribute('viewBox', `0 0 ${opts.width} ${opts.height}`);
    this.svg.setAttribute('width', '100%');
    this.svg.classList.add('map-svg');
    root.appendChild(this.svg);
  }

  render(cells: MapCell[], highlights: number[], mode: MapMode): void {
    for (const m of Object.keys(this.buttons) as MapMode[]) {
      this.buttons[m].classList.toggle('active', m === mode);
    }

    const maxDensity = Math.max(0, ...cells.map((c) => c.density));
    this.legend.textContent =
      maxDensity > 0 ? `max density ${maxDensity}` : 'no density';

    const cols = Math.max(...cells.map((c) => c.x), 0) + 1;
    const rows = Math.max(...cells.map((c) => c.y), 0) + 1;
    const size = Math.min(this.opts.width / cols, this.opts.height / rows);
    const gap = Math.min(3, size * 0.08);
    const lit = new Set(highlights);

    this.svg.innerHTML = cells
      .map((cell) => {
        const t = cell.density / (cell.density + HALF_SATURATION);
        const fill = mixColor(BASE_RGB, HOT_RGB[mode], t);
        const hl = lit.has(cell.location_id) ? ' hl' : '';
        return (
          `<rect class="cell${hl}" x="${(cell.x * size + gap).toFixed(2)}" ` +
          `y="${(cell.y * size + gap).toFixed(2)}" ` +
          `width="${(size - 2 * gap).toFixed(2)}" height="${(size - 2 * gap).toFixed(2)}" ` +
          `fill="${fill}" data-location="${cell.location_id}" ` +
          `data-density="${cell.density}" data-intensity="${t.toFixed(6)}">` +
          `<title>location ${cell.location_id}: ${cell.density}</title></rect>`
        );
      })
      .join('');
  }
}
