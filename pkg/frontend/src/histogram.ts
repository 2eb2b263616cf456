/**
 * Brushable energy histogram.
 *
 * Bars come straight from GET /histogram. A horizontal drag brushes an
 * energy range; shift-drag adds another range on top of the existing ones;
 * a plain click clears every brush. The component reports the resulting
 * range list through onBrush and draws whatever ranges it is next rendered
 * with, so the store stays the single source of truth.
 */

import { formatKev, formatRange, linearScale } from './format.js';
import type { EnergyRange, HistogramBin } from './types.js';

/** Maximum pointer travel in px that still counts as a click. */
const CLICK_SLOP_PX = 3;

/** Fallback domain when the histogram has no bins yet (keV). */
const EMPTY_DOMAIN: EnergyRange = [0, 32];

export interface HistogramOptions {
  width: number;
  height: number;
  onBrush: (ranges: EnergyRange[]) => void;
}

interface DragState {
  startX: number;
  lastX: number;
  additive: boolean;
}

export class HistogramView {
  private readonly root: HTMLElement;
  private readonly opts: HistogramOptions;
  private readonly svg: SVGSVGElement;
  private readonly chips: HTMLElement;

  private domainLo = EMPTY_DOMAIN[0];
  private domainHi = EMPTY_DOMAIN[1];
  private ranges: EnergyRange[] = [];
  private drag: DragState | null = null;

  constructor(root: HTMLElement, opts: HistogramOptions) {
    this.root = root;
    this.opts = opts;
    root.classList.add('histogram');

    this.svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
    this.svg.setAttribute('viewBox', `0 0 ${opts.width} ${opts.height}`);
    this.svg.setAttribute('width', '100%');
    this.svg.classList.add('histogram-svg');
    root.appendChild(this.svg);

    this.chips = document.createElement('div');
    this.chips.className = 'range-chips';
    root.appendChild(this.chips);

    this.svg.addEventListener('mousedown', (ev) => this.onDown(ev as MouseEvent));
    this.svg.addEventListener('mousemove', (ev) => this.onMove(ev as MouseEvent));
    this.svg.addEventListener('mouseup', (ev) => this.onUp(ev as MouseEvent));
    this.svg.addEventListener('mouseleave', () => this.cancelDrag());
  }

  domain(): EnergyRange {
    return [this.domainLo, this.domainHi];
  }

  /** Energy at an x position in the SVG's own pixel space. */
  energyAt(px: number): number {
    return linearScale(0, this.opts.width, this.domainLo, this.domainHi)(px);
  }

  /**
   * Commit a brush between two pixel positions. Exposed for tests and used
   * by the mouse handlers; the range is the exact [keV(lo), keV(hi)] pair
   * later sent verbatim to the service.
   */
  brushPixels(x0: number, x1: number, additive: boolean): void {
    const lo = this.energyAt(Math.min(x0, x1));
    const hi = this.energyAt(Math.max(x0, x1));
    if (!(lo < hi)) return;
    const next: EnergyRange[] = additive ? [...this.ranges, [lo, hi]] : [[lo, hi]];
    this.opts.onBrush(next);
  }

  clear(): void {
    this.opts.onBrush([]);
  }

  removeRange(index: number): void {
    this.opts.onBrush(this.ranges.filter((_, i) => i !== index));
  }

  render(bins: HistogramBin[], ranges: EnergyRange[]): void {
    this.ranges = ranges.map(([lo, hi]) => [lo, hi]);
    if (bins.length > 0) {
      this.domainLo = Math.min(...bins.map((b) => b.lower_kev));
      this.domainHi = Math.max(...bins.map((b) => b.upper_kev));
    } else {
      [this.domainLo, this.domainHi] = EMPTY_DOMAIN;
    }

    const { width, height } = this.opts;
    const x = linearScale(this.domainLo, this.domainHi, 0, width);
    const maxCount = Math.max(1, ...bins.map((b) => b.count));
    const axisH = 14;
    const plotH = height - axisH;
    const parts: string[] = [];

    for (const bin of bins) {
      const bx = x(bin.lower_kev);
      const bw = Math.max(1, x(bin.upper_kev) - bx - 0.5);
      const bh = (bin.count / maxCount) * (plotH - 2);
      parts.push(
        `<rect class="bar" x="${bx.toFixed(2)}" y="${(plotH - bh).toFixed(2)}" ` +
          `width="${bw.toFixed(2)}" height="${bh.toFixed(2)}" ` +
          `data-count="${bin.count}" data-lo="${bin.lower_kev}" data-hi="${bin.upper_kev}"></rect>`,
      );
    }
    for (const [lo, hi] of this.ranges) {
      const bx = x(lo);
      const bw = Math.max(1, x(hi) - bx);
      parts.push(
        `<rect class="brush" x="${bx.toFixed(2)}" y="0" width="${bw.toFixed(2)}" ` +
          `height="${plotH}" data-lo="${lo}" data-hi="${hi}"></rect>`,
      );
    }
    parts.push(
      `<line class="axis" x1="0" y1="${plotH}" x2="${width}" y2="${plotH}"></line>`,
      `<text class="axis-label" x="2" y="${height - 3}">${formatKev(this.domainLo)}</text>`,
      `<text class="axis-label" x="${width - 2}" y="${height - 3}" text-anchor="end">` +
        `${formatKev(this.domainHi)} keV</text>`,
    );
    this.svg.innerHTML = parts.join('');

    this.chips.innerHTML = '';
    this.ranges.forEach((range, i) => {
      const chip = document.createElement('button');
      chip.className = 'chip';
      chip.dataset['index'] = String(i);
      chip.textContent = `${formatRange(range)} ×`;
      chip.addEventListener('click', () => this.removeRange(i));
      this.chips.appendChild(chip);
    });
  }

  private localX(ev: MouseEvent): number {
    const rect = this.svg.getBoundingClientRect();
    const shown = rect.width > 0 ? rect.width : this.opts.width;
    return ((ev.clientX - rect.left) / shown) * this.opts.width;
  }

  private onDown(ev: MouseEvent): void {
    const x = this.localX(ev);
    this.drag = { startX: x, lastX: x, additive: ev.shiftKey };
  }

  private onMove(ev: MouseEvent): void {
    if (this.drag) this.drag.lastX = this.localX(ev);
  }

  private onUp(ev: MouseEvent): void {
    if (!this.drag) return;
    const { startX, additive } = this.drag;
    const endX = this.localX(ev);
    this.drag = null;
    if (Math.abs(endX - startX) <= CLICK_SLOP_PX) {
      this.clear();
    } else {
      this.brushPixels(startX, endX, additive);
    }
  }

  private cancelDrag(): void {
    this.drag = null;
  }
}
