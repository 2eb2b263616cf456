/**
 * Dual-detector spectrum chart with the candidate window shaded.
 *
 * Plots both detectors' counts against calibrated energy. When the charted
 * spectrum carries a window (the service includes one when the request
 * names a peak), the window's channel span is shaded so the reviewer sees
 * exactly which slice of the spectrum the score came from.
 */

import { formatKev, linearScale } from './format.js';
import type { SpectrumResponse } from './types.js';

export interface SpectrumOptions {
  width: number;
  height: number;
}

export class SpectrumView {
  private readonly opts: SpectrumOptions;
  private readonly svg: SVGSVGElement;
  private readonly caption: HTMLElement;

  constructor(root: HTMLElement, opts: SpectrumOptions) {
    this.opts = opts;
    root.classList.add('spectrum');

    this.caption = document.createElement('div');
    this.caption.className = 'spectrum-caption';
    this.caption.textContent = 'Select a peak to chart its spectrum.';
    root.appendChild(this.caption);

    this.svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
    this.svg.setAttribute('viewBox', `0 0 ${opts.width} ${opts.height}`);
    this.svg.setAttribute('width', '100%');
    this.svg.classList.add('spectrum-svg');
    root.appendChild(this.svg);
  }

  render(resp: SpectrumResponse | null): void {
    if (resp === null) {
      this.caption.textContent = 'Select a peak to chart its spectrum.';
      this.svg.innerHTML = '';
      return;
    }

    const { width, height } = this.opts;
    const n = resp.a.length;
    const { offset_kev: off, gain_kev_per_channel: gain } = resp.calibration;
    const x = linearScale(0, n - 1, 0, width);
    const maxCount = Math.max(1, ...resp.a, ...resp.b);
    const axisH = 14;
    const plotH = height - axisH;
    const y = linearScale(0, maxCount, plotH, 2);

    const trace = (counts: number[]): string =>
      counts.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`).join(' ');

    const parts: string[] = [];
    if (resp.window) {
      const { lo_channel: lo, hi_channel: hi, center_channel: center } = resp.window;
      parts.push(
        `<rect class="window-shade" x="${x(lo).toFixed(2)}" y="0" ` +
          `width="${(x(hi) - x(lo)).toFixed(2)}" height="${plotH}" ` +
          `data-lo="${lo}" data-hi="${hi}" data-center="${center}"></rect>`,
      );
    }
    parts.push(
      `<polyline class="trace-a" points="${trace(resp.a)}" fill="none"></polyline>`,
      `<polyline class="trace-b" points="${trace(resp.b)}" fill="none"></polyline>`,
      `<line class="axis" x1="0" y1="${plotH}" x2="${width}" y2="${plotH}"></line>`,
      `<text class="axis-label" x="2" y="${height - 3}">${formatKev(off)}</text>`,
      `<text class="axis-label" x="${width - 2}" y="${height - 3}" text-anchor="end">` +
        `${formatKev(off + gain * (n - 1))} keV</text>`,
    );
    this.svg.innerHTML = parts.join('');

    const windowNote = resp.window
      ? `, window ${resp.window.lo_channel}–${resp.window.hi_channel} ` +
        `around ${formatKev(off + gain * resp.window.center_channel)} keV`
      : '';
    this.caption.textContent =
      `Location ${resp.location_id} at (${resp.x}, ${resp.y})` +
      `${windowNote}. Detector A in blue, B in amber.`;
  }
}
