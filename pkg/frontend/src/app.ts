/**
 * Page orchestration: one store, four components, eight routes.
 *
 * Every user gesture becomes a panel-state change plus the server requests
 * that state implies; every accepted response lands in the store and the
 * components re-render from it. Stale responses are dropped by per-endpoint
 * request tokens (last response wins). The single mutation, a peak status
 * change, is applied optimistically and rolled back if the service refuses
 * it; all other failures surface in the banner and leave state unchanged.
 */

import { ApiClient, ApiError, RequestGate } from './api.js';
import { HistogramView } from './histogram.js';
import { MapView } from './mapview.js';
import { PeakList } from './peaklist.js';
import { SpectrumView } from './spectrum.js';
import { Store, mapEnvelope, toggleSort } from './state.js';
import type {
  AnomalyClass,
  EnergyRange,
  MapMode,
  PeakRow,
  PeakStatus,
  SortKey,
} from './types.js';

const HISTOGRAM_SIZE = { width: 640, height: 120 };
const SPECTRUM_SIZE = { width: 640, height: 180 };
const MAP_SIZE = { width: 380, height: 380 };

export function errorMessage(err: unknown): string {
  if (err instanceof ApiError) return err.detail;
  if (err instanceof Error) return err.message;
  return String(err);
}

export interface AppOptions {
  /** Name recorded in the label journal for status changes. */
  labeler?: string;
}

export class App {
  readonly store = new Store();
  private readonly api: ApiClient;
  private readonly gate = new RequestGate();
  private readonly labeler: string | undefined;

  private readonly banner: HTMLElement;
  private readonly heading: HTMLElement;
  private readonly histogram: HistogramView;
  private readonly peakList: PeakList;
  private readonly spectrumView: SpectrumView;
  private readonly mapView: MapView;

  constructor(root: HTMLElement, api: ApiClient, opts: AppOptions = {}) {
    this.api = api;
    this.labeler = opts.labeler;

    root.classList.add('app');
    this.banner = document.createElement('div');
    this.banner.className = 'banner hidden';
    const dismiss = document.createElement('button');
    dismiss.className = 'dismiss';
    dismiss.textContent = '×';
    dismiss.addEventListener('click', () => this.store.setError(null));
    const bannerText = document.createElement('span');
    bannerText.className = 'banner-text';
    this.banner.append(bannerText, dismiss);
    root.appendChild(this.banner);

    this.heading = document.createElement('header');
    this.heading.className = 'heading';
    root.appendChild(this.heading);

    const layout = document.createElement('div');
    layout.className = 'layout';
    const panel = document.createElement('section');
    panel.className = 'panel';
    const mapSide = document.createElement('aside');
    mapSide.className = 'map-side';
    layout.append(panel, mapSide);
    root.appendChild(layout);

    const histogramRoot = document.createElement('div');
    const peaksRoot = document.createElement('div');
    const spectrumRoot = document.createElement('div');
    panel.append(histogramRoot, peaksRoot, spectrumRoot);
    const mapRoot = document.createElement('div');
    mapSide.appendChild(mapRoot);

    this.histogram = new HistogramView(histogramRoot, {
      ...HISTOGRAM_SIZE,
      onBrush: (ranges) => void this.handleBrush(ranges),
    });
    this.peakList = new PeakList(peaksRoot, {
      onSort: (key) => void this.handleSort(key),
      onFilter: (cls) => void this.handleFilter(cls),
      onSelect: (peak) => void this.handleSelect(peak),
      onStatus: (peak, status) => void this.handleStatus(peak, status),
    });
    this.spectrumView = new SpectrumView(spectrumRoot, SPECTRUM_SIZE);
    this.mapView = new MapView(mapRoot, {
      ...MAP_SIZE,
      onMode: (mode) => void this.handleMode(mode),
    });

    this.store.subscribe(() => this.render());
  }

  /** Initial population: info, list, histogram, map, empty selection. */
  async load(): Promise<void> {
    this.store.update((s) => ({ ...s, loading: true }));
    try {
      const info = await this.api.info();
      this.store.patchServer({ info });
    } catch (err) {
      this.store.setError(errorMessage(err));
    }
    await Promise.all([
      this.refreshPeaks(),
      this.refreshHistogram(),
      this.refreshSelection(),
      this.refreshMap(),
    ]);
    this.store.update((s) => ({ ...s, loading: false }));
  }

  // -- server refreshers -------------------------------------------------

  private async refreshPeaks(): Promise<void> {
    const token = this.gate.take('peaks');
    const { sortKey, sortOrder, classFilter } = this.store.getState().panel;
    try {
      const resp = await this.api.peaks({ sort: sortKey, order: sortOrder, cls: classFilter });
      if (!this.gate.isCurrent('peaks', token)) return;
      this.store.patchServer({ peaks: resp.peaks, peaksTotal: resp.total });
    } catch (err) {
      if (!this.gate.isCurrent('peaks', token)) return;
      this.store.setError(errorMessage(err));
    }
  }

  private async refreshHistogram(): Promise<void> {
    const token = this.gate.take('histogram');
    try {
      const resp = await this.api.histogram();
      if (!this.gate.isCurrent('histogram', token)) return;
      this.store.patchServer({ histogram: resp.bins, histogramBinWidth: resp.bin_width_kev });
    } catch (err) {
      if (!this.gate.isCurrent('histogram', token)) return;
      this.store.setError(errorMessage(err));
    }
  }

  /**
   * The highlight set is the service's answer for the brushed ranges,
   * never a local computation. The outcome distinguishes a superseded
   * request ('stale') so callers can stop their follow-up work.
   */
  private async refreshSelection(): Promise<'applied' | 'stale' | 'failed'> {
    const token = this.gate.take('select');
    const ranges = this.store.getState().panel.ranges;
    try {
      const resp = await this.api.select(ranges);
      if (!this.gate.isCurrent('select', token)) return 'stale';
      this.store.patchServer({ highlights: resp.location_ids });
      return 'applied';
    } catch (err) {
      if (!this.gate.isCurrent('select', token)) return 'stale';
      this.store.setError(errorMessage(err));
      return 'failed';
    }
  }

  private async refreshMap(): Promise<void> {
    const token = this.gate.take('map');
    const { mapMode, ranges } = this.store.getState().panel;
    const envelope = mapMode === 'diffraction' ? mapEnvelope(ranges) : undefined;
    try {
      const resp = await this.api.map(mapMode, envelope);
      if (!this.gate.isCurrent('map', token)) return;
      this.store.patchServer({ mapCells: resp.cells });
    } catch (err) {
      if (!this.gate.isCurrent('map', token)) return;
      this.store.setError(errorMessage(err));
    }
  }

  private async refreshSpectrum(): Promise<void> {
    const token = this.gate.take('spectrum');
    const key = this.store.getState().panel.selectedPeak;
    if (key === null) {
      this.store.patchServer({ spectrum: null });
      return;
    }
    const peak = this.store.getState().server.peaks.find((p) => p.key === key);
    if (!peak) {
      this.store.patchServer({ spectrum: null });
      return;
    }
    try {
      const resp = await this.api.spectrum(peak.location_id, peak.key);
      if (!this.gate.isCurrent('spectrum', token)) return;
      this.store.patchServer({ spectrum: resp });
    } catch (err) {
      if (!this.gate.isCurrent('spectrum', token)) return;
      this.store.setError(errorMessage(err));
    }
  }

  // -- gesture handlers ----------------------------------------------------

  async handleBrush(ranges: EnergyRange[]): Promise<void> {
    const previous = this.store.getState().panel.ranges;
    this.store.patchPanel({ ranges });
    const outcome = await this.refreshSelection();
    if (outcome === 'failed') {
      // Failed brush leaves the panel as it was.
      this.store.patchPanel({ ranges: previous });
      return;
    }
    // A superseded brush must not push its envelope onto the map either.
    if (outcome === 'stale') return;
    await this.refreshMap();
  }

  async handleSort(key: SortKey): Promise<void> {
    this.store.patchPanel(toggleSort(this.store.getState().panel, key));
    await this.refreshPeaks();
  }

  async handleFilter(cls: AnomalyClass | null): Promise<void> {
    this.store.patchPanel({ classFilter: cls });
    await this.refreshPeaks();
  }

  async handleSelect(peak: PeakRow): Promise<void> {
    const current = this.store.getState().panel.selectedPeak;
    this.store.patchPanel({ selectedPeak: current === peak.key ? null : peak.key });
    await this.refreshSpectrum();
  }

  async handleMode(mode: MapMode): Promise<void> {
    this.store.patchPanel({ mapMode: mode });
    await this.refreshMap();
  }

  /**
   * Optimistic status change: restyle the row immediately, then reconcile
   * with the service's echo. On failure the row reverts and the banner
   * explains; on success the histogram, map, and highlights are re-fetched
   * because a FalsePositive verdict changes all three.
   */
  async handleStatus(peak: PeakRow, status: PeakStatus): Promise<void> {
    const previous = peak.status;
    const restyle = (s: PeakStatus) =>
      this.store.patchServer({
        peaks: this.store.getState().server.peaks.map((p) =>
          p.key === peak.key ? { ...p, status: s } : p,
        ),
      });
    restyle(status);
    try {
      const resp = await this.api.setStatus(peak.key, status, this.labeler);
      this.store.patchServer({
        peaks: this.store.getState().server.peaks.map((p) =>
          p.key === resp.peak.key ? resp.peak : p,
        ),
      });
    } catch (err) {
      restyle(previous);
      this.store.setError(errorMessage(err));
      return;
    }
    await Promise.all([
      this.refreshHistogram(),
      this.refreshMap(),
      this.refreshSelection(),
    ]);
  }

  // -- projection ---------------------------------------------------------

  private render(): void {
    const { panel, server, error } = this.store.getState();

    this.banner.classList.toggle('hidden', error === null);
    const text = this.banner.querySelector('.banner-text');
    if (text) text.textContent = error ?? '';

    this.heading.textContent = server.info
      ? `${server.info.dataset}: ${server.info.peaks} peaks over ${server.info.locations} locations`
      : 'connecting…';

    this.histogram.render(server.histogram, panel.ranges);
    this.peakList.render(server.peaks, server.peaksTotal, panel);
    this.spectrumView.render(server.spectrum);
    this.mapView.render(server.mapCells, server.highlights, panel.mapMode);
  }
}
