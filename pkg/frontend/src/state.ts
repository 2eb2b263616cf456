/**
 * Panel state and the single store behind the page.
 *
 * Everything the page shows is a pure projection of (server responses,
 * panel state). The store holds both halves: `panel` is what the user has
 * chosen (brushed ranges, sort, filter, selection) and `server` is the
 * latest accepted response per endpoint. Components never compute
 * densities, orderings, or selections themselves.
 */

import type {
  AnomalyClass,
  EnergyRange,
  HistogramBin,
  MapCell,
  MapMode,
  PeakRow,
  ServiceInfo,
  SortKey,
  SortOrder,
  SpectrumResponse,
} from './types.js';

export interface PanelState {
  /** Brushed energy ranges, verbatim as sent to the service. */
  ranges: EnergyRange[];
  sortKey: SortKey;
  sortOrder: SortOrder;
  classFilter: AnomalyClass | null;
  /** Key of the peak whose spectrum is charted, or null. */
  selectedPeak: string | null;
  mapMode: MapMode;
}

export interface ServerView {
  info: ServiceInfo | null;
  peaks: PeakRow[];
  peaksTotal: number;
  histogram: HistogramBin[];
  histogramBinWidth: number;
  /** Location ids returned by POST /select for the brushed ranges. */
  highlights: number[];
  mapCells: MapCell[];
  spectrum: SpectrumResponse | null;
}

export interface AppState {
  panel: PanelState;
  server: ServerView;
  /** Human-readable service failure, or null; shown as a banner. */
  error: string | null;
  loading: boolean;
}

export function initialState(): AppState {
  return {
    panel: {
      ranges: [],
      sortKey: 't_abs',
      sortOrder: 'desc',
      classFilter: null,
      selectedPeak: null,
      mapMode: 'diffraction',
    },
    server: {
      info: null,
      peaks: [],
      peaksTotal: 0,
      histogram: [],
      histogramBinWidth: 0.1,
      highlights: [],
      mapCells: [],
      spectrum: null,
    },
    error: null,
    loading: true,
  };
}

export type Listener = (state: AppState) => void;

export class Store {
  private state: AppState;
  private readonly listeners: Listener[] = [];

  constructor(state: AppState = initialState()) {
    this.state = state;
  }

  getState(): AppState {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      const i = this.listeners.indexOf(fn);
      if (i >= 0) this.listeners.splice(i, 1);
    };
  }

  update(fn: (state: AppState) => AppState): void {
    this.state = fn(this.state);
    for (const listener of [...this.listeners]) listener(this.state);
  }

  patchPanel(patch: Partial<PanelState>): void {
    this.update((s) => ({ ...s, panel: { ...s.panel, ...patch } }));
  }

  patchServer(patch: Partial<ServerView>): void {
    this.update((s) => ({ ...s, server: { ...s.server, ...patch } }));
  }

  setError(error: string | null): void {
    this.update((s) => ({ ...s, error }));
  }
}

/**
 * Next sort state after clicking a column header: a new key starts
 * descending (strongest-first reads naturally), a repeat click flips the
 * order.
 */
export function toggleSort(panel: PanelState, key: SortKey): Pick<PanelState, 'sortKey' | 'sortOrder'> {
  if (panel.sortKey === key) {
    return { sortKey: key, sortOrder: panel.sortOrder === 'desc' ? 'asc' : 'desc' };
  }
  return { sortKey: key, sortOrder: 'desc' };
}

/**
 * Single energy range the map is filtered by, derived from the brushed
 * ranges. The map endpoint takes one range, so several brushes collapse to
 * their envelope; the exact per-range membership lives in the highlight
 * set, which the service computes. No brushes means the all-energies map.
 */
export function mapEnvelope(ranges: EnergyRange[]): EnergyRange | undefined {
  if (ranges.length === 0) return undefined;
  let lo = ranges[0]![0];
  let hi = ranges[0]![1];
  for (const [a, b] of ranges) {
    if (a < lo) lo = a;
    if (b > hi) hi = b;
  }
  return [lo, hi];
}
