/**
 * Wire types for the xrf-anomaly review service.
 *
 * These mirror the JSON bodies of the HTTP routes one-to-one. The client
 * never reshapes or re-derives server data; whatever the service says is
 * what the panel shows.
 */

export type AnomalyClass =
  | 'Diffraction'
  | 'Roughness'
  | 'AmbiguousFlat'
  | 'AmbiguousAttenuatedPeak'
  | 'Normal';

export const ANOMALY_CLASSES: readonly AnomalyClass[] = [
  'Diffraction',
  'Roughness',
  'AmbiguousFlat',
  'AmbiguousAttenuatedPeak',
  'Normal',
];

export type PeakStatus = 'Unreviewed' | 'ConfirmedDiffraction' | 'FalsePositive';

/** Sort keys accepted by GET /peaks. */
export type SortKey = 't_abs' | 'energy' | 'location_id';

export const SORT_KEYS: readonly SortKey[] = ['t_abs', 'energy', 'location_id'];

export type SortOrder = 'asc' | 'desc';

/** Inclusive energy range in keV, [lo, hi] with lo < hi. */
export type EnergyRange = [number, number];

export interface ServiceInfo {
  service: string;
  dataset: string;
  locations: number;
  peaks: number;
  ui: string | null;
}

export interface PeakRow {
  key: string;
  location_id: number;
  center_channel: number;
  energy_kev: number;
  t_abs: number;
  peakedness: number;
  baseline_cv: number;
  dominant_detector: string;
  class: AnomalyClass;
  status: PeakStatus;
}

export interface PeaksResponse {
  total: number;
  peaks: PeakRow[];
}

export interface HistogramBin {
  lower_kev: number;
  upper_kev: number;
  count: number;
}

export interface HistogramResponse {
  bin_width_kev: number;
  bins: HistogramBin[];
}

export interface SelectResponse {
  location_ids: number[];
}

export type MapMode = 'diffraction' | 'roughness';

export interface MapCell {
  location_id: number;
  x: number;
  y: number;
  density: number;
}

export interface MapResponse {
  mode: MapMode;
  cells: MapCell[];
}

export interface SpectrumWindow {
  center_channel: number;
  lo_channel: number;
  hi_channel: number;
}

export interface SpectrumResponse {
  location_id: number;
  x: number;
  y: number;
  a: number[];
  b: number[];
  calibration: {
    offset_kev: number;
    gain_kev_per_channel: number;
  };
  window: SpectrumWindow | null;
}

export interface StatusResponse {
  peak: PeakRow;
}
