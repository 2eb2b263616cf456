/**
 * HTTP client for the review service, plus the stale-response gate.
 *
 * The panel is a single-user client but fires overlapping background
 * fetches (brush adjustments, sort toggles). Responses are applied
 * last-request-wins per endpoint: every request takes a token from a
 * RequestGate and the response is dropped unless its token is still the
 * newest for that endpoint.
 */

import type {
  AnomalyClass,
  EnergyRange,
  HistogramResponse,
  MapMode,
  MapResponse,
  PeakStatus,
  PeaksResponse,
  SelectResponse,
  ServiceInfo,
  SortKey,
  SortOrder,
  SpectrumResponse,
  StatusResponse,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = 'ApiError';
    this.status = status;
    this.detail = detail;
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: unknown };
      if (typeof body.detail === 'string') detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export interface PeaksQuery {
  sort?: SortKey;
  order?: SortOrder;
  cls?: AnomalyClass | null;
  offset?: number;
  limit?: number;
}

export class ApiClient {
  /** Base URL without trailing slash; '' means same-origin. */
  readonly baseUrl: string;

  constructor(baseUrl = '') {
    this.baseUrl = baseUrl.replace(/\/$/, '');
  }

  private async get<T>(path: string, params?: Record<string, string>): Promise<T> {
    const query = params && Object.keys(params).length > 0
      ? '?' + new URLSearchParams(params).toString()
      : '';
    return asJson<T>(await fetch(this.baseUrl + path + query));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    return asJson<T>(resp);
  }

  info(): Promise<ServiceInfo> {
    return this.get<ServiceInfo>('/');
  }

  peaks(q: PeaksQuery = {}): Promise<PeaksResponse> {
    const params: Record<string, string> = {};
    if (q.sort !== undefined) params['sort'] = q.sort;
    if (q.order !== undefined) params['order'] = q.order;
    if (q.cls != null) params['class'] = q.cls;
    if (q.offset !== undefined) params['offset'] = String(q.offset);
    if (q.limit !== undefined) params['limit'] = String(q.limit);
    return this.get<PeaksResponse>('/peaks', params);
  }

  histogram(binWidthKev?: number, cls?: AnomalyClass): Promise<HistogramResponse> {
    const params: Record<string, string> = {};
    if (binWidthKev !== undefined) params['bin_width_kev'] = String(binWidthKev);
    if (cls !== undefined) params['class'] = cls;
    return this.get<HistogramResponse>('/histogram', params);
  }

  /** Ranges are sent verbatim; the server owns the membership rule. */
  select(ranges: EnergyRange[]): Promise<SelectResponse> {
    return this.post<SelectResponse>('/select', { ranges });
  }

  map(mode: MapMode, range?: EnergyRange): Promise<MapResponse> {
    const params: Record<string, string> = { mode };
    if (range !== undefined) {
      params['lo_kev'] = String(range[0]);
      params['hi_kev'] = String(range[1]);
    }
    return this.get<MapResponse>('/map', params);
  }

  spectrum(locationId: number, peakKey?: string): Promise<SpectrumResponse> {
    const params: Record<string, string> = {};
    if (peakKey !== undefined) params['peak'] = peakKey;
    return this.get<SpectrumResponse>(`/spectrum/${locationId}`, params);
  }

  setStatus(key: string, status: PeakStatus, labeler?: string): Promise<StatusResponse> {
    const body: Record<string, string> = { status };
    if (labeler !== undefined) body['labeler'] = labeler;
    return this.post<StatusResponse>(`/peaks/${encodeURIComponent(key)}/status`, body);
  }
}

/**
 * Monotone token source per endpoint name. take() invalidates all earlier
 * tokens for that name; isCurrent() tells a resolving fetch whether its
 * response is still the latest one requested.
 */
export class RequestGate {
  private readonly counters = new Map<string, number>();

  take(name: string): number {
    const next = (this.counters.get(name) ?? 0) + 1;
    this.counters.set(name, next);
    return next;
  }

  isCurrent(name: string, token: number): boolean {
    return this.counters.get(name) === token;
  }
}
