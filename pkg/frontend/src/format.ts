/** Small display formatters shared by the panel components. */

export function formatKev(value: number): string {
  return value.toFixed(2);
}

export function formatT(value: number): string {
  if (value >= 1000) return value.toExponential(2);
  return value.toFixed(2);
}

export function formatRange([lo, hi]: [number, number]): string {
  return `${formatKev(lo)}–${formatKev(hi)} keV`;
}

/** Linear map from [d0, d1] to [r0, r1]; degenerate domains pin to r0. */
export function linearScale(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): (v: number) => number {
  const span = d1 - d0;
  if (span === 0) return () => r0;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

/**
 * Interpolate between two RGB colors; t is clamped to [0, 1] and each
 * channel moves linearly, so rendered intensity is monotone in t.
 */
export function mixColor(
  from: [number, number, number],
  to: [number, number, number],
  t: number,
): string {
  const u = Math.max(0, Math.min(1, t));
  const ch = (i: number) => Math.round(from[i]! + (to[i]! - from[i]!) * u);
  return `rgb(${ch(0)}, ${ch(1)}, ${ch(2)})`;
}
