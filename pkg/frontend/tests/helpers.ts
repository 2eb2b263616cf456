/** Shared plumbing for the interaction tests. */

import { inject } from 'vitest';
import { ApiClient } from '../src/api.js';
import { App } from '../src/app.js';

export function baseUrl(): string {
  return inject('baseUrl');
}

export function api(): ApiClient {
  return new ApiClient(baseUrl());
}

/** Fresh container attached to the document, as a page would provide. */
export function mount(): HTMLElement {
  const root = document.createElement('div');
  document.body.appendChild(root);
  return root;
}

/**
 * A freshly loaded page: new container, new App, initial fetches done.
 * Building a second one against the same service is exactly a page reload.
 */
export async function newApp(labeler?: string): Promise<{ app: App; root: HTMLElement }> {
  const root = mount();
  const app = new App(root, api(), labeler === undefined ? {} : { labeler });
  await app.load();
  return { app, root };
}

/** Peak keys in current DOM order. */
export function rowKeys(root: HTMLElement): string[] {
  return Array.from(root.querySelectorAll('tbody tr[data-key]')).map(
    (tr) => (tr as HTMLElement).dataset['key'] ?? '',
  );
}

/** Highlighted location ids read off the map, ascending. */
export function litLocations(root: HTMLElement): number[] {
  return Array.from(root.querySelectorAll('.map-svg rect.cell.hl'))
    .map((el) => Number((el as HTMLElement).dataset['location']))
    .sort((a, b) => a - b);
}

/** location id -> displayed density from the map cells. */
export function cellDensities(root: HTMLElement): Map<number, number> {
  const out = new Map<number, number>();
  for (const el of Array.from(root.querySelectorAll('.map-svg rect.cell'))) {
    const cell = el as HTMLElement;
    out.set(Number(cell.dataset['location']), Number(cell.dataset['density']));
  }
  return out;
}

/**
 * Pin an element's layout box so pixel math works in a layout-less DOM.
 * Returns a cleanup that restores the original method.
 */
export function pinRect(el: Element, left: number, width: number): () => void {
  const original = el.getBoundingClientRect.bind(el);
  el.getBoundingClientRect = () =>
    ({
      left,
      width,
      right: left + width,
      top: 0,
      bottom: 10,
      height: 10,
      x: left,
      y: 0,
      toJSON: () => ({}),
    }) as DOMRect;
  return () => {
    el.getBoundingClientRect = original;
  };
}

export function mouse(el: Element, type: string, clientX: number, shiftKey = false): void {
  el.dispatchEvent(
    new MouseEvent(type, { clientX, clientY: 5, shiftKey, bubbles: true, cancelable: true }),
  );
}

export function click(el: Element): void {
  el.dispatchEvent(new MouseEvent('click', { bubbles: true, cancelable: true }));
}

/** Poll until cond() holds; throws with the label after the deadline. */
export async function waitFor(
  cond: () => boolean,
  label: string,
  timeoutMs = 5000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (cond()) return;
    await new Promise((r) => setTimeout(r, 10));
  }
  if (cond()) return;
  throw new Error(`timed out waiting for ${label}`);
}

/** Drag a brush across the histogram in SVG pixel coordinates. */
export function dragBrush(
  root: HTMLElement,
  x0: number,
  x1: number,
  additive = false,
): void {
  const svg = root.querySelector('.histogram-svg');
  if (!svg) throw new Error('histogram svg not mounted');
  const restore = pinRect(svg, 0, 640);
  try {
    mouse(svg, 'mousedown', x0, additive);
    mouse(svg, 'mousemove', (x0 + x1) / 2, additive);
    mouse(svg, 'mouseup', x1, additive);
  } finally {
    restore();
  }
}

/** A click (no drag) on the histogram, which clears every brush. */
export function clickHistogram(root: HTMLElement, x: number): void {
  dragBrush(root, x, x);
}
