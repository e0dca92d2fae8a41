/** Diverging colormap centered at zero.
 *
 * Anchor colors follow the kernel plots' convention: dark red for large
 * negative values through cyan and near-white at zero, then yellow up to
 * dark blue for large positive values.
 */

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

const ANCHORS: Array<[number, Rgb]> = [
  [0.0, { r: 0x8b, g: 0x00, b: 0x00 }], // dark red
  [0.3, { r: 0x22, g: 0xb8, b: 0xcf }], // cyan
  [0.5, { r: 0xf4, g: 0xf4, b: 0xf2 }], // very light grey
  [0.7, { r: 0xff, g: 0xd4, b: 0x00 }], // yellow
  [1.0, { r: 0x00, g: 0x00, b: 0x8b }], // dark blue
];

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

/** Map t in [0, 1] (0.5 = zero value) to an rgb() string. */
export function divergingColor(t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  for (let k = 0; k < ANCHORS.length - 1; k++) {
    const [t0, c0] = ANCHORS[k];
    const [t1, c1] = ANCHORS[k + 1];
    if (clamped <= t1 || k === ANCHORS.length - 2) {
      const local = t1 === t0 ? 0 : (clamped - t0) / (t1 - t0);
      const r = Math.round(lerp(c0.r, c1.r, local));
      const g = Math.round(lerp(c0.g, c1.g, local));
      const b = Math.round(lerp(c0.b, c1.b, local));
      return `rgb(${r},${g},${b})`;
    }
  }
  return "rgb(0,0,0)"; // unreachable
}

/** Symmetric color limit from robust quantiles (1% / 99%), not min/max. */
export function robustLimit(values: number[]): number {
  if (values.length === 0) return 1;
  const sorted = [...values].sort((a, b) => a - b);
  const pick = (q: number) =>
    sorted[Math.min(sorted.length - 1, Math.max(0, Math.round(q * (sorted.length - 1))))];
  const lim = Math.max(Math.abs(pick(0.01)), Math.abs(pick(0.99)));
  return lim > 0 ? lim : 1;
}

/** Value to colormap coordinate under a symmetric limit. */
export function valueToT(value: number, limit: number): number {
  const scaled = value / limit;
  return 0.5 + 0.5 * Math.min(1, Math.max(-1, scaled));
}
