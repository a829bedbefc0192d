/**
 * Deterministic axis scales and tick placement.
 *
 * No locale formatting and no floating state: the same domain always yields
 * the same ticks and the same label strings, which is what keeps re-rendered
 * figures byte-identical.
 */

export interface Scale {
  map(v: number): number;
  ticks(): number[];
  /** true when a sample can be placed on this axis (finite, positive on log) */
  drawable(v: number): boolean;
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const frac = raw / mag;
  if (frac <= 1) return mag;
  if (frac <= 2) return 2 * mag;
  if (frac <= 5) return 5 * mag;
  return 10 * mag;
}

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const step = niceStep((hi - lo) / count);
  const first = Math.ceil(lo / step);
  const last = Math.floor(hi / step);
  const out: number[] = [];
  for (let k = first; k <= last; k++) {
    // 0 must print as "0", not "-0" or "1e-17"
    out.push(k === 0 ? 0 : k * step);
  }
  return out;
}

export function linearScale(lo: number, hi: number, px0: number, px1: number): Scale {
  if (!(hi > lo)) {
    const pad = Math.abs(lo) > 0 ? Math.abs(lo) * 0.1 : 1;
    lo -= pad;
    hi += pad;
  }
  const k = (px1 - px0) / (hi - lo);
  return {
    map: (v) => px0 + (v - lo) * k,
    ticks: () => niceTicks(lo, hi),
    drawable: (v) => Number.isFinite(v),
  };
}

export function logScale(lo: number, hi: number, px0: number, px1: number): Scale {
  if (!(lo > 0)) throw new RangeError(`log scale needs a positive domain, got ${lo}`);
  if (!(hi > lo)) hi = lo * 10;
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const k = (px1 - px0) / (lhi - llo);
  const ticks = () => {
    const first = Math.ceil(llo);
    const last = Math.floor(lhi);
    const span = last - first;
    if (span < 1) return niceTicks(lo, hi, 4);
    // cap at roughly eight decade labels per axis
    const step = Math.max(1, Math.ceil(span / 8));
    const out: number[] = [];
    for (let e = first; e <= last; e += step) out.push(Math.pow(10, e));
    return out;
  };
  return {
    map: (v) => px0 + (Math.log10(v) - llo) * k,
    ticks,
    drawable: (v) => Number.isFinite(v) && v > 0,
  };
}

/** Finite (optionally positive) min and max, or null when nothing survives. */
export function extent(values: number[], positiveOnly = false): [number, number] | null {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v) || (positiveOnly && v <= 0)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return lo <= hi ? [lo, hi] : null;
}

export function formatNumber(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(2).replace(/\.?0+e/, "e");
  }
  const s = v.toPrecision(6);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}
