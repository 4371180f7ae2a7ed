/** Pure interval arithmetic for the trusted-region brush.
 *
 * Excluded intervals are half-open [lo, hi); brushing adds intervals,
 * clicking one removes it, and overlapping brushes merge.
 */

import type { Interval } from "./types.js";

export function normalizeInterval(a: number, b: number): Interval {
  return a <= b ? [a, b] : [b, a];
}

/** Insert an interval, merging any overlaps; output stays sorted. */
export function addInterval(intervals: Interval[], next: Interval): Interval[] {
  const [lo, hi] = next;
  if (!(hi > lo)) return intervals.slice();
  const out: Interval[] = [];
  let curLo = lo;
  let curHi = hi;
  for (const [a, b] of intervals) {
    if (b < curLo || a > curHi) {
      out.push([a, b]);
    } else {
      curLo = Math.min(curLo, a);
      curHi = Math.max(curHi, b);
    }
  }
  out.push([curLo, curHi]);
  out.sort((x, y) => x[0] - y[0]);
  return out;
}

export function removeIntervalAt(intervals: Interval[], x: number): Interval[] {
  return intervals.filter(([a, b]) => !(x >= a && x < b));
}

export function clearIntervals(): Interval[] {
  return [];
}

export function isExcluded(intervals: Interval[], x: number): boolean {
  return intervals.some(([a, b]) => x >= a && x < b);
}

/** Count of sample points that survive the exclusions. */
export function selectedCount(xs: number[], intervals: Interval[]): number {
  return xs.filter((x) => !isExcluded(intervals, x)).length;
}

/** Clamp brushed pixels into the feature domain before storing. */
export function clampInterval(interval: Interval, domain: Interval): Interval {
  const [lo, hi] = interval;
  const [dLo, dHi] = domain;
  return [Math.max(lo, dLo), Math.min(hi, dHi)];
}
