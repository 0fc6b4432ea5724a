/** Editable schedule draft and its serialization to the service's JSON.
 *
 * The draft keeps state for every editor mode at once so switching modes
 * never loses slider positions; only the active mode is serialized.
 */

import type { ScheduleJson } from "./api.js";

export type ScheduleMode = "swap" | "table" | "linear_log" | "smoothstep";

export interface ScheduleDraft {
  mode: ScheduleMode;
  rSwap: number;
  lowSource: "base" | "transfer";
  /** per-band alpha, keyed by resolution */
  table: Record<number, number>;
  rLo: number;
  rHi: number;
  alphaLo: number;
  alphaHi: number;
  rCenter: number;
  widthOctaves: number;
}

const clamp01 = (x: number) => Math.min(1, Math.max(0, x));

function nearestBand(bands: number[], r: number): number {
  let best = bands[0] ?? 4;
  for (const b of bands) {
    if (Math.abs(Math.log2(b) - Math.log2(r)) < Math.abs(Math.log2(best) - Math.log2(r))) {
      best = b;
    }
  }
  return best;
}

/** Default view: swap at the middle band, low resolutions from the transfer. */
export function defaultDraft(bands: number[]): ScheduleDraft {
  const mid = bands[Math.floor((bands.length - 1) / 2)] ?? 16;
  const table: Record<number, number> = {};
  for (const b of bands) table[b] = 0;
  return {
    mode: "swap",
    rSwap: mid,
    lowSource: "transfer",
    table,
    rLo: bands[0] ?? 4,
    rHi: bands[bands.length - 1] ?? 64,
    alphaLo: 1,
    alphaHi: 0,
    rCenter: mid,
    widthOctaves: 2,
  };
}

/** Serializes the active mode only, clamped into the service's domain. */
export function draftToJson(draft: ScheduleDraft, bands: number[]): ScheduleJson {
  switch (draft.mode) {
    case "swap":
      return {
        kind: "swap",
        r_swap: nearestBand(bands, draft.rSwap),
        low_source: draft.lowSource,
      };
    case "table": {
      const alphas: Record<string, number> = {};
      for (const b of bands) alphas[String(b)] = clamp01(draft.table[b] ?? 0);
      return { kind: "table", alphas };
    }
    case "linear_log": {
      let lo = nearestBand(bands, draft.rLo);
      let hi = nearestBand(bands, draft.rHi);
      if (lo >= hi) {
        // ramp needs two distinct endpoints; widen to the full range
        lo = bands[0] ?? 4;
        hi = bands[bands.length - 1] ?? 64;
      }
      return {
        kind: "linear_log",
        r_lo: lo,
        r_hi: hi,
        alpha_lo: clamp01(draft.alphaLo),
        alpha_hi: clamp01(draft.alphaHi),
      };
    }
    case "smoothstep":
      return {
        kind: "smoothstep",
        r_center: nearestBand(bands, draft.rCenter),
        width_octaves: Math.max(0.25, draft.widthOctaves),
      };
  }
}

/** Rebuilds a draft from schedule JSON, e.g. restored from the URL.
 * Unknown kinds fall back to the default draft. */
export function draftFromJson(json: unknown, bands: number[]): ScheduleDraft {
  const draft = defaultDraft(bands);
  if (typeof json !== "object" || json === null || !("kind" in json)) return draft;
  const obj = json as Record<string, unknown>;
  switch (obj.kind) {
    case "swap":
      draft.mode = "swap";
      if (typeof obj.r_swap === "number") draft.rSwap = nearestBand(bands, obj.r_swap);
      if (obj.low_source === "base" || obj.low_source === "transfer") {
        draft.lowSource = obj.low_source;
      }
      break;
    case "table":
      draft.mode = "table";
      if (typeof obj.alphas === "object" && obj.alphas !== null) {
        for (const [k, v] of Object.entries(obj.alphas as Record<string, unknown>)) {
          const r = Number(k);
          if (bands.includes(r) && typeof v === "number") draft.table[r] = clamp01(v);
        }
      }
      break;
    case "linear_log":
      draft.mode = "linear_log";
      if (typeof obj.r_lo === "number") draft.rLo = nearestBand(bands, obj.r_lo);
      if (typeof obj.r_hi === "number") draft.rHi = nearestBand(bands, obj.r_hi);
      if (typeof obj.alpha_lo === "number") draft.alphaLo = clamp01(obj.alpha_lo);
      if (typeof obj.alpha_hi === "number") draft.alphaHi = clamp01(obj.alpha_hi);
      break;
    case "smoothstep":
      draft.mode = "smoothstep";
      if (typeof obj.r_center === "number") draft.rCenter = nearestBand(bands, obj.r_center);
      if (typeof obj.width_octaves === "number" && obj.width_octaves > 0) {
        draft.widthOctaves = obj.width_octaves;
      }
      break;
  }
  return draft;
}

/** Flips which side of the cut takes the donor weights. */
export function toggleDirection(draft: ScheduleDraft): ScheduleDraft {
  return { ...draft, lowSource: draft.lowSource === "transfer" ? "base" : "transfer" };
}
