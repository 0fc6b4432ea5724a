/** Console state <-> URL query string.
 *
 * The whole view (model ids, schedule JSON, mapping, seed, grid shape) lives
 * in the query so any configuration can be shared or reloaded exactly.
 */

import type { MappingJson } from "./api.js";
import { type ScheduleDraft, defaultDraft, draftFromJson, draftToJson } from "./schedule.js";

export interface ConsoleState {
  baseId: string;
  transferId: string;
  seed: number;
  count: number;
  columns: number;
  mapping: MappingJson;
  schedule: ScheduleDraft;
}

export function defaultState(bands: number[]): ConsoleState {
  return {
    baseId: "",
    transferId: "",
    seed: 0,
    count: 24,
    columns: 6,
    mapping: "base",
    schedule: defaultDraft(bands),
  };
}

export function stateToQuery(state: ConsoleState, bands: number[]): string {
  const q = new URLSearchParams();
  if (state.baseId) q.set("base", state.baseId);
  if (state.transferId) q.set("transfer", state.transferId);
  q.set("seed", String(state.seed));
  q.set("count", String(state.count));
  q.set("columns", String(state.columns));
  q.set("mapping", String(state.mapping));
  q.set("schedule", JSON.stringify(draftToJson(state.schedule, bands)));
  return q.toString();
}

function intOr(text: string | null, fallback: number): number {
  if (text === null) return fallback;
  const n = Number.parseInt(text, 10);
  return Number.isFinite(n) ? n : fallback;
}

export function stateFromQuery(query: string, bands: number[]): ConsoleState {
  const q = new URLSearchParams(query);
  const state = defaultState(bands);
  state.baseId = q.get("base") ?? "";
  state.transferId = q.get("transfer") ?? "";
  state.seed = intOr(q.get("seed"), state.seed);
  state.count = Math.max(1, intOr(q.get("count"), state.count));
  state.columns = Math.max(1, intOr(q.get("columns"), state.columns));
  const mapping = q.get("mapping");
  if (mapping === "base" || mapping === "transfer") {
    state.mapping = mapping;
  } else if (mapping !== null && Number.isFinite(Number(mapping))) {
    state.mapping = Math.min(1, Math.max(0, Number(mapping)));
  }
  const scheduleText = q.get("schedule");
  if (scheduleText !== null) {
    let parsed: unknown = null;
    try {
      parsed = JSON.parse(scheduleText);
    } catch {
      // garbage in the URL falls back to the default schedule
    }
    state.schedule = draftFromJson(parsed, bands);
  }
  return state;
}
