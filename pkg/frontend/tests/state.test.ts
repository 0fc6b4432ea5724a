import { describe, expect, it } from "vitest";
import { defaultState, stateFromQuery, stateToQuery } from "../src/state.js";

const BANDS = [4, 8, 16, 32, 64];

describe("url state", () => {
  it("round-trips a full view", () => {
    const state = defaultState(BANDS);
    state.baseId = "m0000";
    state.transferId = "m0001";
    state.seed = 7;
    state.count = 12;
    state.columns = 4;
    state.mapping = 0.25;
    state.schedule.mode = "table";
    state.schedule.table[16] = 0.5;
    const query = stateToQuery(state, BANDS);
    const back = stateFromQuery(query, BANDS);
    expect(back.baseId).toBe("m0000");
    expect(back.transferId).toBe("m0001");
    expect(back.seed).toBe(7);
    expect(back.count).toBe(12);
    expect(back.columns).toBe(4);
    expect(back.mapping).toBe(0.25);
    expect(back.schedule.mode).toBe("table");
    expect(back.schedule.table[16]).toBe(0.5);
    // the restored view serializes to the same query
    expect(stateToQuery(back, BANDS)).toBe(query);
  });

  it("an empty query yields the default view", () => {
    const state = stateFromQuery("", BANDS);
    expect(state).toEqual(defaultState(BANDS));
  });

  it("keeps named mapping policies as strings", () => {
    const state = defaultState(BANDS);
    state.mapping = "transfer";
    const back = stateFromQuery(stateToQuery(state, BANDS), BANDS);
    expect(back.mapping).toBe("transfer");
  });

  it("survives malformed numbers and schedule JSON", () => {
    const back = stateFromQuery("seed=nope&count=-3&schedule=%7Bbroken", BANDS);
    expect(back.seed).toBe(0);
    expect(back.count).toBeGreaterThanOrEqual(1);
    expect(back.schedule.mode).toBe("swap");
  });

  it("clamps numeric mapping into [0,1]", () => {
    const back = stateFromQuery("mapping=3.5", BANDS);
    expect(back.mapping).toBe(1);
  });
});
