import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { LatestWins, debounce } from "../src/flow.js";

describe("debounce", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("coalesces a burst of edits into one trailing call", () => {
    const fn = vi.fn();
    const d = debounce(fn, 250);
    d();
    vi.advanceTimersByTime(100);
    d();
    vi.advanceTimersByTime(100);
    d();
    expect(fn).not.toHaveBeenCalled();
    vi.advanceTimersByTime(249);
    expect(fn).not.toHaveBeenCalled();
    vi.advanceTimersByTime(1);
    expect(fn).toHaveBeenCalledTimes(1);
  });

  it("passes the latest arguments", () => {
    const fn = vi.fn();
    const d = debounce(fn, 50);
    d("a");
    d("b");
    vi.advanceTimersByTime(50);
    expect(fn).toHaveBeenCalledWith("b");
  });

  it("cancel drops the pending call", () => {
    const fn = vi.fn();
    const d = debounce(fn, 50);
    d();
    d.cancel();
    vi.advanceTimersByTime(500);
    expect(fn).not.toHaveBeenCalled();
  });
});

describe("LatestWins", () => {
  it("aborts the previous task when a new one starts", async () => {
    const flight = new LatestWins();
    const seen: string[] = [];
    const first = flight.run(async (signal) => {
      await new Promise((r) => setTimeout(r, 20));
      if (signal.aborted) throw new DOMException("stop", "AbortError");
      seen.push("first");
      return "first";
    });
    const second = flight.run(async () => {
      seen.push("second");
      return "second";
    });
    expect(await first).toBeUndefined();
    expect(await second).toBe("second");
    expect(seen).toEqual(["second"]);
  });

  it("returns undefined for a task that ignored its abort signal", async () => {
    const flight = new LatestWins();
    const stale = flight.run(async () => {
      await new Promise((r) => setTimeout(r, 20));
      return "stale result";
    });
    const fresh = flight.run(async () => "fresh");
    expect(await fresh).toBe("fresh");
    expect(await stale).toBeUndefined();
  });

  it("cancel() settles the in-flight task as undefined", async () => {
    const flight = new LatestWins();
    const task = flight.run(async (signal) => {
      await new Promise<void>((resolve, reject) => {
        signal.addEventListener("abort", () => reject(new DOMException("x", "AbortError")));
      });
      return "never";
    });
    expect(flight.busy).toBe(true);
    flight.cancel();
    expect(await task).toBeUndefined();
    expect(flight.busy).toBe(false);
  });

  it("real failures still propagate", async () => {
    const flight = new LatestWins();
    await expect(flight.run(async () => {
      throw new Error("boom");
    })).rejects.toThrow("boom");
  });
});
