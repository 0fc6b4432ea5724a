/** Small async plumbing shared by the panels: edit debouncing and
 * latest-wins request cancellation. */

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
}

/** Trailing-edge debounce; a burst of edits fires the callback once. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | undefined;
  const wrapped = (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      fn(...args);
    }, waitMs);
  };
  wrapped.cancel = () => {
    if (timer !== undefined) clearTimeout(timer);
    timer = undefined;
  };
  return wrapped;
}

function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}

/** One in-flight task per panel. Starting a new task aborts the previous
 * one; a superseded or cancelled task resolves to undefined instead of
 * surfacing its AbortError. */
export class LatestWins {
  private ctrl: AbortController | null = null;

  async run<T>(task: (signal: AbortSignal) => Promise<T>): Promise<T | undefined> {
    this.ctrl?.abort();
    const ctrl = new AbortController();
    this.ctrl = ctrl;
    try {
      const out = await task(ctrl.signal);
      return ctrl.signal.aborted ? undefined : out;
    } catch (err) {
      if (isAbort(err) || ctrl.signal.aborted) return undefined;
      throw err;
    } finally {
      if (this.ctrl === ctrl) this.ctrl = null;
    }
  }

  cancel(): void {
    this.ctrl?.abort();
    this.ctrl = null;
  }

  get busy(): boolean {
    return this.ctrl !== null;
  }
}
