/** Typed client for the local ganblend HTTP service.
 *
 * Every number and every pixel in the console comes through these calls;
 * the browser never re-implements any model math.
 */

export interface ModelRow {
  id: string;
  name: string;
  max_resolution: number;
}

export interface ServiceConfig {
  bands: number[];
  max_resolution: number;
  latent_dim: number;
  style_dim: number;
}

export interface PreviewRow {
  r: number;
  alpha: number;
}

export type ScheduleJson =
  | { kind: "swap"; r_swap: number; low_source: "base" | "transfer" }
  | { kind: "linear_log"; r_lo: number; r_hi: number; alpha_lo: number; alpha_hi: number }
  | { kind: "smoothstep"; r_center: number; width_octaves: number }
  | { kind: "table"; alphas: Record<string, number> };

export type MappingJson = "base" | "transfer" | number;

export interface ProjectionCfg {
  space?: "w" | "z";
  steps?: number;
  learning_rate?: number;
  fd_step?: number;
  seed?: number;
}

export interface ProjectResult {
  space: string;
  latent: number[];
  final_loss: number;
  loss_trace: number[];
  reconstruction_png: string;
}

export interface ToonifyResult {
  toonified_png: string;
  reconstruction_png: string;
  final_loss: number;
}

export type JobState<T> =
  | { status: "running" }
  | { status: "done"; result: T }
  | { status: "error"; error: string };

/** Server-reported failure, carrying the service's error message. */
export class ApiError extends Error {
  constructor(message: string, readonly httpStatus: number) {
    super(message);
    this.name = "ApiError";
  }
}

async function readError(res: Response): Promise<never> {
  let message = `${res.status} ${res.statusText}`;
  try {
    const body = (await res.json()) as { error?: string };
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    // non-JSON error body, keep the status line
  }
  throw new ApiError(message, res.status);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
    const res = await fetch(this.baseUrl + path, { signal });
    if (!res.ok) await readError(res);
    return (await res.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!res.ok) await readError(res);
    return (await res.json()) as T;
  }

  async config(signal?: AbortSignal): Promise<ServiceConfig> {
    return this.getJson("/api/config", signal);
  }

  async listModels(signal?: AbortSignal): Promise<ModelRow[]> {
    const body = await this.getJson<{ models: ModelRow[] }>("/api/models", signal);
    return body.models;
  }

  /** Registers a checkpoint file that already sits on the server's disk. */
  async uploadByPath(path: string, signal?: AbortSignal): Promise<string> {
    const body = await this.postJson<{ id: string }>("/api/models", { path }, signal);
    return body.id;
  }

  async blend(
    baseId: string,
    transferId: string,
    schedule: ScheduleJson,
    mapping: MappingJson,
    signal?: AbortSignal,
  ): Promise<string> {
    const body = await this.postJson<{ id: string }>(
      "/api/blend",
      { base_id: baseId, transfer_id: transferId, schedule, mapping },
      signal,
    );
    return body.id;
  }

  /** URL of a deterministic sample grid; same query, same bytes. */
  sampleUrl(modelId: string, seed: number, count: number, columns: number): string {
    const q = new URLSearchParams({
      seed: String(seed),
      count: String(count),
      columns: String(columns),
    });
    return `${this.baseUrl}/api/models/${encodeURIComponent(modelId)}/sample.png?${q}`;
  }

  async schedulePreview(schedule: ScheduleJson, signal?: AbortSignal): Promise<PreviewRow[]> {
    const q = new URLSearchParams({ schedule: JSON.stringify(schedule) });
    const body = await this.getJson<{ rows: PreviewRow[] }>(
      `/api/schedule/preview?${q}`,
      signal,
    );
    return body.rows;
  }

  async startProject(
    modelId: string,
    pngB64: string,
    cfg: ProjectionCfg,
    signal?: AbortSignal,
  ): Promise<string> {
    const body = await this.postJson<{ job_id: string }>(
      "/api/project",
      { model_id: modelId, png: pngB64, cfg },
      signal,
    );
    return body.job_id;
  }

  async startToonify(
    baseId: string,
    blendedId: string,
    pngB64: string,
    cfg: ProjectionCfg,
    signal?: AbortSignal,
  ): Promise<string> {
    const body = await this.postJson<{ job_id: string }>(
      "/api/toonify",
      { base_id: baseId, blended_id: blendedId, png: pngB64, cfg },
      signal,
    );
    return body.job_id;
  }

  async job<T>(jobId: string, signal?: AbortSignal): Promise<JobState<T>> {
    return this.getJson(`/api/jobs/${encodeURIComponent(jobId)}`, signal);
  }
}

export interface PollOptions {
  intervalMs?: number;
  signal?: AbortSignal;
}

/** Polls a job until it settles. Rejects with ApiError on job failure and
 * with DOMException("AbortError") when the signal fires; an aborted poll
 * schedules no further requests. */
export function pollJob<T>(
  api: ApiClient,
  jobId: string,
  opts: PollOptions = {},
): Promise<T> {
  const intervalMs = opts.intervalMs ?? 500;
  const signal = opts.signal;
  return new Promise<T>((resolve, reject) => {
    let timer: ReturnType<typeof setTimeout> | undefined;
    const abort = () => {
      if (timer !== undefined) clearTimeout(timer);
      reject(new DOMException("poll aborted", "AbortError"));
    };
    if (signal) {
      if (signal.aborted) {
        abort();
        return;
      }
      signal.addEventListener("abort", abort, { once: true });
    }
    const tick = async () => {
      let state: JobState<T>;
      try {
        state = await api.job<T>(jobId, signal);
      } catch (err) {
        signal?.removeEventListener("abort", abort);
        reject(err);
        return;
      }
      if (state.status === "done") {
        signal?.removeEventListener("abort", abort);
        resolve(state.result);
      } else if (state.status === "error") {
        signal?.removeEventListener("abort", abort);
        reject(new ApiError(state.error, 200));
      } else if (!signal?.aborted) {
        timer = setTimeout(tick, intervalMs);
      }
    };
    void tick();
  });
}
