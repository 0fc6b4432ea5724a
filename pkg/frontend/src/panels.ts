/** DOM wiring for the three console panels.
 *
 * Each factory builds its controls inside a container div from index.html,
 * reads and mutates the shared ConsoleState, and reports edits upward; the
 * entrypoint owns the network choreography. No model math happens here.
 */

import { type ApiClient, type ModelRow, type PreviewRow, pollJob } from "./api.js";
import type { ProjectResult, ToonifyResult } from "./api.js";
import { LatestWins, debounce } from "./flow.js";
import { fileToModelPng, pngDataUrl } from "./images.js";
import { toggleDirection } from "./schedule.js";
import type { ConsoleState } from "./state.js";

export interface ConsoleContext {
  api: ApiClient;
  bands: number[];
  maxResolution: number;
  state: ConsoleState;
  /** persist state (URL) after any edit */
  persist(): void;
}

function mustFind<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
}

function option(value: string, label: string): HTMLOptionElement {
  const opt = document.createElement("option");
  opt.value = value;
  opt.textContent = label;
  return opt;
}

/* ------------------------------------------------------------------ */
/* model bar: pick base/transfer checkpoints, register files by path  */
/* ------------------------------------------------------------------ */

export interface ModelBar {
  refresh(): Promise<void>;
}

export function initModelBar(
  root: HTMLElement,
  ctx: ConsoleContext,
  onModelsPicked: () => void,
): ModelBar {
  root.innerHTML = `
    <label>base <select data-role="base"></select></label>
    <label>transfer <select data-role="transfer"></select></label>
    <input data-role="path" type="text" placeholder="/path/to/checkpoint.gwtc" size="36">
    <button data-role="upload">register</button>
    <span data-role="status" class="status"></span>
  `;
  const baseSelect = mustFind<HTMLSelectElement>(root, '[data-role="base"]');
  const transferSelect = mustFind<HTMLSelectElement>(root, '[data-role="transfer"]');
  const pathInput = mustFind<HTMLInputElement>(root, '[data-role="path"]');
  const uploadButton = mustFind<HTMLButtonElement>(root, '[data-role="upload"]');
  const status = mustFind<HTMLSpanElement>(root, '[data-role="status"]');

  function fill(select: HTMLSelectElement, rows: ModelRow[], picked: string): void {
    select.innerHTML = "";
    select.appendChild(option("", "(none)"));
    for (const row of rows) {
      select.appendChild(option(row.id, `${row.id} ${row.name} (${row.max_resolution}px)`));
    }
    select.value = rows.some((r) => r.id === picked) ? picked : "";
  }

  async function refresh(): Promise<void> {
    const rows = await ctx.api.listModels();
    fill(baseSelect, rows, ctx.state.baseId);
    fill(transferSelect, rows, ctx.state.transferId);
  }

  baseSelect.addEventListener("change", () => {
    ctx.state.baseId = baseSelect.value;
    ctx.persist();
    onModelsPicked();
  });
  transferSelect.addEventListener("change", () => {
    ctx.state.transferId = transferSelect.value;
    ctx.persist();
    onModelsPicked();
  });
  uploadButton.addEventListener("click", () => {
    const path = pathInput.value.trim();
    if (!path) {
      status.textContent = "enter a server-side checkpoint path";
      return;
    }
    status.textContent = "registering...";
    ctx.api
      .uploadByPath(path)
      .then(async (id) => {
        status.textContent = `registered ${id}`;
        await refresh();
      })
      .catch((err: Error) => {
        status.textContent = err.message;
      });
  });

  return { refresh };
}

/* ------------------------------------------------------------------ */
/* schedule editor: mode controls -> debounced preview + re-blend     */
/* ------------------------------------------------------------------ */

export interface ScheduleEditor {
  /** re-render all controls from ctx.state.schedule */
  render(): void;
  renderPreview(rows: PreviewRow[]): void;
  /** flush a pending debounced edit immediately (tests) */
  flush(): void;
}

export interface ScheduleEditorOptions {
  /** fired once per settled burst of edits */
  onEdited(): void;
  debounceMs?: number;
}

export function initScheduleEditor(
  root: HTMLElement,
  ctx: ConsoleContext,
  opts: ScheduleEditorOptions,
): ScheduleEditor {
  root.innerHTML = `
    <div class="row">
      <label>schedule
        <select data-role="mode">
          <option value="swap">swap</option>
          <option value="table">per-band table</option>
          <option value="linear_log">linear ramp</option>
          <option value="smoothstep">smoothstep ramp</option>
        </select>
      </label>
      <label>mapping
        <select data-role="mapping">
          <option value="base">base</option>
          <option value="transfer">transfer</option>
          <option value="custom">custom alpha</option>
        </select>
      </label>
      <input data-role="mapping-alpha" type="number" min="0" max="1" step="0.05" value="0.5" hidden>
    </div>
    <div data-role="controls"></div>
    <table data-role="preview" class="preview"><tbody></tbody></table>
  `;
  const modeSelect = mustFind<HTMLSelectElement>(root, '[data-role="mode"]');
  const mappingSelect = mustFind<HTMLSelectElement>(root, '[data-role="mapping"]');
  const mappingAlpha = mustFind<HTMLInputElement>(root, '[data-role="mapping-alpha"]');
  const controls = mustFind<HTMLDivElement>(root, '[data-role="controls"]');
  const previewBody = mustFind<HTMLTableSectionElement>(root, "table.preview tbody");

  const edited = debounce(opts.onEdited, opts.debounceMs ?? 250);
  const touch = () => {
    ctx.persist();
    edited();
  };

  function sliderRow(label: string, input: HTMLInputElement, value: string): HTMLLabelElement {
    const wrap = document.createElement("label");
    wrap.className = "slider-row";
    const name = document.createElement("span");
    name.textContent = label;
    const readout = document.createElement("span");
    readout.className = "readout";
    readout.textContent = value;
    input.addEventListener("input", () => {
      readout.textContent = input.value;
    });
    wrap.append(name, input, readout);
    return wrap;
  }

  function renderSwap(): void {
    const draft = ctx.state.schedule;
    const index = Math.max(0, ctx.bands.indexOf(draft.rSwap));
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = String(ctx.bands.length - 1);
    slider.step = "1";
    slider.value = String(index);
    slider.dataset.role = "r-swap";
    const readout = document.createElement("span");
    readout.className = "readout";
    readout.textContent = `${draft.rSwap}px`;
    slider.addEventListener("input", () => {
      const band = ctx.bands[Number(slider.value)];
      if (band === undefined) return;
      draft.rSwap = band;
      readout.textContent = `${band}px`;
      touch();
    });
    const toggle = document.createElement("button");
    toggle.dataset.role = "direction";
    toggle.textContent = `low bands from: ${draft.lowSource}`;
    toggle.addEventListener("click", () => {
      ctx.state.schedule = toggleDirection(ctx.state.schedule);
      toggle.textContent = `low bands from: ${ctx.state.schedule.lowSource}`;
      touch();
    });
    const row = document.createElement("div");
    row.className = "row";
    const label = document.createElement("span");
    label.textContent = "swap at";
    row.append(label, slider, readout, toggle);
    controls.replaceChildren(row);
  }

  function renderTable(): void {
    const draft = ctx.state.schedule;
    const rows: HTMLElement[] = [];
    for (const band of ctx.bands) {
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "1";
      slider.step = "0.01";
      slider.value = String(draft.table[band] ?? 0);
      slider.dataset.role = `alpha-${band}`;
      slider.addEventListener("input", () => {
        draft.table[band] = Number(slider.value);
        touch();
      });
      rows.push(sliderRow(`${band}px`, slider, slider.value));
    }
    controls.replaceChildren(...rows);
  }

  function renderLinearLog(): void {
    const draft = ctx.state.schedule;
    const loSelect = document.createElement("select");
    const hiSelect = document.createElement("select");
    loSelect.dataset.role = "r-lo";
    hiSelect.dataset.role = "r-hi";
    for (const band of ctx.bands) {
      loSelect.appendChild(option(String(band), `${band}px`));
      hiSelect.appendChild(option(String(band), `${band}px`));
    }
    loSelect.value = String(draft.rLo);
    hiSelect.value = String(draft.rHi);
    const loAlpha = document.createElement("input");
    const hiAlpha = document.createElement("input");
    for (const [input, role, value] of [
      [loAlpha, "alpha-lo", draft.alphaLo],
      [hiAlpha, "alpha-hi", draft.alphaHi],
    ] as const) {
      input.type = "number";
      input.min = "0";
      input.max = "1";
      input.step = "0.05";
      input.value = String(value);
      input.dataset.role = role;
    }
    loSelect.addEventListener("change", () => {
      draft.rLo = Number(loSelect.value);
      touch();
    });
    hiSelect.addEventListener("change", () => {
      draft.rHi = Number(hiSelect.value);
      touch();
    });
    loAlpha.addEventListener("input", () => {
      draft.alphaLo = Number(loAlpha.value);
      touch();
    });
    hiAlpha.addEventListener("input", () => {
      draft.alphaHi = Number(hiAlpha.value);
      touch();
    });
    const row = document.createElement("div");
    row.className = "row";
    row.append("from", loSelect, "alpha", loAlpha, "to", hiSelect, "alpha", hiAlpha);
    controls.replaceChildren(row);
  }

  function renderSmoothstep(): void {
    const draft = ctx.state.schedule;
    const centerSelect = document.createElement("select");
    centerSelect.dataset.role = "r-center";
    for (const band of ctx.bands) {
      centerSelect.appendChild(option(String(band), `${band}px`));
    }
    centerSelect.value = String(draft.rCenter);
    const width = document.createElement("input");
    width.type = "number";
    width.min = "0.25";
    width.step = "0.25";
    width.value = String(draft.widthOctaves);
    width.dataset.role = "width";
    centerSelect.addEventListener("change", () => {
      draft.rCenter = Number(centerSelect.value);
      touch();
    });
    width.addEventListener("input", () => {
      const w = Number(width.value);
      if (w > 0) draft.widthOctaves = w;
      touch();
    });
    const row = document.createElement("div");
    row.className = "row";
    row.append("center", centerSelect, "width (octaves)", width);
    controls.replaceChildren(row);
  }

  function render(): void {
    const draft = ctx.state.schedule;
    modeSelect.value = draft.mode;
    if (ctx.state.mapping === "base" || ctx.state.mapping === "transfer") {
      mappingSelect.value = ctx.state.mapping;
      mappingAlpha.hidden = true;
    } else {
      mappingSelect.value = "custom";
      mappingAlpha.hidden = false;
      mappingAlpha.value = String(ctx.state.mapping);
    }
    switch (draft.mode) {
      case "swap":
        renderSwap();
        break;
      case "table":
        renderTable();
        break;
      case "linear_log":
        renderLinearLog();
        break;
      case "smoothstep":
        renderSmoothstep();
        break;
    }
  }

  modeSelect.addEventListener("change", () => {
    const mode = modeSelect.value;
    if (mode === "swap" || mode === "table" || mode === "linear_log" || mode === "smoothstep") {
      ctx.state.schedule.mode = mode;
      render();
      touch();
    }
  });
  mappingSelect.addEventListener("change", () => {
    if (mappingSelect.value === "custom") {
      mappingAlpha.hidden = false;
      ctx.state.mapping = Number(mappingAlpha.value);
    } else {
      mappingAlpha.hidden = true;
      ctx.state.mapping = mappingSelect.value as "base" | "transfer";
    }
    touch();
  });
  mappingAlpha.addEventListener("input", () => {
    const a = Number(mappingAlpha.value);
    if (a >= 0 && a <= 1) {
      ctx.state.mapping = a;
      touch();
    }
  });

  function renderPreview(rows: PreviewRow[]): void {
    previewBody.innerHTML = "";
    for (const row of rows) {
      const tr = document.createElement("tr");
      const rCell = document.createElement("td");
      rCell.textContent = `${row.r}px`;
      const aCell = document.createElement("td");
      aCell.textContent = row.alpha.toFixed(3);
      const bar = document.createElement("td");
      const fill = document.createElement("div");
      fill.className = "bar";
      fill.style.width = `${Math.round(row.alpha * 100)}%`;
      bar.appendChild(fill);
      tr.append(rCell, aCell, bar);
      previewBody.appendChild(tr);
    }
  }

  return { render, renderPreview, flush: () => edited.cancel() };
}

/* ------------------------------------------------------------------ */
/* compare panel: base / transfer / blend grids sharing one seed      */
/* ------------------------------------------------------------------ */

export interface ComparePanel {
  /** repoint the grid images; "blend" touches only the blended column */
  refresh(which: "all" | "blend", blendId: string | null): void;
}

export function initComparePanel(
  root: HTMLElement,
  ctx: ConsoleContext,
  onViewChanged: () => void,
): ComparePanel {
  root.innerHTML = `
    <div class="row">
      <label>seed <input data-role="seed" type="number" step="1"></label>
      <label>count <input data-role="count" type="number" min="1" step="1"></label>
      <label>columns <input data-role="columns" type="number" min="1" step="1"></label>
    </div>
    <div class="columns">
      <figure><img data-role="grid-base" class="pixelated" alt="base samples"><figcaption>base</figcaption></figure>
      <figure><img data-role="grid-transfer" class="pixelated" alt="transfer samples"><figcaption>transfer</figcaption></figure>
      <figure><img data-role="grid-blend" class="pixelated" alt="blend samples"><figcaption>blend</figcaption></figure>
    </div>
  `;
  const seedInput = mustFind<HTMLInputElement>(root, '[data-role="seed"]');
  const countInput = mustFind<HTMLInputElement>(root, '[data-role="count"]');
  const columnsInput = mustFind<HTMLInputElement>(root, '[data-role="columns"]');
  const images = {
    base: mustFind<HTMLImageElement>(root, '[data-role="grid-base"]'),
    transfer: mustFind<HTMLImageElement>(root, '[data-role="grid-transfer"]'),
    blend: mustFind<HTMLImageElement>(root, '[data-role="grid-blend"]'),
  };
  seedInput.value = String(ctx.state.seed);
  countInput.value = String(ctx.state.count);
  columnsInput.value = String(ctx.state.columns);

  function point(img: HTMLImageElement, modelId: string): void {
    if (modelId) {
      img.src = ctx.api.sampleUrl(modelId, ctx.state.seed, ctx.state.count, ctx.state.columns);
      img.hidden = false;
    } else {
      img.removeAttribute("src");
      img.hidden = true;
    }
    // an empty column keeps its footprint as a labeled placeholder
    img.closest("figure")?.classList.toggle("empty", !modelId);
  }

  function refresh(which: "all" | "blend", blendId: string | null): void {
    if (which === "all") {
      point(images.base, ctx.state.baseId);
      point(images.transfer, ctx.state.transferId);
    }
    point(images.blend, blendId ?? "");
  }

  const onInput = () => {
    ctx.state.seed = Number(seedInput.value) | 0;
    ctx.state.count = Math.max(1, Number(countInput.value) | 0);
    ctx.state.columns = Math.max(1, Number(columnsInput.value) | 0);
    ctx.persist();
    onViewChanged();
  };
  seedInput.addEventListener("change", onInput);
  countInput.addEventListener("change", onInput);
  columnsInput.addEventListener("change", onInput);

  return { refresh };
}

/* ------------------------------------------------------------------ */
/* toonify panel: upload -> project -> toonify, with clean cancel     */
/* ------------------------------------------------------------------ */

export interface ToonifyPanel {
  readonly flight: LatestWins;
}

export interface ToonifyHooks {
  currentBlendId(): string | null;
  pollIntervalMs?: number;
  /** override the canvas resize in tests; defaults to fileToModelPng */
  resize?(file: Blob, size: number): Promise<string>;
}

export function initToonifyPanel(
  root: HTMLElement,
  ctx: ConsoleContext,
  hooks: ToonifyHooks,
): ToonifyPanel {
  root.innerHTML = `
    <div class="row">
      <input data-role="file" type="file" accept="image/*">
      <label>steps <input data-role="steps" type="number" min="1" step="1" value="120"></label>
      <label>seed <input data-role="proj-seed" type="number" step="1" value="0"></label>
      <button data-role="run">toonify</button>
      <button data-role="cancel" disabled>cancel</button>
      <span data-role="status" class="status"></span>
    </div>
    <div class="columns">
      <figure><img data-role="input" class="pixelated" alt="input" hidden><figcaption>input</figcaption></figure>
      <figure><img data-role="recon" class="pixelated" alt="reconstruction" hidden><figcaption>reconstruction</figcaption></figure>
      <figure><img data-role="toon" class="pixelated" alt="toonified" hidden><figcaption>toonified</figcaption></figure>
    </div>
  `;
  const fileInput = mustFind<HTMLInputElement>(root, '[data-role="file"]');
  const stepsInput = mustFind<HTMLInputElement>(root, '[data-role="steps"]');
  const seedInput = mustFind<HTMLInputElement>(root, '[data-role="proj-seed"]');
  const runButton = mustFind<HTMLButtonElement>(root, '[data-role="run"]');
  const cancelButton = mustFind<HTMLButtonElement>(root, '[data-role="cancel"]');
  const status = mustFind<HTMLSpanElement>(root, '[data-role="status"]');
  const inputImg = mustFind<HTMLImageElement>(root, '[data-role="input"]');
  const reconImg = mustFind<HTMLImageElement>(root, '[data-role="recon"]');
  const toonImg = mustFind<HTMLImageElement>(root, '[data-role="toon"]');

  const flight = new LatestWins();
  const intervalMs = hooks.pollIntervalMs ?? 500;
  const resize = hooks.resize ?? fileToModelPng;

  async function run(): Promise<void> {
    const file = fileInput.files?.[0];
    if (!file) {
      status.textContent = "choose an image first";
      return;
    }
    if (!ctx.state.baseId) {
      status.textContent = "pick a base model first";
      return;
    }
    const blendId = hooks.currentBlendId();
    if (!blendId) {
      status.textContent = "make a blend first";
      return;
    }
    const cfg = {
      steps: Math.max(1, Number(stepsInput.value) | 0),
      seed: Number(seedInput.value) | 0,
    };
    status.textContent = "resizing...";
    const png = await resize(file, ctx.maxResolution);
    inputImg.src = pngDataUrl(png);
    inputImg.hidden = false;
    reconImg.hidden = true;
    toonImg.hidden = true;
    cancelButton.disabled = false;
    runButton.disabled = true;
    try {
      const outcome = await flight.run(async (signal) => {
        status.textContent = "projecting into latent space...";
        const projJob = await ctx.api.startProject(ctx.state.baseId, png, cfg, signal);
        const proj = await pollJob<ProjectResult>(ctx.api, projJob, { intervalMs, signal });
        reconImg.src = pngDataUrl(proj.reconstruction_png);
        reconImg.hidden = false;
        status.textContent = `projected (loss ${proj.final_loss.toExponential(2)}), toonifying...`;
        const toonJob = await ctx.api.startToonify(ctx.state.baseId, blendId, png, cfg, signal);
        const toon = await pollJob<ToonifyResult>(ctx.api, toonJob, { intervalMs, signal });
        toonImg.src = pngDataUrl(toon.toonified_png);
        toonImg.hidden = false;
        return toon;
      });
      status.textContent = outcome
        ? `done (reconstruction loss ${outcome.final_loss.toExponential(2)})`
        : "cancelled";
    } catch (err) {
      status.textContent = err instanceof Error ? err.message : String(err);
    } finally {
      cancelButton.disabled = true;
      runButton.disabled = false;
    }
  }

  runButton.addEventListener("click", () => {
    void run();
  });
  cancelButton.addEventListener("click", () => {
    flight.cancel();
  });

  return { flight };
}
