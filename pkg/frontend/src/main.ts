/** Console entrypoint: boots panels, owns the preview/blend choreography,
 * and mirrors every edit into the URL so views are shareable. */

import { ApiClient } from "./api.js";
import { LatestWins } from "./flow.js";
import {
  type ConsoleContext,
  initComparePanel,
  initModelBar,
  initScheduleEditor,
  initToonifyPanel,
} from "./panels.js";
import { draftToJson } from "./schedule.js";
import { stateFromQuery, stateToQuery } from "./state.js";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const config = await api.config();
  const bands = config.bands;

  const state = stateFromQuery(window.location.search, bands);
  const ctx: ConsoleContext = {
    api,
    bands,
    maxResolution: config.max_resolution,
    state,
    persist() {
      const query = stateToQuery(state, bands);
      window.history.replaceState(null, "", `${window.location.pathname}?${query}`);
    },
  };

  const scheduleStatus = byId<HTMLSpanElement>("schedule-status");
  let blendId: string | null = null;
  const blendFlight = new LatestWins();

  // one settled edit -> preview rows, a fresh blend, and a new blend grid
  async function runScheduleChain(): Promise<void> {
    const scheduleJson = draftToJson(state.schedule, bands);
    try {
      const outcome = await blendFlight.run(async (signal) => {
        const rows = await api.schedulePreview(scheduleJson, signal);
        editor.renderPreview(rows);
        if (!state.baseId || !state.transferId) return null;
        return api.blend(state.baseId, state.transferId, scheduleJson, state.mapping, signal);
      });
      if (outcome === undefined) return; // superseded by a newer edit
      blendId = outcome;
      compare.refresh("blend", blendId);
      scheduleStatus.textContent = blendId ? `blended as ${blendId}` : "pick base and transfer models";
    } catch (err) {
      scheduleStatus.textContent = err instanceof Error ? err.message : String(err);
    }
  }

  const editor = initScheduleEditor(byId("schedule-panel"), ctx, {
    onEdited: () => {
      void runScheduleChain();
    },
  });
  const compare = initComparePanel(byId("compare-panel"), ctx, () => {
    compare.refresh("all", blendId);
  });
  initToonifyPanel(byId("toonify-panel"), ctx, {
    currentBlendId: () => blendId,
  });
  const modelBar = initModelBar(byId("model-bar"), ctx, () => {
    compare.refresh("all", blendId);
    void runScheduleChain();
  });

  editor.render();
  await modelBar.refresh();
  compare.refresh("all", null);
  await runScheduleChain();
}

void boot().catch((err: Error) => {
  const banner = document.getElementById("boot-error");
  if (banner) {
    banner.textContent = `console failed to start: ${err.message}`;
    banner.hidden = false;
  }
});
