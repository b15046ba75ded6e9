// DOM wiring for the classroom companion. One createApp() builds the whole
// page inside a root element; tests drive it with a mocked fetch.
//
// The UI never computes an authoritative posterior: every displayed number
// comes from a service response. The only client-side math is the fallback
// prior curve shown (and tagged approximate) when the service is down.

import { ApiClient, ApiError } from "./api.js";
import type { Grid, PosteriorResponse, SessionState } from "./api.js";
import { renderChart } from "./chart.js";
import { fallbackBetaGrid } from "./density.js";
import { advance, can, phaseOf } from "./phase.js";
import type { Phase } from "./phase.js";

export interface AppOptions {
  pollIntervalMs?: number;
  debounceMs?: number;
}

export interface App {
  state: AppState;
  refresh(): Promise<void>;
  stop(): void;
}

export interface AppState {
  sessionId: string | null;
  phase: Phase;
  expertMode: boolean;
  mean: number;
  ess: number;
  alpha: number;
  beta: number;
  priorGrid: Grid | null;
  priorApproximate: boolean;
  posterior: PosteriorResponse | null;
  offline: boolean;
}

const COLOURS = ["blue", "orange", "green", "yellow", "red", "brown"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  if (text) node.textContent = text;
  return node;
}

const TEMPLATE = `
  <div id="service-banner" hidden>service unreachable: curves are approximate until it returns</div>
  <section id="setup-panel">
    <button id="create-session">start class session</button>
    <span id="session-label"></span>
  </section>
  <section id="prior-panel">
    <h2>class prior</h2>
    <label id="mean-group">mean
      <input id="prior-mean" type="range" min="0.01" max="0.99" step="0.01" value="0.18">
      <output id="mean-out">0.18</output>
    </label>
    <label id="ess-group">pseudo-count
      <input id="prior-ess" type="range" min="0.5" max="60" step="0.5" value="11">
      <output id="ess-out">11</output>
    </label>
    <label id="expert-label"><input id="expert-toggle" type="checkbox"> alpha/beta sliders</label>
    <div id="expert-group" hidden>
      <label>alpha <input id="prior-alpha" type="range" min="0.1" max="40" step="0.1" value="2"></label>
      <label>beta <input id="prior-beta" type="range" min="0.1" max="40" step="0.1" value="9"></label>
    </div>
    <p id="prior-readout"></p>
    <p id="approx-note" hidden>approximate client-side curve</p>
    <div id="prior-chart"></div>
    <button id="lock-prior">lock the class prior</button>
  </section>
  <section id="tally-panel">
    <h2>submit your bag</h2>
    <form id="tally-form">
      <input id="bag-id" placeholder="bag id" required>
      <span id="count-inputs"></span>
      <input id="lot-code" placeholder="lot code (optional)">
      <button id="submit-tally" type="submit">submit tally</button>
    </form>
    <p id="tally-error" class="error" hidden></p>
  </section>
  <section id="posterior-panel">
    <h2>class posterior</h2>
    <p id="posterior-data"></p>
    <p id="posterior-mean"></p>
    <div id="posterior-chart"></div>
  </section>
  <section id="reveal-panel">
    <button id="reveal">reveal the factories</button>
    <div id="reveal-view" hidden>
      <p id="factory-verdict"></p>
      <ul id="factory-probs"></ul>
      <label>check your lot code
        <input id="lot-input" placeholder="e.g. 532HKP2">
      </label>
      <button id="lot-check" type="button">check</button>
      <p id="lot-badge"></p>
    </div>
  </section>
`;

export function createApp(
  root: HTMLElement,
  api: ApiClient,
  opts: AppOptions = {},
): App {
  const pollMs = opts.pollIntervalMs ?? 2000;
  const debounceMs = opts.debounceMs ?? 150;
  root.innerHTML = TEMPLATE;

  const state: AppState = {
    sessionId: null,
    phase: "eliciting",
    expertMode: false,
    mean: 0.18,
    ess: 11,
    alpha: 2,
    beta: 9,
    priorGrid: null,
    priorApproximate: false,
    posterior: null,
    offline: false,
  };

  const $ = <T extends HTMLElement>(id: string): T => {
    const node = root.querySelector<T>(`#${id}`);
    if (!node) throw new Error(`missing element #${id}`);
    return node;
  };

  const countInputs = $("count-inputs");
  for (const colour of COLOURS) {
    const label = el("label", {}, `${colour} `);
    const input = el("input", {
      id: `count-${colour}`,
      type: "number",
      min: "0",
      step: "1",
      value: "0",
    });
    label.appendChild(input);
    countInputs.appendChild(label);
  }

  function currentParams(): { alpha: number; beta: number } {
    if (state.expertMode) {
      return { alpha: state.alpha, beta: state.beta };
    }
    return {
      alpha: state.mean * state.ess,
      beta: (1 - state.mean) * state.ess,
    };
  }

  function renderGates(): void {
    const p = state.phase;
    const elicitable = can.editPrior(p) && state.sessionId !== null;
    for (const id of ["prior-mean", "prior-ess", "prior-alpha", "prior-beta", "expert-toggle"]) {
      $<HTMLInputElement>(id).disabled = !elicitable;
    }
    $<HTMLButtonElement>("lock-prior").disabled = !(
      can.lockPrior(p) && state.sessionId !== null
    );
    $<HTMLButtonElement>("submit-tally").disabled = !can.submitTally(p);
    $<HTMLButtonElement>("reveal").disabled = !can.reveal(p);
    $<HTMLInputElement>("lot-input").disabled = !can.checkLotCode(p);
    $<HTMLButtonElement>("lot-check").disabled = !can.checkLotCode(p);
    $<HTMLButtonElement>("create-session").disabled = state.sessionId !== null;
  }

  function renderPrior(): void {
    const { alpha, beta } = currentParams();
    $("prior-readout").textContent =
      `Beta(${alpha.toFixed(2)}, ${beta.toFixed(2)})`;
    $("mean-out").textContent = state.mean.toFixed(2);
    $("ess-out").textContent = String(state.ess);
    $("approx-note").hidden = !state.priorApproximate;
    if (state.priorGrid) {
      const chart = renderChart(
        [{
          grid: state.priorGrid,
          colour: "#1f77b4",
          label: state.priorApproximate ? "prior (approx)" : "prior",
          dashed: state.priorApproximate,
        }],
      );
      $("prior-chart").innerHTML = chart;
      const svg = $("prior-chart").firstElementChild;
      if (svg && state.priorApproximate) svg.classList.add("approximate");
    }
  }

  function renderPosterior(): void {
    const body = state.posterior;
    if (!body) {
      $("posterior-data").textContent = "no data yet";
      $("posterior-mean").textContent = "";
      return;
    }
    $("posterior-data").textContent =
      `pooled data: ${body.data.blue} blue of ${body.data.total}`;
    $("posterior-mean").textContent =
      `posterior mean ${body.summary.mean.toFixed(4)} ` +
      `(Beta(${body.posterior.alpha}, ${body.posterior.beta}), ` +
      `${Math.round(body.summary.level * 100)}% interval ` +
      `[${body.summary.interval[0].toFixed(4)}, ${body.summary.interval[1].toFixed(4)}])`;
    const curves = [];
    if (state.priorGrid) {
      curves.push({
        grid: state.priorGrid,
        colour: "#999999",
        dashed: true,
        label: "prior",
      });
    }
    curves.push({ grid: body.grid, colour: "#2ca02c", label: "posterior" });
    $("posterior-chart").innerHTML = renderChart(curves, {
      meanLine: body.summary.mean,
    });
  }

  function setOffline(offline: boolean): void {
    state.offline = offline;
    $("service-banner").hidden = !offline;
  }

  let previewTimer: ReturnType<typeof setTimeout> | null = null;

  async function refreshPreview(): Promise<void> {
    const { alpha, beta } = currentParams();
    try {
      state.priorGrid = await api.preview(alpha, beta);
      state.priorApproximate = false;
      setOffline(false);
    } catch (err) {
      if (err instanceof ApiError) throw err; // validation problem, not outage
      state.priorGrid = fallbackBetaGrid(alpha, beta);
      state.priorApproximate = true;
      setOffline(true);
    }
    renderPrior();
  }

  function schedulePreview(): void {
    if (previewTimer) clearTimeout(previewTimer);
    previewTimer = setTimeout(() => {
      void refreshPreview();
    }, debounceMs);
  }

  async function refreshPosterior(): Promise<void> {
    if (!state.sessionId) return;
    try {
      const body = await api.getPosterior(state.sessionId);
      if (body) {
        state.posterior = body; // stale responses return null and are dropped
        renderPosterior();
      }
      setOffline(false);
    } catch (err) {
      if (!(err instanceof ApiError)) setOffline(true);
    }
  }

  function applySession(session: SessionState): void {
    state.sessionId = session.id;
    state.phase = advance(state.phase, phaseOf(session));
    $("session-label").textContent = `session ${session.id}`;
    if (session.prior && !can.editPrior(state.phase)) {
      state.alpha = session.prior.alpha;
      state.beta = session.prior.beta;
    }
    renderGates();
  }

  async function refresh(): Promise<void> {
    if (!state.sessionId) return;
    try {
      const session = await api.getSession(state.sessionId);
      if (session) applySession(session);
      setOffline(false);
      if (state.phase !== "eliciting") {
        await refreshPosterior();
      }
    } catch (err) {
      if (!(err instanceof ApiError)) setOffline(true);
    }
  }

  $("create-session").addEventListener("click", () => {
    void (async () => {
      const session = await api.createSession();
      applySession(session);
      const { alpha, beta } = currentParams();
      await api.setPrior(session.id, { alpha, beta });
      await refreshPreview();
    })();
  });

  function onSliderInput(): void {
    state.mean = Number($<HTMLInputElement>("prior-mean").value);
    state.ess = Number($<HTMLInputElement>("prior-ess").value);
    state.alpha = Number($<HTMLInputElement>("prior-alpha").value);
    state.beta = Number($<HTMLInputElement>("prior-beta").value);
    renderPrior();
    if (state.sessionId && can.editPrior(state.phase)) {
      const { alpha, beta } = currentParams();
      void api.setPrior(state.sessionId, { alpha, beta }).catch(() => {
        setOffline(true);
      });
    }
    schedulePreview();
  }
  for (const id of ["prior-mean", "prior-ess", "prior-alpha", "prior-beta"]) {
    $(id).addEventListener("input", onSliderInput);
  }

  $("expert-toggle").addEventListener("change", () => {
    state.expertMode = $<HTMLInputElement>("expert-toggle").checked;
    $("expert-group").hidden = !state.expertMode;
    $("mean-group").hidden = state.expertMode;
    $("ess-group").hidden = state.expertMode;
    onSliderInput();
  });

  $("lock-prior").addEventListener("click", () => {
    if (!state.sessionId) return;
    void (async () => {
      try {
        const session = await api.lockPrior(state.sessionId!);
        applySession(session);
      } catch (err) {
        if (err instanceof ApiError) showTallyError(err.message);
      }
    })();
  });

  function showTallyError(message: string): void {
    const box = $("tally-error");
    box.textContent = message;
    box.hidden = false;
  }

  $("tally-form").addEventListener("submit", (event) => {
    event.preventDefault();
    if (!state.sessionId || !can.submitTally(state.phase)) return;
    $("tally-error").hidden = true;
    const counts: Record<string, number> = {};
    let total = 0;
    for (const colour of COLOURS) {
      const v = Number($<HTMLInputElement>(`count-${colour}`).value || "0");
      counts[colour] = v;
      total += v;
    }
    if (total < 1) {
      showTallyError("a bag must contain at least one candy");
      return;
    }
    const bagId = $<HTMLInputElement>("bag-id").value.trim();
    const lot = $<HTMLInputElement>("lot-code").value.trim();
    void (async () => {
      try {
        await api.addBag(state.sessionId!, {
          bag_id: bagId,
          counts,
          ...(lot ? { lot_code: lot } : {}),
        });
        await refreshPosterior();
      } catch (err) {
        if (err instanceof ApiError) {
          showTallyError(err.rule ? `${err.rule}: ${err.message}` : err.message);
        } else {
          setOffline(true);
        }
      }
    })();
  });

  $("reveal").addEventListener("click", () => {
    if (!state.sessionId || !can.reveal(state.phase)) return;
    void (async () => {
      try {
        const body = await api.reveal(state.sessionId!);
        state.phase = advance(state.phase, "revealed");
        const probs = $("factory-probs");
        probs.innerHTML = "";
        let best = body.factories[0];
        for (const f of body.factories) {
          if (f.probability > best.probability) best = f;
          const item = el("li", {}, `${f.name}: P=${f.probability.toFixed(3)}`);
          probs.appendChild(item);
        }
        $("factory-verdict").textContent =
          `the class data points to ${best.name} (P=${best.probability.toFixed(3)})`;
        $("reveal-view").hidden = false;
        renderGates();
      } catch (err) {
        if (err instanceof ApiError) showTallyError(err.message);
      }
    })();
  });

  $("lot-check").addEventListener("click", () => {
    const text = $<HTMLInputElement>("lot-input").value.toUpperCase();
    const badge = $("lot-badge");
    // plain substring scan mirroring the service's lot-code rules
    const hits = [
      ["HKP", "New Jersey"],
      ["CLV", "Tennessee"],
    ].filter(([code]) => text.includes(code));
    if (hits.length === 1) {
      badge.textContent = hits[0][1];
      badge.className = "badge known";
    } else {
      badge.textContent = "unknown";
      badge.className = "badge unknown";
    }
  });

  renderGates();
  renderPrior();
  renderPosterior();

  let pollTimer: ReturnType<typeof setInterval> | null = null;
  if (pollMs > 0) {
    let busy = false;
    pollTimer = setInterval(() => {
      if (busy) return;
      busy = true;
      void refresh().finally(() => {
        busy = false;
      });
    }, pollMs);
  }

  return {
    state,
    refresh,
    stop() {
      if (pollTimer) clearInterval(pollTimer);
      if (previewTimer) clearTimeout(previewTimer);
    },
  };
}
