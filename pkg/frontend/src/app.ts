/** Browser entry point: session lifecycle, SVG grid, staging panel,
 * what-if preview and cascade replay. */

import { ApiError, GameClient } from "./api.js";
import {
  StagedAction,
  cycleLine,
  emptyStage,
  isWellFormed,
  setConfiguration,
  toPayload,
} from "./staging.js";
import {
  ReplayState,
  atEnd,
  frameCaption,
  setSpeed,
  startReplay,
  tick,
} from "./replay.js";
import {
  activeConfigurations,
  branchCommands,
  configurationLabel,
  substationCommands,
} from "./view.js";
import type {
  ActionResponse,
  LayoutResponse,
  ObservationPayload,
  RewardBreakdown,
  SimulateResponse,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const PAD = 60;
const SIZE = 640;

interface AppState {
  client: GameClient;
  sessionId: string | null;
  layout: LayoutResponse | null;
  observation: ObservationPayload | null;
  stage: StagedAction;
  preview: SimulateResponse | null;
  lastReward: RewardBreakdown | null;
  replay: ReplayState | null;
  committing: boolean;
  done: boolean;
  selectedSubstation: number | null;
  status: string;
}

const state: AppState = {
  client: new GameClient(""),
  sessionId: null,
  layout: null,
  observation: null,
  stage: emptyStage(0, 0),
  preview: null,
  lastReward: null,
  replay: null,
  committing: false,
  done: false,
  selectedSubstation: null,
  status: "no session",
};

let previewTimer: number | undefined;
let replayTimer: number | undefined;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function configCounts(): number[] {
  return state.layout?.structure.substations.map((s) => s.n_configurations) ?? [];
}

function scaleX(x: number): number {
  return PAD + x * (SIZE - 2 * PAD);
}

function scaleY(y: number): number {
  return SIZE - PAD - y * (SIZE - 2 * PAD);
}

// --- rendering ---------------------------------------------------------------

function renderGrid(): void {
  const host = document.getElementById("grid")!;
  host.textContent = "";
  if (!state.layout || !state.observation) {
    host.append(el("p", { class: "placeholder" }, "start a session to see the grid"));
    return;
  }
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${SIZE} ${SIZE}`);

  const replayFrame =
    state.replay && state.replay.frames.length > 0
      ? state.replay.frames[state.replay.cursor]
      : null;

  for (const cmd of branchCommands(
    state.observation,
    state.layout.layout,
    state.layout.structure,
    state.stage.lineSwitches,
  )) {
    const group = document.createElementNS(SVG_NS, "g");
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(scaleX(cmd.x1)));
    line.setAttribute("y1", String(scaleY(cmd.y1)));
    line.setAttribute("x2", String(scaleX(cmd.x2)));
    line.setAttribute("y2", String(scaleY(cmd.y2)));
    const classes = ["branch", `band-${cmd.band}`];
    if (cmd.dashed) classes.push("out");
    if (cmd.staged !== 0) classes.push(cmd.staged === 1 ? "staged-on" : "staged-off");
    if (replayFrame?.tripped.includes(cmd.branch)) classes.push("replay-tripped");
    if (replayFrame?.overflowed.includes(cmd.branch)) classes.push("replay-overflow");
    line.setAttribute("class", classes.join(" "));
    line.addEventListener("click", () => onLineClicked(cmd.branch));

    const title = document.createElementNS(SVG_NS, "title");
    title.textContent =
      `line ${cmd.branch}: ${cmd.flowMw.toFixed(1)} MW, ` +
      `${(100 * cmd.ratio).toFixed(1)}% of limit` +
      (cmd.dashed ? " (out of service)" : "");
    line.append(title);
    group.append(line);

    if (cmd.arrow !== 0) {
      const t = 0.62;
      const sx = cmd.arrow === 1 ? cmd.x1 : cmd.x2;
      const sy = cmd.arrow === 1 ? cmd.y1 : cmd.y2;
      const ex = cmd.arrow === 1 ? cmd.x2 : cmd.x1;
      const ey = cmd.arrow === 1 ? cmd.y2 : cmd.y1;
      const mx = scaleX(sx + (ex - sx) * t);
      const my = scaleY(sy + (ey - sy) * t);
      const angle = Math.atan2(scaleY(ey) - scaleY(sy), scaleX(ex) - scaleX(sx));
      const arrow = document.createElementNS(SVG_NS, "path");
      const a1 = angle + 2.6;
      const a2 = angle - 2.6;
      arrow.setAttribute(
        "d",
        `M ${mx} ${my} L ${mx + 12 * Math.cos(a1)} ${my + 12 * Math.sin(a1)} ` +
          `M ${mx} ${my} L ${mx + 12 * Math.cos(a2)} ${my + 12 * Math.sin(a2)}`,
      );
      arrow.setAttribute("class", `arrow band-${cmd.band}`);
      group.append(arrow);
    }
    svg.append(group);
  }

  for (const cmd of substationCommands(
    state.layout.layout,
    state.layout.structure,
    state.observation.topology_onehot,
  )) {
    const group = document.createElementNS(SVG_NS, "g");
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(scaleX(cmd.x)));
    circle.setAttribute("cy", String(scaleY(cmd.y)));
    circle.setAttribute("r", "14");
    const classes = ["substation"];
    if (cmd.split) classes.push("split");
    if (state.stage.configChoices[cmd.index] !== null) classes.push("staged");
    if (state.selectedSubstation === cmd.index) classes.push("selected");
    circle.setAttribute("class", classes.join(" "));
    circle.addEventListener("click", () => onSubstationClicked(cmd.index));
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(scaleX(cmd.x)));
    label.setAttribute("y", String(scaleY(cmd.y) - 20));
    label.setAttribute("class", "sub-label");
    label.textContent =
      `${cmd.id}` +
      (cmd.hasGenerator ? " G" : "") +
      (cmd.hasLoad ? " C" : "");
    group.append(circle, label);
    svg.append(group);
  }
  host.append(svg);
}

function rewardRows(reward: RewardBreakdown): HTMLElement {
  const table = el("table", { class: "reward" });
  const rows: [string, number][] = [
    ["line usage", reward.line_usage],
    ["load cut", reward.load_cut],
    ["action cost", reward.action_cost],
    ["distance to reference", reward.distance_to_reference],
    ["total", reward.total],
  ];
  for (const [name, value] of rows) {
    const tr = el("tr");
    tr.append(el("td", {}, name), el("td", { class: "num" }, value.toFixed(3)));
    table.append(tr);
  }
  return table;
}

function renderPanel(): void {
  const panel = document.getElementById("panel")!;
  panel.textContent = "";

  panel.append(el("div", { class: "status" }, state.status));

  if (state.observation) {
    panel.append(
      el(
        "div",
        { class: "overview" },
        `step ${state.observation.step_index} | overflows: ` +
          `${state.observation.overflow_count}`,
      ),
    );
  }

  if (state.lastReward) {
    panel.append(el("h3", {}, "last reward"), rewardRows(state.lastReward));
  }

  const previewBox = el("div", { class: "preview" });
  previewBox.append(el("h3", {}, "what-if preview"));
  if (state.preview) {
    previewBox.append(rewardRows(state.preview.reward));
    previewBox.append(
      el(
        "div",
        {},
        state.preview.predicted_overflows.length === 0
          ? "predicted overflows: none"
          : `predicted overflows: lines ${state.preview.predicted_overflows.join(", ")}`,
      ),
    );
    if (state.preview.would_cut_load) {
      previewBox.append(el("div", { class: "danger" }, "this action cuts load"));
    }
  } else {
    previewBox.append(el("div", {}, "stage an action to preview it"));
  }
  panel.append(previewBox);

  if (state.selectedSubstation !== null && state.layout) {
    const sub = state.layout.structure.substations[state.selectedSubstation];
    const box = el("div", { class: "selector" });
    box.append(el("h3", {}, `substation ${sub.id} configuration`));
    const current = state.layout
      ? activeConfigurations(
          state.layout.structure,
          state.observation?.topology_onehot ?? [],
        )[state.selectedSubstation]
      : 0;
    for (const config of sub.configurations) {
      const row = el("label", { class: "config-row" });
      const radio = el("input", {
        type: "radio",
        name: "config",
        value: String(config.id),
      }) as HTMLInputElement;
      const stagedChoice = state.stage.configChoices[state.selectedSubstation];
      radio.checked =
        stagedChoice !== null ? stagedChoice === config.id : current === config.id;
      radio.addEventListener("change", () => onConfigurationChosen(config.id));
      row.append(
        radio,
        el(
          "span",
          { class: config.id === current ? "current" : "" },
          configurationLabel(state.layout.structure, state.selectedSubstation, config.id),
        ),
      );
      box.append(row);
    }
    panel.append(box);
  }

  if (state.replay && state.replay.frames.length > 1) {
    const box = el("div", { class: "replay" });
    box.append(el("h3", {}, "cascade replay"));
    box.append(el("div", {}, frameCaption(state.replay)));
    const speed = el("input", {
      type: "range",
      min: "0.2",
      max: "3",
      step: "0.2",
      value: String(state.replay.frameSeconds),
    }) as HTMLInputElement;
    speed.addEventListener("input", () => {
      if (state.replay) {
        state.replay = setSpeed(state.replay, Number(speed.value));
        scheduleReplayTick();
      }
    });
    box.append(el("div", {}, "seconds per frame"), speed);
    panel.append(box);
  }

  const controls = el("div", { class: "controls" });
  const commit = el("button", {}, "commit action") as HTMLButtonElement;
  commit.disabled =
    state.committing ||
    state.done ||
    !state.sessionId ||
    !isWellFormed(
      state.stage,
      state.observation?.line_status.length ?? 0,
      configCounts(),
    );
  commit.addEventListener("click", () => void commitAction());
  controls.append(commit);

  const clear = el("button", {}, "clear staged") as HTMLButtonElement;
  clear.addEventListener("click", () => {
    resetStage();
    render();
  });
  controls.append(clear);

  if (state.done && state.sessionId) {
    const reset = el("button", { class: "danger" }, "start next epoch") as HTMLButtonElement;
    reset.addEventListener("click", () => void resetEpoch());
    controls.append(reset);
  }
  panel.append(controls);
}

function render(): void {
  renderGrid();
  renderPanel();
}

// --- interactions ------------------------------------------------------------

function resetStage(): void {
  const nBranches = state.observation?.line_status.length ?? 0;
  const nSubs = state.layout?.structure.substations.length ?? 0;
  state.stage = emptyStage(nBranches, nSubs);
  state.preview = null;
}

function onLineClicked(branch: number): void {
  if (state.done) return;
  state.stage = cycleLine(state.stage, branch);
  schedulePreview();
  render();
}

function onSubstationClicked(subIndex: number): void {
  state.selectedSubstation =
    state.selectedSubstation === subIndex ? null : subIndex;
  render();
}

function onConfigurationChosen(configId: number): void {
  if (state.selectedSubstation === null) return;
  state.stage = setConfiguration(state.stage, state.selectedSubstation, configId);
  schedulePreview();
  render();
}

function schedulePreview(): void {
  window.clearTimeout(previewTimer);
  previewTimer = window.setTimeout(() => void refreshPreview(), 200);
}

async function refreshPreview(): Promise<void> {
  if (!state.sessionId || state.done) return;
  try {
    state.preview = await state.client.whatIf(
      state.sessionId,
      toPayload(state.stage, configCounts()),
    );
    state.status = "preview up to date";
  } catch (err) {
    state.preview = null;
    state.status = describeError(err);
  }
  render();
}

function scheduleReplayTick(): void {
  window.clearTimeout(replayTimer);
  if (!state.replay || !state.replay.playing) return;
  replayTimer = window.setTimeout(() => {
    if (!state.replay) return;
    state.replay = tick(state.replay);
    if (!atEnd(state.replay)) scheduleReplayTick();
    render();
  }, state.replay.frameSeconds * 1000);
}

async function commitAction(): Promise<void> {
  if (!state.sessionId || state.committing) return; // single writer
  state.committing = true;
  state.status = "committing...";
  render();
  try {
    const response: ActionResponse = await state.client.postAction(
      state.sessionId,
      toPayload(state.stage, configCounts()),
    );
    state.lastReward = response.reward;
    state.done = response.done;
    state.observation = response.observation ?? state.observation;
    state.replay = startReplay(response.cascade_frames);
    scheduleReplayTick();
    if (response.game_over) {
      state.status = "load cut - game over";
    } else if (response.chronic_exhausted) {
      state.status = "schedule exhausted - run complete";
    } else {
      state.status = "action applied";
    }
    resetStage();
  } catch (err) {
    state.status = describeError(err);
  } finally {
    state.committing = false;
    render();
  }
}

async function resetEpoch(): Promise<void> {
  if (!state.sessionId) return;
  try {
    const response = await state.client.reset(state.sessionId);
    state.observation = response.observation;
    state.done = false;
    state.lastReward = null;
    state.replay = null;
    state.status = `new epoch, ${response.remaining_steps} steps remaining`;
    resetStage();
  } catch (err) {
    state.status = describeError(err);
  }
  render();
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) return `error ${err.code}: ${err.message}`;
  return `error: ${String(err)}`;
}

// --- bootstrap ----------------------------------------------------------------

async function startSession(caseName: string, chronicName: string): Promise<void> {
  try {
    const created = await state.client.createSession(caseName, chronicName);
    state.sessionId = created.session_id;
    state.observation = created.observation;
    state.layout = await state.client.layout(created.session_id);
    state.done = false;
    state.lastReward = null;
    state.preview = null;
    state.replay = null;
    state.selectedSubstation = null;
    resetStage();
    state.status = `session on ${caseName} / ${chronicName}`;
  } catch (err) {
    state.status = describeError(err);
  }
  render();
}

async function boot(): Promise<void> {
  const caseSelect = document.getElementById("case-select") as HTMLSelectElement;
  const chronicSelect = document.getElementById("chronic-select") as HTMLSelectElement;
  const startButton = document.getElementById("start") as HTMLButtonElement;

  try {
    const [cases, chronics] = await Promise.all([
      state.client.listCases(),
      state.client.listChronics(),
    ]);
    for (const name of cases.cases) {
      caseSelect.append(el("option", { value: name }, name));
    }
    const fillChronics = () => {
      chronicSelect.textContent = "";
      for (const name of chronics.chronics[caseSelect.value] ?? []) {
        chronicSelect.append(el("option", { value: name }, name));
      }
    };
    caseSelect.addEventListener("change", fillChronics);
    fillChronics();
  } catch (err) {
    state.status = describeError(err);
  }

  startButton.addEventListener("click", () =>
    void startSession(caseSelect.value, chronicSelect.value),
  );
  render();
}

if (typeof document !== "undefined" && document.getElementById("grid")) {
  void boot();
}
