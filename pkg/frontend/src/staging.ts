/** Staged-action state: what the dispatcher has queued but not committed.
 * Purely structural; the commit control only enables when the shape checks
 * pass, mirroring the server's validation. */

import type { ActionPayload } from "./types.js";

export interface StagedAction {
  lineSwitches: number[];
  configChoices: (number | null)[]; // chosen configuration id per substation
}

export function emptyStage(nBranches: number, nSubstations: number): StagedAction {
  return {
    lineSwitches: new Array(nBranches).fill(0),
    configChoices: new Array(nSubstations).fill(null),
  };
}

/** Clicking a line cycles its staged entry 0 -> +1 -> -1 -> 0. */
export function cycleLine(stage: StagedAction, branch: number): StagedAction {
  const next = [...stage.lineSwitches];
  const cycle: Record<number, number> = { 0: 1, 1: -1, [-1]: 0 };
  next[branch] = cycle[next[branch]];
  return { ...stage, lineSwitches: next };
}

export function setConfiguration(
  stage: StagedAction,
  subIndex: number,
  configId: number | null,
): StagedAction {
  const next = [...stage.configChoices];
  next[subIndex] = configId;
  return { ...stage, configChoices: next };
}

export function isDoNothing(stage: StagedAction): boolean {
  return (
    stage.lineSwitches.every((v) => v === 0) &&
    stage.configChoices.every((c) => c === null)
  );
}

/** Client-side shape validation gating the commit control. */
export function isWellFormed(
  stage: StagedAction,
  nBranches: number,
  configCounts: number[],
): boolean {
  if (stage.lineSwitches.length !== nBranches) return false;
  if (!stage.lineSwitches.every((v) => v === -1 || v === 0 || v === 1)) return false;
  if (stage.configChoices.length !== configCounts.length) return false;
  return stage.configChoices.every(
    (c, i) => c === null || (Number.isInteger(c) && c >= 0 && c < configCounts[i]),
  );
}

/** Encode for the wire: one-hot per chosen substation, null elsewhere. */
export function toPayload(stage: StagedAction, configCounts: number[]): ActionPayload {
  return {
    line_switches: [...stage.lineSwitches],
    substation_choices: stage.configChoices.map((choice, i) => {
      if (choice === null) return null;
      const onehot = new Array(configCounts[i]).fill(0);
      onehot[choice] = 1;
      return onehot;
    }),
  };
}
