/** Cascade replay: step through the frames the service returned, one per
 * tick. Frame count and contents come verbatim from the action response. */

import type { CascadeFramePayload } from "./types.js";

export interface ReplayState {
  frames: CascadeFramePayload[];
  cursor: number; // index of the frame on display
  playing: boolean;
  frameSeconds: number;
}

export function startReplay(
  frames: CascadeFramePayload[],
  frameSeconds = 1.0,
): ReplayState {
  return { frames, cursor: 0, playing: frames.length > 1, frameSeconds };
}

export function tick(state: ReplayState): ReplayState {
  if (!state.playing) return state;
  const next = Math.min(state.cursor + 1, state.frames.length - 1);
  return { ...state, cursor: next, playing: next < state.frames.length - 1 };
}

export function atEnd(state: ReplayState): boolean {
  return state.cursor >= state.frames.length - 1;
}

export function setSpeed(state: ReplayState, frameSeconds: number): ReplayState {
  return { ...state, frameSeconds: Math.max(0.1, frameSeconds) };
}

export function frameCaption(state: ReplayState): string {
  const frame = state.frames[state.cursor];
  if (!frame) return "";
  const parts: string[] = [`frame ${state.cursor + 1}/${state.frames.length}`];
  if (frame.tripped.length > 0) {
    parts.push(`tripped lines ${frame.tripped.join(", ")}`);
  }
  if (frame.overflowed.length > 0) {
    parts.push(`overflowed: ${frame.overflowed.join(", ")}`);
  }
  if (frame.budget_exceeded) {
    parts.push("iteration budget exceeded");
  } else if (frame.load_was_cut) {
    parts.push("load cut - game over");
  } else if (frame.overflowed.length === 0) {
    parts.push("grid quiet");
  }
  return parts.join(" | ");
}
