import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { atEnd, frameCaption, setSpeed, startReplay, tick } from "../src/replay.js";

const here = dirname(fileURLToPath(import.meta.url));
const transcript = JSON.parse(
  readFileSync(join(here, "fixtures", "session-transcript.json"), "utf-8"),
);

describe("cascade replay", () => {
  it("plays exactly the frames the service reported", () => {
    const frames = transcript.t1_commit_nothing.cascade_frames;
    let state = startReplay(frames);
    expect(state.frames).toHaveLength(frames.length);
    expect(state.playing).toBe(true);
    let ticks = 0;
    while (!atEnd(state)) {
      state = tick(state);
      ticks += 1;
    }
    expect(ticks).toBe(frames.length - 1);
    expect(state.playing).toBe(false);
    expect(frameCaption(state)).toContain("game over");
  });

  it("does not autoplay a single quiet frame", () => {
    const frames = transcript.t0_commit_nothing.cascade_frames;
    expect(frames).toHaveLength(1);
    const state = startReplay(frames);
    expect(state.playing).toBe(false);
    expect(atEnd(state)).toBe(true);
    expect(frameCaption(state)).toContain("grid quiet");
  });

  it("ticking past the end clamps and stops", () => {
    let state = startReplay(transcript.t1_commit_nothing.cascade_frames);
    for (let i = 0; i < 10; i += 1) state = tick(state);
    expect(state.cursor).toBe(state.frames.length - 1);
    expect(state.playing).toBe(false);
  });

  it("speed control clamps to a sane floor", () => {
    const state = setSpeed(startReplay([], 1), 0);
    expect(state.frameSeconds).toBeGreaterThan(0);
  });

  it("captions name the tripped and overflowed lines", () => {
    const frames = transcript.t1_commit_nothing.cascade_frames;
    let state = startReplay(frames);
    state = tick(state); // second frame: line 0 tripped, three new overflows
    const caption = frameCaption(state);
    expect(caption).toContain("tripped lines 0");
    expect(caption).toContain("overflowed");
  });
});
