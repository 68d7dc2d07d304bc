import { describe, expect, it } from "vitest";

import {
  cycleLine,
  emptyStage,
  isDoNothing,
  isWellFormed,
  setConfiguration,
  toPayload,
} from "../src/staging.js";

const COUNTS = [1, 4, 1, 4];

describe("staged action", () => {
  it("starts as the do-nothing action", () => {
    const stage = emptyStage(5, 4);
    expect(isDoNothing(stage)).toBe(true);
    expect(toPayload(stage, COUNTS)).toEqual({
      line_switches: [0, 0, 0, 0, 0],
      substation_choices: [null, null, null, null],
    });
  });

  it("cycles a line through 0 -> +1 -> -1 -> 0", () => {
    let stage = emptyStage(5, 4);
    stage = cycleLine(stage, 2);
    expect(stage.lineSwitches[2]).toBe(1);
    stage = cycleLine(stage, 2);
    expect(stage.lineSwitches[2]).toBe(-1);
    stage = cycleLine(stage, 2);
    expect(stage.lineSwitches[2]).toBe(0);
    expect(stage.lineSwitches.filter((v) => v !== 0)).toHaveLength(0);
  });

  it("does not mutate previous stages", () => {
    const before = emptyStage(5, 4);
    const after = cycleLine(before, 0);
    expect(before.lineSwitches[0]).toBe(0);
    expect(after.lineSwitches[0]).toBe(1);
  });

  it("encodes a configuration choice as a one-hot of the right length", () => {
    const stage = setConfiguration(emptyStage(5, 4), 1, 2);
    const payload = toPayload(stage, COUNTS);
    expect(payload.substation_choices[1]).toEqual([0, 0, 1, 0]);
    expect(payload.substation_choices[0]).toBeNull();
  });

  it("clears a choice with null", () => {
    let stage = setConfiguration(emptyStage(5, 4), 1, 2);
    stage = setConfiguration(stage, 1, null);
    expect(toPayload(stage, COUNTS).substation_choices[1]).toBeNull();
  });

  it("validates shapes before the commit control enables", () => {
    const good = setConfiguration(cycleLine(emptyStage(5, 4), 0), 3, 1);
    expect(isWellFormed(good, 5, COUNTS)).toBe(true);
    expect(isWellFormed(good, 6, COUNTS)).toBe(false); // wrong branch count
    const badChoice = setConfiguration(emptyStage(5, 4), 1, 9);
    expect(isWellFormed(badChoice, 5, COUNTS)).toBe(false);
    const badSwitch = emptyStage(5, 4);
    badSwitch.lineSwitches[0] = 2;
    expect(isWellFormed(badSwitch, 5, COUNTS)).toBe(false);
  });
});
