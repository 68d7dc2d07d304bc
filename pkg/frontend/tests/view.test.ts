import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import {
  activeConfigurations,
  branchCommands,
  configurationLabel,
  loadingBand,
  substationCommands,
} from "../src/view.js";
import type { LayoutResponse, ObservationPayload } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const transcript = JSON.parse(
  readFileSync(join(here, "fixtures", "session-transcript.json"), "utf-8"),
);

const layoutResponse: LayoutResponse = transcript.layout;
const o0: ObservationPayload = transcript.create.observation;
const o1: ObservationPayload = transcript.t0_commit_nothing.observation;

describe("loading bands", () => {
  it("splits at 0.5 and strictly above 1", () => {
    expect(loadingBand(0.0)).toBe("low");
    expect(loadingBand(0.49)).toBe("low");
    expect(loadingBand(0.5)).toBe("high");
    expect(loadingBand(0.99)).toBe("high");
    expect(loadingBand(1.0)).toBe("high"); // at-limit is not overflowed
    expect(loadingBand(1.000001)).toBe("overflow");
  });
});

describe("branch draw commands", () => {
  it("colors the t=1 observation with exactly one overflow", () => {
    const cmds = branchCommands(o1, layoutResponse.layout, layoutResponse.structure, [0, 0, 0, 0, 0]);
    expect(cmds).toHaveLength(5);
    const overflowed = cmds.filter((c) => c.band === "overflow");
    expect(overflowed).toHaveLength(1);
    expect(overflowed[0].branch).toBe(0);
    expect(cmds.every((c) => !c.dashed)).toBe(true);
  });

  it("renders every ratio verbatim from the observation", () => {
    const cmds = branchCommands(o0, layoutResponse.layout, layoutResponse.structure, [0, 0, 0, 0, 0]);
    for (const cmd of cmds) {
      expect(cmd.ratio).toBe(o0.relative_thermal_limits[cmd.branch]);
      expect(cmd.flowMw).toBe(o0.line_pqv_origin[cmd.branch][0]);
    }
  });

  it("arrows follow the flow sign", () => {
    const cmds = branchCommands(o0, layoutResponse.layout, layoutResponse.structure, [0, 0, 0, 0, 0]);
    for (const cmd of cmds) {
      if (cmd.flowMw > 0) expect(cmd.arrow).toBe(1);
      else if (cmd.flowMw < 0) expect(cmd.arrow).toBe(-1);
    }
  });

  it("marks out-of-service lines dashed with no arrow", () => {
    const observation = structuredClone(o0) as ObservationPayload;
    observation.line_status[3] = 0;
    observation.line_pqv_origin[3][0] = 0;
    const cmds = branchCommands(observation, layoutResponse.layout, layoutResponse.structure, [0, 0, 0, 0, 0]);
    expect(cmds[3].dashed).toBe(true);
    expect(cmds[3].arrow).toBe(0);
    expect(cmds[3].band).toBe("low");
  });

  it("raises a mismatch error when the layout misses a substation", () => {
    const layout = structuredClone(layoutResponse.layout);
    layout.substations = layout.substations.slice(1);
    expect(() =>
      branchCommands(o0, layout, layoutResponse.structure, [0, 0, 0, 0, 0]),
    ).toThrow(/mismatch/);
  });
});

describe("substation commands and selectors", () => {
  it("decodes the reference topology as unsplit", () => {
    const cmds = substationCommands(
      layoutResponse.layout,
      layoutResponse.structure,
      o0.topology_onehot,
    );
    expect(cmds).toHaveLength(4);
    expect(cmds.every((c) => !c.split)).toBe(true);
    expect(cmds.filter((c) => c.hasGenerator).map((c) => c.id)).toEqual([1, 4]);
    expect(cmds.filter((c) => c.hasLoad).map((c) => c.id)).toEqual([2, 3]);
    expect(activeConfigurations(layoutResponse.structure, o0.topology_onehot)).toEqual([0, 0, 0, 0]);
  });

  it("labels partitions as two element groups", () => {
    const label = configurationLabel(layoutResponse.structure, 1, 1);
    expect(label).toContain("bus A");
    expect(label).toContain("bus B");
    expect(label).toContain("load C2");
    const together = configurationLabel(layoutResponse.structure, 1, 0);
    expect(together).toContain("all together");
  });
});
