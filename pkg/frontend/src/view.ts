/** Pure view computations: every number rendered is lifted verbatim from a
 * service response; no load-flow arithmetic happens here. */

import type {
  LayoutPayload,
  ObservationPayload,
  StructurePayload,
} from "./types.js";

// matches the engine's strict overflow predicate: a line at exactly its
// limit is at-limit, not overflowed
export const OVERFLOW_EPS = 1e-9;

export type LoadingBand = "low" | "high" | "overflow";

export function loadingBand(ratio: number): LoadingBand {
  if (ratio > 1 + OVERFLOW_EPS) return "overflow";
  return ratio < 0.5 ? "low" : "high";
}

export interface BranchDrawCommand {
  branch: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  band: LoadingBand;
  dashed: boolean; // out of service
  /** +1 arrow from->to, -1 reversed, 0 no arrow (no flow or out) */
  arrow: number;
  ratio: number;
  flowMw: number;
  staged: number; // the staged switch value for this line
}

export interface SubstationDrawCommand {
  index: number;
  id: number;
  x: number;
  y: number;
  split: boolean; // a non-reference configuration is active
  hasGenerator: boolean;
  hasLoad: boolean;
}

export function branchCommands(
  observation: ObservationPayload,
  layout: LayoutPayload,
  structure: StructurePayload,
  staged: number[],
): BranchDrawCommand[] {
  const position = new Map(layout.substations.map((s) => [s.id, s]));
  return structure.branches.map((branch) => {
    const from = position.get(branch.from);
    const to = position.get(branch.to);
    if (!from || !to) {
      throw new Error(`layout/case mismatch: no coordinates for branch ${branch.index}`);
    }
    const inService = observation.line_status[branch.index] === 1;
    const flow = observation.line_pqv_origin[branch.index][0];
    const ratio = observation.relative_thermal_limits[branch.index];
    return {
      branch: branch.index,
      x1: from.x,
      y1: from.y,
      x2: to.x,
      y2: to.y,
      band: loadingBand(inService ? ratio : 0),
      dashed: !inService,
      arrow: !inService || flow === 0 ? 0 : flow > 0 ? 1 : -1,
      ratio,
      flowMw: flow,
      staged: staged[branch.index] ?? 0,
    };
  });
}

export function substationCommands(
  layout: LayoutPayload,
  structure: StructurePayload,
  topologyOnehot: number[],
): SubstationDrawCommand[] {
  const offsets: number[] = [];
  let acc = 0;
  for (const sub of structure.substations) {
    offsets.push(acc);
    acc += sub.n_configurations;
  }
  return structure.substations.map((sub, i) => {
    const layoutEntry = layout.substations.find((s) => s.id === sub.id);
    if (!layoutEntry) {
      throw new Error(`layout/case mismatch: no coordinates for substation ${sub.id}`);
    }
    const active = topologyOnehot
      .slice(offsets[i], offsets[i] + sub.n_configurations)
      .indexOf(1);
    return {
      index: sub.index,
      id: sub.id,
      x: layoutEntry.x,
      y: layoutEntry.y,
      split: active > 0,
      hasGenerator: sub.elements.some((el) => el.kind === "gen"),
      hasLoad: sub.elements.some((el) => el.kind === "load"),
    };
  });
}

/** Active configuration id per substation, decoded from the one-hot list. */
export function activeConfigurations(
  structure: StructurePayload,
  topologyOnehot: number[],
): number[] {
  const out: number[] = [];
  let offset = 0;
  for (const sub of structure.substations) {
    out.push(topologyOnehot.slice(offset, offset + sub.n_configurations).indexOf(1));
    offset += sub.n_configurations;
  }
  return out;
}

/** Selector entries: a partition rendered as two labeled element groups. */
export function configurationLabel(
  structure: StructurePayload,
  subIndex: number,
  configId: number,
): string {
  const sub = structure.substations[subIndex];
  const config = sub.configurations.find((c) => c.id === configId);
  if (!config) return `configuration ${configId}`;
  const names = (group: number[]) =>
    group.map((j) => sub.elements[j].label).join(", ");
  if (config.bus_b.length === 0) return `all together: ${names(config.bus_a)}`;
  return `bus A: ${names(config.bus_a)} | bus B: ${names(config.bus_b)}`;
}
