/** Wire types mirroring the service's canonical encoding. */

export interface RewardBreakdown {
  line_usage: number;
  load_cut: number;
  action_cost: number;
  distance_to_reference: number;
  total: number;
}

export interface ObservationPayload {
  prod_pqv: number[][];
  load_pqv: number[][];
  line_pqv_origin: number[][];
  line_pqv_extremity: number[][];
  relative_thermal_limits: number[];
  topology_onehot: number[];
  line_status: number[];
  overflow_count: number;
  step_index: number;
}

export interface CascadeFramePayload {
  tripped: number[];
  flows_mw: number[] | null;
  overflowed: number[];
  load_was_cut: boolean;
  budget_exceeded: boolean;
}

export interface ActionPayload {
  line_switches: number[];
  substation_choices: (number[] | null)[];
}

export interface CreateSessionResponse {
  session_id: string;
  case: string;
  chronic: string;
  observation: ObservationPayload | null;
}

export interface ActionResponse {
  reward: RewardBreakdown;
  done: boolean;
  game_over: boolean;
  chronic_exhausted: boolean;
  cascade_frames: CascadeFramePayload[];
  observation: ObservationPayload | null;
}

export interface SimulateResponse {
  reward: RewardBreakdown;
  predicted_overflows: number[];
  would_cut_load: boolean;
}

export interface LayoutSubstation {
  id: number;
  x: number;
  y: number;
}

export interface LayoutPayload {
  case: string;
  substations: LayoutSubstation[];
  branches: { from: number; to: number }[];
}

export interface ElementInfo {
  kind: string;
  index: number;
  label: string;
}

export interface ConfigurationInfo {
  id: number;
  bus_a: number[];
  bus_b: number[];
}

export interface SubstationStructure {
  id: number;
  index: number;
  elements: ElementInfo[];
  n_configurations: number;
  configurations: ConfigurationInfo[];
}

export interface BranchStructure {
  index: number;
  from: number;
  to: number;
  thermal_limit_mw: number | null;
}

export interface StructurePayload {
  substations: SubstationStructure[];
  branches: BranchStructure[];
}

export interface LayoutResponse {
  layout: LayoutPayload;
  structure: StructurePayload;
}

export interface ErrorPayload {
  error: { code: string; message: string; details?: Record<string, unknown> };
}
