/** Types mirroring the session service's JSON payloads, field for field. */

export type SessionStateName =
  | "AwaitingAnswer"
  | "Computing"
  | "Finished"
  | "Failed";

export type Choice = "A" | "B";

export interface ProgressOut {
  generation: number;
  total_generations: number;
  queries_asked: number;
  normalized_mmr: number | null;
}

export interface ObjectiveOut {
  label: string;
  min: number;
  max: number;
}

export interface QueryOut {
  query_index: number;
  a: number[];
  b: number[];
  objectives: ObjectiveOut[];
  progress: ProgressOut;
}

export interface RecommendationPointerOut {
  state: "Finished";
  recommendation: string;
}

export interface SessionOut {
  id: string;
  state: SessionStateName;
  problem: string;
  n: number;
  size: number;
  family: string;
  orientation: "min" | "max";
  config: Record<string, unknown>;
  progress: ProgressOut;
  warnings: string[];
}

export interface SolutionOut {
  encoding: number[];
  cost: number[];
}

export interface TraceQuery {
  a: number[];
  b: number[];
  answer: string;
  generation: number;
  round: number;
  accepted: boolean;
}

export interface TraceOut {
  method: string;
  family: string;
  orientation: string;
  queries: TraceQuery[];
  warnings: string[];
  totals: { queries: number; wall_time_s: number };
}

export interface RecommendationOut {
  solution: SolutionOut;
  trace: TraceOut;
}

export interface ErrorBody {
  code: string;
  message: string;
  field?: string;
}

export interface ConfigIn {
  family: string;
  generations?: number;
  population_size?: number;
  survivors?: number;
  mutation_rate?: number;
  sigma?: number;
  delta?: number;
  seed?: number;
}

export type InstanceIn =
  | { problem: "knapsack"; size: number; n: number; seed: number }
  | { problem: "tsp"; size: number; n: number; seed: number }
  | { problem: "catalog"; options: number[][]; orientation: "min" | "max" };

export interface CreateSessionRequest {
  config: ConfigIn;
  instance: InstanceIn;
}

export function isRecommendationPointer(
  payload: QueryOut | RecommendationPointerOut,
): payload is RecommendationPointerOut {
  return "recommendation" in payload;
}
