/** UI state and its pure derivations. Everything shown on screen is a
 * function of service responses (plus the two local presentation toggles:
 * normalized values and the in-flight lock); no preference logic lives
 * client-side. */

import type {
  Choice,
  QueryOut,
  RecommendationOut,
  SessionOut,
} from "./types";
import type { FormValues } from "./validate";

export interface HistoryEntry {
  queryIndex: number;
  a: number[];
  b: number[];
  choice: Choice;
}

export interface FormScreen {
  screen: "form";
  values: FormValues;
  errors: Record<string, string>;
  serviceError: string | null;
  busy: boolean;
}

export interface SessionScreen {
  screen: "session";
  session: SessionOut;
  query: QueryOut | null;
  recommendation: RecommendationOut | null;
  history: HistoryEntry[];
  normalized: boolean;
  answerInFlight: boolean;
  notice: string | null;
}

export type AppState = FormScreen | SessionScreen;

export function sessionScreen(
  session: SessionOut,
  query: QueryOut | null,
  recommendation: RecommendationOut | null,
  previous?: SessionScreen,
): SessionScreen {
  return {
    screen: "session",
    session,
    query,
    recommendation,
    history: previous?.history ?? [],
    normalized: previous?.normalized ?? false,
    answerInFlight: false,
    notice: previous?.notice ?? null,
  };
}

export interface ObjectiveRow {
  label: string;
  a: number;
  b: number;
  /** Bar lengths as fractions of the pool's per-objective range. */
  aFraction: number;
  bFraction: number;
  /** Displayed numbers (raw values, or min-max normalized ones). */
  aShown: number;
  bShown: number;
  winner: "A" | "B" | "tie";
}

function fraction(value: number, min: number, max: number): number {
  if (max <= min) return 1;
  return (value - min) / (max - min);
}

function round(value: number): number {
  return Math.round(value * 1000) / 1000;
}

/** Per-objective comparison rows for the pending pair: which side wins under
 * the session's orientation, and how long each bar should be relative to the
 * min/max context the service reports for the current pool. */
export function objectiveRows(
  query: QueryOut,
  orientation: "min" | "max",
  normalized: boolean,
): ObjectiveRow[] {
  return query.objectives.map((objective, k) => {
    const a = query.a[k] ?? 0;
    const b = query.b[k] ?? 0;
    const aFraction = fraction(a, objective.min, objective.max);
    const bFraction = fraction(b, objective.min, objective.max);
    let winner: "A" | "B" | "tie" = "tie";
    if (a !== b) {
      const aWins = orientation === "min" ? a < b : a > b;
      winner = aWins ? "A" : "B";
    }
    return {
      label: objective.label,
      a,
      b,
      aFraction,
      bFraction,
      aShown: normalized ? round(aFraction) : a,
      bShown: normalized ? round(bFraction) : b,
      winner,
    };
  });
}
