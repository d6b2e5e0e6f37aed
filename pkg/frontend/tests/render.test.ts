/** Fixture purity: rendering a state built from recorded service responses
 * is deterministic, so the DOM for each screen is pinned as a snapshot. */

import { describe, expect, it } from "vitest";

import { renderApp } from "../src/render";
import { sessionScreen, type FormScreen, type SessionScreen } from "../src/state";
import { DEFAULT_FORM } from "../src/validate";
import type { QueryOut, RecommendationOut, SessionOut } from "../src/types";

import goldenCreated from "./fixtures/golden_created.json";
import goldenQuery0 from "./fixtures/golden_query0.json";
import goldenAfterAnswer0 from "./fixtures/golden_after_answer0.json";
import goldenQuery1 from "./fixtures/golden_query1.json";
import goldenFinished from "./fixtures/golden_finished.json";
import goldenRecommendation from "./fixtures/golden_recommendation.json";
import failedCreated from "./fixtures/failed_created.json";

const created = goldenCreated as SessionOut;
const query0 = goldenQuery0 as QueryOut;
const afterAnswer0 = goldenAfterAnswer0 as SessionOut;
const query1 = goldenQuery1 as QueryOut;
const finished = goldenFinished as SessionOut;
const recommendation = goldenRecommendation as unknown as RecommendationOut;
const failed = failedCreated as SessionOut;

const FORM: FormScreen = {
  screen: "form",
  values: DEFAULT_FORM,
  errors: {},
  serviceError: null,
  busy: false,
};

function midSession(): SessionScreen {
  const first = sessionScreen(created, query0, null);
  return sessionScreen(afterAnswer0, query1, null, {
    ...first,
    history: [{ queryIndex: 0, a: query0.a, b: query0.b, choice: "A" }],
  });
}

/** Same state -> same markup, even from an independently parsed fixture. */
function assertPure(render: () => string): string {
  const once = render();
  expect(render()).toBe(once);
  return once;
}

describe("screens render deterministically from recorded fixtures", () => {
  it("form", () => {
    const html = assertPure(() => renderApp(FORM));
    expect(html).toMatchSnapshot();
  });

  it("first pending query", () => {
    const html = assertPure(() => renderApp(sessionScreen(created, query0, null)));
    expect(html).toContain("Query 1");
    expect(html).toContain("(49, 52, 60)");
    expect(html).toMatchSnapshot();
  });

  it("second pending query with history", () => {
    const html = assertPure(() => renderApp(midSession()));
    expect(html).toContain("Query 2");
    expect(html).toContain("Answers this visit");
    expect(html).toMatchSnapshot();
  });

  it("second pending query, normalized values", () => {
    const html = assertPure(() => renderApp({ ...midSession(), normalized: true }));
    // objective 1 spans 39..56, so A=49 shows as (49-39)/(56-39) = 0.588.
    expect(html).toContain("0.588");
    expect(html).toMatchSnapshot();
  });

  it("finished session with recommendation", () => {
    const html = assertPure(() => renderApp(sessionScreen(finished, null, recommendation)));
    expect(html).toContain("Recommendation");
    expect(html).toContain("(49, 52, 60)");
    expect(html).toContain("2 queries total");
    expect(html).toMatchSnapshot();
  });

  it("failed session", () => {
    const html = assertPure(() => renderApp(sessionScreen(failed, null, null)));
    expect(html).toContain("Session failed");
    expect(html).toContain("inconsistent answer rejected");
    expect(html).toMatchSnapshot();
  });
});

describe("mounted DOM is stable", () => {
  it("round-trips through the document unchanged on re-render", () => {
    const container = document.createElement("div");
    container.innerHTML = renderApp(midSession());
    const mounted = container.innerHTML;
    container.innerHTML = renderApp(midSession());
    expect(container.innerHTML).toBe(mounted);
  });
});

describe("objective winner highlighting", () => {
  it("marks the lower value as winning under min orientation", () => {
    const html = renderApp(sessionScreen(created, query0, null));
    const rows = [...html.matchAll(/bar-row( winning)?/g)].map((m) => Boolean(m[1]));
    // Pair (49,52,60) vs (56,57,58): A wins objectives 1 and 2, B wins 3.
    expect(rows).toEqual([true, false, true, false, false, true]);
  });
});
