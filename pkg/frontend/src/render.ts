/** Pure renderer: AppState in, HTML string out. No clocks, no randomness,
 * no reads from the document — identical states render identical markup,
 * which is what the snapshot tests pin down. */

import type { AppState, FormScreen, SessionScreen } from "./state";
import { objectiveRows } from "./state";
import type { QueryOut, SessionOut } from "./types";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function formatNumber(value: number): string {
  return Number.isInteger(value) ? String(value) : String(Math.round(value * 1000) / 1000);
}

function vector(values: number[]): string {
  return `(${values.map(formatNumber).join(", ")})`;
}

// ---------------------------------------------------------------- form

const FAMILY_OPTIONS = ["WS", "OWA", "Choquet2"];
const PROBLEM_OPTIONS = ["knapsack", "tsp", "catalog"];

function field(
  form: FormScreen,
  name: keyof FormScreen["values"],
  label: string,
  attrs = "",
): string {
  const error = form.errors[name];
  const value = escapeHtml(form.values[name]);
  return `
    <label class="field${error ? " invalid" : ""}">
      <span>${escapeHtml(label)}</span>
      <input name="${name}" value="${value}" ${attrs} autocomplete="off">
      ${error ? `<em class="error">${escapeHtml(error)}</em>` : ""}
    </label>`;
}

function select(
  form: FormScreen,
  name: keyof FormScreen["values"],
  label: string,
  options: string[],
): string {
  const value = form.values[name];
  const items = options
    .map(
      (option) =>
        `<option value="${option}"${option === value ? " selected" : ""}>${option}</option>`,
    )
    .join("");
  return `
    <label class="field">
      <span>${escapeHtml(label)}</span>
      <select name="${name}">${items}</select>
    </label>`;
}

function renderForm(form: FormScreen): string {
  const catalogError = form.errors.catalog;
  const instanceFields =
    form.values.problem === "catalog"
      ? `
        ${select(form, "orientation", "orientation", ["min", "max"])}
        <label class="field wide${catalogError ? " invalid" : ""}">
          <span>alternatives (one per line)</span>
          <textarea name="catalog" rows="4">${escapeHtml(form.values.catalog)}</textarea>
          ${catalogError ? `<em class="error">${escapeHtml(catalogError)}</em>` : ""}
        </label>`
      : `
        ${field(form, "size", form.values.problem === "tsp" ? "cities" : "items")}
        ${field(form, "n", "objectives")}
        ${field(form, "instanceSeed", "instance seed")}`;

  return `
  <section class="card">
    <h1>Start an elicitation session</h1>
    ${form.serviceError ? `<p class="banner error-banner">${escapeHtml(form.serviceError)}</p>` : ""}
    <form id="session-form">
      <fieldset>
        <legend>Problem</legend>
        <div class="grid">
          ${select(form, "problem", "problem", PROBLEM_OPTIONS)}
          ${instanceFields}
        </div>
      </fieldset>
      <fieldset>
        <legend>Run configuration</legend>
        <div class="grid">
          ${select(form, "family", "family", FAMILY_OPTIONS)}
          ${field(form, "generations", "generations (M)")}
          ${field(form, "population_size", "population size (S)")}
          ${field(form, "survivors", "survivors (K)")}
          ${field(form, "mutation_rate", "mutation rate (mu)")}
          ${field(form, "sigma", "sigma")}
          ${field(form, "delta", "tolerance (delta)")}
          ${field(form, "seed", "run seed")}
        </div>
      </fieldset>
      <button type="submit" ${form.busy ? "disabled" : ""}>
        ${form.busy ? "Starting…" : "Start session"}
      </button>
    </form>
  </section>`;
}

// ------------------------------------------------------------- session

function stateBadge(state: SessionOut["state"]): string {
  return `<span class="badge badge-${state.toLowerCase()}">${state}</span>`;
}

function renderProgress(session: SessionOut): string {
  const progress = session.progress;
  const mmr =
    progress.normalized_mmr === null
      ? "–"
      : formatNumber(progress.normalized_mmr);
  return `
    <dl class="progress">
      <div><dt>generation</dt><dd>${progress.generation} / ${progress.total_generations}</dd></div>
      <div><dt>queries asked</dt><dd>${progress.queries_asked}</dd></div>
      <div><dt>normalized MMR</dt><dd>${mmr}</dd></div>
    </dl>`;
}

function renderBars(screen: SessionScreen, query: QueryOut): string {
  const rows = objectiveRows(query, screen.session.orientation, screen.normalized);
  const body = rows
    .map((row) => {
      const aPercent = (row.aFraction * 100).toFixed(1);
      const bPercent = (row.bFraction * 100).toFixed(1);
      return `
      <div class="objective">
        <div class="objective-label">${escapeHtml(row.label)}</div>
        <div class="bar-row${row.winner === "A" ? " winning" : ""}">
          <span class="who">A</span>
          <div class="bar"><div class="fill fill-a" style="width:${aPercent}%"></div></div>
          <span class="value">${formatNumber(row.aShown)}</span>
        </div>
        <div class="bar-row${row.winner === "B" ? " winning" : ""}">
          <span class="who">B</span>
          <div class="bar"><div class="fill fill-b" style="width:${bPercent}%"></div></div>
          <span class="value">${formatNumber(row.bShown)}</span>
        </div>
      </div>`;
    })
    .join("");
  const better = screen.session.orientation === "min" ? "lower" : "higher";
  return `
    <div class="bars" data-query-index="${query.query_index}">
      <p class="hint">${better} is better; the highlighted side wins that objective</p>
      ${body}
    </div>`;
}

function renderQueryCard(screen: SessionScreen): string {
  const query = screen.query;
  if (!query) return "";
  const locked = screen.answerInFlight;
  return `
  <section class="card">
    <h2>Query ${query.query_index + 1}: which do you prefer?</h2>
    ${renderBars(screen, query)}
    <label class="toggle">
      <input type="checkbox" data-action="toggle-normalized" ${screen.normalized ? "checked" : ""}>
      show min–max normalized values
    </label>
    <div class="answers">
      <button data-action="answer-a" ${locked ? "disabled" : ""}>Prefer A ${vector(query.a)}</button>
      <button data-action="answer-b" ${locked ? "disabled" : ""}>Prefer B ${vector(query.b)}</button>
    </div>
  </section>`;
}

function renderRecommendation(screen: SessionScreen): string {
  const recommendation = screen.recommendation;
  if (!recommendation) return "";
  const { solution, trace } = recommendation;
  return `
  <section class="card recommendation">
    <h2>Recommendation</h2>
    <p class="cost">${vector(solution.cost)}</p>
    <p>encoding [${solution.encoding.join(", ")}] · ${trace.totals.queries} queries total</p>
  </section>`;
}

function renderFailed(session: SessionOut): string {
  const report = session.warnings.length
    ? session.warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("")
    : "<li>the recorded answers are mutually inconsistent</li>";
  return `
  <section class="card failed">
    <h2>Session failed</h2>
    <p>No parameter vector is consistent with every recorded answer:</p>
    <ul>${report}</ul>
  </section>`;
}

function renderHistory(screen: SessionScreen): string {
  if (screen.history.length === 0) return "";
  const items = screen.history
    .map(
      (entry) => `
      <li>
        <span class="index">#${entry.queryIndex + 1}</span>
        A ${vector(entry.a)} vs B ${vector(entry.b)}
        <strong>→ ${entry.choice}</strong>
      </li>`,
    )
    .join("");
  return `
  <section class="card">
    <h2>Answers this visit</h2>
    <ul class="history">${items}</ul>
  </section>`;
}

function renderSession(screen: SessionScreen): string {
  const session = screen.session;
  const summary = `${session.problem} · ${session.family} · ${session.n} objectives · ${session.orientation}`;
  return `
  <section class="card headline">
    <h1>Session <code>${escapeHtml(session.id)}</code> ${stateBadge(session.state)}</h1>
    <p class="summary">${escapeHtml(summary)}</p>
    ${renderProgress(session)}
    ${screen.notice ? `<p class="banner">${escapeHtml(screen.notice)}</p>` : ""}
  </section>
  ${session.state === "Computing" ? '<section class="card"><p class="computing">Computing the next query…</p></section>' : ""}
  ${session.state === "AwaitingAnswer" ? renderQueryCard(screen) : ""}
  ${session.state === "Finished" ? renderRecommendation(screen) : ""}
  ${session.state === "Failed" ? renderFailed(session) : ""}
  ${renderHistory(screen)}
  <p class="footer"><a href="#" data-action="new-session">start a new session</a></p>`;
}

export function renderApp(state: AppState): string {
  return state.screen === "form" ? renderForm(state) : renderSession(state);
}
