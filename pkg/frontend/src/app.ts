/** Controller: owns the AppState, talks to the service, re-renders on every
 * transition. All UI state is derived from service responses plus the
 * client-side answer history accumulated during this visit. */

import { ApiError, createSession, getQuery, getRecommendation, getSession, postAnswer } from "./api";
import { renderApp } from "./render";
import type { AppState, FormScreen, SessionScreen } from "./state";
import { sessionScreen } from "./state";
import { DEFAULT_FORM, validateForm, type FormValues } from "./validate";
import type { Choice, CreateSessionRequest, QueryOut, RecommendationOut, SessionOut } from "./types";
import { isRecommendationPointer } from "./types";

const POLL_MS = 500;

function freshForm(values: FormValues = DEFAULT_FORM): FormScreen {
  return { screen: "form", values, errors: {}, serviceError: null, busy: false };
}

function requestFromForm(values: FormValues): CreateSessionRequest {
  const config = {
    family: values.family,
    generations: Number(values.generations),
    population_size: Number(values.population_size),
    survivors: Number(values.survivors),
    mutation_rate: Number(values.mutation_rate),
    sigma: Number(values.sigma),
    delta: Number(values.delta),
    seed: Number(values.seed),
  };
  if (values.problem === "catalog") {
    const options = values.catalog
      .split("\n")
      .map((line) => line.trim())
      .filter((line) => line.length > 0)
      .map((line) => line.split(/[\s,;]+/).map(Number));
    return {
      config,
      instance: {
        problem: "catalog",
        options,
        orientation: values.orientation === "max" ? "max" : "min",
      },
    };
  }
  return {
    config,
    instance: {
      problem: values.problem === "tsp" ? "tsp" : "knapsack",
      size: Number(values.size),
      n: Number(values.n),
      seed: Number(values.instanceSeed),
    },
  };
}

export class App {
  private state: AppState = freshForm();
  private epoch = 0;
  private pollTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(private readonly container: HTMLElement) {
    container.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitForm();
    });
    container.addEventListener("click", (event) => {
      const target = (event.target as HTMLElement).closest("[data-action]");
      if (!(target instanceof HTMLElement)) return;
      const action = target.dataset["action"];
      if (action === "answer-a") void this.answer("A");
      else if (action === "answer-b") void this.answer("B");
      else if (action === "new-session") {
        event.preventDefault();
        this.showForm();
      }
    });
    container.addEventListener("change", (event) => {
      const target = event.target as HTMLElement;
      if (target.dataset["action"] === "toggle-normalized") {
        this.toggleNormalized();
      } else if (
        target instanceof HTMLSelectElement &&
        target.name === "problem" &&
        this.state.screen === "form"
      ) {
        // Re-render so the instance fields match the chosen problem kind.
        this.setState({ ...this.state, values: this.readFormValues(), errors: {} });
      }
    });
  }

  /** Boot from the URL: #/{session-id} restores an existing session. */
  async start(): Promise<void> {
    const match = /^#\/(.+)$/.exec(window.location.hash);
    if (match && match[1]) {
      await this.loadSession(decodeURIComponent(match[1]));
    } else {
      this.setState(freshForm());
    }
  }

  private setState(state: AppState): void {
    this.state = state;
    if (this.pollTimer !== null) {
      clearTimeout(this.pollTimer);
      this.pollTimer = null;
    }
    this.container.innerHTML = renderApp(state);
    if (state.screen === "form") {
      // Selects carry their choice in the `selected` attribute when parsed;
      // normalize to the value property so reads behave the same everywhere.
      for (const select of this.container.querySelectorAll<HTMLSelectElement>("select[name]")) {
        const value = (state.values as unknown as Record<string, string>)[select.name];
        if (value !== undefined) select.value = value;
      }
    }
    if (state.screen === "session" && state.session.state === "Computing") {
      const epoch = this.epoch;
      this.pollTimer = setTimeout(() => {
        if (epoch === this.epoch) void this.loadSession(state.session.id);
      }, POLL_MS);
    }
  }

  private showForm(): void {
    this.epoch += 1;
    window.location.hash = "";
    this.setState(freshForm());
  }

  private readFormValues(): FormValues {
    const values = { ...DEFAULT_FORM } as Record<string, string>;
    const form = this.container.querySelector("#session-form");
    if (form) {
      for (const element of form.querySelectorAll<HTMLInputElement>("input[name], select[name], textarea[name]")) {
        values[element.name] = element.value;
      }
    }
    return values as unknown as FormValues;
  }

  private async submitForm(): Promise<void> {
    if (this.state.screen !== "form" || this.state.busy) return;
    const values = this.readFormValues();
    const errors = validateForm(values);
    if (Object.keys(errors).length > 0) {
      this.setState({ screen: "form", values, errors, serviceError: null, busy: false });
      return;
    }
    this.setState({ screen: "form", values, errors: {}, serviceError: null, busy: true });
    const epoch = ++this.epoch;
    try {
      const session = await createSession(requestFromForm(values));
      if (epoch !== this.epoch) return;
      window.location.hash = `#/${encodeURIComponent(session.id)}`;
      await this.enterSession(session, null);
    } catch (error) {
      if (epoch !== this.epoch) return;
      const message =
        error instanceof ApiError
          ? error.field
            ? `${error.message} (${error.field})`
            : error.message
          : String(error);
      this.setState({ screen: "form", values, errors: {}, serviceError: message, busy: false });
    }
  }

  private async loadSession(id: string): Promise<void> {
    const epoch = ++this.epoch;
    try {
      const session = await getSession(id);
      if (epoch !== this.epoch) return;
      await this.enterSession(session, this.currentSessionScreen(id));
    } catch (error) {
      if (epoch !== this.epoch) return;
      const form = freshForm();
      form.serviceError = error instanceof ApiError ? error.message : String(error);
      window.location.hash = "";
      this.setState(form);
    }
  }

  private currentSessionScreen(id: string): SessionScreen | null {
    return this.state.screen === "session" && this.state.session.id === id ? this.state : null;
  }

  private async enterSession(session: SessionOut, previous: SessionScreen | null): Promise<void> {
    const epoch = this.epoch;
    let query: QueryOut | null = null;
    let recommendation: RecommendationOut | null = null;
    if (session.state === "AwaitingAnswer") {
      const payload = await getQuery(session.id);
      if (!isRecommendationPointer(payload)) query = payload;
    } else if (session.state === "Finished") {
      recommendation = await getRecommendation(session.id);
    }
    if (epoch !== this.epoch) return;
    this.setState(sessionScreen(session, query, recommendation, previous ?? undefined));
  }

  private toggleNormalized(): void {
    if (this.state.screen !== "session") return;
    this.setState({ ...this.state, normalized: !this.state.normalized });
  }

  private async answer(choice: Choice): Promise<void> {
    if (this.state.screen !== "session") return;
    const screen = this.state;
    if (screen.answerInFlight || !screen.query) return;
    const query = screen.query;
    this.setState({ ...screen, answerInFlight: true, notice: null });
    const epoch = this.epoch;
    try {
      const session = await postAnswer(screen.session.id, choice, query.query_index);
      if (epoch !== this.epoch) return;
      const answered: SessionScreen = {
        ...screen,
        notice: null,
        history: [
          ...screen.history,
          { queryIndex: query.query_index, a: query.a, b: query.b, choice },
        ],
      };
      await this.enterSession(session, answered);
    } catch (error) {
      if (epoch !== this.epoch) return;
      if (error instanceof ApiError && error.status === 409) {
        const notice =
          error.code === "stale_query"
            ? "That query was already answered elsewhere; showing the current one."
            : error.message;
        const session = await getSession(screen.session.id);
        if (epoch !== this.epoch) return;
        await this.enterSession(session, { ...screen, notice });
      } else {
        const message = error instanceof ApiError ? error.message : String(error);
        this.setState({ ...screen, answerInFlight: false, notice: message });
      }
    }
  }
}
