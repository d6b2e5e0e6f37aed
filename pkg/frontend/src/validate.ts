/** Client-side mirror of the run-config and instance invariants the service
 * enforces, so obviously bad forms never leave the browser. The service
 * remains the authority; anything it still rejects is surfaced verbatim. */

export interface ConfigFormValues {
  family: string;
  generations: string;
  population_size: string;
  survivors: string;
  mutation_rate: string;
  sigma: string;
  delta: string;
  seed: string;
}

export interface InstanceFormValues {
  problem: string;
  size: string;
  n: string;
  instanceSeed: string;
  catalog: string;
  orientation: string;
}

export type FormValues = ConfigFormValues & InstanceFormValues;

export const DEFAULT_FORM: FormValues = {
  family: "WS",
  generations: "10",
  population_size: "20",
  survivors: "5",
  mutation_rate: "0.5",
  sigma: "0.1",
  delta: "0",
  seed: "0",
  problem: "knapsack",
  size: "12",
  n: "3",
  instanceSeed: "0",
  catalog: "49, 52, 60\n39, 50, 66\n56, 57, 58",
  orientation: "min",
};

function parseNumber(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") return null;
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : null;
}

function parseInteger(raw: string): number | null {
  const value = parseNumber(raw);
  return value !== null && Number.isInteger(value) ? value : null;
}

/** Rows of comma/space separated numbers, one alternative per line. */
export function parseCatalog(text: string): number[][] | null {
  const rows: number[][] = [];
  for (const line of text.split("\n")) {
    if (line.trim() === "") continue;
    const row: number[] = [];
    for (const token of line.split(/[\s,;]+/)) {
      if (token === "") continue;
      const value = Number(token);
      if (!Number.isFinite(value)) return null;
      row.push(value);
    }
    if (row.length > 0) rows.push(row);
  }
  return rows.length > 0 ? rows : null;
}

/** Field name -> message; an empty map means the form may be submitted. */
export function validateForm(values: FormValues): Record<string, string> {
  const errors: Record<string, string> = {};

  const generations = parseInteger(values.generations);
  if (generations === null || generations < 1) {
    errors.generations = "generations must be an integer >= 1";
  }
  const populationSize = parseInteger(values.population_size);
  if (populationSize === null || populationSize < 2) {
    errors.population_size = "population size must be an integer >= 2";
  }
  const survivors = parseInteger(values.survivors);
  if (survivors === null || survivors < 1) {
    errors.survivors = "survivors must be an integer >= 1";
  } else if (populationSize !== null && survivors >= populationSize) {
    errors.survivors = "survivors must be below the population size";
  }
  const mutationRate = parseNumber(values.mutation_rate);
  if (mutationRate === null || mutationRate < 0 || mutationRate > 1) {
    errors.mutation_rate = "mutation rate must be in [0, 1]";
  }
  const sigma = parseNumber(values.sigma);
  if (sigma === null || sigma < 0) {
    errors.sigma = "sigma must be >= 0";
  }
  const delta = parseNumber(values.delta);
  if (delta === null || delta < 0) {
    errors.delta = "delta must be >= 0";
  }
  const seed = parseInteger(values.seed);
  if (seed === null || seed < 0) {
    errors.seed = "seed must be an integer >= 0";
  }

  if (values.problem === "catalog") {
    const options = parseCatalog(values.catalog);
    if (options === null) {
      errors.catalog = "enter one alternative per line, numbers only";
    } else {
      const width = options[0]?.length ?? 0;
      if (width < 2) {
        errors.catalog = "alternatives need at least two objectives";
      } else if (options.some((row) => row.length !== width)) {
        errors.catalog = "every alternative needs the same number of objectives";
      }
    }
  } else {
    const size = parseInteger(values.size);
    const minSize = values.problem === "tsp" ? 4 : 2;
    if (size === null || size < minSize) {
      errors.size = `size must be an integer >= ${minSize}`;
    }
    const n = parseInteger(values.n);
    if (n === null || n < 2) {
      errors.n = "objectives must be an integer >= 2";
    }
    const instanceSeed = parseInteger(values.instanceSeed);
    if (instanceSeed === null || instanceSeed < 0) {
      errors.instanceSeed = "seed must be an integer >= 0";
    }
  }
  return errors;
}
