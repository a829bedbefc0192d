/**
 * Bundled figure recipes.
 *
 * A recipe is declarative data only: which CSV artifacts of a run directory
 * to read, how to lay the panels out, and how to label the axes. One recipe
 * targets one (scenario, run kind) pair, and the renderer never computes
 * anything beyond scaling, so regenerating a figure from the same artifacts
 * is byte-identical.
 */

export interface SeriesSpec {
  column: string;
  label: string;
  /** column holding one standard error per sample, drawn as a band */
  spread?: string;
}

export interface AxisSpec {
  label: string;
  /** multiply data values before plotting, e.g. 1e-4 for scaled time axes */
  factor?: number;
  log?: boolean;
}

export interface PanelSpec {
  title: string;
  /** CSV filename inside the run directory */
  input: string;
  kind?: "line" | "bars";
  x: AxisSpec & { column: string };
  y: AxisSpec;
  series: SeriesSpec[];
}

export interface FigureRecipe {
  id: string;
  scenario: string;
  kind: string;
  inputs: string[];
  /** panels are drawn left to right, wrapping into rows of two */
  panels: PanelSpec[];
}

const SCALED_TIME: AxisSpec & { column: string } = {
  column: "t",
  label: "10⁻⁴ ωc t",
  factor: 1e-4,
};

const SCALED_DELAY: AxisSpec & { column: string } = {
  column: "tau",
  label: "10⁻⁴ ωc τ",
  factor: 1e-4,
};

interface ScenarioLevels {
  /** bare-reservoir level the bundle is deposited on, e.g. "b2" */
  target: string;
  /** lossy dressed level bridging the transfer, e.g. "d0" */
  mediator: string;
  /** level the cycle starts from */
  start: string;
  /** bundle statistic orders the scenario records */
  orders: number[];
}

function photonScenarioRecipes(scenario: string, levels: ScenarioLevels): FigureRecipe[] {
  const { target, mediator, start, orders } = levels;
  const ladder: SeriesSpec[] = [
    { column: `P_${start}`, label: `${start} (start)` },
    { column: `P_${mediator}`, label: `${mediator} (mediator)` },
    { column: `P_${target}`, label: `${target} (target)` },
  ];
  return [
    {
      id: `${scenario}.transfer`,
      scenario,
      kind: "closed",
      inputs: ["populations.csv"],
      panels: [
        {
          title: "Level populations",
          input: "populations.csv",
          x: SCALED_TIME,
          y: { label: "population" },
          series: ladder,
        },
        {
          title: "Residues, log scale",
          input: "populations.csv",
          x: SCALED_TIME,
          y: { label: "population", log: true },
          series: ladder,
        },
      ],
    },
    {
      id: `${scenario}.emission`,
      scenario,
      kind: "master",
      inputs: ["populations.csv", "bundle_stats.csv"],
      panels: [
        {
          title: "Population transfer",
          input: "populations.csv",
          x: SCALED_TIME,
          y: { label: "population" },
          series: [
            { column: `P_${target}`, label: `${target} (target)` },
            { column: `P_${mediator}`, label: `${mediator} (mediator)` },
          ],
        },
        {
          title: "Bundle intensity",
          input: "bundle_stats.csv",
          x: SCALED_TIME,
          y: { label: "intensity" },
          series: orders.map((n) => ({
            column: `bundle${n}_intensity`,
            label: `order ${n}`,
          })),
        },
        {
          title: "Equal-time statistics",
          input: "bundle_stats.csv",
          x: SCALED_TIME,
          y: { label: "g⁽²⁾(t,t)", log: true },
          series: orders.map((n) => ({ column: `g${n}_2`, label: `order ${n}` })),
        },
      ],
    },
    {
      id: `${scenario}.correlations`,
      scenario,
      kind: "correlators",
      inputs: orders.map((n) => `correlator_g${n}.csv`),
      panels: orders.map((n) => ({
        title: `Delayed statistic, order ${n}`,
        input: `correlator_g${n}.csv`,
        x: SCALED_DELAY,
        y: { label: "g⁽²⁾(ts,ts+τ)", log: true },
        series: [{ column: `g${n}_2`, label: `order ${n}` }],
      })),
    },
    {
      id: `${scenario}.jumps`,
      scenario,
      kind: "trajectory",
      inputs: ["mean_populations.csv", "jump_histogram.csv"],
      panels: [
        {
          title: "Mean target occupation",
          input: "mean_populations.csv",
          x: SCALED_TIME,
          y: { label: "population" },
          series: [
            {
              column: `P_${target}`,
              label: `${target} mean ± SE`,
              spread: `SE_${target}`,
            },
          ],
        },
        {
          title: "Cavity clicks per cycle",
          input: "jump_histogram.csv",
          kind: "bars",
          x: { column: "a_jumps_per_cycle", label: "jumps per cycle" },
          y: { label: "fraction of trajectories" },
          series: [{ column: "fraction", label: "fraction" }],
        },
      ],
    },
  ];
}

const COEFFICIENT_SWEEP: FigureRecipe = {
  id: "fig2_sweep.coefficients",
  scenario: "fig2_sweep",
  kind: "coeff-sweep",
  inputs: ["coefficients.csv"],
  panels: [
    {
      title: "Ground-state photon content",
      input: "coefficients.csv",
      x: { column: "coupling", label: "coupling λ/ωc" },
      y: { label: "coefficient" },
      series: [
        { column: "C0_2", label: "m=2" },
        { column: "C0_4", label: "m=4" },
        { column: "C0_6", label: "m=6" },
      ],
    },
    {
      title: "First-excited photon content",
      input: "coefficients.csv",
      x: { column: "coupling", label: "coupling λ/ωc" },
      y: { label: "coefficient" },
      series: [
        { column: "C1_3", label: "m=3" },
        { column: "C1_5", label: "m=5" },
        { column: "C1_7", label: "m=7" },
      ],
    },
  ],
};

export const BUNDLED_RECIPES: FigureRecipe[] = [
  ...photonScenarioRecipes("two_photon", {
    target: "b2",
    mediator: "d0",
    start: "b0",
    orders: [1, 2],
  }),
  ...photonScenarioRecipes("three_photon", {
    target: "b3",
    mediator: "d1",
    start: "b1",
    orders: [1, 3],
  }),
  ...photonScenarioRecipes("four_photon", {
    target: "b4",
    mediator: "d0",
    start: "b0",
    orders: [1, 2, 4],
  }),
  ...photonScenarioRecipes("six_photon", {
    target: "b6",
    mediator: "d0",
    start: "b0",
    orders: [1, 6],
  }),
  COEFFICIENT_SWEEP,
];

export function recipesFor(scenario: string, kind: string): FigureRecipe[] {
  return BUNDLED_RECIPES.filter((r) => r.scenario === scenario && r.kind === kind);
}

export function recipeById(id: string): FigureRecipe | undefined {
  return BUNDLED_RECIPES.find((r) => r.id === id);
}
