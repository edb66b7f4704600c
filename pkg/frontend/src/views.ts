/**
 * Pure render models: plain data structures describing what the page
 * shows. Every amount field carries the exact service string; rounding is
 * applied only when the caller turns the display toggle on, and even then
 * the exact string rides along in a tooltip field.
 */

import { barWidths, compareAmounts, isNegative, roundedDisplay } from "./amounts.js";
import type {
  EnvyDoc,
  InstanceDoc,
  LedgerDoc,
  SolutionDoc,
  ValidationDoc,
} from "./types.js";

export interface DisplayOptions {
  rounded: boolean;
  places: number;
}

export const EXACT: DisplayOptions = { rounded: false, places: 2 };

function show(amount: string, options: DisplayOptions): string {
  return options.rounded ? roundedDisplay(amount, options.places) : amount;
}

// --- valuation grid ---------------------------------------------------------

export interface GridCell {
  player: string;
  apartment: string;
  room: string;
  value: string; // verbatim
  error: string | null;
}

export interface GridModel {
  players: string[];
  apartments: Array<{ name: string; rent: string; rooms: string[] }>;
  rows: GridCell[][]; // per player, cells ordered apartment-major
  normalization: { flagged: boolean; ok: boolean; note: string };
  solveEnabled: boolean;
}

export function gridModel(
  instance: InstanceDoc,
  validation: ValidationDoc,
  cellErrors: Map<string, string> = new Map(),
): GridModel {
  const rows = instance.players.map((player, i) =>
    instance.apartments.flatMap((apartment, j) =>
      apartment.rooms.map((room, k) => ({
        player,
        apartment: apartment.name,
        room,
        value: instance.values[i][j][k],
        error: cellErrors.get(`${player}|${apartment.name}|${room}`) ?? null,
      })),
    ),
  );
  const note = !instance.normalized
    ? "normalization off"
    : validation.ok
      ? "normalized: totals match rents"
      : validation.violations.filter((v) => v.includes("normalization")).join("; ") ||
        validation.violations.join("; ");
  return {
    players: [...instance.players],
    apartments: instance.apartments.map((a) => ({
      name: a.name,
      rent: a.rent,
      rooms: [...a.rooms],
    })),
    rows,
    normalization: { flagged: instance.normalized, ok: validation.ok, note },
    solveEnabled: validation.ok && cellErrors.size === 0,
  };
}

// --- solution dashboard -------------------------------------------------------

export interface UtilityBar {
  player: string;
  amount: string; // what the page shows
  exact: string; // always the verbatim service string
  width: number; // 0..100, display scaling only
  negative: boolean;
}

export interface DashboardModel {
  status: string;
  notion: string;
  objective: string;
  chosen: string | null;
  objectiveValue: string | null;
  bars: UtilityBar[];
  prices: string[][];
  witnessQ: string[][] | null;
  banner: string | null;
}

export function dashboardModel(solution: SolutionDoc, options: DisplayOptions = EXACT): DashboardModel {
  if (solution.status !== "solved") {
    return {
      status: solution.status,
      notion: solution.notion,
      objective: solution.objective,
      chosen: null,
      objectiveValue: null,
      bars: [],
      prices: [],
      witnessQ: null,
      banner: `no ${solution.notion} solution exists for this instance`,
    };
  }
  const utilities = solution.utilities ?? [];
  const widths = barWidths(utilities);
  return {
    status: solution.status,
    notion: solution.notion,
    objective: solution.objective,
    chosen: solution.chosen ?? null,
    objectiveValue: solution.objective_value ? show(solution.objective_value, options) : null,
    bars: solution.instance.players.map((player, i) => ({
      player,
      amount: show(utilities[i], options),
      exact: utilities[i],
      width: widths[i] ?? 0,
      negative: isNegative(utilities[i]),
    })),
    prices: (solution.prices ?? []).map((row) => row.map((p) => show(p, options))),
    witnessQ: solution.witness_q ? solution.witness_q.map((row) => [...row]) : null,
    banner: null,
  };
}

export interface HeatmapCell {
  amount: string;
  exact: string;
  envious: boolean; // strictly positive entries mean envy
}

export interface EnvyHeatmap {
  chosen: string;
  players: string[];
  apartments: string[];
  /** cells[i][i2][apartment] */
  cells: HeatmapCell[][][];
}

export function envyHeatmap(envy: EnvyDoc, options: DisplayOptions = EXACT): EnvyHeatmap {
  return {
    chosen: envy.chosen,
    players: [...envy.players],
    apartments: [...envy.apartments],
    cells: envy.entries.map((row) =>
      row.map((perApartment) =>
        perApartment.map((amount) => ({
          amount: show(amount, options),
          exact: amount,
          envious: compareAmounts(amount, "0") > 0,
        })),
      ),
    ),
  };
}

export interface TimelineEntry {
  index: number;
  text: string;
  delta: string; // verbatim
}

export function ledgerTimeline(ledger: LedgerDoc): TimelineEntry[] {
  return ledger.steps.map((step, index) => ({
    index: index + 1,
    delta: step.delta,
    text:
      `${step.raiser} pays ${step.delta} more in ${step.pay_more_in} and less in ` +
      `${step.pay_less_in}; ${step.partner} does the opposite`,
  }));
}

// --- what-if panel --------------------------------------------------------------

export interface WhatIfModel {
  before: string | null;
  after: string | null;
  /** "worse" | "better" | "same" | null -- sign of after vs before */
  delta: "worse" | "better" | "same" | null;
  beforeSolved: boolean;
  afterSolved: boolean;
}

export function whatIfComparison(before: SolutionDoc, after: SolutionDoc): WhatIfModel {
  const b = before.status === "solved" ? (before.objective_value ?? null) : null;
  const a = after.status === "solved" ? (after.objective_value ?? null) : null;
  let delta: WhatIfModel["delta"] = null;
  if (a !== null && b !== null) {
    const cmp = compareAmounts(a, b);
    delta = cmp < 0 ? "worse" : cmp > 0 ? "better" : "same";
  }
  return {
    before: b,
    after: a,
    delta,
    beforeSolved: before.status === "solved",
    afterSolved: after.status === "solved",
  };
}
