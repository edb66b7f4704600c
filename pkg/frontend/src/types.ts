/**
 * Document shapes exchanged with the rent service.
 *
 * Every money amount is a string: a plain decimal ("150", "37.5") or an
 * exact ratio ("1/3"). The console never parses these into floats; they
 * are displayed verbatim and compared exactly with bigint arithmetic.
 */

export type Amount = string;

export interface ApartmentDoc {
  name: string;
  rent: Amount;
  rooms: string[];
}

export interface InstanceDoc {
  players: string[];
  apartments: ApartmentDoc[];
  /** values[player][apartment][room] */
  values: Amount[][][];
  normalized: boolean;
}

export interface ValidationDoc {
  ok: boolean;
  violations: string[];
}

export interface InstanceResponse {
  version: number;
  instance: InstanceDoc;
  validation: ValidationDoc;
}

export interface LedgerStepDoc {
  delta: Amount;
  raiser: string;
  partner: string;
  pay_more_in: string;
  pay_less_in: string;
}

export interface LedgerDoc {
  start: Amount[][];
  steps: LedgerStepDoc[];
  end: Amount[][];
}

export interface SolutionDoc {
  notion: string;
  objective: string;
  status: "solved" | "none-exists";
  instance: InstanceDoc;
  assignment?: string[][]; // assignment[apartment][player] = room name
  prices?: Amount[][];
  chosen?: string;
  utilities?: Amount[];
  objective_value?: Amount;
  witness_q?: Amount[][] | null;
  ledger?: LedgerDoc | null;
  dist?: Amount[];
  version?: number;
  committed?: boolean;
}

export interface EnvyDoc {
  chosen: string;
  players: string[];
  apartments: string[];
  /** entries[i][i2][apartment] */
  entries: Amount[][][];
}

export type EditOp =
  | { op: "set_value"; player: string; apartment: string; room: string; value: Amount }
  | { op: "set_rent"; apartment: string; rent: Amount }
  | { op: "add_apartment"; name: string; rent: Amount; rooms?: string[]; values: Amount[][] }
  | { op: "remove_apartment"; apartment: string }
  | { op: "set_normalized"; normalized: boolean };

export type Notion = "uef" | "nef" | "strong-nef" | "def";
export type Objective = "maximin" | "equitability" | "none";
