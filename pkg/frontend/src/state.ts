/**
 * Console session state: one service session, staged what-if edits, and
 * the latest solve artifacts. All numbers pass through untouched; every
 * edit round-trips to the service before the UI re-enables solving
 * (optimistic updates are deliberately off).
 */

import type { RentServiceClient } from "./api.js";
import { ServiceError } from "./api.js";
import type {
  EditOp,
  EnvyDoc,
  InstanceDoc,
  InstanceResponse,
  LedgerDoc,
  Notion,
  Objective,
  SolutionDoc,
} from "./types.js";

export interface WhatIfResult {
  edits: EditOp[];
  before: SolutionDoc;
  after: SolutionDoc;
}

export class ConsoleSession {
  sessionId: string | null = null;
  version = 0;
  instance: InstanceDoc | null = null;
  validation = { ok: false, violations: [] as string[] };
  lastSolve: SolutionDoc | null = null;
  lastEnvy: EnvyDoc | null = null;
  lastLedger: LedgerDoc | null = null;
  stagedEdits: EditOp[] = [];
  lastWhatIf: WhatIfResult | null = null;
  cellErrors = new Map<string, string>();

  constructor(private readonly client: RentServiceClient) {}

  private adopt(response: InstanceResponse): void {
    this.version = response.version;
    this.instance = response.instance;
    this.validation = response.validation;
  }

  async loadPreset(instance: InstanceDoc): Promise<void> {
    const created = await this.client.createSession(instance);
    this.sessionId = created.id;
    this.lastSolve = null;
    this.lastEnvy = null;
    this.lastLedger = null;
    this.stagedEdits = [];
    this.lastWhatIf = null;
    this.cellErrors.clear();
    this.adopt(await this.client.getInstance(created.id));
  }

  private requireSession(): string {
    if (!this.sessionId) throw new Error("no session loaded");
    return this.sessionId;
  }

  get solveEnabled(): boolean {
    return this.sessionId !== null && this.validation.ok && this.cellErrors.size === 0;
  }

  /** One grid edit; a 422 lands on the cell instead of throwing. */
  async editValue(player: string, apartment: string, room: string, value: string): Promise<boolean> {
    const sid = this.requireSession();
    const key = `${player}|${apartment}|${room}`;
    try {
      this.adopt(
        await this.client.applyEdits(sid, [{ op: "set_value", player, apartment, room, value }], this.version),
      );
      this.cellErrors.delete(key);
      return true;
    } catch (error) {
      if (error instanceof ServiceError && error.status === 422) {
        this.cellErrors.set(key, error.detail);
        return false;
      }
      throw error;
    }
  }

  async editRent(apartment: string, rent: string): Promise<boolean> {
    const sid = this.requireSession();
    try {
      this.adopt(await this.client.applyEdits(sid, [{ op: "set_rent", apartment, rent }], this.version));
      return true;
    } catch (error) {
      if (error instanceof ServiceError && error.status === 422) {
        this.cellErrors.set(`rent|${apartment}`, error.detail);
        return false;
      }
      throw error;
    }
  }

  async solve(notion: Notion, objective: Objective): Promise<SolutionDoc> {
    const sid = this.requireSession();
    const solution = await this.client.solve(sid, notion, objective);
    this.lastSolve = solution;
    if (solution.status === "solved") {
      this.lastEnvy = await this.client.envy(sid);
      this.lastLedger = solution.ledger ? await this.client.ledger(sid) : null;
    } else {
      this.lastEnvy = null;
      this.lastLedger = null;
    }
    return solution;
  }

  stageEdit(edit: EditOp): void {
    this.stagedEdits.push(edit);
  }

  clearStaged(): void {
    this.stagedEdits = [];
    this.lastWhatIf = null;
  }

  /**
   * Side-by-side probe: solve the committed instance and the staged one,
   * committing nothing. The "before" call reuses the plain solve endpoint,
   * so it also refreshes the dashboard.
   */
  async whatIf(notion: Notion, objective: Objective): Promise<WhatIfResult> {
    const sid = this.requireSession();
    if (this.stagedEdits.length === 0) throw new Error("no staged edits to probe");
    const before = await this.solve(notion, objective);
    const after = await this.client.whatIf(sid, this.stagedEdits, notion, objective);
    this.lastWhatIf = { edits: [...this.stagedEdits], before, after };
    return this.lastWhatIf;
  }

  /** Apply the staged edits for real; the next solve sees the new instance. */
  async commitStaged(): Promise<void> {
    const sid = this.requireSession();
    if (this.stagedEdits.length === 0) return;
    this.adopt(await this.client.applyEdits(sid, this.stagedEdits, this.version));
    this.stagedEdits = [];
    this.lastWhatIf = null;
    this.lastSolve = null;
    this.lastEnvy = null;
    this.lastLedger = null;
  }
}
