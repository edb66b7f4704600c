import { describe, expect, it } from "vitest";

import { RentServiceClient, ServiceError } from "../src/api.js";
import { ConsoleSession } from "../src/state.js";
import { TRIO_BASE, TEMPTING_APARTMENT_EDIT } from "../src/presets.js";
import type { EditOp, InstanceDoc, SolutionDoc } from "../src/types.js";

/**
 * In-memory stand-in for the service, good enough for state-machine tests:
 * it tracks versions and committed edits and serves canned solve results.
 * All numbers it returns are opaque strings, exactly like the real thing.
 */
class FakeClient {
  instance: InstanceDoc;
  version = 0;
  committedEdits: EditOp[] = [];
  whatIfCalls = 0;
  solveCalls = 0;

  constructor(instance: InstanceDoc) {
    this.instance = instance;
  }

  private solveValue(): string {
    // pretend committing the tempting flat drops the value
    return this.committedEdits.length === 0 ? "50" : "37.5";
  }

  private solution(value: string): SolutionDoc {
    return {
      notion: "nef",
      objective: "maximin",
      status: "solved",
      instance: this.instance,
      assignment: [this.instance.players.map((_, i) => this.instance.apartments[0].rooms[i])],
      prices: [this.instance.apartments.map(() => "100") as string[]],
      chosen: this.instance.apartments[0].name,
      utilities: this.instance.players.map(() => value),
      objective_value: value,
      witness_q: null,
      ledger: { start: [], steps: [], end: [] },
    };
  }

  async createSession(): Promise<{ id: string; version: number }> {
    return { id: "fake", version: 0 };
  }

  async getInstance() {
    return { version: this.version, instance: this.instance, validation: { ok: true, violations: [] } };
  }

  async applyEdits(_sid: string, edits: EditOp[], version?: number) {
    if (version !== undefined && version !== this.version) {
      throw new ServiceError(409, "version conflict");
    }
    for (const edit of edits) {
      if (edit.op === "set_value" && edit.value.startsWith("-")) {
        throw new ServiceError(422, "negative value");
      }
    }
    this.committedEdits.push(...edits);
    this.version += 1;
    return { version: this.version, instance: this.instance, validation: { ok: true, violations: [] } };
  }

  async solve() {
    this.solveCalls += 1;
    return this.solution(this.solveValue());
  }

  async whatIf(_sid: string, edits: EditOp[]) {
    this.whatIfCalls += 1;
    const value = edits.length > 0 ? "37.5" : this.solveValue();
    return { ...this.solution(value), committed: false };
  }

  async ledger() {
    return { start: [], steps: [], end: [] };
  }

  async envy() {
    return { chosen: "apt1", players: this.instance.players, apartments: ["apt1"], entries: [] };
  }
}

function makeSession(): { session: ConsoleSession; fake: FakeClient } {
  const fake = new FakeClient(TRIO_BASE);
  const session = new ConsoleSession(fake as unknown as RentServiceClient);
  return { session, fake };
}

describe("console session", () => {
  it("loads a preset and enables solving once validated", async () => {
    const { session } = makeSession();
    expect(session.solveEnabled).toBe(false);
    await session.loadPreset(TRIO_BASE);
    expect(session.solveEnabled).toBe(true);
    expect(session.instance).toEqual(TRIO_BASE);
  });

  it("staging edits does not touch the service; committing does", async () => {
    const { session, fake } = makeSession();
    await session.loadPreset(TRIO_BASE);
    session.stageEdit(TEMPTING_APARTMENT_EDIT);
    expect(fake.committedEdits).toHaveLength(0);

    const probe = await session.whatIf("nef", "maximin");
    expect(probe.before.objective_value).toBe("50");
    expect(probe.after.objective_value).toBe("37.5");
    expect(fake.committedEdits).toHaveLength(0); // still uncommitted

    const again = await session.solve("nef", "maximin");
    expect(again.objective_value).toBe("50"); // session unchanged

    await session.commitStaged();
    expect(fake.committedEdits).toHaveLength(1);
    const after = await session.solve("nef", "maximin");
    expect(after.objective_value).toBe("37.5");
    expect(session.stagedEdits).toHaveLength(0);
  });

  it("lands a 422 on the offending cell and blocks solving", async () => {
    const { session } = makeSession();
    await session.loadPreset(TRIO_BASE);
    const ok = await session.editValue("player1", "apt1", "apt1-room1", "-5");
    expect(ok).toBe(false);
    expect(session.cellErrors.get("player1|apt1|apt1-room1")).toContain("negative");
    expect(session.solveEnabled).toBe(false);
    const fixed = await session.editValue("player1", "apt1", "apt1-room1", "5");
    expect(fixed).toBe(true);
    expect(session.solveEnabled).toBe(true);
  });

  it("refuses to probe without staged edits", async () => {
    const { session } = makeSession();
    await session.loadPreset(TRIO_BASE);
    await expect(session.whatIf("nef", "maximin")).rejects.toThrow("no staged edits");
  });
});
