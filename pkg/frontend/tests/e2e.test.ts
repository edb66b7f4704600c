/**
 * End-to-end console flow against the real service (acceptance criterion
 * for the console): load the mirrored-pair preset and read utilities
 * "0"/"0" off the dashboard; stage the tempting flat on the trio scenario
 * and see before "50", after strictly less, with the session still solving
 * to "50" until the edits are committed.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, type ChildProcess } from "node:child_process";

import { RentServiceClient } from "../src/api.js";
import { ConsoleSession } from "../src/state.js";
import { DOMINANT_PAIR, MIRRORED_PAIR, TRIO_BASE, TEMPTING_APARTMENT_EDIT } from "../src/presets.js";
import { compareAmounts } from "../src/amounts.js";
import { dashboardModel, whatIfComparison, EXACT } from "../src/views.js";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/sessions`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: "{}",
      });
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  service = spawn("python3", ["-m", "flatsplit.service", "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForService();
});

afterAll(() => {
  service.kill();
});

describe("console end to end", () => {
  it("solves the mirrored pair to utilities 0/0 on the dashboard", async () => {
    const session = new ConsoleSession(new RentServiceClient(BASE));
    await session.loadPreset(MIRRORED_PAIR);
    expect(session.solveEnabled).toBe(true);

    const solution = await session.solve("nef", "maximin");
    const dashboard = dashboardModel(solution, EXACT);
    expect(dashboard.bars.map((b) => b.amount)).toEqual(["0", "0"]);
    expect(dashboard.objectiveValue).toBe("0");
    expect(session.lastEnvy).not.toBeNull();
    expect(session.lastLedger).not.toBeNull();
  });

  it("universal notion reports none-exists as a banner", async () => {
    const session = new ConsoleSession(new RentServiceClient(BASE));
    await session.loadPreset(MIRRORED_PAIR);
    const solution = await session.solve("uef", "none");
    expect(dashboardModel(solution, EXACT).banner).toContain("no uef solution");
  });

  it("what-if on the trio shows the drop without committing it", async () => {
    const session = new ConsoleSession(new RentServiceClient(BASE));
    await session.loadPreset(TRIO_BASE);

    session.stageEdit(TEMPTING_APARTMENT_EDIT);
    const probe = await session.whatIf("nef", "maximin");
    const comparison = whatIfComparison(probe.before, probe.after);

    expect(comparison.before).toBe("50");
    expect(comparison.after).not.toBeNull();
    expect(compareAmounts(comparison.after!, "50")).toBe(-1); // strictly less
    expect(comparison.delta).toBe("worse");

    // the probe committed nothing: the session still solves to 50
    const unchanged = await session.solve("nef", "maximin");
    expect(unchanged.objective_value).toBe("50");

    await session.commitStaged();
    const committed = await session.solve("nef", "maximin");
    expect(committed.objective_value).toBe("37.5");
  });

  it("renders service numbers verbatim end to end", async () => {
    const session = new ConsoleSession(new RentServiceClient(BASE));
    await session.loadPreset(DOMINANT_PAIR);
    const solution = await session.solve("strong-nef", "maximin");
    const dashboard = dashboardModel(solution, EXACT);
    expect(dashboard.prices).toEqual([
      ["99", "1"],
      ["1", "99"],
    ]);
    const raw = JSON.stringify(solution);
    for (const bar of dashboard.bars) {
      expect(raw).toContain(`"${bar.amount}"`); // string equality with the response
    }
  });
});
