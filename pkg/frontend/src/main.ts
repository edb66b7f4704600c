/** DOM wiring: renders the models from views.ts and forwards edits. */

import { RentServiceClient } from "./api.js";
import { ConsoleSession } from "./state.js";
import { PRESETS, TEMPTING_APARTMENT_EDIT } from "./presets.js";
import {
  DisplayOptions,
  EXACT,
  dashboardModel,
  envyHeatmap,
  gridModel,
  ledgerTimeline,
  whatIfComparison,
} from "./views.js";
import type { Notion, Objective } from "./types.js";

const baseUrl = (window as unknown as { RENT_SERVICE_URL?: string }).RENT_SERVICE_URL ?? "http://127.0.0.1:8080";
const session = new ConsoleSession(new RentServiceClient(baseUrl));
let display: DisplayOptions = EXACT;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function esc(text: string): string {
  return text.replace(/[&<>"]/g, (c) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" }[c] as string));
}

function renderGrid(): void {
  if (!session.instance) {
    el("grid").innerHTML = "<p>Load a preset to begin.</p>";
    el<HTMLButtonElement>("solve").disabled = true;
    return;
  }
  const model = gridModel(session.instance, session.validation, session.cellErrors);
  const header = model.apartments
    .map(
      (a) =>
        `<th colspan="${a.rooms.length}">${esc(a.name)}<br>` +
        `rent <input class="rent" data-apartment="${esc(a.name)}" value="${esc(a.rent)}"></th>`,
    )
    .join("");
  const roomRow = model.apartments
    .flatMap((a) => a.rooms.map((r) => `<th class="room">${esc(r)}</th>`))
    .join("");
  const body = model.rows
    .map((cells, i) => {
      const tds = cells
        .map(
          (cell) =>
            `<td class="${cell.error ? "invalid" : ""}">` +
            `<input class="value" data-player="${esc(cell.player)}" data-apartment="${esc(cell.apartment)}"` +
            ` data-room="${esc(cell.room)}" value="${esc(cell.value)}" title="${esc(cell.error ?? "")}"></td>`,
        )
        .join("");
      return `<tr><th>${esc(model.players[i])}</th>${tds}</tr>`;
    })
    .join("");
  el("grid").innerHTML =
    `<table><thead><tr><th></th>${header}</tr><tr><th></th>${roomRow}</tr></thead>` +
    `<tbody>${body}</tbody></table>`;
  const badge = el("normalization");
  badge.textContent = model.normalization.note;
  badge.className = model.normalization.flagged
    ? model.normalization.ok
      ? "badge ok"
      : "badge bad"
    : "badge off";
  el<HTMLButtonElement>("solve").disabled = !model.solveEnabled;

  for (const input of document.querySelectorAll<HTMLInputElement>("input.value")) {
    input.addEventListener("change", () => {
      void session
        .editValue(input.dataset.player!, input.dataset.apartment!, input.dataset.room!, input.value)
        .then(renderAll);
    });
  }
  for (const input of document.querySelectorAll<HTMLInputElement>("input.rent")) {
    input.addEventListener("change", () => {
      void session.editRent(input.dataset.apartment!, input.value).then(renderAll);
    });
  }
}

function renderDashboard(): void {
  const root = el("dashboard");
  if (!session.lastSolve) {
    root.innerHTML = "<p>No solve yet.</p>";
    return;
  }
  const model = dashboardModel(session.lastSolve, display);
  if (model.banner) {
    root.innerHTML = `<div class="banner">${esc(model.banner)}</div>`;
    return;
  }
  const bars = model.bars
    .map(
      (bar) =>
        `<div class="bar-row"><span class="who">${esc(bar.player)}</span>` +
        `<div class="bar ${bar.negative ? "neg" : "pos"}" style="width:${bar.width}%"></div>` +
        `<span class="amount" title="${esc(bar.exact)}">${esc(bar.amount)}</span></div>`,
    )
    .join("");
  const chosen = `<p>chosen apartment: <strong>${esc(model.chosen ?? "")}</strong>` +
    (model.objectiveValue !== null ? ` — ${esc(model.objective)} value ${esc(model.objectiveValue)}` : "") +
    `</p>`;
  const witness = model.witnessQ
    ? `<details><summary>fair starting prices</summary><pre>${esc(JSON.stringify(model.witnessQ))}</pre></details>`
    : "";
  let envyHtml = "";
  if (session.lastEnvy) {
    const heat = envyHeatmap(session.lastEnvy, display);
    envyHtml =
      "<h3>envy</h3><table class='heat'>" +
      heat.cells
        .map(
          (row, i) =>
            `<tr><th>${esc(heat.players[i])}</th>` +
            row
              .map((per, i2) =>
                per
                  .map(
                    (cell, j) =>
                      `<td class="${cell.envious ? "envy" : ""}" title="vs ${esc(heat.players[i2])} in ${esc(
                        heat.apartments[j],
                      )} (${esc(cell.exact)})">${esc(cell.amount)}</td>`,
                  )
                  .join(""),
              )
              .join("") +
            "</tr>",
        )
        .join("") +
      "</table>";
  }
  let ledgerHtml = "";
  if (session.lastLedger) {
    const steps = ledgerTimeline(session.lastLedger)
      .map((entry) => `<li>${esc(entry.text)}</li>`)
      .join("");
    ledgerHtml = `<h3>negotiation timeline</h3><ol>${steps || "<li>no trades needed</li>"}</ol>`;
  }
  root.innerHTML = chosen + bars + witness + envyHtml + ledgerHtml;
}

function renderWhatIf(): void {
  const root = el("whatif");
  const staged = session.stagedEdits.length;
  let comparison = "";
  if (session.lastWhatIf) {
    const model = whatIfComparison(session.lastWhatIf.before, session.lastWhatIf.after);
    const badge =
      model.delta === null
        ? ""
        : `<span class="delta ${model.delta}">${model.delta}</span>`;
    comparison =
      `<p>before: <strong>${esc(model.before ?? "—")}</strong> ` +
      `after: <strong>${esc(model.after ?? "—")}</strong> ${badge}</p>`;
  }
  root.innerHTML =
    `<p>${staged} staged edit(s)</p>` +
    comparison +
    `<button id="stage-tempting">stage tempting flat</button> ` +
    `<button id="probe" ${staged ? "" : "disabled"}>compare</button> ` +
    `<button id="commit" ${staged ? "" : "disabled"}>commit</button> ` +
    `<button id="discard" ${staged ? "" : "disabled"}>discard</button>`;
  el("stage-tempting").addEventListener("click", () => {
    session.stageEdit(TEMPTING_APARTMENT_EDIT);
    renderWhatIf();
  });
  el("probe").addEventListener("click", () => {
    void session.whatIf(notion(), objective()).then(renderAll);
  });
  el("commit").addEventListener("click", () => {
    void session.commitStaged().then(renderAll);
  });
  el("discard").addEventListener("click", () => {
    session.clearStaged();
    renderWhatIf();
  });
}

function notion(): Notion {
  return el<HTMLSelectElement>("notion").value as Notion;
}

function objective(): Objective {
  return el<HTMLSelectElement>("objective").value as Objective;
}

function renderAll(): void {
  renderGrid();
  renderDashboard();
  renderWhatIf();
}

export function boot(): void {
  const presetSelect = el<HTMLSelectElement>("preset");
  presetSelect.innerHTML = PRESETS.map((p) => `<option value="${p.key}">${esc(p.label)}</option>`).join("");
  el("load").addEventListener("click", () => {
    const preset = PRESETS.find((p) => p.key === presetSelect.value);
    if (preset) void session.loadPreset(preset.instance).then(renderAll);
  });
  el("solve").addEventListener("click", () => {
    void session.solve(notion(), objective()).then(renderAll);
  });
  el<HTMLInputElement>("rounded").addEventListener("change", (event) => {
    display = (event.target as HTMLInputElement).checked ? { rounded: true, places: 2 } : EXACT;
    renderDashboard();
  });
  renderAll();
}

if (typeof document !== "undefined" && document.getElementById("grid")) {
  boot();
}
