// DOM layer: one card per panel in spec order, native controls per widget
// kind, a live SQL preview, and a Run button that posts to /query.

import { runQuery, type QueryOutcome } from "./api.js";
import { initialState, previewSql, validate } from "./preview.js";
import {
  firstSchemaViolation,
  type InterfaceSpec,
  type Panel,
  type PanelState,
  type SlotValue,
  type Widget,
} from "./types.js";

export function render(spec: unknown, root: HTMLElement, baseUrl: string): void {
  root.textContent = "";
  const violation = firstSchemaViolation(spec);
  if (violation !== null) {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = `Invalid interface spec: bad field ${violation}`;
    root.appendChild(banner);
    return;
  }
  const grid = document.createElement("div");
  grid.className = "panel-grid";
  for (const panel of (spec as InterfaceSpec).panels) {
    grid.appendChild(renderPanel(panel, baseUrl));
  }
  root.appendChild(grid);
}

function renderPanel(panel: Panel, baseUrl: string): HTMLElement {
  const card = document.createElement("section");
  card.className = "panel";
  card.dataset.panelId = String(panel.id);

  const title = document.createElement("h2");
  title.textContent = `Panel ${panel.id + 1}`;
  card.appendChild(title);

  const state = initialState(panel);
  const preview = document.createElement("pre");
  preview.className = "sql-preview";

  const controls = document.createElement("div");
  controls.className = "controls";
  for (const widget of panel.widgets) {
    controls.appendChild(renderWidget(widget, state, () => refresh()));
  }
  card.appendChild(controls);
  card.appendChild(preview);

  const runButton = document.createElement("button");
  runButton.className = "run";
  runButton.textContent = "Run";
  const status = document.createElement("div");
  status.className = "status";
  const results = document.createElement("div");
  results.className = "results";

  // Responses that arrive after a newer Run are dropped.
  let runToken = 0;
  runButton.addEventListener("click", async () => {
    const token = ++runToken;
    status.textContent = "running…";
    const outcome = await runQuery(baseUrl, panel.id, state);
    if (token !== runToken) return;
    showOutcome(outcome, status, results);
  });

  card.appendChild(runButton);
  card.appendChild(status);
  card.appendChild(results);

  function refresh(): void {
    preview.textContent = previewSql(panel, state);
  }
  refresh();
  return card;
}

function showOutcome(outcome: QueryOutcome, status: HTMLElement,
                     results: HTMLElement): void {
  results.textContent = "";
  if (!outcome.ok) {
    const where = outcome.field ? ` (${outcome.field})` : "";
    status.textContent = `error${where}: ${outcome.error}`;
    status.classList.add("error");
    return;
  }
  status.classList.remove("error");
  status.textContent = outcome.sql;
  if (outcome.rows) {
    results.appendChild(renderTable(outcome.rows));
  }
}

function renderTable(rows: Record<string, unknown>[]): HTMLElement {
  const table = document.createElement("table");
  if (rows.length === 0) {
    const caption = document.createElement("caption");
    caption.textContent = "no rows";
    table.appendChild(caption);
    return table;
  }
  const columns = Object.keys(rows[0] ?? {});
  const head = table.createTHead().insertRow();
  const body = table.createTBody();
  const fill = (ordered: Record<string, unknown>[]) => {
    body.textContent = "";
    for (const row of ordered) {
      const tr = body.insertRow();
      for (const column of columns) {
        tr.insertCell().textContent = String(row[column] ?? "");
      }
    }
  };
  for (const column of columns) {
    const th = document.createElement("th");
    th.textContent = column;
    let ascending = true;
    th.addEventListener("click", () => {
      const sorted = [...rows].sort((a, b) => {
        const x = String(a[column] ?? "");
        const y = String(b[column] ?? "");
        const numeric = Number(x) - Number(y);
        const order = Number.isFinite(numeric) && x !== "" && y !== ""
          ? numeric : x.localeCompare(y);
        return ascending ? order : -order;
      });
      ascending = !ascending;
      fill(sorted);
    });
    head.appendChild(th);
  }
  fill(rows);
  return table;
}

function renderWidget(widget: Widget, state: PanelState,
                      onChange: () => void): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = `widget widget-${widget.kind}`;
  const caption = document.createElement("span");
  caption.className = "caption";
  caption.textContent = widget.caption;
  wrap.appendChild(caption);

  const set = (value: SlotValue) => {
    if (validate(widget, value) === null) {
      state[widget.slot] = value;
      wrap.classList.remove("invalid");
    } else {
      wrap.classList.add("invalid");
    }
    onChange();
  };

  const domain = widget.domain;
  if (domain.type === "options" && widget.kind !== "button") {
    const select = document.createElement("select");
    for (const option of domain.options) {
      const el = document.createElement("option");
      el.value = option;
      el.textContent = option === "" ? "(none)" : option;
      el.selected = option === widget.current;
      select.appendChild(el);
    }
    select.addEventListener("change", () => set(select.value));
    wrap.appendChild(select);
  } else if (domain.type === "options" && widget.kind === "button") {
    for (const option of domain.options) {
      const button = document.createElement("button");
      button.type = "button";
      button.textContent = option === "" ? "(none)" : option;
      button.addEventListener("click", () => set(option));
      wrap.appendChild(button);
    }
  } else if (domain.type === "toggle") {
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = widget.current === true;
    box.addEventListener("change", () => set(box.checked));
    wrap.appendChild(box);
  } else if (domain.type === "range") {
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = domain.min;
    slider.max = domain.max;
    slider.step = domain.step;
    slider.value = String(widget.current);
    const readout = document.createElement("span");
    readout.className = "readout";
    readout.textContent = String(widget.current);
    slider.addEventListener("input", () => {
      readout.textContent = slider.value;
      set(slider.value);
    });
    wrap.appendChild(slider);
    wrap.appendChild(readout);
  } else if (domain.type === "options_set") {
    const list = document.createElement("div");
    list.className = "listbox";
    const selected = new Set(widget.current as string[]);
    for (const option of domain.options) {
      const item = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = selected.has(option);
      box.addEventListener("change", () => {
        if (box.checked) selected.add(option);
        else selected.delete(option);
        set(domain.options.filter((o) => selected.has(o)));
      });
      item.appendChild(box);
      item.appendChild(document.createTextNode(option));
      list.appendChild(item);
    }
    wrap.appendChild(list);
  } else {
    const input = document.createElement("input");
    input.type = "text";
    input.value = String(widget.current);
    input.addEventListener("input", () => set(input.value));
    wrap.appendChild(input);
  }
  return wrap;
}
