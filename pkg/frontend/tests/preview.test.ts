// Preview engine: state defaults, domain validation, and the full-state
// sweep that must reproduce every logged query of the bundled interface.

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  canonical,
  domainValues,
  enumerateStates,
  fragment,
  initialState,
  previewSql,
  siteKind,
  validate,
} from "../src/preview.js";
import type { InterfaceSpec, Panel, Widget } from "../src/types.js";

const fixturePath = fileURLToPath(new URL("./fixtures/fig1a.interface.json", import.meta.url));
const spec = JSON.parse(readFileSync(fixturePath, "utf-8")) as InterfaceSpec;

const LOGGED_QUERIES = [
  "SELECT * FROM Sales WHERE Country = 'US'",
  "SELECT * FROM Sales WHERE Country = 'UK'",
  "SELECT TOP 5 * FROM Sales",
  "SELECT * FROM Sales",
];

function panel(id: number): Panel {
  const found = spec.panels.find((p) => p.id === id);
  if (!found) throw new Error(`no panel ${id}`);
  return found;
}

describe("initial state", () => {
  it("starts at each widget's current value and previews the base query", () => {
    for (const p of spec.panels) {
      expect(previewSql(p, initialState(p))).toBe(p.base_sql);
    }
  });
});

describe("on-change preview", () => {
  it("switching the country dropdown rewrites the literal", () => {
    const p = panel(0);
    const state = initialState(p);
    state.country = "UK";
    expect(previewSql(p, state)).toBe("SELECT * FROM Sales WHERE Country = 'UK'");
  });

  it("unchecking TOP 5 drops the clause", () => {
    const p = panel(1);
    const state = initialState(p);
    state.top_5 = false;
    expect(previewSql(p, state)).toBe("SELECT * FROM Sales");
  });

  it("never mutates the spec and resets with a fresh state", () => {
    const p = panel(0);
    const before = JSON.stringify(p);
    const state = initialState(p);
    state.country = "UK";
    previewSql(p, state);
    expect(JSON.stringify(p)).toBe(before);
    expect(previewSql(p, initialState(p))).toBe(p.base_sql);
  });
});

describe("validation", () => {
  it("rejects out-of-domain dropdown values", () => {
    const widget = panel(0).widgets[0] as Widget;
    expect(validate(widget, "FR")).toMatch(/not one of the options/);
    expect(validate(widget, "UK")).toBeNull();
  });

  it("rejects non-boolean toggles", () => {
    const widget = panel(1).widgets[0] as Widget;
    expect(validate(widget, "yes")).toMatch(/true or false/);
    expect(validate(widget, false)).toBeNull();
  });

  it("checks slider ranges and numeric textboxes", () => {
    const slider: Widget = {
      id: "w", kind: "slider", slot: "distance", caption: "",
      site: "query/having#0/expr[op=<=]#0/numliteral@1",
      domain: { type: "range", min: "10", max: "50", step: "20" },
      current: "10",
    };
    expect(validate(slider, 30)).toBeNull();
    expect(validate(slider, 99)).toMatch(/outside/);
    const textbox: Widget = {
      id: "t", kind: "textbox", slot: "n", caption: "",
      site: "query/where#0/expr[op=>]#0/numliteral@1",
      domain: { type: "text", literal: "numliteral", samples: [] },
      current: "5",
    };
    expect(validate(textbox, "abc")).toMatch(/not a number/);
    expect(validate(textbox, "42")).toBeNull();
  });
});

describe("fragments", () => {
  it("re-quotes string-literal sites and leaves others verbatim", () => {
    const dropdown = panel(0).widgets[0] as Widget;
    expect(siteKind(dropdown)).toBe("strliteral");
    expect(fragment(dropdown, "UK")).toBe("'UK'");
    const toggle = panel(1).widgets[0] as Widget;
    expect(fragment(toggle, true)).toBe("TOP 5");
    expect(fragment(toggle, false)).toBe("");
  });
});

describe("round-trip sweep", () => {
  it("reaches every logged query across all widget states", () => {
    const reachable = new Set<string>();
    for (const p of spec.panels) {
      for (const state of enumerateStates(p)) {
        reachable.add(canonical(previewSql(p, state)));
      }
    }
    for (const query of LOGGED_QUERIES) {
      expect(reachable.has(canonical(query))).toBe(true);
    }
  });

  it("enumerates range grids inclusively", () => {
    const slider: Widget = {
      id: "w", kind: "slider", slot: "d", caption: "", site: "query/where#0/numliteral@1",
      domain: { type: "range", min: "2863", max: "4983", step: "2120" },
      current: "4983",
    };
    expect(domainValues(slider)).toEqual([2863, 4983]);
  });
});
