// Pure widget-state logic: domain validation, SQL fragments, live preview.
// Mirrors the server's instantiation rules so the preview always shows the
// exact SQL a Run would submit.

import type { Panel, PanelState, SlotValue, Widget } from "./types.js";

/** Node kind at the widget's change site, from the signature tail. */
export function siteKind(widget: Widget): string {
  const tail = widget.site.split("/").pop() ?? "";
  return tail.split("@")[0]?.split("[")[0] ?? "";
}

export function initialState(panel: Panel): PanelState {
  const state: PanelState = {};
  for (const widget of panel.widgets) {
    state[widget.slot] = Array.isArray(widget.current)
      ? [...widget.current]
      : widget.current;
  }
  return state;
}

/** Error message when the value is outside the widget's domain, else null. */
export function validate(widget: Widget, value: SlotValue): string | null {
  const domain = widget.domain;
  switch (domain.type) {
    case "options":
      if (typeof value !== "string" || !domain.options.includes(value)) {
        return `value ${JSON.stringify(value)} is not one of the options`;
      }
      return null;
    case "options_set": {
      if (!Array.isArray(value) || value.length === 0) {
        return "select at least one option";
      }
      for (const item of value) {
        if (!domain.options.includes(item)) {
          return `value ${JSON.stringify(item)} is not one of the options`;
        }
      }
      return null;
    }
    case "toggle":
      return typeof value === "boolean" ? null : "expected true or false";
    case "range": {
      const n = typeof value === "number" ? value : Number(value);
      if (!Number.isFinite(n)) return `value ${JSON.stringify(value)} is not a number`;
      const lo = Number(domain.min);
      const hi = Number(domain.max);
      if (n < lo || n > hi) return `${n} is outside [${domain.min}, ${domain.max}]`;
      return null;
    }
    case "text": {
      const text = String(value);
      if (domain.literal === "numliteral" && !Number.isFinite(Number(text))) {
        return `value ${JSON.stringify(text)} is not a number`;
      }
      if (domain.literal === "strliteral" && text.includes("'")) {
        return "embedded quotes are not allowed";
      }
      return null;
    }
  }
}

/** SQL text this slot contributes at the given value. */
export function fragment(widget: Widget, value: SlotValue): string {
  const domain = widget.domain;
  if (domain.type === "toggle") {
    return value ? domain.on : "";
  }
  if (domain.type === "options_set") {
    return (value as string[]).join(", ");
  }
  const text = String(value);
  if (siteKind(widget) === "strliteral" && text !== "") {
    return `'${text}'`;
  }
  return text;
}

/** Substitute every slot into the panel template; pure, never mutates. */
export function previewSql(panel: Panel, state: PanelState): string {
  let text = panel.template;
  for (const widget of panel.widgets) {
    const value = state[widget.slot] ?? widget.current;
    text = text.replace(`{{${widget.slot}}}`, fragment(widget, value));
  }
  return text.replace(/\s+/g, " ").trim();
}

/** Whitespace-insensitive form used to compare previews against log queries. */
export function canonical(sql: string): string {
  return sql.replace(/\s+/g, " ").trim();
}

const SWEEP_LIMIT = 512;

/** All values a widget can take, for finite domains (range walks its grid). */
export function domainValues(widget: Widget): SlotValue[] {
  const domain = widget.domain;
  switch (domain.type) {
    case "options":
      return [...domain.options];
    case "toggle":
      return [true, false];
    case "range": {
      const lo = Number(domain.min);
      const hi = Number(domain.max);
      const step = Number(domain.step);
      if (!(step > 0)) return [lo];
      const values: SlotValue[] = [];
      for (let v = lo; v <= hi + 1e-9 && values.length < SWEEP_LIMIT; v += step) {
        values.push(Math.round(v * 1e9) / 1e9);
      }
      return values;
    }
    case "options_set": {
      const subsets: string[][] = [];
      const n = domain.options.length;
      for (let mask = 1; mask < (1 << n) && subsets.length < SWEEP_LIMIT; mask++) {
        subsets.push(domain.options.filter((_, i) => mask & (1 << i)));
      }
      return subsets;
    }
    case "text":
      return [...domain.samples];
  }
}

/** Cartesian product of widget states; drives the round-trip sweep. */
export function enumerateStates(panel: Panel): PanelState[] {
  let states: PanelState[] = [{}];
  for (const widget of panel.widgets) {
    const next: PanelState[] = [];
    for (const state of states) {
      for (const value of domainValues(widget)) {
        if (next.length >= SWEEP_LIMIT) break;
        next.push({ ...state, [widget.slot]: value });
      }
    }
    states = next;
  }
  return states;
}
