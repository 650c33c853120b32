// Wire types for the interface spec served at GET /interface.

export interface OptionsDomain {
  type: "options";
  options: string[];
}

export interface OptionsSetDomain {
  type: "options_set";
  options: string[];
}

export interface RangeDomain {
  type: "range";
  min: string;
  max: string;
  step: string;
}

export interface ToggleDomain {
  type: "toggle";
  on: string;
}

export interface TextDomain {
  type: "text";
  literal: string;
  samples: string[];
}

export type Domain =
  | OptionsDomain
  | OptionsSetDomain
  | RangeDomain
  | ToggleDomain
  | TextDomain;

export type SlotValue = string | number | boolean | string[];

export interface Widget {
  id: string;
  kind: "button" | "checkbox" | "dropdown" | "slider" | "textbox" | "listbox";
  slot: string;
  domain: Domain;
  current: SlotValue;
  caption: string;
  site: string;
}

export interface Panel {
  id: number;
  base_sql: string;
  template: string;
  widgets: Widget[];
}

export interface Stats {
  coverage?: { covered: number; total: number };
  C_e?: number;
  C_c?: number;
  S_max?: number;
}

export interface InterfaceSpec {
  panels: Panel[];
  stats?: Stats;
}

/** Widget states of one panel, keyed by slot name. */
export type PanelState = Record<string, SlotValue>;

/**
 * Cheap structural check; returns the path of the first invalid field so the
 * UI can show it in an error banner, or null when the spec looks sound.
 */
export function firstSchemaViolation(data: unknown): string | null {
  if (typeof data !== "object" || data === null) return "$";
  const spec = data as Record<string, unknown>;
  if (!Array.isArray(spec.panels)) return "panels";
  for (let i = 0; i < spec.panels.length; i++) {
    const panel = spec.panels[i] as Record<string, unknown> | null;
    const at = `panels[${i}]`;
    if (typeof panel !== "object" || panel === null) return at;
    if (typeof panel.id !== "number") return `${at}.id`;
    if (typeof panel.base_sql !== "string") return `${at}.base_sql`;
    if (typeof panel.template !== "string") return `${at}.template`;
    if (!Array.isArray(panel.widgets)) return `${at}.widgets`;
    for (let j = 0; j < panel.widgets.length; j++) {
      const widget = panel.widgets[j] as Record<string, unknown> | null;
      const wat = `${at}.widgets[${j}]`;
      if (typeof widget !== "object" || widget === null) return wat;
      if (typeof widget.slot !== "string") return `${wat}.slot`;
      if (typeof widget.kind !== "string") return `${wat}.kind`;
      if (typeof widget.site !== "string") return `${wat}.site`;
      const domain = widget.domain as Record<string, unknown> | null;
      if (typeof domain !== "object" || domain === null) return `${wat}.domain`;
      if (typeof domain.type !== "string") return `${wat}.domain.type`;
    }
  }
  return null;
}
