// Client for the two serve endpoints.

import { firstSchemaViolation, type InterfaceSpec, type PanelState } from "./types.js";

export type QueryOutcome =
  | { ok: true; sql: string; rows?: Record<string, unknown>[] }
  | { ok: false; status: number; error: string; field?: string };

export async function fetchInterface(baseUrl: string): Promise<InterfaceSpec> {
  const response = await fetch(`${baseUrl}/interface`);
  if (!response.ok) {
    throw new Error(`GET /interface failed: HTTP ${response.status}`);
  }
  const data = (await response.json()) as unknown;
  const violation = firstSchemaViolation(data);
  if (violation !== null) {
    throw new Error(`invalid interface spec: bad field ${violation}`);
  }
  return data as InterfaceSpec;
}

export async function runQuery(
  baseUrl: string,
  panelId: number,
  slotValues: PanelState,
): Promise<QueryOutcome> {
  let response: Response;
  try {
    response = await fetch(`${baseUrl}/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ panel: panelId, slot_values: slotValues }),
    });
  } catch (error) {
    return { ok: false, status: 0, error: `connection failed: ${String(error)}` };
  }
  let body: Record<string, unknown>;
  try {
    body = (await response.json()) as Record<string, unknown>;
  } catch {
    body = {};
  }
  if (!response.ok) {
    return {
      ok: false,
      status: response.status,
      error: typeof body.error === "string" ? body.error : `HTTP ${response.status}`,
      field: typeof body.field === "string" ? body.field : undefined,
    };
  }
  return {
    ok: true,
    sql: String(body.sql ?? ""),
    rows: Array.isArray(body.rows) ? (body.rows as Record<string, unknown>[]) : undefined,
  };
}
