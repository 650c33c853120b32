// API client behavior against a mocked fetch: success shapes, 400 field
// surfacing, connection failures.

import { afterEach, describe, expect, it, vi } from "vitest";

import { fetchInterface, runQuery } from "../src/api.js";

const SPEC = {
  panels: [{
    id: 0,
    base_sql: "SELECT * FROM t",
    template: "SELECT * FROM t",
    widgets: [],
  }],
};

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("fetchInterface", () => {
  it("returns a valid spec", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(200, SPEC)));
    const spec = await fetchInterface("");
    expect(spec.panels).toHaveLength(1);
  });

  it("names the first invalid field of a malformed spec", async () => {
    const broken = { panels: [{ id: "zero" }] };
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(200, broken)));
    await expect(fetchInterface("")).rejects.toThrow("panels[0].id");
  });

  it("propagates HTTP failures", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(500, {})));
    await expect(fetchInterface("")).rejects.toThrow("HTTP 500");
  });
});

describe("runQuery", () => {
  it("returns sql and rows on success", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse(200, { sql: "SELECT 1", rows: [{ a: 1 }] })));
    const outcome = await runQuery("", 0, {});
    expect(outcome).toEqual({ ok: true, sql: "SELECT 1", rows: [{ a: 1 }] });
  });

  it("omits rows under the echo backend", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(200, { sql: "SELECT 1" })));
    const outcome = await runQuery("", 0, {});
    expect(outcome.ok && outcome.rows).toBeUndefined();
  });

  it("surfaces the offending slot on a 400", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse(400, { error: "slot 'country': value not in options", field: "country" })));
    const outcome = await runQuery("", 0, { country: "FR" });
    expect(outcome).toMatchObject({ ok: false, status: 400, field: "country" });
  });

  it("surfaces backend diagnostics on a 502", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse(502, { error: "backend exited 3" })));
    const outcome = await runQuery("", 0, {});
    expect(outcome).toMatchObject({ ok: false, status: 502 });
  });

  it("reports connection failures without throwing", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => {
      throw new TypeError("fetch failed");
    }));
    const outcome = await runQuery("", 0, {});
    expect(outcome).toMatchObject({ ok: false, status: 0 });
    expect(!outcome.ok && outcome.error).toMatch(/connection failed/);
  });
});
