import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("stale response handling", () => {
  it("drops posterior responses older than the newest seen", async () => {
    const bodies = [5, 3, 7].map((sequence) => ({
      scope: "class",
      prior: { alpha: 2, beta: 9 },
      posterior: { alpha: 27, beta: 84 },
      data: { blue: 25, total: 100 },
      summary: { mean: 0.243, mode: 0.238, variance: 0.001, interval: [0.1, 0.3], level: 0.95 },
      grid: { theta: [0.5], density: [1] },
      sequence,
    }));
    let call = 0;
    const client = new ApiClient("", async () => jsonResponse(200, bodies[call++]));
    const first = await client.getPosterior("s1");
    expect(first?.sequence).toBe(5);
    const stale = await client.getPosterior("s1"); // sequence 3 < 5
    expect(stale).toBeNull();
    const newer = await client.getPosterior("s1"); // sequence 7
    expect(newer?.sequence).toBe(7);
  });

  it("tracks sequences per session independently", async () => {
    const responses: Record<string, number[]> = { a: [9, 2], b: [1] };
    const client = new ApiClient("", async (input) => {
      const url = String(input);
      const sid = url.split("/")[2];
      const seq = responses[sid].shift()!;
      return jsonResponse(200, {
        id: sid, created_at: "t", prior: null, prior_locked: false,
        revealed: false, sequence: seq, bags: [],
      });
    });
    expect((await client.getSession("a"))?.sequence).toBe(9);
    expect((await client.getSession("b"))?.sequence).toBe(1); // unaffected by a
    expect(await client.getSession("a")).toBeNull(); // 2 < 9: stale
  });
});

describe("error propagation", () => {
  it("surfaces the service's code/rule/message", async () => {
    const client = new ApiClient("", async () =>
      jsonResponse(409, {
        code: "conflict",
        rule: "duplicate_bag_id",
        message: "bag 'b1' was already submitted",
      }));
    try {
      await client.addBag("s1", { bag_id: "b1", blue: 1, total: 2 });
      expect.unreachable("should have thrown");
    } catch (err) {
      const apiErr = err as ApiError;
      expect(apiErr).toBeInstanceOf(ApiError);
      expect(apiErr.status).toBe(409);
      expect(apiErr.rule).toBe("duplicate_bag_id");
      expect(apiErr.message).toContain("b1");
    }
  });
});
