import { afterEach, describe, expect, it, vi } from "vitest";

import { ConsoleApi, ServiceError } from "../src/api.js";

function mockFetch(status: number, body: unknown) {
  const fn = vi.fn(async () =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    }),
  );
  vi.stubGlobal("fetch", fn);
  return fn;
}

afterEach(() => vi.unstubAllGlobals());

describe("ConsoleApi", () => {
  it("creates sessions", async () => {
    const fn = mockFetch(200, { request_id: "r", session_id: "s123" });
    const api = new ConsoleApi("http://svc:8000/");
    expect(await api.createSession()).toBe("s123");
    expect(fn).toHaveBeenCalledWith("http://svc:8000/sessions", { method: "POST" });
  });

  it("submits turns with images and artifact handles", async () => {
    const fn = mockFetch(200, {
      request_id: "r", session_id: "s", turn: 2, response: "ok",
      result: { intent: "freeform", template: null, results: {} },
      trace: [], artifacts: {},
    });
    const api = new ConsoleApi("http://svc:8000");
    await api.submitTurn("s", "analyze", [{ png_base64: "AA==" }], ["art-1"]);
    const [url, init] = fn.mock.calls[0] as [string, RequestInit];
    expect(url).toBe("http://svc:8000/sessions/s/turns");
    expect(JSON.parse(init.body as string)).toEqual({
      query: "analyze",
      images: [{ png_base64: "AA==" }],
      artifact_handles: ["art-1"],
    });
  });

  it("raises typed errors with the service's code", async () => {
    mockFetch(404, {
      request_id: "r",
      error: { code: "fragment_not_found", message: "unknown fragment 'ZZZ'" },
    });
    const api = new ConsoleApi("http://svc:8000");
    await expect(api.fragment("ZZZ")).rejects.toThrowError(ServiceError);
    await expect(api.fragment("ZZZ")).rejects.toMatchObject({
      status: 404,
      detail: { code: "fragment_not_found" },
    });
  });

  it("encodes search parameters", async () => {
    const fn = mockFetch(200, { request_id: "r", query: "q", hits: [] });
    const api = new ConsoleApi("http://svc:8000");
    await api.search("token-C01", 3);
    expect(fn.mock.calls[0][0]).toBe("http://svc:8000/kb/search?q=token-C01&k=3");
  });
});
