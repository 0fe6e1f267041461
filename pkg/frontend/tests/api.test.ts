import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, LatestWins } from "../src/api.js";
import { debounce } from "../src/debounce.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("posts control poses and returns samples", async () => {
    const fetchFn = vi.fn(async (url: string, init?: RequestInit) => {
      expect(url).toBe("http://svc/api/spline/sample");
      const body = JSON.parse(String(init?.body));
      expect(body.control_poses.length).toBe(4);
      expect(body.rate).toBe(25);
      return jsonResponse({ samples: [{ timestamp: 0, position: [0, 0, 0], rotation: [0, 0, 0], velocity: [0, 0, 0], angular_rate: [0, 0, 0] }] });
    });
    const api = new ApiClient("http://svc", fetchFn);
    const out = await api.sampleSpline(
      [0, 1, 2, 3].map((k) => ({ timestamp: k, position: [k, 0, 1.5] as [number, number, number], rotation: [0, 0, 0] as [number, number, number] })),
      25,
    );
    expect(out.samples.length).toBe(1);
  });

  it("raises ApiError with the service stage on error payloads", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse({ error: { stage: "spline", message: "needs 4" } }, 400),
    );
    const api = new ApiClient("http://svc", fetchFn);
    await expect(api.sampleSpline([], 10)).rejects.toThrowError(ApiError);
    await expect(api.sampleSpline([], 10)).rejects.toMatchObject({ stage: "spline", status: 400 });
  });

  it("wraps network failures as stage=network", async () => {
    const api = new ApiClient("http://svc", async () => {
      throw new TypeError("fetch failed");
    });
    await expect(api.getScene()).rejects.toMatchObject({ stage: "network", status: 0 });
  });
});

describe("LatestWins", () => {
  it("drops superseded responses", async () => {
    const channel = new LatestWins();
    let release1!: (v: string) => void;
    const slow = new Promise<string>((res) => (release1 = res));
    const first = channel.run(() => slow);
    const second = channel.run(async () => "second");
    expect(await second).toBe("second");
    release1("first");
    expect(await first).toBeNull(); // superseded
  });

  it("latest call always delivers", async () => {
    const channel = new LatestWins();
    const out = await channel.run(async () => 7);
    expect(out).toBe(7);
  });
});

describe("debounce", () => {
  it("only the last call within the window fires", () => {
    vi.useFakeTimers();
    const hits: number[] = [];
    const fn = debounce((v: number) => hits.push(v), 150);
    fn(1);
    vi.advanceTimersByTime(100);
    fn(2);
    vi.advanceTimersByTime(100);
    fn(3);
    vi.advanceTimersByTime(150);
    expect(hits).toEqual([3]);
    vi.useRealTimers();
  });

  it("cancel suppresses the pending call", () => {
    vi.useFakeTimers();
    const hits: number[] = [];
    const fn = debounce((v: number) => hits.push(v), 150);
    fn(1);
    fn.cancel();
    vi.advanceTimersByTime(500);
    expect(hits).toEqual([]);
    vi.useRealTimers();
  });

  it("flush fires immediately", () => {
    vi.useFakeTimers();
    const hits: number[] = [];
    const fn = debounce((v: number) => hits.push(v), 150);
    fn(9);
    fn.flush();
    expect(hits).toEqual([9]);
    vi.advanceTimersByTime(500);
    expect(hits).toEqual([9]);
    vi.useRealTimers();
  });
});
