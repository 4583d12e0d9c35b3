import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { AttentionSampler } from "../src/telemetry.js";

describe("attention sampler", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("buffers about 1800 samples over a 60s trial", async () => {
    const sampler = new AttentionSampler(() => Date.now() / 1000);
    sampler.start();
    await vi.advanceTimersByTimeAsync(60_000);
    sampler.stop();
    expect(sampler.buffer.t.length).toBeGreaterThanOrEqual(1760);
    expect(sampler.buffer.t.length).toBeLessThanOrEqual(1840);
  });

  it("stays within the band under 2% timing jitter", () => {
    // drive ticks manually with jittered spacing instead of the interval
    const clock = { t: 0 };
    const sampler = new AttentionSampler(() => clock.t);
    let phase = 0.0;
    while (clock.t < 60) {
      phase += 1;
      const jitter = 1 + 0.02 * Math.sin(phase * 2.39996); // deterministic +-2%
      clock.t += (1 / 30) * jitter;
      if (clock.t >= 60) break;
      sampler.sample();
    }
    expect(sampler.buffer.t.length).toBeGreaterThanOrEqual(1760);
    expect(sampler.buffer.t.length).toBeLessThanOrEqual(1840);
  });

  it("records the latest egocentric cursor at each tick", async () => {
    const sampler = new AttentionSampler(() => Date.now() / 1000);
    sampler.start();
    sampler.track([0, 0]);
    await vi.advanceTimersByTimeAsync(1000);
    sampler.track([120, -45]);
    await vi.advanceTimersByTimeAsync(1000);
    sampler.stop();
    const n = sampler.buffer.t.length;
    expect(sampler.buffer.x[0]).toBe(0);
    expect(sampler.buffer.x[n - 1]).toBe(120);
    expect(sampler.buffer.y[n - 1]).toBe(-45);
    // timestamps are non-decreasing and relative to the start
    for (let i = 1; i < n; i++) {
      expect(sampler.buffer.t[i]).toBeGreaterThanOrEqual(sampler.buffer.t[i - 1]);
    }
    expect(sampler.buffer.t[0]).toBeGreaterThanOrEqual(0);
  });

  it("a cursor at the center samples (0,0)", async () => {
    const sampler = new AttentionSampler(() => Date.now() / 1000);
    sampler.start();
    sampler.track([0, 0]);
    await vi.advanceTimersByTimeAsync(100);
    sampler.stop();
    expect(sampler.buffer.x.every((v) => v === 0)).toBe(true);
    expect(sampler.buffer.y.every((v) => v === 0)).toBe(true);
  });
});
