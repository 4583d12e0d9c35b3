import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { TaskApi } from "../src/api.js";
import { TrialController } from "../src/trial.js";
import { validateTrialRecord } from "../src/types.js";
import type { Point } from "../src/types.js";
import { FakeServer, MapDoc, TrafficEntry } from "./fakeServer.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const FIXTURES = join(HERE, "..", "..", "fixtures", "maps");
const OUT_DIR = join(HERE, "..", "test-output");

function loadMapDoc(mapId: string): MapDoc {
  const doc = JSON.parse(readFileSync(join(FIXTURES, `${mapId}.json`), "utf-8"));
  return {
    id: doc.id,
    bounds: doc.bounds,
    start: doc.start,
    reach_radius: doc.reach_radius,
    fovea_radius: doc.fovea_radius,
    holds: doc.holds,
    goals: doc.goals,
  };
}

function auditHiddenLandscape(traffic: TrafficEntry[], foveaRadius: number): string[] {
  /** Every hold coordinate that crossed the wire must sit inside the
   * spotlight disc of the reveal request that produced it, and map payloads
   * must not carry holds at all. */
  const problems: string[] = [];
  for (const entry of traffic) {
    if (entry.path.endsWith("/reveal")) {
      const req = entry.body as { x: number; y: number };
      const holds = (entry.response as { holds: { position: Point }[] }).holds;
      for (const hold of holds) {
        const d = Math.hypot(hold.position[0] - req.x, hold.position[1] - req.y);
        if (d > foveaRadius + 1e-9) {
          problems.push(`hold at ${hold.position} outside disc of ${[req.x, req.y]}`);
        }
      }
    } else if (entry.response && typeof entry.response === "object") {
      if ("holds" in (entry.response as Record<string, unknown>) && !entry.path.endsWith("/reveal")) {
        problems.push(`non-reveal response carries holds: ${entry.path}`);
      }
    }
  }
  return problems;
}

describe("scripted sessions", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("walks the corridor to the goal and uploads a SUCCESS record", async () => {
    const doc = loadMapDoc("corridor-8");
    const server = new FakeServer([doc]);
    const api = new TaskApi(server.transport());
    const session = await api.createSession(1);
    const map = await api.getMap(session.session_id, 0);
    expect("holds" in (map as unknown as Record<string, unknown>)).toBe(false);

    const trial = new TrialController(api, session.session_id, map, () => Date.now() / 1000);
    trial.start();
    for (const hold of doc.holds) {
      const ego: Point = [
        hold.position[0] - trial.state.playerWorld[0],
        hold.position[1] - trial.state.playerWorld[1],
      ];
      await trial.spotlightUpdate(ego);
      await vi.advanceTimersByTimeAsync(200);
      const recentered = trial.dragToMove(hold.id, [0, 0]);
      expect(recentered).toBe(true);
    }
    expect(trial.state.finished).toBe("SUCCESS");
    const result = await trial.finishTrial();
    expect(result.trial_id).toBe("t1");

    const stored = server.stored[0];
    expect(stored.outcome).toBe("SUCCESS");
    expect(stored.path_length).toBe(8);
    expect(validateTrialRecord(stored)).toEqual([]);
    expect(auditHiddenLandscape(server.traffic, doc.fovea_radius)).toEqual([]);
  });

  it("a full 60s session buffers 1800±40 samples and uploads a valid record", async () => {
    const doc = loadMapDoc("corridor-8");
    const server = new FakeServer([doc]);
    const api = new TaskApi(server.transport());
    const session = await api.createSession(2);
    const map = await api.getMap(session.session_id, 0);
    const trial = new TrialController(api, session.session_id, map, () => Date.now() / 1000);
    trial.start();

    // sweep the cursor in a slow arc that repeatedly crosses the hold chain
    let step = 0;
    while (trial.running) {
      const angle = (step / 240) * 2 * Math.PI;
      const ego: Point = [220 * Math.cos(angle), 220 * Math.sin(angle)];
      if (step % 3 === 0) {
        await trial.spotlightUpdate(ego);
      } else {
        trial.sampler.track(ego);
      }
      await vi.advanceTimersByTimeAsync(100);
      step += 1;
    }

    const record = trial.assembleRecord();
    expect(record.outcome).toBe("TIMEOUT");
    expect(record.attention.t.length).toBeGreaterThanOrEqual(1760);
    expect(record.attention.t.length).toBeLessThanOrEqual(1840);
    expect(record.duration).toBeLessThanOrEqual(60);
    expect(validateTrialRecord(record)).toEqual([]);

    const result = await trial.finishTrial();
    expect(result.trial_id).toBe("t1");
    const problems = auditHiddenLandscape(server.traffic, doc.fovea_radius);
    expect(problems).toEqual([]);
    // something was actually revealed, so the audit is not vacuous
    const revealResponses = server.traffic.filter((e) => e.path.endsWith("/reveal"));
    const revealedCount = revealResponses.reduce(
      (n, e) => n + (e.response as { holds: unknown[] }).holds.length,
      0,
    );
    expect(revealedCount).toBeGreaterThan(0);

    // persist artifacts for the server-side ingest bridge test
    mkdirSync(OUT_DIR, { recursive: true });
    writeFileSync(join(OUT_DIR, "uploaded_record.json"), JSON.stringify(server.stored[0]));
    writeFileSync(
      join(OUT_DIR, "traffic.json"),
      JSON.stringify({ map_id: doc.id, fovea_radius: doc.fovea_radius, traffic: server.traffic }),
    );
  });

  it("retains the record and retries after an upload failure", async () => {
    const doc = loadMapDoc("trivial-1");
    const server = new FakeServer([doc]);
    server.failNextSubmits = 1;
    const api = new TaskApi(server.transport());
    const session = await api.createSession(3);
    const map = await api.getMap(session.session_id, 0);
    const trial = new TrialController(api, session.session_id, map, () => Date.now() / 1000);
    trial.start();
    const hold = doc.holds[0];
    await trial.spotlightUpdate([
      hold.position[0] - doc.start[0],
      hold.position[1] - doc.start[1],
    ]);
    await vi.advanceTimersByTimeAsync(100);
    trial.dragToMove(hold.id, [0, 0]);
    expect(trial.state.finished).toBe("SUCCESS");

    await expect(trial.finishTrial()).rejects.toThrow("injected");
    expect(trial.hasPendingUpload).toBe(true);
    const result = await trial.finishTrial();
    expect(result.trial_id).toBe("t1");
    expect(server.stored).toHaveLength(1);
  });

  it("failed drags are recorded as data, not errors", async () => {
    const doc = loadMapDoc("corridor-8");
    const server = new FakeServer([doc]);
    const api = new TaskApi(server.transport());
    const session = await api.createSession(4);
    const map = await api.getMap(session.session_id, 0);
    const trial = new TrialController(api, session.session_id, map, () => Date.now() / 1000);
    trial.start();
    const far = doc.holds[5];
    await trial.spotlightUpdate([
      far.position[0] - doc.start[0],
      far.position[1] - doc.start[1],
    ]);
    await vi.advanceTimersByTimeAsync(100);
    const recentered = trial.dragToMove(far.id, [0, 0]);
    expect(recentered).toBe(false);
    expect(trial.state.navigation).toHaveLength(1);
    expect(trial.state.navigation[0].success).toBe(false);
    expect(trial.state.playerWorld).toEqual(doc.start);
  });
});
