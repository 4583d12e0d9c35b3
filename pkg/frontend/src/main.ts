/** Browser wiring: session flow, canvas events, trial loop.
 *
 * Serve the task API (see the repository README), host this bundle on the
 * same origin, and open index.html. Each map plays in sequence: the practice
 * map first, then the scored maps; the score and bonus tier show after each
 * upload.
 */

import { TaskApi, fetchTransport } from "./api.js";
import { defaultRenderConfig, drawTrial, pixelsToEgocentric } from "./render.js";
import { TrialController } from "./trial.js";
import { TRIAL_TIME_LIMIT_S } from "./types.js";
import type { Point } from "./types.js";

const REVEAL_INTERVAL_MS = 1000 / 30;

async function playTrial(
  api: TaskApi,
  sessionId: string,
  index: number,
  canvas: HTMLCanvasElement,
  status: HTMLElement,
): Promise<void> {
  const map = await api.getMap(sessionId, index);
  const cfg = defaultRenderConfig(map.bounds[0], canvas.width);
  const trial = new TrialController(api, sessionId, map, () => performance.now() / 1000);
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");

  status.textContent = map.practice
    ? "Practice: drag a highlighted hold onto the central ring to move."
    : `Map ${index}/${map.n_maps - 1}`;

  let cursor: Point = [0, 0];
  let dragging: number | null = null;
  let lastReveal = 0;

  const onMove = (event: MouseEvent) => {
    const rect = canvas.getBoundingClientRect();
    cursor = pixelsToEgocentric([event.clientX - rect.left, event.clientY - rect.top], cfg);
    const now = performance.now();
    if (now - lastReveal >= REVEAL_INTERVAL_MS) {
      lastReveal = now;
      void trial.spotlightUpdate(cursor);
    } else {
      trial.sampler.track(cursor);
    }
  };

  const nearestHold = (p: Point): number | null => {
    let best: number | null = null;
    let bestD = 20 * cfg.scale;
    for (const hold of trial.state.revealed.values()) {
      const ego = trial.state.toEgocentric(hold.position);
      const d = Math.hypot(ego[0] - p[0], ego[1] - p[1]);
      if (d <= bestD) {
        best = hold.id;
        bestD = d;
      }
    }
    return best;
  };

  const onDown = (event: MouseEvent) => {
    const rect = canvas.getBoundingClientRect();
    const p = pixelsToEgocentric([event.clientX - rect.left, event.clientY - rect.top], cfg);
    dragging = nearestHold(p);
  };

  const onUp = (event: MouseEvent) => {
    if (dragging === null) return;
    const rect = canvas.getBoundingClientRect();
    const p = pixelsToEgocentric([event.clientX - rect.left, event.clientY - rect.top], cfg);
    trial.dragToMove(dragging, p);
    dragging = null;
  };

  canvas.addEventListener("mousemove", onMove);
  canvas.addEventListener("mousedown", onDown);
  canvas.addEventListener("mouseup", onUp);
  trial.start();

  await new Promise<void>((resolve) => {
    const frame = () => {
      drawTrial(ctx, trial.state, cursor, TRIAL_TIME_LIMIT_S - trial.sampler.elapsed(), cfg);
      if (trial.running) {
        requestAnimationFrame(frame);
      } else {
        resolve();
      }
    };
    requestAnimationFrame(frame);
  });

  canvas.removeEventListener("mousemove", onMove);
  canvas.removeEventListener("mousedown", onDown);
  canvas.removeEventListener("mouseup", onUp);

  for (;;) {
    try {
      const result = await trial.finishTrial();
      status.textContent =
        `${trial.state.finished}: score ${result.score.toFixed(3)}, ` +
        `total ${result.cumulative_score.toFixed(2)} ` +
        `(bonus tier $${result.bonus_tier})`;
      break;
    } catch {
      status.textContent = "Upload failed; retrying in 2 s (your trial is kept locally)";
      await new Promise((r) => setTimeout(r, 2000));
    }
  }
}

export async function run(): Promise<void> {
  const canvas = document.getElementById("task") as HTMLCanvasElement;
  const status = document.getElementById("status") as HTMLElement;
  const api = new TaskApi(fetchTransport(""));
  const session = await api.createSession();
  for (let index = 0; index < session.n_maps; index++) {
    await playTrial(api, session.session_id, index, canvas, status);
    await new Promise((r) => setTimeout(r, 1500));
  }
  status.textContent = "All maps complete. Thank you!";
}

if (typeof document !== "undefined" && document.getElementById("task")) {
  void run();
}
