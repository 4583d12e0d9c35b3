/** Canvas rendering: landscape translated so the player sits at the screen
 * center, reach ring, central drop target, revealed holds, goals, spotlight
 * halo around the cursor, and the countdown. Pure drawing; no game logic. */

import { ClientTrialState, DROP_TARGET_RADIUS } from "./state.js";
import type { Point } from "./types.js";

export interface RenderConfig {
  width: number;
  height: number;
  /** map units per pixel */
  scale: number;
  holdRadiusPx: number;
}

export function defaultRenderConfig(boundsWidth: number, canvasWidth: number): RenderConfig {
  return {
    width: canvasWidth,
    height: canvasWidth,
    scale: boundsWidth / canvasWidth,
    holdRadiusPx: 7,
  };
}

export function egocentricToPixels(p: Point, cfg: RenderConfig): Point {
  return [cfg.width / 2 + p[0] / cfg.scale, cfg.height / 2 + p[1] / cfg.scale];
}

export function pixelsToEgocentric(p: Point, cfg: RenderConfig): Point {
  return [(p[0] - cfg.width / 2) * cfg.scale, (p[1] - cfg.height / 2) * cfg.scale];
}

export function drawTrial(
  ctx: CanvasRenderingContext2D,
  state: ClientTrialState,
  cursorEgocentric: Point,
  remainingSeconds: number,
  cfg: RenderConfig,
): void {
  ctx.clearRect(0, 0, cfg.width, cfg.height);
  const center: Point = [cfg.width / 2, cfg.height / 2];

  // reach ring
  ctx.strokeStyle = "rgba(70, 130, 220, 0.8)";
  ctx.fillStyle = "rgba(70, 130, 220, 0.08)";
  ctx.beginPath();
  ctx.arc(center[0], center[1], state.map.reach_radius / cfg.scale, 0, Math.PI * 2);
  ctx.fill();
  ctx.stroke();

  // central drop target
  ctx.strokeStyle = "rgba(40, 90, 200, 0.9)";
  ctx.beginPath();
  ctx.arc(center[0], center[1], DROP_TARGET_RADIUS / cfg.scale, 0, Math.PI * 2);
  ctx.stroke();

  // goals
  for (const goal of state.map.goals) {
    const p = egocentricToPixels(state.toEgocentric(goal.position), cfg);
    ctx.strokeStyle = "rgba(30, 160, 60, 0.9)";
    ctx.beginPath();
    ctx.arc(p[0], p[1], goal.radius / cfg.scale, 0, Math.PI * 2);
    ctx.stroke();
  }

  // spotlight halo at the cursor
  const cursorPx = egocentricToPixels(cursorEgocentric, cfg);
  ctx.strokeStyle = "rgba(200, 180, 60, 0.5)";
  ctx.beginPath();
  ctx.arc(cursorPx[0], cursorPx[1], state.map.fovea_radius / cfg.scale, 0, Math.PI * 2);
  ctx.stroke();

  // revealed holds
  for (const hold of state.revealed.values()) {
    const p = egocentricToPixels(state.toEgocentric(hold.position), cfg);
    ctx.fillStyle = state.withinReach(hold.id) ? "#2f6fd0" : "#666";
    ctx.beginPath();
    ctx.arc(p[0], p[1], cfg.holdRadiusPx, 0, Math.PI * 2);
    ctx.fill();
  }

  // countdown
  ctx.fillStyle = "#222";
  ctx.font = "16px sans-serif";
  ctx.fillText(`${Math.max(0, remainingSeconds).toFixed(1)} s`, 12, 22);
}
