/** Client-side trial state: revealed holds, the egocentric coordinate frame,
 * and the drag-to-navigate rule.
 *
 * The player is always rendered at the screen center; the landscape carries
 * the motion. World coordinates are the server's map units; the screen frame
 * is world translated so the player's current world position maps to the
 * center. A successful move therefore translates every rendered hold by the
 * same vector (the recentering the task is built around).
 */

import type { MapPayload, NavigationEvent, Point, RevealedHold } from "./types.js";

export function dist(a: Point, b: Point): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

/** Radius of the central drop target, in map units. Playability constant. */
export const DROP_TARGET_RADIUS = 30;

export interface AttemptOutcome {
  event: NavigationEvent;
  recentered: boolean;
  reachedGoal: boolean;
}

export class ClientTrialState {
  readonly map: MapPayload;
  /** player location in world coordinates */
  playerWorld: Point;
  /** revealed holds by id, world coordinates */
  readonly revealed = new Map<number, RevealedHold>();
  readonly navigation: NavigationEvent[] = [];
  finished: "SUCCESS" | "TIMEOUT" | null = null;

  constructor(map: MapPayload) {
    this.map = map;
    this.playerWorld = [map.start[0], map.start[1]];
  }

  /** world -> egocentric (player at origin). The screen frame is this plus
   * the fixed screen center offset. */
  toEgocentric(world: Point): Point {
    return [world[0] - this.playerWorld[0], world[1] - this.playerWorld[1]];
  }

  toWorld(egocentric: Point): Point {
    return [egocentric[0] + this.playerWorld[0], egocentric[1] + this.playerWorld[1]];
  }

  absorbReveal(holds: RevealedHold[]): void {
    for (const hold of holds) {
      this.revealed.set(hold.id, hold);
    }
  }

  withinReach(holdId: number): boolean {
    const hold = this.revealed.get(holdId);
    if (!hold) return false;
    return dist(hold.position, this.playerWorld) <= this.map.reach_radius;
  }

  inGoal(world: Point): boolean {
    return this.map.goals.some((g) => dist(g.position, world) <= g.radius);
  }

  /** Drag release: the move succeeds when the dragged hold is inside the
   * reach ring and the release point landed on the central target. Either
   * way the attempt is logged. */
  attemptMove(holdId: number, releaseEgocentric: Point, t: number): AttemptOutcome {
    const hold = this.revealed.get(holdId);
    const onTarget = Math.hypot(releaseEgocentric[0], releaseEgocentric[1]) <= DROP_TARGET_RADIUS;
    const success = hold !== undefined && onTarget && this.withinReach(holdId);
    const event: NavigationEvent = {
      t,
      target_hold_id: hold ? hold.id : null,
      success,
    };
    this.navigation.push(event);
    let reachedGoal = false;
    if (success && hold) {
      this.playerWorld = [hold.position[0], hold.position[1]];
      reachedGoal = this.inGoal(this.playerWorld);
      if (reachedGoal) {
        this.finished = "SUCCESS";
      }
    }
    return { event, recentered: success, reachedGoal };
  }

  pathLength(): number {
    return this.navigation.filter((n) => n.success).length;
  }
}
