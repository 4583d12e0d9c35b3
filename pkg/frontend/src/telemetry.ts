/** Fixed-rate attention sampling, decoupled from the render loop.
 *
 * The sampler ticks at 30 Hz on its own clock and records the cursor in
 * egocentric coordinates. A scripted minute therefore buffers ~1800 samples
 * regardless of frame rate.
 */

import { ATTENTION_HZ } from "./types.js";
import type { Point } from "./types.js";

export interface AttentionBuffer {
  t: number[];
  x: number[];
  y: number[];
}

export type Clock = () => number; // seconds

export class AttentionSampler {
  readonly buffer: AttentionBuffer = { t: [], x: [], y: [] };
  private cursor: Point = [0, 0];
  private timer: ReturnType<typeof setInterval> | null = null;
  private startedAt = 0;

  constructor(
    private readonly clock: Clock,
    private readonly hz: number = ATTENTION_HZ,
  ) {}

  /** Update the latest egocentric cursor position; cheap, call per mousemove. */
  track(egocentric: Point): void {
    this.cursor = egocentric;
  }

  start(): void {
    if (this.timer !== null) return;
    this.startedAt = this.clock();
    this.timer = setInterval(() => this.sample(), 1000 / this.hz);
  }

  /** One tick: timestamp relative to trial start. */
  sample(): void {
    const t = this.clock() - this.startedAt;
    this.buffer.t.push(t);
    this.buffer.x.push(this.cursor[0]);
    this.buffer.y.push(this.cursor[1]);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  elapsed(): number {
    return this.clock() - this.startedAt;
  }
}
