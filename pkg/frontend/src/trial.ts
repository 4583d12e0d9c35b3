/** One trial from first spotlight to record upload.
 *
 * Cursor movement drives both telemetry (30 Hz egocentric samples) and
 * spotlight reveal requests; drags to the central target attempt moves; the
 * trial ends on goal arrival or when the 60 s budget runs out, after which
 * the assembled record is validated and submitted (with local retention and
 * retry on upload failure).
 */

import { TaskApi } from "./api.js";
import { ClientTrialState } from "./state.js";
import { AttentionSampler, Clock } from "./telemetry.js";
import {
  MapPayload,
  Point,
  SubmitResult,
  TRIAL_TIME_LIMIT_S,
  TrialRecordDoc,
  validateTrialRecord,
} from "./types.js";

export class TrialController {
  readonly state: ClientTrialState;
  readonly sampler: AttentionSampler;
  private pendingUpload: TrialRecordDoc | null = null;

  constructor(
    private readonly api: TaskApi,
    private readonly sessionId: string,
    readonly map: MapPayload,
    clock: Clock,
  ) {
    this.state = new ClientTrialState(map);
    this.sampler = new AttentionSampler(clock);
  }

  start(): void {
    this.sampler.start();
  }

  get running(): boolean {
    return this.state.finished === null && this.sampler.elapsed() < TRIAL_TIME_LIMIT_S;
  }

  /** Cursor moved (egocentric coordinates): feed telemetry and ask the
   * server what the spotlight uncovers there. Reveal failures are tolerated;
   * the cursor keeps sampling and the next update retries. */
  async spotlightUpdate(egocentric: Point): Promise<void> {
    this.sampler.track(egocentric);
    try {
      const holds = await this.api.reveal(this.sessionId, this.map.index, this.state.toWorld(egocentric));
      this.state.absorbReveal(holds);
    } catch {
      // transient network lapse: revealed set simply lags until the next update
    }
  }

  /** Drag released: attempt the move. Returns whether the landscape
   * recentered. */
  dragToMove(holdId: number, releaseEgocentric: Point): boolean {
    if (!this.running) return false;
    const outcome = this.state.attemptMove(holdId, releaseEgocentric, this.sampler.elapsed());
    return outcome.recentered;
  }

  /** Called when the timer expires or the goal was reached. */
  assembleRecord(): TrialRecordDoc {
    this.sampler.stop();
    if (this.state.finished === null) {
      this.state.finished = "TIMEOUT";
    }
    const duration = Math.min(this.sampler.elapsed(), TRIAL_TIME_LIMIT_S);
    const doc: TrialRecordDoc = {
      format: 1,
      map_id: this.map.map_id,
      actor: "HUMAN",
      outcome: this.state.finished,
      duration,
      path_length: this.state.pathLength(),
      navigation: this.state.navigation.slice(),
      attention: {
        t: this.sampler.buffer.t.slice(),
        x: this.sampler.buffer.x.slice(),
        y: this.sampler.buffer.y.slice(),
      },
      meta: { session_id: this.sessionId },
    };
    const problems = validateTrialRecord(doc);
    if (problems.length) {
      throw new Error(`assembled an invalid trial record: ${problems.join("; ")}`);
    }
    return doc;
  }

  /** Upload the finished trial; on failure the record is retained and can be
   * retried. */
  async finishTrial(): Promise<SubmitResult> {
    const doc = this.pendingUpload ?? this.assembleRecord();
    this.pendingUpload = doc;
    const result = await this.api.submitTrial(this.sessionId, doc);
    this.pendingUpload = null;
    return result;
  }

  get hasPendingUpload(): boolean {
    return this.pendingUpload !== null;
  }
}
