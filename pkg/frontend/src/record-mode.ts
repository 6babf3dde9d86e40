// Pointer-driven recording.
//
// The viewport pointer puppeteers the character root: drags stream
// root-transform samples at display rate, with the heading taken from
// the drag direction; key bindings emit grab/release/trigger events
// that the engine auto-appends as companion effects. The engine API is
// the same one a tracked-device client would use; the pointer is the
// desk-scale stand-in.

import { CommandPort } from "./client.js";
import { InputSampleWire, ServiceError } from "./protocol.js";

export interface RecordSummary {
  framesWritten: number;
  lastFrame: number;
  createdEffects: string[];
}

/**
 * The engine resamples streamed input onto the frame grid by taking,
 * for each frame time, the latest sample at or before it. Tests and
 * replay checks share this helper so they agree with the engine.
 */
export function latestAtOrBefore<T extends { t: number }>(
  samples: readonly T[],
  t: number,
  eps = 1e-9,
): T | null {
  // samples must be sorted by t ascending
  let lo = 0;
  let hi = samples.length;
  while (lo < hi) {
    const mid = (lo + hi) >> 1;
    const sample = samples[mid];
    if (sample !== undefined && sample.t <= t + eps) lo = mid + 1;
    else hi = mid;
  }
  return lo > 0 ? (samples[lo - 1] ?? null) : null;
}

/** Yaw around the vertical axis as a unit quaternion [w, x, y, z]. */
export function headingQuaternion(yawRad: number): [number, number, number, number] {
  return [Math.cos(yawRad / 2), 0, Math.sin(yawRad / 2), 0];
}

const FLUSH_BATCH = 24;

export class RecordMode {
  /** Set when the mode ends abnormally (e.g. a locked track). */
  banner: string | null = null;

  private readonly port: CommandPort;
  private armed: { slotId: string; effectId: string } | null = null;
  private queue: InputSampleWire[] = [];
  private streamed: InputSampleWire[] = [];
  private lastPointer: { t: number; x: number; z: number } | null = null;

  constructor(port: CommandPort) {
    this.port = port;
  }

  get active(): boolean {
    return this.armed !== null;
  }

  /** Every sample streamed this take, in send order. */
  streamedSamples(): readonly InputSampleWire[] {
    return this.streamed;
  }

  async arm(slotId: string, effectId: string): Promise<boolean> {
    this.banner = null;
    try {
      await this.port.send("record_begin", { slot_id: slotId, effect_id: effectId });
    } catch (err) {
      if (err instanceof ServiceError) {
        this.banner = err.message;
        return false;
      }
      throw err;
    }
    this.armed = { slotId, effectId };
    this.queue = [];
    this.streamed = [];
    this.lastPointer = null;
    return true;
  }

  /**
   * Pointer moved to ground point (x, z) at t seconds since arm. The
   * heading comes from the drag direction; the first sample of a drag
   * has no direction yet and carries no rotation.
   */
  pointer(t: number, x: number, z: number, y = 0): void {
    if (this.armed === null) throw new Error("recording is not armed");
    const sample: InputSampleWire = { t, position: [x, y, z] };
    const prev = this.lastPointer;
    if (prev !== null && (x !== prev.x || z !== prev.z)) {
      sample.rotation = headingQuaternion(Math.atan2(x - prev.x, z - prev.z));
    }
    this.lastPointer = { t, x, z };
    this.queue.push(sample);
    if (this.queue.length >= FLUSH_BATCH) void this.flush();
  }

  /** Send queued samples; resolves with the service's accepted count. */
  async flush(): Promise<number> {
    if (this.armed === null || this.queue.length === 0) return 0;
    const batch = this.queue;
    this.queue = [];
    const ack = await this.port.send("record_input", { samples: batch });
    this.streamed.push(...batch);
    return Number(ack.accepted ?? 0);
  }

  async grab(t: number, propId: string, hand?: string): Promise<void> {
    await this.event({ event: "grab", t, prop_id: propId, ...(hand ? { hand } : {}) });
  }

  async release(t: number, hand?: string): Promise<void> {
    await this.event({ event: "release", t, ...(hand ? { hand } : {}) });
  }

  async trigger(t: number, propId: string, state: string): Promise<void> {
    await this.event({ event: "trigger", t, prop_id: propId, state });
  }

  /** Stop and finalize the take. */
  async finish(): Promise<RecordSummary> {
    if (this.armed === null) throw new Error("recording is not armed");
    await this.flush();
    this.armed = null;
    const ack = await this.port.send("record_end");
    return {
      framesWritten: Number(ack.frames_written ?? 0),
      lastFrame: Number(ack.last_frame ?? 0),
      createdEffects: Array.isArray(ack.created_effects)
        ? ack.created_effects.map(String)
        : [],
    };
  }

  private async event(args: Record<string, unknown>): Promise<void> {
    if (this.armed === null) throw new Error("recording is not armed");
    await this.flush(); // keep samples and events ordered at the service
    await this.port.send("record_event", args);
  }
}
