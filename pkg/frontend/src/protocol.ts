// Wire types for the session service.
//
// These mirror docs/PROTOCOL.md in the host repository: one JSON command
// per WebSocket frame, one terminal ack/error per command, broadcast
// state-delta and transport-tick events carrying the authoritative view.

export type TransportMode = "stopped" | "playing" | "paused" | "recording";

export interface TransportView {
  mode: TransportMode;
  cursor: number;
  duration: number;
  frame_rate: number;
}

export interface EffectDoc {
  id: string;
  type: string;
  target: string;
  params: Record<string, unknown>;
  channels: string[];
}

export interface SlotDoc {
  id: string;
  start: number;
  end: number;
  effects: EffectDoc[];
}

export interface TrackDoc {
  id: string;
  name: string;
  muted: boolean;
  locked: boolean;
  slots: SlotDoc[];
}

export interface TimelineDoc {
  revision: number;
  frame_rate: number;
  duration: number;
  tracks: TrackDoc[];
}

export interface SceneObjectDoc {
  id: string;
  name: string;
  class: "character" | "prop" | "marker" | "camera";
  position: [number, number, number];
  triggerable: boolean;
  states: string[];
  payload: string;
}

export interface RegionDoc {
  name: string;
  polygon: [number, number][];
}

export interface SceneDoc {
  objects: SceneObjectDoc[];
  walls: [[number, number], [number, number]][];
  regions: RegionDoc[];
  spawns: Record<string, [number, number]>;
}

export interface DecorationDoc {
  kind: string;
  effect: string;
  [detail: string]: unknown;
}

export interface ObjectStateDoc {
  position: [number, number, number];
  rotation: [number, number, number, number];
  scale: [number, number, number];
  state: string | null;
  attached_to: [string, string] | null;
  pose?: [number, number, number][];
  decorations?: DecorationDoc[];
}

export interface StateDoc {
  frame: number;
  objects: Record<string, ObjectStateDoc>;
}

export interface SessionDoc {
  id: string;
  revision: number;
  frame_rate: number;
  duration: number;
  clients: number;
  transport: TransportView;
}

// -- command channel envelopes -------------------------------------------------

export interface CommandEnvelope {
  seq: number;
  session: string;
  op: string;
  args?: Record<string, unknown>;
}

export type EventKind =
  | "ack"
  | "error"
  | "state-delta"
  | "transport-tick"
  | "recording-ingest-ack";

export interface EventEnvelope {
  seq: number;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export interface StateDeltaPayload extends Record<string, unknown> {
  op: string;
  timeline: TimelineDoc;
}

export interface TransportTickPayload extends Record<string, unknown> {
  frame: number;
  mode: TransportMode;
  cursor: number;
  duration: number;
  frame_rate: number;
}

export interface ErrorPayload {
  code: string;
  message: string;
}

// Recording input, as streamed by record_input.
export interface InputSampleWire {
  t: number;
  position?: [number, number, number];
  rotation?: [number, number, number, number];
  joints?: Record<string, [number, number, number]>;
}

const EVENT_KINDS: ReadonlySet<string> = new Set([
  "ack",
  "error",
  "state-delta",
  "transport-tick",
  "recording-ingest-ack",
]);

/** Narrowing guard for frames arriving on the command channel. */
export function parseEvent(raw: string): EventEnvelope {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new Error(`service sent a non-JSON frame: ${raw.slice(0, 80)}`);
  }
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new Error("service frame is not an object");
  }
  const obj = data as Record<string, unknown>;
  if (typeof obj.seq !== "number" || typeof obj.kind !== "string") {
    throw new Error("service frame lacks seq/kind");
  }
  if (!EVENT_KINDS.has(obj.kind)) {
    throw new Error(`unknown event kind ${obj.kind}`);
  }
  const payload =
    typeof obj.payload === "object" && obj.payload !== null
      ? (obj.payload as Record<string, unknown>)
      : {};
  return { seq: obj.seq, kind: obj.kind as EventKind, payload };
}

/** A rejected command, carrying the service's error code and message. */
export class ServiceError extends Error {
  readonly code: string;

  constructor(code: string, message: string) {
    super(message);
    this.name = "ServiceError";
    this.code = code;
  }
}
