// Session client: REST documents plus the per-session WebSocket command
// channel. The service holds the authoritative project; this client is a
// thin, promise-based messenger with no truth of its own.

import {
  CommandEnvelope,
  ErrorPayload,
  EventEnvelope,
  SceneDoc,
  ServiceError,
  SessionDoc,
  StateDeltaPayload,
  StateDoc,
  TimelineDoc,
  TransportTickPayload,
  parseEvent,
} from "./protocol.js";

/** The slim surface panels talk to; the real client and test fakes share it. */
export interface CommandPort {
  send(op: string, args?: Record<string, unknown>): Promise<Record<string, unknown>>;
}

/** Minimal socket shape so tests can inject a fake and node can use `ws`. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev: { code: number; reason: string }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  onopen: ((ev: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

interface Pending {
  resolve: (payload: Record<string, unknown>) => void;
  reject: (err: Error) => void;
}

async function restError(res: Response): Promise<ServiceError> {
  let code = `HTTP${res.status}`;
  let message = res.statusText;
  try {
    // REST errors arrive as {"error": <code>, "message": <text>}
    const body = (await res.json()) as { error?: string; message?: string };
    if (typeof body.error === "string") code = body.error;
    if (typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON error body; keep the HTTP status
  }
  return new ServiceError(code, message);
}

async function expectJson<T>(res: Response): Promise<T> {
  if (!res.ok) throw await restError(res);
  return (await res.json()) as T;
}

export class SessionClient implements CommandPort {
  readonly baseUrl: string;
  readonly sessionId: string;

  private readonly socketFactory: SocketFactory;
  private socket: SocketLike | null = null;
  private nextSeq = 1;
  private readonly pending = new Map<number, Pending>();
  private readonly deltaListeners: Array<(ev: EventEnvelope) => void> = [];
  private readonly tickListeners: Array<(ev: EventEnvelope) => void> = [];
  private readonly closeListeners: Array<(code: number, reason: string) => void> = [];

  constructor(baseUrl: string, sessionId: string, socketFactory: SocketFactory) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.sessionId = sessionId;
    this.socketFactory = socketFactory;
  }

  // -- session lifecycle over REST ----------------------------------------------

  /** POST /projects; empty body for a fresh project, or script/file source. */
  static async create(
    baseUrl: string,
    socketFactory: SocketFactory,
    source?: { kind: "script" | "file"; body: string | Uint8Array },
  ): Promise<SessionClient> {
    const base = baseUrl.replace(/\/$/, "");
    const url = source ? `${base}/projects?source=${source.kind}` : `${base}/projects`;
    const res = await fetch(url, {
      method: "POST",
      body: source ? (source.body as RequestInit["body"]) : undefined,
    });
    const doc = await expectJson<SessionDoc>(res);
    return new SessionClient(base, doc.id, socketFactory);
  }

  async describe(): Promise<SessionDoc> {
    return expectJson(await fetch(`${this.baseUrl}/projects/${this.sessionId}`));
  }

  async timeline(): Promise<TimelineDoc> {
    return expectJson(
      await fetch(`${this.baseUrl}/projects/${this.sessionId}/timeline`),
    );
  }

  async scene(): Promise<SceneDoc> {
    return expectJson(await fetch(`${this.baseUrl}/projects/${this.sessionId}/scene`));
  }

  async stateAt(frame: number): Promise<StateDoc> {
    return expectJson(
      await fetch(`${this.baseUrl}/projects/${this.sessionId}/state?frame=${frame}`),
    );
  }

  async validate(): Promise<{ valid: boolean; violations: string[] }> {
    return expectJson(
      await fetch(`${this.baseUrl}/projects/${this.sessionId}/validate`),
    );
  }

  /** Download the project container bytes (the save file). */
  async downloadFile(): Promise<Uint8Array> {
    const res = await fetch(`${this.baseUrl}/projects/${this.sessionId}/file`);
    if (!res.ok) throw await restError(res);
    return new Uint8Array(await res.arrayBuffer());
  }

  /** Replace the session's project from container bytes. */
  async uploadFile(bytes: Uint8Array): Promise<SessionDoc> {
    const res = await fetch(`${this.baseUrl}/projects/${this.sessionId}/file`, {
      method: "PUT",
      body: bytes as unknown as BodyInit,
    });
    return expectJson(res);
  }

  // -- the command channel --------------------------------------------------------

  connect(): Promise<void> {
    const wsBase = this.baseUrl.replace(/^http/, "ws");
    const socket = this.socketFactory(`${wsBase}/ws/${this.sessionId}`);
    this.socket = socket;
    socket.onmessage = (ev) => this.dispatch(String(ev.data));
    socket.onclose = (ev) => {
      const err = new ServiceError("ConnectionClosed", `${ev.code} ${ev.reason}`);
      for (const p of this.pending.values()) p.reject(err);
      this.pending.clear();
      for (const fn of this.closeListeners) fn(ev.code, ev.reason);
    };
    return new Promise((resolve, reject) => {
      socket.onopen = () => resolve();
      socket.onerror = (ev) => reject(ev instanceof Error ? ev : new Error(String(ev)));
    });
  }

  close(): void {
    this.socket?.close();
  }

  /**
   * Send one command; resolves with the terminal ack payload (which for
   * record_input arrives as a recording-ingest-ack) or rejects with the
   * service's coded error. Sequence numbers are assigned here and are
   * strictly increasing per connection, as the protocol requires.
   */
  send(op: string, args?: Record<string, unknown>): Promise<Record<string, unknown>> {
    const socket = this.socket;
    if (socket === null) return Promise.reject(new Error("connect() first"));
    const seq = this.nextSeq++;
    const envelope: CommandEnvelope = { seq, session: this.sessionId, op };
    if (args !== undefined) envelope.args = args;
    return new Promise((resolve, reject) => {
      this.pending.set(seq, { resolve, reject });
      socket.send(JSON.stringify(envelope));
    });
  }

  onDelta(fn: (ev: EventEnvelope & { payload: StateDeltaPayload }) => void): void {
    this.deltaListeners.push(fn as (ev: EventEnvelope) => void);
  }

  onTick(fn: (ev: EventEnvelope & { payload: TransportTickPayload }) => void): void {
    this.tickListeners.push(fn as (ev: EventEnvelope) => void);
  }

  onClose(fn: (code: number, reason: string) => void): void {
    this.closeListeners.push(fn);
  }

  private dispatch(raw: string): void {
    const event = parseEvent(raw);
    switch (event.kind) {
      case "ack":
      case "recording-ingest-ack": {
        const waiter = this.pending.get(event.seq);
        if (waiter !== undefined) {
          this.pending.delete(event.seq);
          waiter.resolve(event.payload);
        }
        return;
      }
      case "error": {
        const waiter = this.pending.get(event.seq);
        if (waiter !== undefined) {
          this.pending.delete(event.seq);
          const code = String(event.payload.code ?? "Unknown");
          const message = String(event.payload.message ?? "");
          waiter.reject(new ServiceError(code, message));
        }
        return;
      }
      case "state-delta":
        for (const fn of this.deltaListeners) fn(event);
        return;
      case "transport-tick":
        for (const fn of this.tickListeners) fn(event);
        return;
    }
  }
}
