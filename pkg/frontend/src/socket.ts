// WebSocket client with request/response correlation and exponential
// reconnect backoff. The WebSocket constructor is injectable so tests can
// run under Node with the `ws` package.

import {
  Envelope,
  ErrorPayload,
  decodeEnvelope,
  encodeEnvelope,
  isError,
} from "./protocol.js";

export type ConnectionState = "connecting" | "open" | "reconnecting" | "closed";

interface WebSocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export class ServerError extends Error {
  constructor(public readonly payload: ErrorPayload) {
    super(`${payload.code}: ${payload.message}`);
  }
}

export interface ProtocolSocketOptions {
  factory?: WebSocketFactory;
  backoffBaseMs?: number;
  backoffMaxMs?: number;
  requestTimeoutMs?: number;
}

interface Pending {
  resolve: (env: Envelope) => void;
  reject: (err: Error) => void;
  timer: ReturnType<typeof setTimeout> | null;
}

export class ProtocolSocket {
  private ws: WebSocketLike | null = null;
  private pending = new Map<string, Pending>();
  private stateListeners = new Set<(s: ConnectionState) => void>();
  private closedByUser = false;
  private retries = 0;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  state: ConnectionState = "closed";

  constructor(
    private readonly url: string,
    private readonly opts: ProtocolSocketOptions = {},
  ) {}

  onStateChange(listener: (s: ConnectionState) => void): () => void {
    this.stateListeners.add(listener);
    return () => this.stateListeners.delete(listener);
  }

  private setState(state: ConnectionState) {
    this.state = state;
    for (const l of this.stateListeners) l(state);
  }

  private makeSocket(): WebSocketLike {
    const factory =
      this.opts.factory ??
      ((url: string) => new (globalThis as any).WebSocket(url) as WebSocketLike);
    return factory(this.url);
  }

  connect(): Promise<void> {
    this.closedByUser = false;
    return new Promise((resolve, reject) => {
      this.setState(this.retries > 0 ? "reconnecting" : "connecting");
      const ws = this.makeSocket();
      this.ws = ws;
      let settled = false;
      ws.onopen = () => {
        settled = true;
        this.retries = 0;
        this.setState("open");
        resolve();
      };
      ws.onmessage = (ev) => this.handleMessage(String(ev.data));
      ws.onclose = () => {
        this.ws = null;
        if (this.state !== "closed") this.handleDrop();
        if (!settled) reject(new Error("connection closed before opening"));
      };
      ws.onerror = () => {
        // onclose follows; nothing to do here
      };
    });
  }

  private handleDrop() {
    // reject in-flight requests; strokes and scene state live elsewhere
    for (const [, p] of this.pending) {
      if (p.timer) clearTimeout(p.timer);
      p.reject(new Error("connection lost"));
    }
    this.pending.clear();
    if (this.closedByUser) {
      this.setState("closed");
      return;
    }
    this.setState("reconnecting");
    const base = this.opts.backoffBaseMs ?? 500;
    const max = this.opts.backoffMaxMs ?? 15000;
    const delay = Math.min(max, base * 2 ** this.retries);
    this.retries += 1;
    this.reconnectTimer = setTimeout(() => {
      this.connect().catch(() => {
        /* next drop schedules another attempt */
      });
    }, delay);
  }

  private handleMessage(text: string) {
    let env: Envelope;
    try {
      env = decodeEnvelope(text);
    } catch {
      return; // nothing sane to correlate
    }
    const pending = this.pending.get(env.request_id);
    if (!pending) return;
    this.pending.delete(env.request_id);
    if (pending.timer) clearTimeout(pending.timer);
    if (isError(env)) {
      pending.reject(new ServerError(env.payload));
    } else {
      pending.resolve(env);
    }
  }

  /** Send an envelope and resolve with the reply carrying the same
   * request_id. At most one in-flight request per id. */
  request(env: Envelope): Promise<Envelope> {
    if (this.state !== "open" || !this.ws) {
      return Promise.reject(new Error("socket is not open"));
    }
    if (this.pending.has(env.request_id)) {
      return Promise.reject(new Error(`request ${env.request_id} already in flight`));
    }
    return new Promise((resolve, reject) => {
      const timeoutMs = this.opts.requestTimeoutMs ?? 30000;
      const timer = setTimeout(() => {
        this.pending.delete(env.request_id);
        reject(new Error(`request ${env.request_id} timed out`));
      }, timeoutMs);
      this.pending.set(env.request_id, { resolve, reject, timer });
      this.ws!.send(encodeEnvelope(env));
    });
  }

  pendingIds(): string[] {
    return [...this.pending.keys()];
  }

  close() {
    this.closedByUser = true;
    if (this.reconnectTimer) clearTimeout(this.reconnectTimer);
    this.ws?.close();
    this.ws = null;
    this.setState("closed");
  }
}
