// Panel session state.
//
// The session holds no config truth of its own: every displayed value comes
// from an engine message (a get/set ack or a telemetry snapshot). An edit is
// "pending" from the moment its set message goes out until the ack or error
// arrives; the displayed value never changes before the ack.

import {
  Ack,
  Channel,
  connect,
  EngineConfig,
  ErrorReply,
  InboundMessage,
  Telemetry,
} from "./protocol.js";

export type ConnectionState = "connecting" | "connected" | "disconnected";

export interface PendingEdit {
  field: string;
  value: unknown;
  sentAt: number;
}

export interface EditFailure {
  field: string;
  error: string;
  message: string;
}

export interface EditResult {
  ok: boolean;
  effectiveFrame?: number;
  failure?: EditFailure;
}

interface Waiter {
  kind: "get" | "set" | "profile" | "record";
  field?: string;
  resolve: (msg: Ack | ErrorReply) => void;
}

const EDIT_TIMEOUT_MS = 5000;

export class PanelSession {
  state: ConnectionState = "connecting";
  config: EngineConfig | null = null;
  profile: string | null = null;
  lastTelemetry: Telemetry | null = null;
  pending: Map<string, PendingEdit> = new Map();
  lastFailure: EditFailure | null = null;
  recording: string | null = null;

  private channel: Channel | null = null;
  private waiters: Waiter[] = [];
  private editChain: Promise<unknown> = Promise.resolve();
  private listeners: (() => void)[] = [];

  static async open(host: string, port: number): Promise<PanelSession> {
    const session = new PanelSession();
    await session.attach(await connect(host, port));
    await session.refresh();
    return session;
  }

  /** Wire an existing channel (tests inject fakes here). */
  async attach(channel: Channel): Promise<void> {
    this.channel = channel;
    this.state = "connected";
    channel.onMessage((msg) => this.handle(msg));
    channel.onClose(() => {
      this.state = "disconnected";
      this.pending.clear();
      this.notify();
    });
    this.notify();
  }

  onChange(cb: () => void): void {
    this.listeners.push(cb);
  }

  private notify(): void {
    for (const cb of this.listeners) cb();
  }

  private handle(msg: InboundMessage): void {
    if (msg.type === "telemetry") {
      this.lastTelemetry = msg;
      this.config = msg.config;   // engine truth rides on every frame
      this.notify();
      return;
    }
    const waiter = this.takeWaiterFor(msg);
    if (waiter) waiter.resolve(msg);
    this.notify();
  }

  private takeWaiterFor(msg: Ack | ErrorReply): Waiter | undefined {
    const index = this.waiters.findIndex((w) => {
      if (w.kind === "set") return "field" in msg && msg.field === w.field;
      if (w.kind === "get") return msg.type === "ack" && msg.config !== undefined;
      if (w.kind === "profile") {
        return ("profile" in msg && !("config" in msg)) || msg.type === "error";
      }
      return true;
    });
    if (index < 0) return undefined;
    return this.waiters.splice(index, 1)[0];
  }

  private request(kind: Waiter["kind"], field?: string): Promise<Ack | ErrorReply> {
    return new Promise((resolve, reject) => {
      const waiter: Waiter = { kind, field, resolve };
      this.waiters.push(waiter);
      setTimeout(() => {
        const at = this.waiters.indexOf(waiter);
        if (at >= 0) {
          this.waiters.splice(at, 1);
          reject(new Error(`${kind} timed out`));
        }
      }, EDIT_TIMEOUT_MS).unref?.();
    });
  }

  /** Fetch the full config document; resolves with engine truth. */
  async refresh(): Promise<EngineConfig> {
    if (!this.channel || this.state !== "connected") {
      throw new Error("not connected");
    }
    const reply = this.request("get");
    this.channel.send({ type: "get" });
    const msg = await reply;
    if (msg.type !== "ack" || !msg.config) throw new Error("get failed");
    this.config = msg.config;
    this.profile = msg.profile ?? this.profile;
    this.notify();
    return msg.config;
  }

  /**
   * Send one config edit. Serialized with other edits; the displayed value
   * stays the engine's until the ack lands. On error nothing was applied,
   * so there is nothing to revert; the failure is surfaced instead.
   */
  applyEdit(field: string, value: unknown): Promise<EditResult> {
    const run = async (): Promise<EditResult> => {
      if (!this.channel || this.state !== "connected") {
        return { ok: false, failure: { field, error: "Disconnected", message: "not connected" } };
      }
      this.pending.set(field, { field, value, sentAt: Date.now() });
      this.notify();
      const reply = this.request("set", field);
      this.channel.send({ type: "set", field, value });
      let msg: Ack | ErrorReply;
      try {
        msg = await reply;
      } catch {
        this.pending.delete(field);
        this.lastFailure = { field, error: "Timeout", message: "no reply from engine" };
        this.notify();
        return { ok: false, failure: this.lastFailure };
      }
      this.pending.delete(field);
      if (msg.type === "ack") {
        if (this.config) setPathInPlace(this.config, field, msg.value);
        this.notify();
        return { ok: true, effectiveFrame: msg.effective_frame };
      }
      this.lastFailure = {
        field,
        error: msg.error,
        message: msg.message ?? msg.error,
      };
      this.notify();
      return { ok: false, effectiveFrame: msg.effective_frame, failure: this.lastFailure };
    };
    const result = this.editChain.then(run, run);
    this.editChain = result.catch(() => {});
    return result;
  }

  async switchProfile(name: string): Promise<EditResult> {
    if (!this.channel || this.state !== "connected") {
      return { ok: false, failure: { field: "profile", error: "Disconnected", message: "not connected" } };
    }
    const reply = this.request("profile");
    this.channel.send({ type: "profile", name });
    const msg = await reply;
    if (msg.type === "ack") {
      this.profile = msg.profile ?? name;
      await this.refresh();   // profile switch rewrites the config document
      return { ok: true, effectiveFrame: msg.effective_frame };
    }
    this.lastFailure = { field: "profile", error: msg.error, message: msg.message ?? msg.error };
    this.notify();
    return { ok: false, failure: this.lastFailure };
  }

  async recordTemplate(action: "start" | "stop", name?: string, mode?: string): Promise<EditResult> {
    if (!this.channel || this.state !== "connected") {
      return { ok: false, failure: { field: "record", error: "Disconnected", message: "not connected" } };
    }
    const reply = this.request("record");
    if (action === "start") {
      this.channel.send({ type: "record", action, name: name ?? "template", mode });
    } else {
      this.channel.send({ type: "record", action });
    }
    const msg = await reply;
    if (msg.type === "ack") {
      this.recording = action === "start" ? (name ?? "template") : null;
      this.notify();
      return { ok: true, effectiveFrame: msg.effective_frame };
    }
    this.lastFailure = { field: "record", error: msg.error, message: msg.message ?? msg.error };
    this.notify();
    return { ok: false, failure: this.lastFailure };
  }

  close(): void {
    this.channel?.close();
  }
}

function setPathInPlace(doc: EngineConfig, path: string, value: unknown): void {
  const parts = path.split(".");
  let node: any = doc;
  for (const part of parts.slice(0, -1)) {
    if (node == null || typeof node !== "object") return;
    node = node[part];
  }
  if (node != null && typeof node === "object") {
    node[parts[parts.length - 1]] = value;
  }
}
