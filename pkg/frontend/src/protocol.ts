// Control protocol wire types and newline-delimited JSON framing.
//
// The engine serves this protocol on a local TCP port. Every message is one
// JSON object per line; the panel is a plain client.

import * as net from "node:net";

export interface EngineConfig {
  modules: { hand: boolean; head: boolean; gaze: boolean; exercise: boolean };
  mode: string;
  max_range_mm: number;
  profile: string;
  cursor_priority: string[];
  screen: Record<string, number>;
  camera: Record<string, number | null>;
  hand: Record<string, number | string>;
  head: Record<string, number | string>;
  gaze: Record<string, number | null>;
  exercise: Record<string, number>;
  [key: string]: unknown;
}

export interface Telemetry {
  type: "telemetry";
  frame: number;
  epoch: number;
  t_ms: number;
  depth_mm: number | null;
  depth_source: string | null;
  gated: boolean;
  config: EngineConfig;
  ear_l: number | null;
  ear_r: number | null;
  mar: number | null;
  head_pose: { yaw: number; pitch: number; roll: number } | null;
  pinch: number | null;
  daoi: { cx: number; cy: number; width: number; height: number } | null;
  active_labels: string[];
  events: CommandEvent[];
}

export interface CommandEvent {
  t: number;
  cmd: string;
  key?: string;
  x?: number;
  y?: number;
  delta?: number;
}

export interface Ack {
  type: "ack";
  ok: true;
  field?: string;
  value?: unknown;
  config?: EngineConfig;
  profile?: string;
  epoch?: number;
  frame?: number;
  effective_frame?: number;
  template?: unknown;
}

export interface ErrorReply {
  type: "error";
  ok: false;
  error: string;
  message?: string;
  field?: string;
  effective_frame?: number;
}

export type InboundMessage = Telemetry | Ack | ErrorReply;

export type OutboundMessage =
  | { type: "get" }
  | { type: "set"; field: string; value: unknown }
  | { type: "profile"; name: string }
  | { type: "record"; action: "start"; name: string; mode?: string }
  | { type: "record"; action: "stop" };

/** Split a byte stream on newlines and JSON-parse each complete line. */
export class LineDecoder {
  private buffer = "";

  push(chunk: string | Buffer): InboundMessage[] {
    this.buffer += chunk.toString();
    const out: InboundMessage[] = [];
    for (;;) {
      const nl = this.buffer.indexOf("\n");
      if (nl < 0) break;
      const line = this.buffer.slice(0, nl).trim();
      this.buffer = this.buffer.slice(nl + 1);
      if (!line) continue;
      out.push(JSON.parse(line) as InboundMessage);
    }
    return out;
  }
}

export function encode(msg: OutboundMessage): string {
  return JSON.stringify(msg) + "\n";
}

export interface Channel {
  send(msg: OutboundMessage): void;
  onMessage(cb: (msg: InboundMessage) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export function connect(host: string, port: number): Promise<Channel> {
  return new Promise((resolve, reject) => {
    const socket = net.connect({ host, port });
    const decoder = new LineDecoder();
    let messageCb: (msg: InboundMessage) => void = () => {};
    let closeCb: () => void = () => {};

    socket.once("error", reject);
    socket.once("connect", () => {
      socket.on("data", (chunk) => {
        for (const msg of decoder.push(chunk)) messageCb(msg);
      });
      socket.on("close", () => closeCb());
      socket.on("error", () => {}); // close follows; surfaced there
      resolve({
        send: (msg) => socket.write(encode(msg)),
        onMessage: (cb) => { messageCb = cb; },
        onClose: (cb) => { closeCb = cb; },
        close: () => socket.destroy(),
      });
    });
  });
}
