// Spawn a real frame source piped into a real engine and expose its control
// port. Tests exercise the panel against the live protocol, not a mock.

import { spawn, ChildProcess } from "node:child_process";

export interface Pipeline {
  port: number;
  child: ChildProcess;
  stop(): void;
}

export interface PipelineOptions {
  seed?: number;
  fps?: number;
  frames?: number;
  profile?: string;
}

export async function startPipeline(opts: PipelineOptions = {}): Promise<Pipeline> {
  const seed = opts.seed ?? 7;
  const fps = opts.fps ?? 50;
  const frames = opts.frames ?? 100000;
  const profileArg = opts.profile ? ` --profile ${opts.profile}` : "";
  const cmd =
    `provider stream --frames ${frames} --fps ${fps} --pace --seed ${seed}` +
    ` | engine run --control-port 0 --sink null${profileArg}`;

  const child = spawn("sh", ["-c", cmd], {
    detached: true,                       // own process group, killable as one
    stdio: ["ignore", "ignore", "pipe"],
  });

  const port = await new Promise<number>((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(
      () => reject(new Error(`no control port announced; stderr: ${buffer}`)),
      15000,
    );
    timer.unref();
    child.stderr!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const m = buffer.match(/control listening on 127\.0\.0\.1:(\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve(Number(m[1]));
      }
    });
    child.once("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`pipeline exited early (${code}); stderr: ${buffer}`));
    });
  });

  return {
    port,
    child,
    stop: () => {
      try {
        process.kill(-child.pid!, "SIGKILL");  // whole process group
      } catch {
        // already gone
      }
    },
  };
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Tiny deterministic PRNG for fuzzing (mulberry32). */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
