// Pure dashboard view model.
//
// renderDashboard reduces the session to plain display data; rendering
// backends (the bundled terminal renderer, or any web frontend) draw from
// this and nothing else. A disconnected session yields a reconnect view:
// stale telemetry is never presented as live.

import { CommandEvent, Telemetry } from "./protocol.js";
import { buildControls, ControlState } from "./controls.js";
import { PanelSession } from "./session.js";

export interface StripValues {
  earL: number | null;
  earR: number | null;
  mar: number | null;
  pinch: number | null;
  yaw: number | null;
  pitch: number | null;
  depthMm: number | null;
  gated: boolean;
}

export interface DaoiOverlay {
  // normalized corners, ready to scale onto any sketch surface
  left: number;
  top: number;
  right: number;
  bottom: number;
}

export interface Dashboard {
  live: boolean;
  reconnect: boolean;           // render the reconnect view instead
  profile: string | null;
  recording: string | null;
  frame: number | null;
  epoch: number | null;
  strips: StripValues | null;
  daoi: DaoiOverlay | null;     // null when the hand module is off or idle
  events: CommandEvent[];       // most recent last, at most 20
  activeLabels: string[];
  repCounts: Record<string, number>;  // session tally from the event feed
  controls: ControlState[];
}

/** Count rep-style key taps per key seen in telemetry feeds so far. */
export class EventTally {
  private seen = new Set<string>();
  counts: Record<string, number> = {};

  fold(telemetry: Telemetry): void {
    for (const ev of telemetry.events) {
      const id = `${ev.t}:${ev.cmd}:${ev.key ?? ""}:${ev.x ?? ""}:${ev.y ?? ""}`;
      if (this.seen.has(id) || ev.cmd !== "key_down") continue;
      this.seen.add(id);
      const key = ev.key ?? "?";
      this.counts[key] = (this.counts[key] ?? 0) + 1;
    }
  }
}

export function renderDashboard(
  session: PanelSession,
  tally?: EventTally,
): Dashboard {
  const connected = session.state === "connected";
  const telemetry = connected ? session.lastTelemetry : null;

  let strips: StripValues | null = null;
  let daoi: DaoiOverlay | null = null;
  if (telemetry) {
    strips = {
      earL: telemetry.ear_l,
      earR: telemetry.ear_r,
      mar: telemetry.mar,
      pinch: telemetry.pinch,
      yaw: telemetry.head_pose?.yaw ?? null,
      pitch: telemetry.head_pose?.pitch ?? null,
      depthMm: telemetry.depth_mm,
      gated: telemetry.gated,
    };
    if (telemetry.daoi && telemetry.config.modules.hand) {
      const d = telemetry.daoi;
      daoi = {
        left: d.cx - d.width / 2,
        top: d.cy - d.height / 2,
        right: d.cx + d.width / 2,
        bottom: d.cy + d.height / 2,
      };
    }
  }

  return {
    live: connected && telemetry !== null,
    reconnect: session.state === "disconnected",
    profile: session.profile,
    recording: session.recording,
    frame: telemetry?.frame ?? null,
    epoch: telemetry?.epoch ?? null,
    strips,
    daoi,
    events: telemetry ? telemetry.events.slice(-20) : [],
    activeLabels: telemetry?.active_labels ?? [],
    repCounts: tally?.counts ?? {},
    controls: session.config ? buildControls(session.config, session) : [],
  };
}

const fmt = (v: number | null, digits = 2) =>
  v === null ? "  -  " : v.toFixed(digits).padStart(5);

/** Terminal rendering of the dashboard, one string per line. */
export function dashboardLines(dash: Dashboard): string[] {
  if (dash.reconnect) {
    return ["[disconnected] engine gone; waiting to reconnect"];
  }
  const lines: string[] = [];
  lines.push(
    `frame ${dash.frame ?? "-"}  epoch ${dash.epoch ?? "-"}  ` +
    `profile ${dash.profile ?? "-"}` +
    (dash.recording ? `  REC ${dash.recording}` : ""),
  );
  if (dash.strips) {
    const s = dash.strips;
    lines.push(
      `ear L ${fmt(s.earL)} R ${fmt(s.earR)}  mar ${fmt(s.mar)}  ` +
      `pinch ${fmt(s.pinch)}  yaw ${fmt(s.yaw, 1)}  pitch ${fmt(s.pitch, 1)}  ` +
      `depth ${s.depthMm === null ? "-" : Math.round(s.depthMm) + "mm"}` +
      (s.gated ? "  [out of range]" : ""),
    );
  }
  if (dash.daoi) {
    const d = dash.daoi;
    lines.push(
      `daoi (${d.left.toFixed(3)}, ${d.top.toFixed(3)}) .. ` +
      `(${d.right.toFixed(3)}, ${d.bottom.toFixed(3)})`,
    );
  }
  if (dash.activeLabels.length) {
    lines.push(`active: ${dash.activeLabels.join(", ")}`);
  }
  const reps = Object.entries(dash.repCounts);
  if (reps.length) {
    lines.push(`taps: ${reps.map(([k, n]) => `${k}=${n}`).join("  ")}`);
  }
  for (const ev of dash.events.slice(-5)) {
    lines.push(
      `  ${String(ev.t).padStart(8)}  ${ev.cmd}` +
      (ev.key ? ` ${ev.key}` : "") +
      (ev.x !== undefined ? ` (${ev.x}, ${ev.y})` : "") +
      (ev.delta !== undefined ? ` ${ev.delta}` : ""),
    );
  }
  return lines;
}
