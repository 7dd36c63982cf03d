#!/usr/bin/env node
// Terminal control panel for a running engine.
//
//   panel --port 43210 [--host 127.0.0.1]
//
// Draws the dashboard whenever telemetry or session state changes, and
// accepts line commands on stdin:
//
//   get                      refetch the config document
//   set <field> <json>       edit one config field (e.g. set hand.pinch_on 0.3)
//   profile <name>           switch binding profile
//   record start <name> [hold|rep] / record stop
//   fields                   list every editable field with its current value
//   quit

import * as readline from "node:readline";
import { PanelSession } from "./session.js";
import { dashboardLines, EventTally, renderDashboard } from "./view.js";
import { CONFIG_FIELDS, getPath } from "./schema.js";

function parseArgs(argv: string[]): { host: string; port: number } {
  let host = "127.0.0.1";
  let port = NaN;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--host") host = argv[++i];
    else if (argv[i] === "--port") port = Number(argv[++i]);
  }
  if (!Number.isInteger(port) || port <= 0) {
    console.error("usage: panel --port PORT [--host HOST]");
    process.exit(2);
  }
  return { host, port };
}

async function main(): Promise<void> {
  const { host, port } = parseArgs(process.argv.slice(2));
  const session = await PanelSession.open(host, port);
  const tally = new EventTally();

  let dirty = true;
  session.onChange(() => {
    if (session.lastTelemetry) tally.fold(session.lastTelemetry);
    dirty = true;
  });

  const redraw = setInterval(() => {
    if (!dirty) return;
    dirty = false;
    const dash = renderDashboard(session, tally);
    process.stdout.write(dashboardLines(dash).join("\n") + "\n---\n");
  }, 250);

  const rl = readline.createInterface({ input: process.stdin });
  for await (const raw of rl) {
    const line = raw.trim();
    if (!line) continue;
    const [cmd, ...rest] = line.split(/\s+/);
    try {
      if (cmd === "quit" || cmd === "exit") break;
      if (cmd === "get") {
        await session.refresh();
      } else if (cmd === "set" && rest.length >= 2) {
        const field = rest[0];
        const value = JSON.parse(rest.slice(1).join(" "));
        const result = await session.applyEdit(field, value);
        console.log(result.ok
          ? `ok: ${field} takes effect at frame ${result.effectiveFrame}`
          : `rejected: ${result.failure?.message}`);
      } else if (cmd === "profile" && rest.length === 1) {
        const result = await session.switchProfile(rest[0]);
        console.log(result.ok ? `profile: ${session.profile}`
                              : `rejected: ${result.failure?.message}`);
      } else if (cmd === "record" && rest[0] === "start" && rest[1]) {
        const result = await session.recordTemplate("start", rest[1], rest[2]);
        console.log(result.ok ? `recording ${rest[1]}`
                              : `rejected: ${result.failure?.message}`);
      } else if (cmd === "record" && rest[0] === "stop") {
        const result = await session.recordTemplate("stop");
        console.log(result.ok ? "recording stopped"
                              : `rejected: ${result.failure?.message}`);
      } else if (cmd === "fields") {
        for (const f of CONFIG_FIELDS) {
          const value = session.config ? getPath(session.config, f.path) : undefined;
          console.log(`  ${f.path} = ${JSON.stringify(value)} (${f.kind})`);
        }
      } else {
        console.log("commands: get | set <field> <json> | profile <name> | " +
                    "record start <name> [hold|rep] | record stop | fields | quit");
      }
    } catch (err) {
      console.log(`error: ${err instanceof Error ? err.message : err}`);
    }
  }

  clearInterval(redraw);
  session.close();
}

main().catch((err) => {
  console.error(err instanceof Error ? err.message : String(err));
  process.exit(1);
});
