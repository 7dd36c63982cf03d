// Turn the field schema plus the engine's config document into concrete
// control states. Values come straight from the document; this module never
// invents or caches one.

import { EngineConfig } from "./protocol.js";
import { CONFIG_FIELDS, FieldSchema, getPath } from "./schema.js";
import { PanelSession } from "./session.js";

export interface ControlState {
  schema: FieldSchema;
  value: unknown;        // engine truth at render time
  pending: boolean;      // a set is in flight for this field
  greyed: boolean;       // owning module is disabled
  error: string | null;  // last failure on this field, if any
}

export function buildControls(
  config: EngineConfig,
  session?: Pick<PanelSession, "pending" | "lastFailure">,
): ControlState[] {
  return CONFIG_FIELDS.map((schema) => {
    const greyed =
      schema.module !== undefined && config.modules[schema.module] === false;
    const failure = session?.lastFailure;
    return {
      schema,
      value: getPath(config, schema.path),
      pending: session?.pending.has(schema.path) ?? false,
      greyed,
      error:
        failure && failure.field === schema.path ? failure.message : null,
    };
  });
}

/** Client-side range check; anything passing here still faces the engine. */
export function valueInRange(schema: FieldSchema, value: unknown): boolean {
  switch (schema.kind) {
    case "toggle":
      return typeof value === "boolean";
    case "select":
      return typeof value === "string" && (schema.choices ?? []).includes(value);
    case "order": {
      const entries = schema.entries ?? [];
      return (
        Array.isArray(value) &&
        value.length === entries.length &&
        entries.every((e) => value.includes(e))
      );
    }
    case "int":
      if (typeof value !== "number" || !Number.isInteger(value)) return false;
      break;
    case "slider":
    case "number":
      if (value === null) return schema.nullable === true;
      if (typeof value !== "number" || !Number.isFinite(value)) return false;
      break;
    case "text":
      return typeof value === "string" && value.length > 0;
  }
  const v = value as number;
  if (schema.min !== undefined && v < schema.min) return false;
  if (schema.max !== undefined && v > schema.max) return false;
  return true;
}
