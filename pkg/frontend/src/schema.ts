// Form schema for every engine config field.
//
// This table mirrors the engine's field registry one to one: the coverage
// test walks a live `get` response and fails if either side has a field the
// other lacks. min/max on sliders are UI ranges; the engine revalidates and
// its verdict wins.

export type ControlKind =
  | "toggle"       // boolean
  | "slider"       // bounded float
  | "int"          // integer spinner
  | "number"       // unbounded or nullable number
  | "select"       // one of fixed choices
  | "order"        // reorderable list of fixed entries
  | "text";        // free string (profile names / paths)

export type ModuleName = "hand" | "head" | "gaze" | "exercise";

export interface FieldSchema {
  path: string;
  kind: ControlKind;
  module?: ModuleName;   // greyed out while this module is disabled
  min?: number;
  max?: number;
  step?: number;
  choices?: string[];
  entries?: string[];    // for "order"
  nullable?: boolean;
}

const slider = (
  path: string, min: number, max: number, step = 0.01,
  module?: ModuleName,
): FieldSchema => ({ path, kind: "slider", min, max, step, module });

export const CONFIG_FIELDS: FieldSchema[] = [
  { path: "modules.hand", kind: "toggle" },
  { path: "modules.head", kind: "toggle" },
  { path: "modules.gaze", kind: "toggle" },
  { path: "modules.exercise", kind: "toggle" },
  { path: "mode", kind: "select", choices: ["sitting", "standing"] },
  { path: "profile", kind: "text" },
  slider("max_range_mm", 100, 10000, 50),
  { path: "cursor_priority", kind: "order", entries: ["hand", "gaze", "head"] },

  { path: "screen.width_px", kind: "int", min: 1 },
  { path: "screen.height_px", kind: "int", min: 1 },
  slider("screen.width_mm", 100, 2000, 1),
  slider("screen.height_mm", 100, 2000, 1),
  { path: "screen.camera_offset_x_mm", kind: "number" },
  { path: "screen.camera_offset_y_mm", kind: "number" },

  { path: "camera.f_px", kind: "number", nullable: true },
  { path: "camera.cx", kind: "number", nullable: true },
  { path: "camera.cy", kind: "number", nullable: true },

  { path: "hand.cursor_hand", kind: "select", choices: ["left", "right"], module: "hand" },
  slider("hand.pinch_on", 0, 2, 0.01, "hand"),
  slider("hand.pinch_off", 0, 2, 0.01, "hand"),
  slider("hand.idle_hold_ms", 0, 5000, 10, "hand"),
  slider("hand.c_scale", 1, 10, 0.1, "hand"),
  slider("hand.angle_extended_deg", 0, 180, 1, "hand"),
  slider("hand.angle_bent_deg", 0, 180, 1, "hand"),
  slider("hand.scroll_gain", 0, 50, 0.5, "hand"),
  slider("hand.fc_min", 0.01, 10, 0.01, "hand"),
  slider("hand.beta", 0, 5, 0.01, "hand"),
  slider("hand.d_cutoff", 0.01, 10, 0.01, "hand"),

  slider("head.ear_on", 0, 1, 0.01, "head"),
  slider("head.ear_off", 0, 1, 0.01, "head"),
  slider("head.mar_on", 0, 2, 0.01, "head"),
  slider("head.mar_off", 0, 2, 0.01, "head"),
  { path: "head.blink_frames", kind: "int", min: 1, module: "head" },
  { path: "head.wink_frames", kind: "int", min: 1, module: "head" },
  slider("head.profile_enter_deg", 0, 90, 1, "head"),
  slider("head.profile_exit_deg", 0, 90, 1, "head"),
  slider("head.profile_hold_ms", 0, 2000, 10, "head"),
  { path: "head.mode", kind: "select",
    choices: ["cursor", "scroll", "triggers-only"], module: "head" },
  slider("head.cursor_gain", 0, 100, 0.5, "head"),
  slider("head.deadzone_deg", 0, 30, 0.5, "head"),
  slider("head.scroll_threshold_deg", 0, 45, 0.5, "head"),
  slider("head.scroll_rate", 0, 30, 0.5, "head"),

  slider("gaze.iris_gain_deg", 0, 60, 0.5, "gaze"),
  slider("gaze.default_depth_mm", 100, 3000, 10, "gaze"),
  slider("gaze.iris_mm", 8, 14, 0.1, "gaze"),
  { path: "gaze.palm_k", kind: "number", nullable: true, module: "gaze" },
  slider("gaze.fc_min", 0.01, 10, 0.01, "gaze"),
  slider("gaze.beta", 0, 5, 0.01, "gaze"),
  slider("gaze.d_cutoff", 0.01, 10, 0.01, "gaze"),

  slider("exercise.squat_enter_deg", 0, 180, 1, "exercise"),
  slider("exercise.squat_exit_deg", 0, 180, 1, "exercise"),
  slider("exercise.jump_rise_frac", 0.01, 1, 0.01, "exercise"),
  slider("exercise.punch_low", 0, 1, 0.01, "exercise"),
  slider("exercise.punch_high", 0, 1, 0.01, "exercise"),
  slider("exercise.punch_within_ms", 0, 2000, 10, "exercise"),
  slider("exercise.kick_rise_frac", 0.01, 1, 0.01, "exercise"),
  slider("exercise.cycle_band_deg", 0.1, 45, 0.1, "exercise"),
  slider("exercise.template_on", 0, 1, 0.01, "exercise"),
  slider("exercise.template_off", 0, 1, 0.01, "exercise"),
];

/** Dotted-path lookup into a config document. */
export function getPath(doc: unknown, path: string): unknown {
  let node: any = doc;
  for (const part of path.split(".")) {
    if (node == null || typeof node !== "object") return undefined;
    node = node[part];
  }
  return node;
}

/** All dotted leaf paths of a config document (arrays count as leaves). */
export function leafPaths(doc: unknown, prefix = ""): string[] {
  if (doc === null || typeof doc !== "object" || Array.isArray(doc)) {
    return prefix ? [prefix] : [];
  }
  const out: string[] = [];
  for (const key of Object.keys(doc as object)) {
    out.push(...leafPaths((doc as any)[key], prefix ? `${prefix}.${key}` : key));
  }
  return out;
}
