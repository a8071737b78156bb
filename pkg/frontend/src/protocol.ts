// Wire types for the gateway protocol (docs/protocol.md) plus the command
// validation the console applies before anything leaves the socket.

export const PROTOCOL_VERSION = 1;

export interface Vec {
  x: number;
  y: number;
}

export interface ObstacleDoc {
  center: Vec;
  radius: number;
}

// Scenario document as it arrives in a hello. Only the parts the console
// draws or reads are typed; the rest rides along untouched.
export interface ScenarioDoc {
  name: string;
  bounds: { xmin: number; ymin: number; xmax: number; ymax: number };
  obstacles: ObstacleDoc[];
  start_pose: { position: Vec; heading: number };
  target: Vec;
  destination: Vec;
  chair: { chair_radius: number; [key: string]: number };
  field: { arrive_radius: number; [key: string]: number };
  intent: { threshold: number; hysteresis: number; [key: string]: number };
  [key: string]: unknown;
}

export interface HelloMessage {
  type: "hello";
  version: number;
  decimation: number;
  strict_bci: boolean;
  profiles: string[];
  scenario: ScenarioDoc;
}

export interface SensorPoint extends Vec {
  sensor: number;
}

export interface StateMessage {
  type: "state";
  tick: number;
  time: number;
  status: "running" | "reached" | "collision" | "local_minimum" | "timeout";
  pose: { x: number; y: number; heading: number };
  odom: { x: number; y: number; heading: number };
  mode: "manual" | "autodrive";
  power: number;
  engaged: boolean;
  threshold: number;
  target: Vec;
  destination: Vec;
  forces: { attractive: Vec; repulsive: SensorPoint[]; net: Vec };
  ranges: number[];
  hits: SensorPoint[];
  dist_to_target: number;
  dist_target_dest: number;
  min_clearance: number;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export interface ProfilesMessage {
  type: "profiles";
  names: string[];
}

export type ServerMessage =
  | HelloMessage
  | StateMessage
  | ErrorMessage
  | ProfilesMessage;

export function parseServerMessage(raw: string): ServerMessage {
  const obj = JSON.parse(raw);
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new Error("server message must be a JSON object");
  }
  switch (obj.type) {
    case "hello":
      if (obj.version !== PROTOCOL_VERSION) {
        throw new Error(`unsupported protocol version ${obj.version}`);
      }
      need(obj, "scenario", "object");
      need(obj, "decimation", "number");
      need(obj, "profiles", "array");
      return obj as HelloMessage;
    case "state":
      for (const key of ["tick", "time", "power", "threshold"]) {
        need(obj, key, "number");
      }
      for (const key of ["pose", "odom", "target", "destination", "forces"]) {
        need(obj, key, "object");
      }
      need(obj, "ranges", "array");
      need(obj, "hits", "array");
      need(obj.forces, "repulsive", "array");
      return obj as StateMessage;
    case "error":
      need(obj, "message", "string");
      return obj as ErrorMessage;
    case "profiles":
      need(obj, "names", "array");
      return obj as ProfilesMessage;
    default:
      throw new Error(`unknown server message type ${JSON.stringify(obj.type)}`);
  }
}

function need(obj: any, key: string, kind: "number" | "string" | "object" | "array") {
  const val = obj[key];
  const ok =
    kind === "array"
      ? Array.isArray(val)
      : kind === "object"
        ? typeof val === "object" && val !== null && !Array.isArray(val)
        : typeof val === kind;
  if (!ok) throw new Error(`${obj.type}: ${key} should be ${kind}, got ${JSON.stringify(val)}`);
}

// -- commands -------------------------------------------------------------

export type Command =
  | { type: "set_mode"; mode: "manual" | "autodrive" }
  | { type: "joystick"; x: number; y: number }
  | { type: "intent_power"; power: number }
  | { type: "set_threshold"; value: number }
  | { type: "set_target"; x: number; y: number }
  | { type: "load_scenario"; name: string }
  | { type: "reset" }
  | { type: "profile_save"; name: string }
  | { type: "profile_load"; name: string };

const PROFILE_NAME = /^[A-Za-z0-9._-]+$/;

// Mirrors the server's parse-time rules so a bad value never even reaches
// the wire. Returns null when the command is acceptable.
export function validateCommand(obj: any): string | null {
  if (typeof obj !== "object" || obj === null) return "command must be an object";
  switch (obj.type) {
    case "set_mode":
      return obj.mode === "manual" || obj.mode === "autodrive"
        ? null
        : `mode: ${JSON.stringify(obj.mode)} is not manual or autodrive`;
    case "joystick":
      return inRange(obj.x, -1, 1, "x") ?? inRange(obj.y, -1, 1, "y");
    case "intent_power":
      return inRange(obj.power, 0, 1, "power");
    case "set_threshold": {
      const bad = inRange(obj.value, 0, 1, "value");
      if (bad) return bad;
      return obj.value > 0 ? null : "value: threshold must be positive";
    }
    case "set_target":
      return inRange(obj.x, -1e6, 1e6, "x") ?? inRange(obj.y, -1e6, 1e6, "y");
    case "load_scenario": {
      const hasName = obj.name !== undefined;
      const hasDoc = obj.scenario !== undefined;
      if (hasName === hasDoc) return "load_scenario needs exactly one of name, scenario";
      if (hasName && (typeof obj.name !== "string" || !obj.name)) {
        return "name: expected a non-empty string";
      }
      if (hasDoc && (typeof obj.scenario !== "object" || obj.scenario === null)) {
        return "scenario: expected an object";
      }
      return null;
    }
    case "reset":
      return null;
    case "profile_save":
    case "profile_load":
      if (typeof obj.name !== "string" || !obj.name) return "name: expected a non-empty string";
      return PROFILE_NAME.test(obj.name) ? null : "name: letters, digits, . _ - only";
    default:
      return `unknown command type ${JSON.stringify(obj.type)}`;
  }
}

function inRange(val: any, lo: number, hi: number, key: string): string | null {
  if (typeof val !== "number" || !isFinite(val)) return `${key}: expected a number`;
  return val >= lo && val <= hi ? null : `${key}: ${val} outside [${lo}, ${hi}]`;
}

const clamp = (v: number, lo: number, hi: number) => Math.min(Math.max(v, lo), hi);

// Builders clamp into legal ranges so UI geometry (pointer overshoot past a
// gauge edge, joystick drag outside the pad) can never produce a rejected
// command.
export const setMode = (mode: "manual" | "autodrive"): Command => ({ type: "set_mode", mode });
export const joystick = (x: number, y: number): Command => ({
  type: "joystick",
  x: clamp(x, -1, 1),
  y: clamp(y, -1, 1),
});
export const intentPower = (power: number): Command => ({
  type: "intent_power",
  power: clamp(power, 0, 1),
});
export const setThreshold = (value: number): Command => ({
  type: "set_threshold",
  value: clamp(value, 0.01, 1),
});
export const loadScenario = (name: string): Command => ({ type: "load_scenario", name });
export const reset = (): Command => ({ type: "reset" });
export const profileSave = (name: string): Command => ({ type: "profile_save", name });
export const profileLoad = (name: string): Command => ({ type: "profile_load", name });
