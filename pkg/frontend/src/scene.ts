// Pure scene construction: latest state snapshot in, draw list out.
// Nothing here touches the DOM or the socket, so replaying a recorded
// stream through these builders is deterministic and snapshot-testable.

import type { ScenarioDoc, StateMessage, Vec } from "./protocol.js";

// Color legend: obstacle entities red, target entities green. Same hexes
// the backend's SVG charts use so recordings and the live view agree.
export const RED = "#c0392b";
export const GREEN = "#1e8449";
export const BLUE = "#2457a0";
export const GREY = "#8a93a0";
export const AMBER = "#d68910";

export type DrawOp =
  | { kind: "rect"; x: number; y: number; w: number; h: number; stroke: string; width: number }
  | { kind: "circle"; x: number; y: number; r: number; fill: string | null; stroke: string | null; width: number }
  | { kind: "poly"; points: [number, number][]; fill: string | null; stroke: string | null; width: number }
  | { kind: "polyline"; points: [number, number][]; stroke: string; width: number }
  | { kind: "arrow"; x0: number; y0: number; x1: number; y1: number; stroke: string; width: number };

export interface TrailPoint {
  time: number;
  x: number;
  y: number;
}

export const TRAIL_SECONDS = 60;
const FORCE_DRAW_SCALE = 0.6; // meters of arrow per unit force
const FORCE_DRAW_CAP = 2.5; // longest arrow we ever draw, meters

// Appends the latest pose and drops anything older than the trail window.
// Returns a new array; a hello (sim clock restart) is handled by the time
// going backwards, which empties the window.
export function pushTrail(trail: TrailPoint[], state: StateMessage): TrailPoint[] {
  const kept = trail.filter(
    (p) => p.time <= state.time && p.time >= state.time - TRAIL_SECONDS,
  );
  kept.push({ time: state.time, x: state.pose.x, y: state.pose.y });
  return kept;
}

export function buildTopView(
  state: StateMessage,
  scenario: ScenarioDoc,
  trail: TrailPoint[],
): DrawOp[] {
  const ops: DrawOp[] = [];
  const b = scenario.bounds;
  ops.push({
    kind: "rect",
    x: b.xmin,
    y: b.ymin,
    w: b.xmax - b.xmin,
    h: b.ymax - b.ymin,
    stroke: GREY,
    width: 2,
  });

  for (const obs of scenario.obstacles) {
    ops.push({
      kind: "circle",
      x: obs.center.x,
      y: obs.center.y,
      r: obs.radius,
      fill: RED,
      stroke: null,
      width: 0,
    });
  }

  // Destination ring at the arrive radius, then the live target dot.
  ops.push({
    kind: "circle",
    x: state.destination.x,
    y: state.destination.y,
    r: scenario.field.arrive_radius,
    fill: null,
    stroke: GREEN,
    width: 2,
  });
  ops.push({
    kind: "circle",
    x: state.target.x,
    y: state.target.y,
    r: 0.12,
    fill: GREEN,
    stroke: null,
    width: 0,
  });

  if (trail.length > 1) {
    ops.push({
      kind: "polyline",
      points: trail.map((p) => [p.x, p.y]),
      stroke: BLUE,
      width: 1.5,
    });
  }

  ops.push(...chairPolygon(state.pose, scenario.chair.chair_radius));

  for (const hit of state.hits) {
    ops.push({ kind: "circle", x: hit.x, y: hit.y, r: 0.06, fill: RED, stroke: null, width: 0 });
  }

  const arrow = forceArrow(state.pose, state.forces.net);
  if (arrow) ops.push(arrow);

  return ops;
}

// Oriented pentagon the size of the chair disc, nose toward the heading,
// plus a tick from center to nose so the heading reads at a glance.
function chairPolygon(pose: { x: number; y: number; heading: number }, radius: number): DrawOp[] {
  const noseAngles = [0, 2.1, 2.9, -2.9, -2.1];
  const points: [number, number][] = noseAngles.map((a) => [
    pose.x + radius * Math.cos(pose.heading + a),
    pose.y + radius * Math.sin(pose.heading + a),
  ]);
  return [
    { kind: "poly", points, fill: "rgba(36, 87, 160, 0.25)", stroke: BLUE, width: 2 },
    {
      kind: "polyline",
      points: [
        [pose.x, pose.y],
        [pose.x + radius * Math.cos(pose.heading), pose.y + radius * Math.sin(pose.heading)],
      ],
      stroke: BLUE,
      width: 2,
    },
  ];
}

function forceArrow(pose: { x: number; y: number }, net: Vec): DrawOp | null {
  const mag = Math.hypot(net.x, net.y);
  if (mag < 1e-6) return null;
  const len = Math.min(mag * FORCE_DRAW_SCALE, FORCE_DRAW_CAP);
  return {
    kind: "arrow",
    x0: pose.x,
    y0: pose.y,
    x1: pose.x + (net.x / mag) * len,
    y1: pose.y + (net.y / mag) * len,
    stroke: AMBER,
    width: 2,
  };
}

// -- power gauge ------------------------------------------------------------

// Gauge geometry in unit coordinates: y = 0 is the bottom (power 0),
// y = 1 the top. The painter stretches it to pixels.
export interface GaugeScene {
  fill: number; // smoothed power, 0..1
  fillColor: string;
  threshold: number; // 0..1
  engaged: boolean;
}

export function buildGauge(state: StateMessage): GaugeScene {
  return {
    fill: Math.min(Math.max(state.power, 0), 1),
    fillColor: state.engaged ? GREEN : GREY,
    threshold: state.threshold,
    engaged: state.engaged,
  };
}

// Pointer y inside the gauge box -> threshold value, top = 1.
export function thresholdFromPointer(boxTop: number, boxHeight: number, pointerY: number): number {
  const frac = 1 - (pointerY - boxTop) / boxHeight;
  return Math.round(Math.min(Math.max(frac, 0.01), 1) * 100) / 100;
}

// -- virtual joystick --------------------------------------------------------

// Pointer offset from the pad center -> command axes. Up is +y (forward),
// right is +x; displacement beyond the pad radius saturates.
export function joystickFromPointer(
  centerX: number,
  centerY: number,
  padRadius: number,
  pointerX: number,
  pointerY: number,
): { x: number; y: number } {
  const clamp = (v: number) => Math.min(Math.max(v, -1), 1);
  return {
    x: clamp((pointerX - centerX) / padRadius),
    y: clamp((centerY - pointerY) / padRadius),
  };
}
