import {
  intentPower,
  joystick,
  loadScenario,
  parseServerMessage,
  profileLoad,
  profileSave,
  reset,
  setMode,
  setThreshold,
  validateCommand,
  type Command,
  type ScenarioDoc,
  type StateMessage,
} from "./protocol.js";
import {
  buildGauge,
  buildTopView,
  joystickFromPointer,
  pushTrail,
  thresholdFromPointer,
  GREEN,
  GREY,
  RED,
  type DrawOp,
  type TrailPoint,
} from "./scene.js";

const INPUT_PUMP_MS = 50; // joystick / intent emission, 20 Hz
const STALE_MS = 1000;

// State
let socket: WebSocket | null = null;
let connected = false;
let scenario: ScenarioDoc | null = null;
let latest: StateMessage | null = null;
let lastStateWall = 0;
let trail: TrailPoint[] = [];

let intentHeld = false;
let stick = { x: 0, y: 0 };
let stickActive = false;
let draggingThreshold: number | null = null;
let lastThresholdSend = 0;

// DOM
const banner = document.getElementById("banner")!;
const readout = document.getElementById("readout")!;
const errorLine = document.getElementById("error-line")!;
const topCanvas = document.getElementById("topview") as HTMLCanvasElement;
const gaugeCanvas = document.getElementById("gauge") as HTMLCanvasElement;
const stickCanvas = document.getElementById("stick") as HTMLCanvasElement;
const holdButton = document.getElementById("hold") as HTMLButtonElement;
const manualButton = document.getElementById("mode-manual") as HTMLButtonElement;
const autoButton = document.getElementById("mode-auto") as HTMLButtonElement;
const profileName = document.getElementById("profile-name") as HTMLInputElement;
const profileList = document.getElementById("profile-list") as HTMLDataListElement;
const scenarioPick = document.getElementById("scenario-pick") as HTMLSelectElement;
const thresholdLabel = document.getElementById("threshold-label")!;

function send(command: Command) {
  const problem = validateCommand(command);
  if (problem) {
    showError(problem);
    return;
  }
  if (socket && socket.readyState === WebSocket.OPEN) {
    socket.send(JSON.stringify(command));
  }
}

function showError(message: string) {
  errorLine.textContent = message;
  errorLine.classList.add("visible");
}

function connect() {
  socket = new WebSocket(`ws://${location.host}/`);
  socket.onopen = () => {
    connected = true;
    errorLine.classList.remove("visible");
  };
  socket.onclose = () => {
    connected = false;
    socket = null;
    setTimeout(connect, 1000);
  };
  socket.onmessage = (event) => {
    let msg;
    try {
      msg = parseServerMessage(event.data);
    } catch (err) {
      showError(String(err));
      return;
    }
    if (msg.type === "hello") {
      scenario = msg.scenario;
      trail = [];
      latest = null;
      setProfiles(msg.profiles);
      syncScenarioPick(msg.scenario.name);
    } else if (msg.type === "state") {
      latest = msg;
      lastStateWall = performance.now();
      trail = pushTrail(trail, msg);
    } else if (msg.type === "profiles") {
      setProfiles(msg.names);
    } else {
      showError(msg.message);
    }
  };
}

function setProfiles(names: string[]) {
  profileList.innerHTML = "";
  for (const name of names) {
    const opt = document.createElement("option");
    opt.value = name;
    profileList.appendChild(opt);
  }
}

function syncScenarioPick(current: string) {
  const names = ["demo", "open", "slalom", "trap"];
  if (!names.includes(current)) names.unshift(current);
  scenarioPick.innerHTML = "";
  for (const name of names) {
    const opt = document.createElement("option");
    opt.value = opt.textContent = name;
    if (name === current) opt.selected = true;
    scenarioPick.appendChild(opt);
  }
}

// -- painting -----------------------------------------------------------------

function paintTopView() {
  const ctx = topCanvas.getContext("2d")!;
  ctx.clearRect(0, 0, topCanvas.width, topCanvas.height);
  if (!latest || !scenario) return;

  const b = scenario.bounds;
  const pad = 16;
  const sx = (topCanvas.width - 2 * pad) / (b.xmax - b.xmin);
  const sy = (topCanvas.height - 2 * pad) / (b.ymax - b.ymin);
  const s = Math.min(sx, sy);
  const px = (x: number) => pad + (x - b.xmin) * s;
  const py = (y: number) => topCanvas.height - pad - (y - b.ymin) * s;

  for (const op of buildTopView(latest, scenario, trail)) {
    drawOp(ctx, op, px, py, s);
  }
}

function drawOp(
  ctx: CanvasRenderingContext2D,
  op: DrawOp,
  px: (x: number) => number,
  py: (y: number) => number,
  s: number,
) {
  switch (op.kind) {
    case "rect":
      ctx.strokeStyle = op.stroke;
      ctx.lineWidth = op.width;
      ctx.strokeRect(px(op.x), py(op.y + op.h), op.w * s, op.h * s);
      break;
    case "circle":
      ctx.beginPath();
      ctx.arc(px(op.x), py(op.y), op.r * s, 0, 2 * Math.PI);
      if (op.fill) {
        ctx.fillStyle = op.fill;
        ctx.fill();
      }
      if (op.stroke) {
        ctx.strokeStyle = op.stroke;
        ctx.lineWidth = op.width;
        ctx.stroke();
      }
      break;
    case "poly":
      ctx.beginPath();
      op.points.forEach(([x, y], i) => (i ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y))));
      ctx.closePath();
      if (op.fill) {
        ctx.fillStyle = op.fill;
        ctx.fill();
      }
      if (op.stroke) {
        ctx.strokeStyle = op.stroke;
        ctx.lineWidth = op.width;
        ctx.stroke();
      }
      break;
    case "polyline":
      ctx.beginPath();
      op.points.forEach(([x, y], i) => (i ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y))));
      ctx.strokeStyle = op.stroke;
      ctx.lineWidth = op.width;
      ctx.stroke();
      break;
    case "arrow": {
      const x0 = px(op.x0), y0 = py(op.y0), x1 = px(op.x1), y1 = py(op.y1);
      const angle = Math.atan2(y1 - y0, x1 - x0);
      const head = 9;
      ctx.strokeStyle = op.stroke;
      ctx.lineWidth = op.width;
      ctx.beginPath();
      ctx.moveTo(x0, y0);
      ctx.lineTo(x1, y1);
      ctx.moveTo(x1, y1);
      ctx.lineTo(x1 - head * Math.cos(angle - 0.45), y1 - head * Math.sin(angle - 0.45));
      ctx.moveTo(x1, y1);
      ctx.lineTo(x1 - head * Math.cos(angle + 0.45), y1 - head * Math.sin(angle + 0.45));
      ctx.stroke();
      break;
    }
  }
}

function paintGauge() {
  const ctx = gaugeCanvas.getContext("2d")!;
  const w = gaugeCanvas.width, h = gaugeCanvas.height;
  ctx.clearRect(0, 0, w, h);
  if (!latest) return;
  const scene = buildGauge(latest);

  ctx.fillStyle = "rgba(255,255,255,0.06)";
  ctx.fillRect(0, 0, w, h);
  ctx.fillStyle = scene.fillColor;
  ctx.fillRect(0, h * (1 - scene.fill), w, h * scene.fill);

  // Threshold line; while dragging, preview the grabbed value instead of
  // waiting for the server echo.
  const level = draggingThreshold ?? scene.threshold;
  const y = h * (1 - level);
  ctx.strokeStyle = RED;
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.moveTo(0, y);
  ctx.lineTo(w, y);
  ctx.stroke();

  thresholdLabel.textContent = `threshold ${level.toFixed(2)}`;
}

function paintStick() {
  const ctx = stickCanvas.getContext("2d")!;
  const w = stickCanvas.width, h = stickCanvas.height;
  const cx = w / 2, cy = h / 2, r = Math.min(w, h) / 2 - 6;
  ctx.clearRect(0, 0, w, h);
  const disabled = latest?.mode === "autodrive";
  ctx.globalAlpha = disabled ? 0.35 : 1;
  ctx.strokeStyle = GREY;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.fillStyle = stickActive ? GREEN : GREY;
  ctx.beginPath();
  ctx.arc(cx + stick.x * r, cy - stick.y * r, 12, 0, 2 * Math.PI);
  ctx.fill();
  ctx.globalAlpha = 1;
}

function paintBanner() {
  const stale = performance.now() - lastStateWall > STALE_MS;
  if (!connected) {
    banner.textContent = "DISCONNECTED";
    banner.className = "banner bad";
  } else if (!latest || stale) {
    banner.textContent = latest ? "STALE (no state for >1 s)" : "WAITING FOR STATE";
    banner.className = "banner bad";
  } else {
    banner.textContent = `LIVE | ${latest.mode.toUpperCase()} | ${latest.status}`;
    banner.className = latest.status === "running" || latest.status === "reached"
      ? "banner ok"
      : "banner warn";
  }

  if (latest) {
    readout.textContent =
      `t=${latest.time.toFixed(1)}s  power=${latest.power.toFixed(2)}` +
      `  clearance=${latest.min_clearance.toFixed(2)}m` +
      `  target->dest=${latest.dist_target_dest.toFixed(2)}m`;
    manualButton.classList.toggle("active", latest.mode === "manual");
    autoButton.classList.toggle("active", latest.mode === "autodrive");
    holdButton.classList.toggle("engaged", latest.engaged);
  }
}

function frame() {
  paintTopView();
  paintGauge();
  paintStick();
  paintBanner();
  requestAnimationFrame(frame);
}

// -- inputs -------------------------------------------------------------------

// Joystick and intent emission run on one timer: >=10 Hz while active,
// and the release paths below send their zero exactly once.
setInterval(() => {
  if (intentHeld) send(intentPower(1.0));
  if (stickActive && latest?.mode !== "autodrive") send(joystick(stick.x, stick.y));
}, INPUT_PUMP_MS);

function wireStick() {
  stickCanvas.addEventListener("pointerdown", (ev) => {
    if (latest?.mode === "autodrive") return;
    stickCanvas.setPointerCapture(ev.pointerId);
    stickActive = true;
    moveStick(ev);
  });
  stickCanvas.addEventListener("pointermove", (ev) => {
    if (stickActive) moveStick(ev);
  });
  const release = () => {
    if (!stickActive) return;
    stickActive = false;
    stick = { x: 0, y: 0 };
    send(joystick(0, 0));
  };
  stickCanvas.addEventListener("pointerup", release);
  stickCanvas.addEventListener("pointercancel", release);
}

function moveStick(ev: PointerEvent) {
  const rect = stickCanvas.getBoundingClientRect();
  stick = joystickFromPointer(
    rect.left + rect.width / 2,
    rect.top + rect.height / 2,
    Math.min(rect.width, rect.height) / 2,
    ev.clientX,
    ev.clientY,
  );
}

function wireGauge() {
  gaugeCanvas.addEventListener("pointerdown", (ev) => {
    gaugeCanvas.setPointerCapture(ev.pointerId);
    dragThreshold(ev, true);
  });
  gaugeCanvas.addEventListener("pointermove", (ev) => {
    if (draggingThreshold !== null) dragThreshold(ev, false);
  });
  const release = () => {
    if (draggingThreshold === null) return;
    send(setThreshold(draggingThreshold));
    draggingThreshold = null;
  };
  gaugeCanvas.addEventListener("pointerup", release);
  gaugeCanvas.addEventListener("pointercancel", release);
}

function dragThreshold(ev: PointerEvent, first: boolean) {
  const rect = gaugeCanvas.getBoundingClientRect();
  draggingThreshold = thresholdFromPointer(rect.top, rect.height, ev.clientY);
  const now = performance.now();
  if (first || now - lastThresholdSend > 100) {
    lastThresholdSend = now;
    send(setThreshold(draggingThreshold));
  }
}

function wireIntent() {
  const down = () => {
    if (!intentHeld) {
      intentHeld = true;
      send(intentPower(1.0));
    }
  };
  const up = () => {
    if (intentHeld) {
      intentHeld = false;
      send(intentPower(0.0));
    }
  };
  holdButton.addEventListener("pointerdown", down);
  holdButton.addEventListener("pointerup", up);
  holdButton.addEventListener("pointercancel", up);
  document.addEventListener("keydown", (ev) => {
    if (ev.code === "Space" && !ev.repeat && document.activeElement?.tagName !== "INPUT") {
      ev.preventDefault();
      down();
    }
  });
  document.addEventListener("keyup", (ev) => {
    if (ev.code === "Space") up();
  });
}

function wireButtons() {
  manualButton.addEventListener("click", () => send(setMode("manual")));
  autoButton.addEventListener("click", () => send(setMode("autodrive")));
  document.getElementById("profile-save")!.addEventListener("click", () => {
    if (profileName.value) send(profileSave(profileName.value));
  });
  document.getElementById("profile-load")!.addEventListener("click", () => {
    if (profileName.value) send(profileLoad(profileName.value));
  });
  document.getElementById("scenario-load")!.addEventListener("click", () => {
    send(loadScenario(scenarioPick.value));
  });
  document.getElementById("session-reset")!.addEventListener("click", () => send(reset()));
}

wireStick();
wireGauge();
wireIntent();
wireButtons();
connect();
requestAnimationFrame(frame);
