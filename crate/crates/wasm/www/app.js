import init, { randomPoints, solve, bruteForce, nodeScores } from "./pkg/fstsp_wasm.js";

const SIDE = 100;
const EXACT_LIMIT = 8;
const canvas = document.getElementById("map");
const ctx = canvas.getContext("2d");
const status = document.getElementById("status");
const $ = (id) => document.getElementById(id);

let points = null;
let route = null;
let labels = null;

const scale = (v) => 20 + (v / SIDE) * (canvas.width - 40);
const unscale = (px) => ((px - 20) / (canvas.width - 40)) * SIDE;

function draw() {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!points) return;
  const at = (i) => [scale(points.x[i]), scale(points.y[i])];

  if (route) {
    const stops = route.stops;
    const truck = stops.filter((s) => s.kind !== "D").map((s) => s.node);
    ctx.strokeStyle = "#1f5fbf";
    ctx.lineWidth = 2;
    ctx.setLineDash([]);
    ctx.beginPath();
    truck.concat([0]).forEach((node, k) => {
      const [x, y] = at(node);
      k === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.stroke();

    ctx.strokeStyle = "#d0521b";
    ctx.setLineDash([6, 4]);
    let launch = 0;
    stops.forEach((s, k) => {
      if (s.kind === "C") launch = s.node;
      if (s.kind !== "D") return;
      let land = 0;
      for (let j = k + 1; j < stops.length; j++) {
        if (stops[j].kind === "C") { land = stops[j].node; break; }
      }
      ctx.beginPath();
      ctx.moveTo(...at(launch));
      ctx.lineTo(...at(s.node));
      ctx.lineTo(...at(land));
      ctx.stroke();
    });
    ctx.setLineDash([]);
  }

  const kinds = new Map((route ? route.stops : []).map((s) => [s.node, s.kind]));
  ctx.font = "11px system-ui";
  for (let i = 0; i < points.x.length; i++) {
    const [x, y] = at(i);
    ctx.fillStyle = i === 0 ? "#111" : kinds.get(i) === "D" ? "#d0521b" : "#1f5fbf";
    if (i === 0) ctx.fillRect(x - 6, y - 6, 12, 12);
    else { ctx.beginPath(); ctx.arc(x, y, 4, 0, 2 * Math.PI); ctx.fill(); }
    if (labels && labels[i] !== undefined) {
      ctx.fillStyle = "#333";
      ctx.fillText(labels[i], x + 6, y - 6);
    }
  }
}

function run(label, fn) {
  try {
    const t0 = performance.now();
    const msg = fn();
    status.textContent = `${label}: ${msg} (${((performance.now() - t0) / 1000).toFixed(2)} s)`;
  } catch (e) {
    status.textContent = `${label} failed: ${e.message ?? e}`;
  }
  $("exact").disabled = !points || points.x.length > EXACT_LIMIT;
  draw();
}

function showRoute(json) {
  route = JSON.parse(json);
  labels = null;
  const saved = 100 * (1 - route.makespan / route.tsp_length);
  return `makespan ${route.makespan.toFixed(2)}, truck-only tour ${route.tsp_length.toFixed(2)} (${saved.toFixed(1)}% saved)`;
}

await init();

$("random").onclick = () => run("points", () => {
  points = JSON.parse(randomPoints(Number($("n").value), SIDE, Number($("seed").value)));
  route = null;
  labels = null;
  return `${points.x.length} points`;
});
$("solve").onclick = () => run("GA", () =>
  showRoute(solve(JSON.stringify(points), Number($("gens").value), Number($("seed").value))));
$("exact").onclick = () => run("exact", () => showRoute(bruteForce(JSON.stringify(points))));
$("scores").onclick = () => run("scores", () => {
  const r = JSON.parse(nodeScores(JSON.stringify(points)));
  labels = {};
  r.tour.forEach((s, k) => { if (k > 0) labels[s.node] = r.scores[k].toFixed(1); });
  route = null;
  return "score per customer along the seed tour";
});
canvas.onclick = (ev) => {
  if (!points) return;
  const box = canvas.getBoundingClientRect();
  points.x.push(Math.min(SIDE, Math.max(0, unscale(ev.clientX - box.left))));
  points.y.push(Math.min(SIDE, Math.max(0, unscale(ev.clientY - box.top))));
  route = null;
  labels = null;
  $("n").value = points.x.length;
  run("points", () => `${points.x.length} points`);
};

$("random").click();
