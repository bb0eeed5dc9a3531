import init, { WalkExplorer, roc, kde, kdeGrid, silvermanBandwidth } from "./pkg/hetlink_web.js";

const $ = (id) => document.getElementById(id);

function guard(errId, fn) {
  return () => {
    $(errId).textContent = "";
    try {
      fn();
    } catch (e) {
      $(errId).textContent = e.message ?? String(e);
    }
  };
}

function numbers(text) {
  return text.split(/[\s,;]+/).filter((t) => t.length > 0).map(Number);
}

function plot(canvas, xs, ys, { xRange, yRange, diagonal = false }) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 24;
  const [x0, x1] = xRange, [y0, y1] = yRange;
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad - ((y - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "10px sans-serif";
  ctx.fillText(String(x0), pad, h - 8);
  ctx.fillText(String(x1), w - pad - 10, h - 8);
  ctx.fillText(y1.toPrecision(3), 2, pad + 4);
  if (diagonal) {
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(px(0), py(0));
    ctx.lineTo(px(1), py(1));
    ctx.stroke();
    ctx.setLineDash([]);
  }
  ctx.strokeStyle = "#258";
  ctx.lineWidth = 2;
  ctx.beginPath();
  xs.forEach((x, i) => (i === 0 ? ctx.moveTo(px(x), py(ys[i])) : ctx.lineTo(px(x), py(ys[i]))));
  ctx.stroke();
  ctx.lineWidth = 1;
}

// walk explorer

let explorer = null;
let walk = [];

function metapath() {
  return $("w-metapath").value;
}

function nodeText(v) {
  return `${explorer.nodeLabel(v)}: ${explorer.nodeName(v)}`;
}

function buildGraph() {
  explorer?.free();
  explorer = new WalkExplorer(+$("w-trials").value, +$("w-aes").value, +$("w-seed").value);
  $("w-info").textContent = `${explorer.nodeCount} nodes, ${explorer.edgeCount} edges`;
  fillStarts();
}

function fillStarts() {
  const sel = $("w-start");
  sel.innerHTML = "";
  for (const v of explorer.anchors(metapath())) {
    const o = document.createElement("option");
    o.value = v;
    o.textContent = nodeText(v);
    sel.appendChild(o);
  }
  restart();
}

function restart() {
  walk = $("w-start").value === "" ? [] : [+$("w-start").value];
  render();
}

function render() {
  $("walk").innerHTML = walk.map((v) => `<span>${nodeText(v)}</span>`).join(" &rarr; ");
  const table = $("w-table");
  table.innerHTML = "";
  if (walk.length === 0) return;
  const dist = explorer.transitions(metapath(), Uint32Array.from(walk), +$("w-p").value, +$("w-q").value);
  if (dist.length === 0) {
    table.innerHTML = "<tr><td>no conforming neighbour: the walk ends here</td></tr>";
    return;
  }
  table.innerHTML = "<tr><th>next node</th><th>probability</th><th></th></tr>";
  for (const d of dist) {
    const tr = document.createElement("tr");
    tr.className = "pick";
    const back = walk.length > 1 && d.node === walk[walk.length - 2] ? " (return)" : "";
    tr.innerHTML = `<td>${d.label}: ${d.name}${back}</td><td>${d.prob.toFixed(4)}</td>` +
      `<td><div class="bar" style="width:${Math.round(d.prob * 200)}px"></div></td>`;
    tr.onclick = guard("w-err", () => {
      walk.push(d.node);
      render();
    });
    table.appendChild(tr);
  }
}

function sampleSteps() {
  if (walk.length === 0) return;
  const seed = Math.floor(Math.random() * 2 ** 31);
  const w = explorer.sampleWalk(metapath(), walk[0], walk.length + 10, +$("w-p").value, +$("w-q").value, seed);
  walk = Array.from(w);
  render();
}

// ROC

function runRoc() {
  const scores = [], labels = [];
  for (const line of $("r-input").value.split("\n")) {
    const t = line.trim();
    if (t === "") continue;
    const [s, y] = t.split(/[\s,;]+/);
    if (y !== "0" && y !== "1") throw new Error(`bad label in line "${t}"`);
    scores.push(Number(s));
    labels.push(Number(y));
  }
  const curve = roc(Float64Array.from(scores), Uint8Array.from(labels));
  $("r-auc").textContent = `AUC = ${curve.auc.toFixed(4)}`;
  plot($("r-canvas"), curve.fpr(), curve.tpr(), { xRange: [0, 1], yRange: [0, 1], diagonal: true });
  curve.free();
}

// KDE

function runKde() {
  const samples = Float64Array.from(numbers($("k-input").value));
  if (samples.some(Number.isNaN)) throw new Error("could not parse every sample as a number");
  const bwText = $("k-bw").value.trim();
  const bw = bwText === "" ? undefined : Number(bwText);
  const grid = kdeGrid(+$("k-lo").value, +$("k-hi").value, 201);
  const density = kde(samples, bw, grid);
  const used = bw ?? silvermanBandwidth(samples);
  $("k-info").textContent = `bandwidth ${used.toFixed(4)}`;
  plot($("k-canvas"), grid, density, { xRange: [grid[0], grid[grid.length - 1]], yRange: [0, Math.max(...density)] });
}

await init();
const sel = $("w-metapath");
for (const m of WalkExplorer.defaultMetapaths()) {
  const o = document.createElement("option");
  o.value = m;
  o.textContent = m;
  sel.appendChild(o);
}
$("w-build").onclick = guard("w-err", buildGraph);
sel.onchange = guard("w-err", fillStarts);
$("w-start").onchange = guard("w-err", restart);
$("w-reset").onclick = guard("w-err", restart);
$("w-sample").onclick = guard("w-err", sampleSteps);
$("w-p").onchange = guard("w-err", render);
$("w-q").onchange = guard("w-err", render);
$("r-run").onclick = guard("r-err", runRoc);
$("k-run").onclick = guard("k-err", runKde);
guard("w-err", buildGraph)();
guard("r-err", runRoc)();
guard("k-err", runKde)();
