import init, { attack_curve, walk, security, builtin_devices } from "./pkg/qhe_wasm_demo.js";

const SVG = "http://www.w3.org/2000/svg";
const W = 640, H = 260, PAD = { l: 44, r: 10, t: 12, b: 52 };

function el(name, attrs = {}, text) {
  const node = document.createElementNS(SVG, name);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function axes(svg, yMax) {
  svg.replaceChildren();
  const y = (v) => H - PAD.b - (v / yMax) * (H - PAD.t - PAD.b);
  for (let i = 0; i <= 4; i++) {
    const v = (yMax * i) / 4;
    svg.append(el("line", { x1: PAD.l, x2: W - PAD.r, y1: y(v), y2: y(v), stroke: "#e3e7eb" }));
    svg.append(el("text", { x: PAD.l - 4, y: y(v) + 3, "text-anchor": "end" }, v.toFixed(2)));
  }
  return y;
}

function bars(svg, labels, series, classes) {
  const yMax = Math.max(1e-9, ...series.flat()) * 1.1;
  const y = axes(svg, yMax);
  const slot = (W - PAD.l - PAD.r) / labels.length;
  const bw = (slot * 0.8) / series.length;
  labels.forEach((label, i) => {
    const x0 = PAD.l + i * slot + slot * 0.1;
    series.forEach((values, s) => {
      svg.append(el("rect", { x: x0 + s * bw, y: y(values[i]), width: Math.max(bw - 1, 1), height: y(0) - y(values[i]), class: classes[s] }));
    });
    const tx = x0 + slot * 0.4;
    svg.append(el("text", { x: tx, y: H - PAD.b + 12, transform: `rotate(45 ${tx} ${H - PAD.b + 12})` }, label));
  });
}

function show(id, text, error = false) {
  const node = document.getElementById(id);
  node.textContent = text;
  node.classList.toggle("error", error);
}

function guarded(summaryId, fn) {
  return (event) => {
    event?.preventDefault();
    try {
      fn();
    } catch (err) {
      show(summaryId, String(err.message ?? err), true);
    }
  };
}

function runWalk() {
  const f = new FormData(document.getElementById("walk-form"));
  const r = JSON.parse(walk(f.get("device"), f.get("plaintext"), f.get("key"), Number(f.get("shots")), Number(f.get("seed"))));
  const rows = r.outcomes.filter((o) => o.p_exact > 1e-12 || o.count > 0);
  bars(document.getElementById("walk-chart"), rows.map((o) => o.logical ?? o.outcome),
    [rows.map((o) => o.p_exact), rows.map((o) => o.count / r.shots)], ["bar-exact", "bar-sample"]);
  show("walk-summary", `key ${r.key.alpha.toFixed(3)}, ${r.key.beta.toFixed(3)}, ${r.key.gamma.toFixed(3)} · ` +
    `fidelity ${r.fidelity.toFixed(5)} · collisions ${r.collisions}/${r.shots}` +
    (r.projection_distance > 0 ? ` · re-unitarized (moved ${r.projection_distance.toFixed(4)})` : ""));
}

function runAttack() {
  const f = new FormData(document.getElementById("attack-form"));
  const r = JSON.parse(attack_curve(Number(f.get("m")), Number(f.get("dmax"))));
  const svg = document.getElementById("attack-chart");
  const y = axes(svg, 1);
  const n = r.points.length;
  const x = (d) => PAD.l + ((d - 1) / Math.max(n - 1, 1)) * (W - PAD.l - PAD.r);
  svg.append(el("line", { x1: PAD.l, x2: W - PAD.r, y1: y(r.p_limit), y2: y(r.p_limit), class: "ref" }));
  svg.append(el("polyline", { points: r.points.map((p) => `${x(p.d)},${y(p.p)}`).join(" "), class: "line" }));
  for (const p of r.points) {
    if (n <= 32 || p.d % Math.ceil(n / 16) === 0) svg.append(el("text", { x: x(p.d), y: H - PAD.b + 14, "text-anchor": "middle" }, p.d));
  }
  show("attack-summary", `d→∞ limit ${r.p_limit.toFixed(6)} (dashed) · 1/√(πm) = ${r.p_asymptote.toFixed(6)}`);
}

function runSecurity() {
  const f = new FormData(document.getElementById("security-form"));
  const r = JSON.parse(security(Number(f.get("m")), f.get("ensemble")));
  bars(document.getElementById("security-chart"), r.sector_weights.map((_, k) => `k=${k}`), [r.sector_weights], ["bar-exact"]);
  const nonzero = r.eigenvalues.filter((l) => l > 1e-9).map((l) => l.toFixed(4));
  show("security-summary", `χ = ${r.holevo_bits.toFixed(5)} bits (limit ${r.poincare_limit_bits.toFixed(5)}) · ` +
    `hidden ${r.hidden_bits.toFixed(5)} · spectrum [${nonzero.join(", ")}] · ` +
    `trace distances ${r.trace_distances.map((d) => d.toFixed(4)).join(" / ")}`);
}

await init();
const select = document.querySelector("#walk-form select");
for (const name of JSON.parse(builtin_devices())) select.append(new Option(name, name));
for (const [form, summary, fn] of [["walk-form", "walk-summary", runWalk], ["attack-form", "attack-summary", runAttack], ["security-form", "security-summary", runSecurity]]) {
  const handler = guarded(summary, fn);
  document.getElementById(form).addEventListener("submit", handler);
  handler();
}
