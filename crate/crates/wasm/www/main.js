import init, { reconstruct, rmseSweep, qutritOptics } from "./pkg/spectra_wasm.js";

const $ = (id) => document.getElementById(id);

function stateRecipe() {
  const kind = document.querySelector("input[name=kind]:checked").value;
  const seed = Number($("seed").value) >>> 0;
  if (kind === "diagonal") {
    const entries = $("entries").value.split(",").map((s) => Number(s.trim()));
    return JSON.stringify({ kind, entries });
  }
  return JSON.stringify({ kind, dim: Number($("dim").value), seed });
}

function guarded(out, fn) {
  out.classList.remove("error");
  try {
    fn();
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e.message ?? e);
  }
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
}

function scale(lo, hi, a, b) {
  return (v) => a + ((v - lo) / (hi - lo)) * (b - a);
}

function evalPoly(c, x) {
  return c.reduceRight((acc, ci) => acc * x + ci, 0);
}

function drawPoly(r) {
  const cv = $("poly");
  const ctx = cv.getContext("2d");
  const pad = 30;
  axes(ctx, cv.width, cv.height, pad);
  const xs = Array.from({ length: 400 }, (_, i) => -0.05 + (1.1 * i) / 399);
  const ys = xs.map((x) => evalPoly(r.char_poly, x));
  const ymax = Math.max(...ys.map(Math.abs), 1e-6);
  const sx = scale(-0.05, 1.05, pad, cv.width - pad);
  const sy = scale(-ymax, ymax, cv.height - pad, pad);
  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.moveTo(sx(-0.05), sy(0));
  ctx.lineTo(sx(1.05), sy(0));
  ctx.stroke();
  ctx.strokeStyle = "#1f77b4";
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
  const mark = (x, color, dy) => {
    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(sx(x), sy(0) + dy, 4, 0, 2 * Math.PI);
    ctx.fill();
  };
  r.oracle.forEach((l) => mark(l, "#2ca02c", -8));
  r.spectrum.forEach((l) => mark(l, "#d62728", 8));
  ctx.fillStyle = "#333";
  ctx.fillText("reconstructed det(x - rho); green: true eigenvalues, red: estimate", pad + 5, pad - 10);
}

function drawRmse(r) {
  const cv = $("rmse");
  const ctx = cv.getContext("2d");
  const pad = 40;
  axes(ctx, cv.width, cv.height, pad);
  const lx = r.shots.map(Math.log10);
  const ly = r.rmse.map(Math.log10);
  const sx = scale(Math.min(...lx) - 0.2, Math.max(...lx) + 0.2, pad, cv.width - pad);
  const sy = scale(Math.min(...ly) - 0.3, Math.max(...ly) + 0.3, cv.height - pad, pad);
  ctx.fillStyle = "#d62728";
  lx.forEach((x, i) => {
    ctx.beginPath();
    ctx.arc(sx(x), sy(ly[i]), 4, 0, 2 * Math.PI);
    ctx.fill();
  });
  ctx.strokeStyle = "#999";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(sx(lx[0]), sy(ly[0]));
  ctx.lineTo(sx(lx[lx.length - 1]), sy(ly[0] - 0.5 * (lx[lx.length - 1] - lx[0])));
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.fillStyle = "#333";
  ctx.fillText("log10 RMSE vs log10 N; dashed: slope -1/2", pad + 5, pad - 15);
}

function drawEvents(r) {
  const cv = $("events");
  const ctx = cv.getContext("2d");
  const pad = 30;
  axes(ctx, cv.width, cv.height, pad);
  const labels = ["bunching (Q1)", "anti-bunching (Q2)", "other (Q3)"];
  const bw = (cv.width - 2 * pad) / 7;
  const sy = scale(0, 1, cv.height - pad, pad);
  labels.forEach((label, k) => {
    const x0 = pad + bw * (2 * k + 0.5);
    ctx.fillStyle = "#1f77b4";
    ctx.fillRect(x0, sy(r.fock[k]), bw * 0.45, sy(0) - sy(r.fock[k]));
    ctx.fillStyle = "#ff7f0e";
    ctx.fillRect(x0 + bw * 0.5, sy(r.operator[k]), bw * 0.45, sy(0) - sy(r.operator[k]));
    ctx.fillStyle = "#333";
    ctx.fillText(label, x0, cv.height - pad + 14);
  });
  ctx.fillText("blue: nine-mode Fock simulation, orange: tr(Q_k rho^3)", pad + 5, pad - 10);
}

const fmt = (v) => v.map((x) => x.toFixed(6)).join(", ");

await init();

$("run-reconstruct").onclick = () =>
  guarded($("reconstruct-out"), () => {
    const r = JSON.parse(reconstruct(stateRecipe(), Number($("shots").value), Number($("seed").value) >>> 0));
    drawPoly(r);
    $("reconstruct-out").textContent =
      `true      ${fmt(r.oracle)}\nestimate  ${fmt(r.spectrum)}\n` +
      `exact p   ${fmt(r.exact_p)}\nmeasured  ${fmt(r.measured_p)}\n` +
      `max |Im root| ${r.max_imag.toExponential(2)}, simplex correction ${r.projection_distance.toExponential(2)}`;
  });

$("run-sweep").onclick = () =>
  guarded($("sweep-out"), () => {
    const grid = Uint32Array.from($("grid").value.split(",").map((s) => Number(s.trim())));
    const r = JSON.parse(rmseSweep(stateRecipe(), grid, Number($("trials").value), Number($("seed").value) >>> 0));
    drawRmse(r);
    const slope = r.slope === null ? "undefined" : r.slope.toFixed(3);
    $("sweep-out").textContent =
      r.shots.map((n, i) => `N = ${n}: RMSE ${r.rmse[i].toExponential(3)}`).join("\n") +
      `\nfitted slope ${slope}${r.degenerate ? " (nearly degenerate spectrum)" : ""}`;
  });

$("run-qutrit").onclick = () =>
  guarded($("qutrit-out"), () => {
    const r = JSON.parse(qutritOptics(stateRecipe()));
    drawEvents(r);
    $("qutrit-out").textContent =
      r.m_prime.map((p, k) => `m'_${k + 1}(x) = ${p}`).join("\n") +
      `\nFock      ${fmt(r.fock)}\noperator  ${fmt(r.operator)}`;
  });
