import init, { nested_mzi, divided_limit, qubit_weak_value } from "./pkg/weakval_web.js";

const POINTS = 25;

function read(section) {
  const out = {};
  for (const input of section.querySelectorAll("input")) {
    out[input.name] = Number(input.value);
  }
  return out;
}

// Plots each series against log10(g); the dashed line marks a reference value.
function plot(canvas, series, reference) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, width, height);
  const xs = series.flatMap((s) => s.points.map((p) => Math.log10(p[0])));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  if (reference !== undefined) ys.push(reference);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (width - 2 * pad);
  const py = (y) => height - pad - ((y - y0) / (y1 - y0)) * (height - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, width - 2 * pad, height - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  ctx.fillText(`log10 g: ${x0.toFixed(1)} .. ${x1.toFixed(1)}`, pad, height - 12);
  ctx.fillText(`${y1.toPrecision(4)}`, 2, pad);
  ctx.fillText(`${y0.toPrecision(4)}`, 2, height - pad);

  if (reference !== undefined) {
    ctx.setLineDash([4, 4]);
    ctx.strokeStyle = "#888";
    ctx.beginPath();
    ctx.moveTo(pad, py(reference));
    ctx.lineTo(width - pad, py(reference));
    ctx.stroke();
    ctx.setLineDash([]);
  }
  series.forEach((s, i) => {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.points.forEach(([g, y], k) => {
      const [x, yy] = [px(Math.log10(g)), py(y)];
      k === 0 ? ctx.moveTo(x, yy) : ctx.lineTo(x, yy);
    });
    ctx.stroke();
    ctx.fillStyle = s.color;
    ctx.fillText(s.name, width - pad - 160, pad + 16 * (i + 1));
  });
}

function wire(id, run) {
  const section = document.getElementById(id);
  const canvas = section.querySelector("canvas");
  const text = section.querySelector("pre");
  const go = () => {
    text.classList.remove("error");
    try {
      run(read(section), canvas, text);
    } catch (e) {
      text.classList.add("error");
      text.textContent = String(e);
    }
  };
  section.querySelector("button").addEventListener("click", go);
  go();
}

await init();

wire("mzi", (p, canvas, text) => {
  const r = JSON.parse(nested_mzi(p.outer_t, p.inner_phase, p.sigma, p.g_min, p.g_max, POINTS));
  plot(canvas, [
    { name: "|E| / g", color: "#c33", points: r.rows.map((row) => [row.g, row.slope]) },
    { name: "Re (Pi_B)_w pointer", color: "#36c", points: r.rows.filter((row) => row.pi_b).map((row) => [row.g, row.pi_b.re]) },
  ]);
  text.textContent =
    `|E| at g = 0: ${r.dark_at_zero.toExponential(2)}\n` +
    `limit of |E|/g: ${r.sweep.limit.re}\n` +
    `value at g = 0: ${JSON.stringify(r.sweep.endpoint)}, discontinuity: ${r.sweep.discontinuity_flag}\n` +
    `(Pi_B)_w: ${r.pi_b_analytic ? `${r.pi_b_analytic.re} ${r.pi_b_analytic.im >= 0 ? "+" : "-"} ${Math.abs(r.pi_b_analytic.im)}i` : "undefined"}`;
});

wire("limit", (p, canvas, text) => {
  const r = JSON.parse(divided_limit(p.a, p.b, p.g_min, p.g_max, POINTS));
  plot(canvas, [{ name: "f(x)/x", color: "#c33", points: r.rows.map((row) => [row.g, row.divided]) }], r.sweep.limit.re);
  text.textContent =
    `extrapolated limit: ${r.sweep.limit.re}\n` +
    `value at x = 0: ${JSON.stringify(r.sweep.endpoint)}, discontinuity: ${r.sweep.discontinuity_flag}`;
});

wire("qubit", (p, canvas, text) => {
  const r = JSON.parse(
    qubit_weak_value(p.pre_theta, p.pre_phi, p.post_theta, p.post_phi, p.nx, p.ny, p.nz, p.sigma, p.g_min, p.g_max, POINTS),
  );
  plot(canvas, [
    { name: "Re pointer estimate", color: "#c33", points: r.rows.map((row) => [row.g, row.value.re]) },
    { name: "Im pointer estimate", color: "#36c", points: r.rows.map((row) => [row.g, row.value.im]) },
  ], r.analytic.re);
  text.textContent =
    `analytic weak value: ${r.analytic.re} ${r.analytic.im >= 0 ? "+" : "-"} ${Math.abs(r.analytic.im)}i\n` +
    `<in|S|in> = ${r.expectation.re.toExponential(3)}, |S|in>| = ${r.s_in_norm.toFixed(6)}, derailed: ${r.derailed}`;
});
