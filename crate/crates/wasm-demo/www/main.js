import init, { cdf_curves, zeta_sweep, user_layout, geometry } from "./pkg/twotier_wasm.js";

const PAD = { l: 44, r: 12, t: 24, b: 32 };
const BLUE = "#1f77b4";
const RED = "#d62728";

function num(id) {
  return Number(document.getElementById(id).value);
}

function axes(ctx, w, h, title, logX, xr, yr) {
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, w, h);
  ctx.strokeStyle = "#000";
  ctx.strokeRect(PAD.l, PAD.t, w - PAD.l - PAD.r, h - PAD.t - PAD.b);
  ctx.fillStyle = "#000";
  ctx.font = "12px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(title, w / 2, 15);
  const sx = (x) => {
    const v = logX ? Math.log10(x) : x;
    return PAD.l + ((v - xr[0]) / (xr[1] - xr[0])) * (w - PAD.l - PAD.r);
  };
  const sy = (y) => PAD.t + (1 - (y - yr[0]) / (yr[1] - yr[0])) * (h - PAD.t - PAD.b);
  for (let i = 0; i <= 4; i++) {
    const y = yr[0] + (i / 4) * (yr[1] - yr[0]);
    ctx.textAlign = "right";
    ctx.fillText(y.toFixed(2), PAD.l - 4, sy(y) + 4);
  }
  if (logX) {
    for (let e = Math.ceil(xr[0]); e <= Math.floor(xr[1]); e++) {
      ctx.textAlign = "center";
      ctx.fillText("1e" + e, sx(10 ** e), h - PAD.b + 14);
    }
  } else {
    for (let i = 0; i <= 4; i++) {
      const x = xr[0] + (i / 4) * (xr[1] - xr[0]);
      ctx.textAlign = "center";
      ctx.fillText(x.toFixed(2), sx(x), h - PAD.b + 14);
    }
  }
  return { sx, sy };
}

function line(ctx, sx, sy, xs, ys, color, dashed) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.6;
  ctx.setLineDash(dashed ? [5, 4] : []);
  ctx.beginPath();
  let started = false;
  xs.forEach((x, i) => {
    if (!Number.isFinite(ys[i])) return;
    if (started) ctx.lineTo(sx(x), sy(ys[i]));
    else ctx.moveTo(sx(x), sy(ys[i]));
    started = true;
  });
  ctx.stroke();
  ctx.setLineDash([]);
}

function legend(ctx, items, x, y) {
  ctx.font = "11px sans-serif";
  ctx.textAlign = "left";
  items.forEach(([name, color, dashed], i) => {
    ctx.strokeStyle = color;
    ctx.setLineDash(dashed ? [5, 4] : []);
    ctx.beginPath();
    ctx.moveTo(x, y + i * 14);
    ctx.lineTo(x + 22, y + i * 14);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = "#000";
    ctx.fillText(name, x + 26, y + i * 14 + 4);
  });
}

function drawCdf(id, title, x, sim, analytic) {
  const c = document.getElementById(id);
  const ctx = c.getContext("2d");
  const { sx, sy } = axes(ctx, c.width, c.height, title, false, [0, 1], [0, 1]);
  line(ctx, sx, sy, x, sim, BLUE, false);
  line(ctx, sx, sy, x, analytic, RED, true);
  legend(ctx, [["simulation", BLUE, false], ["analysis", RED, true]], PAD.l + 150, c.height - PAD.b - 30);
}

function runCdf() {
  const info = document.getElementById("cdf-info");
  try {
    const c = cdf_curves(num("cdf-zeta"), num("cdf-n"), num("cdf-trials"), num("cdf-seed"), 201);
    drawCdf("cdf-rate", "CDF of r", c.x, c.rate_sim, c.rate_analytic);
    drawCdf("cdf-tau", "CDF of tau_u", c.x, c.tau_sim, c.tau_analytic);
    info.textContent = `KS(r) = ${c.ks_rate.toFixed(4)}\nKS(tau_u) = ${c.ks_tau.toFixed(4)}`;
    c.free();
  } catch (e) {
    info.textContent = String(e);
  }
}

function runSweep() {
  const info = document.getElementById("sw-info");
  try {
    const s = zeta_sweep(num("sw-n"), num("sw-trials"), 1, num("sw-points"));
    const c = document.getElementById("sweep");
    const ctx = c.getContext("2d");
    const z = s.zeta;
    const xr = [Math.log10(z[0]), Math.log10(z[z.length - 1])];
    const { sx, sy } = axes(ctx, c.width, c.height, "Mean throughputs against zeta", true, xr, [0, 1]);
    line(ctx, sx, sy, z, s.tau_u_sim, BLUE, false);
    line(ctx, sx, sy, z, s.tau_u_analytic, BLUE, true);
    line(ctx, sx, sy, z, s.tau_d_sim, RED, false);
    line(ctx, sx, sy, z, s.tau_d_analytic, RED, true);
    if (Number.isFinite(s.zeta_star)) {
      ctx.fillStyle = "#000";
      ctx.beginPath();
      ctx.arc(sx(s.zeta_star), sy(s.tau_star), 4, 0, 2 * Math.PI);
      ctx.fill();
    }
    legend(
      ctx,
      [
        ["E[tau_u] sim", BLUE, false],
        ["E[tau_u] analysis", BLUE, true],
        ["E[tau_d] sim", RED, false],
        ["E[tau_d] analysis", RED, true],
      ],
      c.width - 150,
      PAD.t + 14,
    );
    info.textContent = Number.isFinite(s.zeta_star)
      ? `zeta* = ${s.zeta_star.toPrecision(3)}\ntau* = ${s.tau_star.toFixed(3)}`
      : "no crossing in [1e-4, 1e-1]";
    s.free();
  } catch (e) {
    info.textContent = String(e);
  }
}

function runLayout() {
  const info = document.getElementById("ly-info");
  try {
    const [side, sep] = geometry();
    const v = user_layout(num("ly-zeta"), num("ly-n"), num("ly-seed"), num("ly-frac"), num("ly-rad"));
    const c = document.getElementById("layout");
    const ctx = c.getContext("2d");
    const scale = c.width / side;
    const px = (x) => (x + side / 2) * scale;
    const py = (y) => (side / 2 - y) * scale;
    ctx.fillStyle = "#fff";
    ctx.fillRect(0, 0, c.width, c.height);
    ctx.strokeStyle = "#000";
    ctx.strokeRect(0, 0, c.width, c.height);
    let micro = 0;
    for (let i = 0; i < v.length; i += 3) {
      const isMicro = v[i + 2] === 1;
      micro += isMicro ? 1 : 0;
      ctx.fillStyle = isMicro ? RED : BLUE;
      ctx.beginPath();
      ctx.arc(px(v[i]), py(v[i + 1]), 3, 0, 2 * Math.PI);
      ctx.fill();
    }
    ctx.fillStyle = "#000";
    ctx.fillRect(px(0) - 5, py(0) - 5, 10, 10);
    ctx.fillStyle = RED;
    ctx.fillRect(px(sep) - 4, py(0) - 4, 8, 8);
    info.textContent = `${micro} of ${v.length / 3} users on the microcell`;
  } catch (e) {
    info.textContent = String(e);
  }
}

await init();
document.getElementById("cdf-run").addEventListener("click", runCdf);
document.getElementById("sw-run").addEventListener("click", runSweep);
document.getElementById("ly-run").addEventListener("click", runLayout);
runLayout();
runCdf();
