// Demo page wiring. Expects the wasm-bindgen bundle at ./pkg/ (see the
// repository README for the build command).

import init, {
  posterior_wheel_svg,
  posterior_summary_json,
  normal_hpd_svg,
  normal_hpd_json,
  simulation_panel_svg,
  simulation_certainty_json,
} from "./pkg/ghpd_wasm.js";

const $ = (id) => document.getElementById(id);

function fmt(x, digits = 4) {
  return Number(x).toFixed(digits);
}

function renderWheel() {
  const rows = $("wheel-rows").value;
  const alpha = Number($("wheel-alpha").value);
  $("wheel-alpha-value").textContent = fmt(alpha, 2);
  try {
    $("wheel-stage").innerHTML = posterior_wheel_svg(rows, alpha, 260);
    const summary = JSON.parse(posterior_summary_json(rows, alpha));
    const phi = Object.entries(summary.phi)
      .map(([label, v]) => `${label}: ${fmt(v)}`)
      .join("   ");
    $("wheel-summary").textContent =
      `credible mass = ${fmt(summary.credible_mass, 6)}   ` +
      `kappa = ${fmt(summary.kappa, 6)}   gamma = ${fmt(summary.gamma, 6)}   ` +
      `size = ${fmt(summary.size, 4)}\n${phi}`;
    $("wheel-error").textContent = "";
  } catch (e) {
    $("wheel-error").textContent = String(e);
  }
}

function renderGrid() {
  const alpha = Number($("grid-alpha").value);
  $("grid-alpha-value").textContent = fmt(alpha, 2);
  $("grid-stage").innerHTML = normal_hpd_svg(alpha, 560, 260);
  const summary = JSON.parse(normal_hpd_json(alpha));
  const intervals = summary.intervals
    .map(([a, b]) => `[${fmt(a, 3)}, ${fmt(b, 3)}]`)
    .join(" u ");
  $("grid-summary").textContent =
    `interval ${intervals}\n` +
    `density threshold = ${fmt(summary.kappa, 5)}\n` +
    `boundary mass = ${Number(summary.boundary_mass).toExponential(2)}`;
}

function renderSim() {
  const seed = Number($("sim-seed").value);
  const alpha = Number($("sim-alpha").value);
  const n = Number($("sim-n").value);
  $("sim-seed-value").textContent = seed;
  $("sim-alpha-value").textContent = fmt(alpha, 2);
  $("sim-n-value").textContent = n;
  $("sim-stage").innerHTML = simulation_panel_svg(seed, alpha, n, 560);
  const counts = JSON.parse(simulation_certainty_json(seed, alpha, n));
  $("sim-summary").textContent =
    `${counts.single_spoke} certain (single spoke)\n` +
    `${counts.multi_spoke} uncertain (multiple spokes)`;
}

async function main() {
  await init();
  $("wheel-rows").addEventListener("input", renderWheel);
  $("wheel-alpha").addEventListener("input", renderWheel);
  $("grid-alpha").addEventListener("input", renderGrid);
  for (const id of ["sim-seed", "sim-alpha", "sim-n"]) {
    $(id).addEventListener("input", renderSim);
  }
  renderWheel();
  renderGrid();
  renderSim();
}

main();
