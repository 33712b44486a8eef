import init, { fixtures_list, analyze, simulate, cournot_cycle } from "./pkg/teachlab_web.js";

const $ = (id) => document.getElementById(id);

function guard(out, f) {
  try {
    out.classList.remove("err");
    f();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e.message ?? e);
  }
}

function drawSeries(series) {
  const canvas = $("chart");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (series.length === 0) return;
  const values = series.flatMap(([, r, c]) => [r, c]);
  let lo = Math.min(...values), hi = Math.max(...values);
  if (hi === lo) { hi += 1; lo -= 1; }
  const tMax = series[series.length - 1][0];
  const x = (t) => 40 + (canvas.width - 50) * (t / tMax);
  const y = (v) => canvas.height - 20 - (canvas.height - 30) * ((v - lo) / (hi - lo));
  ctx.fillStyle = "#000";
  ctx.fillText(hi.toFixed(2), 2, 12);
  ctx.fillText(lo.toFixed(2), 2, canvas.height - 20);
  [[1, "#1f77b4", "row"], [2, "#d62728", "col"]].forEach(([k, color, name], i) => {
    ctx.strokeStyle = color;
    ctx.beginPath();
    series.forEach((p, j) => (j === 0 ? ctx.moveTo(x(p[0]), y(p[k])) : ctx.lineTo(x(p[0]), y(p[k]))));
    ctx.stroke();
    ctx.fillStyle = color;
    ctx.fillText(name, canvas.width - 40, 14 + 14 * i);
  });
}

async function main() {
  await init();
  const fixtures = JSON.parse(fixtures_list());
  for (const f of fixtures) $("fixture").add(new Option(f.name, f.name));
  const pick = () => {
    const f = fixtures.find((f) => f.name === $("fixture").value);
    $("game").value = JSON.stringify(f.game);
  };
  $("fixture").onchange = pick;
  $("fixture").value = "u2";
  pick();

  $("analyze").onclick = () =>
    guard($("analysis"), () => {
      $("analysis").textContent = JSON.stringify(JSON.parse(analyze($("game").value)), null, 2);
    });

  $("simulate").onclick = () =>
    guard($("sim-summary"), () => {
      const out = JSON.parse(
        simulate($("game").value, $("row").value, $("col").value, Number($("horizon").value), Number($("seed").value), 300),
      );
      const abs = out.absorbed ? `absorbed at (${out.absorbed.join(", ")}) from period ${out.absorption_time}` : "not absorbed";
      $("sim-summary").textContent = `${abs}; limit of means ${out.limit.map((v) => v.toFixed(3)).join(", ")}`;
      drawSeries(out.series);
    });

  $("cycle").onclick = () =>
    guard($("cycle-out"), () => {
      const out = JSON.parse(cournot_cycle(Number($("step").value), Number($("maxlen").value)));
      $("cycle-out").textContent =
        `cycle ${out.cycle.join(" -> ")}\naverage ${out.average.toFixed(2)} vs leader value ${out.leader_value}\n` +
        `${out.grid_points} grid points, ${out.cycles_examined} cycles examined`;
    });
}

main();
