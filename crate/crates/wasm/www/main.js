// Demo page logic. Build the wasm bundle first (see README):
//   cargo build -p stylemark-wasm --release --target wasm32-unknown-unknown
//   wasm-bindgen --target web --out-dir crates/wasm/www/pkg \
//       target/wasm32-unknown-unknown/release/stylemark_wasm.wasm
import init, { run_tournament, compare_presets, match_timeline } from "./pkg/stylemark_wasm.js";

const $ = (id) => document.getElementById(id);

const DIALS = [
  { key: "time_between_decisions", label: "time between decisions (s)", min: 0, max: 0.5, step: 0.05 },
  { key: "time_between_actions", label: "time between actions (s)", min: 0, max: 0.2, step: 0.05 },
  { key: "rule_compliance", label: "rule compliance", min: 0, max: 1, step: 0.05 },
  { key: "aggressiveness", label: "aggressiveness", min: 0, max: 1, step: 0.05 },
  { key: "combo_efficiency", label: "combo efficiency", min: 0, max: 1, step: 0.05 },
];
const DEFAULTS = {
  a: { time_between_decisions: 0.1, time_between_actions: 0.05, rule_compliance: 0.9, aggressiveness: 0.6, combo_efficiency: 1.0 },
  b: { time_between_decisions: 0.4, time_between_actions: 0.1, rule_compliance: 0.9, aggressiveness: 0.1, combo_efficiency: 0.1 },
};

function buildAgentControls() {
  const host = $("agents");
  for (const side of ["a", "b"]) {
    const box = document.createElement("div");
    box.className = "agent";
    box.innerHTML = `<h3>agent ${side.toUpperCase()}</h3>`;
    for (const dial of DIALS) {
      const row = document.createElement("div");
      const value = DEFAULTS[side][dial.key];
      row.innerHTML = `
        <label for="${side}-${dial.key}">${dial.label}</label>
        <input type="range" id="${side}-${dial.key}" min="${dial.min}" max="${dial.max}"
               step="${dial.step}" value="${value}">
        <output for="${side}-${dial.key}">${value.toFixed(2)}</output>`;
      const slider = row.querySelector("input");
      const output = row.querySelector("output");
      slider.addEventListener("input", () => { output.textContent = Number(slider.value).toFixed(2); });
      box.appendChild(row);
    }
    host.appendChild(box);
  }
}

function agentJson(side) {
  const preset = { name: `agent-${side}` };
  for (const dial of DIALS) preset[dial.key] = Number($(`${side}-${dial.key}`).value);
  return JSON.stringify(preset);
}

function busy(button, status, message, work) {
  button.disabled = true;
  status.textContent = message;
  // Let the status paint before the synchronous wasm call blocks the thread.
  setTimeout(() => {
    try {
      const result = work();
      if (result && result.error) {
        status.textContent = `error: ${result.error}`;
      } else {
        status.textContent = "";
      }
    } catch (err) {
      status.textContent = `error: ${err}`;
    } finally {
      button.disabled = false;
    }
  }, 30);
}

function renderTournament(data) {
  $("heatmap").innerHTML = data.svg;
  const fmt = (x) => x.toFixed(3);
  let html = `<table><tr><th>preset</th><th>consistency min</th><th>max</th><th>avg</th>
      <th>same-preset mean</th><th>cross-preset mean</th><th>margin</th></tr>`;
  for (const row of data.consistency) {
    const margin = data.margins.find((m) => m.preset === row.player_id);
    html += `<tr><td>${row.player_id}</td><td>${fmt(row.min)}</td><td>${fmt(row.max)}</td>
      <td>${fmt(row.avg)}</td><td>${fmt(margin.same)}</td><td>${fmt(margin.cross)}</td>
      <td>${fmt(margin.margin)}</td></tr>`;
  }
  html += `</table><p class="hint">${data.matches} matches, ${data.rounds} rounds,
      ${data.knockouts} knockouts.</p>`;
  $("t-tables").innerHTML = html;
}

function renderComparison(data) {
  $("d-score").textContent = `cosine similarity: ${data.similarity.toFixed(6)}`;
  $("d-legend").innerHTML = `
    <span><span class="swatch" style="background:var(--bar-a)"></span>agent A
      (${data.windows_a} windows)</span>
    <span><span class="swatch" style="background:var(--bar-b)"></span>agent B
      (${data.windows_b} windows)</span>
    <span>${data.knockouts} knockouts</span>`;
  const peak = Math.max(...data.top.map((t) => Math.max(t.a, t.b)), 1e-9);
  $("d-bars").innerHTML = data.top
    .map((t) => {
      const short = t.key
        .split("|")
        .map((part) => {
          const [state, sub, move] = part.split("/");
          if (sub === "Blocking") return "Block";
          if (sub !== "Resting") return `${sub}.${move}`;
          if (state === "Stand") return move;
          return `${state}.${move}`;
        })
        .join(" › ");
      const wa = ((t.a / peak) * 100).toFixed(1);
      const wb = ((t.b / peak) * 100).toFixed(1);
      return `<div class="bar-row"><div class="bar-key">${short}</div>
        <div class="bar-track">
          <div class="bar-a" style="width:${wa}%"></div>
          <div class="bar-b" style="width:${wb}%"></div>
        </div></div>`;
    })
    .join("");
}

let playback = null;

function playTimeline(data) {
  const canvas = $("arena");
  const ctx = canvas.getContext("2d");
  if (playback) cancelAnimationFrame(playback);
  const scale = canvas.width / data.arena_width;
  const floor = 170;
  const colors = ["#2a6fb0", "#c2622a"];
  let index = 0;

  function drawFighter(x, health, move, color, flip) {
    const px = x * scale;
    ctx.fillStyle = color;
    ctx.fillRect(px - 10, floor - 60, 20, 60);
    ctx.fillStyle = "#1c2430";
    ctx.font = "11px ui-monospace, monospace";
    ctx.textAlign = "center";
    ctx.fillText(move, px, floor + 16);
    // health bar
    const barX = flip ? canvas.width - 320 : 20;
    ctx.fillStyle = "#eef1f4";
    ctx.fillRect(barX, 16, 300, 12);
    ctx.fillStyle = color;
    const frac = health / data.initial_health;
    ctx.fillRect(flip ? barX + 300 * (1 - frac) : barX, 16, 300 * frac, 12);
  }

  function frame() {
    const snap = data.frames[Math.min(index, data.frames.length - 1)];
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.strokeStyle = "#dfe3e8";
    ctx.beginPath();
    ctx.moveTo(0, floor);
    ctx.lineTo(canvas.width, floor);
    ctx.stroke();
    drawFighter(snap[0], snap[1], snap[2], colors[0], false);
    drawFighter(snap[3], snap[4], snap[5], colors[1], true);
    ctx.fillStyle = "#68727f";
    ctx.font = "12px system-ui, sans-serif";
    ctx.textAlign = "left";
    const second = ((index * data.stride) / data.fps).toFixed(1);
    ctx.fillText(`t = ${second}s`, 20, 44);
    if (index >= data.frames.length - 1) {
      ctx.textAlign = "center";
      ctx.font = "20px system-ui, sans-serif";
      ctx.fillStyle = "#15437d";
      ctx.fillText(data.outcome, canvas.width / 2, 80);
      return;
    }
    index += 1;
    playback = requestAnimationFrame(frame);
  }
  frame();
}

async function main() {
  await init();
  buildAgentControls();

  $("t-run").addEventListener("click", () => {
    busy($("t-run"), $("t-status"), "simulating 10 pairs…", () => {
      const data = JSON.parse(run_tournament(
        Number($("t-matches").value),
        Number($("t-rounds").value),
        Number($("t-limit").value),
        Number($("t-seed").value),
      ));
      if (!data.error) renderTournament(data);
      return data;
    });
  });

  $("d-run").addEventListener("click", () => {
    busy($("d-run"), $("d-status"), "simulating duel…", () => {
      const data = JSON.parse(compare_presets(
        agentJson("a"),
        agentJson("b"),
        Number($("d-matches").value),
        Number($("d-limit").value),
        Number($("d-seed").value),
      ));
      if (!data.error) renderComparison(data);
      return data;
    });
  });

  $("w-run").addEventListener("click", () => {
    busy($("w-run"), $("w-status"), "simulating round…", () => {
      const data = JSON.parse(match_timeline(
        agentJson("a"),
        agentJson("b"),
        Number($("d-limit").value),
        Number($("d-seed").value),
        2,
      ));
      if (!data.error) playTimeline(data);
      return data;
    });
  });
}

main();
