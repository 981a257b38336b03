import init, { saturate_dot, spectrum_json, lump_json } from "./pkg/timedeq_web.js";

const FIG2 = {
  backend: "nondet",
  alphabet: ["sigma", "theta"],
  durations: [0],
  states: ["s0", "s1", "s2"],
  steps: [
    { from: "s0", label: "tau", dur: 0, to: "s0" },
    { from: "s0", label: "sigma", dur: 0, to: "s1" },
    { from: "s0", label: "tau", dur: 0, to: "s2" },
    { from: "s1", label: "tau", dur: 0, to: "s2" },
    { from: "s2", label: "theta", dur: 0, to: "s2" },
  ],
};

const WT2 = {
  backend: "nondet",
  alphabet: ["sigma"],
  durations: [0],
  states: ["x", "x1", "z", "y", "z2"],
  steps: [
    { from: "x", label: "tau", dur: 0, to: "x1" },
    { from: "x1", label: "sigma", dur: 0, to: "z" },
    { from: "y", label: "sigma", dur: 0, to: "z2" },
  ],
};

const CHAIN = {
  states: ["start", "left", "right"],
  rows: [["0", "1/3", "2/3"], ["0", "1", "0"], ["0", "0", "1"]],
};

const $ = (id) => document.getElementById(id);
const pretty = (v) => JSON.stringify(v, null, 2);

function show(el, f) {
  el.classList.remove("error");
  try {
    return f();
  } catch (e) {
    el.classList.add("error");
    el.textContent = String(e);
  }
}

function spectrumTable(report) {
  const rows = report.relations
    .map((r) => `<tr><td>${r.relation}</td><td>${r.partition ?? "n/a (no acceptance)"}</td>` +
      `<td>${r.conclusive === null ? "" : r.conclusive ? "yes" : "bounded"}</td></tr>`)
    .join("");
  const edges = report.edges
    .map((e) => `<tr><td>${e.finer}</td><td>${e.coarser}</td><td>${e.status}</td></tr>`)
    .join("");
  return `<table><tr><th>relation</th><th>classes</th><th>conclusive</th></tr>${rows}</table>` +
    `<h3>refinement</h3><table><tr><th>finer</th><th>coarser</th><th>status</th></tr>${edges}</table>` +
    `<p>hasse: ${report.all_pass ? "all pass" : "violations present"}</p>`;
}

async function main() {
  await init();
  $("status").textContent = "ready";
  $("sat-input").value = pretty(FIG2);
  $("spec-input").value = pretty(WT2);
  $("lump-input").value = pretty(CHAIN);

  $("sat-run").onclick = () => {
    const out = $("sat-out");
    show(out, () => { out.textContent = saturate_dot($("sat-input").value, $("sat-hom").value); });
  };
  $("spec-run").onclick = () => {
    const out = $("spec-out");
    show(out, () => { out.innerHTML = spectrumTable(JSON.parse(spectrum_json($("spec-input").value))); });
  };
  $("lump-run").onclick = () => {
    const out = $("lump-out");
    const tol = $("lump-exact").checked ? -1 : Number($("lump-tol").value);
    show(out, () => { out.textContent = pretty(JSON.parse(lump_json($("lump-input").value, tol))); });
  };
}

main().catch((e) => { $("status").textContent = `failed to load: ${e}`; });
