import init, { game_table, evaluate_strategy, pair_distribution } from "../pkg/ptlab_web.js";

const $ = (id) => document.getElementById(id);
let name = "full";
let table = null;
const bits = { alice: [], bob: [] };

function hex(list) {
  let n = 0n;
  list.forEach((b, i) => { if (b) n |= 1n << BigInt(i); });
  return "0x" + n.toString(16);
}

function renderVars(party) {
  const box = $(party);
  box.innerHTML = "";
  table[party].forEach((label, i) => {
    const b = document.createElement("button");
    b.textContent = `${label} = ${bits[party][i] ? "-1" : "+1"}`;
    if (bits[party][i]) b.className = "minus";
    b.onclick = () => { bits[party][i] = !bits[party][i]; refresh(); };
    box.appendChild(b);
  });
}

function predicateText(p) {
  return p.factors.map((f) => f.observable).join("·") + " = " + (p.sign < 0 ? "-1" : "+1");
}

function refresh() {
  renderVars("alice");
  renderVars("bob");
  const a = hex(bits.alice), b = hex(bits.bob);
  $("hex").textContent = `{"alice": "${a}", "bob": "${b}"}`;
  const ev = JSON.parse(evaluate_strategy(name, a, b));
  $("score").textContent = `value ${ev.value}, failed: ${ev.failed_predicates.join(" ") || "none"}`;
  const won = new Set(ev.won_pairs);
  const body = $("pairs").querySelector("tbody");
  body.innerHTML = "";
  for (const pair of table.pairs) {
    const tr = document.createElement("tr");
    tr.className = won.has(pair.name) ? "won" : "lost";
    const td = document.createElement("td");
    td.className = "pair";
    td.textContent = pair.name;
    td.onclick = () => showDistribution(pair.name);
    tr.appendChild(td);
    const preds = document.createElement("td");
    preds.textContent = pair.predicates.map((p) => `${p.id}: ${predicateText(p)}`).join("   ");
    tr.appendChild(preds);
    body.appendChild(tr);
  }
}

function showDistribution(pair) {
  const d = JSON.parse(pair_distribution(name, pair));
  $("dist-title").textContent = `Entangled strategy on ${d.pair}`;
  const rows = [`<tr>${d.observables.map((o) => `<th>${o}</th>`).join("")}<th>p</th><th>win</th></tr>`];
  for (const o of d.outcomes) {
    if (o.probability < 1e-12) continue;
    rows.push(`<tr>${o.answers.map((x) => `<td>${x > 0 ? "+1" : "-1"}</td>`).join("")}`
      + `<td>${o.probability.toFixed(4)}</td><td>${o.wins ? "yes" : "no"}</td></tr>`);
  }
  $("dist").innerHTML = rows.join("");
}

function load() {
  name = $("game").value;
  table = JSON.parse(game_table(name));
  bits.alice = table.alice.map(() => false);
  bits.bob = table.bob.map(() => false);
  $("dist-title").textContent = "";
  $("dist").innerHTML = "";
  refresh();
}

await init();
$("game").onchange = load;
$("reset").onclick = load;
load();
