// SPDX-License-Identifier: Apache-2.0
//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use netfuzz::gen;
use netfuzz::liberty::{canonical_key, parse_liberty, write_liberty, BoolExpr, CellLibrary};
use netfuzz::mapper::{build_match_index, map_netlist, tally};
use netfuzz::netlist::{
    elaborate, parse_structural_verilog, write_structural_verilog, GateKind, InstanceKind, Netlist,
};
use netfuzz::sim::{Harness, Simulator};
use netfuzz::stimulus::{derive_layout, NetInput};
use netfuzz::vcd::{parse_vcd_signals, write_vcd};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn lib(name: &str) -> CellLibrary {
    parse_liberty(&read(&fixture(name))).unwrap()
}

fn netlist(name: &str) -> Netlist {
    parse_structural_verilog(&read(&fixture(name))).unwrap()
}

fn netfuzz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netfuzz")).args(args).output().expect("spawn netfuzz")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stdout_json(o: &Output) -> Result<Value, String> {
    serde_json::from_slice(&o.stdout).map_err(|e| {
        format!("bad json ({e}): {} / {}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let e = start.elapsed();
    ensure(e < limit, || format!("took {e:?}, limit {limit:?}"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

// Oracle: each gate's function as an expression, evaluated by repeated
// sweeps over the net graph until every net is known.
fn gate_expr(kind: GateKind) -> BoolExpr {
    let v = BoolExpr::var;
    match kind {
        GateKind::And => BoolExpr::and(v("A"), v("B")),
        GateKind::Or => BoolExpr::or(v("A"), v("B")),
        GateKind::Nand => BoolExpr::not(BoolExpr::and(v("A"), v("B"))),
        GateKind::Nor => BoolExpr::not(BoolExpr::or(v("A"), v("B"))),
        GateKind::Xor => BoolExpr::xor(v("A"), v("B")),
        GateKind::Xnor => BoolExpr::not(BoolExpr::xor(v("A"), v("B"))),
        GateKind::Not => BoolExpr::not(v("A")),
        GateKind::Buf => v("A"),
        GateKind::Mux2 => BoolExpr::or(BoolExpr::and(v("S"), v("B")), BoolExpr::and(BoolExpr::not(v("S")), v("A"))),
        GateKind::Const0 => BoolExpr::Const(false),
        GateKind::Const1 => BoolExpr::Const(true),
        GateKind::Dff => unreachable!("combinational only"),
    }
}

fn eval(e: &BoolExpr, pin: &dyn Fn(&str) -> bool) -> bool {
    match e {
        BoolExpr::Const(b) => *b,
        BoolExpr::Var(n) => pin(n),
        BoolExpr::Not(a) => !eval(a, pin),
        BoolExpr::And(a, b) => eval(a, pin) && eval(b, pin),
        BoolExpr::Or(a, b) => eval(a, pin) || eval(b, pin),
        BoolExpr::Xor(a, b) => eval(a, pin) ^ eval(b, pin),
    }
}

fn oracle(n: &Netlist, assignment: &BTreeMap<String, bool>) -> Vec<bool> {
    let mut values = assignment.clone();
    let mut pending: Vec<_> = n.instances.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|inst| {
            let InstanceKind::Gate(g) = inst.kind else { panic!("generic only") };
            let ins = g.inputs();
            if !ins.iter().all(|pin| values.contains_key(&inst.pins[*pin])) {
                return true;
            }
            let v = eval(&gate_expr(g), &|pin| values[&inst.pins[pin]]);
            values.insert(inst.pins[g.output()].clone(), v);
            false
        });
        assert!(pending.len() < before, "oracle made no progress");
    }
    n.output_bits().iter().map(|b| values[b]).collect()
}

fn c1_simulator_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut mismatches = 0;
    let mut vectors = 0u64;
    for _ in 0..1000 {
        let n = gen::comb_netlist(&mut rng, 8, 30);
        let d = elaborate(&n, None).map_err(|e| e.to_string())?;
        let mut sim = Simulator::new(&d, None).map_err(|e| e.to_string())?;
        let layout = Arc::new(derive_layout(&n).map_err(|e| e.to_string())?);
        let bits: Vec<String> = n.inputs().flat_map(|p| p.bit_names()).collect();
        let w = bits.len();
        for v in 0..1u32 << w {
            let frame: Vec<bool> = (0..w).map(|i| v >> i & 1 == 1).collect();
            let assignment = bits.iter().cloned().zip(frame.iter().copied()).collect();
            let input = NetInput::with_frames(layout.clone(), vec![frame]).unwrap();
            let (trace, _) = sim.run(&input, &Harness::default()).map_err(|e| e.to_string())?;
            let want: Vec<_> = oracle(&n, &assignment).into_iter().map(netfuzz::logic::Logic::from_bool).collect();
            if trace.frames[0] != want {
                mismatches += 1;
            }
            vectors += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("1000 netlists, {vectors} vectors, 0 mismatches in {:.1?}", start.elapsed()))
}

fn fuzz_config(dir: &Path, design: &Path, seed: u64, iterations: u64, stop_on_first_bug: bool) -> PathBuf {
    let cfg = format!(
        "[design]\nnetlist = \"{}\"\nmap_with = \"{lib}\"\nlibrary = \"{lib}\"\n\n[reference]\nnetlist = \"{}\"\n\n\
         [campaign]\nmax_iterations = {iterations}\nseed = {seed}\nstop_on_first_bug = {stop_on_first_bug}\n",
        p(design),
        p(&fixture("alu4.v")),
        lib = p(&fixture("lib45.lib")),
    );
    let path = dir.join("fuzz.toml");
    std::fs::write(&path, cfg).unwrap();
    path
}

/// Single-gate mutants of the ALU: AND<->OR, XOR<->XNOR, NOT->BUF.
fn alu_mutants() -> Vec<(String, Netlist)> {
    let base = netlist("alu4.v");
    let swap = |g: GateKind| match g {
        GateKind::And => Some(GateKind::Or),
        GateKind::Or => Some(GateKind::And),
        GateKind::Xor => Some(GateKind::Xnor),
        GateKind::Xnor => Some(GateKind::Xor),
        GateKind::Not => Some(GateKind::Buf),
        _ => None,
    };
    let sites: Vec<(usize, GateKind)> = base
        .instances
        .iter()
        .enumerate()
        .filter_map(|(i, inst)| match inst.kind {
            InstanceKind::Gate(g) => swap(g).map(|m| (i, m)),
            _ => None,
        })
        .collect();
    (0..20)
        .map(|k| {
            let (i, m) = sites[k * sites.len() / 20];
            let mut n = base.clone();
            let label = format!("{}:{}->{}", n.instances[i].name, n.instances[i].kind.type_name(), m.keyword());
            n.instances[i].kind = InstanceKind::Gate(m);
            (label, n)
        })
        .collect()
}

fn c2_mutant_detection() -> Check {
    let mut detected = 0;
    let mut missed = Vec::new();
    let mut slowest = Duration::ZERO;
    for (label, mutant) in alu_mutants() {
        let dir = tempfile::tempdir().unwrap();
        let design = dir.path().join("mutant.v");
        std::fs::write(&design, write_structural_verilog(&mutant)).unwrap();
        let cfg = fuzz_config(dir.path(), &design, 7, 10_000, true);
        let out = dir.path().join("out");
        let start = Instant::now();
        let o = netfuzz(&["fuzz", "--config", p(&cfg), "--out", p(&out)]);
        let took = start.elapsed();
        slowest = slowest.max(took);
        if took >= Duration::from_secs(120) {
            return Err(format!("{label} took {took:?}"));
        }
        if code(&o) == 2 {
            return Err(format!("{label}: {}", String::from_utf8_lossy(&o.stderr)));
        }
        let summary: Value = serde_json::from_str(&read(&out.join("summary.json"))).map_err(|e| e.to_string())?;
        match summary["first_bug_execution"].as_u64() {
            Some(n) if n <= 10_000 => detected += 1,
            _ => missed.push(label),
        }
    }
    ensure(detected >= 19, || format!("{detected}/20 detected; missed {missed:?}"))?;
    Ok(format!("{detected}/20 mutants diverged within 10000 executions (missed {missed:?}), slowest {slowest:.1?}"))
}

fn c3_clima_end_to_end() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let lib45 = fixture("lib45.lib");
    let tampered = d.join("tampered.lib");
    let o = netfuzz(&[
        "clima",
        "inject",
        "--lib",
        p(&lib45),
        "--target",
        "AND2X1",
        "--donor-cell",
        "OR2X1",
        "--out",
        p(&tampered),
    ]);
    ensure(code(&o) == 0, || format!("inject: {}", String::from_utf8_lossy(&o.stderr)))?;

    let generic = fixture("or_tree.v");
    let original_or =
        netlist("or_tree.v").instances.iter().filter(|i| i.kind == InstanceKind::Gate(GateKind::Or)).count();
    let mapped = d.join("mapped.v");
    let report = d.join("report.json");
    let o = netfuzz(&["map", p(&generic), "--lib", p(&tampered), "--report", p(&report), "--out", p(&mapped)]);
    ensure(code(&o) == 0, || format!("map: {}", String::from_utf8_lossy(&o.stderr)))?;
    let rep: Value = serde_json::from_str(&read(&report)).map_err(|e| e.to_string())?;
    let count = |c: &str| rep["cells"][c]["count"].as_u64().unwrap_or(0);
    ensure(count("OR2X1") == 0, || format!("OR2X1 count {}", count("OR2X1")))?;
    let tampered_count = count("AND2X1");
    ensure(tampered_count as usize >= original_or, || format!("AND2X1 {tampered_count} < OR {original_or}"))?;

    let diff = d.join("diff.toml");
    std::fs::write(
        &diff,
        format!(
            "pairing = \"intra-tool-inter-lib\"\n\
             [[source]]\ntool = \"netfuzz-map\"\nlib = \"genuine\"\nnetlist = \"{g}\"\nmap_with = \"{l}\"\nlibrary = \"{l}\"\n\
             [[source]]\ntool = \"netfuzz-map\"\nlib = \"tampered\"\nnetlist = \"{m}\"\nlibrary = \"{l}\"\n\
             [reference]\nnetlist = \"{g}\"\n[inputs]\nmode = \"exhaustive\"\n",
            g = p(&generic),
            l = p(&lib45),
            m = p(&mapped),
        ),
    )
    .unwrap();
    let o = netfuzz(&["diff", "--config", p(&diff)]);
    let m = stdout_json(&o)?;
    let divergent: u64 =
        m["cells"].as_array().into_iter().flatten().map(|c| c["divergent_inputs"].as_u64().unwrap_or(0)).sum();
    ensure(code(&o) == 1 && divergent >= 1, || format!("diff exit {} with {divergent} divergences", code(&o)))?;

    let o = netfuzz(&["clima", "scan", "--lib", p(&tampered), "--reference", p(&lib45)]);
    let findings = stdout_json(&o)?;
    let cells: std::collections::BTreeSet<&str> =
        findings["findings"].as_array().into_iter().flatten().filter_map(|f| f["cell"].as_str()).collect();
    ensure(cells.len() == 1 && cells.contains("AND2X1"), || format!("scan flagged {cells:?}"))?;
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "OR2X1 0, AND2X1 {tampered_count} (generic OR {original_or}), {divergent} diverging inputs, scan flags AND2X1 only, {:.1?}",
        start.elapsed()
    ))
}

fn c4_inter_library_soundness() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let mut checked = Vec::new();
    for design in ["or_tree.v", "seq_acc.v", "gates_mix.v"] {
        let n = netlist(design);
        let width = derive_layout(&n).map_err(|e| e.to_string())?.frame_width;
        ensure(width <= 8, || format!("{design} has {width} inputs"))?;
        let seq = n.clock_port().is_some();
        let (reset, frames) = if seq { (1, 8 / width) } else { (0, 1) };
        let mut cfg = format!("pairing = \"intra-tool-inter-lib\"\nreset_cycles = {reset}\n");
        for l in ["lib45", "lib45_b"] {
            let lp = fixture(&format!("{l}.lib"));
            cfg += &format!(
                "[[source]]\ntool = \"netfuzz-map\"\nlib = \"{l}\"\nnetlist = \"{}\"\nmap_with = \"{lp}\"\nlibrary = \"{lp}\"\n",
                p(&fixture(design)),
                lp = p(&lp)
            );
        }
        cfg += &format!(
            "[reference]\nnetlist = \"{}\"\n[inputs]\nmode = \"exhaustive\"\nframes = {frames}\n",
            p(&fixture(design))
        );
        let path = dir.path().join(format!("{design}.toml"));
        std::fs::write(&path, cfg).unwrap();
        let o = netfuzz(&["diff", "--config", p(&path)]);
        let m = stdout_json(&o)?;
        let cells = m["cells"].as_array().cloned().unwrap_or_default();
        let exec: u64 = cells.iter().map(|c| c["executions"].as_u64().unwrap_or(0)).sum();
        let div: u64 = cells.iter().map(|c| c["divergent_inputs"].as_u64().unwrap_or(0)).sum();
        ensure(code(&o) == 0 && div == 0 && exec >= 1 << (width * frames), || {
            format!("{design}: exit {}, {div} divergences over {exec} executions", code(&o))
        })?;
        checked.push(format!("{design} {exec}"));
    }
    Ok(format!("zero divergences over exhaustive inputs: {}", checked.join(", ")))
}

fn c5_coverage_semantics() -> Check {
    let o = netfuzz(&[
        "cov-report",
        p(&fixture("listing1.v")),
        "--lib",
        p(&fixture("lib45.lib")),
        "--random",
        "5000",
        "--seed",
        "1",
    ]);
    let v = stdout_json(&o)?;
    let r = &v["report"];
    let stuck = r["stuck_pins"].as_array().cloned().unwrap_or_default();
    ensure(stuck.len() == 1, || format!("stuck pins {stuck:?}"))?;
    let s = &stuck[0];
    ensure(s["instance"] == "u_m1" && s["pin"] == "A", || format!("stuck pin {s}"))?;
    ensure(s["observed"].as_str().is_some_and(|o| o.len() == 1), || format!("stuck pin reached both values: {s}"))?;
    let toggle = r["toggle_percent"].as_f64().unwrap_or(0.0);
    ensure(toggle == 100.0, || format!("toggle {toggle}%, uncovered {}", r["uncovered_instances"]))?;
    Ok(format!("only u_m1.A stuck (observed {}), toggle 100% after {} inputs", s["observed"], v["inputs"]))
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        out.insert(e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap());
    }
    out
}

fn c6_determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let (label, mutant) = alu_mutants().swap_remove(3);
    let design = dir.path().join("mutant.v");
    std::fs::write(&design, write_structural_verilog(&mutant)).unwrap();
    let cfg = fuzz_config(dir.path(), &design, 42, 3000, false);
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let o = netfuzz(&["fuzz", "--config", p(&cfg), "--workers", "1", "--out", p(&out)]);
        ensure(code(&o) != 2, || String::from_utf8_lossy(&o.stderr).into_owned())?;
        runs.push((dir_bytes(&out.join("corpus")), std::fs::read(out.join("bugs.json")).unwrap()));
    }
    ensure(runs[0] == runs[1], || "runs differ".into())?;
    let bugs: Value = serde_json::from_slice(&runs[0].1).unwrap();
    Ok(format!(
        "{label}: {} corpus files and {} bug reports identical across runs",
        runs[0].0.len(),
        bugs.as_array().map_or(0, Vec::len)
    ))
}

fn c7_multiple_driver() -> Check {
    let o = netfuzz(&["lint", p(&fixture("double_driver.v")), "--lib", p(&fixture("lib45.lib"))]);
    ensure(code(&o) == 1, || format!("exit {}", code(&o)))?;
    let v = stdout_json(&o)?;
    let f = v["findings"]
        .as_array()
        .into_iter()
        .flatten()
        .find(|f| f["kind"] == "MultipleDriver")
        .ok_or("no MultipleDriver finding")?;
    let drivers: Vec<&str> = f["drivers"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
    ensure(drivers.contains(&"u_sub0.Y") && drivers.contains(&"u_bypass.Y"), || format!("drivers {drivers:?}"))?;
    Ok(format!("MultipleDriver on {} by {}", f["net"], drivers.join(" and ")))
}

fn c8_round_trips() -> Check {
    let designs = ["alu4.v", "or_tree.v", "seq_acc.v", "gates_mix.v", "listing1.v", "double_driver.v"];
    for d in designs {
        let n = netlist(d);
        let back = parse_structural_verilog(&write_structural_verilog(&n)).map_err(|e| format!("{d}: {e}"))?;
        ensure(back == n, || format!("{d} changed"))?;
    }
    for l in ["lib45.lib", "lib45_b.lib"] {
        let lb = lib(l);
        ensure(parse_liberty(&write_liberty(&lb)).ok() == Some(lb.clone()), || format!("{l} changed"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let lib45 = lib("lib45.lib");
    for d in ["alu4.v", "or_tree.v", "seq_acc.v", "gates_mix.v", "listing1.v"] {
        let n = netlist(d);
        let l = n.instances.iter().any(|i| matches!(i.kind, InstanceKind::Cell(_))).then_some(&lib45);
        let e = elaborate(&n, l).map_err(|e| e.to_string())?;
        let mut sim = Simulator::new(&e, l).map_err(|e| e.to_string())?;
        let layout = Arc::new(derive_layout(&n).unwrap());
        let input = netfuzz::fuzz::random_seed(&layout, 6, &mut rng, None);
        let reset_cycles = usize::from(n.reset_port().is_some());
        let h = Harness { reset_cycles, monitor: netfuzz::sim::Monitor::AllNets, ..Harness::default() };
        let (t, _) = sim.run(&input, &h).map_err(|e| e.to_string())?;
        let mut back = parse_vcd_signals(&write_vcd(&t, 10, &n.name), &t.signals, 10).map_err(|e| e.to_string())?;
        back.outputs = t.outputs;
        ensure(back == t, || format!("{d} trace changed through VCD"))?;
    }
    for i in 0..200 {
        let n = if i % 2 == 0 { gen::comb_netlist(&mut rng, 8, 30) } else { gen::seq_netlist(&mut rng, 6, 20) };
        let back = parse_structural_verilog(&write_structural_verilog(&n)).map_err(|e| e.to_string())?;
        ensure(back == n, || format!("random netlist {i} changed"))?;
        let l = gen::library(&mut rng);
        ensure(parse_liberty(&write_liberty(&l)).ok() == Some(l.clone()), || format!("random library {i} changed"))?;
        let t = gen::trace(&mut rng, 16, 50);
        let period = rng.random_range(1..50);
        let mut back =
            parse_vcd_signals(&write_vcd(&t, period, "top"), &t.signals, period).map_err(|e| e.to_string())?;
        back.outputs = t.outputs;
        ensure(back == t, || format!("random trace {i} changed"))?;
    }
    Ok("fixtures plus 200 random netlists, libraries and traces round-trip".into())
}

fn c9_mapper_minimality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    for (k, l) in [lib("lib45.lib"), lib("lib45_b.lib")].iter().enumerate() {
        let idx = build_match_index(l);
        let comb: Vec<_> = l.cells.values().filter(|c| !c.is_sequential()).collect();
        let keys: Vec<_> = comb.iter().map(|c| canonical_key(&c.truth_table().unwrap()).unwrap()).collect();
        for _ in 0..50 {
            let n = gen::comb_netlist(&mut rng, 8, 30);
            let (mapped, _) = map_netlist(&n, &idx).map_err(|e| e.to_string())?;
            for inst in &mapped.instances {
                let InstanceKind::Cell(c) = &inst.kind else { continue };
                let cell = l.cell(c).unwrap();
                let key = canonical_key(&cell.truth_table().unwrap()).unwrap();
                for (other, ok) in comb.iter().zip(&keys) {
                    ensure(*ok != key || other.area >= cell.area, || {
                        format!("lib {k}: {} ({}) beats {c} ({}) at {}", other.name, other.area, cell.area, inst.name)
                    })?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("100 random netlists, {checked} mapped instances all area-minimal"))
}

fn c10_targeted_neutrality() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let lib45 = fixture("lib45.lib");
    let mapped = d.join("alu4_mapped.v");
    let o = netfuzz(&["map", p(&fixture("alu4.v")), "--lib", p(&lib45), "--out", p(&mapped)]);
    ensure(code(&o) == 0, || String::from_utf8_lossy(&o.stderr).into_owned())?;
    let before = parse_structural_verilog(&read(&mapped)).unwrap();
    let ors: Vec<String> = before
        .instances
        .iter()
        .filter(|i| i.kind == InstanceKind::Cell("OR2X1".into()))
        .map(|i| i.name.clone())
        .take(3)
        .collect();
    ensure(!ors.is_empty(), || "no OR2X1 instances to target".into())?;
    let (tampered, subst, record) = (d.join("t.lib"), d.join("subst.v"), d.join("record.json"));
    let o = netfuzz(&[
        "clima",
        "inject",
        "--lib",
        p(&lib45),
        "--target",
        "AND2X1",
        "--donor-cell",
        "OR2X1",
        "--netlist",
        p(&mapped),
        "--instances",
        &ors.join(","),
        "--netlist-out",
        p(&subst),
        "--record",
        p(&record),
        "--out",
        p(&tampered),
    ]);
    ensure(code(&o) == 0, || String::from_utf8_lossy(&o.stderr).into_owned())?;
    let after = parse_structural_verilog(&read(&subst)).unwrap();
    let rec: Value = serde_json::from_str(&read(&record)).map_err(|e| e.to_string())?;
    let deltas: Vec<f64> =
        rec["substitutions"].as_array().into_iter().flatten().filter_map(|s| s["area_delta"].as_f64()).collect();
    ensure(deltas.len() == ors.len(), || format!("{} substitutions for {} instances", deltas.len(), ors.len()))?;
    let bound = deltas.len() as f64 * deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let tl = parse_liberty(&read(&tampered)).unwrap();
    let genuine = lib("lib45.lib");
    // Substituted instances carry the tampered cell's declared area.
    let area = |n: &Netlist, touched: &[String]| -> f64 {
        n.instances
            .iter()
            .map(|i| {
                let InstanceKind::Cell(c) = &i.kind else { return 0.0 };
                let l = if touched.contains(&i.name) { &tl } else { &genuine };
                l.cell(c).map_or(0.0, |d| d.area)
            })
            .sum()
    };
    let (a0, a1) = (tally(&before, &genuine), tally(&after, &genuine));
    ensure(a0.total_instances == a1.total_instances, || {
        format!("instances {} -> {}", a0.total_instances, a1.total_instances)
    })?;
    let changed = after.instances.iter().zip(&before.instances).filter(|(x, y)| x.kind != y.kind).count();
    ensure(changed == ors.len(), || format!("{changed} instances changed cell"))?;
    let delta = (area(&after, &ors) - area(&before, &[])).abs();
    ensure(delta <= bound + 1e-9, || format!("area delta {delta} exceeds bound {bound}"))?;
    Ok(format!(
        "{} instances unchanged, |area delta| {delta:.3} <= bound {bound:.3} over {} substitutions",
        a0.total_instances,
        deltas.len()
    ))
}

fn main() {
    let checks: [Criterion; 10] = [
        ("simulator oracle equivalence", c1_simulator_oracle),
        ("mutant detection campaign", c2_mutant_detection),
        ("library tamper end to end", c3_clima_end_to_end),
        ("inter-library soundness", c4_inter_library_soundness),
        ("coverage semantics", c5_coverage_semantics),
        ("determinism", c6_determinism),
        ("multiple-driver detection", c7_multiple_driver),
        ("round trips", c8_round_trips),
        ("mapper minimality", c9_mapper_minimality),
        ("targeted tamper neutrality", c10_targeted_neutrality),
    ];
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
