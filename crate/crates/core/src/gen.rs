// SPDX-License-Identifier: Apache-2.0
//! Random netlists, libraries and traces for property tests and benchmarks.

use indexmap::IndexMap;
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::liberty::{BoolExpr, CellDef, CellLibrary, PinDef, PinDirection, SeqSpec};
use crate::logic::Logic;
use crate::netlist::{Direction, GateKind, Instance, Netlist, PortDecl, PortRole};
use crate::sim::Trace;

const COMB: [GateKind; 9] = [
    GateKind::And,
    GateKind::Or,
    GateKind::Nand,
    GateKind::Nor,
    GateKind::Xor,
    GateKind::Xnor,
    GateKind::Not,
    GateKind::Buf,
    GateKind::Mux2,
];

struct GateSpec {
    kind: GateKind,
    fanin: Vec<usize>,
}

/// Split `n` bits into input ports, some scalar and some vectors.
fn input_ports(rng: &mut impl Rng, n: usize) -> Vec<PortDecl> {
    let mut ports = Vec::new();
    let mut left = n;
    while left > 0 {
        let w = rng.random_range(1..=left.min(4));
        let name = format!("in{}", ports.len());
        if w == 1 && rng.random_bool(0.5) {
            ports.push(PortDecl::scalar(name, Direction::Input));
        } else if rng.random_bool(0.8) {
            ports.push(PortDecl::vector(name, Direction::Input, w as i64 - 1, 0));
        } else {
            ports.push(PortDecl::vector(name, Direction::Input, 0, w as i64 - 1));
        }
        left -= w;
    }
    ports
}

/// A random acyclic netlist of generic gates with `1..=max_inputs` input
/// bits and `1..=max_gates` gates. Every gate output nobody reads is an
/// output bit; a few internal nets are exported as well.
pub fn comb_netlist(rng: &mut impl Rng, max_inputs: usize, max_gates: usize) -> Netlist {
    let n_in = rng.random_range(1..=max_inputs.max(1));
    let n_gates = rng.random_range(1..=max_gates.max(1));
    let ports = input_ports(rng, n_in);
    let in_bits: Vec<String> = ports.iter().flat_map(PortDecl::bit_names).collect();

    let mut specs = Vec::with_capacity(n_gates);
    for k in 0..n_gates {
        let kind = if rng.random_bool(0.03) {
            if rng.random_bool(0.5) {
                GateKind::Const0
            } else {
                GateKind::Const1
            }
        } else {
            *COMB.choose(rng).unwrap()
        };
        let pool = in_bits.len() + k;
        let fanin = (0..kind.inputs().len()).map(|_| rng.random_range(0..pool)).collect();
        specs.push(GateSpec { kind, fanin });
    }
    build(rng, "rand_comb", ports, &[], in_bits, specs)
}

/// Like [`comb_netlist`] with a clock, an active-high reset, and flops
/// breaking some of the paths.
pub fn seq_netlist(rng: &mut impl Rng, max_inputs: usize, max_gates: usize) -> Netlist {
    let n_in = rng.random_range(1..=max_inputs.max(1));
    let n_gates = rng.random_range(2..=max_gates.max(2));
    let ports = input_ports(rng, n_in);
    let mut in_bits: Vec<String> = ports.iter().flat_map(PortDecl::bit_names).collect();
    in_bits.push("rst".into());

    let n_ff = rng.random_range(1..=(n_gates / 3).max(1));
    let mut specs = Vec::with_capacity(n_gates);
    // Flop outputs come first in the pool so feedback through them is legal.
    for _ in 0..n_ff {
        specs.push(GateSpec { kind: GateKind::Dff, fanin: Vec::new() });
    }
    for k in n_ff..n_gates {
        let kind = *COMB.choose(rng).unwrap();
        let pool = in_bits.len() + k;
        let fanin = (0..kind.inputs().len()).map(|_| rng.random_range(0..pool)).collect();
        specs.push(GateSpec { kind, fanin });
    }
    let total = in_bits.len() + n_gates;
    let combs: Vec<usize> = (in_bits.len() + n_ff..total).collect();
    for s in specs.iter_mut().take(n_ff) {
        // D from a combinational net, gated by reset so reset clears it.
        s.fanin = vec![*combs.choose(rng).unwrap()];
    }
    let mut extra = vec![PortDecl::scalar("clk", Direction::Input), PortDecl::scalar("rst", Direction::Input)];
    extra[0].role = PortRole::Clock;
    extra[1].role = PortRole::Reset;
    build(rng, "rand_seq", ports, &extra, in_bits, specs)
}

fn build(
    rng: &mut impl Rng,
    name: &str,
    mut ports: Vec<PortDecl>,
    extra: &[PortDecl],
    in_bits: Vec<String>,
    specs: Vec<GateSpec>,
) -> Netlist {
    let base = in_bits.len();
    let mut read = vec![false; base + specs.len()];
    for s in &specs {
        for &f in &s.fanin {
            read[f] = true;
        }
    }
    let mut exported = Vec::new();
    for k in 0..specs.len() {
        if !read[base + k] || rng.random_bool(0.15) {
            exported.push(k);
        }
    }
    if exported.is_empty() {
        exported.push(specs.len() - 1);
    }
    let n_out = exported.len();
    let mut names: Vec<String> = in_bits;
    let mut out_of = vec![None; specs.len()];
    for (j, &k) in exported.iter().enumerate() {
        out_of[k] = Some(j);
    }
    for (k, o) in out_of.iter().enumerate() {
        names.push(match o {
            Some(j) => format!("y[{j}]"),
            None => format!("n{k}"),
        });
    }

    // Reset gating for flops: d = next & !rst.
    let mut gating = Vec::new();
    for p in extra {
        ports.push(p.clone());
    }
    ports.push(PortDecl::vector("y", Direction::Output, n_out as i64 - 1, 0));
    let mut nl = Netlist::new(name);
    for p in ports {
        nl.add_port(p).expect("fresh port names");
    }
    for (k, o) in out_of.iter().enumerate() {
        if o.is_none() {
            nl.add_net(format!("n{k}")).expect("fresh net names");
        }
    }
    let has_reset = nl.reset_port().is_some();
    if has_reset {
        nl.add_net("rst_n").unwrap();
        gating.push(Instance::gate("g_rstn", GateKind::Not, [("A", "rst"), ("Y", "rst_n")]));
    }
    for (k, s) in specs.iter().enumerate() {
        let out = &names[base + k];
        let inst = if s.kind == GateKind::Dff {
            let d = format!("d{k}");
            nl.add_net(d.clone()).unwrap();
            gating.push(Instance::gate(
                format!("g_d{k}"),
                GateKind::And,
                [("A", names[s.fanin[0]].as_str()), ("B", "rst_n"), ("Y", d.as_str())],
            ));
            Instance::gate(format!("g{k}"), GateKind::Dff, [("D", d.as_str()), ("CK", "clk"), ("Q", out.as_str())])
        } else {
            let mut pins: Vec<(&str, &str)> =
                s.kind.inputs().iter().zip(&s.fanin).map(|(p, &f)| (*p, names[f].as_str())).collect();
            pins.push((s.kind.output(), out.as_str()));
            Instance::gate(format!("g{k}"), s.kind, pins)
        };
        nl.add_instance(inst).expect("fresh instance names");
    }
    for g in gating {
        nl.add_instance(g).unwrap();
    }
    nl
}

fn random_expr(rng: &mut impl Rng, vars: &[String], depth: usize) -> BoolExpr {
    if depth == 0 || rng.random_bool(0.3) {
        if rng.random_bool(0.03) {
            return BoolExpr::Const(rng.random_bool(0.5));
        }
        return BoolExpr::var(vars.choose(rng).unwrap().clone());
    }
    match rng.random_range(0..4) {
        0 => BoolExpr::not(random_expr(rng, vars, depth - 1)),
        1 => BoolExpr::and(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)),
        2 => BoolExpr::or(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)),
        _ => BoolExpr::xor(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)),
    }
}

fn pin(name: &str, direction: PinDirection, function: Option<BoolExpr>) -> PinDef {
    PinDef { name: name.into(), direction, function }
}

/// A random library of single-output combinational cells with up to four
/// inputs, plus an occasional flip-flop.
pub fn library(rng: &mut impl Rng) -> CellLibrary {
    let mut cells = IndexMap::new();
    let n = rng.random_range(1..=8);
    for i in 0..n {
        let k = rng.random_range(1..=4);
        let vars: Vec<String> = (0..k).map(|j| format!("I{j}")).collect();
        let mut pins: Vec<PinDef> = vars.iter().map(|v| pin(v, PinDirection::Input, None)).collect();
        pins.push(pin("Z", PinDirection::Output, Some(random_expr(rng, &vars, 3))));
        let name = format!("C{i}X{}", rng.random_range(1..=4));
        // Areas on a 0.05 grid keep the text form exact.
        let area = rng.random_range(1..=400) as f64 * 0.05;
        let area = (area * 100.0).round() / 100.0;
        cells.insert(name.clone(), CellDef { name, area, pins, ff: None });
    }
    if rng.random_bool(0.5) {
        let name = "DFFR".to_string();
        let ff = SeqSpec {
            state_var: "IQ".into(),
            state_var_inv: rng.random_bool(0.5).then(|| "IQN".to_string()),
            next_state: BoolExpr::var("D"),
            clocked_on: "CK".into(),
        };
        let mut pins = vec![
            pin("D", PinDirection::Input, None),
            pin("CK", PinDirection::Input, None),
            pin("Q", PinDirection::Output, Some(BoolExpr::var("IQ"))),
        ];
        if let Some(inv) = &ff.state_var_inv {
            pins.push(pin("QN", PinDirection::Output, Some(BoolExpr::var(inv.clone()))));
        }
        cells.insert(name.clone(), CellDef { name, area: 6.5, pins, ff: Some(ff) });
    }
    CellLibrary { name: format!("rand{}", rng.random_range(0..1000)), cells }
}

/// A random trace over scalar and bit-selected signal names.
pub fn trace(rng: &mut impl Rng, max_signals: usize, max_cycles: usize) -> Trace {
    let n = rng.random_range(1..=max_signals.max(1));
    let signals: Vec<String> =
        (0..n).map(|i| if rng.random_bool(0.5) { format!("s{i}") } else { format!("v{}[{}]", i % 3, i) }).collect();
    let outputs = rng.random_range(0..=n);
    let mut t = Trace::new(signals, outputs);
    for _ in 0..rng.random_range(1..=max_cycles.max(1)) {
        let row = (0..n)
            .map(|_| match rng.random_range(0..5) {
                0 => Logic::X,
                1 | 2 => Logic::Zero,
                _ => Logic::One,
            })
            .collect();
        t.push(row);
    }
    t
}
