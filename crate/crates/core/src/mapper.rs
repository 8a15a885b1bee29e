// SPDX-License-Identifier: Apache-2.0
//! Per-gate, area-minimal technology mapping by permutation-canonical
//! truth-table matching.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::liberty::{canonical_key, permutations, BoolExpr, CellLibrary, TruthTable, MAX_CANONICAL_INPUTS};
use crate::logic::Logic;
use crate::netlist::{GateKind, Instance, InstanceKind, Netlist};

/// One way to realize a function with a cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchEntry {
    pub cell: String,
    /// External input `i` drives cell input `perm[i]`.
    pub perm: Vec<usize>,
    pub area: f64,
    /// The exact function realized under `perm`.
    pub table: TruthTable,
    pub input_pins: Vec<String>,
    pub output_pin: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlopEntry {
    pub cell: String,
    pub area: f64,
    pub d_pin: String,
    pub clock_pin: String,
    pub q_pin: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchIndex {
    by_key: HashMap<TruthTable, Vec<MatchEntry>>,
    pub flops: Vec<FlopEntry>,
    /// `(cell, reason)` for cells left out of the index.
    pub skipped: Vec<(String, String)>,
}

impl MatchIndex {
    /// Entries for a canonical key, cheapest first.
    pub fn entries(&self, key: &TruthTable) -> &[MatchEntry] {
        self.by_key.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The cheapest entry realizing exactly `table`.
    pub fn lookup(&self, table: &TruthTable) -> Option<&MatchEntry> {
        let key = canonical_key(table).ok()?;
        self.entries(&key).iter().find(|e| e.table == *table)
    }

    pub fn cheapest_flop(&self) -> Option<&FlopEntry> {
        self.flops.first()
    }

    pub fn keys(&self) -> impl Iterator<Item = &TruthTable> {
        self.by_key.keys()
    }
}

pub fn build_match_index(library: &CellLibrary) -> MatchIndex {
    let mut by_key: HashMap<TruthTable, Vec<(MatchEntry, usize)>> = HashMap::new();
    let mut flops = Vec::new();
    let mut skipped = Vec::new();
    let mut order = 0usize;
    for cell in library.cells.values() {
        if let Some(ff) = &cell.ff {
            let data: Vec<&str> = cell.input_names().into_iter().filter(|p| *p != ff.clocked_on).collect();
            let q = cell.output_pins().find(|p| p.function.as_ref() == Some(&BoolExpr::var(ff.state_var.clone())));
            match (data.as_slice(), q) {
                ([d], Some(q)) if ff.next_state == BoolExpr::var(*d) => flops.push(FlopEntry {
                    cell: cell.name.clone(),
                    area: cell.area,
                    d_pin: d.to_string(),
                    clock_pin: ff.clocked_on.clone(),
                    q_pin: q.name.clone(),
                }),
                _ => skipped.push((cell.name.clone(), "not a plain D flip-flop".to_string())),
            }
            continue;
        }
        let n = cell.input_pins().count();
        if n > MAX_CANONICAL_INPUTS {
            skipped.push((cell.name.clone(), format!("{n} inputs exceeds {MAX_CANONICAL_INPUTS}")));
            continue;
        }
        let table = match cell.truth_table() {
            Ok(t) => t,
            Err(e) => {
                skipped.push((cell.name.clone(), e.to_string()));
                continue;
            }
        };
        let key = canonical_key(&table).expect("input count checked");
        let list = by_key.entry(key).or_default();
        let mut seen: Vec<TruthTable> = Vec::new();
        for perm in permutations(n) {
            let realized = table.permute(&perm);
            if seen.contains(&realized) {
                continue;
            }
            seen.push(realized.clone());
            let entry = MatchEntry {
                cell: cell.name.clone(),
                perm,
                area: cell.area,
                table: realized,
                input_pins: cell.input_names().iter().map(|p| p.to_string()).collect(),
                output_pin: cell.output().name.clone(),
            };
            list.push((entry, order));
            order += 1;
        }
    }
    let by_key = by_key
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by(|(a, ao), (b, bo)| a.area.total_cmp(&b.area).then_with(|| a.cell.cmp(&b.cell)).then(ao.cmp(bo)));
            (k, v.into_iter().map(|(e, _)| e).collect())
        })
        .collect();
    flops.sort_by(|a: &FlopEntry, b| a.area.total_cmp(&b.area).then_with(|| a.cell.cmp(&b.cell)));
    MatchIndex { by_key, flops, skipped }
}

/// Truth table of a combinational generic gate over [`GateKind::inputs`].
pub fn gate_table(kind: GateKind) -> TruthTable {
    let n = kind.inputs().len();
    let bits = (0..1usize << n)
        .map(|i| {
            let ins: Vec<Logic> = (0..n).map(|k| Logic::from_bool(i >> k & 1 == 1)).collect();
            kind.eval(&ins) == Logic::One
        })
        .collect();
    TruthTable::new(n, bits).expect("gate arity is small")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("no cell implements {gate} (instance `{instance}`, function {table})")]
    NoMatch { instance: String, gate: GateKind, table: String },
    #[error("no plain D flip-flop cell for instance `{0}`")]
    NoFlop(String),
    #[error("instance `{0}` is already a library cell")]
    NotGeneric(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CellTally {
    pub count: usize,
    pub area: f64,
}

/// Per-cell instance counts and areas.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MappingReport {
    pub cells: BTreeMap<String, CellTally>,
    pub total_instances: usize,
    pub total_area: f64,
}

impl MappingReport {
    pub fn count(&self, cell: &str) -> usize {
        self.cells.get(cell).map_or(0, |t| t.count)
    }

    fn add(&mut self, cell: &str, area: f64) {
        let t = self.cells.entry(cell.to_string()).or_default();
        t.count += 1;
        t.area += area;
        self.total_instances += 1;
        self.total_area += area;
    }
}

/// Tally the cells of an already-mapped netlist. Generic gates count with
/// zero area.
pub fn tally(netlist: &Netlist, library: &CellLibrary) -> MappingReport {
    let mut r = MappingReport::default();
    for inst in &netlist.instances {
        let area = match &inst.kind {
            InstanceKind::Cell(c) => library.cell(c).map_or(0.0, |d| d.area),
            InstanceKind::Gate(_) => 0.0,
        };
        match &inst.kind {
            InstanceKind::Cell(c) => r.add(c, area),
            InstanceKind::Gate(g) => r.add(&g.to_string(), area),
        }
    }
    r
}

/// Replace every generic gate with its cheapest matching cell. Constant
/// gates without a matching tie cell stay generic.
pub fn map_netlist(generic: &Netlist, index: &MatchIndex) -> Result<(Netlist, MappingReport), MapError> {
    let mut out = generic.clone();
    out.instances.clear();
    let mut report = MappingReport::default();
    for inst in &generic.instances {
        let InstanceKind::Gate(g) = inst.kind else {
            return Err(MapError::NotGeneric(inst.name.clone()));
        };
        if g == GateKind::Dff {
            let f = index.cheapest_flop().ok_or_else(|| MapError::NoFlop(inst.name.clone()))?;
            let mut pins = indexmap::IndexMap::new();
            pins.insert(f.d_pin.clone(), inst.pins["D"].clone());
            pins.insert(f.clock_pin.clone(), inst.pins["CK"].clone());
            pins.insert(f.q_pin.clone(), inst.pins["Q"].clone());
            out.instances.push(Instance { name: inst.name.clone(), kind: InstanceKind::Cell(f.cell.clone()), pins });
            report.add(&f.cell, f.area);
            continue;
        }
        let table = gate_table(g);
        let Some(m) = index.lookup(&table) else {
            if matches!(g, GateKind::Const0 | GateKind::Const1) {
                out.instances.push(inst.clone());
                report.add(&g.to_string(), 0.0);
                continue;
            }
            return Err(MapError::NoMatch { instance: inst.name.clone(), gate: g, table: table.to_string() });
        };
        out.instances.push(cell_instance(inst, g, m));
        report.add(&m.cell, m.area);
    }
    Ok((out, report))
}

fn cell_instance(inst: &Instance, g: GateKind, m: &MatchEntry) -> Instance {
    let cell_inputs = &m.input_pins;
    let mut pins = indexmap::IndexMap::new();
    for (i, gate_pin) in g.inputs().iter().enumerate() {
        pins.insert(cell_inputs[m.perm[i]].clone(), inst.pins[*gate_pin].clone());
    }
    pins.insert(m.output_pin.clone(), inst.pins[g.output()].clone());
    Instance { name: inst.name.clone(), kind: InstanceKind::Cell(m.cell.clone()), pins }
}
