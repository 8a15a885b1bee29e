// SPDX-License-Identifier: Apache-2.0
//! Library tampering (function and area relabeling of a cell) and the
//! scanner that looks for it.

use serde::{Deserialize, Serialize};

use crate::liberty::{canonical_key, BoolExpr, CellDef, CellLibrary, TruthTable};
use crate::netlist::{InstanceKind, Netlist};

/// Default undercut applied to the donor class's minimum area.
pub const DEFAULT_EPSILON: f64 = 0.1;
/// Relative area difference from the reference that raises a finding.
pub const REFERENCE_AREA_TOLERANCE: f64 = 0.2;
/// Without a reference, a cell this much below all same-function peers is anomalous.
pub const PEER_AREA_MARGIN: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Donor {
    /// Take the function of another cell, pins renamed positionally.
    Cell(String),
    /// A function over the target's own input pin names.
    Function(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaPolicy {
    Explicit(f64),
    /// Minimum area of the donor's function class times `1 - epsilon`.
    Auto {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    /// Leave the area untouched.
    Keep,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

impl Default for AreaPolicy {
    fn default() -> Self {
        AreaPolicy::Auto { epsilon: DEFAULT_EPSILON }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionSpec {
    pub target: String,
    pub donor: Donor,
    #[serde(default)]
    pub area: AreaPolicy,
}

impl InjectionSpec {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Substitution {
    pub instance: String,
    pub old_cell: String,
    pub new_cell: String,
    /// Tampered-library area of the new cell minus that of the old one.
    pub area_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectionRecord {
    pub target: String,
    pub donor: String,
    pub old_function: String,
    pub new_function: String,
    pub old_area: f64,
    pub new_area: f64,
    pub epsilon: Option<f64>,
    pub donor_min_area: Option<f64>,
    pub substitutions: Vec<Substitution>,
}

impl InjectionRecord {
    /// Bound on the total area change of the substitutions.
    pub fn area_delta_bound(&self) -> f64 {
        let per_cell = self.substitutions.iter().map(|s| s.area_delta.abs()).fold(0.0, f64::max);
        self.substitutions.len() as f64 * per_cell
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InjectError {
    #[error("unknown target cell `{0}`")]
    UnknownTarget(String),
    #[error("unknown donor cell `{0}`")]
    UnknownDonor(String),
    #[error("target `{0}` is sequential")]
    SequentialTarget(String),
    #[error("donor has {donor} inputs, target has {target}")]
    ArityMismatch { donor: usize, target: usize },
    #[error("donor function equals the target function")]
    SameFunction,
    #[error("no cell implements the donor function")]
    EmptyDonorClass,
    #[error("bad donor function: {0}")]
    BadFunction(String),
    #[error("area must be positive and finite, got {0}")]
    BadArea(f64),
    #[error("no instance named `{0}`")]
    UnknownInstance(String),
    #[error("instance `{instance}` uses `{cell}`, which does not implement the donor function positionally")]
    NotDonorInstance { instance: String, cell: String },
}

fn comb_table(cell: &CellDef) -> Option<TruthTable> {
    if cell.is_sequential() {
        return None;
    }
    cell.truth_table().ok()
}

/// Tamper with a library for mapping: the target cell gets the donor's
/// function and, by default, an area just below the cheapest donor-class cell.
pub fn inject(library: &CellLibrary, spec: &InjectionSpec) -> Result<(CellLibrary, InjectionRecord), InjectError> {
    let target = library.cell(&spec.target).ok_or_else(|| InjectError::UnknownTarget(spec.target.clone()))?;
    if target.is_sequential() {
        return Err(InjectError::SequentialTarget(spec.target.clone()));
    }
    let target_inputs: Vec<String> = target.input_names().into_iter().map(String::from).collect();
    let (new_fn, donor_name) = match &spec.donor {
        Donor::Cell(name) => {
            let d = library.cell(name).ok_or_else(|| InjectError::UnknownDonor(name.clone()))?;
            if d.is_sequential() {
                return Err(InjectError::UnknownDonor(name.clone()));
            }
            let donor_inputs = d.input_names();
            if donor_inputs.len() != target_inputs.len() {
                return Err(InjectError::ArityMismatch { donor: donor_inputs.len(), target: target_inputs.len() });
            }
            let f = d.output().function.as_ref().expect("output pins carry a function");
            let renamed = f.rename(&|v| donor_inputs.iter().position(|p| *p == v).map(|i| target_inputs[i].clone()));
            (renamed, name.clone())
        }
        Donor::Function(text) => {
            let f = BoolExpr::parse(text).map_err(|e| InjectError::BadFunction(e.to_string()))?;
            if let Some(v) = f.variables().into_iter().find(|v| !target_inputs.contains(v)) {
                return Err(InjectError::BadFunction(format!("`{v}` is not an input of {}", spec.target)));
            }
            (f, text.clone())
        }
    };
    let pins: Vec<&str> = target_inputs.iter().map(String::as_str).collect();
    let new_table = crate::liberty::truth_table(&new_fn, &pins).map_err(|e| InjectError::BadFunction(e.to_string()))?;
    let old_table = target.truth_table().map_err(|e| InjectError::BadFunction(e.to_string()))?;
    if new_table == old_table {
        return Err(InjectError::SameFunction);
    }
    let key = canonical_key(&new_table).map_err(|e| InjectError::BadFunction(e.to_string()))?;
    let donor_min = library
        .cells
        .values()
        .filter(|c| c.name != spec.target)
        .filter(|c| comb_table(c).and_then(|t| canonical_key(&t).ok()).is_some_and(|k| k == key))
        .map(|c| c.area)
        .fold(None, |m: Option<f64>, a| Some(m.map_or(a, |m| m.min(a))));
    let (new_area, epsilon) = match spec.area {
        AreaPolicy::Explicit(a) => (a, None),
        AreaPolicy::Keep => (target.area, None),
        AreaPolicy::Auto { epsilon } => {
            let m = donor_min.ok_or(InjectError::EmptyDonorClass)?;
            (m * (1.0 - epsilon), Some(epsilon))
        }
    };
    if !(new_area.is_finite() && new_area > 0.0) {
        return Err(InjectError::BadArea(new_area));
    }
    let old_function = target.output().function.as_ref().expect("output pins carry a function").to_string();
    let mut out = library.clone();
    let cell = out.cells.get_mut(&spec.target).expect("target exists");
    let out_pin = cell.pins.iter_mut().find(|p| p.function.is_some()).expect("output pins carry a function");
    out_pin.function = Some(new_fn.clone());
    let old_area = cell.area;
    cell.area = new_area;
    let record = InjectionRecord {
        target: spec.target.clone(),
        donor: donor_name,
        old_function,
        new_function: new_fn.to_string(),
        old_area,
        new_area,
        epsilon,
        donor_min_area: donor_min,
        substitutions: Vec::new(),
    };
    Ok((out, record))
}

/// Targeted variant: tamper the library, then re-point only the named
/// instances of a mapped netlist at the target cell. Each named instance
/// must use a cell whose function equals the tampered target's, pin by pin.
pub fn inject_targeted(
    library: &CellLibrary,
    spec: &InjectionSpec,
    netlist: &Netlist,
    instances: &[String],
) -> Result<(CellLibrary, Netlist, InjectionRecord), InjectError> {
    let (lib, mut record) = inject(library, spec)?;
    let target = lib.cell(&spec.target).expect("target exists");
    let target_table = target.truth_table().expect("checked by inject");
    let target_inputs = target.input_names();
    let target_out = target.output().name.clone();
    let mut out = netlist.clone();
    for name in instances {
        let inst = out
            .instances
            .iter_mut()
            .find(|i| &i.name == name)
            .ok_or_else(|| InjectError::UnknownInstance(name.clone()))?;
        let cell_name = match &inst.kind {
            InstanceKind::Cell(c) => c.clone(),
            InstanceKind::Gate(g) => g.to_string(),
        };
        let not_donor = || InjectError::NotDonorInstance { instance: name.clone(), cell: cell_name.clone() };
        let old = lib.cell(&cell_name).ok_or_else(not_donor)?;
        if comb_table(old).as_ref() != Some(&target_table) {
            return Err(not_donor());
        }
        let mut pins = indexmap::IndexMap::new();
        for (i, p) in old.input_names().into_iter().enumerate() {
            if let Some(net) = inst.pins.get(p) {
                pins.insert(target_inputs[i].to_string(), net.clone());
            }
        }
        if let Some(net) = inst.pins.get(&old.output().name) {
            pins.insert(target_out.clone(), net.clone());
        }
        inst.pins = pins;
        inst.kind = InstanceKind::Cell(spec.target.clone());
        record.substitutions.push(Substitution {
            instance: name.clone(),
            old_cell: cell_name.clone(),
            new_cell: spec.target.clone(),
            area_delta: target.area - old.area,
        });
    }
    Ok((lib, out, record))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Discrepancy {
    FunctionMismatch { suspect_table: String, reference_table: String },
    NameFunction { stem: String, function_class: String },
    AreaAnomaly { area: f64, compared_area: f64, compared_with: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanFinding {
    pub cell: String,
    #[serde(flatten)]
    pub discrepancy: Discrepancy,
}

const STEMS: [&str; 11] = ["XNOR", "XOR", "NAND", "NOR", "AND", "OR", "INV", "BUF", "AOI", "OAI", "MUX"];

fn table_of(n: usize, f: impl Fn(&[bool]) -> bool) -> TruthTable {
    let bits = (0..1usize << n).map(|i| f(&(0..n).map(|k| i >> k & 1 == 1).collect::<Vec<_>>())).collect();
    TruthTable::new(n, bits).expect("size matches")
}

/// Group sizes from the digits after an AOI/OAI stem (`AOI21` → [2, 1]).
fn groups(digits: &str, n: usize) -> Option<Vec<usize>> {
    let g: Vec<usize> = digits.chars().map_while(|c| c.to_digit(10)).map(|d| d as usize).collect();
    (g.len() >= 2 && g.iter().sum::<usize>() == n && g.iter().all(|&x| x > 0)).then_some(g)
}

fn and_or(v: &[bool], g: &[usize], inner_and: bool) -> bool {
    let mut at = 0;
    let mut acc = !inner_and;
    for &size in g {
        let part = &v[at..at + size];
        at += size;
        let term = if inner_and { part.iter().all(|&b| b) } else { part.iter().any(|&b| b) };
        acc = if inner_and { acc || term } else { acc && term };
    }
    acc
}

/// The function a name stem promises for `n` inputs.
fn stem_table(stem: &str, rest: &str, n: usize) -> Option<TruthTable> {
    Some(match (stem, n) {
        ("AND", 2..) => table_of(n, |v| v.iter().all(|&b| b)),
        ("NAND", 2..) => table_of(n, |v| !v.iter().all(|&b| b)),
        ("OR", 2..) => table_of(n, |v| v.iter().any(|&b| b)),
        ("NOR", 2..) => table_of(n, |v| !v.iter().any(|&b| b)),
        ("XOR", 2..) => table_of(n, |v| v.iter().filter(|&&b| b).count() % 2 == 1),
        ("XNOR", 2..) => table_of(n, |v| v.iter().filter(|&&b| b).count() % 2 == 0),
        ("INV", 1) => table_of(1, |v| !v[0]),
        ("BUF", 1) => table_of(1, |v| v[0]),
        ("MUX", 3) => table_of(3, |v| if v[2] { v[1] } else { v[0] }),
        ("AOI", _) => {
            let g = groups(rest, n)?;
            table_of(n, |v| !and_or(v, &g, true))
        }
        ("OAI", _) => {
            let g = groups(rest, n)?;
            table_of(n, |v| !and_or(v, &g, false))
        }
        _ => return None,
    })
}

/// Name of the simple function class a table belongs to, if any.
fn function_class(table: &TruthTable) -> String {
    let key = canonical_key(table).ok();
    let n = table.inputs();
    for stem in STEMS {
        let rests: &[&str] = match (stem, n) {
            ("AOI" | "OAI", 3) => &["21"],
            ("AOI" | "OAI", 4) => &["22", "211"],
            _ => &[""],
        };
        for rest in rests {
            if let Some(t) = stem_table(stem, rest, n) {
                if canonical_key(&t).ok() == key {
                    return format!("{stem}{rest}");
                }
            }
        }
    }
    if table.bits().iter().all(|&b| !b) {
        return "CONST0".into();
    }
    if table.bits().iter().all(|&b| b) {
        return "CONST1".into();
    }
    format!("table:{table}")
}

/// Trailing drive-strength tag such as `X2` or `_X4`, without separator.
fn drive_strength(name: &str) -> Option<&str> {
    let i = name.rfind(['X', 'x'])?;
    let digits = &name[i + 1..];
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then_some(&name[i..])
}

fn name_stem(name: &str) -> Option<(&'static str, &str)> {
    let upper = name.to_ascii_uppercase();
    STEMS.iter().find(|s| upper.starts_with(*s)).map(|s| (*s, &name[s.len()..]))
}

/// Look for tampering. With a reference, same-named cells are compared
/// directly; otherwise names are checked against functions and areas
/// against same-function peers of the same drive strength.
pub fn scan(suspect: &CellLibrary, reference: Option<&CellLibrary>) -> Vec<ScanFinding> {
    let mut out = Vec::new();
    match reference {
        Some(r) => {
            for c in suspect.cells.values() {
                let Some(rc) = r.cell(&c.name) else { continue };
                match (comb_table(c), comb_table(rc)) {
                    (Some(s), Some(t)) => {
                        let same = s.inputs() == t.inputs() && canonical_key(&s).ok() == canonical_key(&t).ok();
                        if !same {
                            out.push(ScanFinding {
                                cell: c.name.clone(),
                                discrepancy: Discrepancy::FunctionMismatch {
                                    suspect_table: s.to_string(),
                                    reference_table: t.to_string(),
                                },
                            });
                        }
                    }
                    (None, None) => {
                        let (a, b) = (c.ff.as_ref(), rc.ff.as_ref());
                        let differs = a.map(|f| f.next_state.to_string()) != b.map(|f| f.next_state.to_string());
                        if differs {
                            out.push(ScanFinding {
                                cell: c.name.clone(),
                                discrepancy: Discrepancy::FunctionMismatch {
                                    suspect_table: a.map(|f| f.next_state.to_string()).unwrap_or_default(),
                                    reference_table: b.map(|f| f.next_state.to_string()).unwrap_or_default(),
                                },
                            });
                        }
                    }
                    (s, t) => out.push(ScanFinding {
                        cell: c.name.clone(),
                        discrepancy: Discrepancy::FunctionMismatch {
                            suspect_table: s.map_or("sequential".into(), |t| t.to_string()),
                            reference_table: t.map_or("sequential".into(), |t| t.to_string()),
                        },
                    }),
                }
                if rc.area > 0.0 && (c.area - rc.area).abs() / rc.area > REFERENCE_AREA_TOLERANCE {
                    out.push(ScanFinding {
                        cell: c.name.clone(),
                        discrepancy: Discrepancy::AreaAnomaly {
                            area: c.area,
                            compared_area: rc.area,
                            compared_with: format!("reference {}", rc.name),
                        },
                    });
                }
            }
        }
        None => {
            let tables: Vec<(&CellDef, TruthTable, Option<TruthTable>)> = suspect
                .cells
                .values()
                .filter_map(|c| comb_table(c).map(|t| (c, canonical_key(&t).ok(), t)))
                .map(|(c, k, t)| (c, t, k))
                .collect();
            for (c, t, key) in &tables {
                if let Some((stem, rest)) = name_stem(&c.name) {
                    let expected = stem_table(stem, rest, t.inputs());
                    let matches = expected.is_some_and(|e| canonical_key(&e).ok() == *key);
                    if !matches {
                        out.push(ScanFinding {
                            cell: c.name.clone(),
                            discrepancy: Discrepancy::NameFunction {
                                stem: stem.to_string(),
                                function_class: function_class(t),
                            },
                        });
                    }
                }
                let cheapest_peer = tables
                    .iter()
                    .filter(|(p, _, k)| p.name != c.name && k.is_some() && k == key)
                    .filter(|(p, _, _)| drive_strength(&p.name) == drive_strength(&c.name))
                    .min_by(|a, b| a.0.area.total_cmp(&b.0.area));
                if let Some((p, _, _)) = cheapest_peer {
                    if c.area < p.area * (1.0 - PEER_AREA_MARGIN) {
                        out.push(ScanFinding {
                            cell: c.name.clone(),
                            discrepancy: Discrepancy::AreaAnomaly {
                                area: c.area,
                                compared_area: p.area,
                                compared_with: p.name.clone(),
                            },
                        });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liberty::parse_liberty;
    use crate::mapper::build_match_index;

    const LIB: &str = r#"library(t) {
      cell(AND2X1){area:3.2; pin(A){direction:input;} pin(B){direction:input;} pin(Y){direction:output; function:"A*B";}}
      cell(OR2X1){area:2.35; pin(A){direction:input;} pin(B){direction:input;} pin(Y){direction:output; function:"A+B";}}
      cell(OR2X2){area:4.7; pin(A){direction:input;} pin(B){direction:input;} pin(Y){direction:output; function:"A+B";}}
      cell(INVX1){area:1.4; pin(A){direction:input;} pin(Y){direction:output; function:"!A";}}
      cell(AOI21X1){area:3.0; pin(A0){direction:input;} pin(A1){direction:input;} pin(B0){direction:input;} pin(Y){direction:output; function:"!(A0*A1+B0)";}}
      cell(MUX2X1){area:4.0; pin(A){direction:input;} pin(B){direction:input;} pin(S){direction:input;} pin(Y){direction:output; function:"(A*!S)+(B*S)";}}
    }"#;

    fn spec() -> InjectionSpec {
        InjectionSpec { target: "AND2X1".into(), donor: Donor::Cell("OR2X1".into()), area: AreaPolicy::default() }
    }

    #[test]
    fn auto_area_undercuts_donor_class() {
        let lib = parse_liberty(LIB).unwrap();
        let (t, rec) = inject(&lib, &spec()).unwrap();
        // 2.35 * (1 - 0.1)
        assert!((rec.new_area - 2.115).abs() < 1e-9);
        assert_eq!(rec.donor_min_area, Some(2.35));
        assert_eq!(rec.old_function, "A&B");
        assert_eq!(t.cell("AND2X1").unwrap().truth_table().unwrap().to_string(), "0111");
        let idx = build_match_index(&t);
        let or = TruthTable::from_bit_str(2, "0111").unwrap();
        assert_eq!(idx.lookup(&or).unwrap().cell, "AND2X1");
    }

    #[test]
    fn injection_preconditions() {
        let lib = parse_liberty(LIB).unwrap();
        let same = InjectionSpec { donor: Donor::Function("B*A".into()), ..spec() };
        assert_eq!(inject(&lib, &same).unwrap_err(), InjectError::SameFunction);
        let arity = InjectionSpec { donor: Donor::Cell("INVX1".into()), ..spec() };
        assert!(matches!(inject(&lib, &arity), Err(InjectError::ArityMismatch { donor: 1, target: 2 })));
        let nobody = InjectionSpec { donor: Donor::Function("A*!B".into()), ..spec() };
        assert_eq!(inject(&lib, &nobody).unwrap_err(), InjectError::EmptyDonorClass);
        let unknown = InjectionSpec { target: "NAND9".into(), ..spec() };
        assert!(matches!(inject(&lib, &unknown), Err(InjectError::UnknownTarget(_))));
    }

    #[test]
    fn scan_with_reference() {
        let lib = parse_liberty(LIB).unwrap();
        assert!(scan(&lib, Some(&lib)).is_empty());
        let (t, _) = inject(&lib, &spec()).unwrap();
        let f = scan(&t, Some(&lib));
        assert!(f.iter().all(|f| f.cell == "AND2X1"));
        assert!(f.iter().any(|f| matches!(&f.discrepancy,
            Discrepancy::FunctionMismatch { suspect_table, reference_table } if suspect_table == "0111" && reference_table == "0001")));
    }

    #[test]
    fn scan_without_reference() {
        let lib = parse_liberty(LIB).unwrap();
        assert!(scan(&lib, None).is_empty());
        let (t, _) = inject(&lib, &spec()).unwrap();
        let f = scan(&t, None);
        assert_eq!(
            f,
            [ScanFinding {
                cell: "AND2X1".into(),
                discrepancy: Discrepancy::NameFunction { stem: "AND".into(), function_class: "OR".into() }
            }]
        );
        let cheap = InjectionSpec { area: AreaPolicy::Explicit(1.0), ..spec() };
        let (t, _) = inject(&lib, &cheap).unwrap();
        assert!(scan(&t, None).iter().any(|f| matches!(f.discrepancy, Discrepancy::AreaAnomaly { .. })));
    }

    #[test]
    fn targeted_substitution() {
        let lib = parse_liberty(LIB).unwrap();
        let nl = crate::netlist::parse_structural_verilog(
            "module m(input a, input b, output y, output z); OR2X1 u1(.A(a), .B(b), .Y(y)); OR2X1 u2(.A(b), .B(a), .Y(z)); endmodule",
        )
        .unwrap();
        let s = InjectionSpec { area: AreaPolicy::Keep, ..spec() };
        let (_, out, rec) = inject_targeted(&lib, &s, &nl, &["u1".into()]).unwrap();
        assert_eq!(out.instances.len(), 2);
        assert_eq!(out.instances[0].kind, InstanceKind::Cell("AND2X1".into()));
        assert_eq!(out.instances[1].kind, InstanceKind::Cell("OR2X1".into()));
        assert_eq!(rec.substitutions.len(), 1);
        assert!((rec.area_delta_bound() - (3.2 - 2.35)).abs() < 1e-9);
        assert!(inject_targeted(&lib, &s, &nl, &["nope".into()]).is_err());
    }
}
