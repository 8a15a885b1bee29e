// SPDX-License-Identifier: Apache-2.0
//! Liberty (`.lib`) subset: cell functions, pin directions, areas, and
//! flip-flop groups.
//!
//! Timing, power, and every other group or attribute outside that set are
//! skipped. Cells using constructs the model cannot represent (latches,
//! statetables, buses, multi-output combinational logic, asynchronous
//! clear/preset) are dropped and reported through [`ParsedLibrary::warnings`].

mod expr;
mod syntax;
mod truth;

use std::fmt::Write;

use indexmap::IndexMap;
use serde::Serialize;

pub use expr::{BoolExpr, ExprError, Program};
pub use truth::{
    canonical_key, canonical_key_bits, canonical_with_perm, permutations, truth_table, TruthError, TruthTable,
    MAX_CANONICAL_INPUTS, MAX_TABLE_INPUTS,
};

use crate::logic::Logic;
use syntax::Stmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PinDirection {
    Input,
    Output,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PinDef {
    pub name: String,
    pub direction: PinDirection,
    pub function: Option<BoolExpr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeqSpec {
    pub state_var: String,
    /// Second `ff` argument (inverted state), if named.
    pub state_var_inv: Option<String>,
    pub next_state: BoolExpr,
    pub clocked_on: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellDef {
    pub name: String,
    pub area: f64,
    pub pins: Vec<PinDef>,
    pub ff: Option<SeqSpec>,
}

impl CellDef {
    pub fn input_pins(&self) -> impl Iterator<Item = &PinDef> {
        self.pins.iter().filter(|p| p.direction == PinDirection::Input)
    }

    pub fn output_pins(&self) -> impl Iterator<Item = &PinDef> {
        self.pins.iter().filter(|p| p.direction == PinDirection::Output)
    }

    pub fn input_names(&self) -> Vec<&str> {
        self.input_pins().map(|p| p.name.as_str()).collect()
    }

    pub fn pin(&self, name: &str) -> Option<&PinDef> {
        self.pins.iter().find(|p| p.name == name)
    }

    pub fn is_sequential(&self) -> bool {
        self.ff.is_some()
    }

    /// The single output of a combinational cell.
    pub fn output(&self) -> &PinDef {
        self.output_pins().next().expect("cells have at least one output")
    }

    /// Truth table of a combinational cell over its input pins in declaration order.
    pub fn truth_table(&self) -> Result<TruthTable, TruthError> {
        let f = self.output().function.as_ref().expect("output pins carry a function");
        truth_table(f, &self.input_names())
    }

    /// Three-valued evaluation of the combinational output.
    pub fn eval(&self, assignment: &dyn Fn(&str) -> Option<Logic>) -> Result<Logic, ExprError> {
        eval_function(self.output().function.as_ref().expect("output pins carry a function"), assignment)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellLibrary {
    pub name: String,
    pub cells: IndexMap<String, CellDef>,
}

impl CellLibrary {
    pub fn cell(&self, name: &str) -> Option<&CellDef> {
        self.cells.get(name)
    }
}

/// Kleene evaluation of a cell function.
pub fn eval_function(expr: &BoolExpr, assignment: &dyn Fn(&str) -> Option<Logic>) -> Result<Logic, ExprError> {
    expr.eval(assignment)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LibertyError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("cell `{cell}` pin `{pin}`: function references undeclared pin `{ident}`")]
    UndeclaredPin { cell: String, pin: String, ident: String },
    #[error("cell `{cell}` pin `{pin}`: {source}")]
    BadFunction { cell: String, pin: String, source: ExprError },
    #[error("cell `{0}` has no area")]
    MissingArea(String),
    #[error("cell `{cell}` has invalid area `{value}`")]
    BadArea { cell: String, value: String },
    #[error("cell `{0}` has no output pins")]
    NoOutputs(String),
    #[error("cell `{cell}` output `{pin}` has no function")]
    MissingFunction { cell: String, pin: String },
    #[error("duplicate cell `{0}`")]
    DuplicateCell(String),
    #[error("duplicate pin `{pin}` in cell `{cell}`")]
    DuplicatePin { cell: String, pin: String },
    #[error("expected a top-level `library` group")]
    NotALibrary,
    #[error("library contains no usable cells")]
    EmptyLibrary,
}

/// A parsed library together with the cells that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLibrary {
    pub library: CellLibrary,
    /// `(cell, reason)` for every dropped cell.
    pub warnings: Vec<(String, String)>,
}

pub fn parse_liberty(text: &str) -> Result<CellLibrary, LibertyError> {
    parse_liberty_with_warnings(text).map(|p| p.library)
}

pub fn parse_liberty_with_warnings(text: &str) -> Result<ParsedLibrary, LibertyError> {
    let Stmt::Group { name, args, body, .. } = syntax::parse(text)? else {
        return Err(LibertyError::NotALibrary);
    };
    if name != "library" {
        return Err(LibertyError::NotALibrary);
    }
    let mut lib = CellLibrary { name: args.first().cloned().unwrap_or_default(), cells: IndexMap::new() };
    let mut warnings = Vec::new();
    for stmt in &body {
        let Stmt::Group { name, args, body, .. } = stmt else { continue };
        if name != "cell" {
            continue;
        }
        let cell_name = args.first().cloned().unwrap_or_default();
        match parse_cell(&cell_name, body)? {
            CellOutcome::Cell(def) => {
                if lib.cells.insert(cell_name.clone(), def).is_some() {
                    return Err(LibertyError::DuplicateCell(cell_name));
                }
            }
            CellOutcome::Skip(reason) => {
                log::warn!("skipping cell {cell_name}: {reason}");
                warnings.push((cell_name, reason));
            }
        }
    }
    if lib.cells.is_empty() {
        return Err(LibertyError::EmptyLibrary);
    }
    Ok(ParsedLibrary { library: lib, warnings })
}

enum CellOutcome {
    Cell(CellDef),
    Skip(String),
}

fn unquote(s: &str) -> &str {
    s.trim().trim_matches('"').trim()
}

fn parse_cell(cell: &str, body: &[Stmt]) -> Result<CellOutcome, LibertyError> {
    let mut area = None;
    let mut pins: Vec<(PinDef, Option<String>)> = Vec::new();
    let mut ff = None;
    for stmt in body {
        match stmt {
            Stmt::Simple { name, value, .. } if name == "area" => {
                let v: f64 = unquote(value)
                    .parse()
                    .map_err(|_| LibertyError::BadArea { cell: cell.into(), value: value.clone() })?;
                if !(v.is_finite() && v >= 0.0) {
                    return Err(LibertyError::BadArea { cell: cell.into(), value: value.clone() });
                }
                area = Some(v);
            }
            Stmt::Group { name, args, body, .. } if name == "pin" => {
                for pin_name in args {
                    let mut direction = None;
                    let mut function = None;
                    for s in body {
                        if let Stmt::Simple { name, value, .. } = s {
                            match name.as_str() {
                                "direction" => direction = Some(unquote(value).to_string()),
                                "function" => function = Some(unquote(value).to_string()),
                                _ => {}
                            }
                        }
                    }
                    let direction = match direction.as_deref() {
                        Some("input") => PinDirection::Input,
                        Some("output") => PinDirection::Output,
                        Some(other) => return Ok(CellOutcome::Skip(format!("pin {pin_name} has direction {other}"))),
                        None => return Ok(CellOutcome::Skip(format!("pin {pin_name} has no direction"))),
                    };
                    if pins.iter().any(|(p, _)| p.name == *pin_name) {
                        return Err(LibertyError::DuplicatePin { cell: cell.into(), pin: pin_name.clone() });
                    }
                    pins.push((PinDef { name: pin_name.clone(), direction, function: None }, function));
                }
            }
            Stmt::Group { name, args, body, .. } if name == "ff" => {
                if ff.is_some() {
                    return Ok(CellOutcome::Skip("multiple ff groups".into()));
                }
                ff = Some((args.clone(), body.clone()));
            }
            Stmt::Group { name, .. }
                if matches!(name.as_str(), "latch" | "statetable" | "bus" | "bundle" | "ff_bank" | "latch_bank") =>
            {
                return Ok(CellOutcome::Skip(format!("unsupported group {name}")));
            }
            _ => {}
        }
    }

    if pins.is_empty() {
        return Ok(CellOutcome::Skip("no pins".into()));
    }
    let area = area.ok_or_else(|| LibertyError::MissingArea(cell.into()))?;
    let inputs: Vec<String> =
        pins.iter().filter(|(p, _)| p.direction == PinDirection::Input).map(|(p, _)| p.name.clone()).collect();

    let seq = match ff {
        None => None,
        Some((args, body)) => {
            let state_var = args.first().cloned().unwrap_or_else(|| "IQ".into());
            let state_var_inv = args.get(1).cloned();
            let mut next_state = None;
            let mut clocked_on = None;
            for s in &body {
                if let Stmt::Simple { name, value, .. } = s {
                    match name.as_str() {
                        "next_state" => next_state = Some(unquote(value).to_string()),
                        "clocked_on" => clocked_on = Some(unquote(value).to_string()),
                        "clear" | "preset" | "clear_preset_var1" | "clear_preset_var2" => {
                            return Ok(CellOutcome::Skip(format!("asynchronous {name}")));
                        }
                        _ => {}
                    }
                }
            }
            let (Some(next_text), Some(clk)) = (next_state, clocked_on) else {
                return Ok(CellOutcome::Skip("ff group without next_state/clocked_on".into()));
            };
            if !inputs.contains(&clk) {
                return Ok(CellOutcome::Skip(format!("clocked_on `{clk}` is not a single input pin")));
            }
            let next = BoolExpr::parse(&next_text).map_err(|source| LibertyError::BadFunction {
                cell: cell.into(),
                pin: "next_state".into(),
                source,
            })?;
            for v in next.variables() {
                if !inputs.contains(&v) {
                    return Err(LibertyError::UndeclaredPin { cell: cell.into(), pin: "next_state".into(), ident: v });
                }
            }
            Some(SeqSpec { state_var, state_var_inv, next_state: next, clocked_on: clk })
        }
    };

    let mut out_pins = Vec::with_capacity(pins.len());
    let mut outputs = 0usize;
    for (mut pin, function) in pins {
        if pin.direction == PinDirection::Output {
            outputs += 1;
            let text =
                function.ok_or_else(|| LibertyError::MissingFunction { cell: cell.into(), pin: pin.name.clone() })?;
            let expr = BoolExpr::parse(&text).map_err(|source| LibertyError::BadFunction {
                cell: cell.into(),
                pin: pin.name.clone(),
                source,
            })?;
            for v in expr.variables() {
                let is_state = seq.as_ref().is_some_and(|s| v == s.state_var || s.state_var_inv.as_ref() == Some(&v));
                if is_state {
                    continue;
                }
                if seq.is_some() && inputs.contains(&v) {
                    return Ok(CellOutcome::Skip(format!("sequential output {} depends on input {v}", pin.name)));
                }
                if !inputs.contains(&v) {
                    return Err(LibertyError::UndeclaredPin { cell: cell.into(), pin: pin.name.clone(), ident: v });
                }
            }
            pin.function = Some(expr);
        }
        out_pins.push(pin);
    }
    if outputs == 0 {
        return Err(LibertyError::NoOutputs(cell.into()));
    }
    if seq.is_none() && outputs > 1 {
        return Ok(CellOutcome::Skip("multi-output combinational cell".into()));
    }
    if let Some(s) = &seq {
        let refs_state = out_pins
            .iter()
            .filter_map(|p| p.function.as_ref())
            .filter(|f| f.variables().iter().any(|v| *v == s.state_var || s.state_var_inv.as_ref() == Some(v)))
            .count();
        if refs_state == 0 {
            return Ok(CellOutcome::Skip("no output reads the flip-flop state".into()));
        }
    }
    Ok(CellOutcome::Cell(CellDef { name: cell.into(), area, pins: out_pins, ff: seq }))
}

fn quote_name(name: &str) -> String {
    if name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        name.to_string()
    } else {
        format!("\"{name}\"")
    }
}

/// Emit the library in the subset read by [`parse_liberty`].
pub fn write_liberty(library: &CellLibrary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "library ({}) {{", quote_name(&library.name));
    for cell in library.cells.values() {
        let _ = writeln!(out, "  cell ({}) {{", quote_name(&cell.name));
        let _ = writeln!(out, "    area : {} ;", cell.area);
        if let Some(ff) = &cell.ff {
            match &ff.state_var_inv {
                Some(inv) => {
                    let _ = writeln!(out, "    ff ({}, {}) {{", ff.state_var, inv);
                }
                None => {
                    let _ = writeln!(out, "    ff ({}) {{", ff.state_var);
                }
            }
            let _ = writeln!(out, "      next_state : \"{}\" ;", ff.next_state);
            let _ = writeln!(out, "      clocked_on : \"{}\" ;", ff.clocked_on);
            out.push_str("    }\n");
        }
        for pin in &cell.pins {
            let _ = writeln!(out, "    pin ({}) {{", quote_name(&pin.name));
            match pin.direction {
                PinDirection::Input => out.push_str("      direction : input ;\n"),
                PinDirection::Output => {
                    out.push_str("      direction : output ;\n");
                    if let Some(f) = &pin.function {
                        let _ = writeln!(out, "      function : \"{f}\" ;");
                    }
                }
            }
            out.push_str("    }\n");
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}
