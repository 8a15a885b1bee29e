// SPDX-License-Identifier: Apache-2.0
//! Value Change Dump export and import of cycle traces.
//!
//! Only scalar variables are written or read. On import each signal is
//! sampled at `cycle * period` with last-value-holds semantics.

use std::collections::HashMap;
use std::io::BufReader;

use ::vcd::{
    Command, IdCode, Parser, ReferenceIndex, ScopeItem, SimulationCommand, TimescaleUnit, Value, VarType, Writer,
};

use crate::logic::Logic;
use crate::sim::Trace;

#[derive(Debug, thiserror::Error)]
pub enum VcdError {
    #[error("malformed VCD: {0}")]
    Syntax(String),
    #[error("signal `{0}` is not declared in the VCD")]
    Unmapped(String),
    #[error("signal `{name}` is a {width}-bit vector; only scalars are supported")]
    Vector { name: String, width: u32 },
    #[error("timestamp {got} follows {prev}")]
    TimeReversed { prev: u64, got: u64 },
    #[error("value change for undeclared id `{0}`")]
    UndeclaredId(String),
    #[error("cycle period must be positive")]
    ZeroPeriod,
}

fn split_bit(name: &str) -> (&str, Option<ReferenceIndex>) {
    if let Some(stripped) = name.strip_suffix(']') {
        if let Some((base, idx)) = stripped.rsplit_once('[') {
            if let Ok(i) = idx.parse::<i32>() {
                if !base.is_empty() {
                    return (base, Some(ReferenceIndex::BitSelect(i)));
                }
            }
        }
    }
    (name, None)
}

fn to_vcd(v: Logic) -> Value {
    match v {
        Logic::Zero => Value::V0,
        Logic::One => Value::V1,
        Logic::X => Value::X,
    }
}

fn from_vcd(v: Value) -> Logic {
    match v {
        Value::V0 => Logic::Zero,
        Value::V1 => Logic::One,
        Value::X | Value::Z => Logic::X,
    }
}

/// Write `trace` with cycle `c` at time `c * period`. A trailing timestamp
/// marks the last cycle even when nothing changes there.
pub fn write_vcd(trace: &Trace, period: u64, module: &str) -> String {
    let mut buf = Vec::new();
    write_into(&mut buf, trace, period, module).expect("writing to memory");
    String::from_utf8(buf).expect("vcd output is ascii")
}

fn write_into(buf: &mut Vec<u8>, trace: &Trace, period: u64, module: &str) -> std::io::Result<()> {
    let mut w = Writer::new(buf);
    w.timescale(1, TimescaleUnit::NS)?;
    w.add_module(if module.is_empty() { "top" } else { module })?;
    let mut ids = Vec::with_capacity(trace.signals.len());
    for s in &trace.signals {
        let (base, idx) = split_bit(s);
        ids.push(w.add_var(VarType::Wire, 1, base, idx)?);
    }
    w.upscope()?;
    w.enddefinitions()?;
    let mut prev: Option<&Vec<Logic>> = None;
    for (c, frame) in trace.frames.iter().enumerate() {
        let t = c as u64 * period;
        match prev {
            None => {
                w.timestamp(t)?;
                w.begin(SimulationCommand::Dumpvars)?;
                for (id, v) in ids.iter().zip(frame) {
                    w.change_scalar(*id, to_vcd(*v))?;
                }
                w.end()?;
            }
            Some(p) => {
                let changed: Vec<usize> = (0..frame.len()).filter(|&i| frame[i] != p[i]).collect();
                if !changed.is_empty() {
                    w.timestamp(t)?;
                    for i in changed {
                        w.change_scalar(ids[i], to_vcd(frame[i]))?;
                    }
                } else if c + 1 == trace.frames.len() {
                    w.timestamp(t)?;
                }
            }
        }
        prev = Some(frame);
    }
    w.flush()
}

fn collect_vars(items: &[ScopeItem], prefix: &str, out: &mut HashMap<String, (IdCode, u32)>) {
    for item in items {
        match item {
            ScopeItem::Var(v) => {
                let name = match &v.index {
                    Some(i) => format!("{}{}", v.reference, i),
                    None => v.reference.clone(),
                };
                out.entry(name.clone()).or_insert((v.code, v.size));
                out.entry(format!("{prefix}{name}")).or_insert((v.code, v.size));
            }
            ScopeItem::Scope(s) => collect_vars(&s.items, &format!("{prefix}{}.", s.identifier), out),
            _ => {}
        }
    }
}

/// Sample a VCD into a trace. `signal_map` lists `(vcd name, trace signal)`
/// pairs in trace order; VCD names may be leaf names (`y[0]`) or
/// scope-qualified (`top.y[0]`). Every trace signal counts as an output.
pub fn parse_vcd(text: &str, signal_map: &[(String, String)], period: u64) -> Result<Trace, VcdError> {
    if period == 0 {
        return Err(VcdError::ZeroPeriod);
    }
    let mut p = Parser::new(BufReader::new(text.as_bytes()));
    let header = p.parse_header().map_err(|e| VcdError::Syntax(e.to_string()))?;
    let mut vars = HashMap::new();
    collect_vars(&header.items, "", &mut vars);
    let mut code_slots: HashMap<IdCode, Vec<usize>> = HashMap::new();
    for (slot, (vcd_name, _)) in signal_map.iter().enumerate() {
        let &(code, size) = vars.get(vcd_name).ok_or_else(|| VcdError::Unmapped(vcd_name.clone()))?;
        if size != 1 {
            return Err(VcdError::Vector { name: vcd_name.clone(), width: size });
        }
        code_slots.entry(code).or_default().push(slot);
    }
    let declared: std::collections::HashSet<IdCode> = vars.values().map(|v| v.0).collect();

    let mut changes: Vec<(u64, usize, Logic)> = Vec::new();
    let mut now = 0u64;
    let mut t_max: Option<u64> = None;
    for cmd in p {
        let cmd = cmd.map_err(|e| VcdError::Syntax(e.to_string()))?;
        match cmd {
            Command::Timestamp(t) => {
                if t_max.is_some() && t < now {
                    return Err(VcdError::TimeReversed { prev: now, got: t });
                }
                now = t;
                t_max = Some(t);
            }
            Command::ChangeScalar(id, v) => {
                if !declared.contains(&id) {
                    return Err(VcdError::UndeclaredId(id.to_string()));
                }
                if let Some(slots) = code_slots.get(&id) {
                    for &s in slots {
                        changes.push((now, s, from_vcd(v)));
                    }
                }
                t_max.get_or_insert(now);
            }
            Command::ChangeVector(id, _) | Command::ChangeReal(id, _) | Command::ChangeString(id, _)
                if !declared.contains(&id) =>
            {
                return Err(VcdError::UndeclaredId(id.to_string()));
            }
            _ => {}
        }
    }

    let signals: Vec<String> = signal_map.iter().map(|(_, s)| s.clone()).collect();
    let mut trace = Trace::of_outputs(signals);
    let Some(t_max) = t_max else {
        return Ok(trace);
    };
    let cycles = t_max / period + 1;
    let mut cur = vec![Logic::X; signal_map.len()];
    let mut k = 0;
    for c in 0..cycles {
        let t = c * period;
        while k < changes.len() && changes[k].0 <= t {
            cur[changes[k].1] = changes[k].2;
            k += 1;
        }
        trace.push(cur.clone());
    }
    Ok(trace)
}

/// [`parse_vcd`] with each trace signal looked up under its own name.
pub fn parse_vcd_signals(text: &str, signals: &[String], period: u64) -> Result<Trace, VcdError> {
    let map: Vec<(String, String)> = signals.iter().map(|s| (s.clone(), s.clone())).collect();
    parse_vcd(text, &map, period)
}
