// SPDX-License-Identifier: Apache-2.0
//! Flat, bit-blasted gate-level netlists.
//!
//! A [`Netlist`] holds ports, scalar nets, and instances of either library
//! cells or built-in generic gates. Vectors only survive in
//! [`PortDecl::range`]; every net is a single bit named `base[i]` or `base`.

mod elaborate;
mod parser;
mod writer;

use std::fmt;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use crate::logic::Logic;

pub use elaborate::{check, elaborate, Driver, ElabError, ElaboratedDesign, PinRef};
pub use parser::{parse_structural_verilog, ParseError};
pub use writer::write_structural_verilog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Input,
    Output,
}

/// Harness annotation for an input port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortRole {
    Clock,
    Reset,
    #[default]
    Data,
}

impl PortRole {
    pub fn as_str(self) -> &'static str {
        match self {
            PortRole::Clock => "clock",
            PortRole::Reset => "reset",
            PortRole::Data => "data",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortDecl {
    pub name: String,
    pub direction: Direction,
    /// `[msb:lsb]` as written; `None` for a scalar port.
    pub range: Option<(i64, i64)>,
    pub role: PortRole,
}

impl PortDecl {
    pub fn scalar(name: impl Into<String>, direction: Direction) -> Self {
        PortDecl { name: name.into(), direction, range: None, role: PortRole::Data }
    }

    pub fn vector(name: impl Into<String>, direction: Direction, msb: i64, lsb: i64) -> Self {
        PortDecl { name: name.into(), direction, range: Some((msb, lsb)), role: PortRole::Data }
    }

    pub fn width(&self) -> usize {
        match self.range {
            None => 1,
            Some((msb, lsb)) => (msb - lsb).unsigned_abs() as usize + 1,
        }
    }

    /// Net names of the port bits, MSB first.
    pub fn bit_names(&self) -> Vec<String> {
        match self.range {
            None => vec![self.name.clone()],
            Some((msb, lsb)) => {
                let step: i64 = if msb >= lsb { -1 } else { 1 };
                let mut out = Vec::with_capacity(self.width());
                let mut i = msb;
                loop {
                    out.push(format!("{}[{}]", self.name, i));
                    if i == lsb {
                        break;
                    }
                    i += step;
                }
                out
            }
        }
    }

    /// Net name of bit `index` as written in the source (`a[3]`).
    pub fn bit_name(&self, index: i64) -> Option<String> {
        match self.range {
            None if index == 0 => Some(self.name.clone()),
            None => None,
            Some((msb, lsb)) => {
                let (lo, hi) = if msb >= lsb { (lsb, msb) } else { (msb, lsb) };
                (lo..=hi).contains(&index).then(|| format!("{}[{}]", self.name, index))
            }
        }
    }
}

/// Built-in technology-independent gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Mux2,
    Const0,
    Const1,
    Dff,
}

impl GateKind {
    pub const ALL: [GateKind; 12] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
        GateKind::Mux2,
        GateKind::Const0,
        GateKind::Const1,
        GateKind::Dff,
    ];

    /// Verilog keyword used for the gate in netlist text.
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Nand => "nand",
            GateKind::Nor => "nor",
            GateKind::Xor => "xor",
            GateKind::Xnor => "xnor",
            GateKind::Not => "not",
            GateKind::Buf => "buf",
            GateKind::Mux2 => "mux2",
            GateKind::Const0 => "const0",
            GateKind::Const1 => "const1",
            GateKind::Dff => "dff",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        GateKind::ALL.into_iter().find(|g| g.keyword() == s)
    }

    pub fn inputs(self) -> &'static [&'static str] {
        match self {
            GateKind::And | GateKind::Or | GateKind::Nand | GateKind::Nor | GateKind::Xor | GateKind::Xnor => {
                &["A", "B"]
            }
            GateKind::Not | GateKind::Buf => &["A"],
            GateKind::Mux2 => &["A", "B", "S"],
            GateKind::Const0 | GateKind::Const1 => &[],
            GateKind::Dff => &["D", "CK"],
        }
    }

    pub fn output(self) -> &'static str {
        match self {
            GateKind::Dff => "Q",
            _ => "Y",
        }
    }

    pub fn is_sequential(self) -> bool {
        self == GateKind::Dff
    }

    /// Evaluate a combinational gate on inputs ordered as [`GateKind::inputs`].
    /// For `DFF` this is the next-state function (`D`).
    pub fn eval(self, inputs: &[Logic]) -> Logic {
        match self {
            GateKind::And => inputs[0].and(inputs[1]),
            GateKind::Or => inputs[0].or(inputs[1]),
            GateKind::Nand => inputs[0].and(inputs[1]).not(),
            GateKind::Nor => inputs[0].or(inputs[1]).not(),
            GateKind::Xor => inputs[0].xor(inputs[1]),
            GateKind::Xnor => inputs[0].xor(inputs[1]).not(),
            GateKind::Not => inputs[0].not(),
            GateKind::Buf => inputs[0],
            GateKind::Mux2 => Logic::mux(inputs[0], inputs[1], inputs[2]),
            GateKind::Const0 => Logic::Zero,
            GateKind::Const1 => Logic::One,
            GateKind::Dff => inputs[0],
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.keyword().to_ascii_uppercase())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstanceKind {
    Cell(String),
    Gate(GateKind),
}

impl InstanceKind {
    pub fn type_name(&self) -> &str {
        match self {
            InstanceKind::Cell(name) => name,
            InstanceKind::Gate(g) => g.keyword(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub kind: InstanceKind,
    /// Pin name to net name.
    pub pins: IndexMap<String, String>,
}

impl Instance {
    pub fn new<'a>(
        name: impl Into<String>,
        kind: InstanceKind,
        pins: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Self {
        Instance {
            name: name.into(),
            kind,
            pins: pins.into_iter().map(|(p, n)| (p.to_string(), n.to_string())).collect(),
        }
    }

    pub fn gate<'a>(
        name: impl Into<String>,
        kind: GateKind,
        pins: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Self {
        Self::new(name, InstanceKind::Gate(kind), pins)
    }

    pub fn cell<'a>(
        name: impl Into<String>,
        cell: impl Into<String>,
        pins: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Self {
        Self::new(name, InstanceKind::Cell(cell.into()), pins)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Netlist {
    pub name: String,
    pub ports: Vec<PortDecl>,
    /// Every net, including port bits.
    pub nets: IndexSet<String>,
    pub instances: Vec<Instance>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("instance `{instance}` pin `{pin}` references undeclared net `{net}`")]
    UndeclaredNet { instance: String, pin: String, net: String },
    #[error("no port named `{0}`")]
    UnknownPort(String),
    #[error("more than one port has role {0}")]
    DuplicateRole(&'static str),
    #[error("port `{0}` is not an input and cannot carry a clock or reset role")]
    RoleOnOutput(String),
}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Self {
        Netlist { name: name.into(), ports: Vec::new(), nets: IndexSet::new(), instances: Vec::new() }
    }

    /// Declare a port and its bit nets.
    pub fn add_port(&mut self, port: PortDecl) -> Result<(), NetlistError> {
        if self.port(&port.name).is_some() {
            return Err(NetlistError::Duplicate(port.name));
        }
        for bit in port.bit_names() {
            if !self.nets.insert(bit.clone()) {
                return Err(NetlistError::Duplicate(bit));
            }
        }
        self.ports.push(port);
        Ok(())
    }

    pub fn add_net(&mut self, name: impl Into<String>) -> Result<(), NetlistError> {
        let name = name.into();
        if self.nets.contains(&name) {
            return Err(NetlistError::Duplicate(name));
        }
        self.nets.insert(name);
        Ok(())
    }

    pub fn add_instance(&mut self, inst: Instance) -> Result<(), NetlistError> {
        if self.instances.iter().any(|i| i.name == inst.name) {
            return Err(NetlistError::Duplicate(inst.name));
        }
        for (pin, net) in &inst.pins {
            if !self.nets.contains(net) {
                return Err(NetlistError::UndeclaredNet {
                    instance: inst.name.clone(),
                    pin: pin.clone(),
                    net: net.clone(),
                });
            }
        }
        self.instances.push(inst);
        Ok(())
    }

    pub fn port(&self, name: &str) -> Option<&PortDecl> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn instance(&self, name: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.name == name)
    }

    pub fn inputs(&self) -> impl Iterator<Item = &PortDecl> {
        self.ports.iter().filter(|p| p.direction == Direction::Input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &PortDecl> {
        self.ports.iter().filter(|p| p.direction == Direction::Output)
    }

    /// Output port bit nets in declaration order, MSB first.
    pub fn output_bits(&self) -> Vec<String> {
        self.outputs().flat_map(|p| p.bit_names()).collect()
    }

    /// Non-clock input bit nets in declaration order, MSB first. This is the
    /// layout of a simulator step frame.
    pub fn stimulus_bits(&self) -> Vec<String> {
        self.inputs().filter(|p| p.role != PortRole::Clock).flat_map(|p| p.bit_names()).collect()
    }

    pub fn clock_port(&self) -> Option<&PortDecl> {
        self.ports.iter().find(|p| p.role == PortRole::Clock)
    }

    pub fn reset_port(&self) -> Option<&PortDecl> {
        self.ports.iter().find(|p| p.role == PortRole::Reset)
    }

    /// Assign a harness role to an input port, clearing that role from any
    /// other port for clock/reset.
    pub fn set_role(&mut self, port: &str, role: PortRole) -> Result<(), NetlistError> {
        let idx = self
            .ports
            .iter()
            .position(|p| p.name == port)
            .ok_or_else(|| NetlistError::UnknownPort(port.to_string()))?;
        if role != PortRole::Data {
            if self.ports[idx].direction != Direction::Input {
                return Err(NetlistError::RoleOnOutput(port.to_string()));
            }
            for p in &mut self.ports {
                if p.role == role {
                    p.role = PortRole::Data;
                }
            }
        }
        self.ports[idx].role = role;
        Ok(())
    }

    /// Check the name, reference, and role invariants.
    pub fn validate(&self) -> Result<(), NetlistError> {
        let mut seen = IndexSet::new();
        for p in &self.ports {
            if !seen.insert(p.name.as_str()) {
                return Err(NetlistError::Duplicate(p.name.clone()));
            }
            if p.role != PortRole::Data && p.direction != Direction::Input {
                return Err(NetlistError::RoleOnOutput(p.name.clone()));
            }
            for bit in p.bit_names() {
                if !self.nets.contains(&bit) {
                    return Err(NetlistError::UndeclaredNet { instance: String::new(), pin: p.name.clone(), net: bit });
                }
            }
        }
        for role in [PortRole::Clock, PortRole::Reset] {
            if self.ports.iter().filter(|p| p.role == role).count() > 1 {
                return Err(NetlistError::DuplicateRole(role.as_str()));
            }
        }
        let mut inst_names = IndexSet::new();
        for inst in &self.instances {
            if !inst_names.insert(inst.name.as_str()) {
                return Err(NetlistError::Duplicate(inst.name.clone()));
            }
            for (pin, net) in &inst.pins {
                if !self.nets.contains(net) {
                    return Err(NetlistError::UndeclaredNet {
                        instance: inst.name.clone(),
                        pin: pin.clone(),
                        net: net.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_bits_are_msb_first() {
        let p = PortDecl::vector("a", Direction::Input, 3, 0);
        assert_eq!(p.width(), 4);
        assert_eq!(p.bit_names(), ["a[3]", "a[2]", "a[1]", "a[0]"]);
        let r = PortDecl::vector("r", Direction::Input, 0, 2);
        assert_eq!(r.bit_names(), ["r[0]", "r[1]", "r[2]"]);
        assert_eq!(r.bit_name(3), None);
        assert_eq!(r.bit_name(1).as_deref(), Some("r[1]"));
    }

    #[test]
    fn set_role_is_exclusive() {
        let mut n = Netlist::new("t");
        n.add_port(PortDecl::scalar("c1", Direction::Input)).unwrap();
        n.add_port(PortDecl::scalar("c2", Direction::Input)).unwrap();
        n.add_port(PortDecl::scalar("y", Direction::Output)).unwrap();
        n.set_role("c1", PortRole::Clock).unwrap();
        n.set_role("c2", PortRole::Clock).unwrap();
        assert_eq!(n.clock_port().unwrap().name, "c2");
        assert_eq!(n.port("c1").unwrap().role, PortRole::Data);
        assert!(matches!(n.set_role("y", PortRole::Reset), Err(NetlistError::RoleOnOutput(_))));
        assert!(matches!(n.set_role("q", PortRole::Reset), Err(NetlistError::UnknownPort(_))));
    }

    #[test]
    fn add_instance_rejects_undeclared_nets() {
        let mut n = Netlist::new("t");
        n.add_port(PortDecl::scalar("a", Direction::Input)).unwrap();
        let err = n.add_instance(Instance::gate("g", GateKind::Not, [("A", "a"), ("Y", "nope")]));
        assert!(matches!(err, Err(NetlistError::UndeclaredNet { .. })));
    }

    #[test]
    fn gate_eval_tables() {
        use Logic::*;
        assert_eq!(GateKind::Nand.eval(&[One, One]), Zero);
        assert_eq!(GateKind::Nor.eval(&[Zero, Zero]), One);
        assert_eq!(GateKind::Xnor.eval(&[One, Zero]), Zero);
        assert_eq!(GateKind::Mux2.eval(&[Zero, One, One]), One);
        assert_eq!(GateKind::Const1.eval(&[]), One);
    }
}
