// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Direction, Netlist, PortRole};

const KEYWORDS: [&str; 22] = [
    "module",
    "endmodule",
    "input",
    "output",
    "inout",
    "wire",
    "assign",
    "reg",
    "always",
    "initial",
    "parameter",
    "localparam",
    "generate",
    "function",
    "task",
    "integer",
    "genvar",
    "supply0",
    "supply1",
    "tri",
    "logic",
    "defparam",
];

fn is_simple(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
        && !KEYWORDS.contains(&name)
}

fn ident(name: &str) -> String {
    if is_simple(name) {
        name.to_string()
    } else {
        format!("\\{name} ")
    }
}

/// Split `base[idx]` into its parts when `base` is a simple identifier.
fn split_bit(net: &str) -> Option<(&str, i64)> {
    let open = net.find('[')?;
    let inner = net[open + 1..].strip_suffix(']')?;
    let idx = inner.parse().ok()?;
    let base = &net[..open];
    is_simple(base).then_some((base, idx))
}

fn net_ref(net: &str) -> String {
    if is_simple(net) || split_bit(net).is_some() {
        net.to_string()
    } else {
        ident(net)
    }
}

/// Emit a netlist in the structural subset accepted by
/// [`parse_structural_verilog`](super::parse_structural_verilog).
pub fn write_structural_verilog(netlist: &Netlist) -> String {
    let mut out = String::new();
    let header: Vec<String> = netlist.ports.iter().map(|p| ident(&p.name)).collect();
    let _ = writeln!(out, "module {} ({});", ident(&netlist.name), header.join(", "));
    for p in &netlist.ports {
        let dir = match p.direction {
            Direction::Input => "input",
            Direction::Output => "output",
        };
        let attr = match p.role {
            PortRole::Data => String::new(),
            role => format!("(* role = \"{}\" *) ", role.as_str()),
        };
        let range = p.range.map(|(m, l)| format!("[{m}:{l}] ")).unwrap_or_default();
        let _ = writeln!(out, "  {attr}{dir} {range}{};", ident(&p.name));
    }

    let port_bits: std::collections::HashSet<String> = netlist.ports.iter().flat_map(|p| p.bit_names()).collect();
    let wires: Vec<&String> = netlist.nets.iter().filter(|n| !port_bits.contains(*n)).collect();

    // Group `w[i]` nets whose indices form a contiguous run into one vector wire.
    let mut groups: BTreeMap<&str, Vec<i64>> = BTreeMap::new();
    for w in &wires {
        if let Some((base, idx)) = split_bit(w) {
            groups.entry(base).or_default().push(idx);
        }
    }
    let mut vector_bases = BTreeMap::new();
    for (base, mut idx) in groups {
        if netlist.nets.contains(base) || netlist.port(base).is_some() {
            continue;
        }
        idx.sort_unstable();
        let contiguous = idx.windows(2).all(|w| w[1] == w[0] + 1);
        if contiguous {
            vector_bases.insert(base, (idx[idx.len() - 1], idx[0]));
        }
    }
    let mut emitted_vectors = std::collections::HashSet::new();
    for w in wires {
        match split_bit(w).filter(|(b, _)| vector_bases.contains_key(b)) {
            Some((base, _)) => {
                if emitted_vectors.insert(base) {
                    let (msb, lsb) = vector_bases[base];
                    let _ = writeln!(out, "  wire [{msb}:{lsb}] {base};");
                }
            }
            None => {
                let _ = writeln!(out, "  wire {};", ident(w));
            }
        }
    }

    for inst in &netlist.instances {
        let conns: Vec<String> =
            inst.pins.iter().map(|(pin, net)| format!(".{}({})", ident(pin), net_ref(net))).collect();
        let _ = writeln!(out, "  {} {} ({});", ident(inst.kind.type_name()), ident(&inst.name), conns.join(", "));
    }
    out.push_str("endmodule\n");
    out
}
