// SPDX-License-Identifier: Apache-2.0
//! Connectivity resolution and structural legality checks.

use std::collections::VecDeque;

use indexmap::IndexMap;
use serde::Serialize;

use super::{InstanceKind, Netlist, NetlistError};
use crate::liberty::{CellLibrary, PinDirection};

/// An instance pin, by instance index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PinRef {
    pub instance: usize,
    pub pin: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Driver {
    PrimaryInput,
    Instance(PinRef),
}

/// Resolved pin lists of one instance, in the order the gate or cell declares them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstancePins {
    /// Input pin name and connected net.
    pub inputs: Vec<(String, String)>,
    /// Output pin name and connected net, `None` if left unconnected.
    pub outputs: Vec<(String, Option<String>)>,
    pub sequential: bool,
    /// For sequential instances, the clock pin (excluded from data evaluation).
    pub clock_pin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind")]
pub enum ElabError {
    #[error("net `{net}` has multiple drivers: {}", drivers.join(", "))]
    MultipleDriver { net: String, drivers: Vec<String> },
    #[error("net `{net}` is read but never driven")]
    UndrivenNet { net: String },
    #[error("combinational loop through {}", instances.join(" -> "))]
    CombinationalLoop { instances: Vec<String> },
    #[error("instance `{instance}` references unknown cell `{cell}`")]
    UnknownCell { instance: String, cell: String },
    #[error("instance `{instance}` connects unknown pin `{pin}`")]
    UnknownPin { instance: String, pin: String },
    #[error("instance `{instance}` leaves input pin `{pin}` unconnected")]
    UnconnectedPin { instance: String, pin: String },
    #[error("invalid netlist: {message}")]
    Invalid { message: String },
}

impl From<NetlistError> for ElabError {
    fn from(e: NetlistError) -> Self {
        ElabError::Invalid { message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElaboratedDesign {
    pub netlist: Netlist,
    pub driver_of: IndexMap<String, Driver>,
    pub readers_of: IndexMap<String, Vec<PinRef>>,
    /// Combinational instances, levelized.
    pub topo_order: Vec<usize>,
    /// Combinational level of each instance in `topo_order` (1 = reads only
    /// primary inputs or state outputs); 0 for sequential instances.
    pub levels: Vec<usize>,
    pub state_elements: Vec<usize>,
    pub pins: Vec<InstancePins>,
}

impl ElaboratedDesign {
    pub fn instance_name(&self, idx: usize) -> &str {
        &self.netlist.instances[idx].name
    }

    pub fn is_sequential(&self, idx: usize) -> bool {
        self.pins[idx].sequential
    }

    pub fn describe_driver(&self, d: &Driver) -> String {
        describe(&self.netlist, d)
    }
}

fn describe(netlist: &Netlist, d: &Driver) -> String {
    match d {
        Driver::PrimaryInput => "primary input".to_string(),
        Driver::Instance(p) => format!("{}.{}", netlist.instances[p.instance].name, p.pin),
    }
}

fn resolve_pins(
    netlist: &Netlist,
    library: Option<&CellLibrary>,
    errors: &mut Vec<ElabError>,
) -> Vec<Option<InstancePins>> {
    netlist
        .instances
        .iter()
        .map(|inst| {
            let (inputs, outputs, sequential, clock_pin): (Vec<String>, Vec<String>, bool, Option<String>) = match &inst
                .kind
            {
                InstanceKind::Gate(g) => (
                    g.inputs().iter().map(|s| s.to_string()).collect(),
                    vec![g.output().to_string()],
                    g.is_sequential(),
                    g.is_sequential().then(|| "CK".to_string()),
                ),
                InstanceKind::Cell(cell) => {
                    let Some(def) = library.and_then(|l| l.cell(cell)) else {
                        errors.push(ElabError::UnknownCell { instance: inst.name.clone(), cell: cell.clone() });
                        return None;
                    };
                    let ins = def.pins.iter().filter(|p| p.direction == PinDirection::Input).map(|p| p.name.clone());
                    let outs = def.pins.iter().filter(|p| p.direction == PinDirection::Output).map(|p| p.name.clone());
                    (ins.collect(), outs.collect(), def.ff.is_some(), def.ff.as_ref().map(|f| f.clocked_on.clone()))
                }
            };
            let mut ok = true;
            for pin in inst.pins.keys() {
                if !inputs.contains(pin) && !outputs.contains(pin) {
                    errors.push(ElabError::UnknownPin { instance: inst.name.clone(), pin: pin.clone() });
                    ok = false;
                }
            }
            let mut resolved_inputs = Vec::new();
            for pin in &inputs {
                match inst.pins.get(pin) {
                    Some(net) => resolved_inputs.push((pin.clone(), net.clone())),
                    None => {
                        errors.push(ElabError::UnconnectedPin { instance: inst.name.clone(), pin: pin.clone() });
                        ok = false;
                    }
                }
            }
            if matches!(inst.kind, InstanceKind::Gate(_)) && !inst.pins.contains_key(&outputs[0]) {
                errors.push(ElabError::UnconnectedPin { instance: inst.name.clone(), pin: outputs[0].clone() });
                ok = false;
            }
            let resolved_outputs = outputs.iter().map(|p| (p.clone(), inst.pins.get(p).cloned())).collect();
            ok.then_some(InstancePins { inputs: resolved_inputs, outputs: resolved_outputs, sequential, clock_pin })
        })
        .collect()
}

/// Run every structural check and return all findings (empty when clean).
pub fn check(netlist: &Netlist, library: Option<&CellLibrary>) -> Vec<ElabError> {
    match build(netlist, library) {
        Ok(_) => Vec::new(),
        Err(errs) => errs,
    }
}

/// Resolve connectivity, levelize the combinational logic, and partition
/// instances into combinational and sequential sets. Returns the first
/// structural finding on failure; see [`check`] for the full list.
pub fn elaborate(netlist: &Netlist, library: Option<&CellLibrary>) -> Result<ElaboratedDesign, ElabError> {
    build(netlist, library).map_err(|mut e| e.remove(0))
}

fn build(netlist: &Netlist, library: Option<&CellLibrary>) -> Result<ElaboratedDesign, Vec<ElabError>> {
    if let Err(e) = netlist.validate() {
        return Err(vec![e.into()]);
    }
    let mut errors = Vec::new();
    let resolved = resolve_pins(netlist, library, &mut errors);

    let mut all_drivers: IndexMap<String, Vec<Driver>> = IndexMap::new();
    for p in netlist.inputs() {
        for bit in p.bit_names() {
            all_drivers.entry(bit).or_default().push(Driver::PrimaryInput);
        }
    }
    let mut readers_of: IndexMap<String, Vec<PinRef>> = IndexMap::new();
    for (idx, pins) in resolved.iter().enumerate() {
        let Some(pins) = pins else { continue };
        for (pin, net) in &pins.outputs {
            if let Some(net) = net {
                all_drivers
                    .entry(net.clone())
                    .or_default()
                    .push(Driver::Instance(PinRef { instance: idx, pin: pin.clone() }));
            }
        }
        for (pin, net) in &pins.inputs {
            readers_of.entry(net.clone()).or_default().push(PinRef { instance: idx, pin: pin.clone() });
        }
    }

    let mut driver_of = IndexMap::new();
    for net in &netlist.nets {
        match all_drivers.get(net).map(Vec::as_slice) {
            None | Some([]) => {}
            Some([d]) => {
                driver_of.insert(net.clone(), d.clone());
            }
            Some(ds) => {
                errors.push(ElabError::MultipleDriver {
                    net: net.clone(),
                    drivers: ds.iter().map(|d| describe(netlist, d)).collect(),
                });
                driver_of.insert(net.clone(), ds[0].clone());
            }
        }
    }

    let output_bits = netlist.outputs().flat_map(|p| p.bit_names());
    let read_nets: Vec<String> = readers_of.keys().cloned().chain(output_bits).collect();
    let mut reported = std::collections::HashSet::new();
    for net in read_nets {
        if !driver_of.contains_key(&net) && reported.insert(net.clone()) {
            errors.push(ElabError::UndrivenNet { net });
        }
    }

    // Levelize the combinational subgraph.
    let n = netlist.instances.len();
    let is_comb = |i: usize| resolved[i].as_ref().is_some_and(|p| !p.sequential);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, pins) in resolved.iter().enumerate() {
        let Some(pins) = pins else { continue };
        if pins.sequential {
            continue;
        }
        for (_, net) in &pins.inputs {
            if let Some(Driver::Instance(src)) = driver_of.get(net) {
                if is_comb(src.instance) && !preds[i].contains(&src.instance) {
                    preds[i].push(src.instance);
                    succs[src.instance].push(i);
                }
            }
        }
    }
    let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut level = vec![0usize; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| is_comb(i) && indegree[i] == 0).collect();
    for &i in &queue {
        level[i] = 1;
    }
    let mut visited = Vec::new();
    while let Some(i) = queue.pop_front() {
        visited.push(i);
        for &s in &succs[i] {
            level[s] = level[s].max(level[i] + 1);
            indegree[s] -= 1;
            if indegree[s] == 0 {
                queue.push_back(s);
            }
        }
    }
    let comb_count = (0..n).filter(|&i| is_comb(i)).count();
    if visited.len() < comb_count {
        let stuck: Vec<usize> = (0..n).filter(|&i| is_comb(i) && indegree[i] > 0).collect();
        errors.push(ElabError::CombinationalLoop {
            instances: find_cycle(&stuck, &preds, &indegree)
                .into_iter()
                .map(|i| netlist.instances[i].name.clone())
                .collect(),
        });
    }

    if !errors.is_empty() {
        return Err(errors);
    }

    let mut topo_order = visited;
    topo_order.sort_by_key(|&i| (level[i], i));
    let levels = topo_order.iter().map(|&i| level[i]).collect();
    let state_elements = (0..n).filter(|&i| resolved[i].as_ref().is_some_and(|p| p.sequential)).collect();
    Ok(ElaboratedDesign {
        netlist: netlist.clone(),
        driver_of,
        readers_of,
        topo_order,
        levels,
        state_elements,
        pins: resolved.into_iter().map(|p| p.expect("resolved without errors")).collect(),
    })
}

/// Walk predecessor edges inside the unresolved set until a node repeats.
fn find_cycle(stuck: &[usize], preds: &[Vec<usize>], indegree: &[usize]) -> Vec<usize> {
    let start = stuck[0];
    let mut path = vec![start];
    let mut cur = start;
    loop {
        let next = *preds[cur].iter().find(|&&p| indegree[p] > 0).expect("stuck node has a stuck predecessor");
        if let Some(pos) = path.iter().position(|&p| p == next) {
            let mut cycle: Vec<usize> = path[pos..].to_vec();
            cycle.reverse();
            // rotate so the lowest instance index leads
            let min_pos = cycle.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i).unwrap_or(0);
            cycle.rotate_left(min_pos);
            return cycle;
        }
        path.push(next);
        cur = next;
    }
}
