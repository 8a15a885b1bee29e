// SPDX-License-Identifier: Apache-2.0
//! Direct interpreter for generic-gate netlists, used as the golden model.
//! Deliberately separate from the compiled simulator.

use crate::logic::Logic;
use crate::netlist::{ElaboratedDesign, GateKind, InstanceKind, Netlist, PortRole};
use crate::sim::{Harness, Monitor, Trace};

use super::ExecError;

/// Positions of reset bits within a full step frame.
#[derive(Debug, Clone)]
pub(crate) struct StimulusShape {
    width: usize,
    reset: Vec<usize>,
}

impl StimulusShape {
    pub(crate) fn of(netlist: &Netlist) -> Self {
        let mut width = 0;
        let mut reset = Vec::new();
        for p in netlist.inputs().filter(|p| p.role != PortRole::Clock) {
            for _ in 0..p.width() {
                if p.role == PortRole::Reset {
                    reset.push(width);
                }
                width += 1;
            }
        }
        StimulusShape { width, reset }
    }

    /// Full-width rows: reset cycles (reset active, data 0), then one row
    /// per layout frame with reset inactive.
    pub(crate) fn rows(&self, frames: &[Vec<bool>], harness: &Harness) -> Result<Vec<Vec<Logic>>, ExecError> {
        if harness.reset_cycles > 0 && self.reset.is_empty() {
            return Err(ExecError::Sim(crate::sim::SimError::NoResetPort));
        }
        let mut all = Vec::with_capacity(harness.reset_cycles + frames.len());
        for _ in 0..harness.reset_cycles {
            let mut f = vec![Logic::Zero; self.width];
            for &r in &self.reset {
                f[r] = harness.reset_active;
            }
            all.push(f);
        }
        let inactive = harness.reset_active.not();
        for frame in frames {
            let mut out = vec![inactive; self.width];
            let mut bits = frame.iter();
            for (i, slot) in out.iter_mut().enumerate() {
                if !self.reset.contains(&i) {
                    *slot = Logic::from_bool(*bits.next().expect("frame matches layout"));
                }
            }
            all.push(out);
        }
        Ok(all)
    }
}

#[derive(Debug, Clone)]
struct Gate {
    kind: GateKind,
    inputs: Vec<usize>,
    output: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Interp {
    nets: usize,
    comb: Vec<Gate>,
    flops: Vec<(usize, usize)>,
    stimulus: Vec<usize>,
    shape: StimulusShape,
    clocks: Vec<usize>,
    signals: Vec<String>,
    outputs: usize,
    monitored: Vec<usize>,
}

impl Interp {
    pub(crate) fn new(design: &ElaboratedDesign, monitor: &Monitor) -> Result<Interp, ExecError> {
        let nl = &design.netlist;
        let ix = |n: &str| nl.nets.get_index_of(n).expect("elaborated nets are declared");
        let mut comb = Vec::new();
        let mut flops = Vec::new();
        for &i in design.topo_order.iter().chain(&design.state_elements) {
            let inst = &nl.instances[i];
            let InstanceKind::Gate(kind) = inst.kind else {
                return Err(ExecError::NotGeneric(inst.name.clone()));
            };
            if kind == GateKind::Dff {
                flops.push((ix(&inst.pins["D"]), ix(&inst.pins["Q"])));
            } else {
                let inputs = kind.inputs().iter().map(|p| ix(&inst.pins[*p])).collect();
                comb.push(Gate { kind, inputs, output: ix(&inst.pins[kind.output()]) });
            }
        }
        let mut stimulus = Vec::new();
        let mut clocks = Vec::new();
        for p in nl.inputs() {
            for b in p.bit_names() {
                match p.role {
                    PortRole::Clock => clocks.push(ix(&b)),
                    _ => stimulus.push(ix(&b)),
                }
            }
        }
        let mut signals = nl.output_bits();
        let outputs = signals.len();
        let extra: Vec<String> = match monitor {
            Monitor::Outputs => Vec::new(),
            Monitor::OutputsAnd(v) => v.clone(),
            Monitor::AllNets => nl.nets.iter().cloned().collect(),
        };
        for e in extra {
            if !signals.contains(&e) {
                if !nl.nets.contains(&e) {
                    return Err(ExecError::UnknownSignal(e));
                }
                signals.push(e);
            }
        }
        let monitored = signals.iter().map(|s| ix(s)).collect();
        let shape = StimulusShape::of(nl);
        Ok(Interp { nets: nl.nets.len(), comb, flops, stimulus, shape, clocks, signals, outputs, monitored })
    }

    pub(crate) fn run(&self, frames: &[Vec<bool>], harness: &Harness) -> Result<Trace, ExecError> {
        Ok(self.run_full(&self.shape.rows(frames, harness)?))
    }

    pub(crate) fn run_full(&self, frames: &[Vec<Logic>]) -> Trace {
        let mut trace = Trace::new(self.signals.clone(), self.outputs);
        let mut v = vec![Logic::X; self.nets];
        let mut state = vec![Logic::X; self.flops.len()];
        let mut ins = Vec::with_capacity(3);
        for frame in frames {
            for (&(_, q), s) in self.flops.iter().zip(&state) {
                v[q] = *s;
            }
            for (&slot, &x) in self.stimulus.iter().zip(frame) {
                v[slot] = x;
            }
            for &c in &self.clocks {
                v[c] = Logic::X;
            }
            for g in &self.comb {
                ins.clear();
                ins.extend(g.inputs.iter().map(|&i| v[i]));
                v[g.output] = g.kind.eval(&ins);
            }
            trace.push(self.monitored.iter().map(|&i| v[i]).collect());
            state = self.flops.iter().map(|&(d, _)| v[d]).collect();
        }
        trace
    }
}
