// SPDX-License-Identifier: Apache-2.0
//! Executable designs, trace comparison, bug reports, and the cross-library
//! differential matrix.

mod difflib;
mod interp;

use std::io::Write as _;
use std::process::Command;
use std::sync::Arc;

use serde::Serialize;

pub use difflib::{
    enumerate_inputs, load_source, run_difflib, run_matrix, DiffLibConfig, DiffLibError, DiffMatrix, InputSource,
    PairCell, PairClass, Pairing, ReferenceSpec, SourceSpec, SourceTag,
};

use crate::liberty::CellLibrary;
use crate::logic::Logic;
use crate::netlist::{elaborate, ElabError, ElaboratedDesign, Netlist};
use crate::sim::{coverage_report, CoverageMap, CoverageReport, Harness, SimError, SimModel, Simulator, Trace};
use crate::stimulus::{derive_layout, LayoutError, NetInput, PortLayout};
use crate::vcd::{parse_vcd, VcdError};
use interp::{Interp, StimulusShape};

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error(transparent)]
    Elab(#[from] ElabError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("instance `{0}` is not a generic gate")]
    NotGeneric(String),
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("external simulator failed ({status}): {stderr}")]
    Process { status: String, stderr: String },
    #[error("external simulator produced no VCD at {0}")]
    MissingVcd(String),
    #[error(transparent)]
    Vcd(#[from] VcdError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("input layout does not match design `{0}`")]
    LayoutMismatch(String),
}

#[derive(Debug, Clone)]
enum Backend {
    BuiltIn(Arc<SimModel>, Arc<ElaboratedDesign>),
    Interp(Arc<Interp>),
    External { command: String, period: u64, signal_map: Vec<(String, String)>, shape: StimulusShape },
}

/// A design that can be run on a [`NetInput`] to produce a [`Trace`] over
/// its output-port bits (plus any extra monitored nets).
#[derive(Debug, Clone)]
pub struct ExecutableDesign {
    pub name: String,
    backend: Backend,
    layout: Arc<PortLayout>,
    pub harness: Harness,
}

impl ExecutableDesign {
    /// The built-in simulator over a netlist and its simulation library.
    pub fn built_in(
        name: impl Into<String>,
        netlist: &Netlist,
        library: Option<&CellLibrary>,
        harness: Harness,
    ) -> Result<Self, ExecError> {
        let design = elaborate(netlist, library)?;
        let model = Arc::new(SimModel::build(&design, library)?);
        let layout = Arc::new(derive_layout(netlist)?);
        Ok(ExecutableDesign { name: name.into(), backend: Backend::BuiltIn(model, Arc::new(design)), layout, harness })
    }

    /// Direct interpretation of a generic-gate netlist.
    pub fn generic_interp(name: impl Into<String>, netlist: &Netlist, harness: Harness) -> Result<Self, ExecError> {
        let design = elaborate(netlist, None)?;
        let interp = Arc::new(Interp::new(&design, &harness.monitor)?);
        let layout = Arc::new(derive_layout(netlist)?);
        Ok(ExecutableDesign { name: name.into(), backend: Backend::Interp(interp), layout, harness })
    }

    /// An external simulator. `command` runs under `sh -c` after replacing
    /// `{stimulus}` and `{vcd}` with file paths. The stimulus file has one
    /// line per cycle (reset cycles first) with every non-clock input bit in
    /// port declaration order, MSB first, as `0`/`1`. `signal_map` pairs VCD
    /// names with trace signals; `None` maps each output bit to itself.
    /// `netlist` supplies the port interface only.
    pub fn external(
        name: impl Into<String>,
        netlist: &Netlist,
        command: impl Into<String>,
        period: u64,
        signal_map: Option<Vec<(String, String)>>,
        harness: Harness,
    ) -> Result<Self, ExecError> {
        let map = signal_map.unwrap_or_else(|| netlist.output_bits().into_iter().map(|b| (b.clone(), b)).collect());
        let layout = Arc::new(derive_layout(netlist)?);
        Ok(ExecutableDesign {
            name: name.into(),
            backend: Backend::External {
                command: command.into(),
                period,
                signal_map: map,
                shape: StimulusShape::of(netlist),
            },
            layout,
            harness,
        })
    }

    pub fn layout(&self) -> &Arc<PortLayout> {
        &self.layout
    }

    pub fn kind(&self) -> &'static str {
        match self.backend {
            Backend::BuiltIn(..) => "built-in-sim",
            Backend::Interp(_) => "generic-interp",
            Backend::External { .. } => "external-process",
        }
    }

    /// A reusable executor owning any per-run state.
    pub fn runner(&self) -> Runner<'_> {
        let sim = match &self.backend {
            Backend::BuiltIn(m, _) => Some(Simulator::from_model(Arc::clone(m))),
            _ => None,
        };
        Runner { design: self, sim }
    }

    /// Coverage summary against this design (built-in simulator only).
    pub fn coverage_report(&self, map: &CoverageMap) -> Option<CoverageReport> {
        match &self.backend {
            Backend::BuiltIn(_, d) => Some(coverage_report(map, d)),
            _ => None,
        }
    }

    pub fn execute(&self, input: &NetInput) -> Result<Trace, ExecError> {
        self.runner().run(input).map(|r| r.0)
    }
}

pub struct Runner<'a> {
    design: &'a ExecutableDesign,
    sim: Option<Simulator>,
}

impl Runner<'_> {
    /// Trace plus coverage (built-in simulator only).
    pub fn run(&mut self, input: &NetInput) -> Result<(Trace, Option<CoverageMap>), ExecError> {
        let d = self.design;
        if **input.layout() != *d.layout {
            return Err(ExecError::LayoutMismatch(d.name.clone()));
        }
        match &d.backend {
            Backend::BuiltIn(..) => {
                let sim = self.sim.as_mut().expect("built-in runner owns a simulator");
                let (t, c) = sim.run(input, &d.harness)?;
                Ok((t, Some(c)))
            }
            Backend::Interp(i) => Ok((i.run(input.frames(), &d.harness)?, None)),
            Backend::External { command, period, signal_map, shape } => {
                run_external(command, *period, signal_map, shape, input, &d.harness).map(|t| (t, None))
            }
        }
    }
}

fn run_external(
    command: &str,
    period: u64,
    signal_map: &[(String, String)],
    shape: &StimulusShape,
    input: &NetInput,
    harness: &Harness,
) -> Result<Trace, ExecError> {
    let dir = tempfile::tempdir()?;
    let stim = dir.path().join("stimulus.txt");
    let vcd = dir.path().join("out.vcd");
    let mut f = std::fs::File::create(&stim)?;
    for row in shape.rows(input.frames(), harness)? {
        writeln!(f, "{}", crate::logic::to_string(&row))?;
    }
    drop(f);
    let cmd = command.replace("{stimulus}", &stim.to_string_lossy()).replace("{vcd}", &vcd.to_string_lossy());
    let out = Command::new("sh").arg("-c").arg(&cmd).output()?;
    if !out.status.success() {
        return Err(ExecError::Process {
            status: out.status.to_string(),
            stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
        });
    }
    let text = std::fs::read_to_string(&vcd).map_err(|_| ExecError::MissingVcd(vcd.display().to_string()))?;
    let mut trace = parse_vcd(&text, signal_map, period)?;
    let expected = harness.reset_cycles + input.len();
    // Simulators may dump trailing time past the last cycle.
    trace.frames.truncate(expected);
    Ok(trace)
}

/// How X values in the reference are treated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XHandling {
    /// X only matches X.
    Strict,
    /// A reference X matches any dut value.
    #[default]
    ReferenceWildcard,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum SignalSet {
    #[default]
    Outputs,
    /// Output bits plus the named monitored nets.
    OutputsAnd(Vec<String>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComparePolicy {
    pub signals: SignalSet,
    pub x_handling: XHandling,
    pub skip_cycles: usize,
}

impl ComparePolicy {
    /// Outputs only, reference X as wildcard, reset cycles skipped.
    pub fn for_harness(h: &Harness) -> Self {
        ComparePolicy { skip_cycles: h.reset_cycles, ..ComparePolicy::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivergingSignal {
    pub signal: String,
    pub reference: Logic,
    pub dut: Logic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub cycle: usize,
    pub signals: Vec<DivergingSignal>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompareError {
    #[error("signal lists differ")]
    SignalMismatch,
    #[error("trace lengths differ: reference {reference}, dut {dut}")]
    LengthMismatch { reference: usize, dut: usize },
    #[error("signal `{0}` is not in the traces")]
    UnknownSignal(String),
}

/// Earliest cycle at or after `skip_cycles` where a compared signal differs.
pub fn compare_traces(
    reference: &Trace,
    dut: &Trace,
    policy: &ComparePolicy,
) -> Result<Option<Divergence>, CompareError> {
    if reference.signals != dut.signals || reference.outputs != dut.outputs {
        return Err(CompareError::SignalMismatch);
    }
    if reference.cycles() != dut.cycles() {
        return Err(CompareError::LengthMismatch { reference: reference.cycles(), dut: dut.cycles() });
    }
    let mut cols: Vec<usize> = (0..reference.outputs).collect();
    if let SignalSet::OutputsAnd(names) = &policy.signals {
        for n in names {
            let i = reference.signal_index(n).ok_or_else(|| CompareError::UnknownSignal(n.clone()))?;
            if !cols.contains(&i) {
                cols.push(i);
            }
        }
    }
    for c in policy.skip_cycles..reference.cycles() {
        let (r, d) = (&reference.frames[c], &dut.frames[c]);
        let differs = |i: usize| match policy.x_handling {
            XHandling::Strict => r[i] != d[i],
            XHandling::ReferenceWildcard => r[i].is_known() && r[i] != d[i],
        };
        let signals: Vec<DivergingSignal> = cols
            .iter()
            .filter(|&&i| differs(i))
            .map(|&i| DivergingSignal { signal: reference.signals[i].clone(), reference: r[i], dut: d[i] })
            .collect();
        if !signals.is_empty() {
            return Ok(Some(Divergence { cycle: c, signals }));
        }
    }
    Ok(None)
}

/// A diverging input with the evidence needed to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BugReport {
    pub input: NetInput,
    pub first_divergence_cycle: usize,
    pub signals: Vec<DivergingSignal>,
    pub dut: String,
    pub reference: String,
    pub iteration: u64,
}

impl BugReport {
    pub fn new(input: NetInput, div: Divergence, dut: &str, reference: &str, iteration: u64) -> Self {
        BugReport {
            input,
            first_divergence_cycle: div.cycle,
            signals: div.signals,
            dut: dut.to_string(),
            reference: reference.to_string(),
            iteration,
        }
    }

    /// Names of the diverging signals, used to group reports.
    pub fn signature(&self) -> Vec<String> {
        self.signals.iter().map(|s| s.signal.clone()).collect()
    }
}

/// Run both designs on one input and compare.
pub fn check_input(
    reference: &mut Runner<'_>,
    dut: &mut Runner<'_>,
    input: &NetInput,
    policy: &ComparePolicy,
) -> Result<(Option<Divergence>, Option<CoverageMap>), ExecError> {
    let (rt, _) = reference.run(input)?;
    let (dt, cov) = dut.run(input)?;
    let div = compare_traces(&rt, &dt, policy).map_err(|e| ExecError::UnknownSignal(e.to_string()))?;
    Ok((div, cov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liberty::parse_liberty;
    use crate::logic::Logic::{One as I, Zero as O, X};
    use crate::netlist::parse_structural_verilog;

    const AND_LIB: &str = r#"library(t){cell(AND2X1){area:1; pin(A){direction:input;} pin(B){direction:input;} pin(Y){direction:output; function:"A&B";}}}"#;

    fn frames(layout: &Arc<PortLayout>, rows: &[&str]) -> NetInput {
        let f = rows.iter().map(|r| crate::stimulus::parse_bits(r).unwrap()).collect();
        NetInput::with_frames(layout.clone(), f).unwrap()
    }

    #[test]
    fn interp_not_chain() {
        let nl = parse_structural_verilog(
            "module t(input a, output y); wire n; not g1(.A(a), .Y(n)); not g2(.A(n), .Y(y)); endmodule",
        )
        .unwrap();
        let d = ExecutableDesign::generic_interp("ref", &nl, Harness::default()).unwrap();
        let t = d.execute(&frames(d.layout(), &["1"])).unwrap();
        assert_eq!(t.frames, [vec![I]]);
    }

    #[test]
    fn built_in_matches_interp_on_and() {
        let generic =
            parse_structural_verilog("module t(input a, input b, output y); and g(.A(a), .B(b), .Y(y)); endmodule")
                .unwrap();
        let mapped =
            parse_structural_verilog("module t(input a, input b, output y); AND2X1 g(.A(a), .B(b), .Y(y)); endmodule")
                .unwrap();
        let lib = parse_liberty(AND_LIB).unwrap();
        let r = ExecutableDesign::generic_interp("ref", &generic, Harness::default()).unwrap();
        let d = ExecutableDesign::built_in("dut", &mapped, Some(&lib), Harness::default()).unwrap();
        let input = frames(r.layout(), &["00", "01", "10", "11"]);
        assert_eq!(r.execute(&input).unwrap(), d.execute(&input).unwrap());
    }

    #[test]
    fn external_failure_carries_stderr() {
        let nl = parse_structural_verilog("module t(input a, output y); buf g(.A(a), .Y(y)); endmodule").unwrap();
        let d = ExecutableDesign::external("ext", &nl, "echo boom >&2; exit 1", 10, None, Harness::default()).unwrap();
        match d.execute(&frames(d.layout(), &["1"])) {
            Err(ExecError::Process { stderr, .. }) => assert_eq!(stderr, "boom"),
            other => panic!("unexpected {other:?}"),
        }
        let d = ExecutableDesign::external("ext", &nl, "true", 10, None, Harness::default()).unwrap();
        assert!(matches!(d.execute(&frames(d.layout(), &["1"])), Err(ExecError::MissingVcd(_))));
    }

    #[test]
    fn external_reads_vcd() {
        let nl = parse_structural_verilog("module t(input a, output y); buf g(.A(a), .Y(y)); endmodule").unwrap();
        // A fake simulator that ignores the stimulus and reports y=1 at cycle 1.
        let cmd = "printf '$scope module t $end\\n$var wire 1 ! y $end\\n$upscope $end\\n$enddefinitions $end\\n#0\\n0!\\n#10\\n1!\\n' > {vcd}";
        let d = ExecutableDesign::external("ext", &nl, cmd, 10, None, Harness::default()).unwrap();
        let t = d.execute(&frames(d.layout(), &["0", "1"])).unwrap();
        assert_eq!(t.frames, [vec![O], vec![I]]);
    }

    fn tr(rows: &[&[Logic]]) -> Trace {
        let mut t = Trace::of_outputs(vec!["y".into(), "z".into()]);
        for r in rows {
            t.push(r.to_vec());
        }
        t
    }

    #[test]
    fn compare_policies() {
        let p = ComparePolicy::default();
        let a = tr(&[&[O, O], &[I, O], &[O, I], &[X, O]]);
        assert_eq!(compare_traces(&a, &a, &p).unwrap(), None);
        let b = tr(&[&[I, I], &[I, O], &[O, I], &[X, O]]);
        let d = compare_traces(&a, &b, &p).unwrap().unwrap();
        assert_eq!(d.cycle, 0);
        assert_eq!(d.signals.len(), 2);
        let skip = ComparePolicy { skip_cycles: 1, ..p.clone() };
        assert_eq!(compare_traces(&a, &b, &skip).unwrap(), None);
        let c = tr(&[&[O, O], &[I, O], &[O, I], &[I, O]]);
        assert_eq!(compare_traces(&a, &c, &p).unwrap(), None);
        let strict = ComparePolicy { x_handling: XHandling::Strict, ..p.clone() };
        let d = compare_traces(&a, &c, &strict).unwrap().unwrap();
        assert_eq!(d.cycle, 3);
        assert_eq!(d.signals, [DivergingSignal { signal: "y".into(), reference: X, dut: I }]);
        let short = tr(&[&[O, O]]);
        assert!(matches!(compare_traces(&a, &short, &p), Err(CompareError::LengthMismatch { .. })));
    }
}
