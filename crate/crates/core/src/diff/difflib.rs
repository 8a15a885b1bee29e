// SPDX-License-Identifier: Apache-2.0
//! Differential matrix across (tool, library) netlist sources.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_input, BugReport, ComparePolicy, ExecError, ExecutableDesign};
use crate::fuzz::{run_campaign, CampaignConfig, CampaignError};
use crate::liberty::parse_liberty;
use crate::mapper::{build_match_index, map_netlist};
use crate::netlist::{parse_structural_verilog, Netlist};
use crate::sim::Harness;
use crate::stimulus::{parse_bits, NetInput, PortLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    IntraToolInterLib,
    InterToolIntraLib,
    InterToolInterLib,
    AllPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairClass {
    IntraToolIntraLib,
    IntraToolInterLib,
    InterToolIntraLib,
    InterToolInterLib,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceTag {
    pub tool: String,
    pub lib: String,
}

impl SourceTag {
    pub fn name(&self) -> String {
        format!("{}/{}", self.tool, self.lib)
    }

    pub fn class(&self, other: &SourceTag) -> PairClass {
        match (self.tool == other.tool, self.lib == other.lib) {
            (true, true) => PairClass::IntraToolIntraLib,
            (true, false) => PairClass::IntraToolInterLib,
            (false, true) => PairClass::InterToolIntraLib,
            (false, false) => PairClass::InterToolInterLib,
        }
    }
}

impl Pairing {
    pub fn admits(self, class: PairClass) -> bool {
        match self {
            Pairing::AllPairs => true,
            Pairing::IntraToolInterLib => class == PairClass::IntraToolInterLib,
            Pairing::InterToolIntraLib => class == PairClass::InterToolIntraLib,
            Pairing::InterToolInterLib => class == PairClass::InterToolInterLib,
        }
    }
}

/// One netlist source. `library` is the simulation library; with
/// `map_with`, the netlist is generic and is first mapped with that library.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub tool: String,
    pub lib: String,
    pub netlist: PathBuf,
    #[serde(default)]
    pub library: Option<PathBuf>,
    #[serde(default)]
    pub map_with: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    /// Generic-gate netlist run through the interpreter.
    pub netlist: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InputSource {
    /// Every input sequence of `frames` frames.
    Exhaustive {
        #[serde(default = "one")]
        frames: usize,
    },
    Random {
        count: usize,
        #[serde(default = "one")]
        frames: usize,
        #[serde(default)]
        seed: u64,
    },
    /// Explicit inputs; each is a list of frames rendered highest bit first.
    Fixed { inputs: Vec<Vec<String>> },
    /// A fuzzing campaign per compared pair.
    Campaign {
        iterations: u64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "one")]
        min_frames: usize,
        #[serde(default = "four")]
        max_frames: usize,
    },
}

fn one() -> usize {
    1
}

fn four() -> usize {
    4
}

impl Default for InputSource {
    fn default() -> Self {
        InputSource::Exhaustive { frames: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffLibConfig {
    pub pairing: Pairing,
    #[serde(default)]
    pub reset_cycles: usize,
    #[serde(rename = "source")]
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub reference: Option<ReferenceSpec>,
    #[serde(default)]
    pub inputs: InputSource,
    /// Reports kept per pair.
    #[serde(default = "default_max_reports")]
    pub max_reports: usize,
}

fn default_max_reports() -> usize {
    10
}

impl DiffLibConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCell {
    pub a: SourceTag,
    pub b: SourceTag,
    pub class: PairClass,
    pub executions: u64,
    pub divergent_inputs: u64,
    pub reports: Vec<BugReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffMatrix {
    pub pairing: Pairing,
    pub reference: Option<String>,
    pub cells: Vec<PairCell>,
}

impl DiffMatrix {
    pub fn total_divergences(&self) -> u64 {
        self.cells.iter().map(|c| c.divergent_inputs).sum()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DiffLibError {
    #[error("need at least two sources, got {0}")]
    TooFewSources(usize),
    #[error("pairing mode {0:?} admits no pair of the configured sources")]
    NoPairs(Pairing),
    #[error("source `{0}` has a different input layout")]
    IncompatibleLayouts(String),
    #[error("exhaustive enumeration of {0} bits is too large")]
    TooLarge(usize),
    #[error("bad fixed input: {0}")]
    BadInput(String),
    #[error("{path}: {msg}")]
    Load { path: String, msg: String },
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Campaign(#[from] CampaignError),
}

fn load_err(path: &Path, e: impl std::fmt::Display) -> DiffLibError {
    DiffLibError::Load { path: path.display().to_string(), msg: e.to_string() }
}

fn read_netlist(path: &Path) -> Result<Netlist, DiffLibError> {
    let text = std::fs::read_to_string(path).map_err(|e| load_err(path, e))?;
    parse_structural_verilog(&text).map_err(|e| load_err(path, e))
}

fn read_library(path: &Path) -> Result<crate::liberty::CellLibrary, DiffLibError> {
    let text = std::fs::read_to_string(path).map_err(|e| load_err(path, e))?;
    parse_liberty(&text).map_err(|e| load_err(path, e))
}

/// Build the executable designs for a source; paths resolve against `base`.
pub fn load_source(spec: &SourceSpec, base: &Path, harness: &Harness) -> Result<ExecutableDesign, DiffLibError> {
    let path = base.join(&spec.netlist);
    let mut netlist = read_netlist(&path)?;
    if let Some(m) = &spec.map_with {
        let lib = read_library(&base.join(m))?;
        netlist = map_netlist(&netlist, &build_match_index(&lib)).map_err(|e| load_err(&path, e))?.0;
    }
    let sim_lib = match &spec.library {
        Some(l) => Some(read_library(&base.join(l))?),
        None => None,
    };
    let tag = SourceTag { tool: spec.tool.clone(), lib: spec.lib.clone() };
    Ok(ExecutableDesign::built_in(tag.name(), &netlist, sim_lib.as_ref(), harness.clone())?)
}

/// Load every source named by `config` and run the matrix.
pub fn run_difflib(config: &DiffLibConfig, base: &Path) -> Result<DiffMatrix, DiffLibError> {
    let harness = Harness { reset_cycles: config.reset_cycles, ..Harness::default() };
    let sources = config
        .sources
        .iter()
        .map(|s| Ok((SourceTag { tool: s.tool.clone(), lib: s.lib.clone() }, load_source(s, base, &harness)?)))
        .collect::<Result<Vec<_>, DiffLibError>>()?;
    let reference = match &config.reference {
        Some(r) => {
            let nl = read_netlist(&base.join(&r.netlist))?;
            Some(ExecutableDesign::generic_interp("reference", &nl, harness.clone())?)
        }
        None => None,
    };
    run_matrix(&sources, reference.as_ref(), config.pairing, &config.inputs, config.max_reports)
}

/// Inputs for the non-campaign sources.
pub fn enumerate_inputs(source: &InputSource, layout: &Arc<PortLayout>) -> Result<Vec<NetInput>, DiffLibError> {
    let w = layout.frame_width;
    match source {
        InputSource::Exhaustive { frames } => {
            let bits = w * frames;
            if bits > 20 {
                return Err(DiffLibError::TooLarge(bits));
            }
            Ok((0..1u64 << bits)
                .map(|v| {
                    let fr = (0..*frames).map(|f| (0..w).map(|i| v >> (f * w + i) & 1 == 1).collect()).collect();
                    NetInput::with_frames(layout.clone(), fr).expect("sized to layout")
                })
                .collect())
        }
        InputSource::Random { count, frames, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok((0..*count)
                .map(|_| {
                    let fr = (0..*frames).map(|_| (0..w).map(|_| rng.random::<bool>()).collect()).collect();
                    NetInput::with_frames(layout.clone(), fr).expect("sized to layout")
                })
                .collect())
        }
        InputSource::Fixed { inputs } => inputs
            .iter()
            .map(|frames| {
                let fr = frames
                    .iter()
                    .map(|f| parse_bits(f).ok_or_else(|| DiffLibError::BadInput(f.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                NetInput::with_frames(layout.clone(), fr).map_err(|e| DiffLibError::BadInput(e.to_string()))
            })
            .collect(),
        InputSource::Campaign { .. } => Ok(Vec::new()),
    }
}

/// Compare every admitted pair. With a reference each source is checked
/// against it; otherwise the first source of a pair is the reference.
pub fn run_matrix(
    sources: &[(SourceTag, ExecutableDesign)],
    reference: Option<&ExecutableDesign>,
    pairing: Pairing,
    inputs: &InputSource,
    max_reports: usize,
) -> Result<DiffMatrix, DiffLibError> {
    if sources.len() < 2 {
        return Err(DiffLibError::TooFewSources(sources.len()));
    }
    let layout = sources[0].1.layout().clone();
    for (tag, d) in sources.iter().skip(1) {
        if **d.layout() != *layout {
            return Err(DiffLibError::IncompatibleLayouts(tag.name()));
        }
    }
    if let Some(r) = reference {
        if **r.layout() != *layout {
            return Err(DiffLibError::IncompatibleLayouts(r.name.clone()));
        }
    }
    let mut pairs = Vec::new();
    for i in 0..sources.len() {
        for j in i + 1..sources.len() {
            let class = sources[i].0.class(&sources[j].0);
            if pairing.admits(class) {
                pairs.push((i, j, class));
            }
        }
    }
    if pairs.is_empty() {
        return Err(DiffLibError::NoPairs(pairing));
    }
    let fixed = enumerate_inputs(inputs, &layout)?;
    let mut cells = Vec::new();
    for (i, j, class) in pairs {
        let (ta, da) = &sources[i];
        let (tb, db) = &sources[j];
        let mut cell =
            PairCell { a: ta.clone(), b: tb.clone(), class, executions: 0, divergent_inputs: 0, reports: Vec::new() };
        let checks: Vec<(&ExecutableDesign, &ExecutableDesign)> = match reference {
            Some(r) => vec![(r, da), (r, db)],
            None => vec![(da, db)],
        };
        match inputs {
            InputSource::Campaign { iterations, seed, min_frames, max_frames } => {
                for (r, d) in checks {
                    let cfg = CampaignConfig {
                        max_iterations: *iterations,
                        seed: *seed,
                        min_frames: *min_frames,
                        max_frames: *max_frames,
                        ..CampaignConfig::default()
                    };
                    let res = run_campaign(&cfg, d, r)?;
                    cell.executions += res.executions;
                    cell.divergent_inputs += res.divergent_executions;
                    cell.reports.extend(res.bugs.into_iter().take(max_reports.saturating_sub(cell.reports.len())));
                }
            }
            _ => {
                let mut runners: Vec<_> = checks.iter().map(|(r, d)| (r.runner(), d.runner(), *r, *d)).collect();
                for input in &fixed {
                    let mut diverged = false;
                    for (rr, dr, r, d) in runners.iter_mut() {
                        let policy = ComparePolicy::for_harness(&d.harness);
                        let (div, _) = check_input(rr, dr, input, &policy)?;
                        if let Some(div) = div {
                            diverged = true;
                            if cell.reports.len() < max_reports {
                                cell.reports.push(BugReport::new(
                                    input.clone(),
                                    div,
                                    &d.name,
                                    &r.name,
                                    cell.executions,
                                ));
                            }
                        }
                    }
                    cell.executions += 1;
                    cell.divergent_inputs += diverged as u64;
                }
            }
        }
        cells.push(cell);
    }
    Ok(DiffMatrix { pairing, reference: reference.map(|r| r.name.clone()), cells })
}
