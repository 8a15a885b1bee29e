// SPDX-License-Identifier: Apache-2.0
//! `netfuzz`: lint, simulate, map, fuzz, and compare gate-level netlists.
//!
//! Exit status: 0 clean, 1 findings (lint findings, bugs, divergences,
//! scan findings), 2 usage, file, or parse errors.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use netfuzz::clima::{inject, inject_targeted, scan, AreaPolicy, Donor, InjectionSpec};
use netfuzz::diff::{enumerate_inputs, run_difflib, DiffLibConfig, ExecutableDesign, InputSource};
use netfuzz::fuzz::{run_campaign, Corpus};
use netfuzz::liberty::{parse_liberty_with_warnings, write_liberty, CellLibrary};
use netfuzz::logic::parse_values;
use netfuzz::mapper::{build_match_index, map_netlist};
use netfuzz::netlist::{
    check, elaborate, parse_structural_verilog, write_structural_verilog, ElabError, Netlist, PortRole,
};
use netfuzz::sim::{coverage_report, CoverageMap, Harness, Simulator};
use netfuzz::stimulus::{derive_layout, parse_bits, render_bits, NetInput};
use netfuzz::vcd::write_vcd;

use config::{harness, DesignSource, ProjectConfig};

#[derive(Parser)]
#[command(name = "netfuzz", version, about = "Coverage-guided differential fuzzing of gate-level netlists")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Each can also be set through the
/// matching `NETFUZZ_*` environment variable.
#[derive(Args, Clone)]
struct Global {
    /// Configuration file (fuzz, diff).
    #[arg(long, global = true, env = "NETFUZZ_CONFIG")]
    config: Option<PathBuf>,
    /// RNG seed, overriding the configuration.
    #[arg(long, global = true, env = "NETFUZZ_SEED")]
    seed: Option<u64>,
    /// Worker threads, overriding the configuration.
    #[arg(long, global = true, env = "NETFUZZ_WORKERS")]
    workers: Option<usize>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true, env = "NETFUZZ_OUT")]
    out: Option<PathBuf>,
    /// Input port to treat as the clock.
    #[arg(long, global = true, env = "NETFUZZ_CLOCK")]
    clock: Option<String>,
    /// Input port to treat as the reset.
    #[arg(long, global = true, env = "NETFUZZ_RESET")]
    reset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and elaborate, reporting structural findings as JSON.
    Lint {
        netlist: PathBuf,
        #[arg(long)]
        lib: Option<PathBuf>,
    },
    /// Simulate a netlist on an input and print the trace.
    Sim(SimArgs),
    /// Map a generic netlist onto a library's cells.
    Map {
        netlist: PathBuf,
        #[arg(long)]
        lib: PathBuf,
        /// Where to write the mapping report (stderr otherwise).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a fuzzing campaign described by `--config`.
    Fuzz,
    /// Run a cross-library differential matrix described by `--config`.
    Diff,
    /// Library tampering and tamper detection.
    #[command(subcommand)]
    Clima(Clima),
    /// Coverage report over random inputs or a stored corpus.
    CovReport(CovArgs),
}

#[derive(Args)]
struct SimArgs {
    netlist: PathBuf,
    #[arg(long)]
    lib: Option<PathBuf>,
    /// Input frames: NetInput JSON, or one frame per line (highest bit first).
    #[arg(long, conflicts_with = "stimulus")]
    input: Option<PathBuf>,
    /// Raw stimulus: one line per cycle with every non-clock input bit in
    /// declaration order, reset included.
    #[arg(long)]
    stimulus: Option<PathBuf>,
    /// Also write the trace as VCD.
    #[arg(long)]
    vcd: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    period: u64,
    #[arg(long, default_value_t = 0)]
    reset_cycles: usize,
    /// Record every net, not only outputs.
    #[arg(long)]
    all_nets: bool,
}

#[derive(Subcommand)]
enum Clima {
    /// Relabel a cell's function and area.
    Inject(Box<InjectArgs>),
    /// Look for tampered cells.
    Scan {
        #[arg(long)]
        lib: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InjectArgs {
    #[arg(long)]
    lib: PathBuf,
    /// Injection spec as JSON (replaces the target/donor/area flags).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, required_unless_present = "spec")]
    target: Option<String>,
    /// Donor cell whose function the target takes.
    #[arg(long, conflicts_with = "donor_function")]
    donor_cell: Option<String>,
    /// Donor function over the target's pin names.
    #[arg(long)]
    donor_function: Option<String>,
    /// Explicit tampered area.
    #[arg(long, conflicts_with_all = ["epsilon", "keep_area"])]
    area: Option<f64>,
    /// Undercut for the automatic area.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    keep_area: bool,
    /// Mapped netlist for targeted substitution.
    #[arg(long, requires = "instances")]
    netlist: Option<PathBuf>,
    /// Comma-separated instances to re-point at the target cell.
    #[arg(long, value_delimiter = ',', requires = "netlist")]
    instances: Vec<String>,
    /// Where the substituted netlist goes.
    #[arg(long)]
    netlist_out: Option<PathBuf>,
    /// Where the injection record goes (stdout otherwise).
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Args)]
struct CovArgs {
    netlist: PathBuf,
    #[arg(long)]
    lib: Option<PathBuf>,
    /// Number of random inputs.
    #[arg(long, default_value_t = 1000)]
    random: usize,
    /// Frames per random input; toggles are only seen within one input.
    #[arg(long, default_value_t = 4)]
    frames: usize,
    /// Replay a stored corpus instead of random inputs.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    reset_cycles: usize,
}

enum Outcome {
    Clean,
    Findings,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Findings) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = cli.global;
    match cli.command {
        Command::Lint { netlist, lib } => cmd_lint(&g, &netlist, lib.as_deref()),
        Command::Sim(a) => cmd_sim(&g, a),
        Command::Map { netlist, lib, report } => cmd_map(&g, &netlist, &lib, report.as_deref()),
        Command::Fuzz => cmd_fuzz(&g),
        Command::Diff => cmd_diff(&g),
        Command::Clima(Clima::Inject(a)) => cmd_inject(&g, *a),
        Command::Clima(Clima::Scan { lib, reference }) => cmd_scan(&g, &lib, reference.as_deref()),
        Command::CovReport(a) => cmd_cov(&g, a),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_library(path: &Path) -> Result<CellLibrary> {
    let parsed = parse_liberty_with_warnings(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    for (cell, why) in &parsed.warnings {
        eprintln!("warning: {}: skipped cell {cell}: {why}", path.display());
    }
    Ok(parsed.library)
}

fn load_netlist(g: &Global, path: &Path) -> Result<Netlist> {
    let mut n = parse_structural_verilog(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(c) = &g.clock {
        n.set_role(c, PortRole::Clock)?;
    }
    if let Some(r) = &g.reset {
        n.set_role(r, PortRole::Reset)?;
    }
    Ok(n)
}

/// Write to `--out` when given, else stdout.
fn emit(g: &Global, text: &str) -> Result<()> {
    match &g.out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn finding_json(e: &ElabError) -> Value {
    let msg = e.to_string();
    match e {
        ElabError::MultipleDriver { net, drivers } => {
            json!({"kind": "MultipleDriver", "net": net, "drivers": drivers, "message": msg})
        }
        ElabError::UndrivenNet { net } => json!({"kind": "UndrivenNet", "net": net, "message": msg}),
        ElabError::CombinationalLoop { instances } => {
            json!({"kind": "CombinationalLoop", "instances": instances, "message": msg})
        }
        ElabError::UnknownCell { instance, cell } => {
            json!({"kind": "UnknownCell", "instance": instance, "cell": cell, "message": msg})
        }
        ElabError::UnknownPin { instance, pin } => {
            json!({"kind": "UnknownPin", "instance": instance, "pin": pin, "message": msg})
        }
        ElabError::UnconnectedPin { instance, pin } => {
            json!({"kind": "UnconnectedPin", "instance": instance, "pin": pin, "message": msg})
        }
        ElabError::Invalid { .. } => json!({"kind": "Invalid", "message": msg}),
    }
}

fn cmd_lint(g: &Global, netlist: &Path, lib: Option<&Path>) -> Result<Outcome> {
    let n = load_netlist(g, netlist)?;
    let lib = lib.map(load_library).transpose()?;
    let findings = check(&n, lib.as_ref());
    let list: Vec<Value> = findings.iter().map(finding_json).collect();
    emit(g, &(serde_json::to_string(&json!({ "findings": list }))? + "\n"))?;
    Ok(if findings.is_empty() { Outcome::Clean } else { Outcome::Findings })
}

fn read_frames(path: &Path, layout: &std::sync::Arc<netfuzz::stimulus::PortLayout>) -> Result<NetInput> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text)?;
        return Ok(NetInput::from_json(layout.clone(), &v)?);
    }
    let frames = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_bits(l).ok_or_else(|| anyhow!("bad frame `{l}`")))
        .collect::<Result<Vec<_>>>()?;
    Ok(NetInput::with_frames(layout.clone(), frames)?)
}

fn cmd_sim(g: &Global, a: SimArgs) -> Result<Outcome> {
    let n = load_netlist(g, &a.netlist)?;
    let lib = a.lib.as_deref().map(load_library).transpose()?;
    let design = elaborate(&n, lib.as_ref())?;
    let mut sim = Simulator::new(&design, lib.as_ref())?;
    let mut h = Harness { reset_cycles: a.reset_cycles, ..Harness::default() };
    if a.all_nets {
        h.monitor = netfuzz::sim::Monitor::AllNets;
    }
    let (trace, _) = if let Some(stim) = &a.stimulus {
        let rows = read(stim)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| parse_values(l).ok_or_else(|| anyhow!("bad stimulus line `{l}`")))
            .collect::<Result<Vec<_>>>()?;
        sim.run_frames(&rows, &Harness { reset_cycles: 0, ..h })?
    } else {
        let layout = std::sync::Arc::new(derive_layout(&n)?);
        let input = match &a.input {
            Some(p) => read_frames(p, &layout)?,
            None => bail!("one of --input or --stimulus is required"),
        };
        sim.run(&input, &h)?
    };
    if let Some(v) = &a.vcd {
        write_file(v, &write_vcd(&trace, a.period, &n.name))?;
    }
    if a.vcd.is_none() || g.out.is_some() {
        emit(g, &pretty(&trace)?)?;
    }
    Ok(Outcome::Clean)
}

fn cmd_map(g: &Global, netlist: &Path, lib: &Path, report: Option<&Path>) -> Result<Outcome> {
    let n = load_netlist(g, netlist)?;
    let l = load_library(lib)?;
    let (mapped, rep) = map_netlist(&n, &build_match_index(&l))?;
    emit(g, &write_structural_verilog(&mapped))?;
    let text = pretty(&rep)?;
    match report {
        Some(p) => write_file(p, &text)?,
        None => eprint!("{text}"),
    }
    Ok(Outcome::Clean)
}

fn build_design(
    g: &Global,
    cfg: &ProjectConfig,
    src: &DesignSource,
    name: &str,
    h: &Harness,
    generic_reference: bool,
) -> Result<ExecutableDesign> {
    let mut n = load_netlist(g, &cfg.resolve(&src.netlist))?;
    if let Some(c) = &cfg.harness.clock {
        n.set_role(c, PortRole::Clock)?;
    }
    if let Some(r) = &cfg.harness.reset {
        n.set_role(r, PortRole::Reset)?;
    }
    if let Some(cmd) = &src.command {
        return Ok(ExecutableDesign::external(name, &n, cmd.clone(), src.period, None, h.clone())?);
    }
    if let Some(m) = &src.map_with {
        n = map_netlist(&n, &build_match_index(&load_library(&cfg.resolve(m))?))?.0;
    }
    match &src.library {
        Some(l) => Ok(ExecutableDesign::built_in(name, &n, Some(&load_library(&cfg.resolve(l))?), h.clone())?),
        None if generic_reference && src.map_with.is_none() => {
            Ok(ExecutableDesign::generic_interp(name, &n, h.clone())?)
        }
        None => Ok(ExecutableDesign::built_in(name, &n, None, h.clone())?),
    }
}

fn cmd_fuzz(g: &Global) -> Result<Outcome> {
    let path = g.config.as_deref().ok_or_else(|| anyhow!("fuzz needs --config"))?;
    let mut cfg = ProjectConfig::load(path)?;
    if let Some(s) = g.seed {
        cfg.campaign.seed = s;
    }
    if let Some(w) = g.workers {
        cfg.campaign.workers = w;
    }
    cfg.campaign.validate()?;
    let h = cfg.harness();
    let dut = build_design(g, &cfg, &cfg.design, "dut", &h, false)?;
    let reference = build_design(g, &cfg, &cfg.reference, "reference", &h, true)?;
    if let Some(a) = &cfg.paths.annotation {
        let n = load_netlist(g, &cfg.resolve(&cfg.design.netlist))?;
        let mask = dut.layout().parse_annotation(&n, &read(&cfg.resolve(a))?)?;
        cfg.campaign.control_mask = Some(render_bits(&mask));
    }
    let out_dir = match &g.out {
        Some(o) => o.clone(),
        None => cfg.paths.reports.as_ref().map(|r| cfg.resolve(r)).unwrap_or_else(|| cfg.resolve(Path::new("out"))),
    };
    let corpus_dir = match (&g.out, &cfg.paths.corpus) {
        (None, Some(c)) => cfg.resolve(c),
        _ => out_dir.join("corpus"),
    };
    let result = run_campaign(&cfg.campaign, &dut, &reference)?;
    let mut corpus = Corpus::new(cfg.campaign.seed);
    result.corpus.iter().cloned().for_each(|e| corpus.push(e));
    if corpus_dir.exists() {
        std::fs::remove_dir_all(&corpus_dir)?;
    }
    corpus.write_dir(&corpus_dir)?;
    std::fs::create_dir_all(&out_dir)?;
    write_file(&out_dir.join("bugs.json"), &pretty(&result.bugs)?)?;
    write_file(&out_dir.join("coverage.jsonl"), &result.snapshots_jsonl())?;
    let summary = json!({
        "executions": result.executions,
        "divergent_executions": result.divergent_executions,
        "first_bug_execution": result.first_bug_execution,
        "bugs": result.bugs.len(),
        "corpus": result.corpus.len(),
        "stop": result.stop,
        "coverage": dut.coverage_report(&result.coverage),
        "meta": result.meta,
    });
    write_file(&out_dir.join("summary.json"), &pretty(&summary)?)?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(if result.bugs.is_empty() { Outcome::Clean } else { Outcome::Findings })
}

fn cmd_diff(g: &Global) -> Result<Outcome> {
    let path = g.config.as_deref().ok_or_else(|| anyhow!("diff needs --config"))?;
    let mut cfg = DiffLibConfig::from_toml(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    if let (Some(s), InputSource::Random { seed, .. } | InputSource::Campaign { seed, .. }) = (g.seed, &mut cfg.inputs)
    {
        *seed = s;
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let matrix = run_difflib(&cfg, base)?;
    emit(g, &pretty(&matrix)?)?;
    Ok(if matrix.total_divergences() == 0 { Outcome::Clean } else { Outcome::Findings })
}

fn cmd_inject(g: &Global, a: InjectArgs) -> Result<Outcome> {
    let lib = load_library(&a.lib)?;
    let spec = match &a.spec {
        Some(p) => InjectionSpec::from_json(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => {
            let donor = match (a.donor_cell, a.donor_function) {
                (Some(c), None) => Donor::Cell(c),
                (None, Some(f)) => Donor::Function(f),
                _ => bail!("give exactly one of --donor-cell or --donor-function"),
            };
            let area = match (a.area, a.epsilon, a.keep_area) {
                (Some(x), _, _) => AreaPolicy::Explicit(x),
                (None, _, true) => AreaPolicy::Keep,
                (None, Some(e), false) => AreaPolicy::Auto { epsilon: e },
                (None, None, false) => AreaPolicy::default(),
            };
            InjectionSpec { target: a.target.expect("required by clap"), donor, area }
        }
    };
    let record = match &a.netlist {
        Some(np) => {
            let n = load_netlist(g, np)?;
            let (tampered, out, rec) = inject_targeted(&lib, &spec, &n, &a.instances)?;
            emit(g, &write_liberty(&tampered))?;
            let text = write_structural_verilog(&out);
            match &a.netlist_out {
                Some(p) => write_file(p, &text)?,
                None => bail!("targeted injection needs --netlist-out"),
            }
            rec
        }
        None => {
            let (tampered, rec) = inject(&lib, &spec)?;
            emit(g, &write_liberty(&tampered))?;
            rec
        }
    };
    let text = pretty(&record)?;
    match &a.record {
        Some(p) => write_file(p, &text)?,
        None if g.out.is_some() => print!("{text}"),
        None => eprint!("{text}"),
    }
    Ok(Outcome::Clean)
}

fn cmd_scan(g: &Global, lib: &Path, reference: Option<&Path>) -> Result<Outcome> {
    let suspect = load_library(lib)?;
    let reference = reference.map(load_library).transpose()?;
    let findings = scan(&suspect, reference.as_ref());
    emit(g, &pretty(&json!({ "findings": findings }))?)?;
    Ok(if findings.is_empty() { Outcome::Clean } else { Outcome::Findings })
}

fn cmd_cov(g: &Global, a: CovArgs) -> Result<Outcome> {
    let n = load_netlist(g, &a.netlist)?;
    let lib = a.lib.as_deref().map(load_library).transpose()?;
    let design = elaborate(&n, lib.as_ref())?;
    let mut sim = Simulator::new(&design, lib.as_ref())?;
    let layout = std::sync::Arc::new(derive_layout(&n)?);
    let inputs = match &a.corpus {
        Some(dir) => Corpus::read_dir(dir, &layout)?.entries.into_iter().map(|e| e.input).collect(),
        None => enumerate_inputs(
            &InputSource::Random { count: a.random, frames: a.frames, seed: g.seed.unwrap_or(0) },
            &layout,
        )?,
    };
    let h = harness(a.reset_cycles, 1, &[]);
    let mut acc = CoverageMap::default();
    for input in &inputs {
        let (_, c) = sim.run(input, &h)?;
        acc.merge(&c);
    }
    let report = coverage_report(&acc, &design);
    emit(g, &pretty(&json!({ "inputs": inputs.len(), "report": report }))?)?;
    Ok(Outcome::Clean)
}
