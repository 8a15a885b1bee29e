// SPDX-License-Identifier: Apache-2.0
//! The coverage-guided differential campaign loop.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::corpus::{fingerprint, Corpus, CorpusEntry};
use super::mutate::{mutate, random_seed, FrameBounds, MutationOp};
use crate::diff::{check_input, BugReport, ComparePolicy, Divergence, ExecError, ExecutableDesign, XHandling};
use crate::sim::CoverageMap;
use crate::stimulus::NetInput;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    /// Executions, initial seeds included.
    pub max_iterations: u64,
    /// Wall-clock budget in seconds.
    pub time_budget_secs: Option<f64>,
    pub min_frames: usize,
    pub max_frames: usize,
    /// Applied by callers when they build the executable designs.
    pub reset_cycles: usize,
    pub seed: u64,
    pub workers: usize,
    pub initial_seeds: usize,
    /// An input joins the corpus once it adds at least this many features.
    pub min_new_features: usize,
    pub x_handling: XHandling,
    pub stop_on_first_bug: bool,
    /// Executions between coverage snapshots.
    pub snapshot_every: u64,
    /// Control-mask bits, highest index first; all data when absent.
    pub control_mask: Option<String>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            max_iterations: 10_000,
            time_budget_secs: None,
            min_frames: 1,
            max_frames: 4,
            reset_cycles: 0,
            seed: 0,
            workers: 1,
            initial_seeds: 8,
            min_new_features: 1,
            x_handling: XHandling::default(),
            stop_on_first_bug: false,
            snapshot_every: 100,
            control_mask: None,
        }
    }
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        let bad = |m: &str| Err(CampaignError::Config(m.to_string()));
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if self.time_budget_secs.is_some_and(|t| t.is_nan() || t <= 0.0) {
            return bad("time_budget_secs must be positive");
        }
        if self.min_frames == 0 || self.min_frames > self.max_frames {
            return bad("need 1 <= min_frames <= max_frames");
        }
        if self.workers == 0 {
            return bad("workers must be positive");
        }
        if self.min_new_features == 0 {
            return bad("min_new_features must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("invalid campaign config: {0}")]
    Config(String),
    #[error("designs `{dut}` and `{reference}` have different input layouts")]
    LayoutMismatch { dut: String, reference: String },
    #[error("execution failed on input {input:?}: {source}")]
    Exec { input: Box<NetInput>, source: ExecError },
}

/// True iff `delta` holds a feature not in `accumulated`.
pub fn is_interesting(accumulated: &CoverageMap, delta: &CoverageMap) -> bool {
    accumulated.is_extended_by(delta)
}

fn new_features(accumulated: &CoverageMap, delta: &CoverageMap) -> usize {
    delta.features().into_iter().filter(|f| !accumulated.has_feature(f)).count()
}

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub iteration: u64,
    pub toggle_percent: Option<f64>,
    pub pin_percent: Option<f64>,
    pub features: usize,
    pub corpus: usize,
    pub bugs: usize,
    pub elapsed_ms: u64,
}

impl PartialEq for Snapshot {
    fn eq(&self, o: &Self) -> bool {
        self.iteration == o.iteration
            && self.toggle_percent == o.toggle_percent
            && self.pin_percent == o.pin_percent
            && self.features == o.features
            && self.corpus == o.corpus
            && self.bugs == o.bugs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Iterations,
    Time,
    FirstBug,
}

/// Run facts that vary between otherwise identical runs.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignMeta {
    pub elapsed_secs: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignResult {
    pub corpus: Vec<CorpusEntry>,
    /// One report per distinct diverging-signal set, in discovery order.
    pub bugs: Vec<BugReport>,
    pub executions: u64,
    pub divergent_executions: u64,
    pub first_bug_execution: Option<u64>,
    pub coverage: CoverageMap,
    pub snapshots: Vec<Snapshot>,
    pub stop: StopReason,
    pub meta: CampaignMeta,
}

impl PartialEq for CampaignResult {
    fn eq(&self, o: &Self) -> bool {
        self.corpus == o.corpus
            && self.bugs == o.bugs
            && self.executions == o.executions
            && self.divergent_executions == o.divergent_executions
            && self.first_bug_execution == o.first_bug_execution
            && self.coverage == o.coverage
            && self.snapshots == o.snapshots
            && self.stop == o.stop
    }
}

impl CampaignResult {
    /// Snapshots as JSON lines.
    pub fn snapshots_jsonl(&self) -> String {
        self.snapshots.iter().map(|s| serde_json::to_string(s).expect("snapshot serializes") + "\n").collect()
    }
}

/// One executed input as seen by the campaign owner.
struct Event {
    input: NetInput,
    coverage: CoverageMap,
    divergence: Option<Divergence>,
}

struct Worker<'a> {
    rng: ChaCha8Rng,
    layout: std::sync::Arc<crate::stimulus::PortLayout>,
    corpus: Corpus,
    accumulated: CoverageMap,
    reference: crate::diff::Runner<'a>,
    dut: crate::diff::Runner<'a>,
    policy: ComparePolicy,
    mask: Option<Vec<bool>>,
    bounds: FrameBounds,
    seeds_left: usize,
    min_new: usize,
    iteration: u64,
}

impl Worker<'_> {
    fn next_input(&mut self) -> (NetInput, Option<MutationOp>) {
        let layout = self.layout.clone();
        if self.seeds_left > 0 || self.corpus.is_empty() {
            self.seeds_left = self.seeds_left.saturating_sub(1);
            let frames = self.rng.random_range(self.bounds.min..=self.bounds.max);
            return (random_seed(&layout, frames, &mut self.rng, self.mask.as_deref()), None);
        }
        let i = self.corpus.next_index().expect("corpus is non-empty");
        let parent = self.corpus.entries[i].input.clone();
        let (m, op) = mutate(&parent, &mut self.rng, self.bounds);
        (m, Some(op))
    }

    fn step(&mut self) -> Result<Event, CampaignError> {
        let (input, _op) = self.next_input();
        self.iteration += 1;
        let (divergence, cov) = check_input(&mut self.reference, &mut self.dut, &input, &self.policy)
            .map_err(|source| CampaignError::Exec { input: Box::new(input.clone()), source })?;
        let coverage = cov.unwrap_or_default();
        if new_features(&self.accumulated, &coverage) >= self.min_new {
            self.corpus.push(CorpusEntry {
                input: input.clone(),
                fingerprint: fingerprint(&coverage),
                iteration: self.iteration,
            });
            self.accumulated.merge(&coverage);
        }
        Ok(Event { input, coverage, divergence })
    }
}

struct Owner<'a> {
    config: &'a CampaignConfig,
    dut: &'a ExecutableDesign,
    reference: &'a ExecutableDesign,
    corpus: Corpus,
    accumulated: CoverageMap,
    bugs: Vec<BugReport>,
    signatures: BTreeSet<Vec<String>>,
    executions: u64,
    divergent: u64,
    first_bug: Option<u64>,
    snapshots: Vec<Snapshot>,
    start: Instant,
}

impl Owner<'_> {
    fn admit(&mut self, ev: Event) {
        self.executions += 1;
        let it = self.executions;
        if let Some(div) = ev.divergence {
            self.divergent += 1;
            self.first_bug.get_or_insert(it);
            let report = BugReport::new(ev.input.clone(), div, &self.dut.name, &self.reference.name, it);
            if self.signatures.insert(report.signature()) {
                self.bugs.push(report);
            }
        }
        if new_features(&self.accumulated, &ev.coverage) >= self.config.min_new_features {
            self.corpus.push(CorpusEntry { input: ev.input, fingerprint: fingerprint(&ev.coverage), iteration: it });
            self.accumulated.merge(&ev.coverage);
        }
        self.corpus.iteration = it;
        if self.config.snapshot_every > 0 && it.is_multiple_of(self.config.snapshot_every) {
            self.snapshot();
        }
    }

    fn snapshot(&mut self) {
        let report = self.dut.coverage_report(&self.accumulated);
        self.snapshots.push(Snapshot {
            iteration: self.executions,
            toggle_percent: report.as_ref().map(|r| r.toggle_percent),
            pin_percent: report.as_ref().map(|r| r.pin_percent),
            features: self.accumulated.features().len(),
            corpus: self.corpus.len(),
            bugs: self.bugs.len(),
            elapsed_ms: self.start.elapsed().as_millis() as u64,
        });
    }

    fn finish(mut self, stop: StopReason) -> CampaignResult {
        if self.snapshots.last().is_none_or(|s| s.iteration != self.executions) {
            self.snapshot();
        }
        CampaignResult {
            corpus: self.corpus.entries,
            bugs: self.bugs,
            executions: self.executions,
            divergent_executions: self.divergent,
            first_bug_execution: self.first_bug,
            coverage: self.accumulated,
            snapshots: self.snapshots,
            stop,
            meta: CampaignMeta { elapsed_secs: self.start.elapsed().as_secs_f64(), workers: self.config.workers },
        }
    }
}

fn make_worker<'a>(
    config: &CampaignConfig,
    dut: &'a ExecutableDesign,
    reference: &'a ExecutableDesign,
    mask: Option<Vec<bool>>,
    seed: u64,
    seeds: usize,
) -> Worker<'a> {
    let mut policy = ComparePolicy::for_harness(&dut.harness);
    policy.x_handling = config.x_handling;
    Worker {
        rng: ChaCha8Rng::seed_from_u64(seed),
        layout: dut.layout().clone(),
        corpus: Corpus::new(seed),
        accumulated: CoverageMap::default(),
        reference: reference.runner(),
        dut: dut.runner(),
        policy,
        mask,
        bounds: FrameBounds { min: config.min_frames, max: config.max_frames },
        seeds_left: seeds,
        min_new: config.min_new_features,
        iteration: 0,
    }
}

/// Fuzz `dut` against `reference`. With one worker the result is a pure
/// function of the config and the designs, apart from `meta`.
pub fn run_campaign(
    config: &CampaignConfig,
    dut: &ExecutableDesign,
    reference: &ExecutableDesign,
) -> Result<CampaignResult, CampaignError> {
    config.validate()?;
    if **dut.layout() != **reference.layout() {
        return Err(CampaignError::LayoutMismatch { dut: dut.name.clone(), reference: reference.name.clone() });
    }
    let mask = match &config.control_mask {
        Some(m) => {
            let bits = crate::stimulus::parse_bits(m)
                .filter(|b| b.len() == dut.layout().frame_width)
                .ok_or_else(|| CampaignError::Config(format!("control mask `{m}` does not match the layout")))?;
            Some(bits)
        }
        None => None,
    };
    let deadline = config.time_budget_secs.map(|s| Instant::now() + Duration::from_secs_f64(s));
    let mut owner = Owner {
        config,
        dut,
        reference,
        corpus: Corpus::new(config.seed),
        accumulated: CoverageMap::default(),
        bugs: Vec::new(),
        signatures: BTreeSet::new(),
        executions: 0,
        divergent: 0,
        first_bug: None,
        snapshots: Vec::new(),
        start: Instant::now(),
    };
    let stop_check = |o: &Owner| -> Option<StopReason> {
        if config.stop_on_first_bug && o.first_bug.is_some() {
            Some(StopReason::FirstBug)
        } else if o.executions >= config.max_iterations {
            Some(StopReason::Iterations)
        } else if deadline.is_some_and(|d| Instant::now() >= d) {
            Some(StopReason::Time)
        } else {
            None
        }
    };

    if config.workers == 1 {
        let mut w = make_worker(config, dut, reference, mask, config.seed, config.initial_seeds);
        loop {
            if let Some(r) = stop_check(&owner) {
                return Ok(owner.finish(r));
            }
            let ev = w.step()?;
            owner.admit(ev);
        }
    }

    // Workers explore privately and stream every execution to the owner,
    // which alone decides corpus admission and bug deduplication.
    let issued = AtomicU64::new(0);
    let halt = AtomicBool::new(false);
    let (tx, rx) = mpsc::sync_channel::<Result<Event, CampaignError>>(64);
    let per_worker_seeds = config.initial_seeds.div_ceil(config.workers);
    let outcome = std::thread::scope(|s| {
        for k in 0..config.workers {
            let tx = tx.clone();
            let mask = mask.clone();
            let (issued, halt) = (&issued, &halt);
            s.spawn(move || {
                let mut w =
                    make_worker(config, dut, reference, mask, config.seed.wrapping_add(k as u64), per_worker_seeds);
                while !halt.load(Ordering::Relaxed) && issued.fetch_add(1, Ordering::Relaxed) < config.max_iterations {
                    let ev = w.step();
                    let failed = ev.is_err();
                    if tx.send(ev).is_err() || failed {
                        break;
                    }
                }
            });
        }
        drop(tx);
        let mut stop = None;
        for ev in rx {
            match ev {
                Ok(ev) => owner.admit(ev),
                Err(e) => {
                    halt.store(true, Ordering::Relaxed);
                    return Err(e);
                }
            }
            if stop.is_none() {
                stop = stop_check(&owner);
                if stop.is_some() {
                    halt.store(true, Ordering::Relaxed);
                }
            }
        }
        Ok(stop.unwrap_or(StopReason::Iterations))
    });
    let stop = outcome?;
    Ok(owner.finish(stop))
}
