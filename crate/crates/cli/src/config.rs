// SPDX-License-Identifier: Apache-2.0
//! Project configuration for `netfuzz fuzz`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use netfuzz::fuzz::CampaignConfig;
use netfuzz::logic::Logic;
use netfuzz::sim::{Harness, Monitor};

/// A netlist plus how to run it.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSource {
    pub netlist: PathBuf,
    /// Simulation library; absent for generic netlists.
    #[serde(default)]
    pub library: Option<PathBuf>,
    /// Map the (generic) netlist with this library before simulating.
    #[serde(default)]
    pub map_with: Option<PathBuf>,
    /// External simulator command with `{stimulus}` and `{vcd}` placeholders.
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default = "default_period")]
    pub period: u64,
}

fn default_period() -> u64 {
    10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessConfig {
    #[serde(default = "default_active")]
    pub reset_active: u8,
    #[serde(default)]
    pub clock: Option<String>,
    #[serde(default)]
    pub reset: Option<String>,
    /// Extra nets compared and recorded besides the outputs.
    #[serde(default)]
    pub monitor: Vec<String>,
}

fn default_active() -> u8 {
    1
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig { reset_active: 1, clock: None, reset: None, monitor: Vec::new() }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    #[serde(default)]
    pub reports: Option<PathBuf>,
    /// Control-bit annotation file.
    #[serde(default)]
    pub annotation: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub design: DesignSource,
    pub reference: DesignSource,
    #[serde(default)]
    pub harness: HarnessConfig,
    #[serde(default)]
    pub campaign: CampaignConfig,
    #[serde(default)]
    pub paths: Paths,
    #[serde(skip)]
    pub base: PathBuf,
}

impl ProjectConfig {
    /// Read, resolve relative paths against the file's directory, and
    /// check that every referenced input exists.
    pub fn load(path: &Path) -> Result<ProjectConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: ProjectConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base.join(p)
    }

    fn validate(&self) -> Result<()> {
        let mut inputs = Vec::new();
        for d in [&self.design, &self.reference] {
            inputs.push(&d.netlist);
            inputs.extend(d.library.iter());
            inputs.extend(d.map_with.iter());
            if d.period == 0 {
                bail!("period must be positive");
            }
        }
        inputs.extend(self.paths.annotation.iter());
        for p in inputs {
            let full = self.resolve(p);
            if !full.is_file() {
                bail!("{} does not exist", full.display());
            }
        }
        if self.harness.reset_active > 1 {
            bail!("reset_active must be 0 or 1");
        }
        self.campaign.validate()?;
        Ok(())
    }

    pub fn harness(&self) -> Harness {
        harness(self.campaign.reset_cycles, self.harness.reset_active, &self.harness.monitor)
    }
}

pub fn harness(reset_cycles: usize, reset_active: u8, monitor: &[String]) -> Harness {
    Harness {
        reset_cycles,
        reset_active: if reset_active == 0 { Logic::Zero } else { Logic::One },
        monitor: if monitor.is_empty() { Monitor::Outputs } else { Monitor::OutputsAnd(monitor.to_vec()) },
    }
}
