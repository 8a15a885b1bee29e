// SPDX-License-Identifier: Apache-2.0
//! Corpus of coverage-increasing inputs and its on-disk form.

use std::io;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::sim::CoverageMap;
use crate::stimulus::{render_bits, NetInput, PortLayout};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusEntry {
    pub input: NetInput,
    /// Hex SHA-256 over the sorted feature list of the entry's coverage.
    pub fingerprint: String,
    pub iteration: u64,
}

/// Stable digest of a coverage map's feature set.
pub fn fingerprint(map: &CoverageMap) -> String {
    let mut h = Sha256::new();
    for f in map.features() {
        h.update(serde_json::to_string(&f).expect("features serialize").as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    mask: String,
    fingerprint: String,
    iteration: u64,
    frames: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub rng_seed: u64,
    pub iteration: u64,
    #[serde(skip)]
    turn: u64,
    #[serde(skip)]
    cursor: usize,
}

/// How many of the newest entries the recency half of the schedule cycles over.
pub const RECENT_WINDOW: usize = 4;

impl Corpus {
    pub fn new(rng_seed: u64) -> Self {
        Corpus { rng_seed, ..Corpus::default() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, entry: CorpusEntry) {
        self.entries.push(entry);
    }

    /// Next parent: turns alternate between a round-robin pass over the
    /// whole corpus and a cycle over the newest entries.
    pub fn next_index(&mut self) -> Option<usize> {
        let n = self.entries.len();
        if n == 0 {
            return None;
        }
        let turn = self.turn;
        self.turn += 1;
        if turn.is_multiple_of(2) {
            let i = self.cursor % n;
            self.cursor = (i + 1) % n;
            Some(i)
        } else {
            let m = n.min(RECENT_WINDOW);
            Some(n - 1 - ((turn / 2) as usize % m))
        }
    }

    /// One `NNNNNN.bin` (packed frames) plus `NNNNNN.json` per entry.
    pub fn write_dir(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (i, e) in self.entries.iter().enumerate() {
            std::fs::write(dir.join(format!("{i:06}.bin")), e.input.to_packed())?;
            let side = Sidecar {
                mask: render_bits(e.input.control_mask()),
                fingerprint: e.fingerprint.clone(),
                iteration: e.iteration,
                frames: e.input.len(),
            };
            std::fs::write(dir.join(format!("{i:06}.json")), serde_json::to_string_pretty(&side)? + "\n")?;
        }
        Ok(())
    }

    /// Read a corpus written by [`Corpus::write_dir`].
    pub fn read_dir(dir: &Path, layout: &Arc<PortLayout>) -> io::Result<Corpus> {
        let mut names: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "bin"))
            .collect();
        names.sort();
        let bad = |m: String| io::Error::new(io::ErrorKind::InvalidData, m);
        let mut corpus = Corpus::default();
        for bin in names {
            let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(bin.with_extension("json"))?)?;
            let mask =
                crate::stimulus::parse_bits(&side.mask).ok_or_else(|| bad(format!("bad mask in {}", bin.display())))?;
            let data = std::fs::read(&bin)?;
            let input = NetInput::from_packed(layout.clone(), &data, mask).map_err(|e| bad(e.to_string()))?;
            if input.len() != side.frames {
                return Err(bad(format!("{}: frame count disagrees with sidecar", bin.display())));
            }
            corpus.entries.push(CorpusEntry { input, fingerprint: side.fingerprint, iteration: side.iteration });
        }
        Ok(corpus)
    }
}
