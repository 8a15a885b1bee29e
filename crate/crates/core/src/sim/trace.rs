// SPDX-License-Identifier: Apache-2.0
use serde::{Deserialize, Serialize};

use crate::logic::{self, Logic};

/// Per-cycle values of a fixed list of signals. The first `outputs` signals
/// are output-port bits; any further ones are extra monitored nets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub signals: Vec<String>,
    pub outputs: usize,
    #[serde(with = "frames_as_strings")]
    pub frames: Vec<Vec<Logic>>,
}

impl Trace {
    pub fn new(signals: Vec<String>, outputs: usize) -> Self {
        assert!(outputs <= signals.len());
        Trace { signals, outputs, frames: Vec::new() }
    }

    /// Trace whose signals are all outputs.
    pub fn of_outputs(signals: Vec<String>) -> Self {
        let n = signals.len();
        Trace::new(signals, n)
    }

    pub fn push(&mut self, frame: Vec<Logic>) {
        assert_eq!(frame.len(), self.signals.len(), "frame width");
        self.frames.push(frame);
    }

    pub fn cycles(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn signal_index(&self, name: &str) -> Option<usize> {
        self.signals.iter().position(|s| s == name)
    }

    pub fn value(&self, cycle: usize, signal: usize) -> Logic {
        self.frames[cycle][signal]
    }

    /// Values of one signal over all cycles.
    pub fn column(&self, signal: usize) -> Vec<Logic> {
        self.frames.iter().map(|f| f[signal]).collect()
    }
}

mod frames_as_strings {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(frames: &[Vec<Logic>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(frames.iter().map(|f| logic::to_string(f)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Logic>>, D::Error> {
        let rows: Vec<String> = Vec::deserialize(d)?;
        rows.iter()
            .map(|r| logic::parse_values(r).ok_or_else(|| D::Error::custom(format!("bad trace row `{r}`"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut t = Trace::new(vec!["y".into(), "n1".into()], 1);
        t.push(vec![Logic::X, Logic::One]);
        t.push(vec![Logic::Zero, Logic::One]);
        let j = serde_json::to_string(&t).unwrap();
        assert!(j.contains("\"x1\""));
        assert_eq!(serde_json::from_str::<Trace>(&j).unwrap(), t);
    }
}
