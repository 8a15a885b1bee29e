// SPDX-License-Identifier: Apache-2.0
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::logic::Logic;
use crate::netlist::ElaboratedDesign;

/// Which of the two known values a pin has taken.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PinValues {
    pub zero: bool,
    pub one: bool,
}

impl PinValues {
    pub fn observe(&mut self, v: Logic) {
        match v {
            Logic::Zero => self.zero = true,
            Logic::One => self.one = true,
            Logic::X => {}
        }
    }

    pub fn both(self) -> bool {
        self.zero && self.one
    }

    pub fn any(self) -> bool {
        self.zero || self.one
    }

    pub fn union(self, other: PinValues) -> PinValues {
        PinValues { zero: self.zero || other.zero, one: self.one || other.one }
    }
}

/// Toggle counters and pin-value observations keyed by instance name.
/// Zero counters and empty observations are never stored, so two maps with
/// the same coverage compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageMap {
    pub rise: BTreeMap<String, u64>,
    pub fall: BTreeMap<String, u64>,
    pub pin_values: BTreeMap<String, BTreeMap<String, PinValues>>,
}

/// One unit of coverage, used for novelty checks and fingerprints.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Feature {
    Rise(String),
    Fall(String),
    Pin { instance: String, pin: String, value: bool },
}

impl CoverageMap {
    pub fn is_empty(&self) -> bool {
        self.rise.is_empty() && self.fall.is_empty() && self.pin_values.is_empty()
    }

    pub fn add_rise(&mut self, instance: &str, n: u64) {
        if n > 0 {
            *self.rise.entry(instance.to_string()).or_default() += n;
        }
    }

    pub fn add_fall(&mut self, instance: &str, n: u64) {
        if n > 0 {
            *self.fall.entry(instance.to_string()).or_default() += n;
        }
    }

    pub fn add_pin(&mut self, instance: &str, pin: &str, v: PinValues) {
        if v.any() {
            let slot = self.pin_values.entry(instance.to_string()).or_default().entry(pin.to_string()).or_default();
            *slot = slot.union(v);
        }
    }

    /// Pointwise count sum and observation union.
    pub fn merge(&mut self, other: &CoverageMap) {
        for (k, &n) in &other.rise {
            self.add_rise(k, n);
        }
        for (k, &n) in &other.fall {
            self.add_fall(k, n);
        }
        for (inst, pins) in &other.pin_values {
            for (pin, &v) in pins {
                self.add_pin(inst, pin, v);
            }
        }
    }

    pub fn merged(mut self, other: &CoverageMap) -> CoverageMap {
        self.merge(other);
        self
    }

    pub fn features(&self) -> BTreeSet<Feature> {
        let mut out = BTreeSet::new();
        out.extend(self.rise.keys().map(|k| Feature::Rise(k.clone())));
        out.extend(self.fall.keys().map(|k| Feature::Fall(k.clone())));
        for (inst, pins) in &self.pin_values {
            for (pin, v) in pins {
                for (seen, value) in [(v.zero, false), (v.one, true)] {
                    if seen {
                        out.insert(Feature::Pin { instance: inst.clone(), pin: pin.clone(), value });
                    }
                }
            }
        }
        out
    }

    pub fn has_feature(&self, f: &Feature) -> bool {
        match f {
            Feature::Rise(i) => self.rise.contains_key(i),
            Feature::Fall(i) => self.fall.contains_key(i),
            Feature::Pin { instance, pin, value } => self
                .pin_values
                .get(instance)
                .and_then(|p| p.get(pin))
                .is_some_and(|v| if *value { v.one } else { v.zero }),
        }
    }

    /// Whether `delta` holds a feature not present in `self`.
    pub fn is_extended_by(&self, delta: &CoverageMap) -> bool {
        delta.rise.keys().any(|k| !self.rise.contains_key(k))
            || delta.fall.keys().any(|k| !self.fall.contains_key(k))
            || delta.pin_values.iter().any(|(inst, pins)| {
                let known = self.pin_values.get(inst);
                pins.iter().any(|(pin, v)| {
                    let have = known.and_then(|k| k.get(pin)).copied().unwrap_or_default();
                    (v.zero && !have.zero) || (v.one && !have.one)
                })
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StuckPin {
    pub instance: String,
    pub pin: String,
    pub net: String,
    /// The only value seen, or `None` if the pin never left X.
    pub observed: Option<Logic>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub toggle_percent: f64,
    pub pin_percent: f64,
    pub instances: usize,
    pub toggled_instances: usize,
    pub pins: usize,
    pub covered_pins: usize,
    pub uncovered_instances: Vec<String>,
    pub stuck_pins: Vec<StuckPin>,
}

/// Summarize coverage over a design. Instances without data inputs (tie
/// cells) cannot toggle and are left out of the toggle denominator; clock
/// pins are left out of the pin denominator.
pub fn coverage_report(map: &CoverageMap, design: &ElaboratedDesign) -> CoverageReport {
    let mut instances = 0;
    let mut toggled = 0;
    let mut uncovered = Vec::new();
    let mut pins = 0;
    let mut covered = 0;
    let mut stuck = Vec::new();
    for (idx, ip) in design.pins.iter().enumerate() {
        let name = design.instance_name(idx);
        let data_pins: Vec<_> = ip.inputs.iter().filter(|(p, _)| ip.clock_pin.as_deref() != Some(p.as_str())).collect();
        if !data_pins.is_empty() {
            instances += 1;
            if map.rise.contains_key(name) && map.fall.contains_key(name) {
                toggled += 1;
            } else {
                uncovered.push(name.to_string());
            }
        }
        for (pin, net) in data_pins {
            pins += 1;
            let v = map.pin_values.get(name).and_then(|p| p.get(pin)).copied().unwrap_or_default();
            if v.both() {
                covered += 1;
            } else {
                let observed = match (v.zero, v.one) {
                    (true, false) => Some(Logic::Zero),
                    (false, true) => Some(Logic::One),
                    _ => None,
                };
                stuck.push(StuckPin { instance: name.to_string(), pin: pin.clone(), net: net.clone(), observed });
            }
        }
    }
    let pct = |a: usize, b: usize| if b == 0 { 100.0 } else { a as f64 * 100.0 / b as f64 };
    CoverageReport {
        toggle_percent: pct(toggled, instances),
        pin_percent: pct(covered, pins),
        instances,
        toggled_instances: toggled,
        pins,
        covered_pins: covered,
        uncovered_instances: uncovered,
        stuck_pins: stuck,
    }
}
