// SPDX-License-Identifier: Apache-2.0
//! Truth tables and permutation-canonical function keys.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::expr::{BoolExpr, ExprError};
use crate::logic::Logic;

pub const MAX_TABLE_INPUTS: usize = 8;
pub const MAX_CANONICAL_INPUTS: usize = 6;

/// Entry `i` is the function value with input `k` set to bit `k` of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    inputs: usize,
    bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TruthError {
    #[error("{got} inputs exceeds the limit of {max}")]
    TooManyInputs { got: usize, max: usize },
    #[error("table has {got} entries, expected {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl TruthTable {
    pub fn new(inputs: usize, bits: Vec<bool>) -> Result<Self, TruthError> {
        if inputs > MAX_TABLE_INPUTS {
            return Err(TruthError::TooManyInputs { got: inputs, max: MAX_TABLE_INPUTS });
        }
        if bits.len() != 1 << inputs {
            return Err(TruthError::SizeMismatch { got: bits.len(), expected: 1 << inputs });
        }
        Ok(TruthTable { inputs, bits })
    }

    /// Build from a `0`/`1` string, entry 0 first.
    pub fn from_bit_str(inputs: usize, s: &str) -> Result<Self, TruthError> {
        Self::new(inputs, s.chars().filter(|c| *c == '0' || *c == '1').map(|c| c == '1').collect())
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, index: usize) -> bool {
        self.bits[index]
    }

    /// The function seen when external input `i` drives original input `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> TruthTable {
        debug_assert_eq!(perm.len(), self.inputs);
        let bits = (0..self.bits.len())
            .map(|x| {
                let mut y = 0usize;
                for (i, &p) in perm.iter().enumerate() {
                    if x >> i & 1 == 1 {
                        y |= 1 << p;
                    }
                }
                self.bits[y]
            })
            .collect();
        TruthTable { inputs: self.inputs, bits }
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for TruthTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TruthTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let n = s.len().trailing_zeros() as usize;
        TruthTable::from_bit_str(n, &s).map_err(serde::de::Error::custom)
    }
}

/// Evaluate `expr` over every assignment of `pin_order` (LSB-first indexing).
pub fn truth_table(expr: &BoolExpr, pin_order: &[&str]) -> Result<TruthTable, TruthError> {
    let n = pin_order.len();
    if n > MAX_TABLE_INPUTS {
        return Err(TruthError::TooManyInputs { got: n, max: MAX_TABLE_INPUTS });
    }
    let prog = expr.compile(pin_order)?;
    let mut inputs = vec![Logic::Zero; n];
    let bits = (0..1usize << n)
        .map(|i| {
            for (k, slot) in inputs.iter_mut().enumerate() {
                *slot = Logic::from_bool(i >> k & 1 == 1);
            }
            prog.eval(&inputs) == Logic::One
        })
        .collect();
    Ok(TruthTable { inputs: n, bits })
}

/// All permutations of `0..n` in lexicographic order, identity first.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// Lexicographically smallest table over all input permutations.
pub fn canonical_key(table: &TruthTable) -> Result<TruthTable, TruthError> {
    canonical_with_perm(table).map(|(t, _)| t)
}

/// Canonical table and the first permutation (lexicographic order) that produces it.
pub fn canonical_with_perm(table: &TruthTable) -> Result<(TruthTable, Vec<usize>), TruthError> {
    if table.inputs > MAX_CANONICAL_INPUTS {
        return Err(TruthError::TooManyInputs { got: table.inputs, max: MAX_CANONICAL_INPUTS });
    }
    let mut best: Option<(TruthTable, Vec<usize>)> = None;
    for perm in permutations(table.inputs) {
        let t = table.permute(&perm);
        if best.as_ref().is_none_or(|(b, _)| t.bits < b.bits) {
            best = Some((t, perm));
        }
    }
    Ok(best.expect("at least the identity permutation"))
}

/// Like [`canonical_key`] but for a raw bit vector with an explicit input count.
pub fn canonical_key_bits(bits: &[bool], n: usize) -> Result<Vec<bool>, TruthError> {
    if n > MAX_CANONICAL_INPUTS {
        return Err(TruthError::TooManyInputs { got: n, max: MAX_CANONICAL_INPUTS });
    }
    let t = TruthTable::new(n, bits.to_vec())?;
    Ok(canonical_key(&t)?.bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(s: &str, order: &[&str]) -> TruthTable {
        truth_table(&BoolExpr::parse(s).unwrap(), order).unwrap()
    }

    #[test]
    fn basic_tables() {
        assert_eq!(tt("!A", &["A"]).to_string(), "10");
        assert_eq!(tt("A&B", &["A", "B"]).to_string(), "0001");
        // brute force: index i has A = bit0, B = bit1, C = bit2
        let mut expected = String::new();
        for i in 0..8 {
            let (a, b, c) = (i & 1 == 1, i & 2 == 2, i & 4 == 4);
            expected.push(if (a && b) || c { '1' } else { '0' });
        }
        assert_eq!(expected, "00011111");
        assert_eq!(tt("(A&B)|C", &["A", "B", "C"]).to_string(), expected);
    }

    #[test]
    fn too_many_pins() {
        let pins = ["a", "b", "c", "d", "e", "f", "g", "h", "i"];
        assert!(matches!(truth_table(&BoolExpr::Const(true), &pins), Err(TruthError::TooManyInputs { got: 9, .. })));
    }

    #[test]
    fn canonical_examples() {
        let ab = tt("A&B", &["A", "B"]);
        let ba = tt("B&A", &["B", "A"]);
        assert_eq!(canonical_key(&ab).unwrap(), canonical_key(&ba).unwrap());
        let anb = tt("A&!B", &["A", "B"]);
        assert_eq!(anb.to_string(), "0100");
        // the two permutations give 0100 and 0010
        assert_eq!(canonical_key(&anb).unwrap().to_string(), "0010");
        assert_ne!(canonical_key(&ab).unwrap(), canonical_key(&tt("A|B", &["A", "B"])).unwrap());
    }

    #[test]
    fn size_mismatch() {
        assert_eq!(canonical_key_bits(&[false, true, true], 2), Err(TruthError::SizeMismatch { got: 3, expected: 4 }));
        assert!(matches!(canonical_key_bits(&[false; 128], 7), Err(TruthError::TooManyInputs { .. })));
    }

    #[test]
    fn permutation_order() {
        assert_eq!(
            permutations(3),
            vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]]
        );
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn permute_rewires_inputs() {
        // cell f(P0, P1) = P0 & !P1; wiring external 0 -> P1, external 1 -> P0 gives x1 & !x0
        let t = tt("A&!B", &["A", "B"]);
        assert_eq!(t.permute(&[1, 0]), tt("B&!A", &["A", "B"]));
    }
}
