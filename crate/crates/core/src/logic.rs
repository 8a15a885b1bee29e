// SPDX-License-Identifier: Apache-2.0
//! Three-valued logic values with Kleene semantics.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A single logic value: `0`, `1`, or unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Logic {
    Zero,
    One,
    #[default]
    X,
}

impl Logic {
    pub const fn from_bool(b: bool) -> Self {
        if b {
            Logic::One
        } else {
            Logic::Zero
        }
    }

    /// Returns the boolean value, or `None` for X.
    pub const fn to_bool(self) -> Option<bool> {
        match self {
            Logic::Zero => Some(false),
            Logic::One => Some(true),
            Logic::X => None,
        }
    }

    pub const fn is_known(self) -> bool {
        !matches!(self, Logic::X)
    }

    pub const fn not(self) -> Self {
        match self {
            Logic::Zero => Logic::One,
            Logic::One => Logic::Zero,
            Logic::X => Logic::X,
        }
    }

    pub const fn and(self, other: Self) -> Self {
        match (self, other) {
            (Logic::Zero, _) | (_, Logic::Zero) => Logic::Zero,
            (Logic::One, Logic::One) => Logic::One,
            _ => Logic::X,
        }
    }

    pub const fn or(self, other: Self) -> Self {
        match (self, other) {
            (Logic::One, _) | (_, Logic::One) => Logic::One,
            (Logic::Zero, Logic::Zero) => Logic::Zero,
            _ => Logic::X,
        }
    }

    pub const fn xor(self, other: Self) -> Self {
        match (self, other) {
            (Logic::X, _) | (_, Logic::X) => Logic::X,
            (a, b) => Logic::from_bool(!matches!((a, b), (Logic::Zero, Logic::Zero) | (Logic::One, Logic::One))),
        }
    }

    /// `if sel { b } else { a }`, with X select resolving only when both data inputs agree.
    pub const fn mux(a: Self, b: Self, sel: Self) -> Self {
        match sel {
            Logic::Zero => a,
            Logic::One => b,
            Logic::X => match (a, b) {
                (Logic::Zero, Logic::Zero) => Logic::Zero,
                (Logic::One, Logic::One) => Logic::One,
                _ => Logic::X,
            },
        }
    }

    pub const fn to_char(self) -> char {
        match self {
            Logic::Zero => '0',
            Logic::One => '1',
            Logic::X => 'x',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Logic::Zero),
            '1' => Some(Logic::One),
            'x' | 'X' => Some(Logic::X),
            _ => None,
        }
    }
}

impl From<bool> for Logic {
    fn from(b: bool) -> Self {
        Logic::from_bool(b)
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl Serialize for Logic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_char(self.to_char())
    }
}

impl<'de> Deserialize<'de> for Logic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let mut chars = s.chars();
        match (chars.next().and_then(Logic::from_char), chars.next()) {
            (Some(v), None) => Ok(v),
            _ => Err(serde::de::Error::custom(format!("invalid logic value `{s}`"))),
        }
    }
}

/// Render a slice of values as a `0`/`1`/`x` string, first element first.
pub fn to_string(values: &[Logic]) -> String {
    values.iter().map(|v| v.to_char()).collect()
}

/// Parse a `0`/`1`/`x` string; whitespace and `_` separators are ignored.
pub fn parse_values(s: &str) -> Option<Vec<Logic>> {
    s.chars().filter(|c| !c.is_whitespace() && *c != '_').map(Logic::from_char).collect()
}

#[cfg(test)]
mod tests {
    use super::Logic::{self, *};

    const ALL: [Logic; 3] = [Zero, One, X];

    #[test]
    fn kleene_dominance() {
        assert_eq!(Zero.and(X), Zero);
        assert_eq!(X.and(Zero), Zero);
        assert_eq!(One.or(X), One);
        assert_eq!(X.not(), X);
        assert_eq!(X.xor(One), X);
        assert_eq!(One.and(X), X);
    }

    #[test]
    fn boolean_restriction_matches_bool_ops() {
        for a in [false, true] {
            for b in [false, true] {
                let (la, lb) = (Logic::from(a), Logic::from(b));
                assert_eq!(la.and(lb), Logic::from(a & b));
                assert_eq!(la.or(lb), Logic::from(a | b));
                assert_eq!(la.xor(lb), Logic::from(a ^ b));
            }
        }
    }

    #[test]
    fn ops_commute() {
        for a in ALL {
            for b in ALL {
                assert_eq!(a.and(b), b.and(a));
                assert_eq!(a.or(b), b.or(a));
                assert_eq!(a.xor(b), b.xor(a));
            }
        }
    }

    #[test]
    fn mux_with_unknown_select() {
        assert_eq!(Logic::mux(One, One, X), One);
        assert_eq!(Logic::mux(Zero, One, X), X);
        assert_eq!(Logic::mux(Zero, One, One), One);
    }

    #[test]
    fn string_round_trip() {
        let v = super::parse_values("01x_X").unwrap();
        assert_eq!(v, vec![Zero, One, X, X]);
        assert_eq!(super::to_string(&v), "01xx");
        assert!(super::parse_values("012").is_none());
    }
}
