//! The four-element truth lattice `FOUR`.
//!
//! ```text
//!        top
//!       /   \
//!      t     f
//!       \   /
//!       bottom
//! ```
//!
//! Every value is also a pair of evidence bits: `t` carries the "true" bit,
//! `f` the "false" bit, `top` both and `bottom` none. The lattice order is
//! inclusion of bit sets and [`lub`] is their union.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// An annotation from `FOUR`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TruthValue {
    Bottom,
    True,
    False,
    Top,
}

/// Bit carried by `t` evidence.
pub const T_BIT: u8 = 0b01;
/// Bit carried by `f` evidence.
pub const F_BIT: u8 = 0b10;

impl TruthValue {
    pub const ALL: [TruthValue; 4] = [
        TruthValue::Bottom,
        TruthValue::True,
        TruthValue::False,
        TruthValue::Top,
    ];

    /// The evidence bits of this value.
    pub const fn bits(self) -> u8 {
        match self {
            TruthValue::Bottom => 0,
            TruthValue::True => T_BIT,
            TruthValue::False => F_BIT,
            TruthValue::Top => T_BIT | F_BIT,
        }
    }

    /// Inverse of [`TruthValue::bits`]; extra bits are ignored.
    pub const fn from_bits(bits: u8) -> TruthValue {
        match bits & (T_BIT | F_BIT) {
            0 => TruthValue::Bottom,
            T_BIT => TruthValue::True,
            F_BIT => TruthValue::False,
            _ => TruthValue::Top,
        }
    }

    /// Lattice order.
    pub const fn leq(self, other: TruthValue) -> bool {
        self.bits() & !other.bits() == 0
    }

    /// Least upper bound.
    pub const fn lub(self, other: TruthValue) -> TruthValue {
        TruthValue::from_bits(self.bits() | other.bits())
    }

    /// Greatest lower bound.
    pub const fn glb(self, other: TruthValue) -> TruthValue {
        TruthValue::from_bits(self.bits() & other.bits())
    }

    /// Epistemic negation: swaps `t` and `f`, fixes `top` and `bottom`.
    pub const fn eneg(self) -> TruthValue {
        match self {
            TruthValue::True => TruthValue::False,
            TruthValue::False => TruthValue::True,
            v => v,
        }
    }

    /// Canonical text name (`t`, `f`, `top`, `bottom`).
    pub const fn name(self) -> &'static str {
        match self {
            TruthValue::Bottom => "bottom",
            TruthValue::True => "t",
            TruthValue::False => "f",
            TruthValue::Top => "top",
        }
    }

    /// All values below or equal to `self`.
    pub fn downset(self) -> impl Iterator<Item = TruthValue> {
        TruthValue::ALL.into_iter().filter(move |v| v.leq(self))
    }
}

/// Free-function form of [`TruthValue::leq`].
pub fn leq(a: TruthValue, b: TruthValue) -> bool {
    a.leq(b)
}

/// Free-function form of [`TruthValue::lub`].
pub fn lub(a: TruthValue, b: TruthValue) -> TruthValue {
    a.lub(b)
}

/// Free-function form of [`TruthValue::eneg`].
pub fn eneg(a: TruthValue) -> TruthValue {
    a.eneg()
}

impl Default for TruthValue {
    fn default() -> Self {
        TruthValue::Bottom
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error for an unknown annotation name.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown annotation `{0}` (expected t, f, top or bottom)")]
pub struct UnknownAnnotation(pub String);

impl FromStr for TruthValue {
    type Err = UnknownAnnotation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "t" => Ok(TruthValue::True),
            "f" => Ok(TruthValue::False),
            "top" => Ok(TruthValue::Top),
            "bottom" => Ok(TruthValue::Bottom),
            other => Err(UnknownAnnotation(other.to_string())),
        }
    }
}

impl From<TruthValue> for String {
    fn from(v: TruthValue) -> String {
        v.name().to_string()
    }
}

impl TryFrom<String> for TruthValue {
    type Error = UnknownAnnotation;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::TruthValue::*;
    use super::*;

    #[test]
    fn order_examples() {
        assert!(leq(Bottom, True));
        assert!(!leq(True, False));
        assert!(!leq(False, True));
        assert!(leq(Top, Top));
        assert!(leq(False, Top));
        assert!(!leq(Top, True));
    }

    #[test]
    fn lub_examples() {
        assert_eq!(lub(True, False), Top);
        assert_eq!(lub(True, Top), Top);
        for v in TruthValue::ALL {
            assert_eq!(lub(Bottom, v), v);
        }
    }

    #[test]
    fn eneg_examples() {
        assert_eq!(eneg(True), False);
        assert_eq!(eneg(False), True);
        assert_eq!(eneg(Top), Top);
        assert_eq!(eneg(Bottom), Bottom);
    }

    #[test]
    fn names_round_trip() {
        for v in TruthValue::ALL {
            assert_eq!(v.name().parse::<TruthValue>().unwrap(), v);
            assert_eq!(TruthValue::from_bits(v.bits()), v);
        }
        assert!("true".parse::<TruthValue>().is_err());
    }

    #[test]
    fn downsets() {
        assert_eq!(Top.downset().count(), 4);
        assert_eq!(True.downset().collect::<Vec<_>>(), vec![Bottom, True]);
        assert_eq!(Bottom.downset().count(), 1);
    }
}
