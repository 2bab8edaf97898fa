use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::Result;

/// Parameter case selecting a constant family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `1 < p ≤ q`
    I,
    /// `p = 1 ≤ q`
    II,
    /// `1 < p`, `q < p`
    III,
    /// `q < 1 = p`
    IV,
    /// `p < 1`, `p ≤ q`
    V,
    /// `p < 1`, `q < p`
    VI,
    /// weak target, `p > 1`
    G,
    /// weak target, `p ≤ 1`
    H,
    /// weak source and weak target
    WeakWeak,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::I => "(i)",
            Regime::II => "(ii)",
            Regime::III => "(iii)",
            Regime::IV => "(iv)",
            Regime::V => "(v)",
            Regime::VI => "(vi)",
            Regime::G => "G",
            Regime::H => "H",
            Regime::WeakWeak => "I",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Regime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// Strong-target case for exponents `p, q > 0`.
pub fn regime_select(p: f64, q: f64) -> Result<Regime> {
    super::check_exponent("p", p)?;
    super::check_exponent("q", q)?;
    Ok(if p > 1.0 {
        if p <= q {
            Regime::I
        } else {
            Regime::III
        }
    } else if p == 1.0 {
        if q >= 1.0 {
            Regime::II
        } else {
            Regime::IV
        }
    } else if p <= q {
        Regime::V
    } else {
        Regime::VI
    })
}
