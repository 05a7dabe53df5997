use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// Information in bits. Always finite and non-negative.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitCost(f64);

impl BitCost {
    pub const ZERO: BitCost = BitCost(0.0);

    /// Clamps tiny negative rounding residue (e.g. `log2(x/x)`) to zero.
    pub fn new(bits: f64) -> Self {
        assert!(bits.is_finite(), "bit cost must be finite, got {bits}");
        assert!(bits > -1e-12, "bit cost must be non-negative, got {bits}");
        BitCost(bits.max(0.0))
    }

    pub fn bits(self) -> f64 {
        self.0
    }
}

impl Add for BitCost {
    type Output = BitCost;
    fn add(self, rhs: BitCost) -> BitCost {
        BitCost(self.0 + rhs.0)
    }
}

impl Sum for BitCost {
    fn sum<I: Iterator<Item = BitCost>>(iter: I) -> BitCost {
        BitCost(stable_sum(iter.map(|c| c.0)))
    }
}

impl fmt::Display for BitCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.0)
    }
}

/// Order-independent sum: the terms are sorted before adding, so any
/// permutation of the same multiset gives a bit-identical total.
pub fn stable_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = terms.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().fold(0.0, |acc, x| acc + x)
}
