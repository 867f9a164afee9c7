//! Monotonicity analysis of linear constitutive laws and their Fitzpatrick
//! bipotentials.
//!
//! A linear law `y = Ax` is *n-monotone* when every closed chain of `n`
//! graph points has a non-positive cycle sum. This crate decides that
//! property, computes the largest such `n`, and builds the increasing
//! sequence of Fitzpatrick functions `F_{A,n}` that represent the law as a
//! bipotential.
//!
//! * [`symlin`]: symmetric eigen-kernel: definiteness, square roots,
//!   pseudo-inverse solves.
//! * [`monotone`]: [`LinearLaw`], cycle sums, maximal monotonicity order.
//! * [`fitzpatrick`]: kernels `H_k`, evaluation of `F_{A,n}`, the symmetric
//!   closed form and the separable limit `φ + φ*`.
//! * [`coaxial`]: linear coaxial laws on symmetric 3×3 tensors.
//! * [`bipotential`]: axiom sampling and the Cauchy–Schwarz sequence.
//! * [`oracle`]: brute-force cross-checks used to certify the closed forms.

pub mod bipotential;
pub mod coaxial;
mod error;
pub mod fitzpatrick;
pub mod monotone;
pub mod oracle;
pub mod symlin;

pub use error::{Error, Result};
pub use monotone::{Certification, LinearLaw, MaxOrder, Order};
pub use symlin::{Definiteness, DefinitenessClass, SymMatrix};

/// Order index of a Fitzpatrick function or bipotential: a finite `n ≥ 2` or
/// the pointwise limit `n → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SeqIndex {
    Finite(usize),
    Infinite,
}

impl SeqIndex {
    pub fn finite(self) -> Option<usize> {
        match self {
            SeqIndex::Finite(n) => Some(n),
            SeqIndex::Infinite => None,
        }
    }
}

impl std::fmt::Display for SeqIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeqIndex::Finite(n) => write!(f, "{n}"),
            SeqIndex::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for SeqIndex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(SeqIndex::Infinite),
            other => other
                .parse::<usize>()
                .map(SeqIndex::Finite)
                .map_err(|e| format!("expected an integer or `inf`, got `{other}`: {e}")),
        }
    }
}
