//! Vector bundles on ℙ¹ given by a single Laurent transition.
//!
//! Convention: a section is a pair of coordinate vectors `v_A(t)` (polynomial
//! in `t`) and `v_B(s)` (polynomial in `s = 1/t`) with `v_B = T·v_A`. Under
//! this convention the `1×1` transition `t^{-a}` is `O(a)`: its sections are
//! `1, t, …, t^a`.

mod birkhoff;
mod oracle;

use std::fmt;

use crate::error::{Error, Result};
use crate::exact_algebra::{JetLaurentMatrix, Rational, Scalar};
use crate::hn_profile::{Block, HNProfile};
use num_bigint::BigInt;

pub use birkhoff::{birkhoff, BirkhoffFactorization};
pub use oracle::{h0_oracle, section_degree_bound, splitting_from_h0};

/// Transition of a bundle on ℙ¹; no `x` dependence, `det = c·t^m`, `c ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Transition {
    matrix: JetLaurentMatrix,
    det_coeff: Scalar,
    det_exponent: i64,
}

impl P1Transition {
    /// Accepts any matrix without `x`-terms whose determinant is a single
    /// Laurent monomial.
    pub fn new(matrix: JetLaurentMatrix) -> Result<Self> {
        if matrix.x_degree().is_some_and(|d| d > 0) {
            return Err(Error::NotABundleTransition(
                "transition on the divisor must not depend on x".into(),
            ));
        }
        let matrix = matrix.with_jet_order(0);
        let (det_coeff, det_exponent) = matrix.det().as_laurent_monomial().ok_or_else(|| {
            Error::NotABundleTransition(format!(
                "determinant {} is not of the form c·t^m",
                matrix.det()
            ))
        })?;
        Ok(P1Transition {
            matrix,
            det_coeff,
            det_exponent,
        })
    }

    pub fn matrix(&self) -> &JetLaurentMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// `m` in `det T = c·t^m`.
    pub fn det_exponent(&self) -> i64 {
        self.det_exponent
    }

    pub fn det_coeff(&self) -> &Scalar {
        &self.det_coeff
    }

    /// Degree of the determinant line bundle, `-m`.
    pub fn degree(&self) -> i64 {
        -self.det_exponent
    }

    /// Transition of `E ⊗ O(d)`.
    pub fn twist(&self, d: i64) -> Self {
        P1Transition {
            matrix: self.matrix.shift_t(-d),
            det_coeff: self.det_coeff.clone(),
            det_exponent: self.det_exponent - d * self.rank() as i64,
        }
    }

    pub fn birkhoff(&self) -> BirkhoffFactorization {
        birkhoff(self)
    }

    pub fn splitting_type(&self) -> SplittingType {
        self.birkhoff().splitting
    }

    pub fn h0(&self, d: i64) -> usize {
        h0_oracle(self, d)
    }
}

/// Exponents `a_1 ≥ … ≥ a_r` of `O(a_1) ⊕ … ⊕ O(a_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplittingType(Vec<i64>);

impl SplittingType {
    /// Sorts into descending order.
    pub fn new(mut exponents: Vec<i64>) -> Self {
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        SplittingType(exponents)
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `a_1 - a_r`.
    pub fn spread(&self) -> i64 {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) => a - b,
            _ => 0,
        }
    }

    /// Every exponent shifted by `k` (tensoring with `O(k)`).
    pub fn shifted(&self, k: i64) -> Self {
        SplittingType(self.0.iter().map(|a| a + k).collect())
    }

    /// `Σ max(a_i + d + 1, 0)`.
    pub fn h0(&self, d: i64) -> usize {
        self.0.iter().map(|a| (a + d + 1).max(0) as usize).sum()
    }

    /// Multiplicities of the distinct exponents, highest first.
    pub fn groups(&self) -> Vec<(usize, i64)> {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for &a in &self.0 {
            match out.last_mut() {
                Some((n, b)) if *b == a => *n += 1,
                _ => out.push((1, a)),
            }
        }
        out
    }

    /// HN data: equal exponents grouped, integer slopes.
    pub fn hn_blocks(&self) -> HNProfile {
        hn_blocks(self)
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Groups equal exponents into `(rank, slope)` blocks on ℙ¹ (`n = 2`).
pub fn hn_blocks(s: &SplittingType) -> HNProfile {
    let blocks = s
        .groups()
        .into_iter()
        .map(|(rank, a)| Block::new(rank as u32, Rational::from_integer(BigInt::from(a))))
        .collect();
    HNProfile::new(blocks, 2).expect("grouped splitting type is a valid profile")
}

/// `Φ = a_1 - a_r` as a rational, for interop with [`HNProfile::phi`].
pub fn phi_of(s: &SplittingType) -> Rational {
    Rational::from_integer(BigInt::from(s.spread()))
}
