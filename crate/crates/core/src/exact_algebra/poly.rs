//! Sparse polynomials in `t, t⁻¹` and `x`, truncated modulo `x^{N+1}`.
//!
//! `x` is the defining function of the exceptional divisor in the `(x, t)`
//! chart and `t` is the affine coordinate along it. Only finitely many
//! monomials are ever stored, zero coefficients never are.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Exponent pair of a monomial `t^t · x^x`. Ordered by `x` first so that the
/// `x⁰` slice of a polynomial is a contiguous prefix of its term map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: u32,
    pub t: i64,
}

impl Monomial {
    pub fn new(t: i64, x: u32) -> Self {
        Monomial { x, t }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JetLaurentPoly {
    terms: BTreeMap<Monomial, Scalar>,
    jet_order: u32,
}

impl JetLaurentPoly {
    pub fn zero(jet_order: u32) -> Self {
        JetLaurentPoly {
            terms: BTreeMap::new(),
            jet_order,
        }
    }

    pub fn one(jet_order: u32) -> Self {
        Self::constant(Scalar::one(), jet_order)
    }

    pub fn constant(c: Scalar, jet_order: u32) -> Self {
        Self::monomial(c, 0, 0, jet_order)
    }

    /// `c · t^t · x^x`; vanishes when `x > jet_order`.
    pub fn monomial(c: Scalar, t: i64, x: u32, jet_order: u32) -> Self {
        let mut p = Self::zero(jet_order);
        p.add_term(Monomial::new(t, x), c);
        p
    }

    /// `t^k`.
    pub fn t_pow(k: i64, jet_order: u32) -> Self {
        Self::monomial(Scalar::one(), k, 0, jet_order)
    }

    /// Builds from `(t, x, coefficient)` triples; repeated monomials are summed
    /// and anything beyond the jet order is discarded.
    pub fn from_terms<I>(terms: I, jet_order: u32) -> Self
    where
        I: IntoIterator<Item = (i64, u32, Scalar)>,
    {
        let mut p = Self::zero(jet_order);
        for (t, x, c) in terms {
            p.add_term(Monomial::new(t, x), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if m.x > self.jet_order || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += &c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn jet_order(&self) -> u32 {
        self.jet_order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::new(0, 0))
                .is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Scalar)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coefficient(&self, t: i64, x: u32) -> Scalar {
        self.terms
            .get(&Monomial::new(t, x))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Smallest and largest `t`-exponent over all stored terms.
    pub fn t_range(&self) -> Option<(i64, i64)> {
        let mut it = self.terms.keys().map(|m| m.t);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), t| (lo.min(t), hi.max(t))))
    }

    /// Largest `x`-exponent present.
    pub fn x_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.x).max()
    }

    /// Re-reads the polynomial at a different precision. Raising the order
    /// asserts the missing higher jets are zero; lowering it truncates.
    pub fn with_jet_order(&self, jet_order: u32) -> Self {
        JetLaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.x <= jet_order)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            jet_order,
        }
    }

    /// The pure-Laurent part (`x = 0`), as a polynomial of jet order 0.
    pub fn substitute_x_zero(&self) -> Self {
        self.x_coefficient(0)
    }

    /// Coefficient of `x^k`, a Laurent polynomial in `t` of jet order 0.
    pub fn x_coefficient(&self, k: u32) -> Self {
        JetLaurentPoly {
            terms: self
                .terms
                .range(Monomial::new(i64::MIN, k)..=Monomial::new(i64::MAX, k))
                .map(|(m, c)| (Monomial::new(m.t, 0), c.clone()))
                .collect(),
            jet_order: 0,
        }
    }

    /// Divides by the defining function `x`. The quotient is only known
    /// modulo `x^N`, so its jet order is one less than the input's.
    pub fn divide_by_x(&self) -> Result<Self> {
        if self.terms.keys().any(|m| m.x == 0) {
            return Err(Error::NotDivisibleByX);
        }
        if self.jet_order == 0 {
            return Err(Error::InsufficientJetOrder {
                needed: 1,
                available: 0,
            });
        }
        Ok(JetLaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial::new(m.t, m.x - 1), c.clone()))
                .collect(),
            jet_order: self.jet_order - 1,
        })
    }

    /// Multiplies by `x`, dropping whatever lands beyond the jet order.
    pub fn multiply_by_x(&self) -> Self {
        JetLaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.x < self.jet_order)
                .map(|(m, c)| (Monomial::new(m.t, m.x + 1), c.clone()))
                .collect(),
            jet_order: self.jet_order,
        }
    }

    /// Multiplies by `t^k`.
    pub fn shift_t(&self, k: i64) -> Self {
        JetLaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial::new(m.t + k, m.x), c.clone()))
                .collect(),
            jet_order: self.jet_order,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.jet_order);
        }
        JetLaurentPoly {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
            jet_order: self.jet_order,
        }
    }

    /// If the polynomial is a single term `c · t^m` (no `x`), returns `(c, m)`.
    pub fn as_laurent_monomial(&self) -> Option<(Scalar, i64)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        (m.x == 0).then(|| (c.clone(), m.t))
    }

    /// Inverse in the truncated ring. Exists iff the `x⁰` part is a single
    /// Laurent monomial `c·t^m`; then `p = c·t^m·(1 + n)` with `n` divisible by
    /// `x`, and `(1 + n)⁻¹` is a finite geometric series.
    pub fn inverse(&self) -> Option<Self> {
        let (c, m) = self.substitute_x_zero().as_laurent_monomial()?;
        let unit_inv = Self::monomial(c.inv()?, -m, 0, self.jet_order);
        let nilpotent = &(self * &unit_inv) - &Self::one(self.jet_order);
        let mut sum = Self::one(self.jet_order);
        let mut power = Self::one(self.jet_order);
        let minus_n = -&nilpotent;
        for _ in 0..self.jet_order {
            power = &power * &minus_n;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Some(&sum * &unit_inv)
    }

    fn combine(&self, rhs: &Self, negate: bool) -> Self {
        let jet_order = self.jet_order.min(rhs.jet_order);
        let mut out = if jet_order == self.jet_order {
            self.clone()
        } else {
            self.with_jet_order(jet_order)
        };
        for (m, c) in &rhs.terms {
            if negate {
                out.add_term(*m, -c);
            } else {
                out.add_term(*m, c.clone());
            }
        }
        out
    }
}

impl<'a> Add<&'a JetLaurentPoly> for &'a JetLaurentPoly {
    type Output = JetLaurentPoly;
    fn add(self, rhs: &JetLaurentPoly) -> JetLaurentPoly {
        self.combine(rhs, false)
    }
}

impl<'a> Sub<&'a JetLaurentPoly> for &'a JetLaurentPoly {
    type Output = JetLaurentPoly;
    fn sub(self, rhs: &JetLaurentPoly) -> JetLaurentPoly {
        self.combine(rhs, true)
    }
}

impl<'a> Mul<&'a JetLaurentPoly> for &'a JetLaurentPoly {
    type Output = JetLaurentPoly;
    fn mul(self, rhs: &JetLaurentPoly) -> JetLaurentPoly {
        let jet_order = self.jet_order.min(rhs.jet_order);
        let mut out = JetLaurentPoly::zero(jet_order);
        for (ma, ca) in &self.terms {
            if ma.x > jet_order {
                continue;
            }
            for (mb, cb) in &rhs.terms {
                let x = ma.x + mb.x;
                if x > jet_order {
                    // terms are sorted by x, nothing further in rhs survives
                    break;
                }
                out.add_term(Monomial::new(ma.t + mb.t, x), ca * cb);
            }
        }
        out
    }
}

impl Neg for &JetLaurentPoly {
    type Output = JetLaurentPoly;
    fn neg(self) -> JetLaurentPoly {
        JetLaurentPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
            jet_order: self.jet_order,
        }
    }
}

impl fmt::Display for JetLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mono = match (m.t, m.x) {
                (0, 0) => String::new(),
                (t, 0) => format!("t^{t}"),
                (0, x) => format!("x^{x}"),
                (t, x) => format!("t^{t}·x^{x}"),
            };
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{c}·{mono}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i64, u32, i64)], n: u32) -> JetLaurentPoly {
        JetLaurentPoly::from_terms(
            terms.iter().map(|&(t, x, c)| (t, x, Scalar::from_int(c))),
            n,
        )
    }

    #[test]
    fn divide_by_x_shifts_monomials() {
        let a = p(&[(-1, 1, 1), (0, 2, 1)], 4);
        let q = a.divide_by_x().unwrap();
        assert_eq!(q, p(&[(-1, 0, 1), (0, 1, 1)], 3));
    }

    #[test]
    fn divide_by_x_rejects_x0_terms() {
        let a = p(&[(2, 0, 1), (1, 1, 3)], 4);
        assert_eq!(a.divide_by_x(), Err(Error::NotDivisibleByX));
    }

    #[test]
    fn divide_by_x_needs_precision() {
        assert!(matches!(
            JetLaurentPoly::zero(0).divide_by_x(),
            Err(Error::InsufficientJetOrder { .. })
        ));
    }

    #[test]
    fn distributes_over_laurent_terms() {
        let a = p(&[(1, 0, 1), (0, 1, 1)], 4);
        let b = JetLaurentPoly::t_pow(-1, 4);
        assert_eq!(&a * &b, p(&[(0, 0, 1), (-1, 1, 1)], 4));
    }

    #[test]
    fn substitute_kills_x_terms() {
        let a = p(&[(2, 0, 1), (1, 1, 3)], 4);
        assert_eq!(a.substitute_x_zero(), p(&[(2, 0, 1)], 0));
    }

    #[test]
    fn products_truncate_at_jet_order() {
        let a = p(&[(0, 1, 1), (0, 0, 1)], 1);
        // (1 + x)^2 = 1 + 2x mod x^2
        assert_eq!(&a * &a, p(&[(0, 0, 1), (0, 1, 2)], 1));
    }

    #[test]
    fn inverse_of_unit_with_jets() {
        let a = p(&[(3, 0, 2), (1, 1, 1), (-2, 2, 5)], 3);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
        assert!(p(&[(0, 0, 1), (1, 0, 1)], 2).inverse().is_none());
    }

    #[test]
    fn mixed_precision_arithmetic_uses_the_coarser_order() {
        let a = p(&[(0, 3, 1)], 4);
        let b = p(&[(0, 0, 1)], 2);
        let s = &a + &b;
        assert_eq!(s.jet_order(), 2);
        assert_eq!(s, p(&[(0, 0, 1)], 2));
    }
}
