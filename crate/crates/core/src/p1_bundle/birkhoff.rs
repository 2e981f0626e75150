//! Birkhoff factorization `T = G_∞ · diag(t^{-a_i}) · G_0`.
//!
//! Row reduction over `ℂ[s]`, `s = 1/t`. The row degree of row `i` is
//! `d_i = max_j (-ord_t T_ij)` and its leading row is the coefficient of
//! `t^{-d_i}`. While the leading-row matrix is singular, a left null vector
//! `α` gives a unimodular row operation
//! `row_k ← Σ_i α_i s^{d_k - d_i} row_i` (with `α_k = 1`, `d_k` maximal on the
//! support of `α`) that lowers `d_k`. The sum of row degrees is bounded below
//! by `-m`, so this terminates. At the end `diag(t^{d_i})·T_red` is a
//! polynomial matrix in `t` with invertible constant term and monomial
//! determinant, hence unimodular over `ℂ[t]`, and `a_i = d_i`.

use num_traits::Zero;

use super::{P1Transition, SplittingType};
use crate::exact_algebra::matrix::is_nonzero_constant;
use crate::exact_algebra::{JetLaurentMatrix, JetLaurentPoly, ScalarMatrix};

/// `transition = gauge_infinity · diag(t^{-a_i}) · gauge_zero`, exponents
/// descending; `gauge_zero` is polynomial in `t` and `gauge_infinity`
/// polynomial in `t⁻¹`, both with nonzero constant determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirkhoffFactorization {
    pub gauge_infinity: JetLaurentMatrix,
    pub gauge_zero: JetLaurentMatrix,
    pub splitting: SplittingType,
}

impl BirkhoffFactorization {
    /// `diag(t^{-a_1}, …, t^{-a_r})`.
    pub fn diagonal(&self) -> JetLaurentMatrix {
        let neg: Vec<i64> = self.splitting.exponents().iter().map(|a| -a).collect();
        JetLaurentMatrix::t_diagonal(&neg, 0)
    }

    /// `G_∞ · diag · G_0`.
    pub fn reconstruct(&self) -> JetLaurentMatrix {
        &(&self.gauge_infinity * &self.diagonal()) * &self.gauge_zero
    }

    /// Checks the chart conditions on both gauges.
    pub fn gauges_are_admissible(&self) -> bool {
        let polynomial_in = |m: &JetLaurentMatrix, sign: i64| {
            m.entries()
                .filter_map(JetLaurentPoly::t_range)
                .all(|(lo, hi)| if sign > 0 { lo >= 0 } else { hi <= 0 })
        };
        polynomial_in(&self.gauge_zero, 1)
            && polynomial_in(&self.gauge_infinity, -1)
            && is_nonzero_constant(&self.gauge_zero.det())
            && is_nonzero_constant(&self.gauge_infinity.det())
    }
}

fn row_degree(row: &[JetLaurentPoly]) -> i64 {
    row.iter()
        .filter_map(JetLaurentPoly::t_range)
        .map(|(lo, _)| -lo)
        .max()
        .expect("invertible transition has no zero row")
}

pub fn birkhoff(transition: &P1Transition) -> BirkhoffFactorization {
    let r = transition.rank();
    let mut work = transition.matrix().clone();
    let mut gauge_inf = JetLaurentMatrix::identity(r, 0);

    let degrees = loop {
        let degrees: Vec<i64> = work.rows().map(row_degree).collect();
        let leading = ScalarMatrix::from_rows(
            (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| work.get(i, j).coefficient(-degrees[i], 0))
                        .collect()
                })
                .collect(),
        );
        let Some(alpha) = leading.left_kernel().into_iter().next() else {
            break degrees;
        };
        let pivot = (0..r)
            .filter(|&i| !alpha[i].is_zero())
            .max_by(|&a, &b| degrees[a].cmp(&degrees[b]).then(b.cmp(&a)))
            .expect("nonzero null vector");
        let norm = alpha[pivot].inv().expect("nonzero pivot");
        // row_pivot += Σ_{i≠pivot} c_i·t^{-(d_p - d_i)}·row_i
        let mut new_row: Vec<JetLaurentPoly> = (0..r).map(|j| work.get(pivot, j).clone()).collect();
        let mut ops: Vec<(usize, JetLaurentPoly)> = Vec::new();
        for i in (0..r).filter(|&i| i != pivot && !alpha[i].is_zero()) {
            let coeff = &alpha[i] * &norm;
            let mult = JetLaurentPoly::monomial(coeff, degrees[i] - degrees[pivot], 0, 0);
            for (j, slot) in new_row.iter_mut().enumerate() {
                *slot = &*slot + &(&mult * work.get(i, j));
            }
            ops.push((i, mult));
        }
        for (j, p) in new_row.into_iter().enumerate() {
            work.set(pivot, j, p);
        }
        // G_∞ ← G_∞ · E⁻¹, E⁻¹ = I - Σ mult_i·e_{pivot,i}: column i -= mult_i · column pivot
        for (i, mult) in ops {
            for row in 0..r {
                let upd = gauge_inf.get(row, i) - &(&mult * gauge_inf.get(row, pivot));
                gauge_inf.set(row, i, upd);
            }
        }
    };

    let gauge_zero = JetLaurentMatrix::from_fn(r, 0, |i, j| work.get(i, j).shift_t(degrees[i]));

    // stable sort, descending exponents
    let mut perm: Vec<usize> = (0..r).collect();
    perm.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]));
    let sorted: Vec<i64> = perm.iter().map(|&k| degrees[k]).collect();
    let gauge_infinity = JetLaurentMatrix::from_fn(r, 0, |i, k| gauge_inf.get(i, perm[k]).clone());
    let gauge_zero = JetLaurentMatrix::from_fn(r, 0, |k, j| gauge_zero.get(perm[k], j).clone());

    BirkhoffFactorization {
        gauge_infinity,
        gauge_zero,
        splitting: SplittingType(sorted),
    }
}
