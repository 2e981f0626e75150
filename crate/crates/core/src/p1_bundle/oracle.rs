//! Brute-force cohomology: `h⁰(E(d))` as the dimension of a finite exact
//! linear system, and the splitting type read back off the staircase
//! `d ↦ h⁰(E(d))`. Shares nothing with the Birkhoff reduction.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{P1Transition, SplittingType};
use crate::exact_algebra::{Scalar, ScalarMatrix};

/// Largest `t`-degree a section `v_A` of `E(d)` can have, or `None` when
/// `E(d)` has no sections for degree reasons.
///
/// From `v_A = t^d · T⁻¹ · v_B` with `T⁻¹ = adj(T) / (c·t^m)` and `v_B`
/// polynomial in `t⁻¹`: the top exponent is at most `d + (r-1)·hi - m`,
/// where `hi` is the largest `t`-exponent among the entries of `T`.
pub fn section_degree_bound(transition: &P1Transition, d: i64) -> Option<usize> {
    let r = transition.rank() as i64;
    let hi = transition.matrix().t_range().map_or(0, |(_, hi)| hi);
    let bound = d + (r - 1) * hi - transition.det_exponent();
    (bound >= 0).then_some(bound as usize)
}

/// `dim H⁰(ℙ¹, E ⊗ O(d))`: polynomial vectors `v` in `t` such that
/// `t^{-d}·T·v` is polynomial in `t⁻¹`.
pub fn h0_oracle(transition: &P1Transition, d: i64) -> usize {
    let Some(bound) = section_degree_bound(transition, d) else {
        return 0;
    };
    let r = transition.rank();
    let width = bound + 1;
    let unknowns = r * width;

    // constraint (row j, exponent e > 0) -> sparse coefficients over unknowns
    let mut constraints: BTreeMap<(usize, i64), BTreeMap<usize, Scalar>> = BTreeMap::new();
    for j in 0..r {
        for i in 0..r {
            for (mono, c) in transition.matrix().get(j, i).terms() {
                for k in 0..width {
                    let e = mono.t + k as i64 - d;
                    if e <= 0 {
                        continue;
                    }
                    let slot = constraints
                        .entry((j, e))
                        .or_default()
                        .entry(i * width + k)
                        .or_insert_with(Scalar::zero);
                    *slot += c;
                }
            }
        }
    }
    let rows: Vec<Vec<Scalar>> = constraints
        .into_values()
        .map(|sparse| {
            let mut row = vec![Scalar::zero(); unknowns];
            for (col, c) in sparse {
                row[col] = c;
            }
            row
        })
        .collect();
    if rows.is_empty() {
        return unknowns;
    }
    unknowns - ScalarMatrix::from_rows(rows).rank()
}

/// Recovers `{a_i}` from `h⁰(E(d)) - h⁰(E(d-1)) = #{i : a_i + d ≥ 0}`.
pub fn splitting_from_h0(transition: &P1Transition) -> SplittingType {
    let r = transition.rank();
    let hi = transition.matrix().t_range().map_or(0, |(_, hi)| hi);
    // a_1 ≤ (r-1)·hi - m, so E(d) has no sections for d below -that - 1
    let top = (r as i64 - 1) * hi - transition.det_exponent();
    let mut d = -top - 1;
    let mut prev_h = h0_oracle(transition, d);
    debug_assert_eq!(prev_h, 0);
    let mut prev_count = 0usize;
    let mut exponents = Vec::with_capacity(r);
    while prev_count < r {
        d += 1;
        let h = h0_oracle(transition, d);
        let count = h - prev_h;
        exponents.extend(std::iter::repeat_n(-d, count - prev_count));
        prev_h = h;
        prev_count = count;
    }
    SplittingType::new(exponents)
}
