//! Numerical Harder–Narasimhan data: ranks and slopes of the graded pieces
//! of an HN filtration on `ℙ^{n-1}`, and the slope bookkeeping of Hecke
//! transforms along HN subsheaves.
//!
//! Only numbers are modelled. Block labels are carried for reporting and
//! never interpreted. [`HNProfile::hecke_profile`] is exact for the
//! homogeneous split case (the restriction of the transform is again a
//! direct sum of the HN pieces, with the quotient pieces twisted by `O(1)`);
//! for other inputs only [`HNProfile::hecke_bound`] is meaningful.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{format_rational, Rational};

/// One HN graded piece: its rank and slope, plus free-form labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub rank: u32,
    pub slope: Rational,
    pub labels: Vec<String>,
}

impl Block {
    pub fn new(rank: u32, slope: Rational) -> Self {
        Block {
            rank,
            slope,
            labels: Vec::new(),
        }
    }

    pub fn labelled(rank: u32, slope: Rational, label: impl Into<String>) -> Self {
        Block {
            rank,
            slope,
            labels: vec![label.into()],
        }
    }

    fn shifted(&self, n: i64) -> Self {
        Block {
            rank: self.rank,
            slope: &self.slope + Rational::from_integer(BigInt::from(n)),
            labels: self.labels.clone(),
        }
    }
}

/// Blocks with strictly decreasing slopes `μ_1 > … > μ_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HNProfile {
    blocks: Vec<Block>,
    base_dimension: u32,
}

/// Indices `0 = j_0 < j_1 < … < j_l = m` and twists `n_0, …, n_{l-1}` of the
/// partial HN filtration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialHN {
    pub indices: Vec<usize>,
    pub twists: Vec<i64>,
}

impl PartialHN {
    /// `(first, last)` 1-based block ranges of each group with its twist.
    pub fn groups(&self) -> impl Iterator<Item = (std::ops::RangeInclusive<usize>, i64)> + '_ {
        self.indices
            .windows(2)
            .zip(&self.twists)
            .map(|(w, &n)| (w[0] + 1..=w[1], n))
    }
}

fn floor_to_i64(q: &Rational) -> i64 {
    use num_traits::ToPrimitive;
    q.floor().to_integer().to_i64().expect("slope fits in i64")
}

impl HNProfile {
    /// Validates: at least one block, positive ranks, strictly decreasing
    /// slopes, every `rank·slope` integral, `base_dimension ≥ 2`.
    pub fn new(blocks: Vec<Block>, base_dimension: u32) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidProfile("no blocks".into()));
        }
        if base_dimension < 2 {
            return Err(Error::InvalidProfile(format!(
                "base_dimension {base_dimension} < 2"
            )));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.rank == 0 {
                return Err(Error::InvalidProfile(format!("block {i} has rank 0")));
            }
            let degree = &b.slope * Rational::from_integer(BigInt::from(b.rank));
            if !degree.is_integer() {
                return Err(Error::InvalidProfile(format!(
                    "block {i}: slope {} has denominator not dividing rank {}",
                    format_rational(&b.slope),
                    b.rank
                )));
            }
        }
        if let Some(i) = blocks.windows(2).position(|w| w[0].slope <= w[1].slope) {
            return Err(Error::InvalidProfile(format!(
                "slopes not strictly decreasing at blocks {i}, {}",
                i + 1
            )));
        }
        Ok(HNProfile {
            blocks,
            base_dimension,
        })
    }

    /// Sorts descending and merges blocks of equal slope.
    pub fn from_unordered(mut blocks: Vec<Block>, base_dimension: u32) -> Result<Self> {
        blocks.sort_by(|a, b| b.slope.cmp(&a.slope));
        let mut merged: Vec<Block> = Vec::with_capacity(blocks.len());
        for b in blocks {
            match merged.last_mut() {
                Some(last) if last.slope == b.slope => {
                    last.rank += b.rank;
                    last.labels.extend(b.labels);
                }
                _ => merged.push(b),
            }
        }
        HNProfile::new(merged, base_dimension)
    }

    /// Convenience constructor from `(rank, slope)` pairs.
    pub fn from_pairs(pairs: &[(u32, Rational)]) -> Result<Self> {
        HNProfile::new(
            pairs
                .iter()
                .map(|(r, s)| Block::new(*r, s.clone()))
                .collect(),
            2,
        )
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn base_dimension(&self) -> u32 {
        self.base_dimension
    }

    /// `m`.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn total_rank(&self) -> u32 {
        self.blocks.iter().map(|b| b.rank).sum()
    }

    /// `Σ rank_i·μ_i`.
    pub fn total_degree(&self) -> Rational {
        self.blocks
            .iter()
            .map(|b| &b.slope * Rational::from_integer(BigInt::from(b.rank)))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn ranks_and_slopes(&self) -> Vec<(u32, Rational)> {
        self.blocks
            .iter()
            .map(|b| (b.rank, b.slope.clone()))
            .collect()
    }

    /// `μ_i`, 1-based.
    pub fn slope(&self, i: usize) -> &Rational {
        &self.blocks[i - 1].slope
    }

    /// `Φ = μ_1 - μ_m`.
    pub fn phi(&self) -> Rational {
        self.slope(1) - self.slope(self.num_blocks())
    }

    pub fn is_semistable(&self) -> bool {
        self.num_blocks() == 1
    }

    pub fn is_optimal(&self) -> bool {
        self.phi() < Rational::one()
    }

    /// `Φ·(total rank)!` is a nonnegative integer.
    pub fn phi_is_discrete(&self) -> bool {
        let fact: BigInt = (1..=self.total_rank()).map(BigInt::from).product();
        let scaled = self.phi() * Rational::from_integer(fact);
        scaled.is_integer() && !scaled.is_negative()
    }

    fn check_split_index(&self, k: usize) -> Result<()> {
        let m = self.num_blocks();
        if k == 0 || k >= m {
            return Err(Error::out_of_range("k", k as i64, 1, m as i64 - 1));
        }
        Ok(())
    }

    /// Hecke transform along `E_k` in the homogeneous case: blocks `1..=k`
    /// keep their slope, blocks `k+1..=m` gain `+1`; re-sorted and merged.
    pub fn hecke_profile(&self, k: usize) -> Result<HNProfile> {
        self.check_split_index(k)?;
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| if i < k { b.clone() } else { b.shifted(1) })
            .collect();
        HNProfile::from_unordered(blocks, self.base_dimension)
    }

    /// `max{μ_{k+1} - μ_m, Φ - 1, μ_{k+1} - μ_k + 1, μ_1 - μ_k}`.
    pub fn hecke_bound(&self, k: usize) -> Result<Rational> {
        self.check_split_index(k)?;
        let m = self.num_blocks();
        let one = Rational::one();
        let terms = [
            self.slope(k + 1) - self.slope(m),
            self.phi() - &one,
            self.slope(k + 1) - self.slope(k) + &one,
            self.slope(1) - self.slope(k),
        ];
        Ok(terms.into_iter().max().expect("four terms"))
    }

    /// The partial HN filtration:
    /// `n_k = ⌊μ_1 - μ_{j_k+1}⌋`,
    /// `j_{k+1} = max{s > j_k : μ_1 - μ_s - n_k < 1, s ≤ m}`.
    pub fn partial_hn(&self) -> PartialHN {
        let m = self.num_blocks();
        let one = Rational::one();
        let mu1 = self.slope(1);
        let mut indices = vec![0usize];
        let mut twists = Vec::new();
        let mut j = 0usize;
        while j < m {
            let n_k = floor_to_i64(&(mu1 - self.slope(j + 1)));
            let n_q = Rational::from_integer(BigInt::from(n_k));
            let next = (j + 1..=m)
                .filter(|&s| mu1 - self.slope(s) - &n_q < one)
                .max()
                .expect("s = j_k + 1 always satisfies the window condition");
            twists.push(n_k);
            indices.push(next);
            j = next;
        }
        assert_eq!(
            indices.last(),
            Some(&m),
            "partial HN must absorb every block"
        );
        PartialHN { indices, twists }
    }

    /// Graded profile of the partial HN filtration: each group shifted by its
    /// twist, then re-sorted and merged. Always optimal (`Φ < 1`).
    pub fn gr_tilde(&self) -> HNProfile {
        let partial = self.partial_hn();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (range, n) in partial.groups() {
            for i in range {
                blocks.push(self.blocks[i - 1].shifted(n));
            }
        }
        HNProfile::from_unordered(blocks, self.base_dimension)
            .expect("integer shifts preserve validity")
    }

    /// Uniform integer shift (tensoring with `O(n)`).
    pub fn twist(&self, n: i64) -> HNProfile {
        HNProfile {
            blocks: self.blocks.iter().map(|b| b.shifted(n)).collect(),
            base_dimension: self.base_dimension,
        }
    }

    /// Shifts a single block (1-based) by `n`, re-sorting and merging.
    pub fn twist_block(&self, i: usize, n: i64) -> Result<HNProfile> {
        let m = self.num_blocks();
        if i == 0 || i > m {
            return Err(Error::out_of_range("block", i as i64, 1, m as i64));
        }
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(idx, b)| {
                if idx + 1 == i {
                    b.shifted(n)
                } else {
                    b.clone()
                }
            })
            .collect();
        HNProfile::from_unordered(blocks, self.base_dimension)
    }

    /// The representative of the twist class with `μ_1 ∈ [0, 1)`.
    pub fn normalize_twist(&self) -> HNProfile {
        self.twist(-floor_to_i64(self.slope(1)))
    }

    /// Equal up to a uniform integer twist (labels ignored).
    pub fn equivalent(&self, other: &HNProfile) -> bool {
        self.normalize_twist().ranks_and_slopes() == other.normalize_twist().ranks_and_slopes()
    }

    /// Equal up to independent integer twists of the graded pieces: the
    /// rank carried by each fractional slope class agrees. This is the
    /// numerical shadow of `ψ'_*π'^* Gr(·)` being insensitive to `O(k)`
    /// twists of each piece.
    pub fn graded_equivalent(&self, other: &HNProfile) -> bool {
        self.fractional_rank_distribution() == other.fractional_rank_distribution()
    }

    fn fractional_rank_distribution(&self) -> BTreeMap<Rational, u32> {
        let mut out = BTreeMap::new();
        for b in &self.blocks {
            *out.entry(b.slope.clone() - b.slope.floor()).or_insert(0) += b.rank;
        }
        out
    }
}

impl fmt::Display for HNProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", b.rank, format_rational(&b.slope))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn prof(pairs: &[(u32, &str)]) -> HNProfile {
        HNProfile::from_pairs(&pairs.iter().map(|(r, s)| (*r, q(s))).collect::<Vec<_>>()).unwrap()
    }

    fn pairs(p: &HNProfile) -> Vec<(u32, String)> {
        p.blocks()
            .iter()
            .map(|b| (b.rank, format_rational(&b.slope)))
            .collect()
    }

    fn expect(v: &[(u32, &str)]) -> Vec<(u32, String)> {
        v.iter().map(|(r, s)| (*r, s.to_string())).collect()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(prof(&[(2, "3/2"), (1, "0")]).phi(), q("3/2"));
        assert_eq!(prof(&[(1, "2"), (2, "3/2")]).phi(), q("1/2"));
        assert_eq!(prof(&[(3, "7/3")]).phi(), q("0"));
    }

    #[test]
    fn hecke_profile_examples() {
        let p = prof(&[(2, "3/2"), (1, "0")]).hecke_profile(1).unwrap();
        assert_eq!(pairs(&p), expect(&[(2, "3/2"), (1, "1")]));
        assert_eq!(p.phi(), q("1/2"));
        let p = prof(&[(1, "3"), (1, "0")]).hecke_profile(1).unwrap();
        assert_eq!(pairs(&p), expect(&[(1, "3"), (1, "1")]));
        let p = prof(&[(1, "1"), (1, "0")]).hecke_profile(1).unwrap();
        assert_eq!(pairs(&p), expect(&[(2, "1")]));
    }

    #[test]
    fn hecke_profile_rejects_bad_k() {
        let p = prof(&[(1, "1"), (1, "0")]);
        assert!(matches!(p.hecke_profile(0), Err(Error::OutOfRange { .. })));
        assert!(matches!(p.hecke_profile(2), Err(Error::OutOfRange { .. })));
        assert!(prof(&[(2, "0")]).hecke_bound(1).is_err());
    }

    #[test]
    fn hecke_bound_examples() {
        assert_eq!(prof(&[(1, "3"), (1, "0")]).hecke_bound(1).unwrap(), q("2"));
        assert_eq!(
            prof(&[(2, "3/2"), (1, "0")]).hecke_bound(1).unwrap(),
            q("1/2")
        );
    }

    #[test]
    fn partial_hn_examples() {
        let p = prof(&[(1, "2"), (2, "3/2")]).partial_hn();
        assert_eq!(p.indices, vec![0, 2]);
        assert_eq!(p.twists, vec![0]);
        let p = prof(&[(2, "3/2"), (1, "0")]).partial_hn();
        assert_eq!(p.indices, vec![0, 1, 2]);
        assert_eq!(p.twists, vec![0, 1]);
        let p = prof(&[(1, "3"), (1, "2")]).partial_hn();
        assert_eq!(p.indices, vec![0, 1, 2]);
        assert_eq!(p.twists, vec![0, 1]);
    }

    #[test]
    fn gr_tilde_examples() {
        let g = prof(&[(2, "3/2"), (1, "0")]).gr_tilde();
        assert_eq!(pairs(&g), expect(&[(2, "3/2"), (1, "1")]));
        assert_eq!(g.phi(), q("1/2"));
        let g = prof(&[(1, "3"), (1, "2")]).gr_tilde();
        assert_eq!(pairs(&g), expect(&[(2, "3")]));
        let single = prof(&[(3, "5/3")]);
        assert_eq!(single.gr_tilde(), single);
        assert_eq!(single.partial_hn().twists, vec![0]);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            pairs(&prof(&[(2, "3")]).normalize_twist()),
            expect(&[(2, "0")])
        );
        assert_eq!(
            pairs(&prof(&[(2, "3/2"), (1, "1")]).normalize_twist()),
            expect(&[(2, "1/2"), (1, "0")])
        );
        assert_eq!(
            pairs(&prof(&[(2, "-1/2")]).normalize_twist()),
            expect(&[(2, "1/2")])
        );
    }

    #[test]
    fn equivalence_examples() {
        assert!(prof(&[(2, "3")]).equivalent(&prof(&[(2, "0")])));
        assert!(prof(&[(2, "3/2"), (1, "1")]).equivalent(&prof(&[(2, "5/2"), (1, "2")])));
        assert!(!prof(&[(2, "3/2"), (1, "1")]).equivalent(&prof(&[(2, "3/2"), (1, "0")])));
    }

    #[test]
    fn validation() {
        let bad = HNProfile::from_pairs(&[(1, q("1/2"))]);
        assert!(matches!(bad, Err(Error::InvalidProfile(_))));
        let bad = HNProfile::from_pairs(&[(1, q("0")), (1, q("1"))]);
        assert!(matches!(bad, Err(Error::InvalidProfile(_))));
        let bad = HNProfile::from_pairs(&[(1, q("1")), (1, q("1"))]);
        assert!(matches!(bad, Err(Error::InvalidProfile(_))));
        assert!(HNProfile::from_pairs(&[]).is_err());
        assert!(HNProfile::new(vec![Block::new(0, q("0"))], 2).is_err());
    }

    #[test]
    fn merged_labels_are_kept() {
        let p = HNProfile::new(
            vec![
                Block::labelled(1, q("1"), "A"),
                Block::labelled(1, q("0"), "B"),
            ],
            3,
        )
        .unwrap();
        let h = p.hecke_profile(1).unwrap();
        assert_eq!(h.blocks()[0].labels, vec!["A".to_string(), "B".to_string()]);
        assert_eq!(h.base_dimension(), 3);
    }

    #[test]
    fn two_block_window() {
        for (a, b) in [("5", "1"), ("7/2", "3"), ("1", "-3/2")] {
            let p = HNProfile::new(vec![Block::new(2, q(a)), Block::new(2, q(b))], 2).unwrap();
            let part = p.partial_hn();
            let k = if part.twists.len() == 2 {
                part.twists[1]
            } else {
                0
            };
            let shifted = q(b) + Rational::from_integer(k.into());
            assert!(q(a) - Rational::one() < shifted && shifted <= q(a));
        }
    }
}
