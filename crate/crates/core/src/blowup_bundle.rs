//! Bundles on a formal neighbourhood of the exceptional divisor `D` of the
//! blow-up of ℂ² at the origin.
//!
//! Chart A has coordinates `(x, t)` with `D = {x = 0}`; chart B has `(y, s)`
//! with `s = 1/t`, `y = x·t`. A bundle is one transition matrix `T(t, x)`
//! (Laurent in `t`, jets in `x` modulo `x^{N+1}`) with `v_B = T·v_A`, as on
//! ℙ¹. The defining section of `[D]` is `x` in chart A and `y` in chart B,
//! so `[D]` has transition `y/x = t`, which restricts to `O(-1)` on `D`.
//!
//! Rescaling the quotient frame vectors by the defining section in each
//! chart turns `T = [[f, g], [h, q]]` (sub block first) into
//! `[[f, g·x], [h/(x·t), q/t]]`.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact_algebra::JetLaurentMatrix;
use crate::hn_profile::HNProfile;
use crate::p1_bundle::{P1Transition, SplittingType};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupBundle {
    transition: JetLaurentMatrix,
}

/// One optimizer step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeStep {
    /// Number of top HN groups transformed along.
    pub top_blocks: usize,
    pub sub_rank: usize,
    pub phi_before: i64,
    pub phi_after: i64,
    pub jet_remaining: u32,
    pub splitting_before: SplittingType,
    pub splitting_after: SplittingType,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeckeTrace {
    pub steps: Vec<HeckeStep>,
}

impl HeckeTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `Φ` before the first step followed by `Φ` after each step. Empty
    /// trace gives an empty sequence.
    pub fn phi_sequence(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self
            .steps
            .first()
            .map(|s| s.phi_before)
            .into_iter()
            .collect();
        out.extend(self.steps.iter().map(|s| s.phi_after));
        out
    }
}

/// How the optimizer picks the number of top HN groups at each step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// Always the top group (`k = 1`).
    #[default]
    TopBlock,
    /// The `k` minimizing the Hecke bound of the current restriction;
    /// ties go to the smallest `k`.
    GreedyBound,
}

/// Optimization stopped before reaching `Φ < 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimizeError {
    pub error: Error,
    pub trace: HeckeTrace,
    pub last: BlowupBundle,
}

impl fmt::Display for OptimizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} after {} step(s)", self.error, self.trace.len())
    }
}

impl std::error::Error for OptimizeError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl BlowupBundle {
    /// Requires `det(T)|_{x=0} = c·t^m` with `c ≠ 0`.
    pub fn new(transition: JetLaurentMatrix) -> Result<Self> {
        if !transition.is_invertible() {
            return Err(Error::NotInvertible);
        }
        Ok(BlowupBundle { transition })
    }

    /// `⌈Φ₀⌉ + 2`, raised if needed so no supplied jet is discarded.
    pub fn default_jet_order(transition: &JetLaurentMatrix) -> Result<u32> {
        let restricted =
            P1Transition::new(transition.substitute_x_zero()).map_err(|_| Error::NotInvertible)?;
        let phi = restricted.splitting_type().spread() as u32;
        Ok((phi + 2).max(transition.x_degree().unwrap_or(0)))
    }

    /// Rebuilds `transition` at [`BlowupBundle::default_jet_order`].
    pub fn with_default_jet_order(transition: JetLaurentMatrix) -> Result<Self> {
        let n = Self::default_jet_order(&transition)?;
        BlowupBundle::new(transition.with_jet_order(n))
    }

    pub fn transition(&self) -> &JetLaurentMatrix {
        &self.transition
    }

    pub fn rank(&self) -> usize {
        self.transition.rank()
    }

    pub fn jet_order(&self) -> u32 {
        self.transition.jet_order()
    }

    /// Substitution `x = 0`.
    pub fn restrict_to_d(&self) -> P1Transition {
        P1Transition::new(self.transition.substitute_x_zero())
            .expect("restricted determinant checked at construction")
    }

    pub fn splitting(&self) -> SplittingType {
        self.restrict_to_d().splitting_type()
    }

    pub fn hn_blocks(&self) -> HNProfile {
        self.splitting().hn_blocks()
    }

    /// `Φ = a_1 - a_r` of the restriction; always an integer here.
    pub fn phi(&self) -> i64 {
        self.splitting().spread()
    }

    /// Rank of the span of the `top_blocks` highest HN groups.
    pub fn sub_rank(&self, top_blocks: usize) -> Result<usize> {
        sub_rank_of(&self.splitting(), top_blocks)
    }

    /// Gauge by the restriction's Birkhoff factors (extended constantly in
    /// `x`) so that `T|_{x=0}` becomes `diag(t^{-a_1}, …, t^{-a_r})` with
    /// exponents descending. The leading `sub_rank(top_blocks)` frame vectors
    /// then span the top HN groups and the block below them vanishes on `D`.
    pub fn adapt_frame(&self, top_blocks: usize) -> Result<BlowupBundle> {
        self.sub_rank(top_blocks)?;
        Ok(self.diagonal_frame())
    }

    fn diagonal_frame(&self) -> BlowupBundle {
        let n = self.jet_order();
        let factors = self.restrict_to_d().birkhoff();
        let left = factors
            .gauge_infinity
            .invert()
            .expect("gauge determinant is a nonzero constant")
            .with_jet_order(n);
        let right = factors
            .gauge_zero
            .invert()
            .expect("gauge determinant is a nonzero constant")
            .with_jet_order(n);
        BlowupBundle {
            transition: &(&left * &self.transition) * &right,
        }
    }

    /// Hecke transform along the span of the first `sub_rank` frame vectors
    /// on `D`. Consumes one order of `x`-precision.
    pub fn hecke_transform(&self, sub_rank: usize) -> Result<BlowupBundle> {
        let r = self.rank();
        if sub_rank == 0 || sub_rank >= r {
            return Err(Error::out_of_range(
                "sub_rank",
                sub_rank as i64,
                1,
                r as i64 - 1,
            ));
        }
        let n = self.jet_order();
        if n == 0 {
            return Err(Error::InsufficientJetOrder {
                needed: 1,
                available: 0,
            });
        }
        let t = &self.transition;
        for i in sub_rank..r {
            for j in 0..sub_rank {
                if !t.get(i, j).substitute_x_zero().is_zero() {
                    return Err(Error::FrameNotAdapted);
                }
            }
        }
        let mut rows = Vec::with_capacity(r);
        for i in 0..r {
            let mut row = Vec::with_capacity(r);
            for j in 0..r {
                let p = t.get(i, j);
                let entry = match (i < sub_rank, j < sub_rank) {
                    (true, true) => p.clone(),
                    (true, false) => p.multiply_by_x(),
                    (false, true) => p.divide_by_x()?.shift_t(-1),
                    (false, false) => p.shift_t(-1),
                };
                row.push(entry.with_jet_order(n - 1));
            }
            rows.push(row);
        }
        BlowupBundle::new(JetLaurentMatrix::from_rows(rows)?)
    }

    /// `E ⊗ [D]^k`: transition multiplied by `t^k`; every restricted
    /// exponent shifts by `-k`.
    pub fn twist_by_divisor(&self, k: i64) -> BlowupBundle {
        BlowupBundle {
            transition: self.transition.shift_t(k),
        }
    }

    /// Repeated Hecke transforms along the top HN group until `Φ < 1`.
    pub fn optimize(&self) -> std::result::Result<(BlowupBundle, HeckeTrace), OptimizeError> {
        self.optimize_with(Schedule::TopBlock)
    }

    pub fn optimize_with(
        &self,
        schedule: Schedule,
    ) -> std::result::Result<(BlowupBundle, HeckeTrace), OptimizeError> {
        let mut current = self.clone();
        let mut trace = HeckeTrace::default();
        loop {
            let splitting = current.splitting();
            let phi = splitting.spread();
            if phi < 1 {
                return Ok((current, trace));
            }
            let top_blocks = match schedule {
                Schedule::TopBlock => 1,
                Schedule::GreedyBound => greedy_top_blocks(&splitting.hn_blocks()),
            };
            let fail = |error: Error, trace: HeckeTrace, last: BlowupBundle| OptimizeError {
                error,
                trace,
                last,
            };
            if current.jet_order() == 0 {
                let error = Error::InsufficientJetOrder {
                    needed: 1,
                    available: 0,
                };
                return Err(fail(error, trace, current));
            }
            let sub_rank = match sub_rank_of(&splitting, top_blocks) {
                Ok(s) => s,
                Err(e) => return Err(fail(e, trace, current)),
            };
            let next = match current
                .adapt_frame(top_blocks)
                .and_then(|a| a.hecke_transform(sub_rank))
            {
                Ok(b) => b,
                Err(e) => return Err(fail(e, trace, current)),
            };
            let splitting_after = next.splitting();
            trace.steps.push(HeckeStep {
                top_blocks,
                sub_rank,
                phi_before: phi,
                phi_after: splitting_after.spread(),
                jet_remaining: next.jet_order(),
                splitting_before: splitting,
                splitting_after,
            });
            current = next;
        }
    }

    /// Hecke along the first `sub_rank` vectors of the diagonal frame, then
    /// along the image of the quotient, which should give `E ⊗ [D]^{-1}`.
    pub fn double_hecke(&self, sub_rank: usize) -> Result<BlowupBundle> {
        let r = self.rank();
        if sub_rank == 0 || sub_rank >= r {
            return Err(Error::out_of_range(
                "sub_rank",
                sub_rank as i64,
                1,
                r as i64 - 1,
            ));
        }
        if self.jet_order() < 2 {
            return Err(Error::InsufficientJetOrder {
                needed: 2,
                available: self.jet_order(),
            });
        }
        let once = self.diagonal_frame().hecke_transform(sub_rank)?;
        // the quotient image sits in the trailing frame vectors; move it first
        let perm: Vec<usize> = (sub_rank..r).chain(0..sub_rank).collect();
        let moved = BlowupBundle {
            transition: once.transition.conjugate_by_permutation(&perm),
        };
        moved.hecke_transform(r - sub_rank)
    }

    /// Whether the double transform's restriction is the original one with
    /// every exponent raised by one.
    pub fn involution_check(&self, sub_rank: usize) -> Result<bool> {
        let twice = self.double_hecke(sub_rank)?;
        Ok(twice.splitting() == self.splitting().shifted(1))
    }
}

fn sub_rank_of(splitting: &SplittingType, top_blocks: usize) -> Result<usize> {
    let groups = splitting.groups();
    if top_blocks == 0 || top_blocks > groups.len() {
        return Err(Error::out_of_range(
            "top_blocks",
            top_blocks as i64,
            1,
            groups.len() as i64,
        ));
    }
    Ok(groups[..top_blocks].iter().map(|(n, _)| n).sum())
}

fn greedy_top_blocks(profile: &HNProfile) -> usize {
    (1..profile.num_blocks())
        .min_by_key(|&k| profile.hecke_bound(k).expect("k in range"))
        .unwrap_or(1)
}
