//! Seeded random generators and the batch property suites.
//!
//! Case `i` of a run with seed `s` draws from a ChaCha8 stream keyed by
//! `(s, i)`, so a single case can be regenerated without replaying the run.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blowup_bundle::BlowupBundle;
use crate::exact_algebra::{format_rational, JetLaurentMatrix, JetLaurentPoly, Rational, Scalar};
use crate::hn_profile::{Block, HNProfile};
use crate::p1_bundle::splitting_from_h0;

/// Exponent window for generated transitions.
pub const T_RANGE: (i64, i64) = (-3, 3);
pub const MAX_RANK: usize = 3;
pub const MAX_X_POWER: u32 = 3;
pub const MAX_PROFILE_RANK: u32 = 6;

pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_scalar<R: Rng>(rng: &mut R) -> Scalar {
    let re = rng.gen_range(-3..=3);
    let im = if rng.gen_bool(0.2) {
        rng.gen_range(-2..=2)
    } else {
        0
    };
    let den = if rng.gen_bool(0.2) {
        rng.gen_range(2..=3)
    } else {
        1
    };
    Scalar::new(
        Rational::new(BigInt::from(re), BigInt::from(den)),
        Rational::from_integer(BigInt::from(im)),
    )
}

fn random_unit<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let c = random_scalar(rng);
        if c.inv().is_some() {
            return c;
        }
    }
}

/// Sparse Laurent polynomial in `t` only, exponents in `lo..=hi`.
fn random_laurent<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_terms: usize) -> JetLaurentPoly {
    let n = rng.gen_range(0..=max_terms);
    JetLaurentPoly::from_terms(
        (0..n).map(|_| (rng.gen_range(lo..=hi), 0, random_scalar(rng))),
        0,
    )
}

/// A transition whose restriction is `P·L·D·U·Q` with `L`/`U` unipotent
/// triangular, `D` diagonal monomial and `P`, `Q` permutations, plus
/// random higher `x`-jets. Entries stay within [`T_RANGE`].
pub fn random_transition<R: Rng>(rng: &mut R, rank: usize) -> JetLaurentMatrix {
    let (lo, hi) = T_RANGE;
    loop {
        let mut lower = JetLaurentMatrix::identity(rank, 0);
        let mut upper = JetLaurentMatrix::identity(rank, 0);
        for i in 0..rank {
            for j in 0..i {
                lower.set(i, j, random_laurent(rng, -1, 1, 2));
                upper.set(j, i, random_laurent(rng, -1, 1, 2));
            }
        }
        let exps: Vec<i64> = (0..rank).map(|_| rng.gen_range(-2..=2)).collect();
        let diag = JetLaurentMatrix::from_fn(rank, 0, |i, j| {
            if i == j {
                JetLaurentPoly::monomial(random_unit(rng), exps[i], 0, 0)
            } else {
                JetLaurentPoly::zero(0)
            }
        });
        let mut p: Vec<usize> = (0..rank).collect();
        let mut q: Vec<usize> = (0..rank).collect();
        p.shuffle(rng);
        q.shuffle(rng);
        let core = &(&lower * &diag) * &upper;
        let restricted = JetLaurentMatrix::from_fn(rank, 0, |i, j| core.get(p[i], q[j]).clone());
        let within = restricted.t_range().is_none_or(|(a, b)| a >= lo && b <= hi);
        if !within {
            continue;
        }
        let jets = rng.gen_range(0..=MAX_X_POWER);
        let extra = rng.gen_range(0..=2 * rank);
        let m = restricted.with_jet_order(jets);
        return if jets == 0 {
            m
        } else {
            let mut m = m;
            for _ in 0..extra {
                let (i, j) = (rng.gen_range(0..rank), rng.gen_range(0..rank));
                let term = JetLaurentPoly::monomial(
                    random_scalar(rng),
                    rng.gen_range(lo..=hi),
                    rng.gen_range(1..=jets),
                    jets,
                );
                let e = m.get(i, j) + &term;
                m.set(i, j, e);
            }
            m
        };
    }
}

/// A bundle of rank in `min_rank..=MAX_RANK` at its default jet order.
/// Rank `r` is drawn with weight `r`.
pub fn random_bundle<R: Rng>(rng: &mut R, min_rank: usize) -> BlowupBundle {
    let ranks: Vec<usize> = (min_rank..=MAX_RANK)
        .flat_map(|r| std::iter::repeat_n(r, r))
        .collect();
    let rank = *ranks.choose(rng).expect("min_rank <= MAX_RANK");
    BlowupBundle::with_default_jet_order(random_transition(rng, rank))
        .expect("generated restriction has monomial determinant")
}

/// Random valid profile of total rank at most [`MAX_PROFILE_RANK`].
pub fn random_profile<R: Rng>(rng: &mut R) -> HNProfile {
    let total = rng.gen_range(1..=MAX_PROFILE_RANK);
    let mut ranks = Vec::new();
    let mut left = total;
    while left > 0 {
        let r = rng.gen_range(1..=left);
        ranks.push(r);
        left -= r;
    }
    let blocks: Vec<Block> = ranks
        .into_iter()
        .map(|r| {
            let num = rng.gen_range(-4 * r as i64..=4 * r as i64);
            Block::new(r, Rational::new(BigInt::from(num), BigInt::from(r)))
        })
        .collect();
    let base = rng.gen_range(2..=4);
    HNProfile::from_unordered(blocks, base).expect("slopes have denominator dividing rank")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Double Hecke transform shifts the restriction by `O(1)`.
    Involution,
    /// Hecke bound on profiles and the optimal-stays-optimal corollary.
    Descent,
    /// Birkhoff against the `h⁰` staircase, and exact reconstruction.
    Oracle,
    /// `Φ·rank!` integral, `gr_tilde` optimal.
    Discreteness,
    /// Optimizer termination, per-step descent and twist invariance.
    Optimize,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Involution,
        Suite::Descent,
        Suite::Oracle,
        Suite::Discreteness,
        Suite::Optimize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Involution => "involution",
            Suite::Descent => "descent",
            Suite::Oracle => "oracle",
            Suite::Discreteness => "discreteness",
            Suite::Optimize => "optimize",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Counterexample {
    pub index: u64,
    pub property: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub count: u64,
    /// Individual property checks performed.
    pub checks: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

struct Recorder {
    index: u64,
    checks: u64,
    found: Vec<Counterexample>,
}

impl Recorder {
    fn check(&mut self, ok: bool, property: &str, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.found.push(Counterexample {
                index: self.index,
                property: property.to_string(),
                detail: detail(),
            });
        }
    }
}

pub fn run_suite(suite: Suite, count: u64, seed: u64) -> SuiteReport {
    let mut rec = Recorder {
        index: 0,
        checks: 0,
        found: Vec::new(),
    };
    for index in 0..count {
        rec.index = index;
        let mut rng = case_rng(seed, index);
        match suite {
            Suite::Involution => involution_case(&mut rng, &mut rec),
            Suite::Descent => descent_case(&mut rng, &mut rec),
            Suite::Oracle => oracle_case(&mut rng, &mut rec),
            Suite::Discreteness => discreteness_case(&mut rng, &mut rec),
            Suite::Optimize => optimize_case(&mut rng, &mut rec),
        }
    }
    rec.found.sort();
    SuiteReport {
        suite,
        seed,
        count,
        checks: rec.checks,
        counterexamples: rec.found,
    }
}

fn involution_case(rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let e = random_bundle(rng, 2);
    let s = rng.gen_range(1..e.rank());
    let result = e.involution_check(s);
    rec.check(
        result == Ok(true),
        "double Hecke shifts splitting by +1",
        || format!("s = {s}, T = {}, result {result:?}", e.transition()),
    );
}

fn oracle_case(rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let e = random_bundle(rng, 1);
    let restricted = e.restrict_to_d();
    let factors = restricted.birkhoff();
    let from_h0 = splitting_from_h0(&restricted);
    rec.check(
        factors.splitting == from_h0,
        "birkhoff = h0 staircase",
        || {
            format!(
                "T|D = {}, birkhoff {}, h0 {from_h0}",
                restricted.matrix(),
                factors.splitting
            )
        },
    );
    rec.check(
        &factors.reconstruct() == restricted.matrix(),
        "reconstruction",
        || format!("T|D = {}", restricted.matrix()),
    );
    rec.check(factors.gauges_are_admissible(), "gauge charts", || {
        format!("T|D = {}", restricted.matrix())
    });
}

fn optimize_case(rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let e = random_bundle(rng, 1);
    let phi0 = e.phi();
    let outcome = optimize_checked(&e);
    let trace = match &outcome {
        Ok(trace) => trace.clone(),
        Err(msg) => {
            rec.check(false, "optimize terminates", || {
                format!("T = {}: {msg}", e.transition())
            });
            return;
        }
    };
    rec.check(trace.len() as i64 <= phi0, "steps <= ceil(phi_0)", || {
        format!("T = {}, phi {:?}", e.transition(), trace.phi_sequence())
    });
    for k in -2..=2 {
        let twisted = optimize_checked(&e.twist_by_divisor(k));
        rec.check(
            twisted.as_ref().map(|t| t.phi_sequence()) == Ok(trace.phi_sequence()),
            "twist leaves phi trace unchanged",
            || format!("k = {k}, T = {}", e.transition()),
        );
    }
}

/// Runs the optimizer and checks the per-step contract.
fn optimize_checked(e: &BlowupBundle) -> Result<crate::HeckeTrace, String> {
    let (out, trace) = e.optimize().map_err(|err| err.to_string())?;
    if out.phi() != 0 {
        return Err(format!("final phi {}", out.phi()));
    }
    for step in &trace.steps {
        if step.phi_after > step.phi_before - 1 {
            return Err(format!(
                "step {} -> {} did not descend",
                step.splitting_before, step.splitting_after
            ));
        }
    }
    Ok(trace)
}

fn descent_case(rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let p = random_profile(rng);
    let optimal = p.is_optimal();
    for k in 1..p.num_blocks() {
        let bound = p.hecke_bound(k).expect("valid k");
        let after = p.hecke_profile(k).expect("valid k").phi();
        rec.check(after <= bound, "phi(hecke) <= bound", || {
            format!(
                "P = {p}, k = {k}, phi {}, bound {}",
                format_rational(&after),
                format_rational(&bound)
            )
        });
        if optimal {
            rec.check(bound < Rational::one(), "optimal stays below 1", || {
                format!("P = {p}, k = {k}, bound {}", format_rational(&bound))
            });
        }
    }
}

fn discreteness_case(rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let p = random_profile(rng);
    rec.check(p.phi_is_discrete(), "phi * rank! integral", || {
        format!("P = {p}")
    });
    rec.check(!p.phi().is_negative(), "phi nonnegative", || {
        format!("P = {p}")
    });
    let gr = p.gr_tilde();
    rec.check(gr.is_optimal(), "gr_tilde optimal", || {
        format!("P = {p}, gr = {gr}")
    });
    rec.check(
        gr.total_rank() == p.total_rank(),
        "gr_tilde keeps rank",
        || format!("P = {p}, gr = {gr}"),
    );
}

/// Convenience for callers that only need the generated inputs.
pub fn bundles(seed: u64, count: u64, min_rank: usize) -> Vec<BlowupBundle> {
    (0..count)
        .map(|i| random_bundle(&mut case_rng(seed, i), min_rank))
        .collect()
}

pub fn profiles(seed: u64, count: u64) -> Vec<HNProfile> {
    (0..count)
        .map(|i| random_profile(&mut case_rng(seed, i)))
        .collect()
}
