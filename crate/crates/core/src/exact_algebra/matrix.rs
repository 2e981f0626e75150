//! Square matrices over the truncated jet-Laurent ring.

use std::fmt;
use std::ops::Mul;

use super::poly::JetLaurentPoly;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Row-major `r × r` matrix. Every entry carries the matrix's jet order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JetLaurentMatrix {
    rank: usize,
    jet_order: u32,
    entries: Vec<JetLaurentPoly>,
}

impl JetLaurentMatrix {
    pub fn from_rows(rows: Vec<Vec<JetLaurentPoly>>) -> Result<Self> {
        let rank = rows.len();
        if rank == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != rank) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {rank}",
                rows[bad].len()
            )));
        }
        let jet_order = rows
            .iter()
            .flatten()
            .map(JetLaurentPoly::jet_order)
            .min()
            .unwrap_or(0);
        let entries = rows
            .into_iter()
            .flatten()
            .map(|p| {
                if p.jet_order() == jet_order {
                    p
                } else {
                    p.with_jet_order(jet_order)
                }
            })
            .collect();
        Ok(JetLaurentMatrix {
            rank,
            jet_order,
            entries,
        })
    }

    pub fn from_fn(
        rank: usize,
        jet_order: u32,
        mut f: impl FnMut(usize, usize) -> JetLaurentPoly,
    ) -> Self {
        let mut entries = Vec::with_capacity(rank * rank);
        for i in 0..rank {
            for j in 0..rank {
                let p = f(i, j);
                entries.push(if p.jet_order() == jet_order {
                    p
                } else {
                    p.with_jet_order(jet_order)
                });
            }
        }
        JetLaurentMatrix {
            rank,
            jet_order,
            entries,
        }
    }

    pub fn identity(rank: usize, jet_order: u32) -> Self {
        Self::from_fn(rank, jet_order, |i, j| {
            if i == j {
                JetLaurentPoly::one(jet_order)
            } else {
                JetLaurentPoly::zero(jet_order)
            }
        })
    }

    /// `diag(t^{e_1}, …, t^{e_r})`.
    pub fn t_diagonal(exponents: &[i64], jet_order: u32) -> Self {
        Self::from_fn(exponents.len(), jet_order, |i, j| {
            if i == j {
                JetLaurentPoly::t_pow(exponents[i], jet_order)
            } else {
                JetLaurentPoly::zero(jet_order)
            }
        })
    }

    /// Permutation matrix sending basis vector `perm[k]` to position `k`,
    /// so that `P·M·Pᵀ` lists row/column `perm[k]` of `M` at index `k`.
    pub fn permutation(perm: &[usize], jet_order: u32) -> Self {
        Self::from_fn(perm.len(), jet_order, |i, j| {
            if perm[i] == j {
                JetLaurentPoly::one(jet_order)
            } else {
                JetLaurentPoly::zero(jet_order)
            }
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn jet_order(&self) -> u32 {
        self.jet_order
    }

    pub fn get(&self, i: usize, j: usize) -> &JetLaurentPoly {
        &self.entries[i * self.rank + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: JetLaurentPoly) {
        let p = if p.jet_order() == self.jet_order {
            p
        } else {
            p.with_jet_order(self.jet_order)
        };
        self.entries[i * self.rank + j] = p;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[JetLaurentPoly]> {
        self.entries.chunks(self.rank)
    }

    pub fn entries(&self) -> impl Iterator<Item = &JetLaurentPoly> {
        self.entries.iter()
    }

    pub fn map(&self, f: impl Fn(usize, usize, &JetLaurentPoly) -> JetLaurentPoly) -> Self {
        Self::from_fn(self.rank, self.jet_order, |i, j| f(i, j, self.get(i, j)))
    }

    pub fn with_jet_order(&self, jet_order: u32) -> Self {
        Self::from_fn(self.rank, jet_order, |i, j| {
            self.get(i, j).with_jet_order(jet_order)
        })
    }

    /// Entry-wise `x = 0`; the result has jet order 0.
    pub fn substitute_x_zero(&self) -> Self {
        Self::from_fn(self.rank, 0, |i, j| self.get(i, j).substitute_x_zero())
    }

    pub fn shift_t(&self, k: i64) -> Self {
        self.map(|_, _, p| p.shift_t(k))
    }

    pub fn is_identity(&self) -> bool {
        (0..self.rank).all(|i| {
            (0..self.rank).all(|j| {
                let p = self.get(i, j);
                if i == j {
                    p.is_one()
                } else {
                    p.is_zero()
                }
            })
        })
    }

    /// `P·M·Pᵀ` for the permutation of [`JetLaurentMatrix::permutation`].
    pub fn conjugate_by_permutation(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank);
        Self::from_fn(self.rank, self.jet_order, |i, j| {
            self.get(perm[i], perm[j]).clone()
        })
    }

    /// Overall `t`-exponent range of the nonzero entries.
    pub fn t_range(&self) -> Option<(i64, i64)> {
        self.entries
            .iter()
            .filter_map(JetLaurentPoly::t_range)
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
    }

    pub fn x_degree(&self) -> Option<u32> {
        self.entries
            .iter()
            .filter_map(JetLaurentPoly::x_degree)
            .max()
    }

    /// Division-free determinant of the submatrix on `rows × cols`, computed by
    /// dynamic programming over column subsets (Laplace expansion row by row).
    fn minor(&self, rows: &[usize], cols: &[usize]) -> JetLaurentPoly {
        let n = rows.len();
        debug_assert_eq!(n, cols.len());
        if n == 0 {
            return JetLaurentPoly::one(self.jet_order);
        }
        let full = 1usize << n;
        let mut partial: Vec<Option<JetLaurentPoly>> = vec![None; full];
        partial[0] = Some(JetLaurentPoly::one(self.jet_order));
        for mask in 0..full {
            let Some(acc) = partial[mask].take() else {
                continue;
            };
            if acc.is_zero() {
                continue;
            }
            let row = mask.count_ones() as usize;
            if row == n {
                partial[mask] = Some(acc);
                continue;
            }
            for c in 0..n {
                if mask & (1 << c) != 0 {
                    continue;
                }
                let entry = self.get(rows[row], cols[c]);
                if entry.is_zero() {
                    continue;
                }
                // inversions added by placing column c after the columns in mask
                let above = (mask >> (c + 1)).count_ones();
                let term = &acc * entry;
                let term = if above % 2 == 1 { -&term } else { term };
                let slot = &mut partial[mask | (1 << c)];
                *slot = Some(match slot.take() {
                    Some(s) => &s + &term,
                    None => term,
                });
            }
        }
        partial[full - 1]
            .take()
            .unwrap_or_else(|| JetLaurentPoly::zero(self.jet_order))
    }

    /// Exact determinant modulo `x^{N+1}`.
    pub fn det(&self) -> JetLaurentPoly {
        let idx: Vec<usize> = (0..self.rank).collect();
        self.minor(&idx, &idx)
    }

    /// `(c, m)` with `det|_{x=0} = c·t^m`, or `None` when the restricted
    /// determinant is not a single Laurent monomial.
    pub fn restricted_det_monomial(&self) -> Option<(Scalar, i64)> {
        self.substitute_x_zero().det().as_laurent_monomial()
    }

    pub fn is_invertible(&self) -> bool {
        self.restricted_det_monomial().is_some()
    }

    pub fn adjugate(&self) -> Self {
        let r = self.rank;
        if r == 1 {
            return Self::identity(1, self.jet_order);
        }
        Self::from_fn(r, self.jet_order, |i, j| {
            // adj[i][j] = (-1)^{i+j} · minor with row j and column i removed
            let rows: Vec<usize> = (0..r).filter(|&k| k != j).collect();
            let cols: Vec<usize> = (0..r).filter(|&k| k != i).collect();
            let m = self.minor(&rows, &cols);
            if (i + j) % 2 == 1 {
                -&m
            } else {
                m
            }
        })
    }

    /// Inverse modulo `x^{N+1}`: `adj(M)·det(M)⁻¹`.
    pub fn invert(&self) -> Result<Self> {
        let det_inv = self.det().inverse().ok_or(Error::NotInvertible)?;
        let adj = self.adjugate();
        Ok(adj.map(|_, _, p| p * &det_inv))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        self.map(|_, _, p| p.scale(c))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.rank != rhs.rank {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rank, self.rank, rhs.rank, rhs.rank
            )));
        }
        let jet_order = self.jet_order.min(rhs.jet_order);
        let r = self.rank;
        Ok(Self::from_fn(r, jet_order, |i, j| {
            let mut acc = JetLaurentPoly::zero(jet_order);
            for k in 0..r {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = &acc + &(a * b);
            }
            acc
        }))
    }
}

impl<'a> Mul<&'a JetLaurentMatrix> for &'a JetLaurentMatrix {
    type Output = JetLaurentMatrix;
    fn mul(self, rhs: &JetLaurentMatrix) -> JetLaurentMatrix {
        self.try_mul(rhs).expect("rank mismatch in matrix product")
    }
}

impl fmt::Display for JetLaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, p) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// True when `p` is a nonzero constant (no `t`, no `x`).
pub(crate) fn is_nonzero_constant(p: &JetLaurentPoly) -> bool {
    matches!(p.as_laurent_monomial(), Some((_, 0)))
}
