//! Carnot chart ingestion: types, frames, bracket-condition validation to a
//! configurable jet order, and structure constants at the base point.
//!
//! A frame is an n-tuple of polynomial vector fields X_1,…,X_n on the chart,
//! with the base point fixed at the origin. Writing X_j = Σ_k b_{jk}(x) ∂_k,
//! validity requires B(0) = (b_{jk}(0)) invertible and, for each pair (i,j),
//! that the expansion of [X_i, X_j] in the frame has no component along
//! fields of weight above min(w_i + w_j, r).

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{Poly, Rat, WeightSequence};
use crate::vf::PolyVectorField;

/// The type (m_1,…,m_r) of an equiregular Carnot chart: m_w is the rank of
/// the filtration level H_w, so the ranks are strictly increasing with
/// m_r = n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarnotType {
    ranks: Vec<usize>,
}

impl CarnotType {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::InvalidType("empty rank list".into()));
        }
        if ranks[0] == 0 {
            return Err(Error::InvalidType("ranks must be positive".into()));
        }
        if ranks.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidType("ranks must be strictly increasing".into()));
        }
        Ok(CarnotType { ranks })
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn n(&self) -> usize {
        *self.ranks.last().unwrap()
    }

    pub fn step(&self) -> u32 {
        self.ranks.len() as u32
    }

    /// w_j = min{w : j ≤ m_w}.
    pub fn weights(&self) -> WeightSequence {
        let mut weights = Vec::with_capacity(self.n());
        for j in 1..=self.n() {
            let w = self
                .ranks
                .iter()
                .position(|&m| j <= m)
                .expect("j <= m_r by construction") as u32
                + 1;
            weights.push(w);
        }
        WeightSequence::new(weights).expect("type-induced weights are valid")
    }
}

/// A frame of n polynomial vector fields on a weighted chart, base point at
/// the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    w: WeightSequence,
    fields: Vec<PolyVectorField>,
}

impl Frame {
    pub fn new(w: WeightSequence, fields: Vec<PolyVectorField>) -> Result<Self> {
        if fields.len() != w.n() {
            return Err(Error::DimensionMismatch {
                expected: w.n(),
                got: fields.len(),
            });
        }
        for f in &fields {
            if f.n() != w.n() {
                return Err(Error::DimensionMismatch {
                    expected: w.n(),
                    got: f.n(),
                });
            }
        }
        Ok(Frame { w, fields })
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.w
    }

    pub fn fields(&self) -> &[PolyVectorField] {
        &self.fields
    }

    pub fn field(&self, j: usize) -> &PolyVectorField {
        &self.fields[j]
    }

    /// The matrix B(0) with row j the coefficient vector of X_j at 0.
    pub fn b0(&self) -> linalg::Matrix {
        self.fields
            .iter()
            .map(|f| {
                f.components()
                    .iter()
                    .map(Poly::constant_term)
                    .collect()
            })
            .collect()
    }

    /// Expand a vector field V in the frame: solve B(x)ᵀ c(x) = V(x) as jets
    /// to weighted order `jet_order` via Neumann inversion of B(x)ᵀ.
    pub fn expand_in_frame(&self, v: &PolyVectorField, jet_order: u32) -> Result<Vec<Poly>> {
        let inv = self.bt_inverse_jet(jet_order)?;
        let mut out = Vec::with_capacity(self.n());
        for row in &inv {
            let mut acc = Poly::zero(self.n());
            for (entry, comp) in row.iter().zip(v.components()) {
                acc = acc.add(&entry.mul(comp));
            }
            out.push(acc.truncate(&self.w, jet_order));
        }
        Ok(out)
    }

    /// The jet of (B(x)ᵀ)^{-1} to weighted order N, by Neumann iteration:
    /// with M = B(x)ᵀ = A₀(I + A₀^{-1}R), M^{-1} = Σ_m (−A₀^{-1}R)^m A₀^{-1}.
    fn bt_inverse_jet(&self, jet_order: u32) -> Result<Vec<Vec<Poly>>> {
        let n = self.n();
        let a0 = linalg::transpose(&self.b0());
        let c0 = linalg::invert(&a0).ok_or(Error::SingularFrame)?;
        // M and its zero-constant-term remainder R = M − A₀
        let m: Vec<Vec<Poly>> = (0..n)
            .map(|k| (0..n).map(|j| self.fields[j].component(k).clone()).collect())
            .collect();
        let c0p: Vec<Vec<Poly>> = c0
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| Poly::constant(n, e.clone()))
                    .collect()
            })
            .collect();
        let mut r = m;
        for (k, row) in r.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = entry.sub(&Poly::constant(n, a0[k][j].clone()));
            }
        }
        // K = −A₀^{-1} R, truncated
        let neg_c0r = pmat_mul(&c0p, &r, &self.w, jet_order)
            .into_iter()
            .map(|row| row.into_iter().map(|p| p.neg()).collect())
            .collect::<Vec<Vec<Poly>>>();
        let mut acc = c0p.clone();
        let mut power = c0p;
        for _ in 1..=jet_order {
            power = pmat_mul(&neg_c0r, &power, &self.w, jet_order);
            if power.iter().all(|row| row.iter().all(Poly::is_zero)) {
                break;
            }
            for (ar, pr) in acc.iter_mut().zip(&power) {
                for (a, p) in ar.iter_mut().zip(pr) {
                    *a = a.add(p);
                }
            }
        }
        Ok(acc)
    }

    /// Validate the frame: B(0) invertibility plus the bracket condition to
    /// the given jet order.
    pub fn validate(&self, jet_order: u32) -> ValidationReport {
        let n = self.n();
        let r = self.w.step();
        let b0_invertible = linalg::invert(&self.b0()).is_some();
        let mut violations = Vec::new();
        if b0_invertible {
            for i in 0..n {
                for j in (i + 1)..n {
                    let bracket = self.fields[i].lie_bracket(&self.fields[j]);
                    let c = self
                        .expand_in_frame(&bracket, jet_order)
                        .expect("B(0) invertible");
                    let cutoff = (self.w.weight(i) + self.w.weight(j)).min(r);
                    for (k, ck) in c.iter().enumerate() {
                        if self.w.weight(k) > cutoff && !ck.is_zero() {
                            violations.push(BracketViolation {
                                i: i + 1,
                                j: j + 1,
                                k: k + 1,
                                term: ck.render(),
                            });
                        }
                    }
                }
            }
        }
        let valid = b0_invertible && violations.is_empty();
        ValidationReport {
            jet_order,
            b0_invertible,
            violations,
            valid,
        }
    }

    /// Structure constants at the base point: solve B(0)ᵀ c = [X_i,X_j](0)
    /// and keep the components with w_k = w_i + w_j.
    pub fn structure_constants(&self) -> Result<StructureConstants> {
        let n = self.n();
        let at = linalg::transpose(&self.b0());
        let origin: Vec<Rat> = (0..n).map(|_| Rat::zero()).collect();
        // the bracket value at the origin only depends on the 1-jets of
        // the fields, so drop all higher terms before multiplying
        let trivial = WeightSequence::trivial(n);
        let jets: Vec<PolyVectorField> = self
            .fields
            .iter()
            .map(|f| {
                PolyVectorField::new(
                    f.components().iter().map(|p| p.truncate(&trivial, 2)).collect(),
                )
            })
            .collect();
        let mut entries = BTreeMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let bracket = jets[i].lie_bracket(&jets[j]);
                let rhs = bracket.eval(&origin);
                let c = linalg::solve(&at, &rhs).ok_or(Error::SingularFrame)?;
                let target = self.w.weight(i) + self.w.weight(j);
                for (k, ck) in c.into_iter().enumerate() {
                    if self.w.weight(k) == target && !ck.is_zero() {
                        entries.insert((i, j, k), ck.clone());
                        entries.insert((j, i, k), -ck);
                    }
                }
            }
        }
        Ok(StructureConstants { n, entries })
    }
}

fn pmat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>], w: &WeightSequence, order: u32) -> Vec<Vec<Poly>> {
    let n = a.len();
    let p = b[0].len();
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| {
                    let mut acc = Poly::zero(w.n());
                    for (k, bk) in b.iter().enumerate() {
                        acc = acc.add(&a[i][k].mul(&bk[j]));
                    }
                    acc.truncate(w, order)
                })
                .collect()
        })
        .collect()
}

/// Structure constants L_ij^k at the base point, stored 0-based with exact
/// antisymmetry and only graded entries (w_k = w_i + w_j ≤ r).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    n: usize,
    entries: BTreeMap<(usize, usize, usize), Rat>,
}

impl StructureConstants {
    pub fn from_entries(
        n: usize,
        w: &WeightSequence,
        raw: impl IntoIterator<Item = ((usize, usize, usize), Rat)>,
    ) -> Result<Self> {
        let mut entries: BTreeMap<(usize, usize, usize), Rat> = BTreeMap::new();
        for ((i, j, k), v) in raw {
            if v.is_zero() {
                continue;
            }
            if i >= n || j >= n || k >= n {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j).max(k) + 1,
                    n,
                });
            }
            if w.weight(k) != w.weight(i) + w.weight(j) {
                return Err(Error::Grading {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                });
            }
            entries.insert((i, j, k), v);
        }
        // enforce antisymmetry
        for ((i, j, k), v) in entries.clone() {
            let mirror = entries
                .get(&(j, i, k))
                .cloned()
                .unwrap_or_else(Rat::zero);
            if mirror != -v.clone() {
                return Err(Error::Antisymmetry {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                });
            }
        }
        Ok(StructureConstants { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Rat {
        self.entries
            .get(&(i, j, k))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Rat)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One offending component of a bracket expansion (1-based indices).
#[derive(Debug, Clone, Serialize)]
pub struct BracketViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub term: String,
}

/// Outcome of [`Frame::validate`].
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub jet_order: u32,
    pub b0_invertible: bool,
    pub violations: Vec<BracketViolation>,
    pub valid: bool,
}
