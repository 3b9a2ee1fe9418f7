//! Exact sparse multivariate polynomials with an anisotropic (weighted) grading.
//!
//! Coefficients are arbitrary-precision rationals; every identity checked by
//! the rest of the crate is an exact polynomial identity in this module's
//! arithmetic. Floats appear only in evaluation helpers and pseudo-norms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational coefficient type used throughout the crate.
pub type Rat = BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for the rational n/d.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// The weight sequence w = (w_1,...,w_n) of a Carnot chart, with step r.
///
/// Weights are non-decreasing, start at 1 and end at the step r. Coordinate
/// x_j carries anisotropic degree w_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSequence {
    weights: Vec<u32>,
}

impl WeightSequence {
    pub fn new(weights: Vec<u32>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty weight sequence".into()));
        }
        if weights[0] != 1 {
            return Err(Error::InvalidWeights(format!(
                "first weight must be 1, got {}",
                weights[0]
            )));
        }
        if weights.windows(2).any(|p| p[0] > p[1]) {
            return Err(Error::InvalidWeights("weights must be non-decreasing".into()));
        }
        Ok(WeightSequence { weights })
    }

    /// Trivial weights (1,...,1) in dimension n.
    pub fn trivial(n: usize) -> Self {
        WeightSequence { weights: vec![1; n] }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// The step r = w_n.
    pub fn step(&self) -> u32 {
        *self.weights.last().unwrap()
    }

    pub fn weight(&self, j: usize) -> u32 {
        self.weights[j]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// Weighted degree ⟨α⟩ = Σ w_i α_i of a multi-index.
    pub fn weighted_degree(&self, alpha: &MultiIndex) -> Result<u32> {
        if alpha.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: alpha.len(),
            });
        }
        Ok(alpha
            .exponents()
            .iter()
            .zip(&self.weights)
            .map(|(&a, &w)| a * w)
            .sum())
    }

    /// Default jet truncation order 2r + 1.
    pub fn default_jet_order(&self) -> u32 {
        2 * self.step() + 1
    }
}

/// A multi-index α ∈ ℕ₀ⁿ of exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit multi-index e_j.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// |α| = Σ α_i.
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// α! = Π α_i!.
    pub fn factorial(&self) -> Rat {
        let mut f = BigInt::one();
        for &a in &self.0 {
            for k in 2..=a {
                f *= BigInt::from(k);
            }
        }
        Rat::from_integer(f)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

/// Sparse multivariate polynomial over exact rationals.
///
/// Terms are stored keyed by exponent vector with no zero coefficients, so
/// equality of polynomials is structural equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(MultiIndex::zero(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rat::one())
    }

    /// The coordinate polynomial x_j (0-based j).
    pub fn var(nvars: usize, j: usize) -> Self {
        let mut p = Poly::zero(nvars);
        p.terms.insert(MultiIndex::unit(nvars, j), Rat::one());
        p
    }

    pub fn monomial(nvars: usize, alpha: MultiIndex, c: Rat) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(alpha, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Rat {
        self.terms.get(alpha).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(alpha).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            // re-borrow to remove; key is cheap to find again
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(a, v)| (a.clone(), v * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Formal partial derivative ∂/∂x_j.
    pub fn partial(&self, j: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (alpha, c) in &self.terms {
            let e = alpha.exponents()[j];
            if e == 0 {
                continue;
            }
            let mut exps = alpha.exponents().to_vec();
            exps[j] -= 1;
            out.add_term(MultiIndex::new(exps), c * rat(e as i64));
        }
        out
    }

    /// Iterated formal derivative ∂^α.
    pub fn partial_multi(&self, alpha: &MultiIndex) -> Poly {
        let mut out = self.clone();
        for (j, &e) in alpha.exponents().iter().enumerate() {
            for _ in 0..e {
                out = out.partial(j);
            }
        }
        out
    }

    /// Evaluate at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (alpha, c) in &self.terms {
            let mut term = c.clone();
            for (j, &e) in alpha.exponents().iter().enumerate() {
                for _ in 0..e {
                    term *= &point[j];
                }
            }
            acc += term;
        }
        acc
    }

    /// Evaluate at a float point.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (alpha, c) in &self.terms {
            let mut term = rat_to_f64(c);
            for (j, &e) in alpha.exponents().iter().enumerate() {
                term *= point[j].powi(e as i32);
            }
            acc += term;
        }
        acc
    }

    /// Substitute args[j] for x_j. `trunc` optionally discards terms of
    /// weighted degree >= order during the computation.
    pub fn compose(&self, args: &[Poly], trunc: Option<(&WeightSequence, u32)>) -> Poly {
        assert_eq!(args.len(), self.nvars);
        let out_nvars = args
            .first()
            .map(|p| p.nvars)
            .unwrap_or(0);
        let mut acc = Poly::zero(out_nvars);
        for (alpha, c) in &self.terms {
            let mut term = Poly::constant(out_nvars, c.clone());
            for (j, &e) in alpha.exponents().iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&args[j]);
                    if let Some((w, order)) = trunc {
                        term = term.truncate(w, order);
                    }
                }
            }
            acc = acc.add(&term);
        }
        if let Some((w, order)) = trunc {
            acc = acc.truncate(w, order);
        }
        acc
    }

    /// Re-embed into a ring with `new_nvars` variables, mapping x_j to
    /// x_{j+offset}.
    pub fn embed(&self, new_nvars: usize, offset: usize) -> Poly {
        assert!(self.nvars + offset <= new_nvars);
        let mut out = Poly::zero(new_nvars);
        for (alpha, c) in &self.terms {
            let mut exps = vec![0; new_nvars];
            exps[offset..offset + self.nvars].copy_from_slice(alpha.exponents());
            out.add_term(MultiIndex::new(exps), c.clone());
        }
        out
    }

    /// p ∘ δ_t: each term x^α picks up the factor t^⟨α⟩.
    pub fn dilate(&self, t: &Rat, w: &WeightSequence) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (alpha, c) in &self.terms {
            let d = w.weighted_degree(alpha).expect("dimension checked");
            let mut factor = Rat::one();
            for _ in 0..d {
                factor *= t;
            }
            out.add_term(alpha.clone(), c * factor);
        }
        out
    }

    /// Split into w-homogeneous parts, keyed by weighted degree.
    pub fn homogeneous_parts(&self, w: &WeightSequence) -> BTreeMap<u32, Poly> {
        let mut parts: BTreeMap<u32, Poly> = BTreeMap::new();
        for (alpha, c) in &self.terms {
            let d = w.weighted_degree(alpha).expect("dimension checked");
            parts
                .entry(d)
                .or_insert_with(|| Poly::zero(self.nvars))
                .add_term(alpha.clone(), c.clone());
        }
        parts
    }

    /// The single homogeneous part of weighted degree `d` (zero if absent).
    pub fn homogeneous_part(&self, w: &WeightSequence, d: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (alpha, c) in &self.terms {
            if w.weighted_degree(alpha).expect("dimension checked") == d {
                out.add_term(alpha.clone(), c.clone());
            }
        }
        out
    }

    /// Weight: the least weighted degree of a nonzero term; None for the zero
    /// polynomial (weight infinity).
    pub fn weight(&self, w: &WeightSequence) -> Option<u32> {
        self.terms
            .keys()
            .map(|alpha| w.weighted_degree(alpha).expect("dimension checked"))
            .min()
    }

    /// Max weighted degree over stored terms; None for zero.
    pub fn max_weighted_degree(&self, w: &WeightSequence) -> Option<u32> {
        self.terms
            .keys()
            .map(|alpha| w.weighted_degree(alpha).expect("dimension checked"))
            .max()
    }

    /// Anisotropic Taylor split at order N: (terms with ⟨α⟩ < N, rest).
    pub fn taylor_split(&self, w: &WeightSequence, order: u32) -> (Poly, Poly) {
        let mut low = Poly::zero(self.nvars);
        let mut high = Poly::zero(self.nvars);
        for (alpha, c) in &self.terms {
            let d = w.weighted_degree(alpha).expect("dimension checked");
            if d < order {
                low.add_term(alpha.clone(), c.clone());
            } else {
                high.add_term(alpha.clone(), c.clone());
            }
        }
        (low, high)
    }

    /// Drop all terms of weighted degree >= order.
    pub fn truncate(&self, w: &WeightSequence, order: u32) -> Poly {
        self.taylor_split(w, order).0
    }

    /// True when every term has degree exactly d under an arbitrary weight
    /// vector (used for gradings, like the doubled (w,w) grading of a group
    /// law in 2n variables, that are not valid weight sequences).
    pub fn is_homogeneous_custom(&self, weights: &[u32], d: u32) -> bool {
        self.terms
            .keys()
            .all(|alpha| weighted_degree_custom(weights, alpha) == d)
    }

    /// Canonical term list: sorted by (⟨α⟩, lexicographic exponents).
    pub fn canonical_terms(&self, w: &WeightSequence) -> Vec<(MultiIndex, Rat)> {
        let mut v: Vec<(MultiIndex, Rat)> = self
            .terms
            .iter()
            .map(|(a, c)| (a.clone(), c.clone()))
            .collect();
        v.sort_by(|(a, _), (b, _)| {
            let da = w.weighted_degree(a).expect("dimension checked");
            let db = w.weighted_degree(b).expect("dimension checked");
            da.cmp(&db).then_with(|| a.cmp(b))
        });
        v
    }

    /// Render with variables named x1..xn.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (alpha, c) in &self.terms {
            let mut factors = Vec::new();
            if !c.abs().is_one() || alpha.is_zero() {
                factors.push(c.abs().to_string());
            }
            for (j, &e) in alpha.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{}", j + 1)),
                    _ => factors.push(format!("x{}^{}", j + 1, e)),
                }
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            parts.push((sign, factors.join("*")));
        }
        let mut s = String::new();
        for (i, (sign, body)) in parts.iter().enumerate() {
            if i == 0 {
                if *sign == "-" {
                    s.push('-');
                }
            } else {
                s.push_str(if *sign == "-" { " - " } else { " + " });
            }
            s.push_str(body);
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A polynomial truncated to weighted order N: all stored terms have ⟨α⟩ < N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jet {
    poly: Poly,
    order: u32,
}

impl Jet {
    pub fn new(poly: Poly, w: &WeightSequence, order: u32) -> Self {
        Jet {
            poly: poly.truncate(w, order),
            order,
        }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn add(&self, other: &Jet, w: &WeightSequence) -> Jet {
        let order = self.order.min(other.order);
        Jet::new(self.poly.add(&other.poly), w, order)
    }

    pub fn mul(&self, other: &Jet, w: &WeightSequence) -> Jet {
        let order = self.order.min(other.order);
        Jet::new(self.poly.mul(&other.poly), w, order)
    }
}

/// Convert an exact rational to f64.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Exact for the desk-scale coefficients this crate produces.
    bigint_to_f64(num) / bigint_to_f64(den)
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

/// Weighted degree against an arbitrary weight vector.
pub fn weighted_degree_custom(weights: &[u32], alpha: &MultiIndex) -> u32 {
    alpha
        .exponents()
        .iter()
        .zip(weights)
        .map(|(&a, &w)| a * w)
        .sum()
}

/// The max pseudo-norm ‖x‖₀ = max |x_i|^{1/w_i}.
pub fn pseudo_norm(x: &[f64], w: &WeightSequence) -> f64 {
    assert_eq!(x.len(), w.n());
    x.iter()
        .zip(w.weights())
        .map(|(&xi, &wi)| xi.abs().powf(1.0 / wi as f64))
        .fold(0.0, f64::max)
}

/// The sum pseudo-norm ‖x‖₁ = Σ |x_i|^{1/w_i}.
pub fn pseudo_norm_sum(x: &[f64], w: &WeightSequence) -> f64 {
    assert_eq!(x.len(), w.n());
    x.iter()
        .zip(w.weights())
        .map(|(&xi, &wi)| xi.abs().powf(1.0 / wi as f64))
        .sum()
}

/// Anisotropic dilation t·x of a float point.
pub fn dilate_point(t: f64, x: &[f64], w: &WeightSequence) -> Vec<f64> {
    x.iter()
        .zip(w.weights())
        .map(|(&xi, &wi)| t.powi(wi as i32) * xi)
        .collect()
}

/// Anisotropic dilation t·x of a rational point.
pub fn dilate_point_rat(t: &Rat, x: &[Rat], w: &WeightSequence) -> Vec<Rat> {
    x.iter()
        .zip(w.weights())
        .map(|(xi, &wi)| {
            let mut f = Rat::one();
            for _ in 0..wi {
                f *= t;
            }
            f * xi
        })
        .collect()
}

/// All multi-indices α in n variables with ⟨α⟩ = d.
pub fn multi_indices_of_weighted_degree(w: &WeightSequence, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; w.n()];
    fn rec(
        w: &WeightSequence,
        j: usize,
        remaining: u32,
        current: &mut Vec<u32>,
        out: &mut Vec<MultiIndex>,
    ) {
        if j == w.n() {
            if remaining == 0 {
                out.push(MultiIndex::new(current.clone()));
            }
            return;
        }
        let wj = w.weight(j);
        let max = remaining / wj;
        for e in 0..=max {
            current[j] = e;
            rec(w, j + 1, remaining - e * wj, current, out);
        }
        current[j] = 0;
    }
    rec(w, 0, d, &mut current, &mut out);
    out
}

/// All multi-indices with 0 < ⟨α⟩ < cap, grouped by increasing ⟨α⟩.
pub fn multi_indices_below(w: &WeightSequence, cap: u32) -> Vec<(u32, Vec<MultiIndex>)> {
    (1..cap)
        .map(|d| (d, multi_indices_of_weighted_degree(w, d)))
        .collect()
}
