//! Polynomial vector fields and differential operators on a weighted chart.
//!
//! A frame field is X = Σ_k b_k(x) ∂_k with polynomial coefficients. The
//! anisotropic weight of the term b_k ∂_k is weight(b_k) − w_k, and the
//! weight of a field or operator is the minimum over its terms (infinity for
//! zero, encoded as `None`).

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{multi_indices_of_weighted_degree, rat, MultiIndex, Poly, Rat, WeightSequence};

/// A vector field with polynomial coefficients: X = Σ_k components[k] ∂_k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    components: Vec<Poly>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Poly>) -> Self {
        debug_assert!(components
            .iter()
            .all(|p| p.nvars() == components.len()));
        PolyVectorField { components }
    }

    pub fn zero(n: usize) -> Self {
        PolyVectorField {
            components: (0..n).map(|_| Poly::zero(n)).collect(),
        }
    }

    /// The coordinate field ∂_j.
    pub fn coordinate(n: usize, j: usize) -> Self {
        let mut components: Vec<Poly> = (0..n).map(|_| Poly::zero(n)).collect();
        components[j] = Poly::one(n);
        PolyVectorField { components }
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &Poly {
        &self.components[k]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> PolyVectorField {
        PolyVectorField::new(self.components.iter().map(|p| p.scale(c)).collect())
    }

    /// X(f) = Σ_k b_k ∂_k f.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero(f.nvars());
        for (k, b) in self.components.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            out = out.add(&b.mul(&f.partial(k)));
        }
        out
    }

    /// Lie bracket [X, Y]_k = X(Y_k) − Y(X_k).
    pub fn lie_bracket(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField::new(
            (0..self.n())
                .map(|k| {
                    self.apply(&other.components[k])
                        .sub(&other.apply(&self.components[k]))
                })
                .collect(),
        )
    }

    /// Evaluate the coefficient vector at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Vec<Rat> {
        self.components.iter().map(|p| p.eval(point)).collect()
    }

    /// Evaluate the coefficient vector at a float point.
    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval_f64(point)).collect()
    }

    /// Anisotropic weight: min_k (weight(b_k) − w_k); `None` for zero.
    pub fn weight(&self, w: &WeightSequence) -> Option<i64> {
        self.components
            .iter()
            .enumerate()
            .filter_map(|(k, b)| {
                b.weight(w)
                    .map(|s| s as i64 - w.weight(k) as i64)
            })
            .min()
    }

    /// Split into parts homogeneous of anisotropic degree d, where the term
    /// b_k ∂_k contributes its w-homogeneous part of degree d + w_k.
    pub fn homogeneous_parts(&self, w: &WeightSequence) -> BTreeMap<i64, PolyVectorField> {
        let n = self.n();
        let mut out: BTreeMap<i64, PolyVectorField> = BTreeMap::new();
        for (k, b) in self.components.iter().enumerate() {
            for (s, part) in b.homogeneous_parts(w) {
                let d = s as i64 - w.weight(k) as i64;
                let entry = out.entry(d).or_insert_with(|| PolyVectorField::zero(n));
                entry.components[k] = entry.components[k].add(&part);
            }
        }
        out
    }

    /// The single homogeneous part of anisotropic degree d.
    pub fn homogeneous_part(&self, w: &WeightSequence, d: i64) -> PolyVectorField {
        let n = self.n();
        let mut out = PolyVectorField::zero(n);
        for (k, b) in self.components.iter().enumerate() {
            let target = d + w.weight(k) as i64;
            if target < 0 {
                continue;
            }
            out.components[k] = b.homogeneous_part(w, target as u32);
        }
        out
    }

    /// Truncate each term b_k ∂_k to anisotropic degree < order.
    pub fn truncate(&self, w: &WeightSequence, order: i64) -> PolyVectorField {
        let n = self.n();
        let mut out = PolyVectorField::zero(n);
        for (k, b) in self.components.iter().enumerate() {
            let cutoff = order + w.weight(k) as i64;
            if cutoff <= 0 {
                continue;
            }
            out.components[k] = b.truncate(w, cutoff as u32);
        }
        out
    }

    /// Pullback under the dilation δ_t with exact rational t ≠ 0:
    /// (δ_t^* X)_k (x) = t^{-w_k} b_k(δ_t x). A part homogeneous of degree d
    /// is scaled by t^d.
    pub fn dilation_pullback(&self, t: &Rat, w: &WeightSequence) -> PolyVectorField {
        assert!(!t.is_zero());
        let mut out = PolyVectorField::zero(self.n());
        for (d, part) in self.homogeneous_parts(w) {
            let factor = rat_pow(t, d);
            out = out.add(&part.scale(&factor));
        }
        out
    }
}

fn rat_pow(t: &Rat, d: i64) -> Rat {
    let mut f = rat(1);
    for _ in 0..d.unsigned_abs() {
        f *= t;
    }
    if d < 0 {
        f.recip()
    } else {
        f
    }
}

/// A differential operator Σ_α c_α(x) ∂^α with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyDiffOperator {
    nvars: usize,
    // derivative multi-index -> polynomial coefficient
    terms: BTreeMap<MultiIndex, Poly>,
}

impl PolyDiffOperator {
    pub fn identity(nvars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(MultiIndex::zero(nvars), Poly::one(nvars));
        PolyDiffOperator { nvars, terms }
    }

    pub fn zero(nvars: usize) -> Self {
        PolyDiffOperator {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_vector_field(x: &PolyVectorField) -> Self {
        let n = x.n();
        let mut op = PolyDiffOperator::zero(n);
        for (k, b) in x.components().iter().enumerate() {
            if !b.is_zero() {
                op.add_term(MultiIndex::unit(n, k), b.clone());
            }
        }
        op
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Poly)> {
        self.terms.iter()
    }

    fn add_term(&mut self, deriv: MultiIndex, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(deriv.clone())
            .or_insert_with(|| Poly::zero(self.nvars));
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&deriv);
        }
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (deriv, coeff) in &self.terms {
            out = out.add(&coeff.mul(&f.partial_multi(deriv)));
        }
        out
    }

    /// Operator composition self ∘ other, expanded by the Leibniz rule.
    pub fn compose(&self, other: &PolyDiffOperator) -> PolyDiffOperator {
        let mut out = PolyDiffOperator::zero(self.nvars);
        for (alpha, f) in &self.terms {
            for (beta, g) in &other.terms {
                // (f ∂^α)(g ∂^β) = f Σ_{γ≤α} C(α,γ) ∂^γ(g) ∂^{α−γ+β}
                for (gamma, binom) in sub_indices_with_binomials(alpha) {
                    let dg = g.partial_multi(&gamma);
                    if dg.is_zero() {
                        continue;
                    }
                    let rest = MultiIndex::new(
                        alpha
                            .exponents()
                            .iter()
                            .zip(gamma.exponents())
                            .zip(beta.exponents())
                            .map(|((&a, &c), &b)| a - c + b)
                            .collect(),
                    );
                    out.add_term(rest, f.mul(&dg).scale(&binom));
                }
            }
        }
        out
    }

    /// Anisotropic weight: min over terms of (weight(c_α) − ⟨α⟩); `None` for
    /// the zero operator.
    pub fn weight(&self, w: &WeightSequence) -> Option<i64> {
        self.terms
            .iter()
            .filter_map(|(deriv, coeff)| {
                let d = w.weighted_degree(deriv).expect("dimension checked");
                coeff.weight(w).map(|s| s as i64 - d as i64)
            })
            .min()
    }

    /// Drop every term of anisotropic weight above `max_weight`. Useful
    /// for weight computations of long compositions: a pruned piece can
    /// only produce descendants of still higher weight, so the minimum is
    /// preserved whenever it is known to lie at or below the threshold.
    pub fn truncate_weight(&self, w: &WeightSequence, max_weight: i64) -> PolyDiffOperator {
        let mut out = PolyDiffOperator::zero(self.nvars);
        for (deriv, coeff) in &self.terms {
            let d = w.weighted_degree(deriv).expect("dimension checked") as i64;
            let mut kept = Poly::zero(self.nvars);
            for (s, part) in coeff.homogeneous_parts(w) {
                if s as i64 - d <= max_weight {
                    kept = kept.add(&part);
                }
            }
            out.add_term(deriv.clone(), kept);
        }
        out
    }

    /// True when every term has anisotropic degree exactly d.
    pub fn is_homogeneous(&self, w: &WeightSequence, d: i64) -> bool {
        self.terms.iter().all(|(deriv, coeff)| {
            let dd = w.weighted_degree(deriv).expect("dimension checked") as i64;
            coeff
                .homogeneous_parts(w)
                .keys()
                .all(|&s| s as i64 - dd == d)
        })
    }
}

/// All γ ≤ α together with the multi-binomial C(α, γ).
fn sub_indices_with_binomials(alpha: &MultiIndex) -> Vec<(MultiIndex, Rat)> {
    let mut out: Vec<(Vec<u32>, Rat)> = vec![(Vec::new(), rat(1))];
    for &a in alpha.exponents() {
        let mut next = Vec::new();
        for (prefix, c) in &out {
            for g in 0..=a {
                let mut p = prefix.clone();
                p.push(g);
                next.push((p, c * rat(binomial(a, g))));
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|(e, c)| (MultiIndex::new(e), c))
        .collect()
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut num = 1i64;
    let mut den = 1i64;
    for i in 0..k {
        num *= (n - i) as i64;
        den *= (i + 1) as i64;
    }
    num / den
}

/// Build X^α = X_1^{α_1} ∘ ... ∘ X_n^{α_n} as an operator from frame fields.
pub fn frame_power_operator(fields: &[PolyVectorField], alpha: &MultiIndex) -> PolyDiffOperator {
    let n = fields.len();
    let mut op = PolyDiffOperator::identity(fields[0].n());
    debug_assert_eq!(alpha.len(), n);
    for (j, &e) in alpha.exponents().iter().enumerate() {
        for _ in 0..e {
            op = op.compose(&PolyDiffOperator::from_vector_field(&fields[j]));
        }
    }
    op
}

/// Apply the word X_{i_1} ∘ ... ∘ X_{i_m} (rightmost acts first) to f.
pub fn apply_word(fields: &[PolyVectorField], word: &[usize], f: &Poly) -> Poly {
    let mut out = f.clone();
    for &i in word.iter().rev() {
        out = fields[i].apply(&out);
    }
    out
}

/// Apply X^α = X_1^{α_1} ⋯ X_n^{α_n} to f directly (rightmost factor first).
pub fn apply_frame_power(fields: &[PolyVectorField], alpha: &MultiIndex, f: &Poly) -> Poly {
    let mut out = f.clone();
    for (j, &e) in alpha.exponents().iter().enumerate().rev() {
        for _ in 0..e {
            out = fields[j].apply(&out);
        }
    }
    out
}

/// The order at the base point 0 of a polynomial f with respect to frame
/// fields X_1..X_n: the least N such that some X^α f(0) ≠ 0 with ⟨α⟩ = N,
/// while X^α f(0) = 0 for all ⟨α⟩ < N. Enumeration is capped at weighted
/// degree `cap` (inclusive); `None` means the order exceeds the cap.
pub fn order_at_base(
    fields: &[PolyVectorField],
    w: &WeightSequence,
    f: &Poly,
    cap: u32,
) -> Result<Option<u32>> {
    if fields.len() != w.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            got: fields.len(),
        });
    }
    let origin: Vec<Rat> = (0..w.n()).map(|_| Rat::zero()).collect();
    for d in 0..=cap {
        for alpha in multi_indices_of_weighted_degree(w, d) {
            let g = apply_frame_power(fields, &alpha, f);
            if !g.eval(&origin).is_zero() {
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

/// Default enumeration cap for [`order_at_base`]: step + 2.
pub fn default_order_cap(w: &WeightSequence) -> u32 {
    w.step() + 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;

    fn heis_fields() -> Vec<PolyVectorField> {
        // symmetric Heisenberg frame: X1 = ∂1 − x2/2 ∂3, X2 = ∂2 + x1/2 ∂3, X3 = ∂3
        let x1 = PolyVectorField::new(vec![
            Poly::one(3),
            Poly::zero(3),
            Poly::var(3, 1).scale(&ratio(-1, 2)),
        ]);
        let x2 = PolyVectorField::new(vec![
            Poly::zero(3),
            Poly::one(3),
            Poly::var(3, 0).scale(&ratio(1, 2)),
        ]);
        let x3 = PolyVectorField::coordinate(3, 2);
        vec![x1, x2, x3]
    }

    fn w112() -> WeightSequence {
        WeightSequence::new(vec![1, 1, 2]).unwrap()
    }

    #[test]
    fn bracket_of_heisenberg_frame() {
        let f = heis_fields();
        let b = f[0].lie_bracket(&f[1]);
        assert_eq!(b, PolyVectorField::coordinate(3, 2));
        // antisymmetry
        assert_eq!(f[1].lie_bracket(&f[0]), b.scale(&rat(-1)));
        // [X1, X3] = 0
        assert!(f[0].lie_bracket(&f[2]).is_zero());
    }

    #[test]
    fn weight_of_fields() {
        let w = w112();
        let f = heis_fields();
        assert_eq!(f[0].weight(&w), Some(-1));
        assert_eq!(f[1].weight(&w), Some(-1));
        assert_eq!(f[2].weight(&w), Some(-2));
        assert_eq!(PolyVectorField::zero(3).weight(&w), None);
        // x1 ∂3 has weight 1 - 2 = -1
        let v = PolyVectorField::new(vec![Poly::zero(3), Poly::zero(3), Poly::var(3, 0)]);
        assert_eq!(v.weight(&w), Some(-1));
    }

    #[test]
    fn operator_weight_matches_field_weight() {
        let w = w112();
        for x in heis_fields() {
            let op = PolyDiffOperator::from_vector_field(&x);
            assert_eq!(op.weight(&w), x.weight(&w));
        }
    }

    #[test]
    fn operator_composition_is_leibniz_correct() {
        let w = w112();
        let f = heis_fields();
        let op1 = PolyDiffOperator::from_vector_field(&f[0]);
        let op2 = PolyDiffOperator::from_vector_field(&f[1]);
        let composed = op1.compose(&op2);
        // check on a few polynomials that composed.apply == f0(f1(.))
        let probes = [
            Poly::var(3, 2),
            Poly::var(3, 0).mul(&Poly::var(3, 1)),
            Poly::var(3, 2).pow(2).add(&Poly::var(3, 0).pow(3)),
        ];
        for p in &probes {
            assert_eq!(composed.apply(p), f[0].apply(&f[1].apply(p)));
        }
        // X1 X2 has weight -2 on the Heisenberg frame
        assert_eq!(composed.weight(&w), Some(-2));
    }

    #[test]
    fn frame_power_operator_weights() {
        let w = w112();
        let f = heis_fields();
        // every X^α with ⟨α⟩ ≤ r = 2 has weight exactly −⟨α⟩
        for d in 1..=2u32 {
            for alpha in multi_indices_of_weighted_degree(&w, d) {
                let op = frame_power_operator(&f, &alpha);
                assert_eq!(op.weight(&w), Some(-(d as i64)), "alpha {:?}", alpha);
            }
        }
    }

    #[test]
    fn order_at_base_examples() {
        let w = w112();
        let f = heis_fields();
        // ord(x3) = 2 in the Heisenberg chart
        assert_eq!(
            order_at_base(&f, &w, &Poly::var(3, 2), default_order_cap(&w)).unwrap(),
            Some(2)
        );
        assert_eq!(
            order_at_base(&f, &w, &Poly::var(3, 0), default_order_cap(&w)).unwrap(),
            Some(1)
        );
        // constants have order 0
        assert_eq!(
            order_at_base(&f, &w, &Poly::constant(3, rat(7)), default_order_cap(&w)).unwrap(),
            Some(0)
        );
        // zero exceeds any cap
        assert_eq!(
            order_at_base(&f, &w, &Poly::zero(3), default_order_cap(&w)).unwrap(),
            None
        );
        // x1 x3 has order 3
        let p = Poly::var(3, 0).mul(&Poly::var(3, 2));
        assert_eq!(
            order_at_base(&f, &w, &p, default_order_cap(&w)).unwrap(),
            Some(3)
        );
    }

    #[test]
    fn dilation_pullback_scales_parts() {
        let w = w112();
        let f = heis_fields();
        // X1 is homogeneous of degree −1: pullback by δ_t scales it by 1/t
        let t = ratio(3, 2);
        let pulled = f[0].dilation_pullback(&t, &w);
        assert_eq!(pulled, f[0].scale(&ratio(2, 3)));
    }

    #[test]
    fn homogeneous_parts_of_mixed_field() {
        let w = w112();
        // V = ∂1 + x3 ∂1 : degrees −1 and 1
        let v = PolyVectorField::new(vec![
            Poly::one(3).add(&Poly::var(3, 2)),
            Poly::zero(3),
            Poly::zero(3),
        ]);
        let parts = v.homogeneous_parts(&w);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[&-1], PolyVectorField::coordinate(3, 0));
        assert_eq!(
            parts[&1],
            PolyVectorField::new(vec![Poly::var(3, 2), Poly::zero(3), Poly::zero(3)])
        );
        assert_eq!(v.homogeneous_part(&w, -1), PolyVectorField::coordinate(3, 0));
        assert!(v.homogeneous_part(&w, 0).is_zero());
    }

    #[test]
    fn operator_weight_truncation() {
        let w = w112();
        // V = ∂1 + x3 ∂1: term weights −1 and 1
        let v = PolyVectorField::new(vec![
            Poly::one(3).add(&Poly::var(3, 2)),
            Poly::zero(3),
            Poly::zero(3),
        ]);
        let op = PolyDiffOperator::from_vector_field(&v);
        assert_eq!(op.weight(&w), Some(-1));
        let pruned = op.truncate_weight(&w, -1);
        assert_eq!(
            pruned,
            PolyDiffOperator::from_vector_field(&PolyVectorField::coordinate(3, 0))
        );
        // pruning above the minimum changes nothing
        assert_eq!(op.truncate_weight(&w, 1), op);
    }
}
