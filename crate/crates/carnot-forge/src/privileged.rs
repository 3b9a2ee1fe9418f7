//! Construction and verification of privileged coordinates.
//!
//! Pipeline: linearly adapt a valid frame (a linear change built from
//! B(0)), then apply the triangular polynomial correction ψ̂ whose
//! coefficients are forced by the vanishing conditions X^α(x_k)(0) = 0.
//! Privilegedness is checked two independent ways — by the order of the
//! coordinate functions and by the anisotropic weight of the fields — and
//! the equivalence of the two verdicts is itself a tested theorem.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::linalg;
use crate::poly::{multi_indices_below, MultiIndex, Poly, Rat, WeightSequence};
use crate::vf::{apply_frame_power, frame_power_operator, PolyVectorField};

/// A polynomial coordinate change fixing the origin, with its inverse held
/// either exactly or as a jet to `jet_order` (terms of weighted degree
/// ≤ jet_order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateChange {
    w: WeightSequence,
    forward: Vec<Poly>,
    inverse: Vec<Poly>,
    jet_order: u32,
    exact: bool,
}

impl CoordinateChange {
    pub fn identity(w: &WeightSequence) -> Self {
        let n = w.n();
        let vars: Vec<Poly> = (0..n).map(|j| Poly::var(n, j)).collect();
        CoordinateChange {
            w: w.clone(),
            forward: vars.clone(),
            inverse: vars,
            jet_order: w.default_jet_order(),
            exact: true,
        }
    }

    /// The linear change x ↦ Ax with exact matrix inverse.
    pub fn linear(w: &WeightSequence, a: &linalg::Matrix) -> Result<Self> {
        let n = w.n();
        let inv = linalg::invert(a).ok_or(Error::SingularLinearPart)?;
        let row_to_poly = |row: &Vec<Rat>| {
            let mut p = Poly::zero(n);
            for (l, c) in row.iter().enumerate() {
                p = p.add(&Poly::var(n, l).scale(c));
            }
            p
        };
        Ok(CoordinateChange {
            w: w.clone(),
            forward: a.iter().map(row_to_poly).collect(),
            inverse: inv.iter().map(row_to_poly).collect(),
            jet_order: w.default_jet_order(),
            exact: true,
        })
    }

    /// Build from forward components; the inverse is computed by fixed-point
    /// iteration on jets and upgraded to exact when the composition closes
    /// as a polynomial identity.
    pub fn from_polys(w: &WeightSequence, forward: Vec<Poly>, jet_order: u32) -> Result<Self> {
        let n = w.n();
        if forward.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: forward.len(),
            });
        }
        for (k, p) in forward.iter().enumerate() {
            if !p.constant_term().is_zero() {
                return Err(Error::NotCentered { k: k + 1 });
            }
        }
        let jac = jacobian_at_origin(&forward, n);
        let jac_inv = linalg::invert(&jac).ok_or(Error::SingularLinearPart)?;
        // split φ = L + N with N the nonlinear part
        let nonlinear: Vec<Poly> = forward
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let mut lin = Poly::zero(n);
                for (l, c) in jac[k].iter().enumerate() {
                    lin = lin.add(&Poly::var(n, l).scale(c));
                }
                p.sub(&lin)
            })
            .collect();
        // ι_{m+1} = L^{-1}(y − N(ι_m)); each step gains one weighted order
        let linv_apply = |v: &[Poly]| -> Vec<Poly> {
            (0..n)
                .map(|k| {
                    let mut acc = Poly::zero(n);
                    for (l, c) in jac_inv[k].iter().enumerate() {
                        acc = acc.add(&v[l].scale(c));
                    }
                    acc
                })
                .collect()
        };
        let vars: Vec<Poly> = (0..n).map(|j| Poly::var(n, j)).collect();
        let mut inverse = linv_apply(&vars);
        for _ in 0..jet_order {
            let shifted: Vec<Poly> = nonlinear
                .iter()
                .zip(&vars)
                .map(|(nk, y)| y.sub(&nk.compose(&inverse, Some((w, jet_order + 1)))))
                .collect();
            let next = linv_apply(&shifted);
            if next == inverse {
                break;
            }
            inverse = next;
        }
        let exact = compose_map(&forward, &inverse, None)
            .iter()
            .zip(&vars)
            .all(|(c, v)| c == v)
            && compose_map(&inverse, &forward, None)
                .iter()
                .zip(&vars)
                .all(|(c, v)| c == v);
        Ok(CoordinateChange {
            w: w.clone(),
            forward,
            inverse,
            jet_order,
            exact,
        })
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.w
    }

    pub fn forward(&self) -> &[Poly] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Poly] {
        &self.inverse
    }

    pub fn jet_order(&self) -> u32 {
        self.jet_order
    }

    /// True when forward and inverse compose to the identity exactly, not
    /// just to jet order.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_identity(&self) -> bool {
        let n = self.w.n();
        self.forward
            .iter()
            .enumerate()
            .all(|(j, p)| *p == Poly::var(n, j))
    }

    pub fn apply(&self, x: &[Rat]) -> Vec<Rat> {
        self.forward.iter().map(|p| p.eval(x)).collect()
    }

    pub fn apply_inverse(&self, y: &[Rat]) -> Vec<Rat> {
        self.inverse.iter().map(|p| p.eval(y)).collect()
    }

    pub fn apply_f64(&self, x: &[f64]) -> Vec<f64> {
        self.forward.iter().map(|p| p.eval_f64(x)).collect()
    }

    /// self ∘ other: apply `other` first.
    pub fn compose(&self, other: &CoordinateChange) -> CoordinateChange {
        let trunc = if self.exact && other.exact {
            None
        } else {
            Some((&self.w, self.jet_order.min(other.jet_order) + 1))
        };
        CoordinateChange {
            w: self.w.clone(),
            forward: compose_map(&self.forward, &other.forward, trunc),
            inverse: compose_map(&other.inverse, &self.inverse, trunc),
            jet_order: self.jet_order.min(other.jet_order),
            exact: self.exact && other.exact,
        }
    }

    /// Recompute the inverse at increasing jet orders until it closes
    /// exactly. Succeeds whenever the forward map has a polynomial
    /// inverse (e.g. any triangular map); errors once the search cap is
    /// reached.
    pub fn exactified(&self) -> Result<CoordinateChange> {
        if self.exact {
            return Ok(self.clone());
        }
        let mut order = self.jet_order.max(1) * 2;
        while order <= 1 << 12 {
            let candidate = CoordinateChange::from_polys(&self.w, self.forward.clone(), order)?;
            if candidate.is_exact() {
                return Ok(candidate);
            }
            order *= 2;
        }
        Err(Error::InvalidWeights(
            "coordinate change has no polynomial inverse within the search cap".into(),
        ))
    }

    /// Swap forward and inverse. Meaningful as an exact change only when
    /// `is_exact()`.
    pub fn inverted(&self) -> CoordinateChange {
        CoordinateChange {
            w: self.w.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            jet_order: self.jet_order,
            exact: self.exact,
        }
    }

    /// Pushforward of a frame: (φ_*X_j)_k(y) = Σ_l ∂_lφ_k(ι(y))·b_{jl}(ι(y)).
    /// Exact when the inverse is exact; otherwise truncated to the jet
    /// order.
    pub fn pushforward(&self, frame: &Frame) -> Result<Frame> {
        let n = self.w.n();
        if frame.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: frame.n(),
            });
        }
        let trunc = if self.exact {
            None
        } else {
            Some((&self.w, self.jet_order + 1))
        };
        let mut fields = Vec::with_capacity(n);
        for j in 0..n {
            let mut comps = Vec::with_capacity(n);
            for k in 0..n {
                let mut acc = Poly::zero(n);
                for l in 0..n {
                    let dphi = self.forward[k].partial(l);
                    if dphi.is_zero() || frame.field(j).component(l).is_zero() {
                        continue;
                    }
                    let a = dphi.compose(&self.inverse, trunc);
                    let b = frame.field(j).component(l).compose(&self.inverse, trunc);
                    acc = acc.add(&a.mul(&b));
                }
                if let Some((w, order)) = trunc {
                    acc = acc.truncate(w, order);
                }
                comps.push(acc);
            }
            fields.push(PolyVectorField::new(comps));
        }
        Frame::new(frame.weights().clone(), fields)
    }
}

fn compose_map(outer: &[Poly], inner: &[Poly], trunc: Option<(&WeightSequence, u32)>) -> Vec<Poly> {
    outer.iter().map(|p| p.compose(inner, trunc)).collect()
}

fn jacobian_at_origin(map: &[Poly], n: usize) -> linalg::Matrix {
    map.iter()
        .map(|p| {
            (0..n)
                .map(|l| p.partial(l).constant_term())
                .collect()
        })
        .collect()
}

/// True when X_j(0) = ∂_j for every j, i.e. B(0) = I.
pub fn is_linearly_adapted(frame: &Frame) -> bool {
    let b0 = frame.b0();
    let n = frame.n();
    (0..n).all(|j| {
        (0..n).all(|k| {
            if j == k {
                b0[j][k].is_one()
            } else {
                b0[j][k].is_zero()
            }
        })
    })
}

/// The unique linear change T(x) = (B(0)ᵀ)^{-1}x making the frame linearly
/// adapted, together with the pushed frame.
pub fn linearly_adapt(frame: &Frame) -> Result<(CoordinateChange, Frame)> {
    let bt = linalg::transpose(&frame.b0());
    let a = linalg::invert(&bt).ok_or(Error::SingularFrame)?;
    let change = CoordinateChange::linear(frame.weights(), &a)?;
    let pushed = change.pushforward(frame)?;
    debug_assert!(is_linearly_adapted(&pushed));
    Ok((change, pushed))
}

/// The ψ̂ correction of a linearly adapted frame, computed with the default
/// enumeration (increasing |α|, lexicographic within each class).
pub fn psi_hat(frame: &Frame) -> Result<CoordinateChange> {
    psi_hat_with(frame, |_, _, _| {})
}

/// ψ̂ with a caller-controlled enumeration: `reorder(k, class_size, alphas)`
/// may permute each same-|α| class before it is consumed. Any such order is
/// admissible (the recursion only references coefficients of strictly
/// smaller |α|), so every call site must produce identical coefficients —
/// this is the uniqueness property under test.
pub fn psi_hat_with(
    frame: &Frame,
    mut reorder: impl FnMut(usize, u32, &mut Vec<MultiIndex>),
) -> Result<CoordinateChange> {
    if !is_linearly_adapted(frame) {
        return Err(Error::NotLinearlyAdapted);
    }
    let w = frame.weights();
    let n = w.n();
    let origin: Vec<Rat> = (0..n).map(|_| Rat::zero()).collect();
    let mut forward = Vec::with_capacity(n);
    for k in 0..n {
        let wk = w.weight(k);
        // admissible multi-indices: 2 ≤ |α|, ⟨α⟩ < w_k, grouped by |α|
        let mut classes: Vec<Vec<MultiIndex>> = Vec::new();
        for (_, alphas) in multi_indices_below(w, wk) {
            for alpha in alphas {
                let m = alpha.total_degree() as usize;
                if m < 2 {
                    continue;
                }
                while classes.len() < m - 1 {
                    classes.push(Vec::new());
                }
                classes[m - 2].push(alpha);
            }
        }
        let mut coeffs: Vec<(MultiIndex, Rat)> = Vec::new();
        for (ci, class) in classes.iter_mut().enumerate() {
            class.sort();
            reorder(k, (ci + 2) as u32, class);
            for alpha in class.iter() {
                // α! a_{kα} = −X^α(x_k)(0) − Σ_{|β|<|α|} a_{kβ} X^α(x^β)(0)
                let xk = Poly::var(n, k);
                let mut rhs = -apply_frame_power(frame.fields(), alpha, &xk).eval(&origin);
                for (beta, a) in &coeffs {
                    if beta.total_degree() >= alpha.total_degree() {
                        continue;
                    }
                    let xb = Poly::monomial(n, beta.clone(), Rat::one());
                    let v = apply_frame_power(frame.fields(), alpha, &xb).eval(&origin);
                    rhs -= a * v;
                }
                let a = rhs / alpha.factorial();
                if !a.is_zero() {
                    coeffs.push((alpha.clone(), a));
                }
            }
        }
        let mut comp = Poly::var(n, k);
        for (alpha, a) in coeffs {
            comp.add_term(alpha, a);
        }
        forward.push(comp);
    }
    CoordinateChange::from_polys(w, forward, w.default_jet_order())
}

/// One failed vanishing condition X^α(x_k)(0) ≠ 0 (1-based k).
#[derive(Debug, Clone)]
pub struct OrderFailure {
    pub k: usize,
    pub alpha: Vec<u32>,
    pub value: Rat,
}

/// Order-based privilegedness: linear adaptation plus vanishing of
/// X^α(x_k)(0) for all ⟨α⟩ < w_k.
#[derive(Debug, Clone)]
pub struct PrivilegedReport {
    pub linearly_adapted: bool,
    pub failures: Vec<OrderFailure>,
    pub verdict: bool,
}

/// Check privilegedness by the order of the coordinate functions: the
/// coordinate x_k must have order exactly w_k, i.e. X^α(x_k)(0) = 0 for all
/// ⟨α⟩ < w_k while X_k(x_k)(0) = 1 (part of linear adaptation).
pub fn is_privileged(frame: &Frame) -> PrivilegedReport {
    let w = frame.weights();
    let n = w.n();
    let origin: Vec<Rat> = (0..n).map(|_| Rat::zero()).collect();
    let linearly_adapted = is_linearly_adapted(frame);
    let mut failures = Vec::new();
    for k in 0..n {
        let xk = Poly::var(n, k);
        for (_, alphas) in multi_indices_below(w, w.weight(k)) {
            for alpha in alphas {
                let v = apply_frame_power(frame.fields(), &alpha, &xk).eval(&origin);
                if !v.is_zero() {
                    failures.push(OrderFailure {
                        k: k + 1,
                        alpha: alpha.exponents().to_vec(),
                        value: v,
                    });
                }
            }
        }
    }
    let verdict = linearly_adapted && failures.is_empty();
    PrivilegedReport {
        linearly_adapted,
        failures,
        verdict,
    }
}

/// Weight-based privilegedness report: the observed weight of each field.
#[derive(Debug, Clone)]
pub struct WeightReport {
    pub found: Vec<Option<i64>>,
    pub verdict: bool,
}

/// Check that each X_j has anisotropic weight exactly −w_j.
pub fn weights_ok(frame: &Frame) -> WeightReport {
    let w = frame.weights();
    let found: Vec<Option<i64>> = frame.fields().iter().map(|f| f.weight(w)).collect();
    let verdict = found
        .iter()
        .enumerate()
        .all(|(j, &fw)| fw == Some(-(w.weight(j) as i64)));
    WeightReport { found, verdict }
}

/// Check that every operator X^α with 1 ≤ ⟨α⟩ ≤ r has weight exactly −⟨α⟩.
pub fn frame_powers_weight_ok(frame: &Frame) -> bool {
    let w = frame.weights();
    for (d, alphas) in multi_indices_below(w, w.step() + 1) {
        for alpha in alphas {
            let op = frame_power_operator(frame.fields(), &alpha);
            if op.weight(w) != Some(-(d as i64)) {
                return false;
            }
        }
    }
    true
}

/// Model fields X_j^{(a)}: the homogeneous part of X_j of degree −w_j.
/// Requires the weight check (each X_j of weight −w_j), which makes each
/// model field w-homogeneous with X_j^{(a)}(0) = ∂_j.
pub fn model_fields(frame: &Frame) -> Result<Vec<PolyVectorField>> {
    let w = frame.weights();
    let report = weights_ok(frame);
    if !report.verdict {
        let j = report
            .found
            .iter()
            .enumerate()
            .find(|(j, &fw)| fw != Some(-(w.weight(*j) as i64)))
            .map(|(j, _)| j)
            .unwrap();
        return Err(Error::WeightCheck {
            field: j + 1,
            expected: -(w.weight(j) as i64),
            found: report.found[j],
        });
    }
    Ok(frame
        .fields()
        .iter()
        .enumerate()
        .map(|(j, f)| f.homogeneous_part(w, -(w.weight(j) as i64)))
        .collect())
}

/// Diagnostic for a change between privileged coordinate systems.
#[derive(Debug, Clone)]
pub struct PreservationReport {
    /// components k whose graded part of weighted degree d < w_k is nonzero
    pub low_degree_failures: Vec<(usize, u32)>,
    pub jacobian_is_identity: bool,
    /// the degree-w_k graded parts, when the verdict holds
    pub hat: Option<Vec<Poly>>,
    pub verdict: bool,
}

/// Decompose each φ_k into graded parts and test the characterization of
/// privileged-to-privileged changes: no parts of weighted degree < w_k, and
/// the degree-w_k parts φ̂ form a w-homogeneous map with φ̂′(0) = id.
pub fn change_is_privileged_preserving(
    change: &CoordinateChange,
    w: &WeightSequence,
) -> PreservationReport {
    let n = w.n();
    let mut low_degree_failures = Vec::new();
    let mut hat = Vec::with_capacity(n);
    for k in 0..n {
        let parts = change.forward()[k].homogeneous_parts(w);
        for (&d, part) in &parts {
            if d < w.weight(k) && !part.is_zero() {
                low_degree_failures.push((k + 1, d));
            }
        }
        hat.push(change.forward()[k].homogeneous_part(w, w.weight(k)));
    }
    let jac = jacobian_at_origin(&hat, n);
    let jacobian_is_identity = jac == linalg::identity(n);
    let verdict = low_degree_failures.is_empty() && jacobian_is_identity;
    PreservationReport {
        low_degree_failures,
        jacobian_is_identity,
        hat: if verdict { Some(hat) } else { None },
        verdict,
    }
}

/// Exact inverse of a change whose w-homogeneous part is triangular with
/// invertible linear part: delegates to the jet fixed point and insists on
/// exact closure.
pub fn invert_triangular(change: &CoordinateChange) -> Result<CoordinateChange> {
    if !change.is_exact() {
        return Err(Error::SingularLinearPart);
    }
    Ok(change.inverted())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poly::{rat, ratio};

    #[test]
    fn linearly_adapt_examples() {
        // already adapted → identity change
        let heis = fixtures::symmetric_heisenberg();
        let (change, pushed) = linearly_adapt(&heis).unwrap();
        assert!(change.is_identity());
        assert_eq!(pushed, heis);

        // frame (2∂₁), n = 1 → T(x) = x/2
        let w = WeightSequence::new(vec![1]).unwrap();
        let frame = Frame::new(
            w.clone(),
            vec![PolyVectorField::new(vec![Poly::constant(1, rat(2))])],
        )
        .unwrap();
        let (change, pushed) = linearly_adapt(&frame).unwrap();
        assert_eq!(change.forward()[0], Poly::var(1, 0).scale(&ratio(1, 2)));
        assert_eq!(pushed.field(0), &PolyVectorField::coordinate(1, 0));
    }

    #[test]
    fn psi_hat_identity_for_step_two() {
        let frame = fixtures::polarized_heisenberg();
        let change = psi_hat(&frame).unwrap();
        assert!(change.is_identity());
    }

    #[test]
    fn psi_hat_identity_for_privileged_frame() {
        // the Engel fixture is already privileged, so the recursion yields 0
        let frame = fixtures::engel();
        assert!(is_privileged(&frame).verdict);
        let change = psi_hat(&frame).unwrap();
        assert!(change.is_identity());
    }

    fn skewed_engel() -> (Frame, CoordinateChange) {
        // push the Engel frame through x4 → x4 + x1·x2 (weighted degree
        // 2 < w4 = 3): stays valid and linearly adapted, loses privilege
        let base = fixtures::engel();
        let w = base.weights().clone();
        let mut fwd: Vec<Poly> = (0..4).map(|j| Poly::var(4, j)).collect();
        fwd[3] = fwd[3].add(&Poly::var(4, 0).mul(&Poly::var(4, 1)));
        let change = CoordinateChange::from_polys(&w, fwd, w.default_jet_order()).unwrap();
        assert!(change.is_exact());
        (change.pushforward(&base).unwrap(), change)
    }

    #[test]
    fn psi_hat_nontrivial_and_repairs() {
        let (frame, _) = skewed_engel();
        assert!(frame
            .validate(frame.weights().default_jet_order())
            .valid);
        assert!(is_linearly_adapted(&frame));
        assert!(!is_privileged(&frame).verdict);
        let psi = psi_hat(&frame).unwrap();
        assert!(!psi.is_identity());
        let repaired = psi.pushforward(&frame).unwrap();
        assert!(is_privileged(&repaired).verdict);
        // oracle: the defining vanishing conditions hold for ψ̂ itself:
        // X^α(ψ̂_k)(0) = 0 for all ⟨α⟩ < w_k, |α| ≥ 2
        let w = frame.weights();
        let origin: Vec<Rat> = (0..4).map(|_| Rat::zero()).collect();
        for k in 0..4 {
            for (_, alphas) in multi_indices_below(w, w.weight(k)) {
                for alpha in alphas {
                    if alpha.total_degree() < 2 {
                        continue;
                    }
                    let v = apply_frame_power(frame.fields(), &alpha, &psi.forward()[k])
                        .eval(&origin);
                    assert!(v.is_zero(), "k={k} alpha={alpha:?}");
                }
            }
        }
    }

    #[test]
    fn psi_hat_enumeration_permutation_invariant() {
        let (frame, _) = skewed_engel();
        let default = psi_hat(&frame).unwrap();
        let reversed = psi_hat_with(&frame, |_, _, class| class.reverse()).unwrap();
        assert_eq!(default.forward(), reversed.forward());
    }

    #[test]
    fn is_privileged_examples() {
        let w = WeightSequence::new(vec![1, 1, 2]).unwrap();
        assert!(is_privileged(&fixtures::coordinate_frame(&w)).verdict);
        assert!(is_privileged(&fixtures::symmetric_heisenberg()).verdict);
        let bad = fixtures::violating_w113();
        let report = is_privileged(&bad);
        assert!(!report.verdict);
        assert!(report.linearly_adapted);
        assert!(!report.failures.is_empty());
    }

    #[test]
    fn weights_ok_examples() {
        assert!(weights_ok(&fixtures::symmetric_heisenberg()).verdict);
        let w = WeightSequence::new(vec![1, 1, 2]).unwrap();
        assert!(weights_ok(&fixtures::coordinate_frame(&w)).verdict);
        // frame (∂₁, ∂₂ + x₂∂₃, ∂₃): X₂'s extra term has degree −1 = −w₂,
        // so both verdicts hold — the equivalence theorem in action
        let x2 = PolyVectorField::new(vec![Poly::zero(3), Poly::one(3), Poly::var(3, 1)]);
        let frame = Frame::new(
            w,
            vec![
                PolyVectorField::coordinate(3, 0),
                x2,
                PolyVectorField::coordinate(3, 2),
            ],
        )
        .unwrap();
        assert!(weights_ok(&frame).verdict);
        assert!(is_privileged(&frame).verdict);
        assert!(frame_powers_weight_ok(&frame));
    }

    #[test]
    fn equivalence_on_fixtures() {
        let w113 = fixtures::violating_w113();
        let (skewed, _) = skewed_engel();
        let frames = [
            fixtures::symmetric_heisenberg(),
            fixtures::polarized_heisenberg(),
            fixtures::engel(),
            fixtures::chained_123(),
            w113,
            skewed,
        ];
        for frame in &frames {
            let by_order = is_privileged(frame).verdict;
            let by_weight = weights_ok(frame).verdict;
            let by_powers = frame_powers_weight_ok(frame);
            assert_eq!(by_order, by_weight);
            assert_eq!(by_order, by_powers);
        }
    }

    #[test]
    fn model_fields_examples() {
        let w = WeightSequence::new(vec![1, 1, 2]).unwrap();
        let coord = fixtures::coordinate_frame(&w);
        assert_eq!(model_fields(&coord).unwrap(), coord.fields().to_vec());
        let heis = fixtures::symmetric_heisenberg();
        assert_eq!(model_fields(&heis).unwrap(), heis.fields().to_vec());
        // perturb polarized X₁ by x₁²∂₃ (degree 0 > −1): model drops it
        let pol = fixtures::polarized_heisenberg();
        let mut fields = pol.fields().to_vec();
        let mut comps = fields[0].components().to_vec();
        comps[2] = comps[2].add(&Poly::var(3, 0).pow(2));
        fields[0] = PolyVectorField::new(comps);
        let perturbed = Frame::new(w, fields).unwrap();
        assert_eq!(model_fields(&perturbed).unwrap(), pol.fields().to_vec());
    }

    #[test]
    fn model_fields_requires_weight_check() {
        // X₂ = ∂₂ + x₁∂₃ carries the term x₁∂₃ of weight 1 − 3 = −2 ≠ −w₂
        let bad = fixtures::violating_w113();
        assert!(matches!(
            model_fields(&bad),
            Err(Error::WeightCheck {
                field: 2,
                expected: -1,
                found: Some(-2),
            })
        ));
    }

    #[test]
    fn preservation_characterization_examples() {
        let w = WeightSequence::new(vec![1, 1, 2]).unwrap();
        let id = CoordinateChange::identity(&w);
        let rep = change_is_privileged_preserving(&id, &w);
        assert!(rep.verdict);

        // φ = (x₁, x₂, x₃ + x₁x₂): degree-2 addition to a weight-2 slot
        let mut fwd: Vec<Poly> = (0..3).map(|j| Poly::var(3, j)).collect();
        fwd[2] = fwd[2].add(&Poly::var(3, 0).mul(&Poly::var(3, 1)));
        let good = CoordinateChange::from_polys(&w, fwd, w.default_jet_order()).unwrap();
        let rep = change_is_privileged_preserving(&good, &w);
        assert!(rep.verdict);
        assert_eq!(rep.hat.as_ref().unwrap(), good.forward());

        // φ = (x₁, x₂, x₃ + x₁): degree 1 < w₃ = 2 → rejected
        let mut fwd: Vec<Poly> = (0..3).map(|j| Poly::var(3, j)).collect();
        fwd[2] = fwd[2].add(&Poly::var(3, 0));
        let bad = CoordinateChange::from_polys(&w, fwd, w.default_jet_order()).unwrap();
        let rep = change_is_privileged_preserving(&bad, &w);
        assert!(!rep.verdict);
        assert_eq!(rep.low_degree_failures, vec![(3, 1)]);
    }

    #[test]
    fn preservation_closure_on_heisenberg() {
        let w = WeightSequence::new(vec![1, 1, 2]).unwrap();
        let heis = fixtures::symmetric_heisenberg();
        // passing change keeps privilege
        let mut fwd: Vec<Poly> = (0..3).map(|j| Poly::var(3, j)).collect();
        fwd[2] = fwd[2].add(&Poly::var(3, 0).mul(&Poly::var(3, 1)));
        let good = CoordinateChange::from_polys(&w, fwd, w.default_jet_order()).unwrap();
        assert!(change_is_privileged_preserving(&good, &w).verdict);
        let pushed = good.pushforward(&heis).unwrap();
        assert!(is_privileged(&pushed).verdict);
        // failing change destroys it
        let mut fwd: Vec<Poly> = (0..3).map(|j| Poly::var(3, j)).collect();
        fwd[2] = fwd[2].add(&Poly::var(3, 0));
        let bad = CoordinateChange::from_polys(&w, fwd, w.default_jet_order()).unwrap();
        assert!(!change_is_privileged_preserving(&bad, &w).verdict);
        let pushed = bad.pushforward(&heis).unwrap();
        assert!(!is_privileged(&pushed).verdict);
    }

    #[test]
    fn invert_triangular_examples() {
        let w = WeightSequence::new(vec![1, 2]).unwrap();
        let fwd = vec![
            Poly::var(2, 0),
            Poly::var(2, 1).add(&Poly::var(2, 0).pow(2)),
        ];
        let change = CoordinateChange::from_polys(&w, fwd, w.default_jet_order()).unwrap();
        assert!(change.is_exact());
        let inv = invert_triangular(&change).unwrap();
        assert_eq!(
            inv.forward(),
            &[
                Poly::var(2, 0),
                Poly::var(2, 1).sub(&Poly::var(2, 0).pow(2)),
            ]
        );
        // identity and linear cases
        let id = CoordinateChange::identity(&w);
        assert!(invert_triangular(&id).unwrap().is_identity());
        let a = vec![vec![rat(2), rat(0)], vec![rat(0), rat(3)]];
        let lin = CoordinateChange::linear(&w, &a).unwrap();
        let lin_inv = invert_triangular(&lin).unwrap();
        assert_eq!(lin_inv.forward()[0], Poly::var(2, 0).scale(&ratio(1, 2)));
        assert_eq!(lin_inv.forward()[1], Poly::var(2, 1).scale(&ratio(1, 3)));
    }

    #[test]
    fn jet_inverse_for_non_triangular_change() {
        // φ₂ = x₂/(1+x₂) has no polynomial inverse; use a polynomial φ with
        // non-polynomial inverse: φ = (x₁ + x₁², x₂) in trivial weights
        let w = WeightSequence::new(vec![1, 1]).unwrap();
        let fwd = vec![Poly::var(2, 0).add(&Poly::var(2, 0).pow(2)), Poly::var(2, 1)];
        let order = 6;
        let change = CoordinateChange::from_polys(&w, fwd.clone(), order).unwrap();
        assert!(!change.is_exact());
        // composition closes to jet order
        let comp = fwd[0].compose(change.inverse(), Some((&w, order + 1)));
        assert_eq!(comp, Poly::var(2, 0));
    }

    #[test]
    fn from_polys_rejects_bad_input() {
        let w = WeightSequence::new(vec![1, 1]).unwrap();
        let off_origin = vec![Poly::var(2, 0).add(&Poly::one(2)), Poly::var(2, 1)];
        assert!(matches!(
            CoordinateChange::from_polys(&w, off_origin, 5),
            Err(Error::NotCentered { k: 1 })
        ));
        let singular = vec![Poly::var(2, 0), Poly::var(2, 0)];
        assert!(matches!(
            CoordinateChange::from_polys(&w, singular, 5),
            Err(Error::SingularLinearPart)
        ));
    }
}
