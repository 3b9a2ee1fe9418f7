//! Graded nilpotent Lie algebras, the Dynkin product, polynomial
//! exponential/logarithm maps, nilpotent group laws, and the Heisenberg
//! family.
//!
//! Everything here is exact symbolic computation: the group law is
//! assembled as a polynomial map in 2n variables, and identities like
//! associativity are checked as polynomial identities (or on exact rational
//! sample points when the symbolic variable budget is exceeded).

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::frames::{Frame, StructureConstants};
use crate::poly::{rat, ratio, MultiIndex, Poly, Rat, WeightSequence};
use crate::privileged::CoordinateChange;
use crate::vf::PolyVectorField;

/// A graded nilpotent Lie algebra on basis e_1,…,e_n with exact structure
/// constants: [e_i, e_j] = Σ_{w_k = w_i + w_j} c_ij^k e_k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedLieAlgebra {
    w: WeightSequence,
    c: StructureConstants,
}

impl GradedLieAlgebra {
    /// Validate antisymmetry (carried by `StructureConstants`), the grading
    /// and the Jacobi identity; a violation reports the witnessing indices.
    pub fn new(w: WeightSequence, c: StructureConstants) -> Result<Self> {
        let n = w.n();
        if c.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.n(),
            });
        }
        for (&(i, j, k), v) in c.iter() {
            if v.is_zero() {
                continue;
            }
            if w.weight(k) != w.weight(i) + w.weight(j) {
                return Err(Error::Grading {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                });
            }
            if c.get(j, i, k) != -v.clone() {
                return Err(Error::Antisymmetry {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                });
            }
        }
        // Jacobi: Σ_m (c_jk^m c_im^l + c_ki^m c_jm^l + c_ij^m c_km^l) = 0
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = Rat::zero();
                        for m in 0..n {
                            acc += c.get(j, k, m) * c.get(i, m, l);
                            acc += c.get(k, i, m) * c.get(j, m, l);
                            acc += c.get(i, j, m) * c.get(k, m, l);
                        }
                        if !acc.is_zero() {
                            return Err(Error::Jacobi {
                                i: i + 1,
                                j: j + 1,
                                k: k + 1,
                                l: l + 1,
                            });
                        }
                    }
                }
            }
        }
        Ok(GradedLieAlgebra { w, c })
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.w
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.c
    }

    /// Bracket of coefficient vectors whose entries live in any polynomial
    /// ring (constants included as 0-variable polynomials).
    pub fn bracket_poly(&self, x: &[Poly], y: &[Poly]) -> Vec<Poly> {
        let n = self.n();
        let nv = x[0].nvars();
        let mut out = vec![Poly::zero(nv); n];
        for (&(i, j, k), v) in self.c.iter() {
            if x[i].is_zero() || y[j].is_zero() {
                continue;
            }
            out[k] = out[k].add(&x[i].mul(&y[j]).scale(v));
        }
        out
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let xp = rats_to_polys(x);
        let yp = rats_to_polys(y);
        self.bracket_poly(&xp, &yp)
            .iter()
            .map(|p| p.eval(&[]))
            .collect()
    }

    /// The Dynkin product ξ·η, evaluated by the explicit double sum
    ///   Σ_{N≥1} ((−1)^{N+1}/N) Σ_{α,β : α_j+β_j ≥ 1}
    ///     ((|α|+|β|)^{-1}/(α!β!)) (ad_ξ)^{α_1}(ad_η)^{β_1}⋯(ad_ξ)^{α_N}(ad_η)^{β_N−1}η,
    /// with the convention that a group ending in β_N = 0 contributes
    /// (ad_ξ)^{α_N−1}ξ, and a term vanishes when β_N ≥ 2 or (β_N = 0 and
    /// α_N ≥ 2). Words of bracket length > r are pruned (nilpotency).
    pub fn dynkin_poly(&self, xi: &[Poly], eta: &[Poly]) -> Vec<Poly> {
        let n = self.n();
        let r = self.w.step();
        let nv = xi[0].nvars();
        let mut acc = vec![Poly::zero(nv); n];
        let mut groups: Vec<(u32, u32)> = Vec::new();
        self.dynkin_rec(xi, eta, r, &mut groups, &mut acc);
        acc
    }

    fn dynkin_rec(
        &self,
        xi: &[Poly],
        eta: &[Poly],
        budget: u32,
        groups: &mut Vec<(u32, u32)>,
        acc: &mut Vec<Poly>,
    ) {
        let used: u32 = groups.iter().map(|&(a, b)| a + b).sum();
        if !groups.is_empty() {
            self.dynkin_term(xi, eta, groups, acc);
        }
        if used >= budget {
            return;
        }
        // extend by one more (α, β) group with α + β ≥ 1
        let room = budget - used;
        for a in 0..=room {
            for b in 0..=(room - a) {
                if a + b == 0 {
                    continue;
                }
                groups.push((a, b));
                self.dynkin_rec(xi, eta, budget, groups, acc);
                groups.pop();
            }
        }
    }

    fn dynkin_term(&self, xi: &[Poly], eta: &[Poly], groups: &[(u32, u32)], acc: &mut Vec<Poly>) {
        let big_n = groups.len();
        let (alpha_last, beta_last) = groups[big_n - 1];
        if beta_last >= 2 || (beta_last == 0 && alpha_last >= 2) {
            return;
        }
        let letters: u32 = groups.iter().map(|&(a, b)| a + b).sum();
        // word, built from the innermost letter outward
        let mut word: Vec<Poly> = if beta_last == 0 {
            // (ad_ξ)^{α_N−1} ξ — the lone ξ with α_N − 1 = 0 further ads
            xi.to_vec()
        } else {
            // (ad_ξ)^{α_N}(ad_η)^{β_N−1} η with β_N = 1
            let mut v = eta.to_vec();
            for _ in 0..alpha_last {
                v = self.bracket_poly(xi, &v);
            }
            v
        };
        for &(a, b) in groups[..big_n - 1].iter().rev() {
            for _ in 0..b {
                word = self.bracket_poly(eta, &word);
            }
            for _ in 0..a {
                word = self.bracket_poly(xi, &word);
            }
            if word.iter().all(Poly::is_zero) {
                return;
            }
        }
        if word.iter().all(Poly::is_zero) {
            return;
        }
        let mut coeff = ratio(
            if big_n % 2 == 1 { 1 } else { -1 },
            big_n as i64,
        ) / rat(letters as i64);
        for &(a, b) in groups {
            coeff /= MultiIndex::new(vec![a, b]).factorial();
        }
        for (k, wk) in word.into_iter().enumerate() {
            acc[k] = acc[k].add(&wk.scale(&coeff));
        }
    }

    pub fn dynkin(&self, xi: &[Rat], eta: &[Rat]) -> Vec<Rat> {
        let xp = rats_to_polys(xi);
        let yp = rats_to_polys(eta);
        self.dynkin_poly(&xp, &yp)
            .iter()
            .map(|p| p.eval(&[]))
            .collect()
    }
}

fn rats_to_polys(x: &[Rat]) -> Vec<Poly> {
    x.iter().map(|v| Poly::constant(0, v.clone())).collect()
}

/// A canonical basis: n vector fields with Y_j(0) = ∂_j and Y_j
/// w-homogeneous of degree −w_j (the left-invariant frame of a nilpotent
/// group in exponential-compatible coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalBasis {
    w: WeightSequence,
    fields: Vec<PolyVectorField>,
}

impl CanonicalBasis {
    pub fn new(w: WeightSequence, fields: Vec<PolyVectorField>) -> Result<Self> {
        let n = w.n();
        if fields.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: fields.len(),
            });
        }
        for (j, f) in fields.iter().enumerate() {
            let d = -(w.weight(j) as i64);
            if f.homogeneous_part(&w, d) != *f {
                return Err(Error::NotHomogeneousBasis {
                    field: j + 1,
                    expected: d,
                });
            }
            for k in 0..n {
                let c0 = f.component(k).constant_term();
                let expected = if k == j { Rat::one() } else { Rat::zero() };
                if c0 != expected {
                    return Err(Error::BasisMismatch(format!(
                        "field {} does not agree with the coordinate field at 0",
                        j + 1
                    )));
                }
            }
        }
        Ok(CanonicalBasis { w, fields })
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

    /// As a frame (e.g. for pushforwards or privilege checks).
    pub fn as_frame(&self) -> Frame {
        Frame::new(self.w.clone(), self.fields.clone()).expect("dimensions agree")
    }

    /// True when [Y_i, Y_j] = Σ_{w_k = w_i + w_j} c_ij^k Y_k holds exactly
    /// as a vector-field identity for every pair.
    pub fn brackets_match(&self, c: &StructureConstants) -> bool {
        bracket_failures(&self.w, &self.fields, c).is_empty()
    }

    /// Structure constants read off at the origin (B(0) = I for a canonical
    /// basis, restricted to the graded entries).
    pub fn constants_at_origin(&self) -> StructureConstants {
        self.as_frame()
            .structure_constants()
            .expect("B(0) = I is invertible")
    }

    /// The flow polynomial Φ(ξ, y) = exp(Σ_j ξ_j Y_j)(y) at time 1, as a
    /// map of 2n variables (ξ_1..ξ_n, y_1..y_n), obtained by exact
    /// integration of the triangular ODE system.
    pub fn flow_map(&self) -> Vec<Poly> {
        let n = self.n();
        let nv = 2 * n + 1; // ξ, y, t
        let tvar = 2 * n;
        let mut xs: Vec<Poly> = vec![Poly::zero(nv); n];
        for k in 0..n {
            // x_k(t) = y_k + Σ_j ξ_j ∫₀ᵗ b_{jk}(x(s)) ds; b_{jk} only
            // references components of weight < w_k, already solved
            let mut acc = Poly::var(nv, n + k);
            for j in 0..n {
                let bjk = self.fields[j].component(k);
                if bjk.is_zero() {
                    continue;
                }
                let integrand = bjk.compose(&xs_with_placeholder(&xs, nv), None);
                let integral = integrate_in_var(&integrand, tvar);
                acc = acc.add(&Poly::var(nv, j).mul(&integral));
            }
            xs[k] = acc;
        }
        // substitute t = 1
        let mut args: Vec<Poly> = (0..2 * n).map(|i| Poly::var(2 * n, i)).collect();
        args.push(Poly::one(2 * n));
        xs.iter().map(|p| p.compose(&args, None)).collect()
    }

    /// exp(ξ) = Φ(ξ, 0): a triangular w-homogeneous polynomial
    /// diffeomorphism in n variables with identity diagonal.
    pub fn exp_map(&self) -> Vec<Poly> {
        let n = self.n();
        let mut args: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
        args.extend((0..n).map(|_| Poly::zero(n)));
        self.flow_map()
            .iter()
            .map(|p| p.compose(&args, None))
            .collect()
    }

    /// exp as an exactly invertible coordinate change (forward = exp,
    /// inverse = log).
    pub fn exp_change(&self) -> CoordinateChange {
        let change = CoordinateChange::from_polys(&self.w, self.exp_map(), self.w.default_jet_order())
            .expect("exp map is centered with identity linear part");
        debug_assert!(change.is_exact());
        change
    }

    /// The exact inverse log(x) of the exponential map.
    pub fn log_map(&self) -> Vec<Poly> {
        self.exp_change().inverse().to_vec()
    }

    /// exp evaluated at a rational coefficient vector.
    pub fn exp_point(&self, xi: &[Rat]) -> Vec<Rat> {
        self.exp_map().iter().map(|p| p.eval(xi)).collect()
    }

    /// The second-kind target γ̂(x) = exp(x₁Y₁) ∘ ⋯ ∘ exp(x_nY_n)(0),
    /// assembled symbolically (Y_n flows first).
    pub fn second_kind_map(&self) -> Vec<Poly> {
        let n = self.n();
        let flow = self.flow_map();
        let mut point: Vec<Poly> = vec![Poly::zero(n); n];
        for j in (0..n).rev() {
            let mut args: Vec<Poly> = vec![Poly::zero(n); n];
            args[j] = Poly::var(n, j);
            args.extend(point.iter().cloned());
            point = flow.iter().map(|p| p.compose(&args, None)).collect();
        }
        point
    }
}

fn xs_with_placeholder(xs: &[Poly], nv: usize) -> Vec<Poly> {
    // unsolved (higher-weight) slots are never referenced by a homogeneous
    // basis; zero placeholders keep compose total
    xs.iter()
        .map(|p| {
            if p.is_zero() {
                Poly::zero(nv)
            } else {
                p.clone()
            }
        })
        .collect()
}

/// ∫₀ᵗ p ds where `var` plays the role of t: t^m ↦ t^{m+1}/(m+1).
fn integrate_in_var(p: &Poly, var: usize) -> Poly {
    let mut out = Poly::zero(p.nvars());
    for (alpha, c) in p.terms() {
        let mut exps = alpha.exponents().to_vec();
        let m = exps[var];
        exps[var] = m + 1;
        out.add_term(MultiIndex::new(exps), c / rat((m + 1) as i64));
    }
    out
}

/// A nilpotent group law on ℝⁿ: n polynomial components in the 2n
/// variables (x_1..x_n, y_1..y_n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotentGroupLaw {
    w: WeightSequence,
    components: Vec<Poly>,
}

impl NilpotentGroupLaw {
    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.w
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn apply(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let point: Vec<Rat> = x.iter().chain(y).cloned().collect();
        self.components.iter().map(|p| p.eval(&point)).collect()
    }

    /// law(x, 0) = x and law(0, y) = y as exact identities.
    pub fn unit_ok(&self) -> bool {
        let n = self.n();
        let vars: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
        let zeros: Vec<Poly> = vec![Poly::zero(n); n];
        let mut args_x: Vec<Poly> = vars.clone();
        args_x.extend(zeros.iter().cloned());
        let mut args_y: Vec<Poly> = zeros;
        args_y.extend(vars.iter().cloned());
        self.components.iter().enumerate().all(|(k, p)| {
            p.compose(&args_x, None) == vars[k] && p.compose(&args_y, None) == vars[k]
        })
    }

    /// Exact symbolic associativity in 3n variables.
    pub fn associativity_symbolic(&self) -> bool {
        let n = self.n();
        let nv = 3 * n;
        let xv: Vec<Poly> = (0..n).map(|i| Poly::var(nv, i)).collect();
        let yv: Vec<Poly> = (0..n).map(|i| Poly::var(nv, n + i)).collect();
        let zv: Vec<Poly> = (0..n).map(|i| Poly::var(nv, 2 * n + i)).collect();
        let sub = |target: &[Poly], a: &[Poly], b: &[Poly]| -> Vec<Poly> {
            let mut args = a.to_vec();
            args.extend(b.iter().cloned());
            target.iter().map(|p| p.compose(&args, None)).collect()
        };
        let xy = sub(&self.components, &xv, &yv);
        let left = sub(&self.components, &xy, &zv);
        let yz = sub(&self.components, &yv, &zv);
        let right = sub(&self.components, &xv, &yz);
        left == right
    }

    /// Associativity on exact rational triples (zero tolerance).
    pub fn associativity_randomized<R: rand::Rng>(&self, rng: &mut R, trials: usize) -> bool {
        let n = self.n();
        for _ in 0..trials {
            let x: Vec<Rat> = (0..n).map(|_| crate::fixtures::random_rat(rng)).collect();
            let y: Vec<Rat> = (0..n).map(|_| crate::fixtures::random_rat(rng)).collect();
            let z: Vec<Rat> = (0..n).map(|_| crate::fixtures::random_rat(rng)).collect();
            if self.apply(&self.apply(&x, &y), &z) != self.apply(&x, &self.apply(&y, &z)) {
                return false;
            }
        }
        true
    }

    /// The dilations are automorphisms: each component is homogeneous of
    /// degree w_k under the doubled grading (x_i and y_i both of weight
    /// w_i).
    pub fn dilation_automorphism_ok(&self) -> bool {
        let mut doubled: Vec<u32> = self.w.weights().to_vec();
        doubled.extend_from_slice(self.w.weights());
        self.components
            .iter()
            .enumerate()
            .all(|(k, p)| p.is_homogeneous_custom(&doubled, self.w.weight(k)))
    }
}

pub fn bracket_failures(
    w: &WeightSequence,
    fields: &[PolyVectorField],
    c: &StructureConstants,
) -> Vec<(usize, usize)> {
    let n = w.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut expected = PolyVectorField::zero(n);
            for k in 0..n {
                let v = c.get(i, j, k);
                if !v.is_zero() {
                    expected = expected.add(&fields[k].scale(&v));
                }
            }
            if fields[i].lie_bracket(&fields[j]) != expected {
                out.push((i + 1, j + 1));
            }
        }
    }
    out
}

/// Diagnostic for membership of a candidate basis in the class of
/// canonical bases over fixed structure constants.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub adapted_at_origin: bool,
    /// fields that are not homogeneous of degree −w_j (1-based)
    pub homogeneity_failures: Vec<usize>,
    /// pairs whose bracket misses the prescribed combination (1-based)
    pub bracket_failures: Vec<(usize, usize)>,
    pub verdict: bool,
}

/// Test the defining conditions of the class: Y_j(0) = ∂_j, homogeneity of
/// degree −w_j, and the commutator relations against `c`.
pub fn class_membership(
    w: &WeightSequence,
    fields: &[PolyVectorField],
    c: &StructureConstants,
) -> MembershipReport {
    let n = w.n();
    let adapted_at_origin = (0..n).all(|j| {
        (0..n).all(|k| {
            let c0 = fields[j].component(k).constant_term();
            if j == k {
                c0.is_one()
            } else {
                c0.is_zero()
            }
        })
    });
    let homogeneity_failures: Vec<usize> = (0..n)
        .filter(|&j| {
            let d = -(w.weight(j) as i64);
            fields[j].homogeneous_part(w, d) != fields[j]
        })
        .map(|j| j + 1)
        .collect();
    let bracket_failures = bracket_failures(w, fields, c);
    let verdict =
        adapted_at_origin && homogeneity_failures.is_empty() && bracket_failures.is_empty();
    MembershipReport {
        adapted_at_origin,
        homogeneity_failures,
        bracket_failures,
        verdict,
    }
}

/// Assemble the group law x·y = exp(log(x)·log(y)) (Dynkin product in the
/// middle) for a canonical basis whose brackets realize `g`.
pub fn group_law(basis: &CanonicalBasis, g: &GradedLieAlgebra) -> Result<NilpotentGroupLaw> {
    if !basis.brackets_match(g.constants()) {
        return Err(Error::BasisMismatch(
            "basis brackets do not realize the algebra's structure constants".into(),
        ));
    }
    let n = basis.n();
    let exp = basis.exp_map();
    let log = basis.log_map();
    let logx: Vec<Poly> = log.iter().map(|p| p.embed(2 * n, 0)).collect();
    let logy: Vec<Poly> = log.iter().map(|p| p.embed(2 * n, n)).collect();
    let zeta = g.dynkin_poly(&logx, &logy);
    let components: Vec<Poly> = exp.iter().map(|p| p.compose(&zeta, None)).collect();
    Ok(NilpotentGroupLaw {
        w: basis.weights().clone(),
        components,
    })
}

/// The group inverse map x ↦ exp(−log x) (= −ξ in exponential
/// coordinates).
pub fn inverse_map(basis: &CanonicalBasis) -> Vec<Poly> {
    let neg_log: Vec<Poly> = basis.log_map().iter().map(Poly::neg).collect();
    basis
        .exp_map()
        .iter()
        .map(|p| p.compose(&neg_log, None))
        .collect()
}

/// Check law(x, inv(x)) = 0 symbolically.
pub fn inverse_ok(law: &NilpotentGroupLaw, basis: &CanonicalBasis) -> bool {
    let n = law.n();
    let inv = inverse_map(basis);
    let mut args: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
    args.extend(inv);
    law.components
        .iter()
        .all(|p| p.compose(&args, None).is_zero())
}

/// Left-invariance of the basis under its own law:
/// ∂law_k/∂y_j |_{y=0} = (Y_j)_k(x) for all j, k.
pub fn left_invariance_ok(law: &NilpotentGroupLaw, basis: &CanonicalBasis) -> bool {
    let n = law.n();
    let mut args: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
    args.extend((0..n).map(|_| Poly::zero(n)));
    (0..n).all(|j| {
        (0..n).all(|k| {
            let d = law.components[k].partial(n + j).compose(&args, None);
            d == *basis.fields()[j].component(k)
        })
    })
}

/// The isomorphism φ_Y = exp_Y ∘ exp_X^{-1} between two canonical bases
/// over the same structure constants.
pub fn phi_y(basis_x: &CanonicalBasis, basis_y: &CanonicalBasis) -> Result<CoordinateChange> {
    let cx = basis_x.constants_at_origin();
    if !basis_x.brackets_match(&cx) || !basis_y.brackets_match(&cx) {
        return Err(Error::BasisMismatch(
            "bases do not share exact commutator relations".into(),
        ));
    }
    let log_x = basis_x.log_map();
    let forward: Vec<Poly> = basis_y
        .exp_map()
        .iter()
        .map(|p| p.compose(&log_x, None))
        .collect();
    CoordinateChange::from_polys(basis_x.weights(), forward, basis_x.weights().default_jet_order())
}

/// The Heisenberg family: for an antisymmetric Levi form L and a symmetric
/// matrix b ((n−1)×(n−1) each), the canonical basis
///   Y_n = ∂_n, Y_j = ∂_j + Σ_k (½L_kj + b_jk) x_k ∂_n
/// and its group law, whose last component is
///   x_n + y_n + ½Σ L_ij x_i y_j + Σ b_ij x_i y_j.
pub fn heisenberg_family(
    levi: &[Vec<Rat>],
    b: &[Vec<Rat>],
) -> Result<(CanonicalBasis, NilpotentGroupLaw)> {
    let m = levi.len();
    let n = m + 1;
    for i in 0..m {
        for j in 0..m {
            if levi[i][j] != -levi[j][i].clone() {
                return Err(Error::NotAntisymmetric { i: i + 1, j: j + 1 });
            }
            if b[i][j] != b[j][i] {
                return Err(Error::AsymmetricMatrix { i: i + 1, j: j + 1 });
            }
        }
    }
    let mut weights = vec![1u32; m];
    weights.push(2);
    let w = WeightSequence::new(weights)?;
    let mut fields = Vec::with_capacity(n);
    for j in 0..m {
        let mut comps = vec![Poly::zero(n); n];
        comps[j] = Poly::one(n);
        let mut last = Poly::zero(n);
        for k in 0..m {
            let coeff = levi[k][j].clone() * ratio(1, 2) + b[j][k].clone();
            last = last.add(&Poly::var(n, k).scale(&coeff));
        }
        comps[n - 1] = last;
        fields.push(PolyVectorField::new(comps));
    }
    fields.push(PolyVectorField::coordinate(n, n - 1));
    let basis = CanonicalBasis::new(w.clone(), fields)?;
    let mut entries = BTreeMap::new();
    for i in 0..m {
        for j in 0..m {
            if !levi[i][j].is_zero() {
                entries.insert((i, j, n - 1), levi[i][j].clone());
            }
        }
    }
    let constants = StructureConstants::from_entries(n, &w, entries)?;
    let algebra = GradedLieAlgebra::new(w, constants)?;
    let law = group_law(&basis, &algebra)?;
    Ok((basis, law))
}

/// Top-degree perturbation family: Y_j + Z_j with
/// Z_j = Σ_{w_i + w_j = w_k = r} b_ij^k x_i ∂_k, requiring b_ij^k = b_ji^k.
/// Keys are 0-based (i, j, k).
pub fn perturb_basis(
    basis: &CanonicalBasis,
    b: &BTreeMap<(usize, usize, usize), Rat>,
) -> Result<CanonicalBasis> {
    let w = basis.weights().clone();
    let r = w.step();
    let n = w.n();
    for (&(i, j, k), v) in b {
        if i >= n || j >= n || k >= n {
            return Err(Error::IndexOutOfRange {
                index: i.max(j).max(k) + 1,
                n,
            });
        }
        if w.weight(k) != r || w.weight(i) + w.weight(j) != r {
            return Err(Error::Grading {
                i: i + 1,
                j: j + 1,
                k: k + 1,
            });
        }
        let mirror = b.get(&(j, i, k)).cloned().unwrap_or_else(Rat::zero);
        if mirror != *v {
            return Err(Error::AsymmetricMatrix { i: i + 1, j: j + 1 });
        }
    }
    let mut fields = basis.fields().to_vec();
    for (&(i, j, k), v) in b {
        let mut comps = fields[j].components().to_vec();
        comps[k] = comps[k].add(&Poly::var(n, i).scale(v));
        fields[j] = PolyVectorField::new(comps);
    }
    CanonicalBasis::new(w, fields)
}
