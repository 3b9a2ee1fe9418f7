//! Named reference frames and seeded random frame corpora shared by tests,
//! examples, and the acceptance harness.

use num_traits::Zero;
use rand::Rng;

use crate::frames::Frame;
use crate::poly::{ratio, Poly, Rat, WeightSequence};
use crate::vf::PolyVectorField;

/// The commuting coordinate frame (∂₁,…,∂_n) for any weight sequence.
pub fn coordinate_frame(w: &WeightSequence) -> Frame {
    let n = w.n();
    Frame::new(
        w.clone(),
        (0..n).map(|j| PolyVectorField::coordinate(n, j)).collect(),
    )
    .expect("dimensions agree")
}

/// Symmetric Heisenberg frame, w = (1,1,2):
/// X₁ = ∂₁ − ½x₂∂₃, X₂ = ∂₂ + ½x₁∂₃, X₃ = ∂₃.
pub fn symmetric_heisenberg() -> Frame {
    let w = WeightSequence::new(vec![1, 1, 2]).unwrap();
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
    Frame::new(w, vec![x1, x2, PolyVectorField::coordinate(3, 2)]).unwrap()
}

/// Polarized Heisenberg frame, w = (1,1,2): X₁ = ∂₁, X₂ = ∂₂ + x₁∂₃, X₃ = ∂₃.
pub fn polarized_heisenberg() -> Frame {
    let w = WeightSequence::new(vec![1, 1, 2]).unwrap();
    let x2 = PolyVectorField::new(vec![Poly::zero(3), Poly::one(3), Poly::var(3, 0)]);
    Frame::new(
        w,
        vec![
            PolyVectorField::coordinate(3, 0),
            x2,
            PolyVectorField::coordinate(3, 2),
        ],
    )
    .unwrap()
}

/// Left-invariant Engel frame, w = (1,1,2,3):
/// X₁ = ∂₁, X₂ = ∂₂ + x₁∂₃ + ½x₁²∂₄, X₃ = ∂₃ + x₁∂₄, X₄ = ∂₄,
/// with brackets [X₁,X₂] = X₃, [X₁,X₃] = X₄, [X₂,X₃] = 0.
pub fn engel() -> Frame {
    let w = WeightSequence::new(vec![1, 1, 2, 3]).unwrap();
    let x1 = PolyVectorField::coordinate(4, 0);
    let x2 = PolyVectorField::new(vec![
        Poly::zero(4),
        Poly::one(4),
        Poly::var(4, 0),
        Poly::var(4, 0).pow(2).scale(&ratio(1, 2)),
    ]);
    let x3 = PolyVectorField::new(vec![
        Poly::zero(4),
        Poly::zero(4),
        Poly::one(4),
        Poly::var(4, 0),
    ]);
    Frame::new(w, vec![x1, x2, x3, PolyVectorField::coordinate(4, 3)]).unwrap()
}

/// Coordinate frame for type (1,2,3), w = (1,2,3). For this type the
/// bracket condition is vacuous (every pair has w_i + w_j ≥ r), so any
/// frame with invertible B(0) is valid.
pub fn chained_123() -> Frame {
    coordinate_frame(&WeightSequence::new(vec![1, 2, 3]).unwrap())
}

/// Invalid fixture, w = (1,1,3): frame (∂₁, ∂₂ + x₁∂₃, ∂₃) whose bracket
/// [X₁,X₂] = ∂₃ = X₃ escapes H₂ (w₃ = 3 > w₁ + w₂ = 2).
pub fn violating_w113() -> Frame {
    let w = WeightSequence::new(vec![1, 1, 3]).unwrap();
    let x2 = PolyVectorField::new(vec![Poly::zero(3), Poly::one(3), Poly::var(3, 0)]);
    Frame::new(
        w,
        vec![
            PolyVectorField::coordinate(3, 0),
            x2,
            PolyVectorField::coordinate(3, 2),
        ],
    )
    .unwrap()
}

/// Frame with nontrivial brackets for type (1,2,3), w = (1,2,3):
/// X₁ = ∂₁, X₂ = ∂₂ + x₁∂₃, X₃ = ∂₃ ([X₁,X₂] = X₃, weight 3 = 1 + 2).
pub fn filtration_123() -> Frame {
    let w = WeightSequence::new(vec![1, 2, 3]).unwrap();
    let x2 = PolyVectorField::new(vec![Poly::zero(3), Poly::one(3), Poly::var(3, 0)]);
    Frame::new(
        w,
        vec![
            PolyVectorField::coordinate(3, 0),
            x2,
            PolyVectorField::coordinate(3, 2),
        ],
    )
    .unwrap()
}

/// Polarized Heisenberg with the weight-raising term x₁²∂₃ on X₁: still
/// privileged (the extra term has degree 1 > −w₁), but not homogeneous,
/// so the canonical-coordinate rate tests see a genuine O(t) tail (the
/// rescaled term enters at t^{w₁+2−w₃} = t).
pub fn perturbed_polarized_heisenberg() -> Frame {
    let base = polarized_heisenberg();
    let mut fields = base.fields().to_vec();
    let mut comps = fields[0].components().to_vec();
    comps[2] = comps[2].add(&Poly::var(3, 0).pow(2));
    fields[0] = PolyVectorField::new(comps);
    Frame::new(base.weights().clone(), fields).unwrap()
}

/// The three Carnot types used by the random corpus.
pub fn corpus_types() -> Vec<Vec<usize>> {
    vec![vec![2, 3], vec![2, 3, 4], vec![1, 2, 3]]
}

/// A reference valid frame for each corpus type.
pub fn base_frame_for_type(ranks: &[usize]) -> Frame {
    match ranks {
        [2, 3] => symmetric_heisenberg(),
        [2, 3, 4] => engel(),
        [1, 2, 3] => filtration_123(),
        other => panic!("no base frame for type {other:?}"),
    }
}

/// A random origin-preserving polynomial change with identity linear part
/// and triangular higher terms (component k only uses variables of lower
/// index), so the inverse is an exact polynomial. Monomials have total
/// degree 2..=3 and rational coefficients in [−2, 2]. When
/// `force_low_slot` is set, that component receives a guaranteed nonzero
/// term of weighted degree < w_k (which destroys privilegedness of any
/// pushed frame while preserving validity).
pub fn random_triangular_change<R: Rng>(
    w: &WeightSequence,
    rng: &mut R,
    force_low_slot: Option<usize>,
) -> crate::privileged::CoordinateChange {
    let n = w.n();
    let mut forward: Vec<Poly> = (0..n).map(|k| Poly::var(n, k)).collect();
    for k in 1..n {
        let trivial = WeightSequence::trivial(k);
        // degree 3 only in the first nontrivial component: later components
        // feed on earlier ones, so unchecked cubic chains compound to
        // inverse degrees (and psi-hat costs) that grow geometrically
        let max_deg = if k == 1 { 3 } else { 2 };
        let mut candidates = Vec::new();
        for d in 2..=max_deg {
            candidates.extend(crate::poly::multi_indices_of_weighted_degree(&trivial, d));
        }
        // at most two extra monomials per component: enough to scramble
        // every slot while keeping pushforwards and inverses tractable
        for _ in 0..rng.gen_range(1..=2) {
            let alpha = &candidates[rng.gen_range(0..candidates.len())];
            let c = random_rat(rng);
            if c.is_zero() {
                continue;
            }
            let mut exps = alpha.exponents().to_vec();
            exps.resize(n, 0);
            forward[k] = forward[k].add(&Poly::monomial(n, crate::poly::MultiIndex::new(exps), c));
        }
    }
    if let Some(k) = force_low_slot {
        let wk = w.weight(k);
        assert!(wk >= 3, "degree-lowering terms need w_k >= 3");
        // a weight-1 variable squared: weighted degree 2 < w_k, |α| = 2
        let mut exps = vec![0; n];
        exps[0] = 2;
        forward[k] = forward[k].add(&Poly::monomial(
            n,
            crate::poly::MultiIndex::new(exps),
            random_nonzero_rat(rng),
        ));
    }
    // the exact inverse of a triangular map can have much higher degree
    // than the forward map; exactified() raises the jet order until the
    // inverse closes
    crate::privileged::CoordinateChange::from_polys(w, forward, w.default_jet_order())
        .expect("triangular change is centered with identity linear part")
        .exactified()
        .expect("triangular changes invert exactly")
}

/// Unit-triangular constant recombination X'_j = X_j + Σ_{i<j} a_ij X_i.
/// Spans of the filtration levels are preserved (weights are sorted), so
/// validity is unchanged; linear adaptation is exercised since B(0) ≠ I.
pub fn random_recombination<R: Rng>(frame: &Frame, rng: &mut R) -> Frame {
    let n = frame.weights().n();
    let mut fields = frame.fields().to_vec();
    for j in 1..n {
        let mut f = fields[j].clone();
        for i in 0..j {
            let a = random_rat(rng);
            if !a.is_zero() {
                f = f.add(&frame.fields()[i].scale(&a));
            }
        }
        fields[j] = f;
    }
    Frame::new(frame.weights().clone(), fields).unwrap()
}

/// A random valid frame of the given corpus type: the base frame,
/// recombined and pushed through a random triangular polynomial change.
/// Validity is diffeomorphism-invariant, so the result always validates;
/// it is generally neither linearly adapted nor privileged.
pub fn random_valid_frame<R: Rng>(ranks: &[usize], rng: &mut R) -> Frame {
    let base = base_frame_for_type(ranks);
    let recombined = random_recombination(&base, rng);
    let change = random_triangular_change(base.weights(), rng, None);
    change.pushforward(&recombined).expect("exact pushforward")
}

/// A deliberately non-privileged (but valid and linearly adapted) frame:
/// the base frame pushed through a change with a degree-lowering term in
/// the last slot. Only types with w_n ≥ 3 admit such frames.
pub fn random_nonprivileged_frame<R: Rng>(ranks: &[usize], rng: &mut R) -> Frame {
    let base = base_frame_for_type(ranks);
    let n = base.weights().n();
    assert!(base.weights().weight(n - 1) >= 3);
    let change = random_triangular_change(base.weights(), rng, Some(n - 1));
    change.pushforward(&base).expect("exact pushforward")
}

/// A random rational in [−2, 2] with denominator from a small fixed set.
pub fn random_rat<R: Rng>(rng: &mut R) -> Rat {
    let den = *[1i64, 2, 3, 4].iter().nth(rng.gen_range(0..4)).unwrap();
    let num = rng.gen_range(-2 * den..=2 * den);
    ratio(num, den)
}

/// A random nonzero rational in [−2, 2].
pub fn random_nonzero_rat<R: Rng>(rng: &mut R) -> Rat {
    loop {
        let r = random_rat(rng);
        if !r.is_zero() {
            return r;
        }
    }
}
