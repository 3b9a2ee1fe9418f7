//! Shared helpers for the acceptance suite: an independent BCH oracle in
//! the truncated free associative algebra, and the filiform model bases
//! used for the higher-dimensional group-law checks.
//!
//! The oracle takes a deliberately different route from the library's
//! Dynkin-form enumeration: it computes log(e^X e^Y) as an honest
//! truncated series in the free associative algebra on two letters, then
//! maps each word into the concrete algebra with the Dynkin-Specht-Wever
//! projection (right-nested bracketing divided by the word length). Words
//! longer than the step map to brackets of weighted degree above the step,
//! which vanish, so the truncation is exact.

use std::collections::BTreeMap;

use carnot_forge::frames::StructureConstants;
use carnot_forge::nilpotent::CanonicalBasis;
use carnot_forge::poly::{rat, Poly, Rat, WeightSequence};
use carnot_forge::vf::PolyVectorField;
use num_traits::{One, Zero};

/// A truncated series in the free associative algebra on letters 0 and 1:
/// word -> rational coefficient, with words capped at `cap` letters.
type Series = BTreeMap<Vec<u8>, Rat>;

fn series_mul(a: &Series, b: &Series, cap: usize) -> Series {
    let mut out = Series::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > cap {
                continue;
            }
            let mut word = wa.clone();
            word.extend_from_slice(wb);
            let entry = out.entry(word).or_insert_with(Rat::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// e^letter - truncated at `cap` letters (no constant term juggling: the
/// unit is the empty word).
fn exp_letter(letter: u8, cap: usize) -> Series {
    let mut out = Series::new();
    let mut factorial = Rat::one();
    for k in 0..=cap {
        if k > 0 {
            factorial *= rat(k as i64);
        }
        out.insert(vec![letter; k], Rat::one() / factorial.clone());
    }
    out
}

/// log of a series with unit constant term, truncated at `cap` letters.
fn series_log(s: &Series, cap: usize) -> Series {
    let mut u = s.clone();
    u.remove(&Vec::new()); // u = s - 1, no constant term
    let mut out = Series::new();
    let mut power = Series::new();
    power.insert(Vec::new(), Rat::one());
    for m in 1..=cap {
        power = series_mul(&power, &u, cap);
        let sign = if m % 2 == 1 { rat(1) } else { rat(-1) };
        let coeff = sign / rat(m as i64);
        for (word, c) in &power {
            let entry = out.entry(word.clone()).or_insert_with(Rat::zero);
            *entry += c * coeff.clone();
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Bracket of coefficient vectors via the structure constants.
fn bracket(n: usize, c: &StructureConstants, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    for (&(i, j, k), coeff) in c.iter() {
        let t = &u[i] * &v[j] * coeff;
        if !t.is_zero() {
            out[k] += t;
        }
    }
    out
}

/// Dynkin-Specht-Wever image of one word: the right-nested bracket of the
/// substituted letters, divided by the word length.
fn dsw_word(n: usize, c: &StructureConstants, word: &[u8], xi: &[Rat], eta: &[Rat]) -> Vec<Rat> {
    let letter = |l: u8| -> Vec<Rat> {
        if l == 0 {
            xi.to_vec()
        } else {
            eta.to_vec()
        }
    };
    let mut acc = letter(word[word.len() - 1]);
    for &l in word[..word.len() - 1].iter().rev() {
        acc = bracket(n, c, &letter(l), &acc);
    }
    let m = rat(word.len() as i64);
    acc.into_iter().map(|v| v / m.clone()).collect()
}

/// Independent truncated-series oracle for the BCH product xi * eta in the
/// graded algebra (w, c).
pub fn oracle_bch(
    w: &WeightSequence,
    c: &StructureConstants,
    xi: &[Rat],
    eta: &[Rat],
) -> Vec<Rat> {
    let n = w.n();
    let cap = w.step() as usize;
    let product = series_mul(&exp_letter(0, cap), &exp_letter(1, cap), cap);
    let log = series_log(&product, cap);
    let mut out = vec![Rat::zero(); n];
    for (word, coeff) in &log {
        if word.is_empty() {
            continue;
        }
        let term = dsw_word(n, c, word, xi, eta);
        for (o, t) in out.iter_mut().zip(term) {
            *o += coeff * t;
        }
    }
    out
}

/// The model filiform basis in dimension n, weights (1, 1, 2, ..., n-1):
/// Y_1 = d_1, Y_j = d_j + sum_{k>j} x_1^{k-j}/(k-j)! d_k for j >= 2, with
/// brackets [Y_1, Y_j] = Y_{j+1} and all others zero.
pub fn filiform_basis(n: usize) -> CanonicalBasis {
    assert!(n >= 3);
    let mut weights = vec![1u32, 1];
    for k in 2..n {
        weights.push(k as u32);
    }
    let w = WeightSequence::new(weights).unwrap();
    let mut fields = vec![PolyVectorField::coordinate(n, 0)];
    for j in 1..n {
        let mut comps = vec![Poly::zero(n); n];
        comps[j] = Poly::one(n);
        let mut factorial = Rat::one();
        for k in (j + 1)..n {
            factorial *= rat((k - j) as i64);
            comps[k] = Poly::var(n, 0)
                .pow((k - j) as u32)
                .scale(&(Rat::one() / factorial.clone()));
        }
        fields.push(PolyVectorField::new(comps));
    }
    CanonicalBasis::new(w, fields).unwrap()
}

/// A random rational in [-2, 2] with a small denominator.
pub fn random_rat<R: rand::Rng>(rng: &mut R) -> Rat {
    carnot_forge::fixtures::random_rat(rng)
}

/// A random rational vector of length n.
pub fn random_vec<R: rand::Rng>(rng: &mut R, n: usize) -> Vec<Rat> {
    (0..n).map(|_| random_rat(rng)).collect()
}
