//! The Dynkin form of the Baker-Campbell-Hausdorff product on a graded
//! nilpotent Lie algebra, evaluated both on rational vectors and
//! symbolically on polynomial coefficients.
//!
//! Run with: cargo run --example bch_dynkin

use carnot_forge::frames::StructureConstants;
use carnot_forge::nilpotent::GradedLieAlgebra;
use carnot_forge::poly::{rat, ratio, Poly, WeightSequence};

fn main() -> carnot_forge::Result<()> {
    // The Engel algebra: weights (1, 1, 2, 3), [e1,e2] = e3, [e1,e3] = e4.
    let w = WeightSequence::new(vec![1, 1, 2, 3])?;
    let constants = StructureConstants::from_entries(
        4,
        &w,
        [
            ((0, 1, 2), rat(1)),
            ((1, 0, 2), rat(-1)),
            ((0, 2, 3), rat(1)),
            ((2, 0, 3), rat(-1)),
        ],
    )?;
    let algebra = GradedLieAlgebra::new(w, constants)?;

    // e1 · e2 picks up the 1/2 bracket term and the 1/12 double bracket.
    let product = algebra.dynkin(&[rat(1), rat(0), rat(0), rat(0)], &[rat(0), rat(1), rat(0), rat(0)]);
    let rendered: Vec<String> = product.iter().map(|v| v.to_string()).collect();
    println!("e1 · e2 = ({})", rendered.join(", "));
    assert_eq!(product, vec![rat(1), rat(1), ratio(1, 2), ratio(1, 12)]);

    // Nilpotency: brackets of weight above the step vanish, so the series
    // is a finite polynomial. Symbolically, xi · eta in 2n variables:
    let n = 4;
    let xi: Vec<Poly> = (0..n).map(|i| Poly::var(2 * n, i)).collect();
    let eta: Vec<Poly> = (0..n).map(|i| Poly::var(2 * n, n + i)).collect();
    let symbolic = algebra.dynkin_poly(&xi, &eta);
    println!("\nsymbolic product (x = xi, y shifted by {n}):");
    for (k, p) in symbolic.iter().enumerate() {
        println!("  z{} = {}", k + 1, p);
    }

    // Inverse: xi · (-xi) = 0 holds identically.
    let neg: Vec<Poly> = xi.iter().map(|p| p.scale(&rat(-1))).collect();
    let cancel = algebra.dynkin_poly(&xi, &neg);
    assert!(cancel.iter().all(|p| p.is_zero()));
    println!("\nxi · (-xi) = 0 identically: true");
    Ok(())
}
