//! Construct privileged coordinates for a frame that is neither linearly
//! adapted nor order-correct: linear adaptation T first, then the
//! triangular polynomial map ψ̂, then verification of the order
//! conditions and of the weight criterion on the pushed frame.
//!
//! Run with: cargo run --example privileged_coordinates

use carnot_forge::dsl::render_field;
use carnot_forge::fixtures;
use carnot_forge::poly::Poly;
use carnot_forge::privileged::{is_privileged, linearly_adapt, psi_hat, CoordinateChange, weights_ok};

fn main() -> carnot_forge::Result<()> {
    // Scramble the symmetric Heisenberg frame: recombine the first two
    // fields (so B(0) is no longer the identity) and push everything
    // through the polynomial change y₃ = x₃ + x₁², which plants a
    // degree-lowering term that breaks the order conditions.
    let base = fixtures::symmetric_heisenberg();
    let w = base.weights().clone();
    let mut fields = base.fields().to_vec();
    fields[1] = fields[1].add(&fields[0]);
    let recombined = carnot_forge::frames::Frame::new(w.clone(), fields)?;
    let change = CoordinateChange::from_polys(
        &w,
        vec![
            Poly::var(3, 0),
            Poly::var(3, 1),
            Poly::var(3, 2).add(&Poly::var(3, 0).pow(2)),
        ],
        w.default_jet_order(),
    )?
    .exactified()?;
    let frame = change.pushforward(&recombined)?;

    println!("scrambled frame, weights {:?}:", w.weights());
    for field in frame.fields() {
        println!("  {}", render_field(field));
    }
    let before = is_privileged(&frame);
    println!("  privileged before repair: {}", before.verdict);
    for f in &before.failures {
        println!(
            "  order failure: X^{:?}(x{})(0) = {}",
            f.alpha, f.k, f.value
        );
    }

    // Step 1: linear adaptation (B(0) becomes the identity).
    let (linear, adapted) = linearly_adapt(&frame)?;
    println!("\nlinear adaptation T:");
    for p in linear.forward() {
        println!("  {p}");
    }

    // Step 2: the triangular map ψ̂, raised to an exact polynomial
    // inverse, then the pushforward.
    let psi = psi_hat(&adapted)?.exactified()?;
    println!("\ntriangular map psi-hat:");
    for p in psi.forward() {
        println!("  {p}");
    }
    let pushed = psi.pushforward(&adapted)?;
    println!("\nframe in privileged coordinates:");
    for field in pushed.fields() {
        println!("  {}", render_field(field));
    }

    // Both characterizations must agree: the order conditions
    // X^alpha(x_k)(0) = 0 for <alpha> < w_k, and the weight criterion
    // (each X_j has weight exactly -w_j).
    let orders = is_privileged(&pushed);
    let weights = weights_ok(&pushed);
    println!("\norder conditions hold : {}", orders.verdict);
    println!("field weights         : {:?}", weights.found);
    println!("weight criterion holds: {}", weights.verdict);
    assert_eq!(orders.verdict, weights.verdict);
    Ok(())
}
