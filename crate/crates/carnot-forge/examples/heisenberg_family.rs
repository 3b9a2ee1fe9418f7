//! The Heisenberg-type family: a nondegenerate Levi form plus a symmetric
//! matrix b produce a canonical basis and its polynomial group law; the
//! b = 0 member recovers the familiar symplectic-area law, and two family
//! members are conjugated by the exact polynomial map phi = exp_Y o log_X.
//!
//! Run with: cargo run --example heisenberg_family

use carnot_forge::dsl::render_field;
use carnot_forge::nilpotent::{class_membership, heisenberg_family, phi_y};
use carnot_forge::poly::{rat, ratio, Rat};

fn member(levi: &[Vec<Rat>], b: &[Vec<Rat>], label: &str) -> carnot_forge::Result<carnot_forge::nilpotent::CanonicalBasis> {
    let (basis, law) = heisenberg_family(levi, b)?;
    println!("{label}:");
    for field in basis.fields() {
        println!("  {}", render_field(field));
    }
    println!("  law z3 = {}", law.components()[2]);
    let membership = class_membership(
        basis.weights(),
        basis.fields(),
        &basis.constants_at_origin(),
    );
    println!("  class membership: {}\n", membership.verdict);
    Ok(basis)
}

fn main() -> carnot_forge::Result<()> {
    // Standard symplectic Levi form on the first layer (dimension 2).
    let levi = vec![vec![rat(0), rat(1)], vec![rat(-1), rat(0)]];

    // b = 0: the symmetric model, law z3 = x3 + y3 + (x1 y2 - x2 y1)/2.
    let zero = vec![vec![rat(0), rat(0)], vec![rat(0), rat(0)]];
    let symmetric = member(&levi, &zero, "b = 0 (symmetric model)")?;

    // b = [[0, 1/2], [1/2, 0]]: the polarized model, law z3 = x3 + y3 + x1 y2.
    let pol = vec![vec![rat(0), ratio(1, 2)], vec![ratio(1, 2), rat(0)]];
    let polarized = member(&levi, &pol, "b = [[0, 1/2], [1/2, 0]] (polarized model)")?;

    // The conjugating map phi = exp_polarized o log_symmetric pushes one
    // basis onto the other and is an exact polynomial diffeomorphism.
    let phi = phi_y(&symmetric, &polarized)?;
    println!("conjugating map phi (symmetric -> polarized):");
    for p in phi.forward() {
        println!("  {p}");
    }
    let pushed = phi.pushforward(&symmetric.as_frame())?;
    let agrees = pushed
        .fields()
        .iter()
        .zip(polarized.fields())
        .all(|(a, b)| a == b);
    println!("phi_* (symmetric basis) = polarized basis: {agrees}");
    Ok(())
}
