//! From a privileged frame to its nilpotent approximation: model fields,
//! graded Lie algebra, group law, and the exact invariant checks.
//!
//! Run with: cargo run --example nilpotent_approximation

use carnot_forge::dsl::render_field;
use carnot_forge::fixtures;
use carnot_forge::nilpotent::{group_law, inverse_ok, left_invariance_ok, CanonicalBasis, GradedLieAlgebra};
use carnot_forge::privileged::model_fields;

fn main() -> carnot_forge::Result<()> {
    let frame = fixtures::engel();
    let w = frame.weights().clone();
    println!("Engel frame, weights {:?}", w.weights());

    // Model fields: drop every term of weight above -w_j; what remains is
    // homogeneous of degree exactly -w_j.
    let model = model_fields(&frame)?;
    println!("model fields:");
    for field in &model {
        println!("  {}", render_field(field));
    }

    // Structure constants at the origin define a graded Lie algebra; the
    // constructor verifies grading, antisymmetry, and the Jacobi identity.
    let constants = frame.structure_constants()?;
    println!("structure constants (1-based [i, j] -> k):");
    for (&(i, j, k), v) in constants.iter() {
        if i < j {
            println!("  [X{}, X{}] = {} X{}", i + 1, j + 1, v, k + 1);
        }
    }
    let algebra = GradedLieAlgebra::new(w.clone(), constants)?;

    // The model fields form a canonical basis realizing those constants,
    // and exp/log turn the Dynkin product into a polynomial group law.
    let basis = CanonicalBasis::new(w.clone(), model)?;
    let law = group_law(&basis, &algebra)?;
    println!("\ngroup law components (x · y):");
    for (k, p) in law.components().iter().enumerate() {
        println!("  z{} = {}", k + 1, p);
    }

    // Exact symbolic invariants of the law.
    println!("\nunit               : {}", law.unit_ok());
    println!("associativity      : {}", law.associativity_symbolic());
    println!("dilations are auto : {}", law.dilation_automorphism_ok());
    println!("inverse via exp/log: {}", inverse_ok(&law, &basis));
    println!("left invariance    : {}", left_invariance_ok(&law, &basis));
    Ok(())
}
