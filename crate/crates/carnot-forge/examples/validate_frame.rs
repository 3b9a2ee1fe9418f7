//! Check the bracket condition for frames against their declared Carnot
//! type, including a failing example with a pinpointed violation.
//!
//! Run with: cargo run --example validate_frame

use carnot_forge::dsl::{parse_field, render_field};
use carnot_forge::fixtures;
use carnot_forge::frames::Frame;
use carnot_forge::poly::WeightSequence;

fn main() -> carnot_forge::Result<()> {
    // The symmetric Heisenberg frame for type (2, 3): weights (1, 1, 2).
    let frame = fixtures::symmetric_heisenberg();
    let jet = frame.weights().default_jet_order();
    let report = frame.validate(jet);
    println!("symmetric Heisenberg, weights {:?}:", frame.weights().weights());
    for field in frame.fields() {
        println!("  {}", render_field(field));
    }
    println!("  valid = {} (jet order {jet})\n", report.valid);

    // A frame built from the text DSL, for type (1, 2, 3).
    let w = WeightSequence::new(vec![1, 2, 3])?;
    let fields = ["d1", "d2 + x1*d3", "d3"]
        .iter()
        .map(|s| parse_field(s, 3))
        .collect::<carnot_forge::Result<Vec<_>>>()?;
    let frame = Frame::new(w, fields)?;
    let report = frame.validate(frame.weights().default_jet_order());
    println!("chained frame, weights {:?}: valid = {}\n", frame.weights().weights(), report.valid);

    // A violating frame: weights (1, 1, 3) with [X₁, X₂] = ∂₃, whose
    // bracket lands in weight 3 > 1 + 1.
    let frame = fixtures::violating_w113();
    let report = frame.validate(frame.weights().default_jet_order());
    println!("violating frame, weights {:?}:", frame.weights().weights());
    println!("  valid = {}", report.valid);
    for v in &report.violations {
        println!(
            "  bracket [X{}, X{}] escapes along X{}: {}",
            v.i, v.j, v.k, v.term
        );
    }
    Ok(())
}
