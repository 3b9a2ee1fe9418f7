//! Canonical JSON serialization of the symbolic artifacts and the run
//! manifest.
//!
//! Every polynomial serializes as a list of `{exponents, num, den}` terms
//! sorted by (weighted degree, lexicographic exponents), so reports are
//! byte-identical across runs. The run manifest lists each emitted
//! artifact with a SHA-256 content hash over its canonical JSON bytes.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::frames::StructureConstants;
use crate::nilpotent::NilpotentGroupLaw;
use crate::poly::{weighted_degree_custom, MultiIndex, Poly, WeightSequence};
use crate::privileged::CoordinateChange;
use crate::vf::PolyVectorField;

/// Current tool version, embedded in every manifest.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn term_json(alpha: &MultiIndex, c: &crate::poly::Rat) -> Value {
    json!({
        "exponents": alpha.exponents(),
        "num": c.numer().to_string(),
        "den": c.denom().to_string(),
    })
}

/// Polynomial with terms in canonical (weighted degree, lex) order for the
/// given per-variable weights.
pub fn poly_json_custom(p: &Poly, weights: &[u32]) -> Value {
    let mut terms: Vec<(MultiIndex, crate::poly::Rat)> = p
        .terms()
        .map(|(a, c)| (a.clone(), c.clone()))
        .collect();
    terms.sort_by_key(|(a, _)| (weighted_degree_custom(weights, a), a.clone()));
    Value::Array(terms.iter().map(|(a, c)| term_json(a, c)).collect())
}

/// Polynomial in the chart's weighted canonical order.
pub fn poly_json(p: &Poly, w: &WeightSequence) -> Value {
    poly_json_custom(p, w.weights())
}

/// Vector field as the list of its component polynomials.
pub fn field_json(f: &PolyVectorField, w: &WeightSequence) -> Value {
    Value::Array(f.components().iter().map(|p| poly_json(p, w)).collect())
}

/// Frame as a list of fields plus its weight sequence.
pub fn frame_json(frame: &crate::frames::Frame) -> Value {
    let w = frame.weights();
    json!({
        "weights": w.weights(),
        "fields": frame.fields().iter().map(|f| field_json(f, w)).collect::<Vec<_>>(),
    })
}

/// Coordinate change: forward and inverse components plus the jet order.
pub fn change_json(change: &CoordinateChange) -> Value {
    let w = change.weights();
    json!({
        "forward": change.forward().iter().map(|p| poly_json(p, w)).collect::<Vec<_>>(),
        "inverse": change.inverse().iter().map(|p| poly_json(p, w)).collect::<Vec<_>>(),
        "jet_order": change.jet_order(),
        "exact": change.is_exact(),
    })
}

/// Structure constants as (i, j, k, num, den) quintuples, 1-based indices,
/// in lexicographic index order.
pub fn constants_json(c: &StructureConstants) -> Value {
    Value::Array(
        c.iter()
            .map(|(&(i, j, k), v)| {
                json!([i + 1, j + 1, k + 1, v.numer().to_string(), v.denom().to_string()])
            })
            .collect(),
    )
}

/// Group law: each component is a polynomial in the 2n doubled-weight
/// variables (x_1..x_n, y_1..y_n).
pub fn law_json(law: &NilpotentGroupLaw) -> Value {
    let mut doubled = law.weights().weights().to_vec();
    doubled.extend_from_slice(law.weights().weights());
    Value::Array(
        law.components()
            .iter()
            .map(|p| poly_json_custom(p, &doubled))
            .collect(),
    )
}

/// SHA-256 hex digest of a byte string.
pub fn digest_bytes(data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(data);
    hex::encode(h.finalize())
}

/// SHA-256 hex digest of a JSON value's compact serialization.
pub fn digest_value(v: &Value) -> String {
    digest_bytes(serde_json::to_string(v).expect("JSON serialization").as_bytes())
}

/// The run manifest: what was run, on what input, producing which hashed
/// artifacts.
#[derive(Debug, Clone)]
pub struct RunManifest {
    command: String,
    options: Value,
    input_digest: String,
    outputs: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &str, options: Value, input: &[u8]) -> Self {
        RunManifest {
            command: command.to_string(),
            options,
            input_digest: digest_bytes(input),
            outputs: Vec::new(),
        }
    }

    /// Register an artifact by name; returns the hash recorded for it.
    pub fn add_output(&mut self, name: &str, artifact: &Value) -> String {
        let digest = digest_value(artifact);
        self.outputs.push((name.to_string(), digest.clone()));
        digest
    }

    pub fn to_value(&self) -> Value {
        json!({
            "tool_version": TOOL_VERSION,
            "command": self.command,
            "options": self.options,
            "input_digest": self.input_digest,
            "outputs": self.outputs.iter().map(|(name, digest)| {
                json!({"name": name, "sha256": digest})
            }).collect::<Vec<_>>(),
        })
    }
}
