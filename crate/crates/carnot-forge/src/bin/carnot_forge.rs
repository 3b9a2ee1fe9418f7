//! Command-line surface: validate | privilege | approx | canonical |
//! heisenberg | bch.
//!
//! All reports are JSON on stdout; a human-readable summary goes to stderr
//! unless --quiet. Exit codes: 0 success, 1 I/O or parse error,
//! 2 validation/invariant failure, 3 inconclusive numeric verdict.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use carnot_forge::dsl::{parse_frame_doc, FrameDoc};
use carnot_forge::error::Error;
use carnot_forge::frames::{Frame, StructureConstants};
use carnot_forge::nilpotent::{
    class_membership, group_law, heisenberg_family, inverse_ok, left_invariance_ok,
    CanonicalBasis, GradedLieAlgebra,
};
use carnot_forge::numeric::{
    default_grid, first_kind_rate_test, sample_box, second_kind_rate_test, FlowConfig,
};
use carnot_forge::poly::{Rat, WeightSequence};
use carnot_forge::privileged::{
    is_privileged, linearly_adapt, model_fields, psi_hat, CoordinateChange, PrivilegedReport,
};
use carnot_forge::report::{
    change_json, constants_json, field_json, frame_json, law_json, RunManifest,
};

#[derive(Parser)]
#[command(name = "carnot-forge", version, about = "Privileged coordinates and nilpotent approximations on Carnot manifold charts")]
struct Cli {
    /// Suppress the human-readable summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the frame bracket condition against the declared type.
    Validate {
        /// Frame document (JSON).
        input: PathBuf,
        /// Weighted jet order for the bracket expansions.
        #[arg(long)]
        jet_order: Option<u32>,
    },
    /// Compute the linear adaptation T and the triangular map ψ̂, and push
    /// the frame to privileged coordinates.
    Privilege {
        input: PathBuf,
        #[arg(long)]
        jet_order: Option<u32>,
    },
    /// Build model fields, structure constants, the graded algebra, and
    /// the nilpotent group law, with invariant checks.
    Approx {
        input: PathBuf,
        /// Privilege the frame first if it is not already privileged.
        #[arg(long)]
        auto: bool,
        /// Random associativity triples when the symbolic check is too
        /// large (n > 4).
        #[arg(long, default_value_t = 1000)]
        assoc_budget: usize,
        #[arg(long)]
        jet_order: Option<u32>,
    },
    /// Run the canonical-coordinate rate test of the first or second kind.
    Canonical {
        input: PathBuf,
        /// 1 = exp_X (first kind), 2 = γ_X (second kind).
        #[arg(long, default_value_t = 1)]
        kind: u8,
        /// RK4 steps per unit time.
        #[arg(long)]
        steps: Option<u32>,
        /// Half-width of the sampling box.
        #[arg(long = "box")]
        box_half: Option<f64>,
        /// Number of sample points.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// RNG seed for the sample draw.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Build a member of the Heisenberg family from a Levi form and a
    /// symmetric matrix b.
    Heisenberg {
        /// JSON document {"levi": [[rat]], "b": [[rat]]}.
        input: PathBuf,
    },
    /// Evaluate the Dynkin product on a structure-constants file.
    Bch {
        /// JSON document {"weights": [w], "constants": [[i,j,k,rat]],
        /// "xi": [rat], "eta": [rat]} (1-based indices; mirror entries
        /// are filled in automatically).
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((report, summary, code)) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("serialize"));
            if !cli.quiet {
                eprintln!("{summary}");
            }
            ExitCode::from(code)
        }
        Err(e) => {
            if !cli.quiet {
                eprintln!("error: {e}");
            }
            let code = match e {
                Error::Io(_) | Error::Json(_) | Error::Parse { .. } | Error::Document { .. } => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn load(path: &PathBuf) -> Result<(String, FrameDoc), Error> {
    let text = std::fs::read_to_string(path)?;
    let doc = parse_frame_doc(&text)?;
    Ok((text, doc))
}

fn rat_from_json(v: &Value, path: &str) -> Result<Rat, Error> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(Rat::from_integer(n.as_i64().unwrap().into())),
        Value::String(s) => {
            let mut parts = s.splitn(2, '/');
            let p: i64 = parts
                .next()
                .unwrap()
                .trim()
                .parse()
                .map_err(|_| bad_rat(path))?;
            let q: i64 = match parts.next() {
                Some(q) => q.trim().parse().map_err(|_| bad_rat(path))?,
                None => 1,
            };
            if q == 0 {
                return Err(bad_rat(path));
            }
            Ok(Rat::new(p.into(), q.into()))
        }
        _ => Err(bad_rat(path)),
    }
}

fn bad_rat(path: &str) -> Error {
    Error::Document {
        path: path.to_string(),
        message: "expected an integer or a \"p/q\" string".into(),
    }
}

fn rat_string(v: &Rat) -> String {
    if v.denom() == &1.into() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

fn matrix_from_json(v: &Value, path: &str) -> Result<Vec<Vec<Rat>>, Error> {
    let rows = v.as_array().ok_or_else(|| Error::Document {
        path: path.into(),
        message: "expected an array of rows".into(),
    })?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let cells = row.as_array().ok_or_else(|| Error::Document {
                path: format!("{path}[{i}]"),
                message: "expected an array".into(),
            })?;
            cells
                .iter()
                .enumerate()
                .map(|(j, c)| rat_from_json(c, &format!("{path}[{i}][{j}]")))
                .collect()
        })
        .collect()
}

fn privileged_report_json(report: &PrivilegedReport) -> Value {
    json!({
        "linearly_adapted": report.linearly_adapted,
        "failures": report.failures.iter().map(|f| json!({
            "coordinate": f.k,
            "alpha": f.alpha,
            "value": rat_string(&f.value),
        })).collect::<Vec<_>>(),
        "verdict": report.verdict,
    })
}

/// Privilege pipeline: T (linear adaptation), ψ̂, pushed frame, verdict.
fn privilege_pipeline(
    frame: &Frame,
) -> Result<(CoordinateChange, CoordinateChange, Frame, PrivilegedReport), Error> {
    let (linear, adapted) = linearly_adapt(frame)?;
    let psi = psi_hat(&adapted)?.exactified()?;
    let pushed = psi.pushforward(&adapted)?;
    let report = is_privileged(&pushed);
    Ok((linear, psi, pushed, report))
}

type CmdResult = Result<(Value, String, u8), Error>;

fn run(cmd: &Cmd) -> CmdResult {
    match cmd {
        Cmd::Validate { input, jet_order } => cmd_validate(input, *jet_order),
        Cmd::Privilege { input, jet_order } => cmd_privilege(input, *jet_order),
        Cmd::Approx {
            input,
            auto,
            assoc_budget,
            jet_order,
        } => cmd_approx(input, *auto, *assoc_budget, *jet_order),
        Cmd::Canonical {
            input,
            kind,
            steps,
            box_half,
            samples,
            seed,
        } => cmd_canonical(input, *kind, *steps, *box_half, *samples, *seed),
        Cmd::Heisenberg { input } => cmd_heisenberg(input),
        Cmd::Bch { input } => cmd_bch(input),
    }
}

fn cmd_validate(input: &PathBuf, jet_order: Option<u32>) -> CmdResult {
    let (text, doc) = load(input)?;
    let jet = jet_order
        .or(doc.jet_order)
        .unwrap_or_else(|| doc.frame.weights().default_jet_order());
    let report = doc.frame.validate(jet);
    let mut manifest = RunManifest::new("validate", json!({"jet_order": jet}), text.as_bytes());
    let report_value = serde_json::to_value(&report)?;
    manifest.add_output("validation", &report_value);
    let out = json!({"validation": report_value, "manifest": manifest.to_value()});
    if report.valid {
        Ok((out, format!("frame is valid at jet order {jet}"), 0))
    } else {
        Ok((
            out,
            format!(
                "frame is INVALID at jet order {jet}: {} bracket violation(s)",
                report.violations.len()
            ),
            2,
        ))
    }
}

fn cmd_privilege(input: &PathBuf, jet_order: Option<u32>) -> CmdResult {
    let (text, doc) = load(input)?;
    let jet = jet_order
        .or(doc.jet_order)
        .unwrap_or_else(|| doc.frame.weights().default_jet_order());
    let validation = doc.frame.validate(jet);
    if !validation.valid {
        let out = json!({"validation": serde_json::to_value(&validation)?});
        return Ok((out, "frame is invalid; cannot privilege".into(), 2));
    }
    let (linear, psi, pushed, report) = privilege_pipeline(&doc.frame)?;
    let mut manifest = RunManifest::new("privilege", json!({"jet_order": jet}), text.as_bytes());
    let linear_v = change_json(&linear);
    let psi_v = change_json(&psi);
    let frame_v = frame_json(&pushed);
    let report_v = privileged_report_json(&report);
    manifest.add_output("linear_adaptation", &linear_v);
    manifest.add_output("psi_hat", &psi_v);
    manifest.add_output("privileged_frame", &frame_v);
    manifest.add_output("privileged_report", &report_v);
    let out = json!({
        "linear_adaptation": linear_v,
        "psi_hat": psi_v,
        "privileged_frame": frame_v,
        "privileged_report": report_v,
        "manifest": manifest.to_value(),
    });
    if report.verdict {
        let nontrivial = !psi.is_identity();
        Ok((
            out,
            format!(
                "privileged coordinates constructed (psi-hat {})",
                if nontrivial { "nontrivial" } else { "identity" }
            ),
            0,
        ))
    } else {
        Ok((out, "privilege construction failed the order check".into(), 2))
    }
}

fn cmd_approx(
    input: &PathBuf,
    auto: bool,
    assoc_budget: usize,
    jet_order: Option<u32>,
) -> CmdResult {
    let (text, doc) = load(input)?;
    let jet = jet_order
        .or(doc.jet_order)
        .unwrap_or_else(|| doc.frame.weights().default_jet_order());
    let validation = doc.frame.validate(jet);
    if !validation.valid {
        let out = json!({"validation": serde_json::to_value(&validation)?});
        return Ok((out, "frame is invalid".into(), 2));
    }
    let frame = if is_privileged(&doc.frame).verdict {
        doc.frame.clone()
    } else if auto {
        privilege_pipeline(&doc.frame)?.2
    } else {
        let out = json!({
            "privileged_report": privileged_report_json(&is_privileged(&doc.frame)),
        });
        return Ok((
            out,
            "frame is not privileged (pass --auto to privilege first)".into(),
            2,
        ));
    };
    let w = frame.weights().clone();
    let model = model_fields(&frame)?;
    let constants = frame.structure_constants()?;
    let algebra = GradedLieAlgebra::new(w.clone(), constants.clone())?;
    let basis = CanonicalBasis::new(w.clone(), model.clone())?;
    let law = group_law(&basis, &algebra)?;
    let n = w.n();
    let assoc_symbolic = n <= 4;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let checks = json!({
        "unit": law.unit_ok(),
        "associativity": if assoc_symbolic {
            law.associativity_symbolic()
        } else {
            law.associativity_randomized(&mut rng, assoc_budget)
        },
        "associativity_mode": if assoc_symbolic { "symbolic" } else { "randomized" },
        "dilation_automorphism": law.dilation_automorphism_ok(),
        "inverse": inverse_ok(&law, &basis),
        "left_invariance": left_invariance_ok(&law, &basis),
    });
    let all_ok = ["unit", "associativity", "dilation_automorphism", "inverse", "left_invariance"]
        .iter()
        .all(|k| checks[k] == json!(true));
    let mut manifest = RunManifest::new(
        "approx",
        json!({"auto": auto, "assoc_budget": assoc_budget, "jet_order": jet}),
        text.as_bytes(),
    );
    let model_v = Value::Array(model.iter().map(|f| field_json(f, &w)).collect());
    let constants_v = constants_json(&constants);
    let law_v = law_json(&law);
    manifest.add_output("model_fields", &model_v);
    manifest.add_output("structure_constants", &constants_v);
    manifest.add_output("group_law", &law_v);
    let out = json!({
        "model_fields": model_v,
        "structure_constants": constants_v,
        "group_law": law_v,
        "invariants": checks,
        "manifest": manifest.to_value(),
    });
    if all_ok {
        Ok((out, "nilpotent approximation constructed; all invariants hold".into(), 0))
    } else {
        Ok((out, "invariant check FAILED (see report)".into(), 2))
    }
}

fn cmd_canonical(
    input: &PathBuf,
    kind: u8,
    steps: Option<u32>,
    box_half: Option<f64>,
    samples: usize,
    seed: u64,
) -> CmdResult {
    let (text, doc) = load(input)?;
    if kind != 1 && kind != 2 {
        return Err(Error::Document {
            path: "--kind".into(),
            message: "kind must be 1 or 2".into(),
        });
    }
    let cfg = match steps.or(doc.flow.as_ref().and_then(|f| f.steps_per_unit)) {
        Some(s) => FlowConfig::with_steps(s)?,
        None => FlowConfig::default(),
    };
    let cfg = match doc.flow.as_ref().and_then(|f| f.guard_radius) {
        Some(r) => FlowConfig { guard_radius: r, ..cfg },
        None => cfg,
    };
    let half = box_half
        .or(doc.samples.as_ref().map(|s| s.half))
        .unwrap_or(0.25);
    let count = doc.samples.as_ref().map(|s| s.count).unwrap_or(samples);
    let frame = &doc.frame;
    if !is_privileged(frame).verdict {
        let out = json!({
            "privileged_report": privileged_report_json(&is_privileged(frame)),
        });
        return Ok((out, "rate test refused: frame is not privileged".into(), 2));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = sample_box(&mut rng, frame.weights().n(), half, count);
    let grid = default_grid();
    let report = if kind == 1 {
        first_kind_rate_test(frame, &points, &cfg, &grid)?
    } else {
        second_kind_rate_test(frame, &points, &cfg, &grid)?
    };
    let mut manifest = RunManifest::new(
        "canonical",
        json!({
            "kind": kind,
            "steps": cfg.steps_per_unit,
            "box": half,
            "samples": count,
            "seed": seed,
        }),
        text.as_bytes(),
    );
    let report_v = serde_json::to_value(&report)?;
    manifest.add_output("rate_report", &report_v);
    let out = json!({"rate_report": report_v, "manifest": manifest.to_value()});
    if report.inconclusive {
        Ok((out, "rate test inconclusive (too few usable grid points)".into(), 3))
    } else if report.verdict {
        Ok((
            out,
            format!(
                "rate test passed ({} of {} samples exact)",
                report.exact_count(),
                report.samples.len()
            ),
            0,
        ))
    } else {
        Ok((out, "rate test FAILED".into(), 2))
    }
}

fn cmd_heisenberg(input: &PathBuf) -> CmdResult {
    let text = std::fs::read_to_string(input)?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| Error::Document {
        path: "$".into(),
        message: e.to_string(),
    })?;
    let levi = matrix_from_json(&raw["levi"], "$.levi")?;
    let b = matrix_from_json(&raw["b"], "$.b")?;
    let (basis, law) = heisenberg_family(&levi, &b)?;
    let w = basis.weights().clone();
    let constants = basis.constants_at_origin();
    let membership = class_membership(&w, basis.fields(), &constants);
    let mut manifest = RunManifest::new("heisenberg", json!({}), text.as_bytes());
    let basis_v = Value::Array(basis.fields().iter().map(|f| field_json(f, &w)).collect());
    let law_v = law_json(&law);
    let membership_v = json!({
        "adapted_at_origin": membership.adapted_at_origin,
        "homogeneity_failures": membership.homogeneity_failures,
        "bracket_failures": membership.bracket_failures,
        "verdict": membership.verdict,
    });
    manifest.add_output("basis", &basis_v);
    manifest.add_output("group_law", &law_v);
    manifest.add_output("membership", &membership_v);
    let out = json!({
        "basis": basis_v,
        "group_law": law_v,
        "membership": membership_v,
        "manifest": manifest.to_value(),
    });
    let code = if membership.verdict { 0 } else { 2 };
    Ok((
        out,
        format!(
            "Heisenberg family member built (n = {}); membership {}",
            w.n(),
            if membership.verdict { "holds" } else { "FAILED" }
        ),
        code,
    ))
}

fn cmd_bch(input: &PathBuf) -> CmdResult {
    let text = std::fs::read_to_string(input)?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| Error::Document {
        path: "$".into(),
        message: e.to_string(),
    })?;
    let weights: Vec<u32> = serde_json::from_value(raw["weights"].clone()).map_err(|e| {
        Error::Document {
            path: "$.weights".into(),
            message: e.to_string(),
        }
    })?;
    let w = WeightSequence::new(weights)?;
    let n = w.n();
    let quads = raw["constants"].as_array().ok_or_else(|| Error::Document {
        path: "$.constants".into(),
        message: "expected an array of [i, j, k, rational] quadruples".into(),
    })?;
    let mut entries = std::collections::BTreeMap::new();
    for (idx, quad) in quads.iter().enumerate() {
        let path = format!("$.constants[{idx}]");
        let arr = quad.as_array().filter(|a| a.len() == 4).ok_or_else(|| {
            Error::Document {
                path: path.clone(),
                message: "expected [i, j, k, rational]".into(),
            }
        })?;
        let get_idx = |v: &Value| -> Result<usize, Error> {
            v.as_u64()
                .map(|x| x as usize)
                .filter(|&x| x >= 1 && x <= n)
                .ok_or_else(|| Error::Document {
                    path: path.clone(),
                    message: format!("index out of range 1..={n}"),
                })
        };
        let i = get_idx(&arr[0])? - 1;
        let j = get_idx(&arr[1])? - 1;
        let k = get_idx(&arr[2])? - 1;
        let v = rat_from_json(&arr[3], &path)?;
        entries.insert((i, j, k), v.clone());
        // fill the antisymmetric mirror if absent
        entries.entry((j, i, k)).or_insert(-v);
    }
    let constants = StructureConstants::from_entries(n, &w, entries)?;
    let algebra = GradedLieAlgebra::new(w.clone(), constants)?;
    let parse_vec = |key: &str| -> Result<Vec<Rat>, Error> {
        let arr = raw[key].as_array().ok_or_else(|| Error::Document {
            path: format!("$.{key}"),
            message: format!("expected an array of {n} rationals"),
        })?;
        if arr.len() != n {
            return Err(Error::Document {
                path: format!("$.{key}"),
                message: format!("expected {n} entries, got {}", arr.len()),
            });
        }
        arr.iter()
            .enumerate()
            .map(|(i, v)| rat_from_json(v, &format!("$.{key}[{i}]")))
            .collect()
    };
    let xi = parse_vec("xi")?;
    let eta = parse_vec("eta")?;
    let product = algebra.dynkin(&xi, &eta);
    let mut manifest = RunManifest::new("bch", json!({}), text.as_bytes());
    let product_v = Value::Array(product.iter().map(|v| Value::String(rat_string(v))).collect());
    manifest.add_output("dynkin_product", &product_v);
    let out = json!({
        "dynkin_product": product_v,
        "manifest": manifest.to_value(),
    });
    Ok((out, "Dynkin product evaluated".into(), 0))
}
