//! Numeric flows and canonical-coordinate rate tests.
//!
//! Floating point is confined to this module: flows are integrated with a
//! fixed-step classical Runge–Kutta scheme, while every comparison target
//! (model exponential, composed model flows) is evaluated from the exact
//! symbolic polynomials of [`crate::nilpotent`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::nilpotent::CanonicalBasis;
use crate::poly::WeightSequence;
use crate::privileged::{is_privileged, model_fields};
use crate::vf::PolyVectorField;

/// Fixed-step RK4 integrator settings.
#[derive(Debug, Clone, Serialize)]
pub struct FlowConfig {
    /// Steps per unit time; at least 16.
    pub steps_per_unit: u32,
    /// Trajectories escaping the sup-norm ball of this radius abort.
    pub guard_radius: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            steps_per_unit: 256,
            guard_radius: 10.0,
        }
    }
}

impl FlowConfig {
    pub fn with_steps(steps_per_unit: u32) -> Result<Self> {
        if steps_per_unit < 16 {
            return Err(Error::InvalidWeights(format!(
                "step count {steps_per_unit} below the minimum of 16"
            )));
        }
        Ok(FlowConfig {
            steps_per_unit,
            ..Default::default()
        })
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// RK4 approximation of exp(time·X)(y0), with a per-step guard-radius
/// check.
pub fn flow(field: &PolyVectorField, y0: &[f64], time: f64, cfg: &FlowConfig) -> Result<Vec<f64>> {
    let nsteps = ((time.abs() * cfg.steps_per_unit as f64).ceil() as usize).max(1);
    let h = time / nsteps as f64;
    let mut y = y0.to_vec();
    let f = |p: &[f64]| field.eval_f64(p);
    for step in 0..nsteps {
        if sup_norm(&y) > cfg.guard_radius {
            return Err(Error::GuardRadius {
                radius: cfg.guard_radius,
                step,
            });
        }
        let k1 = f(&y);
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
        let k2 = f(&y2);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
        let k3 = f(&y3);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
        let k4 = f(&y4);
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    if sup_norm(&y) > cfg.guard_radius {
        return Err(Error::GuardRadius {
            radius: cfg.guard_radius,
            step: nsteps,
        });
    }
    Ok(y)
}

/// RK4 flow of the combined field Σ ξ_j X_j from y0 for unit time.
pub fn flow_combined(
    fields: &[PolyVectorField],
    xi: &[f64],
    y0: &[f64],
    cfg: &FlowConfig,
) -> Result<Vec<f64>> {
    // scale the step count with the field magnitude so that time-1 flows
    // of large combinations stay accurate
    let nsteps = cfg.steps_per_unit.max(16) as usize;
    let h = 1.0 / nsteps as f64;
    let n = y0.len();
    let f = |p: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (j, field) in fields.iter().enumerate() {
            if xi[j] == 0.0 {
                continue;
            }
            let v = field.eval_f64(p);
            for k in 0..n {
                out[k] += xi[j] * v[k];
            }
        }
        out
    };
    let mut y = y0.to_vec();
    for step in 0..nsteps {
        if sup_norm(&y) > cfg.guard_radius {
            return Err(Error::GuardRadius {
                radius: cfg.guard_radius,
                step,
            });
        }
        let k1 = f(&y);
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
        let k2 = f(&y2);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
        let k3 = f(&y3);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
        let k4 = f(&y4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(y)
}

/// Canonical coordinates of the first kind:
/// exp_X(x) = exp(x₁X₁ + ⋯ + x_nX_n)(0).
pub fn exp_x(frame: &Frame, x: &[f64], cfg: &FlowConfig) -> Result<Vec<f64>> {
    let n = frame.weights().n();
    flow_combined(frame.fields(), x, &vec![0.0; n], cfg)
}

/// Canonical coordinates of the second kind:
/// γ_X(x) = exp(x₁X₁) ∘ ⋯ ∘ exp(x_nX_n)(0) (the X_n flow applied first).
pub fn gamma_x(frame: &Frame, x: &[f64], cfg: &FlowConfig) -> Result<Vec<f64>> {
    let n = frame.weights().n();
    let mut p = vec![0.0; n];
    for j in (0..n).rev() {
        let mut xi = vec![0.0; n];
        xi[j] = x[j];
        p = flow_combined(frame.fields(), &xi, &p, cfg)?;
    }
    Ok(p)
}

fn dilate_f64(t: f64, x: &[f64], w: &WeightSequence) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(k, v)| t.powi(w.weight(k) as i32) * v)
        .collect()
}

fn undilate_f64(t: f64, x: &[f64], w: &WeightSequence) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(k, v)| v / t.powi(w.weight(k) as i32))
        .collect()
}

/// Status of one sample point in a rate test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    /// Errors at the integrator noise floor; slope fit skipped.
    Exact,
    /// Fitted slope meets the threshold.
    Pass,
    /// Fitted slope below the threshold.
    Fail,
    /// Fewer than 4 usable grid points.
    Inconclusive,
}

/// Per-sample outcome: errors over the t-grid plus the fitted log-log
/// slope.
#[derive(Debug, Clone, Serialize)]
pub struct RateSample {
    pub x: Vec<f64>,
    /// (t, sup-norm error) for each usable grid point.
    pub errors: Vec<(f64, f64)>,
    pub slope: Option<f64>,
    pub status: SampleStatus,
}

/// Outcome of a first- or second-kind rate test over a sample set.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub grid: Vec<f64>,
    pub slope_threshold: f64,
    pub steps_per_unit: u32,
    pub samples: Vec<RateSample>,
    /// True iff every sample is Exact or Pass.
    pub verdict: bool,
    /// True iff any sample had too few usable grid points.
    pub inconclusive: bool,
}

impl RateReport {
    pub fn exact_count(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.status == SampleStatus::Exact)
            .count()
    }

    pub fn pass_fraction(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let ok = self
            .samples
            .iter()
            .filter(|s| matches!(s.status, SampleStatus::Exact | SampleStatus::Pass))
            .count();
        ok as f64 / self.samples.len() as f64
    }
}

/// Default geometric grid t = 2^{-3}, …, 2^{-10}.
pub fn default_grid() -> Vec<f64> {
    (3..=10).map(|k| 2f64.powi(-k)).collect()
}

const SLOPE_THRESHOLD: f64 = 0.9;
const EXACT_FLOOR: f64 = 100.0 * f64::EPSILON;

fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    // least-squares slope of ln(err) against ln(t) over points with
    // positive error
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, e)| e > 0.0)
        .map(|&(t, e)| (t.ln(), e.ln()))
        .collect();
    if data.len() < 2 {
        return None;
    }
    let m = data.len() as f64;
    let sx: f64 = data.iter().map(|p| p.0).sum();
    let sy: f64 = data.iter().map(|p| p.1).sum();
    let sxx: f64 = data.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = data.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    if denom.abs() < f64::EPSILON {
        return None;
    }
    Some((m * sxy - sx * sy) / denom)
}

fn threads_from_env(total: usize) -> usize {
    std::env::var("CARNOT_FORGE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
        .min(total.max(1))
}

fn rate_test_with<F>(
    frame: &Frame,
    samples: &[Vec<f64>],
    cfg: &FlowConfig,
    grid: &[f64],
    target: &[crate::poly::Poly],
    numeric_map: F,
) -> Result<RateReport>
where
    F: Fn(&Frame, &[f64], &FlowConfig) -> Result<Vec<f64>> + Sync,
{
    let w = frame.weights().clone();
    if !is_privileged(frame).verdict {
        return Err(Error::NotPrivileged);
    }
    let eval_sample = |x: &Vec<f64>| -> RateSample {
        let exact_target: Vec<f64> = target.iter().map(|p| p.eval_f64(x)).collect();
        let mut errors = Vec::new();
        for &t in grid {
            let scaled = dilate_f64(t, x, &w);
            let Ok(flowed) = numeric_map(frame, &scaled, cfg) else {
                continue; // guard escape: drop this grid point
            };
            let rescaled = undilate_f64(t, &flowed, &w);
            let err = rescaled
                .iter()
                .zip(&exact_target)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            errors.push((t, err));
        }
        let max_err = errors.iter().fold(0.0f64, |m, &(_, e)| m.max(e));
        if !errors.is_empty() && max_err < EXACT_FLOOR {
            return RateSample {
                x: x.clone(),
                errors,
                slope: None,
                status: SampleStatus::Exact,
            };
        }
        if errors.len() < 4 {
            return RateSample {
                x: x.clone(),
                errors,
                slope: None,
                status: SampleStatus::Inconclusive,
            };
        }
        let slope = fit_slope(&errors);
        let status = match slope {
            Some(s) if s >= SLOPE_THRESHOLD => SampleStatus::Pass,
            Some(_) => SampleStatus::Fail,
            None => SampleStatus::Inconclusive,
        };
        RateSample {
            x: x.clone(),
            errors,
            slope,
            status,
        }
    };

    let nthreads = threads_from_env(samples.len());
    let results: Vec<RateSample> = if nthreads <= 1 || samples.len() <= 1 {
        samples.iter().map(eval_sample).collect()
    } else {
        let chunk = samples.len().div_ceil(nthreads);
        let mut slots: Vec<Vec<RateSample>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = samples
                .chunks(chunk)
                .map(|part| scope.spawn(|| part.iter().map(eval_sample).collect::<Vec<_>>()))
                .collect();
            for h in handles {
                slots.push(h.join().expect("rate-test worker panicked"));
            }
        });
        slots.into_iter().flatten().collect()
    };

    let inconclusive = results
        .iter()
        .any(|s| s.status == SampleStatus::Inconclusive);
    let verdict = !results.is_empty()
        && results
            .iter()
            .all(|s| matches!(s.status, SampleStatus::Exact | SampleStatus::Pass));
    Ok(RateReport {
        grid: grid.to_vec(),
        slope_threshold: SLOPE_THRESHOLD,
        steps_per_unit: cfg.steps_per_unit,
        samples: results,
        verdict,
        inconclusive,
    })
}

/// First-kind rate test: the rescaled deviation
/// δ_t^{-1}·exp_X(δ_t·x) − exp_model(x) must vanish at rate O(t).
pub fn first_kind_rate_test(
    frame: &Frame,
    samples: &[Vec<f64>],
    cfg: &FlowConfig,
    grid: &[f64],
) -> Result<RateReport> {
    let basis = model_basis(frame)?;
    let target = basis.exp_map();
    rate_test_with(frame, samples, cfg, grid, &target, exp_x)
}

/// Second-kind rate test: δ_t^{-1}·γ_X(δ_t·x) against the composed model
/// flow γ̂(x), evaluated from its exact polynomial form.
pub fn second_kind_rate_test(
    frame: &Frame,
    samples: &[Vec<f64>],
    cfg: &FlowConfig,
    grid: &[f64],
) -> Result<RateReport> {
    let basis = model_basis(frame)?;
    let target = basis.second_kind_map();
    rate_test_with(frame, samples, cfg, grid, &target, gamma_x)
}

/// The canonical basis formed by the model vector fields of a privileged
/// frame.
pub fn model_basis(frame: &Frame) -> Result<CanonicalBasis> {
    let model = model_fields(frame)?;
    CanonicalBasis::new(frame.weights().clone(), model)
}

/// Draw `count` uniform samples from the box [−half, half]ⁿ.
pub fn sample_box<R: rand::Rng>(rng: &mut R, n: usize, half: f64, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(-half..=half)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poly::{rat, ratio, Poly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flow_constant_field() {
        let field = PolyVectorField::coordinate(3, 0);
        let cfg = FlowConfig::default();
        let y = flow(&field, &[0.0; 3], 1.0, &cfg).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-12);
        assert_eq!(&y[1..], &[0.0, 0.0]);
    }

    #[test]
    fn flow_exponential_growth() {
        // ẏ = y from 1 over unit time → e
        let field = PolyVectorField::new(vec![Poly::var(1, 0)]);
        let cfg = FlowConfig::default();
        let y = flow(&field, &[1.0], 1.0, &cfg).unwrap();
        assert!((y[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn rk4_order_check() {
        let field = PolyVectorField::new(vec![Poly::var(1, 0)]);
        let coarse = FlowConfig::with_steps(16).unwrap();
        let fine = FlowConfig::with_steps(32).unwrap();
        let e = std::f64::consts::E;
        let err_c = (flow(&field, &[1.0], 1.0, &coarse).unwrap()[0] - e).abs();
        let err_f = (flow(&field, &[1.0], 1.0, &fine).unwrap()[0] - e).abs();
        let ratio = err_c / err_f;
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn guard_radius_aborts() {
        let field = PolyVectorField::new(vec![Poly::var(1, 0)]);
        let mut cfg = FlowConfig::default();
        cfg.guard_radius = 2.0;
        assert!(matches!(
            flow(&field, &[1.0], 2.0, &cfg),
            Err(Error::GuardRadius { .. })
        ));
    }

    #[test]
    fn exp_x_matches_symbolic_on_homogeneous_frame() {
        let frame = fixtures::polarized_heisenberg();
        let basis = model_basis(&frame).unwrap();
        let cfg = FlowConfig::default();
        let x = [0.2, -0.15, 0.1];
        let numeric = exp_x(&frame, &x, &cfg).unwrap();
        let exact: Vec<f64> = basis.exp_map().iter().map(|p| p.eval_f64(&x)).collect();
        for (a, b) in numeric.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn gamma_x_matches_symbolic_on_homogeneous_frame() {
        let frame = fixtures::symmetric_heisenberg();
        let basis = model_basis(&frame).unwrap();
        let cfg = FlowConfig::default();
        let x = [0.2, -0.15, 0.1];
        let numeric = gamma_x(&frame, &x, &cfg).unwrap();
        let exact: Vec<f64> = basis
            .second_kind_map()
            .iter()
            .map(|p| p.eval_f64(&x))
            .collect();
        for (a, b) in numeric.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        // γ_X ≠ exp_X generically on a non-commuting frame
        let first: Vec<f64> = exp_x(&frame, &x, &cfg).unwrap();
        assert!((numeric[2] - first[2]).abs() > 1e-4);
    }

    #[test]
    fn commuting_frame_maps_are_identity() {
        let frame = fixtures::coordinate_frame(
            &crate::poly::WeightSequence::new(vec![1, 2, 3]).unwrap(),
        );
        let cfg = FlowConfig::default();
        let x = [0.3, -0.2, 0.25];
        let e = exp_x(&frame, &x, &cfg).unwrap();
        let g = gamma_x(&frame, &x, &cfg).unwrap();
        for k in 0..3 {
            assert!((e[k] - x[k]).abs() < 1e-12);
            assert!((g[k] - x[k]).abs() < 1e-12);
        }
    }

    fn perturbed_heisenberg() -> crate::frames::Frame {
        fixtures::perturbed_polarized_heisenberg()
    }

    #[test]
    fn homogeneous_frame_rate_test_is_exact() {
        let frame = fixtures::polarized_heisenberg();
        let cfg = FlowConfig::default();
        let grid = default_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let samples = sample_box(&mut rng, 3, 0.25, 5);
        let report = first_kind_rate_test(&frame, &samples, &cfg, &grid).unwrap();
        assert!(report.verdict);
        assert_eq!(report.exact_count(), 5);
        let report = second_kind_rate_test(&frame, &samples, &cfg, &grid).unwrap();
        assert!(report.verdict);
        assert_eq!(report.exact_count(), 5);
    }

    #[test]
    fn perturbed_frame_rate_slopes() {
        let frame = perturbed_heisenberg();
        assert!(is_privileged(&frame).verdict);
        let cfg = FlowConfig::default();
        let grid = default_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = sample_box(&mut rng, 3, 0.25, 5);
        let report = first_kind_rate_test(&frame, &samples, &cfg, &grid).unwrap();
        assert!(report.verdict, "first kind failed: {report:?}");
        for s in &report.samples {
            if let Some(slope) = s.slope {
                assert!((0.9..=1.5).contains(&slope), "slope {slope}");
            }
        }
        let report = second_kind_rate_test(&frame, &samples, &cfg, &grid).unwrap();
        assert!(report.verdict, "second kind failed: {report:?}");
    }

    #[test]
    fn even_perturbation_gives_quadratic_rate() {
        // x₁³∂₃ on X₁ enters the rescaled field at t²
        // (t^{w₁+3−w₃} = t²): exp_X deviates as δ_t-rescaled ξ₁⁴/4, so the
        // fitted slope is 2, still comfortably above the 0.9 threshold
        let base = fixtures::polarized_heisenberg();
        let mut fields = base.fields().to_vec();
        let mut comps = fields[0].components().to_vec();
        comps[2] = comps[2].add(&Poly::var(3, 0).pow(3));
        fields[0] = PolyVectorField::new(comps);
        let frame = crate::frames::Frame::new(base.weights().clone(), fields).unwrap();
        let cfg = FlowConfig::default();
        let grid = default_grid();
        let report =
            first_kind_rate_test(&frame, &[vec![0.2, -0.1, 0.15]], &cfg, &grid).unwrap();
        assert!(report.verdict);
        let slope = report.samples[0].slope.unwrap();
        assert!((1.9..=2.1).contains(&slope), "slope {slope}");
    }

    #[test]
    fn non_privileged_frame_refused() {
        let frame = fixtures::violating_w113();
        let cfg = FlowConfig::default();
        let grid = default_grid();
        let res = first_kind_rate_test(&frame, &[vec![0.1, 0.1, 0.1]], &cfg, &grid);
        assert!(res.is_err());
    }

    #[test]
    fn rescaling_identity() {
        // δ_t^{-1}·exp_X(δ_t x) computed two ways agrees to integrator
        // tolerance: flowing the rescaled-field combination equals
        // rescaling the flow
        let frame = perturbed_heisenberg();
        let w = frame.weights().clone();
        let cfg = FlowConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.25..=0.25)).collect();
            let t: f64 = rng.gen_range(0.05..=0.5);
            let direct = undilate_f64(t, &exp_x(&frame, &dilate_f64(t, &x, &w), &cfg).unwrap(), &w);
            // rescaled fields: t^{w_j} δ_t^* X_j, flowed with weights ξ = x
            let rescaled_fields: Vec<PolyVectorField> = (0..3)
                .map(|j| {
                    let tr = approx_rat(t);
                    frame.fields()[j]
                        .dilation_pullback(&tr, &w)
                        .scale(&pow_rat(&tr, w.weight(j)))
                })
                .collect();
            let alt = flow_combined(&rescaled_fields, &x, &[0.0; 3], &cfg).unwrap();
            for (a, b) in direct.iter().zip(&alt) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
        }
    }

    fn approx_rat(t: f64) -> crate::poly::Rat {
        // exact dyadic representative so the two computations use the
        // identical scale factor
        let scaled = (t * (1u64 << 32) as f64).round() as i64;
        ratio(scaled, 1i64 << 32)
    }

    fn pow_rat(t: &crate::poly::Rat, e: u32) -> crate::poly::Rat {
        let mut out = rat(1);
        for _ in 0..e {
            out *= t.clone();
        }
        out
    }

    #[test]
    fn group_compatibility_at_desk_scale() {
        // exp_X(x)·exp_X(y) = exp_X(dynkin(x, y)) numerically on a
        // homogeneous frame
        let frame = fixtures::symmetric_heisenberg();
        let basis = model_basis(&frame).unwrap();
        let c = basis.constants_at_origin();
        let g = crate::nilpotent::GradedLieAlgebra::new(frame.weights().clone(), c).unwrap();
        let law = crate::nilpotent::group_law(&basis, &g).unwrap();
        let cfg = FlowConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let x: Vec<crate::poly::Rat> =
                (0..3).map(|_| fixtures::random_rat(&mut rng)).collect();
            let y: Vec<crate::poly::Rat> =
                (0..3).map(|_| fixtures::random_rat(&mut rng)).collect();
            let xf: Vec<f64> = x.iter().map(crate::poly::rat_to_f64).collect();
            let yf: Vec<f64> = y.iter().map(crate::poly::rat_to_f64).collect();
            let ex = exp_x(&frame, &xf, &cfg).unwrap();
            let ey = exp_x(&frame, &yf, &cfg).unwrap();
            let prod: Vec<f64> = {
                let point: Vec<f64> = ex.iter().chain(&ey).cloned().collect();
                law.components().iter().map(|p| p.eval_f64(&point)).collect()
            };
            let z = g.dynkin(&x, &y);
            let zf: Vec<f64> = z.iter().map(crate::poly::rat_to_f64).collect();
            let ez = exp_x(&frame, &zf, &cfg).unwrap();
            for (a, b) in prod.iter().zip(&ez) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn threaded_results_are_deterministic() {
        let frame = perturbed_heisenberg();
        let cfg = FlowConfig::default();
        let grid = default_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let samples = sample_box(&mut rng, 3, 0.25, 6);
        let single = first_kind_rate_test(&frame, &samples, &cfg, &grid).unwrap();
        std::env::set_var("CARNOT_FORGE_THREADS", "3");
        let multi = first_kind_rate_test(&frame, &samples, &cfg, &grid).unwrap();
        std::env::remove_var("CARNOT_FORGE_THREADS");
        assert_eq!(single.verdict, multi.verdict);
        for (a, b) in single.samples.iter().zip(&multi.samples) {
            assert_eq!(a.errors, b.errors);
            assert_eq!(a.slope, b.slope);
        }
    }
}
