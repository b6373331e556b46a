//! Riemannian gradient ascent on U(N).
//!
//! The ascent direction at `U` is the Hermitian generator
//! `A* = i[UρU†, θ]`, the steepest-ascent direction of
//! `J(U) = tr(UρU†θ)` under the metric `⟨A,B⟩ = Re tr(A†B)`: the
//! first-order rate of `J(e^{isA*}U)` equals `‖[θ, UρU†]‖_F²`, which
//! vanishes exactly on the critical set. Steps retract through the exact
//! exponential `U ← e^{iηA*}U` with a backtracking line search, so
//! accepted iterates stay on the group and `J` is strictly increasing
//! until termination.
//!
//! The trap audit drives the ascent from Haar-random starts plus starts
//! perturbed off each saddle, and matches every converged value against
//! the predicted landscape levels: randomized searches must reach the
//! global maximum (saddles are not traps), while exact critical starts are
//! legitimate fixed points.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, hermitian_eigen, random_hermitian, random_unitary, task_rng, CMat, Unitary,
};
use crate::oracle::objective;
use crate::spectra::Spectrum;
use crate::tables::representative_permutation;
use crate::topology::{self, AnalyzeLimits, CriticalKind, LandscapeReport};

/// Step-size floor: once backtracking shrinks below this the line search
/// reports underflow (J is at its floating-point ceiling).
const STEP_FLOOR: f64 = 1e-20;

/// Unitarity drift that triggers the scheduled re-orthonormalization.
/// Below this the correction is pure rounding noise and would mask the
/// last decades of genuine ascent.
const REUNIT_DEFECT: f64 = 1e-12;

/// Norm of the Hermitian kick applied to saddle starts: large enough to
/// leave the measure-zero stable manifold in double precision, small
/// enough to demonstrate the near-saddle slowdown.
const SADDLE_KICK_NORM: f64 = 1e-3;

/// Gradient-ascent parameters.
#[derive(Clone, Copy, Debug)]
pub struct FlowParams {
    /// Initial trial step of every line search.
    pub step0: f64,
    /// Backtracking factor in (0, 1).
    pub shrink: f64,
    /// Terminate when `‖A*‖_F` falls below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Re-orthonormalize the iterate every this many accepted steps.
    pub reunit_every: usize,
}

impl FlowParams {
    /// Defaults scaled to the spectra: `step0 = 0.5 / (max|λ|·max|ε|)`.
    pub fn for_spectra(rho: &Spectrum, theta: &Spectrum) -> Self {
        let amp = |s: &Spectrum| s.distinct().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = (amp(rho) * amp(theta)).max(1e-12);
        FlowParams {
            step0: 0.5 / scale,
            shrink: 0.5,
            grad_tol: 1e-9,
            max_iters: 100_000,
            reunit_every: 50,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.step0.is_nan() || self.step0 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "step0 must be positive, got {}",
                self.step0
            )));
        }
        if self.shrink.is_nan() || self.shrink <= 0.0 || self.shrink >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "shrink must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        if self.grad_tol.is_nan() || self.grad_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        if self.max_iters == 0 || self.reunit_every == 0 {
            return Err(Error::InvalidParameter(
                "max_iters and reunit_every must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// How a trajectory stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// `‖A*‖_F ≤ grad_tol`.
    GradientConverged,
    /// No step of the backtracking search could increase J; the iterate is
    /// at the floating-point ceiling of its basin. Reported, not fatal.
    StepUnderflow,
    /// `max_iters` accepted steps with the gradient still above tolerance.
    MaxIters,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::GradientConverged => "gradient-converged",
            Termination::StepUnderflow => "step-underflow",
            Termination::MaxIters => "max-iters",
        }
    }
}

/// One ascent run. `j_series` holds J after every accepted step (strictly
/// increasing); `converged_to` is the final landscape value.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub j_series: Vec<f64>,
    pub final_u: Unitary,
    pub final_grad_norm: f64,
    pub iterations: usize,
    pub converged_to: f64,
    pub termination: Termination,
}

/// Steepest-ascent generator `A* = i[UρU†, θ]`. Hermitian; zero exactly on
/// critical points.
pub fn gradient_generator(u: &Unitary, rho_diag: &[f64], theta_diag: &[f64]) -> Result<CMat> {
    let x = u.conjugate_real_diag(rho_diag)?;
    let theta = CMat::from_real_diag(theta_diag);
    let c = commutator(&x, &theta)?;
    Ok(c.scale(Complex64::new(0.0, 1.0)))
}

/// Gradient ascent with exponential retraction and backtracking line
/// search. Never fails once the inputs validate: underflow and iteration
/// exhaustion are reported in the trajectory's termination status.
pub fn ascend(
    u0: &Unitary,
    rho_diag: &[f64],
    theta_diag: &[f64],
    params: &FlowParams,
) -> Result<Trajectory> {
    params.validate()?;
    let n = u0.dim();
    if rho_diag.len() != n || theta_diag.len() != n {
        return Err(Error::DimensionMismatch(n, rho_diag.len()));
    }

    let mut u = u0.clone();
    let mut j = objective(&u, rho_diag, theta_diag);
    let mut series = vec![j];
    let mut accepted = 0usize;

    loop {
        let grad = gradient_generator(&u, rho_diag, theta_diag)?;
        let grad_norm = grad.frobenius_norm();
        if grad_norm <= params.grad_tol {
            return Ok(Trajectory {
                j_series: series,
                final_u: u,
                final_grad_norm: grad_norm,
                iterations: accepted,
                converged_to: j,
                termination: Termination::GradientConverged,
            });
        }
        if accepted >= params.max_iters {
            return Ok(Trajectory {
                j_series: series,
                final_u: u,
                final_grad_norm: grad_norm,
                iterations: accepted,
                converged_to: j,
                termination: Termination::MaxIters,
            });
        }

        // One eigendecomposition serves every trial step of this search.
        let (evals, evecs) = hermitian_eigen(&grad)?;
        // Fold the periodic re-orthonormalization into the candidate so the
        // accepted J always belongs to the iterate actually kept.
        let reunit_due = (accepted + 1).is_multiple_of(params.reunit_every);
        let mut eta = params.step0;
        let mut stepped = false;
        while eta >= STEP_FLOOR {
            let step = exp_from_eigen(&evals, &evecs, eta)?;
            let mut candidate = step.mul(&u)?;
            if reunit_due && candidate.as_mat().unitary_defect() > REUNIT_DEFECT {
                candidate = candidate.reorthonormalize();
            }
            let j_new = objective(&candidate, rho_diag, theta_diag);
            if j_new > j {
                u = candidate;
                j = j_new;
                series.push(j);
                accepted += 1;
                stepped = true;
                break;
            }
            eta *= params.shrink;
        }
        if !stepped {
            return Ok(Trajectory {
                j_series: series,
                final_u: u,
                final_grad_norm: grad_norm,
                iterations: accepted,
                converged_to: j,
                termination: Termination::StepUnderflow,
            });
        }
    }
}

/// `exp(iηA)` from a precomputed eigendecomposition of A, reused across
/// every trial step of a line search.
fn exp_from_eigen(evals: &[f64], evecs: &Unitary, eta: f64) -> Result<Unitary> {
    let n = evals.len();
    let v = evecs.as_mat();
    let w = CMat::from_fn(n, |i, j| {
        v.get(i, j) * Complex64::new(0.0, eta * evals[j]).exp()
    });
    Ok(Unitary::from_near_unitary(w.mul(&v.adjoint())?))
}

/// Where a trajectory started.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartKind {
    /// Haar-random unitary, indexed by its stream.
    Haar(usize),
    /// Representative permutation of the given saddle record (index into
    /// the report's records), kicked by a small random Hermitian.
    SaddlePerturbed(usize),
}

/// One audited trajectory.
#[derive(Clone, Debug)]
pub struct AuditEntry {
    pub start: StartKind,
    pub converged_to: f64,
    pub iterations: usize,
    pub final_grad_norm: f64,
    pub termination: Termination,
    /// Index into the predicted landscape levels, when the converged value
    /// lies within the audit tolerance of one.
    pub matched_level: Option<usize>,
    pub reached_max: bool,
}

/// Trap audit over many starts.
#[derive(Clone, Debug)]
pub struct TrapAudit {
    pub report: LandscapeReport,
    /// Distinct predicted J values, descending (deduplicated level set).
    pub levels: Vec<f64>,
    pub entries: Vec<AuditEntry>,
    /// Count of trajectories converged to each predicted level.
    pub histogram: Vec<usize>,
    pub unmatched: usize,
    /// Fraction of Haar-random starts that reached the global maximum.
    pub fraction_at_max: f64,
    pub value_tol: f64,
}

/// Runs `n_starts` Haar-seeded ascents plus one perturbed start near each
/// saddle's representative permutation, and matches every converged value
/// against the predicted levels.
pub fn trap_audit(
    rho: &Spectrum,
    theta: &Spectrum,
    n_starts: usize,
    seed: u64,
    params: &FlowParams,
) -> Result<TrapAudit> {
    if n_starts == 0 {
        return Err(Error::InvalidParameter(
            "n_starts must be at least 1".into(),
        ));
    }
    params.validate()?;
    let report = topology::analyze(rho, theta, &AnalyzeLimits::default())?;
    let value_tol = 1e-6;

    let mut levels: Vec<f64> = Vec::new();
    for r in &report.records {
        if !levels.iter().any(|&l| (l - r.j_value).abs() <= value_tol) {
            levels.push(r.j_value);
        }
    }
    let j_max = report.summary.j_max;

    let rho_diag = rho.expanded();
    let theta_diag = theta.expanded();
    let n = rho.dim();

    let mut entries = Vec::new();
    for t in 0..n_starts {
        let mut rng = task_rng(seed, t as u64);
        let u0 = random_unitary(n, &mut rng);
        let traj = ascend(&u0, &rho_diag, &theta_diag, params)?;
        entries.push(audit_entry(
            StartKind::Haar(t),
            &traj,
            &levels,
            j_max,
            value_tol,
        ));
    }

    for (idx, rec) in report.records.iter().enumerate() {
        if rec.kind != CriticalKind::Saddle {
            continue;
        }
        let mut rng = task_rng(seed, (n_starts + idx) as u64);
        let pi = representative_permutation(&rec.table);
        let u0 = perturbed_permutation_start(pi.mapping(), &mut rng)?;
        let traj = ascend(&u0, &rho_diag, &theta_diag, params)?;
        entries.push(audit_entry(
            StartKind::SaddlePerturbed(idx),
            &traj,
            &levels,
            j_max,
            value_tol,
        ));
    }

    let mut histogram = vec![0usize; levels.len()];
    let mut unmatched = 0usize;
    for e in &entries {
        match e.matched_level {
            Some(i) => histogram[i] += 1,
            None => unmatched += 1,
        }
    }
    let haar_total = entries
        .iter()
        .filter(|e| matches!(e.start, StartKind::Haar(_)))
        .count();
    let haar_at_max = entries
        .iter()
        .filter(|e| matches!(e.start, StartKind::Haar(_)) && e.reached_max)
        .count();
    let fraction_at_max = if haar_total == 0 {
        0.0
    } else {
        haar_at_max as f64 / haar_total as f64
    };

    Ok(TrapAudit {
        report,
        levels,
        entries,
        histogram,
        unmatched,
        fraction_at_max,
        value_tol,
    })
}

fn audit_entry(
    start: StartKind,
    traj: &Trajectory,
    levels: &[f64],
    j_max: f64,
    value_tol: f64,
) -> AuditEntry {
    let matched_level = levels
        .iter()
        .position(|&l| (l - traj.converged_to).abs() <= value_tol);
    AuditEntry {
        start,
        converged_to: traj.converged_to,
        iterations: traj.iterations,
        final_grad_norm: traj.final_grad_norm,
        termination: traj.termination,
        matched_level,
        reached_max: (traj.converged_to - j_max).abs() <= value_tol,
    }
}

/// Permutation matrix kicked off its critical set:
/// `Π · exp(i δH)` with `‖δH‖_F` fixed to the saddle kick norm.
fn perturbed_permutation_start<R: Rng + ?Sized>(mapping: &[usize], rng: &mut R) -> Result<Unitary> {
    let n = mapping.len();
    let h = random_hermitian(n, rng);
    let norm = h.frobenius_norm();
    let kick = crate::linalg::unitary_exp(&h.scale((SADDLE_KICK_NORM / norm).into()), 1.0)?;
    Unitary::from_permutation(mapping).mul(&kick)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{commutator_residual, elementary_hermitian, hessian_form_value};
    use crate::tables::Permutation;

    fn two_level() -> (Vec<f64>, Vec<f64>) {
        (vec![1.0, 0.0], vec![1.0, 0.0])
    }

    #[test]
    fn gradient_vanishes_on_critical_points() {
        let (rho, theta) = two_level();
        let u = Unitary::from_permutation(&[1, 0]);
        let g = gradient_generator(&u, &rho, &theta).unwrap();
        assert!(g.frobenius_norm() < 1e-12);
    }

    #[test]
    fn gradient_at_hadamard_matches_residual_rate() {
        let (rho, theta) = two_level();
        let s = 1.0 / 2.0f64.sqrt();
        let u = Unitary::new(CMat::from_real_rows(&[&[s, s], &[s, -s]])).unwrap();
        let g = gradient_generator(&u, &rho, &theta).unwrap();
        // ‖A*‖_F = ‖[θ, UρU†]‖_F = 1/√2 at this point.
        assert!((g.frobenius_norm() - s).abs() < 1e-12);
        // First-order rate along A* equals the squared residual.
        let res = commutator_residual(&u, &rho, &theta).unwrap();
        let fd = {
            let step = crate::linalg::unitary_exp(&g, 1e-7).unwrap();
            let j1 = objective(&step.mul(&u).unwrap(), &rho, &theta);
            let j0 = objective(&u, &rho, &theta);
            (j1 - j0) / 1e-7
        };
        assert!((fd - res * res).abs() < 1e-5);
    }

    #[test]
    fn gradient_scales_linearly_with_theta() {
        let rho = vec![0.5, 0.3, 0.2];
        let theta: Vec<f64> = vec![2.0, 1.0, 0.0];
        let theta_scaled: Vec<f64> = theta.iter().map(|v| 3.0 * v).collect();
        let u = random_unitary(3, &mut task_rng(5, 1));
        let g1 = gradient_generator(&u, &rho, &theta).unwrap();
        let g3 = gradient_generator(&u, &rho, &theta_scaled).unwrap();
        let diff = g3.sub(&g1.scale(3.0.into())).unwrap().frobenius_norm();
        assert!(diff < 1e-12);
    }

    #[test]
    fn ascend_two_level_reaches_global_maximum() {
        let (rho, theta) = two_level();
        let spec_rho = Spectrum::new(vec![1.0, 0.0], vec![1, 1]).unwrap();
        let spec_theta = Spectrum::new(vec![1.0, 0.0], vec![1, 1]).unwrap();
        let params = FlowParams::for_spectra(&spec_rho, &spec_theta);
        for t in 0..20 {
            let u0 = random_unitary(2, &mut task_rng(1000, t));
            let traj = ascend(&u0, &rho, &theta, &params).unwrap();
            assert!(
                (traj.converged_to - 1.0).abs() <= 1e-6,
                "start {t}: converged to {}",
                traj.converged_to
            );
        }
    }

    #[test]
    fn ascend_three_level_never_stalls_at_the_saddleless_minimum() {
        let rho = Spectrum::from_values(&[0.4, 0.3, 0.3], 1e-9).unwrap();
        let theta = Spectrum::from_values(&[0.4, 0.4, 0.2], 1e-9).unwrap();
        let params = FlowParams::for_spectra(&rho, &theta);
        for t in 0..20 {
            let u0 = random_unitary(3, &mut task_rng(2000, t));
            let traj = ascend(&u0, &rho.expanded(), &theta.expanded(), &params).unwrap();
            assert!(
                (traj.converged_to - 0.34).abs() <= 1e-6,
                "start {t}: converged to {}",
                traj.converged_to
            );
        }
    }

    #[test]
    fn ascend_from_minimum_terminates_immediately() {
        // The minimizing permutation pairs the largest ρ eigenvalue with
        // the smallest θ eigenvalue: reversal.
        let rho = vec![0.4, 0.3, 0.3];
        let theta = vec![0.4, 0.4, 0.2];
        let u = Unitary::from_permutation(&[2, 1, 0]);
        let spec_rho = Spectrum::from_values(&rho, 1e-9).unwrap();
        let spec_theta = Spectrum::from_values(&theta, 1e-9).unwrap();
        let params = FlowParams::for_spectra(&spec_rho, &spec_theta);
        let traj = ascend(&u, &rho, &theta, &params).unwrap();
        assert_eq!(traj.iterations, 0);
        assert_eq!(traj.termination, Termination::GradientConverged);
        assert!((traj.converged_to - 0.32).abs() < 1e-12);
    }

    #[test]
    fn j_series_is_strictly_increasing_and_unitary_preserved() {
        let rho = vec![0.5, 0.3, 0.2, 0.0];
        let theta = vec![3.0, 2.0, 1.0, 0.0];
        let u0 = random_unitary(4, &mut task_rng(77, 0));
        let spec_rho = Spectrum::new(vec![0.5, 0.3, 0.2, 0.0], vec![1, 1, 1, 1]).unwrap();
        let spec_theta = Spectrum::new(vec![3.0, 2.0, 1.0, 0.0], vec![1, 1, 1, 1]).unwrap();
        let params = FlowParams::for_spectra(&spec_rho, &spec_theta);
        let traj = ascend(&u0, &rho, &theta, &params).unwrap();
        for w in traj.j_series.windows(2) {
            assert!(w[1] > w[0], "J series must strictly increase");
        }
        assert!(traj.final_u.as_mat().unitary_defect() <= 1e-10);
    }

    #[test]
    fn first_order_consistency_richardson() {
        // (J(e^{isA*}U) − J(U))/s → ‖[θ,UρU†]‖_F², Richardson-extrapolated
        // from s = 1e-4 and 1e-5.
        let rho = vec![0.5, 0.3, 0.2];
        let theta = vec![2.0, 1.0, 0.5];
        let u = random_unitary(3, &mut task_rng(4242, 0));
        let g = gradient_generator(&u, &rho, &theta).unwrap();
        let j0 = objective(&u, &rho, &theta);
        let rate = |s: f64| {
            let step = crate::linalg::unitary_exp(&g, s).unwrap();
            (objective(&step.mul(&u).unwrap(), &rho, &theta) - j0) / s
        };
        let d1 = rate(1e-4);
        let d2 = rate(1e-5);
        let richardson = (10.0 * d2 - d1) / 9.0;
        let expected = commutator_residual(&u, &rho, &theta).unwrap().powi(2);
        let rel = ((richardson - expected) / expected).abs();
        assert!(rel <= 1e-4, "relative first-order error {rel:.3e}");
    }

    #[test]
    fn second_order_consistency_at_critical_permutation() {
        let rho_full = Spectrum::new(vec![0.4, 0.3], vec![1, 2]).unwrap();
        let theta_full = Spectrum::new(vec![0.4, 0.2], vec![2, 1]).unwrap();
        let rho = rho_full.expanded();
        let theta = theta_full.expanded();
        let pi = Permutation::new(vec![2, 0, 1]).unwrap();
        let u = Unitary::from_permutation(pi.mapping());
        let j0 = objective(&u, &rho, &theta);
        for (beta, gamma, imag) in [(0usize, 1usize, false), (0, 2, true), (1, 2, false)] {
            let a = elementary_hermitian(3, beta, gamma, imag);
            let h = hessian_form_value(&a, &u, &rho, &theta).unwrap();
            let fd = |s: f64| {
                let up = crate::linalg::unitary_exp(&a, s).unwrap().mul(&u).unwrap();
                let um = crate::linalg::unitary_exp(&a, -s).unwrap().mul(&u).unwrap();
                (objective(&up, &rho, &theta) + objective(&um, &rho, &theta) - 2.0 * j0)
                    / (2.0 * s * s)
            };
            let (f1, f2) = (fd(1e-3), fd(5e-4));
            let richardson = (4.0 * f2 - f1) / 3.0;
            if h.abs() > 1e-9 {
                let rel = ((richardson - h) / h).abs();
                assert!(rel <= 1e-6, "({beta},{gamma},{imag}): rel {rel:.3e}");
            } else {
                assert!(richardson.abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn trap_audit_three_level() {
        let rho = Spectrum::from_values(&[0.4, 0.3, 0.3], 1e-9).unwrap();
        let theta = Spectrum::from_values(&[0.4, 0.4, 0.2], 1e-9).unwrap();
        let params = FlowParams::for_spectra(&rho, &theta);
        let audit = trap_audit(&rho, &theta, 5, 31337, &params).unwrap();
        assert_eq!(audit.fraction_at_max, 1.0);
        assert_eq!(audit.unmatched, 0);
        // No saddles in the two-table landscape: entries are Haar only.
        assert_eq!(audit.entries.len(), 5);
    }

    #[test]
    fn trap_audit_flat_landscape_terminates_immediately() {
        let rho = Spectrum::new(vec![0.25], vec![4]).unwrap();
        let theta = Spectrum::new(vec![0.8, 0.1], vec![2, 2]).unwrap();
        let params = FlowParams::for_spectra(&rho, &theta);
        let audit = trap_audit(&rho, &theta, 3, 7, &params).unwrap();
        for e in &audit.entries {
            assert_eq!(e.iterations, 0);
            assert!(e.matched_level.is_some());
        }
    }

    #[test]
    fn trap_audit_saddle_starts_escape() {
        // Pure-state 3-level system has one saddle; the kicked start must
        // leave it and land on a predicted level.
        let rho = Spectrum::new(vec![1.0, 0.0], vec![1, 2]).unwrap();
        let theta = Spectrum::new(vec![1.0, 0.5, 0.0], vec![1, 1, 1]).unwrap();
        let params = FlowParams::for_spectra(&rho, &theta);
        let audit = trap_audit(&rho, &theta, 3, 99, &params).unwrap();
        let saddle_entries: Vec<&AuditEntry> = audit
            .entries
            .iter()
            .filter(|e| matches!(e.start, StartKind::SaddlePerturbed(_)))
            .collect();
        assert!(!saddle_entries.is_empty());
        for e in saddle_entries {
            assert!(e.matched_level.is_some());
            assert!(e.reached_max, "saddle start stalled at {}", e.converged_to);
        }
        assert_eq!(audit.unmatched, 0);
    }

    #[test]
    fn converged_values_lie_on_predicted_levels() {
        let rho = Spectrum::new(vec![0.5, 0.25], vec![2, 2]).unwrap();
        let theta = Spectrum::new(vec![1.0, 0.4, 0.1], vec![1, 2, 1]).unwrap();
        let params = FlowParams::for_spectra(&rho, &theta);
        let audit = trap_audit(&rho, &theta, 6, 2024, &params).unwrap();
        assert_eq!(audit.unmatched, 0);
        assert_eq!(audit.fraction_at_max, 1.0);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let p = FlowParams {
            step0: 0.0,
            shrink: 0.5,
            grad_tol: 1e-9,
            max_iters: 10,
            reunit_every: 5,
        };
        assert!(p.validate().is_err());
        let p = FlowParams {
            step0: 1.0,
            shrink: 1.0,
            grad_tol: 1e-9,
            max_iters: 10,
            reunit_every: 5,
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn max_iters_termination_is_reported() {
        let rho = vec![1.0, 0.0];
        let theta = vec![1.0, 0.0];
        let u0 = random_unitary(2, &mut task_rng(55, 0));
        let spec_rho = Spectrum::new(vec![1.0, 0.0], vec![1, 1]).unwrap();
        let spec_theta = Spectrum::new(vec![1.0, 0.0], vec![1, 1]).unwrap();
        let mut params = FlowParams::for_spectra(&spec_rho, &spec_theta);
        params.max_iters = 3;
        let traj = ascend(&u0, &rho, &theta, &params).unwrap();
        assert_eq!(traj.termination, Termination::MaxIters);
        assert_eq!(traj.iterations, 3);
        assert!(traj.final_grad_norm > params.grad_tol);
    }

    #[test]
    fn slow_landscape_stays_monotone_across_reunit_boundaries() {
        // A nearly-degenerate gap makes convergence slow enough that the
        // scheduled re-orthonormalization check fires many times.
        let rho = vec![0.5, 0.3001, 0.3];
        let theta = vec![1.0, 0.5, 0.0];
        let u0 = random_unitary(3, &mut task_rng(91, 0));
        let spec_rho = Spectrum::new(rho.clone(), vec![1, 1, 1]).unwrap();
        let spec_theta = Spectrum::new(theta.clone(), vec![1, 1, 1]).unwrap();
        let mut params = FlowParams::for_spectra(&spec_rho, &spec_theta);
        params.reunit_every = 10;
        let traj = ascend(&u0, &rho, &theta, &params).unwrap();
        assert!(
            traj.iterations > 50,
            "expected a long run, got {}",
            traj.iterations
        );
        for w in traj.j_series.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(traj.final_u.as_mat().unitary_defect() <= 1e-10);
        // The global maximum pairs eigenvalues in order.
        let j_max = 0.5 * 1.0 + 0.3001 * 0.5;
        assert!((traj.converged_to - j_max).abs() <= 1e-6);
    }

    #[test]
    fn flow_params_scale_with_spectra() {
        let rho = Spectrum::new(vec![2.0, 1.0], vec![1, 1]).unwrap();
        let theta = Spectrum::new(vec![4.0, 0.0], vec![1, 1]).unwrap();
        let p = FlowParams::for_spectra(&rho, &theta);
        assert!((p.step0 - 0.0625).abs() < 1e-12);
    }
}
