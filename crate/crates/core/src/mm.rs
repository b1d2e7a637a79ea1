//! Minorize-maximize solver for the unit-modulus spoofing design.
//!
//! The problem: maximize the clutter-bearing power `theta^H A theta`
//! subject to the exposure cap `theta^H B theta <= gamma` with every
//! `|theta_n| = 1`. Around the current iterate `t` both forms are
//! replaced by affine bounds (a minorant for the objective because `A`
//! is PSD, a majorant for the constraint via the shift
//! `lambda_max(B) I - B >= 0`), giving the subproblem
//!
//! ```text
//! max 2 Re{theta^H d}   s.t.  2 Re{theta^H e} >= c2,  |theta_n| = 1
//! d = A t,  e = (lambda_max(B) I - B) t,
//! c2 = 2 N lambda_max(B) - t^H B t - gamma.
//! ```
//!
//! Its solution is `theta_n = exp(j arg(d_n + mu e_n))` where the
//! multiplier `mu >= 0` is zero when the linearized cap is already slack
//! and otherwise found by bisection on `f(mu) = 2 Re{theta(mu)^H e}`.
//! The bisection keeps the invariant `f(hi) >= c2 > f(lo)` and returns
//! the upper endpoint, so the linearized cap holds exactly at the new
//! iterate; by the majorization this implies `theta^H B theta <= gamma`
//! there. Feasibility is maintained at every step, not just in the
//! limit, and the objective never decreases.
//!
//! Every step costs `O(N)` thanks to the rank-2 structure of `A` and
//! `B`: `lambda_max(B)` comes from a 2x2 closed form and both products
//! go through the factors. No dense matrix is ever formed.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{build_quadratic_forms, QuadraticForms};
use crate::power::{CascadedCoefficients, ReflectionVector};

/// Iteration controls for [`solve_mm`].
#[derive(Debug, Clone, PartialEq)]
pub struct MmConfig {
    /// Maximum outer minorize-maximize iterations.
    pub max_outer_iters: usize,
    /// Relative objective change below which the run counts as converged.
    pub objective_rel_tol: f64,
    /// Residual target for the multiplier search, relative to the
    /// attainable range of the linearized cap.
    pub bisection_tol: f64,
    /// Bracket growth factor while hunting an upper multiplier endpoint.
    pub mu_bracket_growth: f64,
    /// Upper guard for the multiplier bracket.
    pub mu_bracket_cap: f64,
    /// Iteration cap for [`feasibility_restore`].
    pub feasibility_max_iters: usize,
}

impl Default for MmConfig {
    fn default() -> Self {
        MmConfig {
            max_outer_iters: 500,
            objective_rel_tol: 1e-8,
            bisection_tol: 1e-12,
            mu_bracket_growth: 2.0,
            mu_bracket_cap: 1e12,
            feasibility_max_iters: 2000,
        }
    }
}

impl MmConfig {
    fn validate(&self) -> Result<()> {
        if self.max_outer_iters == 0 || self.feasibility_max_iters == 0 {
            return Err(Error::invalid("iteration limits must be positive"));
        }
        if !(self.objective_rel_tol > 0.0)
            || !(self.bisection_tol > 0.0)
            || !(self.mu_bracket_growth > 1.0)
            || !(self.mu_bracket_cap > 0.0)
        {
            return Err(Error::invalid(
                "tolerances must be positive and the bracket growth factor above 1",
            ));
        }
        Ok(())
    }
}

/// Outcome of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    /// Final reflection configuration.
    pub theta: ReflectionVector,
    /// Clutter-bearing power `theta^H A theta` (mW).
    pub obj_clutter: f64,
    /// Surface-bearing power `theta^H B theta` (mW).
    pub power_target: f64,
    /// Outer iterations performed.
    pub iterations: usize,
    /// Whether the relative-change test fired before the iteration cap.
    pub converged: bool,
    /// Multiplier used at each iteration.
    pub mu_trace: Vec<f64>,
    /// Objective after each iteration.
    pub obj_trace: Vec<f64>,
    /// Total entries across all iterations whose phase argument vanished
    /// and was pinned to zero.
    pub degenerate_entries: usize,
}

/// Affine bound data around one iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateTerms {
    /// Objective direction `A t`.
    pub d: DVector<Complex64>,
    /// Constraint direction `(lambda_max(B) I - B) t`.
    pub e: DVector<Complex64>,
    /// Right-hand side of the linearized cap.
    pub c2: f64,
}

/// Builds the affine bounds for the subproblem at `theta`.
pub fn surrogate_terms(
    theta: &DVector<Complex64>,
    forms: &QuadraticForms,
    gamma: f64,
) -> SurrogateTerms {
    let lambda_b = forms.lambda_max_b();
    let d = forms.a_mul(theta);
    let e = theta * Complex64::new(lambda_b, 0.0) - forms.b_mul(theta);
    let n = forms.len() as f64;
    let c2 = 2.0 * n * lambda_b - forms.b_quad(theta) - gamma;
    SurrogateTerms { d, e, c2 }
}

fn phase_argmax(d: &DVector<Complex64>, e: &DVector<Complex64>, mu: f64) -> (DVector<Complex64>, usize) {
    let mut degenerate = 0;
    let theta = DVector::from_fn(d.len(), |n, _| {
        let z = d[n] + e[n] * Complex64::new(mu, 0.0);
        if z.norm() == 0.0 {
            degenerate += 1;
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, z.arg())
        }
    });
    (theta, degenerate)
}

/// Entrywise phase maximizer `exp(j arg(d_n + mu e_n))` of the
/// subproblem Lagrangian.
///
/// Entries whose argument is exactly zero are pinned to phase 0; their
/// count is returned alongside and logged, since the maximizer is not
/// unique there.
pub fn theta_opt(
    d: &DVector<Complex64>,
    e: &DVector<Complex64>,
    mu: f64,
) -> (ReflectionVector, usize) {
    let (theta, degenerate) = phase_argmax(d, e, mu);
    if degenerate > 0 {
        log::warn!("{degenerate} phase entries had zero argument and were pinned to 0");
    }
    let rv = ReflectionVector::reflect(theta).expect("unit modulus by construction");
    (rv, degenerate)
}

fn cap_inner(e: &DVector<Complex64>, theta: &DVector<Complex64>) -> f64 {
    2.0 * e.dotc(theta).re
}

/// Finds a multiplier whose phase maximizer satisfies the linearized cap.
///
/// Returns 0 when the unconstrained maximizer already satisfies it.
/// Otherwise grows an upper bracket endpoint by `mu_bracket_growth`,
/// then bisects while keeping `f(hi) >= c2 > f(lo)`, stopping once the
/// upper-endpoint residual is within `bisection_tol` of the attainable
/// range of the linearized cap (or the bracket collapses to machine
/// resolution), and returns the upper endpoint so the cap is satisfied,
/// never merely approached.
pub fn solve_mu_bisection(st: &SurrogateTerms, config: &MmConfig) -> Result<f64> {
    // The residual tolerance must follow the problem's power scale: the
    // inner product ranges over [-s, s] with s the sum of coefficient
    // magnitudes, which for typical link budgets is far below 1.
    let scale = 2.0 * st.e.iter().map(|z| z.norm()).sum::<f64>();
    let tol = config.bisection_tol * scale.max(f64::MIN_POSITIVE);
    let f = |mu: f64| {
        let (t, _) = phase_argmax(&st.d, &st.e, mu);
        cap_inner(&st.e, &t)
    };
    if f(0.0) >= st.c2 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) < st.c2 {
        lo = hi;
        hi *= config.mu_bracket_growth;
        if hi > config.mu_bracket_cap {
            return Err(Error::SurrogateInfeasible(format!(
                "no multiplier below {:.3e} satisfies the linearized cap",
                config.mu_bracket_cap
            )));
        }
    }
    // Bisect; guaranteed to terminate because the midpoint eventually
    // collides with an endpoint in floating point.
    loop {
        if f(hi) - st.c2 <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= st.c2 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One full minorize-maximize update at `theta` (assumed unit-modulus
/// and feasible).
///
/// Returns the next iterate together with the multiplier used and the
/// number of degenerate (phase-pinned) entries.
pub fn mm_step(
    theta: &DVector<Complex64>,
    forms: &QuadraticForms,
    gamma: f64,
    config: &MmConfig,
) -> Result<(DVector<Complex64>, f64, usize)> {
    let st = surrogate_terms(theta, forms, gamma);
    let mu = solve_mu_bisection(&st, config)?;
    let (next, degenerate) = phase_argmax(&st.d, &st.e, mu);
    Ok((next, mu, degenerate))
}

/// Drives `theta^H B theta` down by the descent map
/// `theta <- exp(j arg((lambda_max(B) I - B) theta))` until the cap
/// `gamma` is met.
///
/// An already-feasible input is returned unchanged. Each application
/// majorizes the cap form, so the sequence of `theta^H B theta` values
/// is non-increasing; the map also stops at fixed points. Fails if the
/// cap is still violated at the iteration limit.
pub fn feasibility_restore(
    theta_init: &DVector<Complex64>,
    forms: &QuadraticForms,
    gamma: f64,
    config: &MmConfig,
) -> Result<DVector<Complex64>> {
    if forms.b_quad(theta_init) <= gamma {
        return Ok(theta_init.clone());
    }
    let lambda_b = forms.lambda_max_b();
    let mut t = unit_project(theta_init);
    for _ in 0..config.feasibility_max_iters {
        if forms.b_quad(&t) <= gamma {
            return Ok(t);
        }
        let dir = &t * Complex64::new(lambda_b, 0.0) - forms.b_mul(&t);
        let (next, _) = phase_argmax(&dir, &dir, 0.0);
        if next == t {
            break;
        }
        t = next;
    }
    if forms.b_quad(&t) <= gamma {
        Ok(t)
    } else {
        Err(Error::infeasible(format!(
            "could not drive the surface-bearing power below {:.3e} mW (reached {:.3e})",
            gamma,
            forms.b_quad(&t)
        )))
    }
}

pub(crate) fn unit_project(theta: &DVector<Complex64>) -> DVector<Complex64> {
    DVector::from_fn(theta.len(), |n, _| {
        if theta[n].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, theta[n].arg())
        }
    })
}

/// Runs the full solver on a scenario's cascade data.
///
/// Starts from `init` when given (projected to unit modulus), otherwise
/// from the phase alignment of the double-clutter cascade factor, which
/// pumps the dominant objective term. The start is restored to
/// feasibility if needed, then [`mm_step`] iterates until the objective
/// stalls or the iteration cap is hit.
pub fn solve_mm(
    coeffs: &CascadedCoefficients,
    gamma: f64,
    config: &MmConfig,
    init: Option<&DVector<Complex64>>,
) -> Result<SolverReport> {
    config.validate()?;
    if coeffs.is_empty() {
        return Err(Error::invalid("cannot solve an empty design"));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid(format!("cap must be positive, got {gamma}")));
    }
    let forms = build_quadratic_forms(coeffs);
    let mut theta = match init {
        Some(t0) => {
            if t0.len() != forms.len() {
                return Err(Error::invalid(format!(
                    "initial vector has {} entries, design has {}",
                    t0.len(),
                    forms.len()
                )));
            }
            unit_project(t0)
        }
        None => unit_project(forms.r_factor()),
    };
    theta = feasibility_restore(&theta, &forms, gamma, config)?;

    let mut objective = forms.a_quad(&theta);
    let mut mu_trace = Vec::new();
    let mut obj_trace = Vec::new();
    let mut degenerate_entries = 0;
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..config.max_outer_iters {
        let (next, mu, degenerate) = mm_step(&theta, &forms, gamma, config)?;
        iterations += 1;
        degenerate_entries += degenerate;
        let next_obj = forms.a_quad(&next);
        mu_trace.push(mu);
        obj_trace.push(next_obj);
        let delta = next_obj - objective;
        theta = next;
        let stalled = delta.abs() <= config.objective_rel_tol * objective.abs().max(f64::MIN_POSITIVE);
        objective = next_obj;
        if stalled {
            converged = true;
            break;
        }
    }

    if degenerate_entries > 0 {
        log::warn!("solver hit {degenerate_entries} degenerate phase entries in total");
    }

    Ok(SolverReport {
        power_target: forms.b_quad(&theta),
        obj_clutter: objective,
        iterations,
        converged,
        mu_trace,
        obj_trace,
        degenerate_entries,
        theta: ReflectionVector::reflect(theta).expect("unit modulus by construction"),
    })
}
