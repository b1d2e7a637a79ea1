//! Exhaustive search over quantized phase vectors at tiny sizes.
//!
//! Ground truth for solver validation: every `theta` with entries drawn
//! from the `levels`-point phase grid is evaluated against both
//! quadratic forms and the best feasible objective wins. Useless beyond
//! toy sizes by design; the budget guard keeps it that way.

use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::forms::QuadraticForms;
use crate::power::ReflectionVector;

/// Winner of an exhaustive enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// Best feasible grid point.
    pub theta: ReflectionVector,
    /// Its clutter-bearing power `theta^H A theta` (mW).
    pub objective: f64,
    /// How many enumerated points satisfied the cap.
    pub feasible_count: u64,
    /// Total points enumerated.
    pub total_count: u64,
}

/// Budget guard: enumerations beyond this many points are refused.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// Evaluates every `theta` with `theta_n = exp(j 2 pi k_n / levels)` and
/// returns the feasible point with the largest `theta^H A theta`.
///
/// With `pin_first` the first entry stays at phase 0, cutting work by a
/// factor of `levels`; both forms are invariant to a global phase, so
/// the optimal objective is unchanged.
pub fn enumerate_best(
    forms: &QuadraticForms,
    gamma: f64,
    levels: u32,
    pin_first: bool,
) -> Result<BruteForceResult> {
    let n = forms.len();
    if n == 0 {
        return Err(Error::invalid("cannot enumerate an empty design"));
    }
    if levels < 2 {
        return Err(Error::invalid(format!("need at least 2 phase levels, got {levels}")));
    }
    if !(gamma > 0.0) {
        return Err(Error::invalid(format!("cap must be positive, got {gamma}")));
    }
    let free = if pin_first { n - 1 } else { n };
    let total = (levels as u64)
        .checked_pow(free as u32)
        .filter(|&t| t <= ENUMERATION_BUDGET)
        .ok_or_else(|| {
            Error::invalid(format!(
                "enumeration of {levels}^{free} points exceeds the {ENUMERATION_BUDGET} budget"
            ))
        })?;

    let phases: Vec<Complex64> = (0..levels)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / levels as f64))
        .collect();

    let mut digits = vec![0u32; free];
    let mut theta = DVector::from_element(n, phases[0]);
    let offset = n - free;
    let mut best: Option<(DVector<Complex64>, f64)> = None;
    let mut feasible_count = 0u64;

    for _ in 0..total {
        for (i, &d) in digits.iter().enumerate() {
            theta[offset + i] = phases[d as usize];
        }
        if forms.b_quad(&theta) <= gamma {
            feasible_count += 1;
            let obj = forms.a_quad(&theta);
            let better = match &best {
                Some((_, cur)) => obj > *cur,
                None => true,
            };
            if better {
                best = Some((theta.clone(), obj));
            }
        }
        // Odometer increment over the free digits.
        for d in digits.iter_mut() {
            *d += 1;
            if *d < levels {
                break;
            }
            *d = 0;
        }
    }

    match best {
        Some((theta, objective)) => Ok(BruteForceResult {
            theta: ReflectionVector::reflect(theta).expect("grid phases are unit modulus"),
            objective,
            feasible_count,
            total_count: total,
        }),
        None => Err(Error::infeasible(format!(
            "none of the {total} enumerated points satisfies the {gamma:.3e} mW cap"
        ))),
    }
}
