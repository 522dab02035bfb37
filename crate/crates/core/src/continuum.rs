//! Free (1+1)D field with an infrared cutoff Λ.
//!
//! After the momentum integral the probability is a double time integral with
//! kernel `(1/4π)[E1(iΛ(e^{-at} - e^{-at'})/a) + E1(-iΛ(e^{at} - e^{at'})/a)]`.
//! Both arguments are purely imaginary for real times, so the branch cut of
//! E1 is never reached; the kernel diverges like `-ln|t - t'|` on the
//! diagonal.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cavity::{ProbabilityResult, WINDOW};
use crate::error::{Error, Result};
use crate::model::{DetectorConfig, Switching, Trajectory};
use crate::quadrature::{integrate_2d_diagonal, QuadOptions, Rect};
use crate::specfun::{gamma_inc, sinhc};

/// Default cutoff.
pub const DEFAULT_IR_CUTOFF: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumOptions {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for ContinuumOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_subdivisions: 4000,
        }
    }
}

pub fn probability_continuum(
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    ir_cutoff: f64,
) -> Result<ProbabilityResult> {
    probability_continuum_with(det, sw, traj, ir_cutoff, &ContinuumOptions::default())
}

pub fn probability_continuum_with(
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    ir_cutoff: f64,
    opts: &ContinuumOptions,
) -> Result<ProbabilityResult> {
    if !(ir_cutoff > 0.0) || !ir_cutoff.is_finite() {
        return Err(Error::Domain {
            op: "probability_continuum",
            reason: format!("IR cutoff must be positive, got {ir_cutoff}"),
        });
    }
    let sigma = sw.gaussian_width("probability_continuum")?;
    let (omega, a) = (det.gap, traj.acceleration());
    let lambda = ir_cutoff;

    let f = |u: f64, v: f64| -> Complex64 {
        if u == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        // (e^{±at} - e^{±at'})/a = ±e^{±av} u sinhc(au/2)
        let span = u * sinhc(Complex64::new(0.5 * a * u, 0.0)).re;
        let z1 = Complex64::new(0.0, -lambda * (-a * v).exp() * span);
        let z2 = Complex64::new(0.0, -lambda * (a * v).exp() * span);
        let kernel = match (gamma_inc(z1), gamma_inc(z2)) {
            (Ok(e1), Ok(e2)) => e1 + e2,
            _ => return Complex64::new(f64::NAN, 0.0),
        };
        // (t² + t'²)/2 = v² + u²/4
        let gauss = (-(v * v + 0.25 * u * u) / (sigma * sigma)).exp();
        Complex64::from_polar(gauss / (4.0 * PI), omega * u) * kernel
    };

    let half = WINDOW * sigma;
    let quad = QuadOptions::default()
        .with_rel_tol(opts.rel_tol)
        .with_abs_tol(1e-16 * sigma * sigma)
        .with_max_subdivisions(opts.max_subdivisions);
    let r = integrate_2d_diagonal(f, Rect::square(-half, half), &quad)?;
    let value = r.value.re;
    let imag_residual = r.value.im.abs();
    if !value.is_finite() {
        return Err(Error::Domain {
            op: "probability_continuum",
            reason: "kernel evaluation failed inside the window".into(),
        });
    }
    if imag_residual > (1e-6 * value.abs()).max(r.abs_error_estimate).max(1e-30) {
        return Err(Error::ImaginaryResidual { value, residual: imag_residual });
    }
    Ok(ProbabilityResult {
        value,
        error_estimate: r.abs_error_estimate,
        modes_used: 0,
        imag_residual,
        evaluations: r.evaluations,
    })
}
