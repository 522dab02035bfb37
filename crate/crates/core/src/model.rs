//! Detector, switching, trajectory and field-space descriptions.
//!
//! Natural units ħ = c = k_B = 1. The coupling λ never appears at runtime:
//! every probability and rate is reported in units of λ².

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::exprel;

/// Accelerations below this use the Taylor branches of the trajectory.
pub const A_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Energy gap Ω; negative values probe de-excitation.
    pub gap: f64,
}

impl DetectorConfig {
    pub fn new(gap: f64) -> Result<Self> {
        if !gap.is_finite() {
            return Err(Error::invalid(format!("detector gap must be finite, got {gap}")));
        }
        Ok(Self { gap })
    }

    pub fn with_gap(self, gap: f64) -> Self {
        Self { gap }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Switching {
    /// χ(τ) = exp(-τ²/2σ²).
    Gaussian { sigma: f64 },
    /// Coupling on during [0, duration].
    Sudden { duration: f64 },
}

impl Switching {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!("Gaussian width must be positive, got {sigma}")));
        }
        Ok(Switching::Gaussian { sigma })
    }

    pub fn sudden(duration: f64) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::invalid(format!("switching duration must be positive, got {duration}")));
        }
        Ok(Switching::Sudden { duration })
    }

    pub fn profile(&self, tau: f64) -> f64 {
        match *self {
            Switching::Gaussian { sigma } => (-tau * tau / (2.0 * sigma * sigma)).exp(),
            Switching::Sudden { duration } => {
                if (0.0..=duration).contains(&tau) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub(crate) fn gaussian_width(&self, op: &str) -> Result<f64> {
        match *self {
            Switching::Gaussian { sigma } => Ok(sigma),
            Switching::Sudden { .. } => Err(Error::invalid(format!("{op} requires Gaussian switching"))),
        }
    }
}

/// Uniformly accelerated worldline t = sinh(aτ)/a, x = (cosh(aτ) - 1)/a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    acceleration: f64,
}

impl Trajectory {
    pub fn new(acceleration: f64) -> Result<Self> {
        if !(acceleration >= 0.0) || !acceleration.is_finite() {
            return Err(Error::invalid(format!(
                "proper acceleration must be finite and non-negative, got {acceleration}"
            )));
        }
        Ok(Self { acceleration })
    }

    pub fn inertial() -> Self {
        Self { acceleration: 0.0 }
    }

    pub fn acceleration(&self) -> f64 {
        self.acceleration
    }

    pub fn uses_series_branch(&self) -> bool {
        self.acceleration < A_MIN
    }

    pub fn coords(&self, tau: f64) -> (f64, f64) {
        trajectory_coords(self.acceleration, tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpace {
    /// Periodic cavity of circumference L; modes k = 2πm/L, m ≠ 0.
    Cavity { circumference: f64 },
    /// Free (1+1)D field with infrared cutoff Λ.
    Continuum { ir_cutoff: f64 },
}

impl FieldSpace {
    pub fn cavity(circumference: f64) -> Result<Self> {
        if !(circumference > 0.0) || !circumference.is_finite() {
            return Err(Error::invalid(format!("circumference must be positive, got {circumference}")));
        }
        Ok(FieldSpace::Cavity { circumference })
    }

    pub fn continuum(ir_cutoff: f64) -> Result<Self> {
        if !(ir_cutoff > 0.0) || !ir_cutoff.is_finite() {
            return Err(Error::invalid(format!("IR cutoff must be positive, got {ir_cutoff}")));
        }
        Ok(FieldSpace::Continuum { ir_cutoff })
    }
}

/// Mode label m = -εn of a cavity mode. The zero mode is unrepresentable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex {
    n: u64,
    epsilon: i8,
}

impl ModeIndex {
    pub fn from_m(m: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("the zero mode is excluded"));
        }
        Ok(Self {
            n: m.unsigned_abs(),
            epsilon: if m < 0 { 1 } else { -1 },
        })
    }

    pub fn new(n: u64, epsilon: i8) -> Result<Self> {
        if n == 0 || !(epsilon == 1 || epsilon == -1) {
            return Err(Error::invalid(format!("need n ≥ 1 and ε = ±1, got n={n}, ε={epsilon}")));
        }
        Ok(Self { n, epsilon })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    pub fn m(&self) -> i64 {
        -(self.epsilon as i64) * self.n as i64
    }
}

/// Iterates the modes with |m| = 1..=n_max for one mover direction.
pub fn modes(n_max: u64, epsilon: i8) -> impl Iterator<Item = ModeIndex> {
    (1..=n_max).map(move |n| ModeIndex { n, epsilon })
}

/// (t, x) at proper time τ.
pub fn trajectory_coords(a: f64, tau: f64) -> (f64, f64) {
    if a < A_MIN {
        coords_series(a, tau)
    } else {
        coords_exact(a, tau)
    }
}

fn coords_series(a: f64, tau: f64) -> (f64, f64) {
    let t = tau + a * a * tau.powi(3) / 6.0;
    let x = a * tau * tau / 2.0 + a.powi(3) * tau.powi(4) / 24.0;
    (t, x)
}

fn coords_exact(a: f64, tau: f64) -> (f64, f64) {
    let h = (0.5 * a * tau).sinh();
    ((a * tau).sinh() / a, 2.0 * h * h / a)
}

/// `(e^{εaτ} - 1)/a`, continuous through a = 0 and valid for complex τ.
pub fn rindler_displacement(epsilon: f64, a: f64, tau: Complex64) -> Complex64 {
    if a < A_MIN {
        displacement_series(epsilon, a, tau)
    } else {
        tau * epsilon * exprel(epsilon * a * tau)
    }
}

// τ(ε + aτ/2 + εa²τ²/6 + a³τ³/24)
fn displacement_series(epsilon: f64, a: f64, tau: Complex64) -> Complex64 {
    let at = a * tau;
    tau * (epsilon + at * (0.5 + at * (epsilon / 6.0 + at / 24.0)))
}

/// Cavity phase 2πn (ε/(aL)) (e^{εaτ} - 1) in radians.
pub fn phase_cavity(n: u64, epsilon: i8, a: f64, circumference: f64, tau: f64) -> f64 {
    let eps = epsilon as f64;
    let disp = rindler_displacement(eps, a, Complex64::new(tau, 0.0)).re;
    std::f64::consts::TAU * n as f64 * eps * disp / circumference
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn coords_examples() {
        assert_eq!(trajectory_coords(1.0, 0.0), (0.0, 0.0));
        assert_eq!(trajectory_coords(0.0, 2.0), (2.0, 0.0));
        let (t, x) = trajectory_coords(1.0, 1.0);
        assert!((t - 1.175_201_2).abs() < 1e-7);
        assert!((x - 0.543_080_6).abs() < 1e-7);
    }

    #[test]
    fn coords_branch_seam() {
        let a = A_MIN;
        for k in -40..=40 {
            let tau = k as f64 * 0.5;
            let (t1, x1) = coords_series(a, tau);
            let (t2, x2) = coords_exact(a, tau);
            assert!((t1 - t2).abs() <= 1e-12 * t2.abs().max(1.0));
            assert!((x1 - x2).abs() <= 1e-12 * x2.abs().max(1e-6), "τ={tau}: {x1} vs {x2}");
        }
    }

    #[test]
    fn phase_examples() {
        assert!((phase_cavity(1, 1, 1e-9, 20.0, 1.0) - PI / 10.0).abs() < 1e-9);
        let expected = 2.0 * PI / 20.0 * (1f64.exp() - 1.0);
        assert!((phase_cavity(1, 1, 1.0, 20.0, 1.0) - expected).abs() < 1e-12);
        assert!((expected - 0.539_814_157).abs() < 1e-9);
        assert_eq!(phase_cavity(2, -1, 1.0, 20.0, 0.0), 0.0);
    }

    #[test]
    fn phase_inertial_limit_is_continuous() {
        for eps in [1i8, -1] {
            for tau in [-3.0, -0.5, 0.7, 4.0] {
                let t = Complex64::new(tau, 0.0);
                let e = eps as f64;
                let below = displacement_series(e, A_MIN, t);
                let above = t * e * exprel(e * A_MIN * t);
                assert!((below - above).norm() < 1e-12 * tau.abs());
                let inertial = 2.0 * PI * 3.0 * tau / 50.0;
                assert!((phase_cavity(3, eps, 0.0, 50.0, tau) - inertial).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mode_index_excludes_zero() {
        assert!(ModeIndex::from_m(0).is_err());
        let m = ModeIndex::from_m(-3).unwrap();
        assert_eq!((m.n(), m.epsilon(), m.m()), (3, 1, -3));
        assert!(modes(5, -1).all(|k| k.m() != 0));
    }

    #[test]
    fn constructors_validate() {
        assert!(Trajectory::new(-1.0).is_err());
        assert!(Switching::gaussian(0.0).is_err());
        assert!(Switching::sudden(-1.0).is_err());
        assert!(FieldSpace::cavity(-5.0).is_err());
        assert!(FieldSpace::continuum(0.0).is_err());
        assert!(DetectorConfig::new(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn hyperbola_identity(a in 0.01f64..10.0, tau in -10.0f64..10.0) {
            let (t, x) = trajectory_coords(a, tau);
            let lhs = t * t - (x + 1.0 / a).powi(2);
            let scale = (t * t).max(1.0 / (a * a));
            prop_assert!((lhs + 1.0 / (a * a)).abs() <= 1e-10 * scale);
        }

        #[test]
        fn phase_vanishes_at_origin(n in 1u64..1000, a in 0.0f64..5.0, l in 1.0f64..500.0) {
            prop_assert_eq!(phase_cavity(n, 1, a, l, 0.0), 0.0);
            prop_assert_eq!(phase_cavity(n, -1, a, l, 0.0), 0.0);
        }
    }
}
