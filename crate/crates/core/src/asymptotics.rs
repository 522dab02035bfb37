//! Small-σ model of the cavity probability.
//!
//! For short interactions the n-th mode contributes roughly
//! `(σ/n) |∫₋₁¹ dη e^{ixη + iyη²}|²` with `x = σ(Ω + 2πn/L)` and
//! `y = 2πn a σ²/L`. The normalisation is not fixed, so everything here is
//! meant for trend and sign comparisons against [`crate::cavity`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::DetectorConfig;
use crate::quadrature::{integrate_1d, QuadOptions};
use crate::specfun::{erfi_split, ComplexValue};

/// Below this |y| the segment integral is evaluated by quadrature.
pub const CLOSED_FORM_MIN_Y: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    pub x: f64,
    pub y: f64,
}

impl AsymptoticParams {
    pub fn new(det: &DetectorConfig, sigma: f64, a: f64, circumference: f64, n: u64) -> Self {
        let k = 2.0 * PI * n as f64 / circumference;
        Self {
            x: sigma * (det.gap + k),
            y: k * a * sigma * sigma,
        }
    }

    pub fn segment(&self) -> ComplexValue {
        segment_integral(self.x, self.y)
    }
}

/// `∫₋₁¹ dη e^{ixη + iyη²}`.
pub fn segment_integral(x: f64, y: f64) -> ComplexValue {
    if y.abs() < CLOSED_FORM_MIN_Y {
        segment_quadrature(x, y)
    } else {
        segment_closed_form(x, y)
    }
}

fn segment_quadrature(x: f64, y: f64) -> Complex64 {
    let opts = QuadOptions::default().with_rel_tol(1e-13).with_abs_tol(1e-15);
    match integrate_1d(|e| Complex64::from_polar(1.0, e * (x + y * e)), -1.0, 1.0, &opts, None) {
        Ok(r) => r.value,
        Err(Error::NonConvergence { best, .. }) => best,
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    }
}

/// Completing the square, `iyη² + ixη = c²s² - ix²/4y` with `c² = iy` and
/// `s = η + x/2y`, so the integral is `(√π/2c) e^{-ix²/4y} [erfi(c s₊) - erfi(c s₋)]`.
/// The large phases `e^{c²s²}` and `e^{-ix²/4y}` are combined before evaluation.
fn segment_closed_form(x: f64, y: f64) -> Complex64 {
    let c = Complex64::new(0.0, y).sqrt();
    let shift = x / (2.0 * y);
    let (k_hi, g_hi) = erfi_split(c * (1.0 + shift));
    let (k_lo, g_lo) = erfi_split(c * (shift - 1.0));
    let mut bracket = Complex64::from_polar(1.0, y + x) * g_hi - Complex64::from_polar(1.0, y - x) * g_lo;
    if k_hi != k_lo {
        bracket += Complex64::from_polar(1.0, -x * shift / 2.0) * (k_hi - k_lo);
    }
    bracket * PI.sqrt() / (2.0 * c)
}

/// Partial sum `Σ_{n=1}^{n_max} (σ/n) |segment_integral(xₙ, yₙ)|²`.
pub fn small_sigma_probability(
    det: &DetectorConfig,
    sigma: f64,
    a: f64,
    circumference: f64,
    n_max: u64,
) -> Result<f64> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    if !(sigma > 0.0) || !(circumference > 0.0) || !(a >= 0.0) {
        return Err(Error::invalid(format!(
            "need σ > 0, L > 0, a ≥ 0; got σ = {sigma}, L = {circumference}, a = {a}"
        )));
    }
    Ok((1..=n_max)
        .map(|n| sigma / n as f64 * AsymptoticParams::new(det, sigma, a, circumference, n).segment().norm_sqr())
        .sum())
}

/// Last mode with `σk ≤ 2`, i.e. `⌊L/(πσ)⌋`. A Gaussian switching of width σ
/// weights higher modes by less than `e^{-σ²k²} < e^{-4}`, while the sharp
/// window of the model does not suppress them at all.
pub fn gaussian_mode_cutoff(sigma: f64, circumference: f64) -> u64 {
    ((circumference / (PI * sigma)).floor() as u64).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(value: f64, zero_band: f64) -> Self {
        if value > zero_band {
            Sign::Positive
        } else if value < -zero_band {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeSign {
    /// Sign of the large-x formula.
    pub formula: Sign,
    pub formula_value: f64,
    /// Sign of a central difference of `|segment_integral|²` in y.
    pub numerical: Sign,
    pub numerical_value: f64,
}

/// Sign of `∂y |∫₋₁¹ e^{ixη+iyη²} dη|²` from the large-x expression
/// `32y((x²+4y²)cos²x + 2x²sin²x)/(x²-4y²)³`, alongside a numerical derivative.
pub fn dy_derivative_sign(x: f64, y: f64) -> Result<DerivativeSign> {
    if (x - 2.0 * y).abs() < 1e-6 {
        return Err(Error::Domain {
            op: "dy_derivative_sign",
            reason: format!("x = {x} is at the pole x = 2y"),
        });
    }
    let (x2, y2) = (x * x, y * y);
    let (c, s) = (x.cos(), x.sin());
    let formula_value = 32.0 * y * ((x2 + 4.0 * y2) * c * c + 2.0 * x2 * s * s) / (x2 - 4.0 * y2).powi(3);

    let h = 1e-4 * y.abs().max(1.0);
    let numerical_value =
        (segment_integral(x, y + h).norm_sqr() - segment_integral(x, y - h).norm_sqr()) / (2.0 * h);

    Ok(DerivativeSign {
        formula: Sign::of(formula_value, 0.0),
        formula_value,
        numerical: Sign::of(numerical_value, 1e-9),
        numerical_value,
    })
}

/// `a* = ΩL/(4πnσ)`: the n-th term grows with acceleration while `a < a*`.
pub fn unruh_threshold(omega: f64, n: u64, sigma: f64, circumference: f64) -> f64 {
    omega * circumference / (4.0 * PI * n as f64 * sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn trivial_values() {
        assert!(close(segment_integral(0.0, 0.0), Complex64::new(2.0, 0.0), 1e-14));
        for x in [0.3f64, 2.0, 7.5, -11.0] {
            let expected = 2.0 * x.sin() / x;
            assert!(close(segment_integral(x, 0.0), Complex64::new(expected, 0.0), 1e-13));
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for (x, y) in [(3.0, 1.0), (0.0, 5.0), (-4.0, 0.2), (19.0, -20.0), (40.0, 1e-5), (2.0, 1.0)] {
            let cf = segment_closed_form(x, y);
            let q = segment_quadrature(x, y);
            assert!(close(cf, q, 1e-10), "({x}, {y}): {cf} vs {q}");
        }
    }

    #[test]
    fn branches_agree_at_seam() {
        for x in [-15.0, -1.0, 0.0, 0.5, 12.0] {
            for y in [CLOSED_FORM_MIN_Y, -CLOSED_FORM_MIN_Y] {
                assert!(close(segment_closed_form(x, y), segment_quadrature(x, y), 1e-10));
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let d = dy_derivative_sign(5.0, 1.0).unwrap();
        assert_eq!(d.formula, Sign::Positive);
        let d = dy_derivative_sign(5.0, 0.0).unwrap();
        assert_eq!(d.formula, Sign::Zero);
        assert_eq!(d.numerical, Sign::Zero);
        assert!(dy_derivative_sign(2.0, 1.0).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert!((unruh_threshold(2.0, 1, 0.4, 200.0) - 79.577471545947667).abs() < 1e-9);
        assert!((unruh_threshold(0.1, 1, 0.4, 200.0) - 3.978873577297384).abs() < 1e-9);
        assert!((unruh_threshold(0.1, 2, 0.4, 200.0) * 2.0 - unruh_threshold(0.1, 1, 0.4, 200.0)).abs() < 1e-12);
    }

    #[test]
    fn first_term_peaks_near_quarter_period() {
        // a = 0: n = 1 term ∝ σ sin²x/x², maximal where tan x = 2x
        let det = DetectorConfig::new(1.0).unwrap();
        let (l, n) = (200.0, 1);
        let term = |s: f64| s * AsymptoticParams::new(&det, s, 0.0, l, n).segment().norm_sqr();
        let grid: Vec<f64> = (1..=300).map(|i| i as f64 * 0.01).collect();
        let best = grid
            .iter()
            .copied()
            .max_by(|p, q| term(*p).total_cmp(&term(*q)))
            .unwrap();
        let x = AsymptoticParams::new(&det, best, 0.0, l, n).x;
        assert!((x - 1.1656).abs() < 0.02, "peak at x = {x}");
        assert!((x - PI / 2.0).abs() < 0.5);
    }

    #[test]
    fn acceleration_suppresses_low_gap_term() {
        let det = DetectorConfig::new(0.1).unwrap();
        let mut last = f64::INFINITY;
        for a in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let v = AsymptoticParams::new(&det, 0.4, a, 200.0, 1).segment().norm_sqr();
            assert!(v < last, "a = {a}");
            last = v;
        }
    }

    #[test]
    fn cutoff_tracks_window() {
        assert_eq!(gaussian_mode_cutoff(0.3, 200.0), 212);
        assert_eq!(gaussian_mode_cutoff(100.0, 1.0), 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let det = DetectorConfig::new(1.0).unwrap();
        assert!(small_sigma_probability(&det, 0.3, 1.0, 200.0, 0).is_err());
        assert!(small_sigma_probability(&det, -0.3, 1.0, 200.0, 5).is_err());
        assert!(small_sigma_probability(&det, 0.3, 1.0, 200.0, 5).unwrap() > 0.0);
    }

    proptest! {
        #[test]
        fn conjugation(x in -20.0f64..20.0, y in -20.0f64..20.0) {
            let p = segment_integral(x, y);
            let m = segment_integral(-x, -y);
            prop_assert!(close(m, p.conj(), 1e-12));
        }

        #[test]
        fn bounded_by_two(x in -20.0f64..20.0, y in -20.0f64..20.0) {
            prop_assert!(segment_integral(x, y).norm() <= 2.0 + 1e-12);
        }
    }
}
