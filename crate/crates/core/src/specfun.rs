//! Complex special functions used by the continuum kernel and the
//! small-σ model: the exponential integral E1, the imaginary error function,
//! and a stable `log(1 - e^{iθ})`.
//!
//! Everything here is a pure function of its argument.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::composite_kronrod;

pub type ComplexValue = Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// |z| at which `gamma_inc` switches from the power series to the continued
/// fraction.
pub const E1_SERIES_RADIUS: f64 = 4.0;

/// Below this reduced angle `log_one_minus_exp` uses its small-angle expansion.
pub const SMALL_ANGLE: f64 = 1e-4;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Upper exponential integral `E1(z) = ∫_z^∞ e^{-k}/k dk` on the principal
/// branch (cut along the negative real axis).
pub fn gamma_inc(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain {
            op: "gamma_inc",
            reason: format!("non-finite argument {z}"),
        });
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Divergence { op: "gamma_inc", at: 0.0 });
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut { op: "gamma_inc", z });
    }
    if z.norm() < E1_SERIES_RADIUS {
        Ok(e1_series(z))
    } else {
        Ok(e1_continued_fraction(z))
    }
}

/// `E1(z) = -γ - ln z - Σ_{k≥1} (-z)^k / (k·k!)`.
pub fn e1_series(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..500 {
        let kf = k as f64;
        term *= -z / kf;
        let add = term / kf;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// Modified Lentz evaluation of
/// `E1(z) = e^{-z} / (z + 1 - 1²/(z + 3 - 2²/(z + 5 - …)))`.
pub fn e1_continued_fraction(z: Complex64) -> Complex64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..20_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = d.inv();
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}

/// Imaginary error function `erfi(z) = -i erf(iz)`.
///
/// Taylor series for |z| < 1, Kronrod quadrature of `(2/√π) e^{t²}` along the
/// ray from 0 to z for 1 ≤ |z| < 6, asymptotic series beyond.
pub fn erfi(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain {
            op: "erfi",
            reason: format!("non-finite argument {z}"),
        });
    }
    let z2 = z * z;
    if z2.re > 700.0 {
        return Err(Error::Overflow {
            op: "erfi",
            z,
            reason: format!("Re z² = {:.1} exceeds the exponent range", z2.re),
        });
    }
    let r = z.norm();
    let value = if r < 1.0 {
        erfi_taylor(z)
    } else if r < 6.0 {
        erfi_ray(z)
    } else {
        erfi_asymptotic(z)
    };
    Ok(value)
}

fn erfi_taylor(z: Complex64) -> Complex64 {
    // (2/√π) Σ z^{2k+1} / (k! (2k+1))
    let z2 = z * z;
    let mut power = z;
    let mut sum = z;
    for k in 1..60 {
        power *= z2 / k as f64;
        let add = power / (2 * k + 1) as f64;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

fn erfi_ray(z: Complex64) -> Complex64 {
    let integral = composite_kronrod(|s| (z * z * s * s).exp(), 0.0, 1.0, 32);
    integral * z * FRAC_2_SQRT_PI
}

fn erfi_asymptotic(z: Complex64) -> Complex64 {
    let (constant, scaled) = erfi_split(z);
    constant + (z * z).exp() * scaled
}

/// `erfi(z) = c + e^{z²} g(z)`, with `c = ±i` and `g` from the asymptotic
/// series for |z| ≥ 6, and `c = 0`, `g = e^{-z²} erfi(z)` below.
pub(crate) fn erfi_split(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 6.0 {
        let value = if z.norm() < 1.0 { erfi_taylor(z) } else { erfi_ray(z) };
        return (Complex64::new(0.0, 0.0), value * (-z * z).exp());
    }
    let constant = if z.im > 0.0 {
        I
    } else if z.im < 0.0 {
        -I
    } else {
        Complex64::new(0.0, 0.0)
    };
    let inv2z2 = (2.0 * z * z).inv();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let next = term * (2 * k - 1) as f64 * inv2z2;
        let size = next.norm();
        if size >= prev {
            break;
        }
        sum += next;
        term = next;
        prev = size;
        if size < 1e-17 * sum.norm() {
            break;
        }
    }
    (constant, sum / (PI.sqrt() * z))
}

/// Principal `log(1 - e^{iθ})` for real θ.
///
/// Fails with a divergence when θ is a multiple of 2π.
pub fn log_one_minus_exp(theta: f64) -> Result<Complex64> {
    if !theta.is_finite() {
        return Err(Error::Domain {
            op: "log_one_minus_exp",
            reason: format!("non-finite phase {theta}"),
        });
    }
    let r = reduce_phase(theta);
    if r == 0.0 {
        return Err(Error::Divergence {
            op: "log_one_minus_exp",
            at: theta,
        });
    }
    if r.abs() < SMALL_ANGLE {
        return Ok(log_one_minus_exp_small(Complex64::new(r, 0.0)));
    }
    // 1 - e^{ir} = -2i sin(r/2) e^{ir/2}
    let re = (2.0 * (0.5 * r).sin()).abs().ln();
    let im = 0.5 * (r - PI * r.signum());
    Ok(Complex64::new(re, im))
}

/// `log(1 - e^{iθ})` for complex θ with `Im θ ≥ 0`, as met on deformed
/// integration contours. Returns a non-finite value at θ ∈ 2πℤ.
pub fn log_one_minus_exp_complex(theta: Complex64) -> Complex64 {
    if theta.im > 40.0 {
        // |e^{iθ}| < 5e-18
        return -(I * theta).exp();
    }
    let w = Complex64::new(reduce_phase(theta.re), theta.im);
    if w.norm() < SMALL_ANGLE {
        return log_one_minus_exp_small(w);
    }
    (-expm1(I * w)).ln()
}

/// `log(-iw) + iw/2 - w²/24 + O(w⁴)`.
fn log_one_minus_exp_small(w: Complex64) -> Complex64 {
    (-I * w).ln() + 0.5 * I * w - w * w / 24.0
}

/// Reduces a phase to (-π, π].
pub fn reduce_phase(theta: f64) -> f64 {
    let mut r = theta - TAU * (theta / TAU).round();
    if r <= -PI {
        r += TAU;
    } else if r > PI {
        r -= TAU;
    }
    r
}

/// `e^z - 1` without cancellation for small |z|.
pub fn expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let em1 = z.re.exp_m1();
    let half = (0.5 * z.im).sin();
    Complex64::new(em1 * c - 2.0 * half * half, z.re.exp() * s)
}

/// `(e^z - 1)/z`, equal to 1 at z = 0.
pub fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0))
    } else {
        expm1(z) / z
    }
}

/// `sinh(z)/z`, equal to 1 at z = 0.
pub fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 + z2 * (1.0 / 6.0 + z2 / 120.0)
    } else {
        z.sinh() / z
    }
}
