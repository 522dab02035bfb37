//! Complex integration paths used to tame the exponentially growing phases
//! of the accelerated integrands.
//!
//! Every path is parametrised by a real variable and returns the point on the
//! path together with its derivative, so `∫ f(z) dz = ∫ f(z(t)) z'(t) dt`.

use num_complex::Complex64;

pub(crate) trait Path {
    fn point(&self, t: f64) -> (Complex64, Complex64);
}

/// `z = t + i (B + H S(±(t - t0)))` with a logistic step `S`. The path runs
/// at height `B` and climbs by `H` around `t0` on the side selected by
/// `rising` (towards +∞ when true, towards -∞ otherwise).
pub(crate) struct SmoothStep {
    pub base: f64,
    pub height: f64,
    pub centre: f64,
    pub width: f64,
    pub rising: bool,
}

impl Path for SmoothStep {
    fn point(&self, t: f64) -> (Complex64, Complex64) {
        let sign = if self.rising { 1.0 } else { -1.0 };
        let x = sign * (t - self.centre) / self.width;
        let th = x.tanh();
        let s = 0.5 * (1.0 + th);
        let ds = sign * 0.5 * (1.0 - th * th) / self.width;
        (
            Complex64::new(t, self.base + self.height * s),
            Complex64::new(1.0, self.height * ds),
        )
    }
}

/// `z = r + i Y (1 - e^{-|r|/r0})`: pinned to the origin, saturating at height
/// `Y` on both sides. Mirror-symmetric, so `z(-r) = -conj(z(r))`.
pub(crate) struct Lifted {
    pub height: f64,
    pub scale: f64,
}

impl Path for Lifted {
    fn point(&self, r: f64) -> (Complex64, Complex64) {
        let e = (-r.abs() / self.scale).exp();
        let y = self.height * (-(-r.abs() / self.scale).exp_m1());
        let dy = r.signum() * self.height * e / self.scale;
        (Complex64::new(r, y), Complex64::new(1.0, dy))
    }
}
