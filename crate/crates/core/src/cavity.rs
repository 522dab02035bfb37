//! Accelerated detector in a periodic cavity: mode amplitudes, the mode-sum
//! probability, the equivalent log-kernel double integral, and the
//! sudden-switching rate.
//!
//! Both probability formulations integrate along complex contours. For large
//! `aσ` the phase `2πn(e^{aτ} - 1)/(aL)` grows doubly exponentially inside the
//! Gaussian window and a real-axis rule cannot resolve it; lifting the path
//! into the upper half plane turns that phase into exponential damping.

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contour::{Lifted, Path, SmoothStep};
use crate::error::{Error, Result};
use crate::model::{rindler_displacement, DetectorConfig, ModeIndex, Switching, Trajectory, A_MIN};
use crate::quadrature::{integrate_1d, QuadOptions, QuadResult, SingularitySpec};
use crate::specfun::{log_one_minus_exp, log_one_minus_exp_complex, reduce_phase, sinhc};

/// Half-width of the Gaussian window in units of σ. The neglected weight is
/// below e^{-50}.
pub const WINDOW: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityResult {
    /// Probability in units of λ².
    pub value: f64,
    pub error_estimate: f64,
    /// Modes summed explicitly (zero for integral formulations).
    pub modes_used: u64,
    pub imag_residual: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMode {
    /// Add `∫_{N+½}^∞ |I(x)|² dx` plus its Euler–Maclaurin correction.
    Integral,
    /// Plain partial sums.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSumOptions {
    /// Stop doubling N once the estimate changes by less than this.
    pub rel_tol: f64,
    /// Relative tolerance of each amplitude integral.
    pub amplitude_tol: f64,
    pub initial_modes: u64,
    pub max_modes: u64,
    pub tail: TailMode,
}

impl Default for ModeSumOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            amplitude_tol: 1e-10,
            initial_modes: 32,
            max_modes: 1 << 20,
            tail: TailMode::Integral,
        }
    }
}

/// Parameters of one Gaussian-switched amplitude, with a real mode number so
/// the tail integral can treat n as continuous.
#[derive(Debug, Clone, Copy)]
struct Amplitude {
    omega: f64,
    sigma: f64,
    a: f64,
    circumference: f64,
}

impl Amplitude {
    fn new(det: &DetectorConfig, sw: &Switching, traj: &Trajectory, circumference: f64, op: &str) -> Result<Self> {
        let sigma = sw.gaussian_width(op)?;
        if !(circumference > 0.0) || !circumference.is_finite() {
            return Err(Error::invalid(format!("circumference must be positive, got {circumference}")));
        }
        Ok(Self {
            omega: det.gap,
            sigma,
            a: traj.acceleration(),
            circumference,
        })
    }

    /// `∫ dτ exp(iΩτ + 2πinε(e^{εaτ}-1)/(aL) - τ²/2σ²) / √(4πn)`.
    fn eval(&self, n: f64, epsilon: f64, tol: f64) -> Result<QuadResult> {
        let Self { omega, sigma, a, circumference } = *self;
        let k = TAU * n / circumference;
        // Where e^{εaz} is small the phase is dominated by the constant -kε/a,
        // whose rounding would otherwise dominate the integrand. That constant
        // is pulled out as a global factor; elsewhere the integrand carries
        // its inverse so both forms share one normalisation.
        let constant = if a < A_MIN { 0.0 } else { reduce_phase(k / a) * epsilon };
        let restore = Complex64::from_polar(1.0, constant);
        let integrand = |z: Complex64| {
            let gauss = Complex64::i() * omega * z - z * z / (2.0 * sigma * sigma);
            if a >= A_MIN {
                let w = (epsilon * a * z).exp();
                if w.norm() < 0.5 {
                    return (gauss + Complex64::i() * (k * epsilon / a) * w).exp();
                }
            }
            let phase = k * epsilon * rindler_displacement(epsilon, a, z);
            (gauss + Complex64::i() * phase).exp() * restore
        };
        let opts = QuadOptions::default()
            .with_rel_tol(tol)
            .with_abs_tol(1e-20 * sigma);
        let half = WINDOW * sigma;
        // Gaussian saddle of e^{i(Ω+k)z - z²/2σ²}; on this line the integrand
        // is no larger than the result and cancellation disappears
        let mut base = (sigma * sigma * (omega + k)).clamp(0.0, 12.0 * sigma);
        let path = if a < A_MIN {
            SmoothStep { base, height: 0.0, centre: 0.0, width: 1.0, rising: true }
        } else {
            // beyond the onset k e^{±aτ} > a the phase outruns its own scale
            let onset = -(k / a).ln() / a;
            let ceiling = 0.5 * PI / a;
            base = base.min(ceiling);
            SmoothStep {
                base,
                height: (ceiling.min(2.0 * sigma) - base).max(0.0),
                centre: epsilon * onset,
                width: (0.5 / a).max(0.3 * sigma),
                rising: epsilon > 0.0,
            }
        };
        let r = along(&path, integrand, -half, half, &opts)?;
        let norm = (4.0 * PI * n).sqrt();
        Ok(QuadResult {
            value: r.value / restore / norm,
            abs_error_estimate: r.abs_error_estimate / norm,
            evaluations: r.evaluations,
        })
    }

    /// |I|² and an error bound for it. A stalled amplitude is accepted when
    /// its bound is within 1e-8 of its value, or when the implied error on
    /// |I|² is below `budget`; the bound is carried into the error estimate.
    fn squared(&self, n: f64, tol: f64, budget: f64) -> Result<(f64, f64, usize)> {
        let norm = (4.0 * PI * n).sqrt();
        let r = match self.eval(n, 1.0, tol) {
            Ok(r) => r,
            Err(Error::NonConvergence { best, bound, subdivisions })
                if bound <= 1e-8 * best.norm()
                    || (2.0 * best.norm() + bound) * bound / (norm * norm) <= budget =>
            {
                QuadResult {
                    value: best / norm,
                    abs_error_estimate: bound / norm,
                    evaluations: 21 * (2 * subdivisions + 1),
                }
            }
            Err(e) => return Err(e),
        };
        let m = r.value.norm();
        let e = r.abs_error_estimate;
        Ok((m * m, 2.0 * m * e + e * e, r.evaluations))
    }
}

fn along<P, F>(path: &P, f: F, lo: f64, hi: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    P: Path,
    F: Fn(Complex64) -> Complex64,
{
    integrate_1d(
        |t| {
            let (z, dz) = path.point(t);
            f(z) * dz
        },
        lo,
        hi,
        opts,
        None,
    )
}

/// Mode amplitude `I₊,m` for Gaussian switching; `m ≠ 0`.
pub fn mode_amplitude(
    m: i64,
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    circumference: f64,
) -> Result<Complex64> {
    let mode = ModeIndex::from_m(m)?;
    let amp = Amplitude::new(det, sw, traj, circumference, "mode_amplitude")?;
    Ok(amp.eval(mode.n() as f64, mode.epsilon() as f64, 1e-10)?.value)
}

/// Transition probability as `2 Σ_{n>0} |I_n|²` with default options.
pub fn probability_modesum(
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    circumference: f64,
) -> Result<ProbabilityResult> {
    probability_modesum_with(det, sw, traj, circumference, &ModeSumOptions::default())
}

pub fn probability_modesum_with(
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    circumference: f64,
    opts: &ModeSumOptions,
) -> Result<ProbabilityResult> {
    let amp = Amplitude::new(det, sw, traj, circumference, "probability_modesum")?;
    if opts.initial_modes == 0 || opts.max_modes < opts.initial_modes {
        return Err(Error::invalid("need 1 ≤ initial_modes ≤ max_modes"));
    }
    let tol = opts.amplitude_tol;

    let mut terms: Vec<(f64, f64, usize)> = Vec::new();
    let extend = |upto: u64, terms: &mut Vec<(f64, f64, usize)>, budget: f64| -> Result<()> {
        let from = terms.len() as u64 + 1;
        let fresh: Result<Vec<_>> = (from..=upto)
            .into_par_iter()
            .map(|n| amp.squared(n as f64, tol, budget))
            .collect();
        terms.extend(fresh?);
        Ok(())
    };
    let estimate = |terms: &[(f64, f64, usize)]| -> Result<(f64, f64, usize)> {
        let (mut sum, mut err, mut evals) = (0.0, 0.0, 0);
        for &(v, e, k) in terms {
            sum += v;
            err += e;
            evals += k;
        }
        if opts.tail == TailMode::Integral {
            let (t, te, tk) = tail_integral(&amp, terms.len() as f64 + 0.5, sum, tol, 1e-14 * sum)?;
            sum += t;
            err += te;
            evals += tk;
        }
        Ok((2.0 * sum, 2.0 * err, evals))
    };

    let mut n = opts.initial_modes;
    extend(n, &mut terms, 0.0)?;
    let mut prev = estimate(&terms)?;
    let budget = 1e-14 * prev.0.abs();
    loop {
        let next_n = (2 * n).min(opts.max_modes);
        if next_n == n {
            let direct: f64 = terms.iter().map(|t| t.0).sum();
            return Err(Error::TruncationCap {
                partial: 2.0 * direct,
                tail_bound: (prev.0 - 2.0 * direct).abs().max(terms.last().map_or(0.0, |t| 2.0 * t.0 * n as f64)),
                modes: n as usize,
            });
        }
        extend(next_n, &mut terms, budget)?;
        let cur = estimate(&terms)?;
        let change = (cur.0 - prev.0).abs();
        n = next_n;
        if change <= opts.rel_tol * cur.0.abs() || (cur.0 == 0.0 && prev.0 == 0.0) {
            return Ok(ProbabilityResult {
                value: cur.0,
                error_estimate: cur.1 + change,
                modes_used: n,
                imag_residual: 0.0,
                evaluations: cur.2,
            });
        }
        prev = cur;
    }
}

/// `∫_{x0}^∞ |I(x)|² dx + (1/24) d|I|²/dx (x0)`, integrated in `ln x` over
/// unit segments until they stop contributing.
fn tail_integral(amp: &Amplitude, x0: f64, head: f64, tol: f64, budget: f64) -> Result<(f64, f64, usize)> {
    const MAX_SEGMENTS: usize = 400;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let g = |x: f64| match amp.squared(x, tol, budget) {
        Ok((v, _, _)) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let opts = QuadOptions::default().with_rel_tol(1e-9).with_abs_tol(1e-11 * head.max(1e-300));
    let s0 = x0.ln();
    let (mut total, mut err, mut evals) = (0.0, 0.0, 0usize);
    let mut quiet = 0;
    for seg in 0..MAX_SEGMENTS {
        let lo = s0 + seg as f64;
        let r = integrate_1d(|s| Complex64::new(g(s.exp()) * s.exp(), 0.0), lo, lo + 1.0, &opts, None)?;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        total += r.value.re;
        err += r.abs_error_estimate;
        evals += r.evaluations;
        if r.value.re.abs() <= 1e-13 * (head + total).abs() {
            quiet += 1;
            if quiet >= 2 {
                let h = 1e-3 * x0;
                let dg = (g(x0 + h) - g(x0 - h)) / (2.0 * h);
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                // the correction itself bounds the remaining Euler–Maclaurin terms
                return Ok((total + dg / 24.0, err + (dg / 24.0).abs() * 1e-2, evals));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::TruncationCap {
        partial: 2.0 * (head + total),
        tail_bound: 2.0 * total.abs(),
        modes: x0 as usize,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogKernelOptions {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for LogKernelOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_subdivisions: 4000,
        }
    }
}

/// Transition probability from the resummed log-kernel double integral.
pub fn probability_logkernel(
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    circumference: f64,
) -> Result<ProbabilityResult> {
    probability_logkernel_with(det, sw, traj, circumference, &LogKernelOptions::default())
}

/// In `u = τ - τ'`, `v = (τ + τ')/2` the integrand is
/// `e^{-v²/σ²} e^{iΩu - u²/4σ²} log(1 - e^{iθ})` with
/// `θ = (2π/L) e^{av} u sinhc(au/2)`. The `u` contour is lifted into the strip
/// `0 < Im u < π/a`, where `Im θ > 0`; only the log singularity at `u = 0`
/// stays on the path. The two halves of the path are integrated separately,
/// so the imaginary part of the result measures the quadrature error.
pub fn probability_logkernel_with(
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    circumference: f64,
    opts: &LogKernelOptions,
) -> Result<ProbabilityResult> {
    let amp = Amplitude::new(det, sw, traj, circumference, "probability_logkernel")?;
    let Amplitude { omega, sigma, a, .. } = amp;
    let reach = 50f64.sqrt() * sigma;

    let mut height = 3.0 * sigma;
    if a > 0.0 {
        height = height.min(PI / a);
    }
    if omega < 0.0 {
        height = height.min(3.0 / -omega);
    }
    let scale = if a > 0.0 { (0.3 * sigma).max(0.2 / a) } else { 0.3 * sigma };
    let path = Lifted { height, scale };
    let k = TAU / circumference;

    let inner_opts = QuadOptions::default()
        .with_rel_tol(opts.rel_tol * 0.1)
        .with_abs_tol(1e-18 * sigma * sigma)
        .with_max_subdivisions(opts.max_subdivisions);
    let outer_opts = QuadOptions::default()
        .with_rel_tol(opts.rel_tol)
        .with_abs_tol(1e-17 * sigma * sigma)
        .with_max_subdivisions(opts.max_subdivisions);
    let origin = SingularitySpec::logarithmic(vec![0.0]);

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_err = RefCell::new(0.0f64);
    let inner_evals = RefCell::new(0usize);

    let inner = |v: f64| -> Complex64 {
        let growth = k * (a * v).exp();
        let f = |r: f64| {
            let (u, du) = path.point(r);
            let theta = growth * u * sinhc(0.5 * a * u);
            let window = (Complex64::i() * omega * u - u * u / (4.0 * sigma * sigma)).exp();
            window * log_one_minus_exp_complex(theta) * du
        };
        let mut sum = Complex64::new(0.0, 0.0);
        for (lo, hi) in [(-2.0 * reach, 0.0), (0.0, 2.0 * reach)] {
            match integrate_1d(f, lo, hi, &inner_opts, Some(&origin)) {
                Ok(r) => {
                    sum += r.value;
                    let mut e = inner_err.borrow_mut();
                    *e = e.max(r.abs_error_estimate);
                    *inner_evals.borrow_mut() += r.evaluations;
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                }
            }
        }
        sum * (-v * v / (sigma * sigma)).exp()
    };
    let outer = integrate_1d(inner, -reach, reach, &outer_opts, None);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let scale_back = 1.0 / TAU;
    let value = -outer.value.re * scale_back;
    let imag_residual = outer.value.im.abs() * scale_back;
    let error_estimate = (outer.abs_error_estimate + 2.0 * reach * inner_err.into_inner()) * scale_back;
    if imag_residual > (1e-6 * value.abs()).max(error_estimate).max(1e-30) {
        return Err(Error::ImaginaryResidual { value, residual: imag_residual });
    }
    Ok(ProbabilityResult {
        value,
        error_estimate,
        modes_used: 0,
        imag_residual,
        evaluations: outer.evaluations + inner_evals.into_inner(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// Rate in units of λ².
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Largest number of log singularities `rate_sudden` will resolve.
pub const MAX_RESONANCES: f64 = 1e5;

/// Transition rate after a sudden switch-on of duration T, in units of λ².
pub fn rate_sudden(det: &DetectorConfig, sw: &Switching, traj: &Trajectory, circumference: f64) -> Result<f64> {
    Ok(rate_sudden_detailed(det, sw, traj, circumference, &QuadOptions::default().with_rel_tol(1e-11))?.value)
}

/// `-(1/2π) Re ∫₀ᵀ ds e^{iΩs} log(1 - e^{iθ(s)})` with
/// `θ(s) = (2π/L) e^{aT} (1 - e^{-as})/a`. The log singularities at `s = 0`
/// and at every `θ(s) ∈ 2πℤ` are declared to the quadrature.
pub fn rate_sudden_detailed(
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    circumference: f64,
    opts: &QuadOptions,
) -> Result<RateResult> {
    let duration = match *sw {
        Switching::Sudden { duration } => duration,
        Switching::Gaussian { .. } => return Err(Error::invalid("rate_sudden requires sudden switching")),
    };
    if !(circumference > 0.0) || !circumference.is_finite() {
        return Err(Error::invalid(format!("circumference must be positive, got {circumference}")));
    }
    let (omega, a, l) = (det.gap, traj.acceleration(), circumference);
    let k = TAU / l * (a * duration).exp();
    let theta = |s: f64| -k * rindler_displacement(-1.0, a, Complex64::new(s, 0.0)).re;

    // θ(T)/2π = (e^{aT} - 1)/(aL) resonances lie inside the window
    let span = if a * duration < 1e-8 { duration } else { (a * duration).exp_m1() / a };
    let resonances = span / l;
    if !(resonances <= MAX_RESONANCES) {
        return Err(Error::Domain {
            op: "rate_sudden",
            reason: format!("{resonances:e} phase resonances inside the window (limit {MAX_RESONANCES:e})"),
        });
    }
    let mut points = vec![0.0];
    for j in 1.. {
        let s = resonance(j as f64, a, l, duration);
        match s {
            Some(s) if s < duration => points.push(s),
            _ => break,
        }
    }
    let sing = SingularitySpec::logarithmic(points);
    let r = integrate_1d(
        |s| {
            // the log is integrable; an exact hit on a resonance has measure zero
            let log = log_one_minus_exp(theta(s)).unwrap_or(Complex64::new(0.0, 0.0));
            Complex64::from_polar(1.0, omega * s) * log
        },
        0.0,
        duration,
        opts,
        Some(&sing),
    )?;
    Ok(RateResult {
        value: -r.value.re / TAU,
        error_estimate: r.abs_error_estimate / TAU,
        evaluations: r.evaluations,
    })
}

/// Proper time s at which the sudden-switching phase reaches 2πj.
fn resonance(j: f64, a: f64, l: f64, duration: f64) -> Option<f64> {
    let base = j * l * (-a * duration).exp();
    if a < A_MIN {
        return Some(base * (1.0 + 0.5 * a * base));
    }
    let q = a * base;
    if q >= 1.0 {
        return None;
    }
    Some(-(-q).ln_1p() / a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(omega: f64, sigma: f64, a: f64) -> (DetectorConfig, Switching, Trajectory) {
        (
            DetectorConfig::new(omega).unwrap(),
            Switching::gaussian(sigma).unwrap(),
            Trajectory::new(a).unwrap(),
        )
    }

    fn inertial_series(omega: f64, sigma: f64, l: f64) -> f64 {
        let mut sum = 0.0;
        for n in 1..200_000 {
            let x = omega + TAU * n as f64 / l;
            let term = (-(sigma * x).powi(2)).exp() / n as f64;
            sum += term;
            if x > 0.0 && term < 1e-20 * sum {
                break;
            }
        }
        sigma * sigma * sum
    }

    #[test]
    fn inertial_amplitude_matches_gaussian_transform() {
        let (det, sw, traj) = setup(0.7, 1.3, 0.0);
        for m in [1i64, -1, 4, -9] {
            let n = m.unsigned_abs() as f64;
            let v = mode_amplitude(m, &det, &sw, &traj, 30.0).unwrap().norm_sqr();
            let exact = 1.3f64.powi(2) / (2.0 * n) * (-(1.3 * (0.7 + TAU * n / 30.0)).powi(2)).exp();
            assert!((v - exact).abs() < 1e-11 * exact, "m={m}: {v} vs {exact}");
        }
    }

    #[test]
    fn amplitude_matches_high_precision_oracle() {
        let (det, sw, traj) = setup(2.0, 0.4, 1.0);
        // 50-digit quadrature along the real axis
        let cases = [
            (1i64, 0.203_182_595_078_456_121_7, -0.000_168_343_926_285_491_921_8),
            (-1, 0.203_182_595_078_456_121_7, 0.000_168_343_926_285_491_921_8),
            (3, 0.114_749_877_439_756_606_9, -0.000_242_964_198_165_866_963_6),
            (-7, 0.071_752_488_517_905_031_76, 0.000_227_527_075_007_206_913_6),
        ];
        for (m, re, im) in cases {
            let v = mode_amplitude(m, &det, &sw, &traj, 200.0).unwrap();
            assert!((v - Complex64::new(re, im)).norm() < 1e-9 * v.norm(), "m={m}: {v}");
        }
    }

    #[test]
    fn amplitude_is_real_axis_symmetric_at_zero_gap() {
        let (det, sw, traj) = setup(0.0, 0.5, 0.0);
        let p = mode_amplitude(3, &det, &sw, &traj, 20.0).unwrap();
        let q = mode_amplitude(-3, &det, &sw, &traj, 20.0).unwrap();
        assert!((p.norm() - q.norm()).abs() < 1e-13);
    }

    #[test]
    fn zero_mode_and_sudden_switching_are_rejected() {
        let (det, sw, traj) = setup(1.0, 1.0, 1.0);
        assert!(mode_amplitude(0, &det, &sw, &traj, 20.0).is_err());
        let sudden = Switching::sudden(1.0).unwrap();
        assert!(probability_modesum(&det, &sudden, &traj, 20.0).is_err());
        assert!(probability_logkernel(&det, &sudden, &traj, 20.0).is_err());
        assert!(rate_sudden(&det, &sw, &traj, 20.0).is_err());
    }

    #[test]
    fn modesum_inertial_limit() {
        for (omega, sigma, l) in [(1.0, 0.5, 50.0), (-0.5, 1.0, 20.0), (2.0, 0.4, 200.0)] {
            let (det, sw, traj) = setup(omega, sigma, 0.0);
            let p = probability_modesum(&det, &sw, &traj, l).unwrap();
            let exact = inertial_series(omega, sigma, l);
            assert!((p.value - exact).abs() < 1e-7 * exact, "{omega},{sigma},{l}: {} vs {exact}", p.value);
        }
    }

    #[test]
    fn tail_and_direct_sums_agree() {
        let (det, sw, traj) = setup(0.5, 0.6, 0.8);
        let with_tail = probability_modesum(&det, &sw, &traj, 40.0).unwrap();
        let direct = probability_modesum_with(
            &det,
            &sw,
            &traj,
            40.0,
            &ModeSumOptions { tail: TailMode::Off, ..Default::default() },
        )
        .unwrap();
        assert!((with_tail.value - direct.value).abs() < 1e-6 * direct.value);
    }

    #[test]
    fn truncation_cap_is_reported() {
        let (det, sw, traj) = setup(0.1, 0.4, 1.0);
        let opts = ModeSumOptions {
            tail: TailMode::Off,
            initial_modes: 2,
            max_modes: 4,
            ..Default::default()
        };
        match probability_modesum_with(&det, &sw, &traj, 200.0, &opts) {
            Err(Error::TruncationCap { modes, partial, .. }) => {
                assert_eq!(modes, 4);
                assert!(partial > 0.0);
            }
            other => panic!("expected truncation cap, got {other:?}"),
        }
    }

    #[test]
    fn logkernel_matches_modesum() {
        for (omega, sigma, a, l) in [(2.0, 0.4, 1.0, 200.0), (-2.0, 0.4, 1.0, 200.0), (0.5, 1.0, 0.5, 50.0)] {
            let (det, sw, traj) = setup(omega, sigma, a);
            let p = probability_modesum(&det, &sw, &traj, l).unwrap();
            let q = probability_logkernel(&det, &sw, &traj, l).unwrap();
            assert!((p.value - q.value).abs() < 1e-6 * p.value, "{omega},{sigma},{a}: {} vs {}", p.value, q.value);
            assert!(q.imag_residual <= 1e-6 * q.value);
        }
    }

    #[test]
    fn rate_vanishes_for_short_switching() {
        let det = DetectorConfig::new(2.0).unwrap();
        let sw = Switching::sudden(1e-12).unwrap();
        let r = rate_sudden(&det, &sw, &Trajectory::new(1.0).unwrap(), 20.0).unwrap();
        assert!(r.abs() < 1e-9);
    }

    #[test]
    fn rate_inertial_limit() {
        let det = DetectorConfig::new(2.0).unwrap();
        let sw = Switching::sudden(1.0).unwrap();
        let r = rate_sudden(&det, &sw, &Trajectory::new(1e-9).unwrap(), 20.0).unwrap();
        // a = 0 integrand: e^{2is} log(1 - e^{2πis/20}) summed on a fine midpoint grid
        // after removing the log singularity analytically
        let n = 200_000;
        let h = 1.0 / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let s = (j as f64 + 0.5) * h;
            let w = TAU * s / 20.0;
            let smooth = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, w)).ln() - Complex64::new(w, 0.0).ln();
            acc += Complex64::from_polar(1.0, 2.0 * s) * smooth * h;
        }
        // ∫₀¹ e^{2is} ln(2πs/20) ds, split as ln(2π/20)∫e^{2is} + ∫ e^{2is} ln s
        let c = (TAU / 20.0).ln();
        let plane = (Complex64::from_polar(1.0, 2.0) - 1.0) / Complex64::new(0.0, 2.0);
        let log_part = integrate_1d(
            |s| Complex64::from_polar(1.0, 2.0 * s) * s.ln(),
            0.0,
            1.0,
            &QuadOptions::default().with_rel_tol(1e-12),
            Some(&SingularitySpec::logarithmic(vec![0.0])),
        )
        .unwrap()
        .value;
        let oracle = -(acc + c * plane + log_part).re / TAU;
        assert!((r - oracle).abs() < 1e-8, "{r} vs {oracle}");
    }

    #[test]
    fn rate_refuses_unresolvable_windows() {
        let det = DetectorConfig::new(2.0).unwrap();
        let sw = Switching::sudden(1.0).unwrap();
        for a in [30.0, 800.0] {
            let r = rate_sudden(&det, &sw, &Trajectory::new(a).unwrap(), 20.0);
            assert!(matches!(r, Err(Error::Domain { .. })), "a = {a}: {r:?}");
        }
    }
}
