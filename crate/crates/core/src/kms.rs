//! Detailed-balance thermometry: the KMS ratio `P(Ω)/P(-Ω)`, straight-line
//! temperature fits, and maps of `∂T/∂a`.

use rayon::prelude::*;

use crate::cavity::{probability_modesum, ProbabilityResult};
use crate::continuum::probability_continuum;
use crate::error::{Error, Result};
use crate::model::{DetectorConfig, FieldSpace, Switching, Trajectory};

/// Probability in either field space, through the mode sum for the cavity.
pub fn transition_probability(
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    space: &FieldSpace,
) -> Result<ProbabilityResult> {
    match *space {
        FieldSpace::Cavity { circumference } => probability_modesum(det, sw, traj, circumference),
        FieldSpace::Continuum { ir_cutoff } => probability_continuum(det, sw, traj, ir_cutoff),
    }
}

/// `ln[P(Ω)/P(-Ω)]` for `Ω > 0`.
pub fn kms_log_ratio(det: &DetectorConfig, sw: &Switching, traj: &Trajectory, space: &FieldSpace) -> Result<f64> {
    let omega = det.gap;
    if !(omega > 0.0) {
        return Err(Error::invalid(format!("the KMS ratio needs Ω > 0, got {omega}")));
    }
    let (up, down) = rayon::join(
        || transition_probability(det, sw, traj, space),
        || transition_probability(&det.with_gap(-omega), sw, traj, space),
    );
    let (up, down) = (up?, down?);
    if down.value <= down.error_estimate {
        return Err(Error::Domain {
            op: "kms_log_ratio",
            reason: format!("P(-Ω) = {:e} is zero within its error {:e}", down.value, down.error_estimate),
        });
    }
    if up.value <= up.error_estimate {
        return Err(Error::Domain {
            op: "kms_log_ratio",
            reason: format!("P(Ω) = {:e} is zero within its error {:e}", up.value, up.error_estimate),
        });
    }
    Ok((up.value / down.value).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmsFit {
    pub temperature: f64,
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub omega_grid: Vec<f64>,
    pub log_ratios: Vec<f64>,
    /// Set when the residual exceeds [`NON_KMS_THRESHOLD`] of the mean |ln-ratio|.
    pub non_kms: bool,
}

pub const NON_KMS_THRESHOLD: f64 = 0.01;
pub const MIN_FIT_POINTS: usize = 4;

impl KmsFit {
    /// `rms_residual / |mean ln-ratio|`.
    pub fn relative_residual(&self) -> f64 {
        let mean = self.log_ratios.iter().sum::<f64>() / self.log_ratios.len() as f64;
        self.rms_residual / mean.abs()
    }

    /// `-Ω/ln-ratio` at each grid point.
    pub fn pointwise_temperatures(&self) -> Vec<f64> {
        self.omega_grid.iter().zip(&self.log_ratios).map(|(w, r)| -w / r).collect()
    }
}

/// Nine evenly spaced gaps on [0.5, 2.5].
pub fn default_omega_grid() -> Vec<f64> {
    (0..9).map(|i| 0.5 + 0.25 * i as f64).collect()
}

/// Ordinary least squares of ln-ratio against Ω.
pub fn fit_log_ratios(omegas: &[f64], log_ratios: &[f64]) -> Result<KmsFit> {
    if omegas.len() != log_ratios.len() {
        return Err(Error::invalid("gap grid and ratios differ in length"));
    }
    if omegas.len() < MIN_FIT_POINTS {
        return Err(Error::invalid(format!("a KMS fit needs at least {MIN_FIT_POINTS} gaps")));
    }
    if omegas.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::invalid("every gap in a KMS fit must be positive"));
    }
    let n = omegas.len() as f64;
    let mx = omegas.iter().sum::<f64>() / n;
    let my = log_ratios.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&x, &y) in omegas.iter().zip(log_ratios) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::invalid("gap grid has no spread"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms_residual = (omegas
        .iter()
        .zip(log_ratios)
        .map(|(&x, &y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    if !(slope < 0.0) {
        return Err(Error::NegativeTemperature { slope, rms_residual });
    }
    Ok(KmsFit {
        temperature: -1.0 / slope,
        slope,
        intercept,
        rms_residual,
        omega_grid: omegas.to_vec(),
        log_ratios: log_ratios.to_vec(),
        non_kms: rms_residual > NON_KMS_THRESHOLD * my.abs(),
    })
}

/// KMS temperature from the ln-ratio over `omega_grid`. The gap of
/// `det_template` is ignored.
pub fn kms_fit(
    det_template: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    space: &FieldSpace,
    omega_grid: &[f64],
) -> Result<KmsFit> {
    if omega_grid.len() < MIN_FIT_POINTS || omega_grid.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::invalid(format!(
            "a KMS fit needs at least {MIN_FIT_POINTS} positive gaps"
        )));
    }
    let ratios: Result<Vec<f64>> = omega_grid
        .par_iter()
        .map(|&w| kms_log_ratio(&det_template.with_gap(w), sw, traj, space))
        .collect();
    fit_log_ratios(omega_grid, &ratios?)
}

/// How a single temperature is assigned to a detector with gap Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemperatureEstimator {
    /// KMS fit over `Ω·(1 ± offsets)`, four points.
    LocalFit { spread: f64 },
    /// `-Ω / ln[P(Ω)/P(-Ω)]`.
    Pointwise,
}

impl Default for TemperatureEstimator {
    fn default() -> Self {
        TemperatureEstimator::LocalFit { spread: 0.15 }
    }
}

impl TemperatureEstimator {
    pub fn temperature(&self, det: &DetectorConfig, sw: &Switching, traj: &Trajectory, space: &FieldSpace) -> Result<f64> {
        let omega = det.gap;
        match *self {
            TemperatureEstimator::Pointwise => Ok(-omega / kms_log_ratio(det, sw, traj, space)?),
            TemperatureEstimator::LocalFit { spread } => {
                if !(spread > 0.0 && spread < 1.0) {
                    return Err(Error::invalid(format!("stencil spread must lie in (0, 1), got {spread}")));
                }
                let grid: Vec<f64> = [-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0]
                    .iter()
                    .map(|k| omega * (1.0 + k * spread))
                    .collect();
                Ok(kms_fit(det, sw, traj, space, &grid)?.temperature)
            }
        }
    }
}

/// Default finite-difference step `max(1e-2, 1e-2·a)`.
pub fn default_step(a: f64) -> f64 {
    (1e-2f64).max(1e-2 * a)
}

/// Central difference `(f(a + h) - f(a - h)) / 2h`.
pub fn central_difference<F>(f: F, a: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(h > 0.0) || a - h < 0.0 {
        return Err(Error::invalid(format!("need h > 0 and a - h ≥ 0, got a={a}, h={h}")));
    }
    let (hi, lo) = rayon::join(|| f(a + h), || f(a - h));
    Ok((hi? - lo?) / (2.0 * h))
}

/// `∂T/∂a` of the KMS temperature at the detector's gap, by central
/// difference with step `h` (default [`default_step`]).
pub fn dt_da(
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    space: &FieldSpace,
    h: Option<f64>,
) -> Result<f64> {
    dt_da_with(det, sw, traj, space, h, TemperatureEstimator::default())
}

pub fn dt_da_with(
    det: &DetectorConfig,
    sw: &Switching,
    traj: &Trajectory,
    space: &FieldSpace,
    h: Option<f64>,
    estimator: TemperatureEstimator,
) -> Result<f64> {
    let a = traj.acceleration();
    let h = h.unwrap_or_else(|| default_step(a));
    central_difference(
        |x| estimator.temperature(det, sw, &Trajectory::new(x)?, space),
        a,
        h,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// Ω along x, σ along y, at fixed acceleration.
    OmegaSigma { acceleration: f64, omegas: Vec<f64>, sigmas: Vec<f64> },
    /// a along x, σ along y, at fixed gap.
    AccelerationSigma { omega: f64, accelerations: Vec<f64>, sigmas: Vec<f64> },
}

impl GridSpec {
    pub fn x(&self) -> &[f64] {
        match self {
            GridSpec::OmegaSigma { omegas, .. } => omegas,
            GridSpec::AccelerationSigma { accelerations, .. } => accelerations,
        }
    }

    pub fn sigmas(&self) -> &[f64] {
        match self {
            GridSpec::OmegaSigma { sigmas, .. } | GridSpec::AccelerationSigma { sigmas, .. } => sigmas,
        }
    }

    /// (Ω, σ, a) of cell (row, col).
    pub fn cell(&self, row: usize, col: usize) -> (f64, f64, f64) {
        match self {
            GridSpec::OmegaSigma { acceleration, omegas, sigmas } => (omegas[col], sigmas[row], *acceleration),
            GridSpec::AccelerationSigma { omega, accelerations, sigmas } => (*omega, sigmas[row], accelerations[col]),
        }
    }

    fn validate(&self) -> Result<()> {
        let (x, s) = (self.x(), self.sigmas());
        if x.len() < 8 || s.len() < 8 {
            return Err(Error::invalid("a derivative grid needs at least 8×8 cells"));
        }
        if x.iter().chain(s).any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("grid axes must be positive"));
        }
        let fixed = match self {
            GridSpec::OmegaSigma { acceleration, .. } => *acceleration,
            GridSpec::AccelerationSigma { omega, .. } => *omega,
        };
        if !(fixed > 0.0) {
            return Err(Error::invalid("the fixed grid parameter must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub row: usize,
    pub col: usize,
    pub reason: String,
}

/// A line segment of the zero contour in (x, σ) coordinates.
pub type Segment = [(f64, f64); 2];

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeGrid {
    pub spec: GridSpec,
    /// `dt_da[row][col]` at `(x[col], σ[row])`; `None` where the cell failed.
    pub dt_da: Vec<Vec<Option<f64>>>,
    pub failures: Vec<CellFailure>,
    pub zero_contour: Vec<Segment>,
}

impl DerivativeGrid {
    pub fn count(&self, pred: impl Fn(f64) -> bool) -> usize {
        self.dt_da.iter().flatten().flatten().filter(|&&v| pred(v)).count()
    }
}

/// `∂T/∂a` on a grid through the cavity or continuum pipeline.
pub fn dtda_grid(
    spec: &GridSpec,
    space: &FieldSpace,
    h: Option<f64>,
    estimator: TemperatureEstimator,
) -> Result<DerivativeGrid> {
    let space = *space;
    dtda_grid_from(
        spec,
        |omega, sigma, a| {
            estimator.temperature(
                &DetectorConfig::new(omega)?,
                &Switching::gaussian(sigma)?,
                &Trajectory::new(a)?,
                &space,
            )
        },
        h,
    )
}

/// `∂T/∂a` on a grid for an arbitrary temperature model `T(Ω, σ, a)`.
/// Cells are evaluated in parallel; failures are recorded, not fatal.
pub fn dtda_grid_from<T>(spec: &GridSpec, temperature: T, h: Option<f64>) -> Result<DerivativeGrid>
where
    T: Fn(f64, f64, f64) -> Result<f64> + Sync,
{
    spec.validate()?;
    let (rows, cols) = (spec.sigmas().len(), spec.x().len());
    let cells: Vec<Result<f64>> = (0..rows * cols)
        .into_par_iter()
        .map(|idx| {
            let (omega, sigma, a) = spec.cell(idx / cols, idx % cols);
            let step = h.unwrap_or_else(|| default_step(a));
            central_difference(|x| temperature(omega, sigma, x), a, step)
        })
        .collect();
    let mut dt_da = vec![vec![None; cols]; rows];
    let mut failures = Vec::new();
    for (idx, cell) in cells.into_iter().enumerate() {
        let (row, col) = (idx / cols, idx % cols);
        match cell {
            Ok(v) => dt_da[row][col] = Some(v),
            Err(e) => failures.push(CellFailure { row, col, reason: e.to_string() }),
        }
    }
    let zero_contour = zero_contour(spec.x(), spec.sigmas(), &dt_da);
    Ok(DerivativeGrid {
        spec: spec.clone(),
        dt_da,
        failures,
        zero_contour,
    })
}

/// Marching squares for the zero level of `z[row][col]` sampled at
/// `(x[col], y[row])`. Values ≥ 0 count as positive; cells with a missing
/// corner are skipped; saddles are resolved by the cell mean.
pub fn zero_contour(x: &[f64], y: &[f64], z: &[Vec<Option<f64>>]) -> Vec<Segment> {
    let mut out = Vec::new();
    for r in 0..y.len().saturating_sub(1) {
        for c in 0..x.len().saturating_sub(1) {
            // corners counter-clockwise from bottom-left
            let corners = [(r, c), (r, c + 1), (r + 1, c + 1), (r + 1, c)];
            let vals: Option<Vec<f64>> = corners.iter().map(|&(i, j)| z[i][j]).collect();
            let Some(v) = vals else { continue };
            let pos: Vec<bool> = v.iter().map(|&q| q >= 0.0).collect();
            let point = |k: usize| (x[corners[k].1], y[corners[k].0]);
            // crossing on the edge from corner k to corner k+1
            let crossing = |k: usize| {
                let l = (k + 1) % 4;
                let t = v[k] / (v[k] - v[l]);
                let (p, q) = (point(k), point(l));
                (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
            };
            let edges: Vec<usize> = (0..4).filter(|&k| pos[k] != pos[(k + 1) % 4]).collect();
            match edges.len() {
                2 => out.push([crossing(edges[0]), crossing(edges[1])]),
                4 => {
                    let centre_pos = v.iter().sum::<f64>() >= 0.0;
                    // the centre joins corners 0 and 2 or corners 1 and 3;
                    // the other pair is cut off
                    if centre_pos == pos[0] {
                        out.push([crossing(0), crossing(1)]);
                        out.push([crossing(2), crossing(3)]);
                    } else {
                        out.push([crossing(3), crossing(0)]);
                        out.push([crossing(1), crossing(2)]);
                    }
                }
                _ => {}
            }
        }
    }
    out
}
