//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands.
//!
//! The 1D driver is a global adaptive scheme in the QUADPACK mould: a 21-point
//! Kronrod rule with its embedded 10-point Gauss rule on every panel, repeated
//! bisection of the panel with the largest error estimate, and a roundoff floor
//! so that integrands with strong cancellation still terminate. Declared
//! logarithmic singularities get a geometrically graded initial mesh.
//!
//! Panels are summed in ascending position once refinement is done, so the
//! returned value depends only on the integrand and the options.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Abscissae of the 21-point Kronrod rule on [-1, 1] (non-negative half).
/// Odd indices are the nodes of the embedded 10-point Gauss rule.
pub(crate) const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

pub(crate) const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_067_559,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_652,
];

/// Ratio between successive panel widths in the graded mesh around a
/// declared singular point.
const GRADING_RATIO: f64 = 0.2;
/// Default innermost graded panel, as a fraction of the segment length.
pub const GRADING_DEPTH: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingularityKind {
    #[default]
    Logarithmic,
}

/// Integrable singularities declared to the 1D driver. Points outside the
/// integration interval are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularitySpec {
    pub locations: Vec<f64>,
    pub kind: SingularityKind,
    /// Innermost graded panel relative to the segment length.
    pub grading_depth: f64,
}

impl Default for SingularitySpec {
    fn default() -> Self {
        Self::logarithmic(Vec::new())
    }
}

impl SingularitySpec {
    pub fn logarithmic(locations: impl Into<Vec<f64>>) -> Self {
        Self {
            locations: locations.into(),
            kind: SingularityKind::Logarithmic,
            grading_depth: GRADING_DEPTH,
        }
    }

    pub fn with_grading_depth(mut self, depth: f64) -> Self {
        self.grading_depth = depth;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Relative tolerance on the returned value.
    pub rel_tol: f64,
    /// Absolute floor; the driver stops once the error is below
    /// `max(rel_tol * |value|, abs_tol)`.
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::invalid(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::invalid(format!("abs_tol must be non-negative, got {}", self.abs_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
    floor: f64,
}

impl Panel {
    fn priority(&self) -> f64 {
        // panels already at their roundoff floor are not worth splitting
        if self.error <= self.floor {
            0.0
        } else {
            self.error
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority()
            .total_cmp(&other.priority())
            // deterministic tie-break: leftmost panel first
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Applies the 21-point Kronrod rule on `[lo, hi]`.
///
/// Returns the panel with a QUADPACK-style error estimate and a roundoff
/// floor of `50 eps` times the integral of `|f|`.
fn kronrod_panel<F>(f: &F, lo: f64, hi: f64) -> Panel
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut res_abs = fc.norm() * WGK[10];
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let scale = half.abs();
    let value = kronrod * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if floor > error {
        error = floor;
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        error = f64::INFINITY;
    }
    Panel {
        lo,
        hi,
        value,
        error,
        floor,
    }
}

/// Fixed (non-adaptive) composite Kronrod rule over `n` equal panels.
pub(crate) fn composite_kronrod<F>(f: F, lo: f64, hi: f64, n: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let width = (hi - lo) / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let a = lo + k as f64 * width;
        let b = if k + 1 == n { hi } else { a + width };
        sum += kronrod_panel(&f, a, b).value;
    }
    sum
}

/// Panels narrower than this many ulps of their position are not split: the
/// outermost Kronrod nodes would round onto the panel ends.
const MIN_PANEL_ULPS: f64 = 1e3;

/// A panel whose error exceeds its roundoff floor by more than this (about
/// 1e-8 of `∫|f|`) is never treated as noise-limited.
const NOISE_RATIO: f64 = 1e6;

fn unresolvable(lo: f64, hi: f64) -> bool {
    hi - lo <= MIN_PANEL_ULPS * f64::EPSILON * lo.abs().max(hi.abs())
}

fn graded_edges(singular: f64, other: f64, depth: f64) -> Vec<f64> {
    let d = other - singular;
    let mut edges = Vec::new();
    let mut step = 1.0;
    while step > depth && !unresolvable(singular.min(singular + d * step), singular.max(singular + d * step)) {
        edges.push(singular + d * step);
        step *= GRADING_RATIO;
    }
    edges.push(singular);
    edges
}

/// Initial breakpoints: endpoints, declared points, and geometric grading on
/// both sides of every declared point.
fn initial_edges(lo: f64, hi: f64, sing: Option<&SingularitySpec>) -> Result<Vec<f64>> {
    let mut points: Vec<f64> = Vec::new();
    if let Some(spec) = sing {
        for &p in &spec.locations {
            if !(p >= lo && p <= hi) {
                return Err(Error::invalid(format!(
                    "singular point {p} lies outside [{lo}, {hi}]"
                )));
            }
            points.push(p);
        }
    }
    points.push(lo);
    points.push(hi);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let singular: Vec<f64> = sing.map(|s| s.locations.clone()).unwrap_or_default();
    let is_singular = |x: f64| singular.contains(&x);
    let depth = sing.map_or(GRADING_DEPTH, |s| s.grading_depth);

    let mut edges = vec![lo];
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let left: Vec<f64> = if is_singular(a) {
            let mut e = graded_edges(a, mid, depth);
            e.reverse();
            e
        } else {
            vec![a, mid]
        };
        let right: Vec<f64> = if is_singular(b) { graded_edges(b, mid, depth) } else { vec![mid, b] };
        for x in left.into_iter().chain(right) {
            if x > *edges.last().unwrap() {
                edges.push(x);
            }
        }
    }
    Ok(edges)
}

/// Adaptive integration of a complex integrand over `[lo, hi]`.
///
/// Stops once the summed panel error is below
/// `max(rel_tol * |value|, abs_tol)`, or when every remaining panel is at its
/// roundoff floor.
pub fn integrate_1d<F>(
    f: F,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
    sing: Option<&SingularitySpec>,
) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    opts.validate()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    let edges = initial_edges(lo, hi, sing)?;
    let mut heap = BinaryHeap::with_capacity(edges.len() * 4);
    let mut evaluations = 0usize;
    for w in edges.windows(2) {
        heap.push(kronrod_panel(&f, w[0], w[1]));
        evaluations += 21;
    }

    let mut subdivisions = 0usize;
    let (mut value, mut error, mut floor) = totals(&heap);
    loop {
        let target = (opts.rel_tol * value.norm()).max(opts.abs_tol);
        if error <= target || error <= floor * (1.0 + 1e-12) {
            // running sums drift; confirm against an exact recount
            let exact = totals(&heap);
            let target = (opts.rel_tol * exact.0.norm()).max(opts.abs_tol);
            if exact.1 <= target || exact.1 <= exact.2 * (1.0 + 1e-12) {
                return Ok(finish(heap, evaluations));
            }
            (value, error, floor) = exact;
            continue;
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::NonConvergence {
                best: value,
                bound: error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if unresolvable(worst.lo, worst.hi) {
            // cannot split further; freeze the panel at its current estimate
            let mut frozen = worst;
            floor += frozen.error - frozen.floor;
            frozen.floor = frozen.error;
            heap.push(frozen);
            subdivisions += 1;
            continue;
        }
        let mut left = kronrod_panel(&f, worst.lo, mid);
        let mut right = kronrod_panel(&f, mid, worst.hi);
        let joined = left.value + right.value;
        if worst.error <= NOISE_RATIO * worst.floor
            && left.error + right.error >= 0.99 * worst.error
            && (joined - worst.value).norm() <= 1e-5 * joined.norm()
        {
            // bisection no longer improves anything: the panel sits at roundoff
            left.floor = left.error;
            right.floor = right.error;
        }
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
        evaluations += 42;
        subdivisions += 1;
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (Complex64, f64, f64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut floor = 0.0;
    for p in heap.iter() {
        value += p.value;
        error += p.error;
        floor += p.floor;
    }
    (value, error, floor)
}

fn finish(heap: BinaryHeap<Panel>, evaluations: usize) -> QuadResult {
    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for p in &panels {
        value += p.value;
        error += p.error;
    }
    QuadResult {
        value,
        abs_error_estimate: error,
        evaluations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Rect {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Self { x, y }
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self::new((lo, hi), (lo, hi))
    }
}

/// Nested adaptive integration over a rectangle.
///
/// With `diagonal_singular` the integrand may carry an integrable logarithmic
/// singularity on `x = y`. The driver then changes variables to
/// `u = x - y`, `v = (x + y) / 2`, integrates `v` on the inside and `u` on the
/// outside with graded panels at `u = 0`.
pub fn integrate_2d<F>(f: F, domain: Rect, opts: &QuadOptions, diagonal_singular: bool) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Complex64,
{
    if diagonal_singular {
        // grading stops where v ± u/2 would no longer resolve u
        return diagonal(|u, v| f(v + 0.5 * u, v - 0.5 * u), domain, opts, 1e-12);
    }
    opts.validate()?;
    let Rect { x: (x0, x1), y: (y0, y1) } = domain;
    if !(x0 < x1 && y0 < y1) {
        return Err(Error::invalid("degenerate rectangle"));
    }
    let inner_opts = inner_options(opts, domain);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_evals = Cell::new(0usize);
    let inner_err = Cell::new(0.0f64);
    let outer = integrate_1d(
        |x| match integrate_1d(|y| f(x, y), y0, y1, &inner_opts, None) {
            Ok(r) => {
                inner_evals.set(inner_evals.get() + r.evaluations);
                inner_err.set(inner_err.get().max(r.abs_error_estimate));
                r.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        x0,
        x1,
        opts,
        None,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadResult {
        value: outer.value,
        abs_error_estimate: outer.abs_error_estimate + (x1 - x0) * inner_err.get(),
        evaluations: outer.evaluations + inner_evals.get(),
    })
}

fn inner_options(opts: &QuadOptions, domain: Rect) -> QuadOptions {
    let extent = (domain.x.1 - domain.x.0).max(domain.y.1 - domain.y.0).max(1.0);
    QuadOptions {
        rel_tol: opts.rel_tol * 0.1,
        abs_tol: opts.abs_tol * 0.1 / extent,
        max_subdivisions: opts.max_subdivisions,
    }
}

/// Diagonal-singular double integral over a rectangle in `(x, y)`, with the
/// integrand supplied directly in `u = x - y`, `v = (x + y)/2`. Passing `u`
/// exactly keeps `ln|u|`-type kernels accurate arbitrarily close to the
/// diagonal. The `v` integral is inner; the outer `u` integral is graded at
/// `u = 0` and broken at the corners of the rectangle.
pub fn integrate_2d_diagonal<F>(f: F, domain: Rect, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Complex64,
{
    diagonal(f, domain, opts, GRADING_DEPTH)
}

fn diagonal<F>(f: F, domain: Rect, opts: &QuadOptions, depth: f64) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Complex64,
{
    opts.validate()?;
    let Rect { x: (x0, x1), y: (y0, y1) } = domain;
    if !(x0 < x1 && y0 < y1) {
        return Err(Error::invalid("degenerate rectangle"));
    }
    let inner_opts = inner_options(opts, domain);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_evals = Cell::new(0usize);
    let inner_err = Cell::new(0.0f64);

    let (ulo, uhi) = (x0 - y1, x1 - y0);
    let mut points = vec![x0 - y0, x1 - y1];
    if ulo < 0.0 && uhi > 0.0 {
        points.push(0.0);
    }
    points.retain(|&p| p > ulo && p < uhi);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let sing = SingularitySpec::logarithmic(points).with_grading_depth(depth);
    let outer = integrate_1d(
        |u| {
            let vlo = (x0 - 0.5 * u).max(y0 + 0.5 * u);
            let vhi = (x1 - 0.5 * u).min(y1 + 0.5 * u);
            if vhi <= vlo {
                return Complex64::new(0.0, 0.0);
            }
            match integrate_1d(|v| f(u, v), vlo, vhi, &inner_opts, None) {
                Ok(r) => {
                    inner_evals.set(inner_evals.get() + r.evaluations);
                    inner_err.set(inner_err.get().max(r.abs_error_estimate));
                    r.value
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        ulo,
        uhi,
        opts,
        Some(&sing),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadResult {
        value: outer.value,
        abs_error_estimate: outer.abs_error_estimate + (uhi - ulo) * inner_err.get(),
        evaluations: outer.evaluations + inner_evals.get(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kronrod_rule_is_exact_for_degree_31() {
        for deg in 0..=31 {
            let p = kronrod_panel(&|x: f64| c(x.powi(deg)), -1.0, 1.0);
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((p.value.re - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn polynomial() {
        let r = integrate_1d(|x| c(x * x), 0.0, 1.0, &QuadOptions::default(), None).unwrap();
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-14);
        assert!(r.evaluations > 0);
    }

    #[test]
    fn plane_wave() {
        let r = integrate_1d(|x| Complex64::new(0.0, 10.0 * x).exp(), -1.0, 1.0, &QuadOptions::default(), None)
            .unwrap();
        let exact = 2.0 * 10f64.sin() / 10.0;
        assert!((r.value - c(exact)).norm() < 1e-12);
    }

    #[test]
    fn log_endpoint_singularity() {
        let sing = SingularitySpec::logarithmic(vec![0.0]);
        let opts = QuadOptions::default().with_rel_tol(1e-12);
        let r = integrate_1d(|x| c(x.ln()), 0.0, 1.0, &opts, Some(&sing)).unwrap();
        assert!((r.value.re + 1.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn interior_log_singularity() {
        // ∫_{-1}^{2} ln|x| dx = (2 ln 2 - 2) + (-1)
        let sing = SingularitySpec::logarithmic(vec![0.0]);
        let opts = QuadOptions::default().with_rel_tol(1e-12);
        let r = integrate_1d(|x: f64| c(x.abs().ln()), -1.0, 2.0, &opts, Some(&sing)).unwrap();
        assert!((r.value.re - (2.0 * 2f64.ln() - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let o = QuadOptions::default();
        assert!(integrate_1d(|_| c(1.0), 1.0, 0.0, &o, None).is_err());
        assert!(integrate_1d(|_| c(1.0), 0.0, 1.0, &o.with_rel_tol(0.0), None).is_err());
        let s = SingularitySpec::logarithmic(vec![2.0]);
        assert!(integrate_1d(|_| c(1.0), 0.0, 1.0, &o, Some(&s)).is_err());
    }

    #[test]
    fn non_convergence_carries_best_estimate() {
        let o = QuadOptions::default().with_rel_tol(1e-14).with_abs_tol(0.0).with_max_subdivisions(3);
        let err = integrate_1d(|x: f64| Complex64::new(0.0, 200.0 * x).exp(), 0.0, 10.0, &o, None).unwrap_err();
        match err {
            Error::NonConvergence { bound, subdivisions, .. } => {
                assert!(bound > 0.0);
                assert_eq!(subdivisions, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exact_zero_integrand_terminates() {
        let o = QuadOptions::default().with_abs_tol(0.0);
        let r = integrate_1d(|x: f64| c(x.sin()), -1.0, 1.0, &o, None).unwrap();
        assert!(r.value.norm() < 1e-15);
    }

    #[test]
    fn double_integral_of_one() {
        let r = integrate_2d(|_, _| c(1.0), Rect::square(0.0, 1.0), &QuadOptions::default(), false).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn separable_double_integral() {
        let f = |x: f64, y: f64| Complex64::new(0.0, x - y).exp();
        let exact = 4.0 * 1f64.sin().powi(2);
        for diag in [false, true] {
            let r = integrate_2d(f, Rect::square(-1.0, 1.0), &QuadOptions::default(), diag).unwrap();
            assert!((r.value - c(exact)).norm() < 1e-9, "diag={diag}: {}", r.value);
        }
    }

    #[test]
    fn log_diagonal_double_integral() {
        let opts = QuadOptions::default().with_rel_tol(1e-10);
        let r = integrate_2d(|x: f64, y: f64| c((x - y).abs().ln()), Rect::square(0.0, 1.0), &opts, true).unwrap();
        assert!((r.value.re + 1.5).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn diagonal_transform_on_offset_rectangle() {
        let f = |x: f64, y: f64| c(x * x * y + 1.0);
        let rect = Rect::new((0.0, 2.0), (1.0, 1.5));
        // ∫0^2 ∫1^1.5 (x²y + 1) dy dx = (8/3)(0.625) + 1
        let exact = 8.0 / 3.0 * 0.625 + 1.0;
        let r = integrate_2d(f, rect, &QuadOptions::default(), true).unwrap();
        assert!((r.value.re - exact).abs() < 1e-9, "{}", r.value);
    }
}
