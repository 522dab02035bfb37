use std::f64::consts::{E, PI};

use udw_core::quadrature::integrate_1d;
use udw_core::{Complex64, QuadOptions, SingularitySpec};

type Integrand = Box<dyn Fn(f64) -> Complex64 + Sync>;

struct Case {
    name: &'static str,
    f: Integrand,
    lo: f64,
    hi: f64,
    singular: Vec<f64>,
    exact: Complex64,
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn case(
    name: &'static str,
    f: impl Fn(f64) -> Complex64 + Sync + 'static,
    (lo, hi): (f64, f64),
    singular: &[f64],
    exact: Complex64,
) -> Case {
    Case { name, f: Box::new(f), lo, hi, singular: singular.to_vec(), exact }
}

fn corpus() -> Vec<Case> {
    let k = 10.0;
    let ik = Complex64::new(0.0, k);
    let eik = Complex64::from_polar(1.0, k);
    vec![
        case("square", |x| real(x * x), (0.0, 1.0), &[], real(1.0 / 3.0)),
        case("exp", |x| real(x.exp()), (0.0, 1.0), &[], real(E - 1.0)),
        case("sine", |x| real(x.sin()), (0.0, PI), &[], real(2.0)),
        case("lorentzian", |x| real(1.0 / (1.0 + x * x)), (0.0, 1.0), &[], real(PI / 4.0)),
        case("sqrt", |x| real(x.sqrt()), (0.0, 1.0), &[], real(2.0 / 3.0)),
        case("log", |x| real(x.ln()), (0.0, 1.0), &[0.0], real(-1.0)),
        case("fast cosine", |x| real((50.0 * x).cos()), (0.0, 1.0), &[], real(50f64.sin() / 50.0)),
        case("gaussian", |x| real((-x * x).exp()), (-10.0, 10.0), &[], real(PI.sqrt())),
        case("inverse sqrt", |x| real(1.0 / x.sqrt()), (0.0, 1.0), &[0.0], real(2.0)),
        case("x log x", |x| real(x * x.ln()), (0.0, 1.0), &[0.0], real(-0.25)),
        case("full period", |x| Complex64::from_polar(1.0, x), (0.0, 2.0 * PI), &[], real(0.0)),
        case(
            "ramp wave",
            move |x| x * Complex64::from_polar(1.0, k * x),
            (0.0, 1.0),
            &[],
            eik / ik + (eik - 1.0) / (k * k),
        ),
        case("sharp peak", |x| real(1.0 / (x * x + 1e-4)), (-1.0, 1.0), &[], real(200.0 * 100f64.atan())),
        case("kink", |x| real((x - 1.0 / 3.0).abs()), (0.0, 1.0), &[1.0 / 3.0], real(5.0 / 18.0)),
        case(
            "interior log",
            |x| real((x - 0.3).abs().ln()),
            (0.0, 1.0),
            &[0.3],
            real(0.3 * 0.3f64.ln() - 0.3 + 0.7 * 0.7f64.ln() - 0.7),
        ),
        case("fermi", |x| real(1.0 / (1.0 + x.exp())), (-5.0, 5.0), &[], real(5.0)),
        case("sine squared", |x| real(x.sin().powi(2)), (0.0, 10.0 * PI), &[], real(5.0 * PI)),
        case(
            "damped cosine",
            |x| real((-x).exp() * x.cos()),
            (0.0, 20.0),
            &[],
            real(((-20f64).exp() * (20f64.sin() - 20f64.cos()) + 1.0) / 2.0),
        ),
        case(
            "gaussian wave",
            |x| Complex64::from_polar((-x * x).exp(), 3.0 * x),
            (-10.0, 10.0),
            &[],
            real(PI.sqrt() * (-2.25f64).exp()),
        ),
        case(
            "quintic",
            |x| real(x.powi(5) - 3.0 * x.powi(3)),
            (-2.0, 3.0),
            &[],
            real((729.0 / 6.0 - 243.0 / 4.0) - (64.0 / 6.0 - 12.0)),
        ),
    ]
}

fn quad(f: impl Fn(f64) -> Complex64, lo: f64, hi: f64, singular: &[f64], tol: f64) -> udw_core::QuadResult {
    let opts = QuadOptions::default().with_rel_tol(tol).with_abs_tol(1e-15);
    let sing = (!singular.is_empty()).then(|| SingularitySpec::logarithmic(singular.to_vec()));
    integrate_1d(f, lo, hi, &opts, sing.as_ref()).unwrap()
}

fn integrate(c: &Case, tol: f64) -> udw_core::QuadResult {
    quad(&c.f, c.lo, c.hi, &c.singular, tol)
}

#[test]
fn corpus_has_twenty_integrands() {
    assert_eq!(corpus().len(), 20);
}

#[test]
fn error_estimates_are_honest() {
    for c in corpus() {
        for tol in [1e-6, 1e-10] {
            let r = integrate(&c, tol);
            let actual = (r.value - c.exact).norm();
            let slack = 1e-14 * c.exact.norm().max(1.0);
            assert!(
                actual <= r.abs_error_estimate + slack,
                "{} at {tol:e}: actual {actual:e} > estimate {:e}",
                c.name,
                r.abs_error_estimate
            );
        }
    }
}

#[test]
fn tighter_tolerances_refine() {
    for c in corpus() {
        let mut last_evals = 0;
        for tol in [1e-4, 1e-7, 1e-10] {
            let r = integrate(&c, tol);
            let actual = (r.value - c.exact).norm();
            assert!(
                actual <= tol * c.exact.norm() + 1e-14,
                "{} at {tol:e}: error {actual:e}",
                c.name
            );
            assert!(r.evaluations >= last_evals, "{}: fewer evaluations at {tol:e}", c.name);
            last_evals = r.evaluations;
        }
    }
}

#[test]
fn integration_is_linear() {
    let cases = corpus();
    for pair in cases.windows(2) {
        let (f, g) = (&pair[0], &pair[1]);
        if f.lo != g.lo || f.hi != g.hi {
            continue;
        }
        let mut singular = f.singular.clone();
        singular.extend(&g.singular);
        let rc = quad(|x| 2.0 * (f.f)(x) - 3.0 * (g.f)(x), f.lo, f.hi, &singular, 1e-11);
        let (rf, rg) = (integrate(f, 1e-11), integrate(g, 1e-11));
        let bound = 2.0 * rf.abs_error_estimate + 3.0 * rg.abs_error_estimate + rc.abs_error_estimate + 1e-13;
        assert!(
            (rc.value - (2.0 * rf.value - 3.0 * rg.value)).norm() <= bound,
            "{} + {}: {:e} vs bound {bound:e}",
            f.name,
            g.name,
            (rc.value - (2.0 * rf.value - 3.0 * rg.value)).norm()
        );
    }
}
