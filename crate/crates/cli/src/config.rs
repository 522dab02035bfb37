//! Sweep configuration: parsing and validation.
//!
//! A config is a TOML document with a top-level `experiment`, a
//! `[parameters]` table whose entries are numbers, lists, or ranges
//! `{ min, max, count, spacing }`, and optional `[tolerances]` and
//! `[options]` tables. Validation never stops at the first problem; every
//! violation is collected with the field it concerns.

use std::fmt;
use std::path::PathBuf;

use toml::{Table, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    ProbCavity,
    RateSudden,
    ProbContinuum,
    KmsFit,
    DtdaGrid,
    AsymptoticCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::ProbCavity,
        Experiment::RateSudden,
        Experiment::ProbContinuum,
        Experiment::KmsFit,
        Experiment::DtdaGrid,
        Experiment::AsymptoticCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ProbCavity => "prob-cavity",
            Experiment::RateSudden => "rate-sudden",
            Experiment::ProbContinuum => "prob-continuum",
            Experiment::KmsFit => "kms-fit",
            Experiment::DtdaGrid => "dtda-grid",
            Experiment::AsymptoticCheck => "asymptotic-check",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

/// Physical parameters, in the order used for cell enumeration and columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Omega,
    Sigma,
    Duration,
    Acceleration,
    Circumference,
    IrCutoff,
}

impl Param {
    pub const ALL: [Param; 6] = [
        Param::Omega,
        Param::Sigma,
        Param::Duration,
        Param::Acceleration,
        Param::Circumference,
        Param::IrCutoff,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Param::Omega => "omega",
            Param::Sigma => "sigma",
            Param::Duration => "duration",
            Param::Acceleration => "acceleration",
            Param::Circumference => "circumference",
            Param::IrCutoff => "ir_cutoff",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.key() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    Fixed(f64),
    List(Vec<f64>),
    Range { min: f64, max: f64, count: usize, spacing: Spacing },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Fixed(v) => vec![*v],
            Axis::List(v) => v.clone(),
            Axis::Range { min, max, count, spacing } => {
                let n = *count;
                (0..n)
                    .map(|i| {
                        let t = i as f64 / (n - 1) as f64;
                        if i == n - 1 {
                            return *max;
                        }
                        match spacing {
                            Spacing::Linear => min + t * (max - min),
                            Spacing::Log => (min.ln() + t * (max.ln() - min.ln())).exp(),
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn is_swept(&self) -> bool {
        !matches!(self, Axis::Fixed(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tolerances {
    pub rel_tol: Option<f64>,
    pub amplitude_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimatorChoice {
    #[default]
    LocalFit,
    Pointwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Options {
    pub estimator: EstimatorChoice,
    pub spread: Option<f64>,
    pub step: Option<f64>,
    pub n_max: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub experiment: Experiment,
    /// Sorted by [`Param`] order.
    pub parameters: Vec<(Param, Axis)>,
    pub tolerances: Tolerances,
    pub options: Options,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    /// The document as given, echoed into the output metadata.
    pub source: String,
}

impl SweepConfig {
    pub fn axis(&self, p: Param) -> Option<&Axis> {
        self.parameters.iter().find(|(q, _)| *q == p).map(|(_, a)| a)
    }

    pub fn fixed(&self, p: Param) -> Option<f64> {
        match self.axis(p)? {
            Axis::Fixed(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Default)]
struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation { field: field.into(), message: message.into() });
    }
}

fn number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn parse_axis(field: &str, v: &Value, out: &mut Collector) -> Option<Axis> {
    match v {
        Value::Float(_) | Value::Integer(_) => number(v).map(Axis::Fixed),
        Value::Array(items) => {
            let values: Vec<Option<f64>> = items.iter().map(number).collect();
            if values.iter().any(Option::is_none) {
                out.push(field, "list entries must be numbers");
                return None;
            }
            if values.is_empty() {
                out.push(field, "list must not be empty");
                return None;
            }
            Some(Axis::List(values.into_iter().flatten().collect()))
        }
        Value::Table(t) => parse_range(field, t, out),
        _ => {
            out.push(field, "expected a number, a list, or a range table");
            None
        }
    }
}

fn parse_range(field: &str, t: &Table, out: &mut Collector) -> Option<Axis> {
    let before = out.0.len();
    for key in t.keys() {
        if !["min", "max", "count", "spacing"].contains(&key.as_str()) {
            out.push(format!("{field}.{key}"), "unknown field");
        }
    }
    let mut bound = |key: &str| match t.get(key) {
        None => {
            out.push(format!("{field}.{key}"), "missing");
            None
        }
        Some(v) => number(v).or_else(|| {
            out.push(format!("{field}.{key}"), "must be a number");
            None
        }),
    };
    let min = bound("min");
    let max = bound("max");
    let count = match t.get("count") {
        None => {
            out.push(format!("{field}.count"), "missing");
            None
        }
        Some(Value::Integer(c)) if *c >= 2 => Some(*c as usize),
        Some(Value::Integer(_)) => {
            out.push(format!("{field}.count"), "count must be at least 2");
            None
        }
        Some(_) => {
            out.push(format!("{field}.count"), "must be an integer");
            None
        }
    };
    let spacing = match t.get("spacing") {
        None => Some(Spacing::Linear),
        Some(Value::String(s)) if s == "linear" => Some(Spacing::Linear),
        Some(Value::String(s)) if s == "log" => Some(Spacing::Log),
        Some(_) => {
            out.push(format!("{field}.spacing"), "spacing must be \"linear\" or \"log\"");
            None
        }
    };
    if let (Some(lo), Some(hi)) = (min, max) {
        if lo > hi {
            out.push(field, "min must not exceed max");
        }
        if spacing == Some(Spacing::Log) && !(lo > 0.0) {
            out.push(field, "log spacing needs min > 0");
        }
    }
    if out.0.len() > before {
        return None;
    }
    Some(Axis::Range { min: min?, max: max?, count: count?, spacing: spacing? })
}

fn required(e: Experiment) -> &'static [Param] {
    use Param::*;
    match e {
        Experiment::ProbCavity | Experiment::AsymptoticCheck => &[Omega, Sigma, Acceleration, Circumference],
        Experiment::RateSudden => &[Omega, Duration, Acceleration, Circumference],
        Experiment::ProbContinuum => &[Omega, Sigma, Acceleration, IrCutoff],
        Experiment::KmsFit | Experiment::DtdaGrid => &[Omega, Sigma, Acceleration],
    }
}

fn allowed(e: Experiment, p: Param) -> bool {
    match e {
        Experiment::KmsFit | Experiment::DtdaGrid => {
            required(e).contains(&p) || matches!(p, Param::Circumference | Param::IrCutoff)
        }
        _ => required(e).contains(&p),
    }
}

fn physics(p: Param, values: &[f64], out: &mut Collector) {
    let field = format!("parameters.{}", p.key());
    if values.iter().any(|v| !v.is_finite()) {
        out.push(&field, "values must be finite");
        return;
    }
    let check = |ok: fn(f64) -> bool, msg: &str, out: &mut Collector| {
        if values.iter().any(|&v| !ok(v)) {
            out.push(&field, msg);
        }
    };
    match p {
        Param::Circumference => check(|v| v > 0.0, "circumference must be positive", out),
        Param::Sigma => check(|v| v > 0.0, "sigma must be positive", out),
        Param::Duration => check(|v| v > 0.0, "duration must be positive", out),
        Param::IrCutoff => check(|v| v > 0.0, "ir_cutoff must be positive", out),
        Param::Acceleration => check(|v| v >= 0.0, "acceleration must be non-negative", out),
        Param::Omega => {}
    }
}

fn positive(field: &str, v: &Value, out: &mut Collector) -> Option<f64> {
    match number(v) {
        Some(x) if x > 0.0 && x.is_finite() => Some(x),
        _ => {
            out.push(field, "must be a positive number");
            None
        }
    }
}

impl SweepConfig {
    /// Parse and validate; on failure returns every violation found.
    pub fn parse(text: &str) -> Result<SweepConfig, Vec<Violation>> {
        let doc: Table = match text.parse() {
            Ok(t) => t,
            Err(e) => {
                return Err(vec![Violation {
                    field: "<document>".into(),
                    message: e.to_string().trim_end().replace('\n', " | "),
                }])
            }
        };
        let mut out = Collector::default();

        for key in doc.keys() {
            if !["experiment", "parameters", "tolerances", "options", "threads", "output"].contains(&key.as_str()) {
                out.push(key.as_str(), "unknown field");
            }
        }

        let experiment = match doc.get("experiment") {
            None => {
                out.push("experiment", "missing experiment field");
                None
            }
            Some(Value::String(s)) => Experiment::parse(s).or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                out.push("experiment", format!("unknown experiment \"{s}\" (expected one of {})", names.join(", ")));
                None
            }),
            Some(_) => {
                out.push("experiment", "must be a string");
                None
            }
        };

        let mut parameters = Vec::new();
        match doc.get("parameters") {
            None => out.push("parameters", "missing [parameters] table"),
            Some(Value::Table(t)) => {
                for (key, v) in t {
                    let field = format!("parameters.{key}");
                    let Some(p) = Param::parse(key) else {
                        out.push(field, "unknown parameter");
                        continue;
                    };
                    if let Some(e) = experiment {
                        if !allowed(e, p) {
                            out.push(&field, format!("not used by {}", e.name()));
                            continue;
                        }
                    }
                    if let Some(axis) = parse_axis(&field, v, &mut out) {
                        physics(p, &axis.values(), &mut out);
                        parameters.push((p, axis));
                    }
                }
            }
            Some(_) => out.push("parameters", "must be a table"),
        }
        parameters.sort_by_key(|(p, _)| *p);

        let mut tolerances = Tolerances::default();
        if let Some(v) = doc.get("tolerances") {
            match v {
                Value::Table(t) => {
                    for (key, v) in t {
                        let field = format!("tolerances.{key}");
                        match key.as_str() {
                            "rel_tol" => tolerances.rel_tol = positive(&field, v, &mut out),
                            "amplitude_tol" => tolerances.amplitude_tol = positive(&field, v, &mut out),
                            _ => out.push(field, "unknown field"),
                        }
                    }
                }
                _ => out.push("tolerances", "must be a table"),
            }
        }

        let mut options = Options::default();
        if let Some(v) = doc.get("options") {
            match v {
                Value::Table(t) => {
                    for (key, v) in t {
                        let field = format!("options.{key}");
                        match key.as_str() {
                            "estimator" => match v.as_str() {
                                Some("local-fit") => options.estimator = EstimatorChoice::LocalFit,
                                Some("pointwise") => options.estimator = EstimatorChoice::Pointwise,
                                _ => out.push(field, "estimator must be \"local-fit\" or \"pointwise\""),
                            },
                            "spread" => {
                                options.spread = positive(&field, v, &mut out);
                                if options.spread.is_some_and(|s| s >= 1.0) {
                                    out.push(field, "spread must be below 1");
                                }
                            }
                            "step" => options.step = positive(&field, v, &mut out),
                            "n_max" => match v {
                                Value::Integer(n) if *n >= 1 => options.n_max = Some(*n as u64),
                                _ => out.push(field, "n_max must be a positive integer"),
                            },
                            _ => out.push(field, "unknown field"),
                        }
                    }
                }
                _ => out.push("options", "must be a table"),
            }
        }

        let threads = match doc.get("threads") {
            None => None,
            Some(Value::Integer(n)) if *n >= 1 => Some(*n as usize),
            Some(_) => {
                out.push("threads", "must be a positive integer");
                None
            }
        };
        let output = match doc.get("output") {
            None => None,
            Some(Value::String(s)) => Some(PathBuf::from(s)),
            Some(_) => {
                out.push("output", "must be a string path");
                None
            }
        };

        if let Some(e) = experiment {
            check_experiment(e, &parameters, &options, &mut out);
        }

        if !out.0.is_empty() {
            return Err(out.0);
        }
        Ok(SweepConfig {
            experiment: experiment.expect("validated"),
            parameters,
            tolerances,
            options,
            threads,
            output,
            source: text.to_string(),
        })
    }
}

fn check_experiment(e: Experiment, parameters: &[(Param, Axis)], options: &Options, out: &mut Collector) {
    let get = |p: Param| parameters.iter().find(|(q, _)| *q == p).map(|(_, a)| a);
    for &p in required(e) {
        if get(p).is_none() && !(e == Experiment::KmsFit && p == Param::Omega) {
            out.push(format!("parameters.{}", p.key()), format!("required by {}", e.name()));
        }
    }
    if matches!(e, Experiment::KmsFit | Experiment::DtdaGrid) {
        match (get(Param::Circumference), get(Param::IrCutoff)) {
            (None, None) => out.push("parameters", "one of circumference or ir_cutoff is required"),
            (Some(_), Some(_)) => out.push("parameters", "give circumference or ir_cutoff, not both"),
            (Some(a), None) | (None, Some(a)) if a.is_swept() => {
                out.push("parameters", "the field space (circumference or ir_cutoff) cannot be swept here")
            }
            _ => {}
        }
        if let Some(w) = get(Param::Omega) {
            if w.values().iter().any(|&v| !(v > 0.0)) {
                out.push("parameters.omega", "KMS thermometry needs omega > 0");
            }
        }
    }
    if e == Experiment::KmsFit {
        if let Some(w) = get(Param::Omega) {
            if w.values().len() < udw_core::kms::MIN_FIT_POINTS {
                out.push(
                    "parameters.omega",
                    format!("a fit needs at least {} gaps", udw_core::kms::MIN_FIT_POINTS),
                );
            }
        }
    }
    if e == Experiment::DtdaGrid {
        let swept = |p: Param| get(p).map(|a| a.values().len());
        match swept(Param::Sigma) {
            Some(n) if n >= 8 => {}
            Some(_) => out.push("parameters.sigma", "a derivative grid needs at least 8 sigma values"),
            None => {}
        }
        match (swept(Param::Omega), swept(Param::Acceleration)) {
            (Some(w), Some(1)) if w >= 8 => {}
            (Some(1), Some(a)) if a >= 8 => {}
            (Some(_), Some(_)) => out.push(
                "parameters",
                "sweep exactly one of omega or acceleration (at least 8 values) and fix the other",
            ),
            _ => {}
        }
        if let Some(a) = get(Param::Acceleration) {
            for v in a.values() {
                let h = options.step.unwrap_or_else(|| udw_core::kms::default_step(v));
                if v - h < 0.0 {
                    out.push(
                        "parameters.acceleration",
                        format!("acceleration {v} is below the finite-difference step {h}"),
                    );
                    break;
                }
            }
        }
    }
}
