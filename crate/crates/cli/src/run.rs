//! Evaluation of a validated [`SweepConfig`] into a [`ResultTable`].

use std::io::Write;

use anyhow::{Context, Result};
use rayon::prelude::*;
use udw_core::asymptotics::{gaussian_mode_cutoff, small_sigma_probability};
use udw_core::cavity::{probability_modesum_with, rate_sudden_detailed, ModeSumOptions};
use udw_core::continuum::{probability_continuum_with, ContinuumOptions};
use udw_core::kms::{dtda_grid, kms_fit, GridSpec, TemperatureEstimator};
use udw_core::{DetectorConfig, FieldSpace, QuadOptions, Switching, Trajectory};

use crate::config::{Axis, EstimatorChoice, Experiment, Param, SweepConfig};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "UDW_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Comment lines written above the header, without the leading `#`.
    pub metadata: Vec<String>,
    pub failures: usize,
}

impl ResultTable {
    /// Writes the metadata block, a timestamp line when `timestamp` is set,
    /// the header and the rows.
    pub fn write_csv<W: Write>(&self, mut w: W, timestamp: Option<u64>) -> Result<()> {
        writeln!(w, "# {}", self.metadata[0])?;
        if let Some(t) = timestamp {
            writeln!(w, "# timestamp: {t}")?;
        }
        for line in &self.metadata[1..] {
            writeln!(w, "# {line}")?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.columns)?;
        for row in &self.rows {
            csv.write_record(row)?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// Worker count: the config value (or all cores), capped by [`THREADS_ENV`].
pub fn resolve_threads(config: &SweepConfig) -> Result<usize> {
    let base = config
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match std::env::var(THREADS_ENV) {
        Ok(s) => {
            let cap: usize = s
                .trim()
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {s:?}"))?;
            Ok(base.min(cap))
        }
        Err(_) => Ok(base),
    }
}

pub fn run(config: &SweepConfig) -> Result<ResultTable> {
    let threads = resolve_threads(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building the worker pool")?;
    let mut table = pool.install(|| match config.experiment {
        Experiment::KmsFit => kms_table(config),
        Experiment::DtdaGrid => dtda_table(config),
        _ => cell_table(config),
    })?;
    let mut metadata = vec![
        format!("udw {} (udw-core {})", env!("CARGO_PKG_VERSION"), udw_core::VERSION),
        format!("experiment: {}", config.experiment.name()),
        format!("rows: {}, failed: {}", table.rows.len(), table.failures),
    ];
    metadata.append(&mut table.metadata);
    metadata.push("config:".into());
    metadata.extend(config.source.lines().map(|l| format!("  {l}")));
    table.metadata = metadata;
    Ok(table)
}

type Cell = Vec<(Param, f64)>;

fn cells(params: &[(Param, Axis)]) -> Vec<Cell> {
    let mut out: Vec<Cell> = vec![Vec::new()];
    for (p, axis) in params {
        let values = axis.values();
        out = out
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.push((*p, v));
                    c
                })
            })
            .collect();
    }
    out
}

fn get(cell: &Cell, p: Param) -> f64 {
    cell.iter().find(|(q, _)| *q == p).map(|(_, v)| *v).expect("validated parameter")
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn param_columns(config: &SweepConfig) -> Vec<String> {
    config.parameters.iter().map(|(p, _)| p.key().to_string()).collect()
}

fn param_fields(cell: &Cell) -> Vec<String> {
    cell.iter().map(|(_, v)| v.to_string()).collect()
}

fn output_columns(e: Experiment) -> &'static [&'static str] {
    match e {
        Experiment::ProbCavity => &["probability", "error_estimate", "modes_used"],
        Experiment::RateSudden => &["rate", "error_estimate"],
        Experiment::ProbContinuum => &["probability", "error_estimate", "imag_residual"],
        Experiment::AsymptoticCheck => &["small_sigma", "n_max", "probability", "error_estimate"],
        Experiment::KmsFit => &["log_ratio", "temperature", "slope", "intercept", "relative_residual", "non_kms"],
        Experiment::DtdaGrid => &["dt_da"],
    }
}

fn with_reason(outputs: std::result::Result<Vec<String>, String>, width: usize) -> (Vec<String>, bool) {
    match outputs {
        Ok(mut v) => {
            v.push(String::new());
            (v, false)
        }
        Err(reason) => {
            let mut v = vec![String::new(); width];
            v.push(reason);
            (v, true)
        }
    }
}

fn evaluate(config: &SweepConfig, cell: &Cell) -> std::result::Result<(Vec<String>, usize), String> {
    let tol = config.tolerances;
    let omega = get(cell, Param::Omega);
    let a = get(cell, Param::Acceleration);
    let det = DetectorConfig::new(omega).map_err(|e| e.to_string())?;
    let traj = Trajectory::new(a).map_err(|e| e.to_string())?;
    let fail = |e: udw_core::Error| e.to_string();
    match config.experiment {
        Experiment::ProbCavity | Experiment::AsymptoticCheck => {
            let sigma = get(cell, Param::Sigma);
            let l = get(cell, Param::Circumference);
            let sw = Switching::gaussian(sigma).map_err(fail)?;
            let defaults = ModeSumOptions::default();
            let opts = ModeSumOptions {
                rel_tol: tol.rel_tol.unwrap_or(defaults.rel_tol),
                amplitude_tol: tol.amplitude_tol.unwrap_or(defaults.amplitude_tol),
                ..defaults
            };
            let p = probability_modesum_with(&det, &sw, &traj, l, &opts).map_err(fail)?;
            if config.experiment == Experiment::ProbCavity {
                return Ok((vec![num(p.value), num(p.error_estimate), p.modes_used.to_string()], p.evaluations));
            }
            let n_max = config.options.n_max.unwrap_or_else(|| gaussian_mode_cutoff(sigma, l));
            let model = small_sigma_probability(&det, sigma, a, l, n_max).map_err(fail)?;
            Ok((
                vec![num(model), n_max.to_string(), num(p.value), num(p.error_estimate)],
                p.evaluations,
            ))
        }
        Experiment::RateSudden => {
            let sw = Switching::sudden(get(cell, Param::Duration)).map_err(fail)?;
            let opts = QuadOptions::default().with_rel_tol(tol.rel_tol.unwrap_or(1e-11));
            let r = rate_sudden_detailed(&det, &sw, &traj, get(cell, Param::Circumference), &opts).map_err(fail)?;
            Ok((vec![num(r.value), num(r.error_estimate)], r.evaluations))
        }
        Experiment::ProbContinuum => {
            let sw = Switching::gaussian(get(cell, Param::Sigma)).map_err(fail)?;
            let defaults = ContinuumOptions::default();
            let opts = ContinuumOptions { rel_tol: tol.rel_tol.unwrap_or(defaults.rel_tol), ..defaults };
            let p = probability_continuum_with(&det, &sw, &traj, get(cell, Param::IrCutoff), &opts).map_err(fail)?;
            Ok((vec![num(p.value), num(p.error_estimate), num(p.imag_residual)], p.evaluations))
        }
        Experiment::KmsFit | Experiment::DtdaGrid => unreachable!("handled by dedicated tables"),
    }
}

fn cell_table(config: &SweepConfig) -> Result<ResultTable> {
    let outputs = output_columns(config.experiment);
    let cells = cells(&config.parameters);
    let results: Vec<_> = cells.par_iter().map(|c| evaluate(config, c)).collect();

    let mut columns = param_columns(config);
    columns.extend(outputs.iter().map(|s| s.to_string()));
    columns.push("reason".into());
    let (mut rows, mut failures, mut evaluations) = (Vec::new(), 0, 0usize);
    for (cell, r) in cells.iter().zip(results) {
        let r = r.map(|(fields, evals)| {
            evaluations += evals;
            fields
        });
        let (fields, failed) = with_reason(r, outputs.len());
        failures += failed as usize;
        let mut row = param_fields(cell);
        row.extend(fields);
        rows.push(row);
    }
    Ok(ResultTable {
        columns,
        rows,
        metadata: vec![format!("integrand evaluations: {evaluations}")],
        failures,
    })
}

fn field_space(cell: &Cell) -> std::result::Result<FieldSpace, String> {
    let space = match cell.iter().find(|(p, _)| matches!(p, Param::Circumference | Param::IrCutoff)) {
        Some((Param::Circumference, l)) => FieldSpace::cavity(*l),
        Some((_, lambda)) => FieldSpace::continuum(*lambda),
        None => unreachable!("validated field space"),
    };
    space.map_err(|e| e.to_string())
}

fn kms_table(config: &SweepConfig) -> Result<ResultTable> {
    let outputs = output_columns(Experiment::KmsFit);
    let omegas = config
        .axis(Param::Omega)
        .map_or_else(udw_core::kms::default_omega_grid, Axis::values);
    let others: Vec<(Param, Axis)> = config
        .parameters
        .iter()
        .filter(|(p, _)| *p != Param::Omega)
        .cloned()
        .collect();
    let cells = cells(&others);
    let fits: Vec<_> = cells
        .par_iter()
        .map(|cell| -> std::result::Result<_, String> {
            let sw = Switching::gaussian(get(cell, Param::Sigma)).map_err(|e| e.to_string())?;
            let traj = Trajectory::new(get(cell, Param::Acceleration)).map_err(|e| e.to_string())?;
            let det = DetectorConfig::new(omegas[0]).map_err(|e| e.to_string())?;
            kms_fit(&det, &sw, &traj, &field_space(cell)?, &omegas).map_err(|e| e.to_string())
        })
        .collect();

    let mut columns = vec!["omega".to_string()];
    columns.extend(others.iter().map(|(p, _)| p.key().to_string()));
    columns.extend(outputs.iter().map(|s| s.to_string()));
    columns.push("reason".into());
    let (mut rows, mut failures) = (Vec::new(), 0);
    for (cell, fit) in cells.iter().zip(fits) {
        failures += fit.is_err() as usize;
        for (i, &w) in omegas.iter().enumerate() {
            let fields = fit.as_ref().map_err(Clone::clone).map(|f| {
                vec![
                    num(f.log_ratios[i]),
                    num(f.temperature),
                    num(f.slope),
                    num(f.intercept),
                    num(f.relative_residual()),
                    f.non_kms.to_string(),
                ]
            });
            let mut row = vec![w.to_string()];
            row.extend(param_fields(cell));
            row.extend(with_reason(fields, outputs.len()).0);
            rows.push(row);
        }
    }
    Ok(ResultTable { columns, rows, metadata: Vec::new(), failures })
}

fn dtda_table(config: &SweepConfig) -> Result<ResultTable> {
    let omega = config.axis(Param::Omega).expect("validated").values();
    let accel = config.axis(Param::Acceleration).expect("validated").values();
    let sigmas = config.axis(Param::Sigma).expect("validated").values();
    let spec = if omega.len() > 1 {
        GridSpec::OmegaSigma { acceleration: accel[0], omegas: omega.clone(), sigmas: sigmas.clone() }
    } else {
        GridSpec::AccelerationSigma { omega: omega[0], accelerations: accel.clone(), sigmas: sigmas.clone() }
    };
    let space_cell: Cell = config
        .parameters
        .iter()
        .filter(|(p, _)| matches!(p, Param::Circumference | Param::IrCutoff))
        .map(|(p, a)| (*p, a.values()[0]))
        .collect();
    let space = field_space(&space_cell).map_err(anyhow::Error::msg)?;
    let estimator = match config.options.estimator {
        EstimatorChoice::Pointwise => TemperatureEstimator::Pointwise,
        EstimatorChoice::LocalFit => match config.options.spread {
            Some(spread) => TemperatureEstimator::LocalFit { spread },
            None => TemperatureEstimator::default(),
        },
    };
    let grid = dtda_grid(&spec, &space, config.options.step, estimator)?;

    let outputs = output_columns(Experiment::DtdaGrid);
    let mut columns = param_columns(config);
    columns.extend(outputs.iter().map(|s| s.to_string()));
    columns.push("reason".into());
    let mut rows = Vec::new();
    for cell in cells(&config.parameters) {
        let x = if omega.len() > 1 { get(&cell, Param::Omega) } else { get(&cell, Param::Acceleration) };
        let col = spec.x().iter().position(|&v| v == x).expect("grid axis");
        let row = sigmas.iter().position(|&v| v == get(&cell, Param::Sigma)).expect("grid axis");
        let fields = match grid.dt_da[row][col] {
            Some(v) => Ok(vec![num(v)]),
            None => Err(grid
                .failures
                .iter()
                .find(|f| f.row == row && f.col == col)
                .map_or_else(|| "failed".to_string(), |f| f.reason.clone())),
        };
        let mut r = param_fields(&cell);
        r.extend(with_reason(fields, outputs.len()).0);
        rows.push(r);
    }
    let mut metadata = vec![format!("zero contour segments: {}", grid.zero_contour.len())];
    metadata.extend(
        grid.zero_contour
            .iter()
            .map(|[(x0, y0), (x1, y1)]| format!("segment: {x0:e} {y0:e} {x1:e} {y1:e}")),
    );
    Ok(ResultTable { columns, rows, metadata, failures: grid.failures.len() })
}
