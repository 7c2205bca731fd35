use std::fs;
use std::path::Path;

use num_complex::Complex;
use snewton::serieslinalg::assemble_block;
use snewton::{
    classify_start, newton_step, pade_from_series, parse_job, parse_system, polynomial_residual_order, run, Job,
    Matrix, NewtonRun, PadeApproximant, RunOptions, RunStatus, Series, StartClassification, Tolerances,
};

use crate::report;
use crate::{exit_code, Common, Outcome, EXIT_INPUT, EXIT_NUMERIC};

pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl From<snewton::Error> for CliError {
    fn from(e: snewton::Error) -> Self {
        CliError {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError {
        message: message.into(),
        code: EXIT_INPUT,
    }
}

fn load(path: &Path) -> Result<Job<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {}", path.display(), e)))?;
    parse_job(&text).map_err(|e| CliError {
        code: exit_code(&e),
        message: format!("{}: {}", path.display(), e),
    })
}

/// Classification of the first start point; `None` when the file has neither
/// a point nor an `augmented empty` statement.
fn classification(job: &Job<f64>, tol: &Tolerances) -> Result<Option<StartClassification>, CliError> {
    if job.augmented_empty {
        return Ok(Some(StartClassification::empty(job.original.n())));
    }
    match job.points.first() {
        Some(p) => Ok(Some(classify_start(&job.original, p, tol)?)),
        None => Ok(None),
    }
}

pub fn classify(path: &Path, common: &Common) -> Result<Outcome, CliError> {
    let job = load(path)?;
    let tol = common.tolerances();
    let Some(c) = classification(&job, &tol)? else {
        return Err(input_error("nothing to classify: give `start point` or `augmented empty`"));
    };
    let stdout = if common.json {
        report::classification_json(&c)
    } else {
        report::classification_text(&c)
    };
    Ok(Outcome { stdout, code: 0 })
}

fn run_all(job: &Job<f64>, degree: i64, max_steps: usize, tol: Tolerances) -> Result<Vec<NewtonRun<f64>>, CliError> {
    if degree < 0 {
        return Err(input_error("--degree must be non-negative"));
    }
    let opts = RunOptions {
        target_degree: degree,
        max_steps,
        tol,
    };
    job.starts()?.iter().map(|s| Ok(run(&job.system, s, &opts)?)).collect()
}

fn run_code(runs: &[NewtonRun<f64>]) -> u8 {
    if runs.iter().all(|r| r.status == RunStatus::Converged) {
        0
    } else {
        EXIT_NUMERIC
    }
}

/// Block matrix of the first step of each run, as the solver assembled it.
fn first_blocks(job: &Job<f64>, runs: &[NewtonRun<f64>]) -> Result<Vec<Option<Matrix<f64>>>, CliError> {
    let starts = job.starts()?;
    runs.iter()
        .zip(&starts)
        .map(|(r, s)| {
            let Some(step) = r.steps.first() else {
                return Ok(None);
            };
            let z: Vec<Series> = s.iter().map(|x| x.with_order(step.work_order)).collect();
            let out = newton_step(&job.system, &z, step.work_order)?;
            Ok((out.blocks > 0).then(|| assemble_block(&out.jacobian, out.blocks - 1)))
        })
        .collect()
}

pub fn solve(path: &Path, degree: i64, max_steps: usize, dump_blocks: bool, common: &Common) -> Result<Outcome, CliError> {
    let job = load(path)?;
    let tol = common.tolerances();
    let class = classification(&job, &tol)?;
    let runs = run_all(&job, degree, max_steps, tol)?;
    let originals = runs
        .iter()
        .map(|r| {
            if job.transforms.is_empty() {
                Ok(None)
            } else {
                let (x, reference) = job.to_original(&r.solution)?;
                let order = polynomial_residual_order(&reference, &x, tol.series)?;
                Ok(Some((x, order)))
            }
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let blocks = if dump_blocks { Some(first_blocks(&job, &runs)?) } else { None };
    let data = report::SolveReport {
        job: &job,
        classification: class.as_ref(),
        runs: &runs,
        originals: &originals,
        blocks: blocks.as_deref(),
    };
    let stdout = if common.json { data.json() } else { data.text() };
    Ok(Outcome {
        stdout,
        code: run_code(&runs),
    })
}

/// Reads a series in `t` written as a polynomial expression.
fn series_from_expr(expr: &str, order: i64) -> Result<Series, CliError> {
    let f = parse_system::<f64>(&format!("{};", expr), "t", &["__pade_unused"])?;
    let p = &f.polys()[0];
    let degree = p.terms().iter().map(|m| m.t_exp as usize).max().unwrap_or(0);
    let mut coeffs = vec![Complex::new(0.0, 0.0); degree + 1];
    for m in p.terms() {
        if m.x_exps.iter().any(|&e| e != 0) {
            return Err(input_error("--series must be an expression in t only"));
        }
        coeffs[m.t_exp as usize] += m.coeff;
    }
    Ok(Series::new(0, coeffs, order.max(degree as i64)))
}

#[allow(clippy::too_many_arguments)]
pub fn pade(
    l: usize,
    m: usize,
    path: Option<&Path>,
    series: Option<&str>,
    degree: Option<i64>,
    max_steps: usize,
    common: &Common,
) -> Result<Outcome, CliError> {
    let need = (l + m) as i64;
    if let Some(expr) = series {
        let s = series_from_expr(expr, need)?;
        let p = pade_from_series(&s, l, m)?;
        let stdout = if common.json {
            format!("{}\n", p.to_json())
        } else {
            format!("{}\n", report::pade_text("s", &p))
        };
        return Ok(Outcome { stdout, code: 0 });
    }
    let Some(path) = path else {
        return Err(input_error("give an input file or --series"));
    };
    let job = load(path)?;
    let runs = run_all(&job, degree.unwrap_or(need).max(need), max_steps, common.tolerances())?;
    let mut items: Vec<(usize, String, PadeApproximant<f64>)> = Vec::new();
    for (k, r) in runs.iter().enumerate() {
        for (name, s) in job.system.var_names().iter().zip(&r.solution) {
            items.push((k, name.clone(), pade_from_series(s, l, m)?));
        }
    }
    let stdout = if common.json {
        report::pade_list_json(&items)
    } else {
        items
            .iter()
            .map(|(k, name, p)| format!("run {}: {}\n", k, report::pade_text(name, p)))
            .collect()
    };
    Ok(Outcome {
        stdout,
        code: run_code(&runs),
    })
}

pub fn residual(path: &Path, series_json: Option<&Path>, common: &Common) -> Result<Outcome, CliError> {
    let job = load(path)?;
    let candidates = match series_json {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| input_error(format!("{}: {}", p.display(), e)))?;
            crate::series_json::read_runs(&text, job.system.var_names()).map_err(input_error)?
        }
        None => job.starts()?,
    };
    let orders = candidates
        .iter()
        .map(|z| Ok(polynomial_residual_order(&job.system, z, common.tol_series)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let stdout = if common.json {
        report::residual_json(&orders)
    } else {
        orders
            .iter()
            .enumerate()
            .map(|(k, r)| format!("start {}: residual order {}\n", k, report::order_text(*r)))
            .collect()
    };
    Ok(Outcome { stdout, code: 0 })
}
