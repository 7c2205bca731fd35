//! Newton's method on truncated series.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::poly::{Jacobian, PolySystem};
use crate::scalar::Real;
use crate::series::{TruncatedSeries, EXACT};
use crate::serieslinalg::{
    block_solve, linearize, numeric_rank, staggered_solve, BlockPath, MatrixSeries, VectorSeries,
    DEFAULT_RANK_TOL,
};

/// Tolerances shared by classification and the driver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative singular value cutoff for rank decisions.
    pub rank: f64,
    /// Absolute bound on `|f_i(p)|` for a start point.
    pub residual: f64,
    /// Relative size below which a residual coefficient counts as zero.
    pub series: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: DEFAULT_RANK_TOL,
            residual: 1e-8,
            series: 1e-10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartKind {
    RegularStart,
    SingularStart,
    EmptyAugmented,
}

impl StartKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StartKind::RegularStart => "RegularStart",
            StartKind::SingularStart => "SingularStart",
            StartKind::EmptyAugmented => "EmptyAugmented",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StartClassification {
    pub kind: StartKind,
    /// Numerical rank of the augmented Jacobian, when a point was examined.
    pub rank: Option<usize>,
    /// The rank a regular point would have (`n + 1`).
    pub full_rank: usize,
}

impl StartClassification {
    pub fn empty(n: usize) -> Self {
        Self {
            kind: StartKind::EmptyAugmented,
            rank: None,
            full_rank: n + 1,
        }
    }
}

/// Decides from the augmented Jacobian at `p = (0, p_1, ..., p_n)` whether
/// plain Newton applies.
pub fn classify_start<T: Real>(f: &PolySystem<T>, p: &[Complex<T>], tol: &Tolerances) -> Result<StartClassification> {
    if p.len() != f.n() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "start point needs {} coordinates (t first), got {}",
            f.n() + 1,
            p.len()
        )));
    }
    if p[0].norm() > T::zero() {
        return Err(Error::Input("start point must have t = 0".into()));
    }
    let vals = f.eval_point(p[0], &p[1..])?;
    let worst = vals.iter().map(|v| v.norm()).fold(T::zero(), |a, b| if b > a { b } else { a });
    if !(worst <= T::lit(tol.residual)) {
        return Err(Error::NotOnVariety(worst.to_f64().unwrap_or(f64::INFINITY)));
    }
    let rank = numeric_rank(&f.jacobian_aug(p)?, T::lit(tol.rank));
    let full_rank = f.n() + 1;
    Ok(StartClassification {
        kind: if rank == full_rank {
            StartKind::RegularStart
        } else {
            StartKind::SingularStart
        },
        rank: Some(rank),
        full_rank,
    })
}

/// Which linear solver produced an update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolvePath {
    Staggered,
    Structured,
    FullBlock,
    /// The residual already vanished to the working order.
    None,
}

impl SolvePath {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolvePath::Staggered => "staggered",
            SolvePath::Structured => "structured",
            SolvePath::FullBlock => "block",
            SolvePath::None => "none",
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepOutcome<T> {
    pub dz: Vec<TruncatedSeries<T>>,
    pub exact: bool,
    pub path: SolvePath,
    /// Lowest exponent in the Jacobian series.
    pub a: i64,
    /// Lowest exponent in the residual series (`None` if it vanished).
    pub b: Option<i64>,
    /// Rank of `A_0`.
    pub leading_rank: usize,
    /// The linearized Jacobian, kept for diagnostics.
    pub jacobian: MatrixSeries<T>,
    /// Number of coefficient blocks solved for.
    pub blocks: usize,
}

/// One Newton step `J(z) dz = -f(z)` with everything truncated at `work_order`.
pub fn newton_step<T: Real>(f: &PolySystem<T>, z: &[TruncatedSeries<T>], work_order: i64) -> Result<StepOutcome<T>> {
    step_with(f, &f.jacobian(), z, work_order, T::lit(DEFAULT_RANK_TOL))
}

fn step_with<T: Real>(
    f: &PolySystem<T>,
    jac: &Jacobian<T>,
    z: &[TruncatedSeries<T>],
    w: i64,
    rank_tol: T,
) -> Result<StepOutcome<T>> {
    let fz = f.evaluate(z, w)?;
    let jz = jac.eval_series(z, w);
    let a_ser = linearize(&jz)?;
    let Some(a0) = a_ser.leading() else {
        return Err(Error::ZeroJacobian);
    };
    let a = a_ser.base();
    let leading_rank = numeric_rank(a0, rank_tol);
    let neg: Vec<TruncatedSeries<T>> = fz.iter().map(|s| s.neg()).collect();
    let b_ser = VectorSeries::from_series(&neg)?;
    if b_ser.is_zero() {
        return Ok(StepOutcome {
            dz: vec![TruncatedSeries::zero(w); f.n()],
            exact: true,
            path: SolvePath::None,
            a,
            b: None,
            leading_rank,
            jacobian: a_ser,
            blocks: 0,
        });
    }
    let b = b_ser.base();
    let d = (w - a.max(b)).max(0) as usize;
    let square = a_ser.rows() == a_ser.cols();
    let staggered = if square { staggered_solve(&a_ser, &b_ser, d).ok() } else { None };
    let (x, exact, path) = match staggered {
        Some(x) => (x, true, SolvePath::Staggered),
        None => {
            let sol = block_solve(&a_ser, &b_ser, d)?;
            let path = match sol.path {
                BlockPath::Structured => SolvePath::Structured,
                BlockPath::FullBlock => SolvePath::FullBlock,
            };
            (sol.x, sol.exact, path)
        }
    };
    let dz = x_to_series(&x, b - a + d as i64, f.n());
    Ok(StepOutcome {
        dz,
        exact,
        path,
        a,
        b: Some(b),
        leading_rank,
        jacobian: a_ser,
        blocks: d + 1,
    })
}

fn x_to_series<T: Real>(x: &VectorSeries<T>, order: i64, n: usize) -> Vec<TruncatedSeries<T>> {
    if x.is_zero() {
        return vec![TruncatedSeries::zero(order); n];
    }
    x.to_series(order)
}

/// Lowest exponent whose coefficient in some `f_i(z)` exceeds
/// `tol * max(1, |z|)`; if none does, one past the evaluated truncation order.
/// Pass series of order [`EXACT`] to substitute polynomials exactly.
pub fn residual_order<T: Real>(f: &PolySystem<T>, z: &[TruncatedSeries<T>], tol: f64) -> Result<i64> {
    let fz = f.evaluate(z, EXACT)?;
    let scale = z.iter().map(|s| s.max_norm()).fold(T::one(), |a, b| if b > a { b } else { a });
    let cut = T::lit(tol) * scale;
    let mut best: Option<i64> = None;
    for s in &fz {
        for (k, c) in s.coeffs().iter().enumerate() {
            if c.norm() > cut {
                let e = s.base() + k as i64;
                best = Some(best.map_or(e, |b| b.min(e)));
                break;
            }
        }
    }
    let order = fz.iter().map(|s| s.order()).min().unwrap_or(EXACT);
    Ok(match best {
        Some(e) if e <= order => e,
        _ => order.saturating_add(1),
    })
}

/// Residual order of `z` read as exact polynomials; `None` when it vanishes identically.
pub fn polynomial_residual_order<T: Real>(f: &PolySystem<T>, z: &[TruncatedSeries<T>], tol: f64) -> Result<Option<i64>> {
    let exact: Vec<_> = z.iter().map(|s| s.with_order(EXACT)).collect();
    let r = residual_order(f, &exact, tol)?;
    Ok(if r >= EXACT / 2 { None } else { Some(r) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxSteps,
    Stagnation,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxSteps => "max_steps",
            RunStatus::Stagnation => "stagnation",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub work_order: i64,
    pub a: i64,
    pub b: Option<i64>,
    pub leading_rank: usize,
    pub path: SolvePath,
    pub exact: bool,
    pub accepted: bool,
    /// Residual order of the iterate after this step (`None` means it vanishes).
    pub residual_order: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct NewtonRun<T> {
    pub solution: Vec<TruncatedSeries<T>>,
    pub steps: Vec<StepRecord>,
    /// Residual order of `solution` as polynomials; `None` means it vanishes.
    pub converged_order: Option<i64>,
    pub status: RunStatus,
    /// Whether the first linearization had `a = 0` and full-rank `A_0`.
    pub regular: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub target_degree: i64,
    pub max_steps: usize,
    pub tol: Tolerances,
}

impl RunOptions {
    pub fn new(target_degree: i64) -> Self {
        Self {
            target_degree,
            max_steps: 16,
            tol: Tolerances::default(),
        }
    }
}

fn order_key(r: Option<i64>) -> i64 {
    r.unwrap_or(i64::MAX)
}

/// Iterates Newton steps with a doubling working order until the residual
/// order passes the target, the step budget runs out, or progress stalls.
///
/// From a regular start the residual only has to pass `target_degree`. A
/// singular start can fix a coefficient only through equations of higher
/// order, so the run keeps going to `2 * target_degree` (at least
/// `target_degree + 4`) before truncating.
pub fn run<T: Real>(f: &PolySystem<T>, start: &[TruncatedSeries<T>], opts: &RunOptions) -> Result<NewtonRun<T>> {
    if start.len() != f.n() {
        return Err(Error::DimensionMismatch(format!(
            "start has {} series, system has {} variables",
            start.len(),
            f.n()
        )));
    }
    let target = opts.target_degree.max(0);
    let rank_tol = T::lit(opts.tol.rank);
    let jac = f.jacobian();

    let probe_order = target.max(4);
    let probe_z: Vec<_> = start.iter().map(|s| s.with_order(probe_order)).collect();
    let probe = step_with(f, &jac, &probe_z, probe_order, rank_tol)?;
    let regular = probe.a == 0 && probe.leading_rank == f.n();
    let ceiling = if regular { target } else { target + target.max(4) };
    let gap = probe.b.map_or(0, |b| b - probe.a).max(0);
    // A singular step fixes the order-r residual only with about `gap`
    // further orders in hand.
    let cap = ceiling + 1 + if regular { 0 } else { gap } + probe.a.max(0);
    let mut w = 4.max(2 * gap + 2).min(cap).max(1);

    let mut z: Vec<TruncatedSeries<T>> = start.to_vec();
    let mut r = polynomial_residual_order(f, &z, opts.tol.series)?;
    let mut steps = Vec::new();
    let mut stalls = 0;
    let mut status = RunStatus::MaxSteps;
    for _ in 0..opts.max_steps {
        if order_key(r) > ceiling {
            status = RunStatus::Converged;
            break;
        }
        let zw: Vec<_> = z.iter().map(|s| s.with_order(w)).collect();
        let mut out = step_with(f, &jac, &zw, w, rank_tol)?;
        let mut candidate: Vec<_> = zw.iter().zip(&out.dz).map(|(a, b)| a.add(b)).collect();
        let mut r_new = polynomial_residual_order(f, &candidate, opts.tol.series)?;
        if !regular && order_key(r_new) <= order_key(r) {
            // Near a singular point the top coefficients may have been fixed
            // without the equations that determine them; a correction that
            // starts at the residual order cannot reach them, so drop them
            // and let the step recompute.
            if let Some(r0) = r {
                let zt: Vec<_> = z.iter().map(|s| s.truncate((r0 - 1 - gap).max(0)).with_order(w)).collect();
                let retry = step_with(f, &jac, &zt, w, rank_tol)?;
                let cand: Vec<_> = zt.iter().zip(&retry.dz).map(|(a, b)| a.add(b)).collect();
                let rr = polynomial_residual_order(f, &cand, opts.tol.series)?;
                if order_key(rr) > order_key(r_new) {
                    out = retry;
                    candidate = cand;
                    r_new = rr;
                }
            }
        }
        let accepted = order_key(r_new) >= order_key(r);
        if order_key(r_new) > order_key(r) {
            stalls = 0;
        } else {
            stalls += 1;
        }
        if accepted {
            z = candidate;
            r = r_new;
        }
        steps.push(StepRecord {
            work_order: w,
            a: out.a,
            b: out.b,
            leading_rank: out.leading_rank,
            path: out.path,
            exact: out.exact,
            accepted,
            residual_order: r,
        });
        if order_key(r) > ceiling {
            status = RunStatus::Converged;
            break;
        }
        if stalls >= 2 && w >= cap {
            status = RunStatus::Stagnation;
            break;
        }
        w = (2 * w).min(cap);
    }
    let solution: Vec<_> = z.iter().map(|s| s.truncate(target)).collect();
    let converged_order = polynomial_residual_order(f, &solution, opts.tol.series)?;
    Ok(NewtonRun {
        solution,
        steps,
        converged_order,
        status,
        regular,
    })
}
