use crate::expr::{Expr, Point};
use crate::model::{Equation, PdeProblem};
use crate::sampling::Region;
use crate::solutions::BarrierSpec;
use crate::transforms::Transform;

use super::report::{Report, VerifyError, Worst};

/// Residual of `u` in `eq` at each point, exact symbolic derivatives.
pub fn residual_sweep(
    eq: &Equation,
    u: &Expr,
    points: &[(f64, f64)],
    tol: f64,
) -> Result<Report, VerifyError> {
    if points.is_empty() {
        return Err(VerifyError::Empty);
    }
    let op = eq.operator(u)?;
    let mut worst = Worst::new();
    for &(x, t) in points {
        let r = op
            .eval(x, t)
            .map_err(|source| VerifyError::Domain { x, t, source })?;
        worst.push(r, (x, t));
    }
    Ok(worst.report("pde-residual", "", tol))
}

/// [`residual_sweep`] over `n` low-discrepancy points of `region`.
pub fn pde_residual_sweep(
    prob: &PdeProblem,
    u: &Expr,
    region: &Region,
    n: usize,
    tol: f64,
    seed: u64,
) -> Result<Report, VerifyError> {
    residual_sweep(&Equation::Bond(prob.clone()), u, &region.sample(n, seed), tol)
}

/// `max |u(x, T) − 1|` over `xs`.
pub fn terminal_check(u: &Expr, t_end: f64, xs: &[f64], tol: f64) -> Result<Report, VerifyError> {
    if xs.is_empty() {
        return Err(VerifyError::Empty);
    }
    let mut worst = Worst::new();
    for &x in xs {
        let v = u
            .eval(&Point::new(x, t_end, 0.0))
            .map_err(|source| VerifyError::Domain { x, t: t_end, source })?;
        worst.push(v - 1.0, (x, t_end));
    }
    Ok(worst.report("terminal", "", tol))
}

/// `max |u(H(t), t) − R(t)|` over `ts`.
pub fn barrier_check(
    u: &Expr,
    spec: &BarrierSpec,
    ts: &[f64],
    tol: f64,
) -> Result<Report, VerifyError> {
    if ts.is_empty() {
        return Err(VerifyError::Empty);
    }
    let mut worst = Worst::new();
    for &t in ts {
        let at = |e: &Expr, x: f64| {
            e.eval(&Point::new(x, t, 0.0))
                .map_err(|source| VerifyError::Domain { x, t, source })
        };
        let h = at(&spec.h, f64::NAN)?;
        worst.push(at(u, h)? - at(&spec.r, h)?, (h, t));
    }
    Ok(worst.report("barrier", "", tol))
}

/// Largest coordinate-wise deviation of `pull(push(p))` from `p`.
pub fn roundtrip_check(
    transform: &Transform,
    points: &[(f64, f64, f64)],
    tol: f64,
) -> Result<Report, VerifyError> {
    if points.is_empty() {
        return Err(VerifyError::Empty);
    }
    let mut worst = Worst::new();
    for &(x, t, u) in points {
        let domain = |source| VerifyError::Domain { x, t, source };
        let (a, b, c) = transform.push_point(x, t, u).map_err(domain)?;
        let (x2, t2, u2) = transform.pull_point(a, b, c).map_err(domain)?;
        let dev = (x2 - x).abs().max((t2 - t).abs()).max((u2 - u).abs());
        worst.push(if dev.is_nan() { f64::NAN } else { dev }, (x, t));
    }
    Ok(worst.report("roundtrip", "", tol))
}

/// Three-point collinearity of `log H(t)` over consecutive triples of `ts`:
/// `(t₃−t₂)·log H₁ − (t₃−t₁)·log H₂ + (t₂−t₁)·log H₃`, which vanishes
/// exactly when `H = c·e^{a t}`.
pub fn exponential_family_check(
    spec: &BarrierSpec,
    ts: &[f64],
    tol: f64,
) -> Result<Report, VerifyError> {
    if ts.len() < 3 {
        return Err(VerifyError::Empty);
    }
    let logs = ts
        .iter()
        .map(|&t| {
            spec.h_at(t)
                .map(f64::ln)
                .map_err(|source| VerifyError::Domain { x: f64::NAN, t, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst = Worst::new();
    for k in 0..ts.len() - 2 {
        let (t1, t2, t3) = (ts[k], ts[k + 1], ts[k + 2]);
        let r = (t3 - t2) * logs[k] - (t3 - t1) * logs[k + 1] + (t2 - t1) * logs[k + 2];
        worst.push(r, (f64::NAN, t2));
    }
    Ok(worst.report("exponential-family", "", tol))
}
