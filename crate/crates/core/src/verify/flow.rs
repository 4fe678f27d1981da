use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::expr::{Expr, Point};
use crate::fdsolver::{Grid, Surface};
use crate::model::Equation;

use super::checks::residual_sweep;
use super::generator::Generator;
use super::report::{Report, VerifyError, Worst};

/// How flowed values are put back on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reconstruction {
    /// Weighted local quadratic least squares over the scattered image points.
    #[default]
    ScatteredQuadratic,
    /// For generators whose `ξ¹, ξ²` do not involve `u`: trace each target node
    /// back along the base flow, evaluate the input there and carry the value
    /// forward. Needs an expression input; no interpolation error.
    BaseFlowPullback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub reconstruction: Reconstruction,
    /// RK4 steps per trajectory; never fewer than 64.
    pub steps: usize,
    /// Neighbourhood radius in grid steps for the quadratic fit.
    pub radius: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            reconstruction: Reconstruction::ScatteredQuadratic,
            steps: 64,
            radius: 3.0,
        }
    }
}

impl FlowOptions {
    pub fn pullback() -> Self {
        FlowOptions {
            reconstruction: Reconstruction::BaseFlowPullback,
            ..FlowOptions::default()
        }
    }
}

/// What a flow acts on.
#[derive(Debug, Clone, Copy)]
pub enum FlowInput<'a> {
    Expr(&'a Expr),
    Surface(&'a Surface),
}

const MIN_NEIGHBOURS: usize = 6;

fn field(g: &Generator, s: [f64; 3]) -> Option<[f64; 3]> {
    g.eval(s[0], s[1], s[2])
        .ok()
        .filter(|v| v.iter().all(|c| c.is_finite()))
}

/// Integrates `d(x, t, u)/dε = (ξ¹, ξ², η)` from 0 to `eps` with classical RK4.
pub fn integrate(
    g: &Generator,
    start: (f64, f64, f64),
    eps: f64,
    steps: usize,
) -> Result<(f64, f64, f64), VerifyError> {
    let escape = VerifyError::Escape {
        x: start.0,
        t: start.1,
    };
    if eps == 0.0 {
        return Ok(start);
    }
    let steps = steps.max(64);
    let h = eps / steps as f64;
    let mut s = [start.0, start.1, start.2];
    let add = |s: [f64; 3], k: [f64; 3], c: f64| [s[0] + c * k[0], s[1] + c * k[1], s[2] + c * k[2]];
    for _ in 0..steps {
        let k1 = field(g, s).ok_or_else(|| escape.clone())?;
        let k2 = field(g, add(s, k1, h / 2.0)).ok_or_else(|| escape.clone())?;
        let k3 = field(g, add(s, k2, h / 2.0)).ok_or_else(|| escape.clone())?;
        let k4 = field(g, add(s, k3, h)).ok_or_else(|| escape.clone())?;
        for i in 0..3 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(escape);
    }
    Ok((s[0], s[1], s[2]))
}

/// Image of the graph of the input under `exp(eps·g)`, resampled on `target`.
/// Nodes without enough surrounding image points are masked.
pub fn flow_map(
    g: &Generator,
    input: FlowInput<'_>,
    eps: f64,
    target: &Grid,
    opts: &FlowOptions,
) -> Result<Surface, VerifyError> {
    match opts.reconstruction {
        Reconstruction::ScatteredQuadratic => scattered(g, input, eps, target, opts),
        Reconstruction::BaseFlowPullback => {
            let FlowInput::Expr(u) = input else {
                return Err(VerifyError::FrameMismatch(
                    "pullback reconstruction needs an expression input".into(),
                ));
            };
            if g.xi1.contains_var("u") || g.xi2.contains_var("u") {
                return Err(VerifyError::FrameMismatch(
                    "pullback reconstruction needs a projectable generator".into(),
                ));
            }
            pullback(g, u, eps, target, opts)
        }
    }
}

fn seeds(input: FlowInput<'_>, target: &Grid) -> Result<Vec<(f64, f64, f64)>, VerifyError> {
    match input {
        FlowInput::Expr(u) => {
            let mut out = Vec::with_capacity(target.nx() * target.nt());
            for &t in target.t() {
                for &x in target.x() {
                    let v = u
                        .eval(&Point::new(x, t, 0.0))
                        .map_err(|source| VerifyError::Domain { x, t, source })?;
                    out.push((x, t, v));
                }
            }
            Ok(out)
        }
        FlowInput::Surface(s) => {
            let g = &s.grid;
            let mut out = Vec::new();
            for n in 0..g.nt() {
                for i in 0..g.nx() {
                    if let Some(v) = s.get(i, n) {
                        out.push((g.x()[i], g.t()[n], v));
                    }
                }
            }
            Ok(out)
        }
    }
}

fn scattered(
    g: &Generator,
    input: FlowInput<'_>,
    eps: f64,
    target: &Grid,
    opts: &FlowOptions,
) -> Result<Surface, VerifyError> {
    let start = seeds(input, target)?;
    let images = start
        .par_iter()
        .map(|&p| integrate(g, p, eps, opts.steps))
        .collect::<Result<Vec<_>, _>>()?;
    let hx = (target.x()[target.nx() - 1] - target.x()[0]) / (target.nx() - 1) as f64;
    let ht = target.dt();
    let scaled: Vec<(f64, f64, f64)> = images.iter().map(|&(x, t, u)| (x / hx, t / ht, u)).collect();
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (k, p) in scaled.iter().enumerate() {
        buckets
            .entry((p.0.floor() as i64, p.1.floor() as i64))
            .or_default()
            .push(k);
    }
    let reach = opts.radius.ceil() as i64;
    let values: Vec<Option<f64>> = (0..target.nt() * target.nx())
        .into_par_iter()
        .map(|k| {
            let (i, n) = (k % target.nx(), k / target.nx());
            let (cx, ct) = (target.x()[i] / hx, target.t()[n] / ht);
            let (bx, bt) = (cx.floor() as i64, ct.floor() as i64);
            let mut near = Vec::new();
            for dx in -reach..=reach {
                for dt in -reach..=reach {
                    if let Some(ids) = buckets.get(&(bx + dx, bt + dt)) {
                        for &id in ids {
                            let p = scaled[id];
                            let d = ((p.0 - cx).powi(2) + (p.1 - ct).powi(2)).sqrt();
                            if d <= opts.radius {
                                near.push((p.0 - cx, p.1 - ct, p.2));
                            }
                        }
                    }
                }
            }
            local_quadratic(&near)
        })
        .collect();
    let mut out = Surface::new(target.clone());
    let mut any = false;
    for (k, v) in values.into_iter().enumerate() {
        if let Some(v) = v {
            out.set(k % target.nx(), k / target.nx(), v);
            any = true;
        }
    }
    if !any {
        return Err(VerifyError::Coverage);
    }
    Ok(out)
}

/// Value at the origin of a weighted quadratic fit, if the neighbourhood
/// surrounds the origin in both directions.
fn local_quadratic(near: &[(f64, f64, f64)]) -> Option<f64> {
    const TIE: f64 = 1e-9;
    if near.len() < MIN_NEIGHBOURS {
        return None;
    }
    let side = |f: fn(&(f64, f64, f64)) -> f64| {
        near.iter().any(|p| f(p) <= TIE) && near.iter().any(|p| f(p) >= -TIE)
    };
    if !(side(|p| p.0) && side(|p| p.1)) {
        return None;
    }
    let mut a = DMatrix::zeros(near.len(), 6);
    let mut b = DVector::zeros(near.len());
    for (r, &(dx, dt, u)) in near.iter().enumerate() {
        let w = (1.0 / (dx * dx + dt * dt + 1e-12)).sqrt();
        let row = [1.0, dx, dt, dx * dx, dx * dt, dt * dt];
        for (c, v) in row.iter().enumerate() {
            a[(r, c)] = w * v;
        }
        b[r] = w * u;
    }
    let svd = a.svd(true, true);
    let s = &svd.singular_values;
    let smax = s.max();
    if s.min() <= 1e-10 * smax {
        return None;
    }
    let c = svd.solve(&b, 0.0).ok()?;
    c[0].is_finite().then_some(c[0])
}

fn pullback(
    g: &Generator,
    u: &Expr,
    eps: f64,
    target: &Grid,
    opts: &FlowOptions,
) -> Result<Surface, VerifyError> {
    let nodes: Vec<(f64, f64)> = target
        .t()
        .iter()
        .flat_map(|&t| target.x().iter().map(move |&x| (x, t)))
        .collect();
    let values = nodes
        .par_iter()
        .map(|&(x, t)| {
            let (x0, t0, _) = integrate(g, (x, t, 0.0), -eps, opts.steps)?;
            let u0 = u
                .eval(&Point::new(x0, t0, 0.0))
                .map_err(|_| VerifyError::Escape { x, t })?;
            let (_, _, v) = integrate(g, (x0, t0, u0), eps, opts.steps)?;
            Ok(v)
        })
        .collect::<Result<Vec<f64>, VerifyError>>()?;
    let mut out = Surface::new(target.clone());
    for (k, v) in values.into_iter().enumerate() {
        out.set(k % target.nx(), k / target.nx(), v);
    }
    Ok(out)
}

/// Residual of a gridded surface with fourth-order central differences,
/// at every node whose five-point stencils in `x` and `t` are unmasked.
pub fn surface_residual(eq: &Equation, s: &Surface, tol: f64) -> Result<Report, VerifyError> {
    let g = &s.grid;
    let hx = g
        .uniform_dx()
        .ok_or(VerifyError::NonUniformGrid("surface residual"))?;
    let ht = g.dt();
    let mut worst = Worst::new();
    for n in 2..g.nt().saturating_sub(2) {
        for i in 2..g.nx().saturating_sub(2) {
            let xs: Option<Vec<f64>> = (0..5).map(|k| s.get(i + k - 2, n)).collect();
            let ts: Option<Vec<f64>> = (0..5).map(|k| s.get(i, n + k - 2)).collect();
            let (Some(xs), Some(ts)) = (xs, ts) else {
                continue;
            };
            let d1 = |v: &[f64], h: f64| (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h);
            let u_xx = (-xs[0] + 16.0 * xs[1] - 30.0 * xs[2] + 16.0 * xs[3] - xs[4]) / (12.0 * hx * hx);
            let (x, t) = (g.x()[i], g.t()[n]);
            let r = eq
                .residual_from_jet(x, xs[2], d1(&ts, ht), d1(&xs, hx), u_xx)
                .map_err(|source| VerifyError::Domain { x, t, source })?;
            worst.push(r, (x, t));
        }
    }
    if worst.n == 0 {
        return Err(VerifyError::Coverage);
    }
    Ok(worst.report("surface-residual", "", tol))
}

/// Flows `u` by each `ε` and checks the result against `equation(ε)`.
/// At `ε = 0` this is the exact residual sweep over the grid nodes.
pub fn solution_to_solution_check(
    g: &Generator,
    equation: &dyn Fn(f64) -> Result<Equation, VerifyError>,
    u: &Expr,
    epsilons: &[f64],
    grid: &Grid,
    opts: &FlowOptions,
    tol: f64,
) -> Result<Report, VerifyError> {
    if epsilons.is_empty() {
        return Err(VerifyError::Empty);
    }
    let mut worst: Option<Report> = None;
    let mut notes = Vec::new();
    let mut total = 0;
    for &eps in epsilons {
        let eq = equation(eps)?;
        let r = if eps == 0.0 {
            let pts: Vec<(f64, f64)> = grid
                .t()
                .iter()
                .flat_map(|&t| grid.x().iter().map(move |&x| (x, t)))
                .collect();
            residual_sweep(&eq, u, &pts, tol)?
        } else {
            let s = flow_map(g, FlowInput::Expr(u), eps, grid, opts)?;
            surface_residual(&eq, &s, tol)?
        };
        notes.push(format!("eps={eps}: {:.3e}", r.max));
        total += r.n;
        let replace = match &worst {
            None => true,
            Some(w) => r.max > w.max || r.max.is_nan(),
        };
        if replace {
            worst = Some(r);
        }
    }
    let w = worst.expect("non-empty");
    let mut r = Report::new("solution-to-solution", "", total, w.max, tol).with_note(notes.join(", "));
    r.argmax = w.argmax;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::verify::Chart;

    #[test]
    fn rk4_follows_exponential() {
        let g = Generator::new(Expr::x(), Expr::one(), Expr::u().scale(-1.0), Chart::Original);
        let (x, t, u) = integrate(&g, (2.0, 0.5, 3.0), 0.4, 64).unwrap();
        assert!((x - 2.0 * 0.4f64.exp()).abs() < 1e-10);
        assert!((t - 0.9).abs() < 1e-14);
        assert!((u - 3.0 * (-0.4f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn escape_is_reported() {
        let g = Generator::new(parse("log(x)", &[]).unwrap(), Expr::zero(), Expr::zero(), Chart::Original);
        assert!(matches!(
            integrate(&g, (-1.0, 0.0, 0.0), 0.1, 64),
            Err(VerifyError::Escape { .. })
        ));
    }

    #[test]
    fn zero_flow_is_identity() {
        let g = Generator::new(Expr::x(), Expr::one(), Expr::zero(), Chart::Original);
        let u = parse("x^2*t + x", &[]).unwrap();
        let grid = Grid::uniform((0.5, 2.0), 16, (0.0, 1.0), 11).unwrap();
        let s = flow_map(&g, FlowInput::Expr(&u), 0.0, &grid, &FlowOptions::default()).unwrap();
        let (e, _) = s.max_abs_error(&u).unwrap();
        assert!(e < 1e-12, "{e}");
        assert_eq!(s.valid_count(), 16 * 11);
    }

    #[test]
    fn quadratics_reconstruct_exactly() {
        let near: Vec<(f64, f64, f64)> = [(-1.0, -1.0), (1.0, -0.5), (0.3, 1.2), (-0.7, 0.4), (1.1, 1.0), (0.0, -1.3), (-1.2, 0.9)]
            .iter()
            .map(|&(x, t)| (x, t, 2.0 + x - 3.0 * t + x * x + 0.5 * x * t - t * t))
            .collect();
        assert!((local_quadratic(&near).unwrap() - 2.0).abs() < 1e-12);
        assert!(local_quadratic(&near[..5]).is_none());
        let one_sided: Vec<_> = near.iter().map(|p| (p.0.abs() + 0.1, p.1, p.2)).collect();
        assert!(local_quadratic(&one_sided).is_none());
    }

    #[test]
    fn surface_residual_of_heat_solution() {
        let u = parse("exp(t)*exp(x)", &[]).unwrap();
        // u_t − u_xx = 0
        let eq = Equation::heat(Expr::zero()).unwrap();
        let grid = Grid::uniform((0.0, 1.0), 41, (0.0, 0.5), 41).unwrap();
        let s = Surface::from_expr(grid, &u).unwrap();
        let r = surface_residual(&eq, &s, 1e-6).unwrap();
        assert!(r.pass, "{r}");
        assert_eq!(r.n, 37 * 37);
    }
}
