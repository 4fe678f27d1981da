//! θ-scheme finite differences for the backward problem
//!
//! ```text
//! u_t + ½ρ²x^{2γ}u_xx + (α + βx − λρx^δ)u_x − f(x, u) = 0,   t < T,
//! ```
//!
//! with a terminal payoff, and optionally a moving lower barrier
//! `u(H(t), t) = R(t)` handled by front-fixing `y = x / H(t)`.

mod grid;
mod tridiag;

pub use grid::{Grid, Spacing, Surface};
pub use tridiag::{fd_weights, solve_tridiagonal};

use thiserror::Error;

use crate::expr::{Expr, ExprError, Point};
use crate::model::{Params, PdeProblem};
use crate::solutions::BarrierSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("zero pivot in tridiagonal solve at row {0}")]
    Singular(usize),
    #[error("non-finite value at time step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
    #[error("Newton iteration did not converge at time step {step} (update {update:e})")]
    NewtonDiverged { step: usize, update: f64 },
    #[error("barrier H({t}) = {h} leaves the grid")]
    BarrierExitsGrid { t: f64, h: f64 },
    #[error("need at least {0} resolutions")]
    TooFewResolutions(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Condition at the largest node.
#[derive(Debug, Clone, PartialEq)]
pub enum FarField {
    /// `u_xx = 0`.
    Linear,
    /// `u = g(x, t)`.
    Dirichlet(Expr),
}

/// Condition at the smallest node of a terminal solve.
#[derive(Debug, Clone, PartialEq)]
pub enum NearField {
    /// The PDE itself with one-sided differences.
    InteriorEquation,
    /// `u = g(x, t)`.
    Dirichlet(Expr),
}

/// How the barrier is imposed in [`solve_barrier`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BarrierRule {
    /// `u = R(t)` on the front-fixed line `y = 1`.
    #[default]
    Dirichlet,
}

/// Linearisation of `f` inside each time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceUpdate {
    /// Newton steps with the exact `∂f/∂u`.
    #[default]
    Newton,
    /// `f` lagged at the previous iterate.
    FixedPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// 1/2 is Crank–Nicolson, 1 is implicit Euler.
    pub theta: f64,
    pub far_field: FarField,
    pub near_field: NearField,
    pub barrier: BarrierRule,
    pub source: SourceUpdate,
    /// Corrections per time step; 1 gives the semi-implicit scheme.
    pub corrections: usize,
    /// Stopping tolerance for additional corrections.
    pub tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            theta: 0.5,
            far_field: FarField::Linear,
            near_field: NearField::InteriorEquation,
            barrier: BarrierRule::Dirichlet,
            source: SourceUpdate::Newton,
            corrections: 1,
            tolerance: 1e-12,
        }
    }
}

impl SolverConfig {
    /// Full Newton iteration up to `max` corrections per step.
    pub fn full_newton(mut self, max: usize) -> Self {
        self.corrections = max.max(1);
        self
    }

    /// Dirichlet data on both ends taken from a known solution.
    pub fn validation(mut self, exact: &Expr) -> Self {
        self.far_field = FarField::Dirichlet(exact.clone());
        self.near_field = NearField::Dirichlet(exact.clone());
        self
    }

    fn check(&self) -> Result<(), SolverError> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(SolverError::Config(format!("theta = {} outside [0, 1]", self.theta)));
        }
        if self.corrections == 0 {
            return Err(SolverError::Config("at least one correction per step".into()));
        }
        Ok(())
    }
}

/// A sparse row touching at most four consecutive columns.
#[derive(Debug, Clone, Copy)]
struct Row {
    start: usize,
    w: [f64; 4],
    len: usize,
    rhs: f64,
}

impl Row {
    fn at(&self, col: usize) -> f64 {
        if col >= self.start && col < self.start + self.len {
            self.w[col - self.start]
        } else {
            0.0
        }
    }

    fn last(&self) -> usize {
        self.start + self.len - 1
    }

    /// `self -= k * other`, assuming the result fits in four columns.
    fn eliminate(&mut self, k: f64, other: &Row) {
        let lo = self.start.min(other.start);
        let hi = self.last().max(other.last());
        let mut w = [0.0; 4];
        for (j, col) in (lo..=hi).enumerate() {
            w[j] = self.at(col) - k * other.at(col);
        }
        self.start = lo;
        self.len = hi - lo + 1;
        self.w = w;
        self.rhs -= k * other.rhs;
    }

    /// Removes the entry in `col`.
    fn drop_col(&mut self, col: usize) {
        let mut w = [0.0; 4];
        let mut start = self.start;
        let mut len = self.len;
        if col == self.start {
            w[..len - 1].copy_from_slice(&self.w[1..len]);
            start += 1;
            len -= 1;
        } else if col == self.last() {
            w[..len - 1].copy_from_slice(&self.w[..len - 1]);
            len -= 1;
        } else {
            return;
        }
        self.w = w;
        self.start = start;
        self.len = len;
    }
}

fn solve_rows(rows: &mut [Row]) -> Result<Vec<f64>, SolverError> {
    let n = rows.len();
    // bring the first and last rows into the tridiagonal band
    while rows[0].last() > 1 {
        let col = rows[0].last();
        let pivot = rows[col - 1];
        let k = rows[0].at(col) / pivot.at(col);
        rows[0].eliminate(k, &pivot);
        rows[0].drop_col(col);
    }
    while rows[n - 1].start < n - 2 {
        let col = rows[n - 1].start;
        let pivot = rows[col + 1];
        let k = rows[n - 1].at(col) / pivot.at(col);
        rows[n - 1].eliminate(k, &pivot);
        rows[n - 1].drop_col(col);
    }
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            sub[i] = r.at(i - 1);
        }
        diag[i] = r.at(i);
        if i + 1 < n {
            sup[i] = r.at(i + 1);
        }
        rhs[i] = r.rhs;
    }
    solve_tridiagonal(&sub, &diag, &sup, &rhs)
}

enum Edge<'a> {
    Equation,
    Linear,
    Dirichlet(Box<dyn Fn(f64, f64) -> Result<f64, ExprError> + 'a>),
}

/// Precomputed derivative stencils in the computational coordinate.
struct Stencils {
    first: Vec<(usize, Vec<f64>)>,
    second: Vec<(usize, Vec<f64>)>,
    top_second: (usize, Vec<f64>),
}

impl Stencils {
    fn new(y: &[f64]) -> Self {
        let n = y.len();
        let mut first = Vec::with_capacity(n);
        let mut second = Vec::with_capacity(n);
        let w = fd_weights(y[0], &y[0..4.min(n)], 2);
        let w3 = fd_weights(y[0], &y[0..3], 1);
        first.push((0, w3[1].clone()));
        second.push((0, w[2].clone()));
        for i in 1..n - 1 {
            let w = fd_weights(y[i], &y[i - 1..=i + 1], 2);
            first.push((i - 1, w[1].clone()));
            second.push((i - 1, w[2].clone()));
        }
        let w = fd_weights(y[n - 1], &y[n - 3..n], 2);
        first.push((n - 3, w[1].clone()));
        second.push((n - 3, w[2].clone()));
        let top_second = (n - 3, w[2].clone());
        Stencils {
            first,
            second,
            top_second,
        }
    }

    /// Row of the spatial operator `D ∂² + C ∂` at node `i`.
    fn operator(&self, i: usize, d: f64, c: f64) -> (usize, [f64; 4], usize) {
        let (s1, w1) = &self.first[i];
        let (s2, w2) = &self.second[i];
        let start = (*s1).min(*s2);
        let end = (s1 + w1.len()).max(s2 + w2.len());
        let mut w = [0.0; 4];
        for (k, v) in w1.iter().enumerate() {
            w[s1 + k - start] += c * v;
        }
        for (k, v) in w2.iter().enumerate() {
            w[s2 + k - start] += d * v;
        }
        (start, w, end - start)
    }
}

/// Problem data in the computational coordinate `y`, with `x = y·H(t)`.
struct Marching<'a> {
    params: Params,
    f: &'a Expr,
    f_u: Expr,
    y: &'a [f64],
    scale: &'a dyn Fn(f64) -> Result<(f64, f64), ExprError>,
    lower: Edge<'a>,
    upper: Edge<'a>,
    stencils: Stencils,
}

/// Time, diffusion and convection coefficients at each node.
type Coefficients = (Vec<f64>, Vec<f64>, Vec<f64>);

impl Marching<'_> {
    fn coefficients(&self, t: f64) -> Result<Coefficients, ExprError> {
        let (h, hp) = (self.scale)(t)?;
        let p = &self.params;
        let mut xs = Vec::with_capacity(self.y.len());
        let mut d = Vec::with_capacity(self.y.len());
        let mut c = Vec::with_capacity(self.y.len());
        for &y in self.y {
            let x = y * h;
            xs.push(x);
            d.push(p.diffusion(x) / (h * h));
            c.push(p.drift(x) / h - y * hp / h);
        }
        Ok((xs, d, c))
    }

    fn apply(&self, i: usize, d: f64, c: f64, v: &[f64]) -> f64 {
        let (start, w, len) = self.stencils.operator(i, d, c);
        (0..len).map(|k| w[k] * v[start + k]).sum()
    }

    fn source(&self, x: f64, u: f64) -> Result<f64, ExprError> {
        self.f.eval(&Point::new(x, 0.0, u))
    }

    /// One backward step from `u` at `t1` to `t0 = t1 − Δt`.
    fn step(
        &self,
        u: &[f64],
        t1: f64,
        t0: f64,
        cfg: &SolverConfig,
        step: usize,
    ) -> Result<Vec<f64>, SolverError> {
        let n = self.y.len();
        let dt = t1 - t0;
        let theta = cfg.theta;
        let (x1, d1, c1) = self.coefficients(t1)?;
        let (x0, d0, c0) = self.coefficients(t0)?;
        let is_equation = |i: usize| match (i, &self.lower, &self.upper) {
            (0, Edge::Equation, _) => true,
            (0, _, _) => false,
            (i, _, Edge::Equation) if i == n - 1 => true,
            (i, _, _) if i == n - 1 => false,
            _ => true,
        };
        let mut explicit = vec![0.0; n];
        for i in 0..n {
            if is_equation(i) {
                let lu = self.apply(i, d1[i], c1[i], u);
                explicit[i] =
                    u[i] + (1.0 - theta) * dt * (lu - self.source(x1[i], u[i])?);
            }
        }
        let mut pinned = [None, None];
        for (slot, (i, edge)) in [(0, &self.lower), (n - 1, &self.upper)].into_iter().enumerate() {
            if let Edge::Dirichlet(g) = edge {
                pinned[slot] = Some((i, g(x0[i], t0)?));
            }
        }
        let mut v = u.to_vec();
        for iteration in 0..cfg.corrections {
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let row = if is_equation(i) {
                    let (start, mut w, len) = self.stencils.operator(i, d0[i], c0[i]);
                    let lv: f64 = (0..len).map(|k| w[k] * v[start + k]).sum();
                    let fv = self.source(x0[i], v[i])?;
                    let g = v[i] - theta * dt * (lv - fv) - explicit[i];
                    let fu = match cfg.source {
                        SourceUpdate::Newton => self.f_u.eval(&Point::new(x0[i], 0.0, v[i]))?,
                        SourceUpdate::FixedPoint => 0.0,
                    };
                    for wk in w.iter_mut().take(len) {
                        *wk *= -theta * dt;
                    }
                    w[i - start] += 1.0 + theta * dt * fu;
                    Row {
                        start,
                        w,
                        len,
                        rhs: -g,
                    }
                } else {
                    let edge = if i == 0 { &self.lower } else { &self.upper };
                    match edge {
                        Edge::Dirichlet(_) => {
                            let (_, g) = pinned[usize::from(i != 0)].expect("pinned edge");
                            let mut w = [0.0; 4];
                            w[0] = 1.0;
                            Row {
                                start: i,
                                w,
                                len: 1,
                                rhs: g - v[i],
                            }
                        }
                        Edge::Linear => {
                            let (start, ws) = &self.stencils.top_second;
                            let mut w = [0.0; 4];
                            w[..3].copy_from_slice(ws);
                            let g: f64 = (0..3).map(|k| w[k] * v[start + k]).sum();
                            Row {
                                start: *start,
                                w,
                                len: 3,
                                rhs: -g,
                            }
                        }
                        Edge::Equation => unreachable!("handled as an equation row"),
                    }
                };
                rows.push(row);
            }
            let delta = solve_rows(&mut rows)?;
            let mut size: f64 = 0.0;
            let mut scale: f64 = 1.0;
            for (vi, di) in v.iter_mut().zip(&delta) {
                *vi += di;
                size = size.max(di.abs());
                scale = scale.max(vi.abs());
            }
            for (i, g) in pinned.iter().flatten() {
                v[*i] = *g;
            }
            if v.iter().any(|z| !z.is_finite()) {
                return Err(SolverError::NonFinite { step, t: t0 });
            }
            if size <= cfg.tolerance * scale {
                break;
            }
            if cfg.corrections > 1 && iteration + 1 == cfg.corrections {
                return Err(SolverError::NewtonDiverged { step, update: size });
            }
        }
        Ok(v)
    }

    fn run(
        &self,
        terminal: Vec<f64>,
        t_nodes: &[f64],
        cfg: &SolverConfig,
    ) -> Result<Vec<Vec<f64>>, SolverError> {
        let nt = t_nodes.len();
        let mut slices = vec![Vec::new(); nt];
        slices[nt - 1] = terminal;
        for n in (0..nt - 1).rev() {
            let next = self.step(&slices[n + 1], t_nodes[n + 1], t_nodes[n], cfg, nt - 1 - n)?;
            slices[n] = next;
        }
        Ok(slices)
    }
}

fn dirichlet<'a>(g: &'a Expr) -> Edge<'a> {
    Edge::Dirichlet(Box::new(move |x, t| g.eval(&Point::new(x, t, 0.0))))
}

fn payoff_values(payoff: &Expr, xs: impl Iterator<Item = f64>, t: f64) -> Result<Vec<f64>, ExprError> {
    xs.map(|x| payoff.eval(&Point::new(x, t, 0.0))).collect()
}

/// Backward march from `u(x, T) = payoff(x)` on the grid's time span.
pub fn solve_terminal(
    prob: &PdeProblem,
    grid: &Grid,
    payoff: &Expr,
    cfg: &SolverConfig,
) -> Result<Surface, SolverError> {
    cfg.check()?;
    if grid.x()[0] <= 0.0 {
        return Err(SolverError::Grid("x_min must be positive".into()));
    }
    let unit = |_t: f64| Ok((1.0, 0.0));
    let lower = match &cfg.near_field {
        NearField::InteriorEquation => Edge::Equation,
        NearField::Dirichlet(g) => dirichlet(g),
    };
    let upper = match &cfg.far_field {
        FarField::Linear => Edge::Linear,
        FarField::Dirichlet(g) => dirichlet(g),
    };
    let m = Marching {
        params: prob.params,
        f: &prob.source,
        f_u: prob.source.differentiate("u"),
        y: grid.x(),
        scale: &unit,
        lower,
        upper,
        stencils: Stencils::new(grid.x()),
    };
    let t_end = *grid.t().last().unwrap();
    let terminal = payoff_values(payoff, grid.x().iter().copied(), t_end)?;
    let slices = m.run(terminal, grid.t(), cfg)?;
    let mut s = Surface::new(grid.clone());
    for (n, slice) in slices.iter().enumerate() {
        for (i, v) in slice.iter().enumerate() {
            s.set(i, n, *v);
        }
    }
    Ok(s)
}

/// Result of a front-fixed barrier solve.
#[derive(Debug, Clone)]
pub struct BarrierSolution {
    /// Values on the `(y, t)` grid, `y = x / H(t) ∈ [1, y_max]`.
    pub front_fixed: Surface,
    /// `H(t_n)` for every time node.
    pub barrier: Vec<f64>,
    /// Interpolated onto the caller's grid; nodes below the barrier are masked.
    pub physical: Surface,
}

impl BarrierSolution {
    /// `(x, t, u)` at every computational node, `x = y·H(t)`.
    pub fn moving_nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let g = &self.front_fixed.grid;
        (0..g.nt()).flat_map(move |n| {
            (0..g.nx()).filter_map(move |i| {
                self.front_fixed
                    .get(i, n)
                    .map(|v| (g.x()[i] * self.barrier[n], g.t()[n], v))
            })
        })
    }

    /// Largest `|u − exact|` over the moving nodes.
    pub fn max_abs_error(&self, exact: &Expr) -> Result<(f64, (f64, f64)), ExprError> {
        let mut worst = (0.0, (f64::NAN, f64::NAN));
        for (x, t, v) in self.moving_nodes() {
            let e = (v - exact.eval(&Point::new(x, t, 0.0))?).abs();
            if e > worst.0 || e.is_nan() {
                worst = (e, (x, t));
            }
        }
        Ok(worst)
    }
}

/// Four-point Lagrange interpolation on a nonuniform axis.
fn cubic_at(nodes: &[f64], values: &[f64], z: f64) -> f64 {
    let n = nodes.len();
    let k = nodes.partition_point(|&y| y <= z).clamp(2, n - 2) - 2;
    let idx = k..(k + 4).min(n);
    let xs = &nodes[idx.clone()];
    let w = fd_weights(z, xs, 0);
    w[0].iter().zip(&values[idx]).map(|(a, b)| a * b).sum()
}

/// Down-and-out barrier problem on `x ≥ H(t)` with `u(H(t), t) = R(t)`.
pub fn solve_barrier(
    prob: &PdeProblem,
    grid: &Grid,
    spec: &BarrierSpec,
    payoff: &Expr,
    cfg: &SolverConfig,
) -> Result<BarrierSolution, SolverError> {
    cfg.check()?;
    let (x_min, x_max) = (grid.x()[0], grid.x()[grid.nx() - 1]);
    if x_min <= 0.0 {
        return Err(SolverError::Grid("x_min must be positive".into()));
    }
    let mut heights = Vec::with_capacity(grid.nt());
    for &t in grid.t() {
        let h = spec.h_at(t)?;
        if !(h > x_min && h < x_max) {
            return Err(SolverError::BarrierExitsGrid { t, h });
        }
        heights.push(h);
    }
    let h_min = heights.iter().copied().fold(f64::INFINITY, f64::min);
    let y_grid = Grid::for_gamma(
        prob.params.gamma,
        (1.0, x_max / h_min),
        grid.nx(),
        (grid.t()[0], grid.t()[grid.nt() - 1]),
        grid.nt(),
    )?;
    let h_expr = &spec.h;
    let hp_expr = spec.h_prime();
    let scale = |t: f64| -> Result<(f64, f64), ExprError> {
        let env = [("t", t)];
        Ok((h_expr.eval(&env)?, hp_expr.eval(&env)?))
    };
    let rebate = &spec.r;
    let lower = Edge::Dirichlet(Box::new(move |_x, t| rebate.eval(&[("t", t)])));
    let upper = match &cfg.far_field {
        FarField::Linear => Edge::Linear,
        FarField::Dirichlet(g) => dirichlet(g),
    };
    let m = Marching {
        params: prob.params,
        f: &prob.source,
        f_u: prob.source.differentiate("u"),
        y: y_grid.x(),
        scale: &scale,
        lower,
        upper,
        stencils: Stencils::new(y_grid.x()),
    };
    let nt = grid.nt();
    let t_end = grid.t()[nt - 1];
    let terminal = payoff_values(
        payoff,
        y_grid.x().iter().map(|y| y * heights[nt - 1]),
        t_end,
    )?;
    let slices = m.run(terminal, grid.t(), cfg)?;
    let mut front_fixed = Surface::new(y_grid.clone());
    let mut physical = Surface::new(grid.clone());
    let y_max = y_grid.x()[y_grid.nx() - 1];
    for (n, slice) in slices.iter().enumerate() {
        for (i, v) in slice.iter().enumerate() {
            front_fixed.set(i, n, *v);
        }
        for (i, &x) in grid.x().iter().enumerate() {
            let y = x / heights[n];
            if (1.0..=y_max).contains(&y) {
                physical.set(i, n, cubic_at(y_grid.x(), slice, y));
            }
        }
    }
    Ok(BarrierSolution {
        front_fixed,
        barrier: heights,
        physical,
    })
}

/// Observed order of a sequence of refinements.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log h`.
    pub order: f64,
    /// Every error at the rounding floor; the slope carries no information.
    pub exact: bool,
    /// Errors decrease with every refinement.
    pub monotone: bool,
}

/// Solves on each `(nx, nt)` resolution with the exact solution's terminal
/// slice as payoff and reports the L∞ error trend. The step `h` is the
/// spatial span over `nx − 1`, or `Δt` when every `nx` is the same.
pub fn convergence_order(
    prob: &PdeProblem,
    exact: &Expr,
    x_range: (f64, f64),
    t_range: (f64, f64),
    resolutions: &[(usize, usize)],
    cfg: &SolverConfig,
) -> Result<Convergence, SolverError> {
    if resolutions.len() < 3 {
        return Err(SolverError::TooFewResolutions(3));
    }
    let payoff = exact.subst("t", &Expr::constant(t_range.1));
    // refining only in time measures the time step
    let time_only = resolutions.iter().all(|r| r.0 == resolutions[0].0);
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    for &(nx, nt) in resolutions {
        let grid = Grid::for_gamma(prob.params.gamma, x_range, nx, t_range, nt)?;
        let s = solve_terminal(prob, &grid, &payoff, cfg)?;
        let (e, _) = s.max_abs_error(exact)?;
        errors.push(e);
        steps.push(if time_only {
            grid.dt()
        } else {
            (x_range.1 - x_range.0) / (nx - 1) as f64
        });
    }
    let exact_flag = errors.iter().all(|e| *e < 1e-12);
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let order = if exact_flag {
        f64::INFINITY
    } else {
        least_squares_slope(
            &steps.iter().map(|h| h.ln()).collect::<Vec<_>>(),
            &errors.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect::<Vec<_>>(),
        )
    };
    Ok(Convergence {
        steps,
        errors,
        order,
        exact: exact_flag,
        monotone,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn bsm(beta: f64) -> PdeProblem {
        let p = Params::new(0.0, beta, 1.0, 0.5, 0.0, 0.3);
        PdeProblem::new(p, Expr::u().scale(beta)).unwrap()
    }

    #[test]
    fn constant_payoff_bsm_matches_ode() {
        let prob = bsm(0.05);
        let grid = Grid::log_uniform((0.5, 2.0), 41, (0.0, 1.0), 101).unwrap();
        let s = solve_terminal(&prob, &grid, &Expr::one(), &SolverConfig::default()).unwrap();
        let exact = parse("exp(0.05*(t-1))", &[]).unwrap();
        let (e, _) = s.max_abs_error(&exact).unwrap();
        assert!(e < 1e-8, "error {e}");
    }

    #[test]
    fn terminal_slice_is_payoff() {
        let prob = bsm(0.05);
        let grid = Grid::log_uniform((0.5, 2.0), 21, (0.0, 1.0), 11).unwrap();
        let pay = parse("x^2", &[]).unwrap();
        let s = solve_terminal(&prob, &grid, &pay, &SolverConfig::default()).unwrap();
        for (i, x) in grid.x().iter().enumerate() {
            assert_eq!(s.get(i, 10).unwrap(), x * x);
        }
    }

    #[test]
    fn zero_steps_when_span_is_a_point() {
        let p = Params::new(0.0, 0.0, 0.5, 0.5, 0.0, 1.0);
        let prob = PdeProblem::new(p, Expr::zero()).unwrap();
        let grid = Grid::uniform((0.5, 2.0), 5, (0.0, 1.0), 3).unwrap();
        let s = solve_terminal(&prob, &grid, &Expr::one(), &SolverConfig::default()).unwrap();
        for n in 0..3 {
            for i in 0..5 {
                assert!((s.get(i, n).unwrap() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn config_rejects_bad_theta() {
        let cfg = SolverConfig {
            theta: 1.5,
            ..SolverConfig::default()
        };
        let prob = bsm(0.05);
        let grid = Grid::log_uniform((0.5, 2.0), 5, (0.0, 1.0), 3).unwrap();
        assert!(matches!(
            solve_terminal(&prob, &grid, &Expr::one(), &cfg),
            Err(SolverError::Config(_))
        ));
    }

    #[test]
    fn cubic_interpolation_reproduces_cubics() {
        let nodes = [1.0, 1.3, 1.7, 2.2, 2.8, 3.5];
        let values: Vec<f64> = nodes.iter().map(|y| y * y * y - 2.0 * y).collect();
        for z in [1.0, 1.1, 2.5, 3.5] {
            assert!((cubic_at(&nodes, &values, z) - (z * z * z - 2.0 * z)).abs() < 1e-12);
        }
    }

    #[test]
    fn slope_of_a_line() {
        assert!((least_squares_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
    }
}
