use std::io::{self, Write};

use crate::expr::{Expr, ExprError};
use crate::sampling::linspace;

use super::SolverError;

/// How the spatial nodes were laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Uniform,
    LogUniform,
    Custom,
}

/// Tensor grid: strictly increasing `x` nodes and a uniform partition in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x: Vec<f64>,
    t: Vec<f64>,
    spacing: Spacing,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0]) && v.iter().all(|z| z.is_finite())
}

impl Grid {
    pub fn new(x: Vec<f64>, t: Vec<f64>) -> Result<Self, SolverError> {
        Self::with_spacing(x, t, Spacing::Custom)
    }

    fn with_spacing(x: Vec<f64>, t: Vec<f64>, spacing: Spacing) -> Result<Self, SolverError> {
        if x.len() < 3 || t.len() < 3 {
            return Err(SolverError::Grid("at least 3 nodes per axis".into()));
        }
        if !strictly_increasing(&x) || !strictly_increasing(&t) {
            return Err(SolverError::Grid("nodes must be strictly increasing".into()));
        }
        let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
        if t
            .iter()
            .enumerate()
            .any(|(n, tn)| (tn - (t[0] + n as f64 * dt)).abs() > 1e-9 * dt.max(1.0))
        {
            return Err(SolverError::Grid("time nodes must be uniform".into()));
        }
        Ok(Grid { x, t, spacing })
    }

    pub fn uniform(x: (f64, f64), nx: usize, t: (f64, f64), nt: usize) -> Result<Self, SolverError> {
        Self::with_spacing(linspace(x.0, x.1, nx), linspace(t.0, t.1, nt), Spacing::Uniform)
    }

    pub fn log_uniform(
        x: (f64, f64),
        nx: usize,
        t: (f64, f64),
        nt: usize,
    ) -> Result<Self, SolverError> {
        if x.0 <= 0.0 {
            return Err(SolverError::Grid("log spacing needs x_min > 0".into()));
        }
        let xs = linspace(x.0.ln(), x.1.ln(), nx)
            .into_iter()
            .map(f64::exp)
            .collect();
        Self::with_spacing(xs, linspace(t.0, t.1, nt), Spacing::LogUniform)
    }

    /// Log-uniform in `x` when `gamma ≥ 1/2`, uniform otherwise.
    pub fn for_gamma(
        gamma: f64,
        x: (f64, f64),
        nx: usize,
        t: (f64, f64),
        nt: usize,
    ) -> Result<Self, SolverError> {
        if gamma >= 0.5 {
            Self::log_uniform(x, nx, t, nt)
        } else {
            Self::uniform(x, nx, t, nt)
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn nt(&self) -> usize {
        self.t.len()
    }

    pub fn dt(&self) -> f64 {
        self.t[1] - self.t[0]
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Uniform `x` step, if the nodes are uniform to rounding.
    pub fn uniform_dx(&self) -> Option<f64> {
        let n = self.x.len();
        let h = (self.x[n - 1] - self.x[0]) / (n - 1) as f64;
        self.x
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
            .then_some(h)
    }
}

/// Values `u[i][n]` at `(x_i, t_n)` with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub grid: Grid,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl Surface {
    pub fn new(grid: Grid) -> Self {
        let len = grid.nx() * grid.nt();
        Surface {
            grid,
            values: vec![f64::NAN; len],
            mask: vec![false; len],
        }
    }

    /// Evaluates `u(x, t)` at every node.
    pub fn from_expr(grid: Grid, u: &Expr) -> Result<Self, ExprError> {
        let mut s = Surface::new(grid);
        for n in 0..s.grid.nt() {
            for i in 0..s.grid.nx() {
                let v = u.eval(&[("x", s.grid.x[i]), ("t", s.grid.t[n])])?;
                s.set(i, n, v);
            }
        }
        Ok(s)
    }

    fn index(&self, i: usize, n: usize) -> usize {
        n * self.grid.nx() + i
    }

    pub fn get(&self, i: usize, n: usize) -> Option<f64> {
        let k = self.index(i, n);
        self.mask[k].then_some(self.values[k])
    }

    pub fn set(&mut self, i: usize, n: usize, v: f64) {
        let k = self.index(i, n);
        self.values[k] = v;
        self.mask[k] = true;
    }

    pub fn clear(&mut self, i: usize, n: usize) {
        let k = self.index(i, n);
        self.values[k] = f64::NAN;
        self.mask[k] = false;
    }

    pub fn is_valid(&self, i: usize, n: usize) -> bool {
        self.mask[self.index(i, n)]
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    /// The time slice `n` as a vector (masked entries are NaN).
    pub fn slice(&self, n: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.values[n * nx..(n + 1) * nx]
    }

    /// Largest `|u − exact|` over valid nodes and where it occurs.
    pub fn max_abs_error(&self, exact: &Expr) -> Result<(f64, (f64, f64)), ExprError> {
        let mut worst = (0.0, (f64::NAN, f64::NAN));
        for n in 0..self.grid.nt() {
            for i in 0..self.grid.nx() {
                if let Some(v) = self.get(i, n) {
                    let (x, t) = (self.grid.x[i], self.grid.t[n]);
                    let e = (v - exact.eval(&[("x", x), ("t", t)])?).abs();
                    if e > worst.0 || e.is_nan() {
                        worst = (e, (x, t));
                    }
                }
            }
        }
        Ok(worst)
    }

    /// CSV with header `x,t,u`, ordered by `t` then `x`; masked nodes are skipped.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,t,u")?;
        for n in 0..self.grid.nt() {
            for i in 0..self.grid.nx() {
                if let Some(v) = self.get(i, n) {
                    writeln!(out, "{},{},{}", self.grid.x[i], self.grid.t[n], v)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(vec![1.0, 2.0], vec![0.0, 0.5, 1.0]).is_err());
        assert!(Grid::new(vec![1.0, 1.0, 2.0], vec![0.0, 0.5, 1.0]).is_err());
        assert!(Grid::new(vec![1.0, 1.5, 2.0], vec![0.0, 0.2, 1.0]).is_err());
        assert!(Grid::log_uniform((0.0, 1.0), 5, (0.0, 1.0), 3).is_err());
        let g = Grid::for_gamma(1.0, (0.5, 2.0), 3, (0.0, 1.0), 3).unwrap();
        assert_eq!(g.spacing(), Spacing::LogUniform);
        assert!((g.x()[1] - 1.0).abs() < 1e-15);
        assert!(g.uniform_dx().is_none());
        let g = Grid::for_gamma(0.3, (0.5, 2.0), 4, (0.0, 1.0), 3).unwrap();
        assert_eq!(g.uniform_dx(), Some(0.5));
    }

    #[test]
    fn csv_layout() {
        let g = Grid::uniform((1.0, 3.0), 3, (0.0, 1.0), 3).unwrap();
        let mut s = Surface::from_expr(g, &(Expr::x() + Expr::t())).unwrap();
        s.clear(0, 0);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,t,u");
        assert_eq!(lines[1], "2,0,2");
        assert_eq!(lines.len(), 9);
        assert_eq!(s.valid_count(), 8);
    }
}
