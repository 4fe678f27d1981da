//! Front-fixing solve of a down-and-out problem with an exponential barrier,
//! compared with the B-Generic closed form.

use bondsym::fdsolver::{solve_barrier, Grid, SolverConfig};
use bondsym::solutions::{get_case, CaseId};
use bondsym::Expr;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = get_case(CaseId::BGeneric);
    let spec = c.barrier().expect("barrier case");
    let t_end = c.terminal_time();
    let payoff = c.solution.subst("t", &Expr::constant(t_end));
    println!("H(t) = {}", spec.h);
    for x_max in [2.5, 2.0, 1.5] {
        let grid = Grid::for_gamma(c.params.gamma, (0.45, x_max), 200, (0.0, t_end), 200)?;
        let cfg = SolverConfig::default().validation(&c.solution);
        let s = solve_barrier(&c.problem(), &grid, spec, &payoff, &cfg)?;
        let (e, at) = s.max_abs_error(&c.solution)?;
        println!("x up to {x_max}: max error {e:.2e} at x = {:.3}, t = {:.3}", at.0, at.1);
    }

    let grid = Grid::for_gamma(c.params.gamma, (0.45, 1.5), 40, (0.0, t_end), 5)?;
    let s = solve_barrier(&c.problem(), &grid, spec, &payoff, &SolverConfig::default())?;
    for (x, t, u) in s.moving_nodes().step_by(40).take(5) {
        println!("barrier node x = {x:.4}, t = {t:.2}: u = {u:.6}");
    }
    Ok(())
}
