//! Crank-Nicolson pricing of terminal-value problems, with a convergence
//! study against a closed form.

use bondsym::fdsolver::{convergence_order, solve_terminal, Grid, SolverConfig};
use bondsym::model::{Params, PdeProblem};
use bondsym::solutions::{get_case, CaseId};
use bondsym::{parse, Expr};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Black-Scholes-Merton discounting: u = e^{β(t-T)}
    let beta = 0.05;
    let prob = PdeProblem::new(Params::new(0.0, beta, 1.0, 0.5, 0.0, 0.3), Expr::u().scale(beta))?;
    let grid = Grid::log_uniform((0.5, 2.0), 101, (0.0, 1.0), 101)?;
    let s = solve_terminal(&prob, &grid, &Expr::one(), &SolverConfig::default())?;
    let exact = parse("exp(0.05*(t-1))", &[])?;
    println!("BSM: max error {:.2e}", s.max_abs_error(&exact)?.0);

    // a nonlinear source, refined three times
    let c = get_case(CaseId::TGammaHalf);
    let cfg = SolverConfig::default().validation(&c.solution);
    let cv = convergence_order(
        &c.problem(),
        &c.solution,
        (0.25, 4.0),
        (0.5, 1.0),
        &[(50, 50), (100, 100), (200, 200), (400, 400)],
        &cfg,
    )?;
    for (h, e) in cv.steps.iter().zip(&cv.errors) {
        println!("T-GammaHalf h = {h:.4}: error {e:.3e}");
    }
    println!("observed order {:.3}", cv.order);

    let mut csv = Vec::new();
    s.write_csv(&mut csv)?;
    println!("\n{}", String::from_utf8(csv)?.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}
