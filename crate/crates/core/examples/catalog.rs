//! The eight closed-form solutions: constraints, residual sweeps and the
//! effect of a small perturbation.

use bondsym::solutions::catalog;
use bondsym::verify::pde_residual_sweep;
use bondsym::Expr;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for c in catalog() {
        let prob = c.problem();
        let exact = pde_residual_sweep(&prob, &c.solution, &c.region, 200, 1e-8, 1)?;
        let bumped = &c.solution + 1e-3 * Expr::x();
        let off = pde_residual_sweep(&prob, &bumped, &c.region, 200, 1e-8, 1)?;
        println!(
            "{:<13} {:<10} residual {:.2e}  perturbed {:.2e}",
            c.id.name(),
            c.id.tag().to_string(),
            exact.max,
            off.max
        );
        println!("    u = {}", c.solution);
        println!("    region x {:?}, t {:?}; excluded: {}", c.region.x, c.region.t, c.excluded_loci);
    }
    Ok(())
}
