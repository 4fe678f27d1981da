//! Moving barriers `H(t) = bK e^{-a(t-T)}`: rebate checks and the generator
//! combination that leaves each barrier manifold invariant.

use bondsym::solutions::{catalog, induced_r, BarrierSpec};
use bondsym::verify::{barrier_check, find_combination, heat_frame_barrier, BarrierCurve, Chart};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for c in catalog().into_iter().filter(|c| c.id.is_barrier()) {
        let spec = c.barrier().expect("barrier case");
        let t_end = c.terminal_time();
        println!("{}: H = {}", c.id, spec.h);
        let r = induced_r(&c)?;
        let ts: Vec<f64> = (0..=10).map(|k| k as f64 * t_end / 10.0).collect();
        println!("  u(H, t) - R: {:.2e}", barrier_check(&c.solution, &BarrierSpec { r, ..spec.clone() }, &ts, 1e-12)?.max);

        // as printed the barrier lives in the bond chart
        let original = BarrierCurve {
            frame: Chart::Ambiguous,
            ..BarrierCurve::from_spec(spec)
        };
        let comb = find_combination(&c.generators.generators, &original, &[0.0, 0.5, 1.0], 1e-8)?;
        println!("  bond chart: residual {:.2e}, exists {}", comb.residual, comb.exists);

        let (curve, gens, taus) = heat_frame_barrier(&c, &[0.0, 0.5 * t_end, t_end])?;
        let comb = find_combination(&gens, &curve, &taus, 1e-8)?;
        println!(
            "  heat frame: c = {:.4?}, residual {:.2e}",
            comb.coefficients, comb.residual
        );
    }
    Ok(())
}
