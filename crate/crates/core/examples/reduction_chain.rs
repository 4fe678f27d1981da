//! Reduce a bond-pricing problem to the heat equation with source, then
//! carry a closed-form solution across and check it there.

use bondsym::model::{Equation, Params, PdeProblem};
use bondsym::solutions::{get_case, CaseId};
use bondsym::transforms::reduction_chain;
use bondsym::verify::{transport_residual, transport_roundtrip};
use bondsym::parse;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a CIR-like model with a quadratic source
    let p = Params::new(0.02, -0.3, 0.5, 0.5, 0.1, 0.4);
    let prob = PdeProblem::new(p, parse("-x*u + 0.1*u^2", &[])?)?;
    let chain = reduction_chain(&p)?;
    print!("{chain}");
    let heat = chain.transport(&Equation::Bond(prob))?;
    println!("image source: {}\n", heat.source());

    for id in CaseId::ALL {
        let c = get_case(id);
        let r = transport_residual(&c, 100, 7, 1e-7)?;
        let rt = transport_roundtrip(&c, 100, 7, 1e-12)?;
        println!("{:<13} heat residual {:.2e}  round trip {:.2e}", id.name(), r.max, rt.max);
    }
    Ok(())
}
