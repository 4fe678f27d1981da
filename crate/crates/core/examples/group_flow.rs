//! One-parameter group flows: map a solution along a generator, resample it
//! on a grid and check the image still solves the equation.

use bondsym::fdsolver::Grid;
use bondsym::verify::{
    flow_map, flow_negative_control, flow_scaling, flow_time_coupling, gamma_one_heat_frame,
    surface_residual, FlowInput, FlowOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (phi, heat, gens) = gamma_one_heat_frame()?;
    let grid = Grid::uniform((0.3, 1.0), 36, (-0.8, -0.1), 36)?;
    for g in &gens {
        let s = flow_map(g, FlowInput::Expr(&phi), 0.05, &grid, &FlowOptions::default())?;
        let r = surface_residual(&heat, &s, 1e-4)?;
        println!("{g}\n  image residual {:.2e} over {} nodes", r.max, s.valid_count());
    }

    for n in [36, 71] {
        let quad = flow_scaling(&FlowOptions::default(), n, 1e-4)?;
        let pull = flow_scaling(&FlowOptions::pullback(), n, 1e-4)?;
        println!("scaling, {n}x{n}: scattered {:.2e}, pullback {:.2e}", quad.max, pull.max);
    }
    println!("{}", flow_negative_control(0.1)?);
    println!("{}", flow_time_coupling(false, 1e-4)?);
    println!("{}", flow_time_coupling(true, 1e-4)?);
    Ok(())
}
