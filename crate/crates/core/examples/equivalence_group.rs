//! The continuous equivalence group of the drift-free equation, and how the
//! special case γ → 0 maps relate to it.

use bondsym::transforms::{group_element, EquivalenceGroupElement};
use bondsym::verify::{gamma_half_vs_power_map, group_vs_power_map};
use bondsym::Expr;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = EquivalenceGroupElement::new(0.2, 1.5, 0.8, Expr::x().scale(0.1));
    let g = group_element(&e, 0.3, 0.5)?;
    println!("gamma 0.3 -> {:.4}", e.image_gamma(0.3));
    print!("{g}");
    let (x, t, u) = g.push_point(1.2, 0.4, 0.9)?;
    let back = g.pull_point(x, t, u)?;
    println!("(1.2, 0.4, 0.9) -> ({x:.6}, {t:.6}, {u:.6}) -> {back:?}\n");

    for gamma in [0.0, 0.3, 0.7, -0.5] {
        println!("{}", group_vs_power_map(gamma, 100, 3)?);
    }
    println!("{}", gamma_half_vs_power_map(100, 3)?);
    Ok(())
}
