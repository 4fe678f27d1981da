//! Symbolic differentiation, checked against central differences on random
//! expressions.

use bondsym::sampling::{random_expression, rng};
use bondsym::verify::derivative_agreement;
use bondsym::{parse, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = parse("x^2*exp(-t)*log(1 + u^2)", &[])?;
    for v in ["x", "t", "u"] {
        let d = e.differentiate(v);
        println!("d/d{v}: {d} = {:.6}", d.eval(&Point::new(1.5, 0.2, 0.7))?);
    }
    let mut r = rng(11);
    for _ in 0..3 {
        println!("random: {}", random_expression(&mut r, 3));
    }
    println!("{}", derivative_agreement(100, 11, 1e-5)?);
    Ok(())
}
