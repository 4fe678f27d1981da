//! Every verification suite, as `bondsym verify` runs them.

use bondsym::verify::{run_suite, SuiteOptions, SUITES};

fn main() {
    let opts = SuiteOptions::default();
    let mut failed = 0;
    for name in SUITES {
        println!("== {name}");
        for r in run_suite(name, &opts).expect("known suite") {
            failed += usize::from(r.is_blocking());
            println!("{r}");
        }
    }
    println!("{failed} blocking failures");
}
