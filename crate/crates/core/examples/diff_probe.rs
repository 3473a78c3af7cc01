use dirac_core::scalar::{parse_expr, Vars};
use std::time::Instant;
fn main() {
    let v = Vars::new(["x", "y", "z"]);
    let samples = [
        "(3*x^2 - 2*y*z + 1)/(x*y + 4*y^2)",
        "(-4*x^2*y^2*z + 2*x*z - z)/(3*x^2*y^2 - x^2*y*z - 2*x*y*z + 2)",
        "(x^2*y + z)/(2*x^2*y^2*z - x*z + 4)",
        "(2*x^2*y^2*z - 3*x*y + 1)/(x^2*y*z^2 + x*y - y^2*z + 3)",
    ];
    for s in samples {
        let e = parse_expr(s, &v).unwrap();
        let t0 = Instant::now();
        let d1 = e.partial(0);
        let t1 = Instant::now();
        let d2 = d1.partial(1);
        let t2 = Instant::now();
        println!(
            "{s}: first {:?}, second {:?} (num deg {}, den deg {})",
            t1 - t0,
            t2 - t1,
            d2.num().total_degree(),
            d2.den().total_degree()
        );
    }
}
