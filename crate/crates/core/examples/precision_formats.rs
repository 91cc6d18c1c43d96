//! Rounding behaviour of the four storage formats.

use ader_mp::precision::{reduced_arith, round_to_format, ArithOp};
use ader_mp::FloatFormat;

fn main() {
    let x = std::f64::consts::PI;
    println!("{:>6} {:>12} {:>14} {:>24}", "format", "epsilon", "max finite", "pi rounded");
    for fmt in FloatFormat::ALL {
        println!(
            "{:>6} {:>12.3e} {:>14.6e} {:>24.17}",
            fmt.name(),
            fmt.epsilon(),
            fmt.max_finite(),
            round_to_format(x, fmt)
        );
    }

    // 1 + eps/2 ties to even and collapses back to 1
    for fmt in [FloatFormat::Fp16, FloatFormat::Bf16] {
        let half_eps = 0.5 * fmt.epsilon();
        let sum = reduced_arith(ArithOp::Add, 1.0, half_eps, fmt);
        println!("{}: 1 + eps/2 = {sum}", fmt.name());
    }
    println!("fp16: 300 * 300 = {}", reduced_arith(ArithOp::Mul, 300.0, 300.0, FloatFormat::Fp16));
}
