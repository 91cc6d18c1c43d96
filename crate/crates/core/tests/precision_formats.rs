use ader_mp::precision::{
    reduced_arith, round_f32_to_format, round_to_format, round_to_format_generic, ArithOp, Real, BF16,
    F16,
};
use ader_mp::FloatFormat;
use half::{bf16, f16};
use proptest::prelude::*;

#[test]
fn every_fp16_pattern_is_a_fixed_point() {
    for bits in 0..=u16::MAX {
        let v = f16::from_bits(bits).to_f64();
        let r = round_to_format(v, FloatFormat::Fp16);
        if v.is_nan() {
            assert!(r.is_nan());
        } else {
            assert_eq!(r.to_bits(), v.to_bits(), "pattern {bits:#06x}");
        }
    }
}

#[test]
fn every_bf16_pattern_is_a_fixed_point() {
    for bits in 0..=u16::MAX {
        let v = bf16::from_bits(bits).to_f64();
        let r = round_to_format(v, FloatFormat::Bf16);
        if v.is_nan() {
            assert!(r.is_nan());
        } else {
            assert_eq!(r.to_bits(), v.to_bits(), "pattern {bits:#06x}");
        }
    }
}

#[test]
fn midpoints_between_fp16_neighbours_tie_to_even() {
    // positive finite patterns and the midpoint to the next one up
    for bits in 0u16..0x7bff {
        let lo = f16::from_bits(bits).to_f64();
        let hi = f16::from_bits(bits + 1).to_f64();
        let mid = 0.5 * (lo + hi);
        let expect = if bits % 2 == 0 { lo } else { hi };
        assert_eq!(round_to_format(mid, FloatFormat::Fp16), expect, "pattern {bits:#06x}");
    }
}

#[test]
fn fp32_fast_path_matches_generic_rounding() {
    let mut x = 1.0e-40f64;
    while x < 1.0e38 {
        for s in [x, -x, x * 1.000_000_1, x * 0.999_999_9] {
            assert_eq!(
                round_to_format(s, FloatFormat::Fp32),
                round_to_format_generic(s, FloatFormat::Fp32)
            );
        }
        x *= 1.37;
    }
}

fn any_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1.0e6f64..1.0e6,
        -1.0f64..1.0,
        (-30i32..30, -1.0f64..1.0).prop_map(|(e, m)| m * 2f64.powi(e)),
        (-1.0e-7f64..1.0e-7),
    ]
}

fn fmt_strategy() -> impl Strategy<Value = FloatFormat> {
    prop::sample::select(FloatFormat::ALL.to_vec())
}

fn same(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

proptest! {
    #[test]
    fn matches_half_crate(x in any_f64()) {
        prop_assert_eq!(round_to_format(x, FloatFormat::Fp16), f16::from_f64(x).to_f64());
        prop_assert_eq!(round_to_format(x, FloatFormat::Bf16), bf16::from_f64(x).to_f64());
    }

    #[test]
    fn rounding_is_idempotent(x in any_f64(), fmt in fmt_strategy()) {
        let r = round_to_format(x, fmt);
        prop_assert_eq!(round_to_format(r, fmt), r);
    }

    #[test]
    fn rounding_is_monotone(a in any_f64(), b in any_f64(), fmt in fmt_strategy()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(round_to_format(lo, fmt) <= round_to_format(hi, fmt));
    }

    #[test]
    fn relative_error_is_half_an_epsilon(x in any_f64(), fmt in fmt_strategy()) {
        // restrict to the normal range of the target
        prop_assume!(x.abs() >= 2f64.powi(fmt.min_exponent()) && x.abs() <= fmt.max_finite());
        let r = round_to_format(x, fmt);
        prop_assert!(((r - x) / x).abs() <= 0.5 * fmt.epsilon());
    }

    #[test]
    fn f32_rounding_agrees_with_f64_rounding(x in any_f64()) {
        let y = x as f32;
        for fmt in [FloatFormat::Fp16, FloatFormat::Bf16] {
            prop_assert_eq!(
                round_f32_to_format(y, fmt) as f64,
                round_to_format(y as f64, fmt)
            );
        }
    }

    #[test]
    fn emulated_ops_are_correctly_rounded(a in any_f64(), b in any_f64()) {
        let (a16, b16) = (F16::from_f64(a), F16::from_f64(b));
        let (x, y) = (a16.to_f64(), b16.to_f64());
        let fmt = FloatFormat::Fp16;
        prop_assert!(same((a16 + b16).to_f64(), reduced_arith(ArithOp::Add, x, y, fmt)));
        prop_assert!(same((a16 - b16).to_f64(), reduced_arith(ArithOp::Sub, x, y, fmt)));
        prop_assert!(same((a16 * b16).to_f64(), reduced_arith(ArithOp::Mul, x, y, fmt)));
        if y != 0.0 {
            prop_assert!(same((a16 / b16).to_f64(), reduced_arith(ArithOp::Div, x, y, fmt)));
        }
        let (ab, bb) = (BF16::from_f64(a), BF16::from_f64(b));
        let (x, y) = (ab.to_f64(), bb.to_f64());
        let fmt = FloatFormat::Bf16;
        prop_assert!(same((ab + bb).to_f64(), reduced_arith(ArithOp::Add, x, y, fmt)));
        prop_assert!(same((ab * bb).to_f64(), reduced_arith(ArithOp::Mul, x, y, fmt)));
        if y != 0.0 {
            prop_assert!(same((ab / bb).to_f64(), reduced_arith(ArithOp::Div, x, y, fmt)));
        }
        if x >= 0.0 {
            prop_assert_eq!(ab.sqrt().to_f64(), round_to_format(x.sqrt(), fmt));
        }
    }
}
