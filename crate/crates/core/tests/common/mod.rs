//! Shared helpers for the integration suites, chiefly an interval-arithmetic
//! sign oracle for a + b*sqrt(d) that is independent of the library's
//! algebraic sign computation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use qcross::exactnum::Rational;

/// Bracket sqrt(d) in [root/2^bits, (root+1)/2^bits] using the integer floor
/// square root of d << 2*bits.
pub fn sqrt_bracket(d: &BigInt, bits: u64) -> (Rational, Rational) {
    assert!(d > &BigInt::zero());
    let scaled: BigInt = d << (2 * bits);
    let root = scaled.sqrt();
    let denom: BigInt = BigInt::one() << bits;
    (
        Rational::new(root.clone(), denom.clone()),
        Rational::new(root + BigInt::one(), denom),
    )
}

/// Sign of a + b*sqrt(d) as -1 / 0 / +1, by refining the bracket until it
/// clears zero. Exact zeroes keep straddling forever, so once refinement
/// stalls the zero condition a^2 = b^2 d with a, b of opposite sign is
/// checked directly; anything else is an oracle failure worth a panic.
pub fn interval_sign(d: &BigInt, a: &Rational, b: &Rational, max_bits: u64) -> i32 {
    if b.is_zero() {
        return match a.cmp(&Rational::zero()) {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        };
    }
    let mut bits = 32;
    loop {
        let (lo, hi) = sqrt_bracket(d, bits);
        let (vlo, vhi) = if b.is_negative() {
            (a + b * &hi, a + b * &lo)
        } else {
            (a + b * &lo, a + b * &hi)
        };
        if vlo > Rational::zero() {
            return 1;
        }
        if vhi < Rational::zero() {
            return -1;
        }
        if bits >= max_bits {
            break;
        }
        bits *= 2;
    }
    let d_rat = Rational::from_integer(d.clone());
    if a * a == b * b * d_rat && a.signum() != b.signum() {
        return 0;
    }
    panic!("interval oracle undecided at {max_bits} bits for {a} + {b} sqrt({d})");
}
