//! Exact arithmetic aliases and helpers.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Shorthand for a rational from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(Int::from(numer), Int::from(denom))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

/// Renders a rational as "p/q" ("p" when integral), the wire format used in
/// all JSON reports.
pub fn rat_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses "p/q" or "p".
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().ok()?;
            let q: Int = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
        None => {
            let p: Int = s.parse().ok()?;
            Some(Rat::from_integer(p))
        }
    }
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back on a scaled conversion for extreme numerators/denominators.
        let num_bits = x.numer().bits() as i64;
        let den_bits = x.denom().bits() as i64;
        let shift = (num_bits.max(den_bits) - 60).max(0);
        let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
        if d == 0.0 {
            0.0
        } else {
            n / d
        }
    })
}

/// log base q of a positive big integer, in double precision.
pub fn big_log_q(n: &Int, q: u8) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 52 {
        return (n.to_f64().unwrap()).log2() / (q as f64).log2();
    }
    let shift = bits - 52;
    let mantissa = (n >> shift).to_f64().unwrap();
    (mantissa.log2() + shift as f64) / (q as f64).log2()
}

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn is_zero_sign(x: &Rat) -> bool {
    x.numer().sign() == Sign::NoSign
}
