//! Exact rational scalars and the few parsing/rounding helpers the rest of
//! the crate needs. All weights, distances, probabilities and curvatures are
//! `Rational`; nothing in the pipeline rounds unless explicitly asked to.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = BigRational;

/// Shorthand for small constants: `rat(1, 2)` is 1/2.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Parses "p/q" or a plain integer string. Whitespace is not tolerated.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.parse().map_err(|_| bad())?;
        let d: BigInt = den.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

/// Formats as "p/q", or just "p" for integers. Inverse of `parse_rational`.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    // Good enough for desk-scale magnitudes; large operands are divided as
    // floats of their bit-limited approximations.
    let n = x.numer();
    let d = x.denom();
    let nf = bigint_to_f64(n);
    let df = bigint_to_f64(d);
    nf / df
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::INFINITY)
}

/// Best rational approximation with denominator at most `bound`, via the
/// continued-fraction convergent/semiconvergent construction.
pub fn round_denominator(x: &Rational, bound: u64) -> Rational {
    assert!(bound >= 1);
    let bound = BigInt::from(bound);
    if x.denom() <= &bound {
        return x.clone();
    }
    let sign = if x.is_negative() { -1 } else { 1 };
    let xa = x.abs();
    let (mut n, mut d) = (xa.numer().clone(), xa.denom().clone());
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    loop {
        let a = &n / &d;
        let q2 = &q0 + &a * &q1;
        if q2 > bound {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    if q1.is_zero() {
        // |x| >= bound-sized integer part never reached a convergent.
        return Rational::from_integer(xa.to_integer() * sign);
    }
    let k = (&bound - &q0) / &q1;
    let semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = Rational::new(p1, q1);
    let best = if (&semi - &xa).abs() < (&conv - &xa).abs() {
        semi
    } else {
        conv
    };
    if sign < 0 {
        -best
    } else {
        best
    }
}

/// Nearest multiple of 1/den. Used by the flow to keep every edge length on a
/// common denominator so path sums stay small.
pub fn round_to_grid(x: &Rational, den: u64) -> Rational {
    let den = BigInt::from(den);
    let scaled = x * Rational::from_integer(den.clone());
    let rounded = scaled.round();
    Rational::new(rounded.to_integer(), den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7/2", "0", "12", "-5"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = rat(355, 113);
        let b = rat(-2, 7);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&a * &(rat_int(1) / &a), rat_int(1));
        // canonical lowest terms
        let c = rat(10, 4);
        assert_eq!(c.numer(), &BigInt::from(5));
        assert_eq!(c.denom(), &BigInt::from(2));
    }

    #[test]
    fn denominator_rounding_finds_known_convergents() {
        // pi approximations: 355/113 is the best with denominator <= 1000.
        let pi = rat(3141592653, 1000000000);
        assert_eq!(round_denominator(&pi, 1000), rat(355, 113));
        // exact values pass through untouched
        assert_eq!(round_denominator(&rat(2, 3), 10), rat(2, 3));
        // sign symmetry
        assert_eq!(round_denominator(&-pi.clone(), 1000), rat(-355, 113));
    }

    #[test]
    fn grid_rounding() {
        assert_eq!(round_to_grid(&rat(1, 3), 100), rat(33, 100));
        assert_eq!(round_to_grid(&rat(2, 3), 100), rat(67, 100));
        assert_eq!(round_to_grid(&rat(-1, 3), 100), rat(-33, 100));
    }
}
