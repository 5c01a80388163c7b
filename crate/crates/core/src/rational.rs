//! Exact rational arithmetic used by every selection and witness path.
//!
//! Thresholds like `(16/3)c - 1` sit exactly on sharpness boundaries, so all
//! comparisons in the selection modules are exact; floats appear only in the
//! spectral pipeline.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number. Arbitrary precision: sums of many reduced fractions
/// with unrelated denominators overflow any fixed-width representation.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Build a rational from a signed numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Build a rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Build a rational from an unsigned integer.
pub fn rat_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse `a/b`, an integer, or a plain decimal (`0.64` -> 16/25). The decimal
/// form is exact: `d.ffff` becomes `dffff / 10^4`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| malformed())?;
        let d: BigInt = den.trim().parse().map_err(|_| malformed())?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let negative = int_part.trim_start().starts_with('-');
        let int: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| malformed())?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| malformed())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut value = Rational::new(int.magnitude().clone().into(), BigInt::one())
            + Rational::new(frac, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| malformed())?;
    Ok(Rational::from_integer(n))
}

/// Nearest-f64 view of a rational, for reporting only.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Dyadic rational closest to `x` with denominator `2^bits`, clamped to [0, 1].
/// Used to quantize measured float densities into the exact-arithmetic world.
pub fn dyadic_from_f64(x: f64, bits: u32) -> Rational {
    let den = 2f64.powi(bits as i32);
    let scaled = (x * den).round();
    let clamped = scaled.max(0.0).min(den);
    Rational::new(
        BigInt::from(clamped as i128),
        BigInt::from(2u8).pow(bits.into()),
    )
}

/// Render as `num/den` (or just `num` for integers).
pub fn display(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True iff `r` lies in the closed interval [0, 1].
pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_decimal_integer() {
        assert_eq!(parse_rational("3/5").unwrap(), rat(3, 5));
        assert_eq!(parse_rational("0.64").unwrap(), rat(16, 25));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert_eq!(parse_rational(" 37 / 50 ").unwrap(), rat(37, 50));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x.y").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn dyadic_quantization_round_trips_closely() {
        let q = dyadic_from_f64(0.3333333, 32);
        assert!((to_f64(&q) - 0.3333333).abs() < 1e-9);
        assert!(in_unit_interval(&q));
        assert_eq!(dyadic_from_f64(-0.25, 8), rat_int(0));
        assert_eq!(dyadic_from_f64(1.75, 8), rat_int(1));
    }

    #[test]
    fn display_reduces() {
        assert_eq!(display(&rat(4, 8)), "1/2");
        assert_eq!(display(&rat(8, 4)), "2");
    }
}
