//! Exact rational costs.
//!
//! All costs are kept as arbitrary-precision rationals so that slack
//! comparisons, oracle equalities and approximation-ratio assertions can be
//! made without floating point noise. Input accepts integers, decimals and
//! `p/q` fractions.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

/// Parse a cost token: `12`, `3.25` or `7/2`.
pub fn parse_cost(tok: &str) -> Option<Rat> {
    if let Some((num_s, den_s)) = tok.split_once('/') {
        let n: BigInt = num_s.parse().ok()?;
        let d: BigInt = den_s.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int_s, frac_s)) = tok.split_once('.') {
        if frac_s.is_empty() || !frac_s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_s.starts_with('-');
        let int_part: BigInt = if int_s.is_empty() || int_s == "-" {
            BigInt::zero()
        } else {
            int_s.parse().ok()?
        };
        let frac_num: BigInt = frac_s.parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac_s.len() as u32);
        let abs = Rat::from_integer(int_part.abs()) + Rat::new(frac_num, scale);
        return Some(if negative { -abs } else { abs });
    }
    let n: BigInt = tok.parse().ok()?;
    Some(Rat::from_integer(n))
}

/// Render a cost in a form `parse_cost` reads back exactly.
pub fn format_cost(c: &Rat) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn rat_to_f64(c: &Rat) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

/// Rational bounds on ln 2, 21 digits: LN2_LO < ln 2 < LN2_HI.
pub fn ln2_bounds() -> (Rat, Rat) {
    let scale = BigInt::from(10u32).pow(21);
    let lo: BigInt = "693147180559945309417".parse().unwrap();
    let hi: BigInt = "693147180559945309418".parse().unwrap();
    (Rat::new(lo, scale.clone()), Rat::new(hi, scale))
}

/// Rational bounds on e, 21 digits: E_LO < e < E_HI.
pub fn e_bounds() -> (Rat, Rat) {
    let scale = BigInt::from(10u32).pow(21);
    let lo: BigInt = "2718281828459045235360".parse().unwrap();
    let hi: BigInt = "2718281828459045235361".parse().unwrap();
    (Rat::new(lo, scale.clone()), Rat::new(hi, scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_decimals_fractions() {
        assert_eq!(parse_cost("12").unwrap(), rat_int(12));
        assert_eq!(parse_cost("3.25").unwrap(), rat(13, 4));
        assert_eq!(parse_cost("7/2").unwrap(), rat(7, 2));
        assert_eq!(parse_cost("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_cost("0.10").unwrap(), rat(1, 10));
        assert!(parse_cost("1/0").is_none());
        assert!(parse_cost("abc").is_none());
        assert!(parse_cost("1.2e3").is_none());
    }

    #[test]
    fn format_round_trips() {
        for c in [rat(13, 4), rat_int(-7), rat(22, 7)] {
            assert_eq!(parse_cost(&format_cost(&c)).unwrap(), c);
        }
    }

    #[test]
    fn ln2_bracket_is_tight() {
        let (lo, hi) = ln2_bounds();
        assert!(lo < hi);
        let width = hi - lo.clone();
        assert!(width < rat(1, 1_000_000_000_000_000_000));
        let f = rat_to_f64(&lo);
        assert!((f - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
