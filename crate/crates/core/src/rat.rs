//! Exact rational scalars and the few numeric helpers the workbench needs.
//!
//! Every measure value in the library is a [`Rat`]: an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator, which is
//! exactly what `num_rational::BigRational` maintains.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number; carrier of all measure values.
pub type Rat = BigRational;

/// Shorthand for `p/q`. Panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// The integer `n` as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `2^-k` as a rational.
pub fn dyadic(k: usize) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << k)
}

/// `r^n` by repeated squaring.
pub fn rat_pow(r: &Rat, n: usize) -> Rat {
    let mut base = r.clone();
    let mut n = n;
    let mut acc = Rat::one();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        n >>= 1;
    }
    acc
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let bad = || Error::Validation(format!("malformed rational `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let p: BigInt = num.trim().parse().map_err(|_| bad())?;
    let q: BigInt = den.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Validation(format!("zero denominator in `{text}`")));
    }
    Ok(Rat::new(p, q))
}

/// Renders as `p/q`, or `p` when the denominator is one.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Binary expansion of `x` in `[0, 1)` as a (prefix, period) bit pair.
///
/// Bits are the digits after the binary point, so `x = 0.b1 b2 b3 ...` and
/// the digit stream is `prefix` followed by `period` repeated forever. Every
/// rational has such an eventually periodic expansion; the doubling map has
/// at most `denom` distinct states. Exact dyadics get an all-zero period.
pub fn binary_expansion(x: &Rat) -> Result<(Vec<bool>, Vec<bool>)> {
    if x.is_negative() || *x >= Rat::one() {
        return Err(Error::OutOfRange(format!("{} not in [0, 1)", fmt_rat(x))));
    }
    let mut seen: Vec<Rat> = Vec::new();
    let mut bits: Vec<bool> = Vec::new();
    let mut state = x.clone();
    loop {
        if let Some(pos) = seen.iter().position(|s| *s == state) {
            let period: Vec<bool> = bits.split_off(pos);
            return Ok((bits, period));
        }
        seen.push(state.clone());
        let doubled = &state * rat_int(2);
        if doubled >= Rat::one() {
            bits.push(true);
            state = doubled - Rat::one();
        } else {
            bits.push(false);
            state = doubled;
        }
    }
}

/// Evaluates a (prefix, period) bit stream back to the rational it expands.
pub fn expansion_value(prefix: &[bool], period: &[bool]) -> Rat {
    let mut acc = Rat::zero();
    for (i, &b) in prefix.iter().enumerate() {
        if b {
            acc += dyadic(i + 1);
        }
    }
    if !period.is_empty() {
        let mut per = Rat::zero();
        for (j, &b) in period.iter().enumerate() {
            if b {
                per += dyadic(j + 1);
            }
        }
        // tail = 2^-|prefix| * per / (1 - 2^-|period|)
        let tail = dyadic(prefix.len()) * per / (Rat::one() - dyadic(period.len()));
        acc += tail;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_of_third_is_01_periodic() {
        let (prefix, period) = binary_expansion(&rat(1, 3)).unwrap();
        assert!(prefix.is_empty());
        assert_eq!(period, vec![false, true]);
        assert_eq!(expansion_value(&prefix, &period), rat(1, 3));
    }

    #[test]
    fn expansion_of_dyadic_terminates_into_zero_period() {
        let (prefix, period) = binary_expansion(&rat(3, 8)).unwrap();
        assert_eq!(expansion_value(&prefix, &period), rat(3, 8));
        assert!(period.iter().all(|b| !b));
    }

    #[test]
    fn expansion_rejects_one() {
        assert!(binary_expansion(&rat_int(1)).is_err());
    }

    #[test]
    fn round_trip_various() {
        for (p, q) in [(1, 7), (2, 3), (5, 12), (13, 100), (1, 1024)] {
            let x = rat(p, q);
            let (pre, per) = binary_expansion(&x).unwrap();
            assert_eq!(expansion_value(&pre, &per), x, "{p}/{q}");
        }
    }

    #[test]
    fn fmt_integer_drops_denominator() {
        assert_eq!(fmt_rat(&rat_int(4)), "4");
        assert_eq!(fmt_rat(&rat(6, 4)), "3/2");
    }
}
