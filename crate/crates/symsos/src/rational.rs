//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"p"` or `"p/q"` with an optional leading sign.
pub fn parse_rational(text: &str) -> Option<Q> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

pub fn render_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Huge numerators or denominators: scale down through the bit lengths.
        let nb = x.numer().bits() as i64;
        let db = x.denom().bits() as i64;
        let shift = (nb.max(db) - 900).max(0) as usize;
        let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
        if d == 0.0 {
            if n.is_sign_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            n / d
        }
    })
}

/// Exact binary value of a finite float.
pub fn from_f64_exact(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

/// Best rational approximation of `x` whose denominator does not exceed `max_den`,
/// obtained from the continued fraction expansion.
pub fn approximate(x: f64, max_den: u64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let target = from_f64_exact(x);
    best_approximation(&target, &BigInt::from(max_den.max(1)))
}

/// Continued-fraction convergents of `target`, stopped at the denominator bound,
/// with the best semiconvergent considered at the cut.
pub fn best_approximation(target: &Q, max_den: &BigInt) -> Q {
    if target.denom() <= max_den {
        return target.clone();
    }
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut num = target.numer().clone();
    let mut den = target.denom().clone();
    loop {
        let (a, r) = num.div_mod_floor(&den);
        let q2 = &a * &q1 + &q0;
        if &q2 > max_den {
            let k = (max_den - &q0) / &q1;
            let semi = Q::new(&k * &p1 + &p0, &k * &q1 + &q0);
            let conv = Q::new(p1.clone(), q1.clone());
            let ds = (&semi - target).abs();
            let dc = (&conv - target).abs();
            return if ds < dc { semi } else { conv };
        }
        let p2 = &a * &p1 + &p0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        if r.is_zero() {
            return Q::new(p1, q1);
        }
        num = std::mem::replace(&mut den, r);
    }
}

/// Largest multiple of `1/den` not exceeding `x`.
pub fn floor_to_denominator(x: &Q, den: u64) -> Q {
    let d = BigInt::from(den.max(1));
    let scaled = (x * Q::from_integer(d.clone())).floor();
    scaled / Q::from_integer(d)
}

/// Exact square root when `x` is the square of a rational.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        assert_eq!(parse_rational("-6/8"), Some(qr(-3, 4)));
        assert_eq!(render_rational(&qr(-3, 4)), "-3/4");
        assert_eq!(render_rational(&q(7)), "7");
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn continued_fraction_bounds() {
        assert_eq!(approximate(std::f64::consts::PI, 10), qr(22, 7));
        assert_eq!(approximate(std::f64::consts::PI, 200), qr(355, 113));
        assert_eq!(approximate(0.5, 100), qr(1, 2));
    }

    #[test]
    fn floor_rounds_down() {
        assert_eq!(floor_to_denominator(&qr(-3825, 4096), 1000), qr(-934, 1000));
        assert_eq!(floor_to_denominator(&qr(1, 3), 10), qr(3, 10));
    }

    #[test]
    fn sqrt_and_binomial() {
        assert_eq!(rational_sqrt(&qr(9, 4)), Some(qr(3, 2)));
        assert_eq!(rational_sqrt(&q(2)), None);
        assert_eq!(binomial(13, 4), BigInt::from(715));
    }
}
