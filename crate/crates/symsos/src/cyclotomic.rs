//! Exact arithmetic in cyclotomic fields, used for irreducible representations whose
//! entries are cosines and sines of rational multiples of 2π.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::Zero;

use crate::linalg::Ring;
use crate::rational::{to_f64, Q};

/// Coefficients of the `n`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cache poisoned").get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every cyclotomic factor of a proper divisor.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclotomic_polynomial(d);
            num = exact_divide(&num, &div);
        }
    }
    let p = Arc::new(num);
    cache.lock().expect("cache poisoned").insert(n, p.clone());
    p
}

fn exact_divide(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd] / lead;
        quot[i] = c;
        for (j, &dv) in den.iter().enumerate() {
            rem[i + j] -= c * dv;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Element of `Q(ζ_order)` written in the power basis `1, ζ, …, ζ^{φ(order)-1}`.
#[derive(Clone, Debug)]
pub struct Cyc {
    order: u32,
    c: Vec<Q>,
}

impl Cyc {
    pub fn rational(x: Q) -> Self {
        Cyc { order: 1, c: vec![x] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(crate::rational::q(n))
    }

    /// `ζ_n^k`.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        let n = n.max(1);
        let e = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![Q::zero(); e + 1];
        poly[e] = crate::rational::q(1);
        Cyc {
            order: n,
            c: reduce(poly, n),
        }
    }

    /// `cos(2π num/den)`.
    pub fn cos_2pi(num: i64, den: u32) -> Self {
        let a = Self::root_of_unity(den, num);
        let b = Self::root_of_unity(den, -num);
        a.r_add(&b).r_mul(&Cyc::rational(crate::rational::qr(1, 2)))
    }

    /// `sin(2π num/den)`.
    pub fn sin_2pi(num: i64, den: u32) -> Self {
        Self::cos_2pi(4 * num - den as i64, 4 * den)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_rational(&self) -> bool {
        self.c.iter().skip(1).all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.is_rational() {
            Some(self.c.first().cloned().unwrap_or_else(Q::zero))
        } else {
            None
        }
    }

    /// Real part of the complex value; exact elements of real subfields are real.
    pub fn to_f64(&self) -> f64 {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| to_f64(v) * (2.0 * PI * k as f64 / self.order as f64).cos())
            .sum()
    }

    pub fn imag_f64(&self) -> f64 {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| to_f64(v) * (2.0 * PI * k as f64 / self.order as f64).sin())
            .sum()
    }

    /// Complex conjugate, `ζ ↦ ζ⁻¹`.
    pub fn conj(&self) -> Self {
        let n = self.order as usize;
        let mut poly = vec![Q::zero(); n.max(1)];
        for (k, v) in self.c.iter().enumerate() {
            if !v.is_zero() {
                poly[(n - k) % n.max(1)] += v;
            }
        }
        Cyc {
            order: self.order,
            c: reduce(poly, self.order),
        }
    }

    pub fn re(&self) -> Self {
        self.r_add(&self.conj())
            .r_mul(&Cyc::rational(crate::rational::qr(1, 2)))
    }

    /// Imaginary part `(z - z̄)/(2i)`.
    pub fn im(&self) -> Self {
        let minus_half_i = Cyc::root_of_unity(4, 1).r_mul(&Cyc::rational(crate::rational::qr(-1, 2)));
        self.r_sub(&self.conj()).r_mul(&minus_half_i)
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// The same element seen in `Q(ζ_target)`, where `order` divides `target`.
    fn lift(&self, target: u32) -> Self {
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let mut poly = vec![Q::zero(); (self.c.len().max(1) - 1) * step + 1];
        for (k, v) in self.c.iter().enumerate() {
            poly[k * step] = v.clone();
        }
        Cyc {
            order: target,
            c: reduce(poly, target),
        }
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        if self.order == other.order {
            return (self.clone(), other.clone());
        }
        let l = self.order.lcm(&other.order);
        (self.lift(l), other.lift(l))
    }
}

fn reduce(mut poly: Vec<Q>, n: u32) -> Vec<Q> {
    let phi = cyclotomic_polynomial(n);
    let d = phi.len() - 1;
    for i in (d..poly.len()).rev() {
        let c = std::mem::replace(&mut poly[i], Q::zero());
        if c.is_zero() {
            continue;
        }
        // x^i = x^{i-d} x^d and x^d = -(lower terms) since phi is monic.
        for (j, &pv) in phi.iter().take(d).enumerate() {
            if pv != 0 {
                poly[i - d + j] -= &c * crate::rational::q(pv);
            }
        }
    }
    poly.resize(d, Q::zero());
    poly
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.c == b.c
    }
}

impl Ring for Cyc {
    fn r_zero() -> Self {
        Cyc::rational(Q::zero())
    }
    fn r_one() -> Self {
        Cyc::from_int(1)
    }
    fn r_add(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        Cyc {
            order: a.order,
            c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect(),
        }
    }
    fn r_sub(&self, other: &Self) -> Self {
        self.r_add(&other.r_neg())
    }
    fn r_mul(&self, other: &Self) -> Self {
        if self.order == 1 {
            let s = &self.c[0];
            return Cyc {
                order: other.order,
                c: other.c.iter().map(|v| v * s).collect(),
            };
        }
        if other.order == 1 {
            return other.r_mul(self);
        }
        let (a, b) = self.common(other);
        let mut poly = vec![Q::zero(); a.c.len() + b.c.len()];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if !y.is_zero() {
                    poly[i + j] += x * y;
                }
            }
        }
        Cyc {
            order: a.order,
            c: reduce(poly, a.order),
        }
    }
    fn r_neg(&self) -> Self {
        Cyc {
            order: self.order,
            c: self.c.iter().map(|v| -v).collect(),
        }
    }
    fn r_is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
    fn r_from_q(v: &Q) -> Self {
        Cyc::rational(v.clone())
    }
}
