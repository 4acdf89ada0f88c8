//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Monomials are ordered graded-lexicographically: lower total degree first, and
//! within a degree the exponent vector that is lexicographically larger comes first,
//! so `x` precedes `y` and the constant monomial is always the smallest.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rational::{parse_rational, q, render_rational, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if b > a {
                return None;
            }
            e.push(a - b);
        }
        Some(Monomial(e))
    }

    /// Weighted degree with one weight per variable.
    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(e, w)| e * w).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total degree, with the zero polynomial kept apart from every natural number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::term(c, Monomial::one(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Q::one(), Monomial::var(nvars, i))
    }

    pub fn term(c: Q, m: Monomial) -> Self {
        let mut p = Self::zero(m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial length differs from nvars");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(Monomial::degree)
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// Degree as a number, with zero mapped to 0; for callers that checked `is_zero`.
    pub fn degree_or_zero(&self) -> u32 {
        match self.degree() {
            Degree::NegInfinity => 0,
            Degree::Finite(d) => d,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Part of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dims(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dims(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dims(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c.clone());
        }
        Ok(r)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dims(other)?;
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                *acc.entry(m1.mul(m2)).or_insert_with(Q::zero) += c1 * c2;
            }
        }
        Ok(Polynomial {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, c: &Q) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn evaluate(&self, point: &[Q]) -> Result<Q> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut total = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, e) in point.iter().zip(&m.0) {
                if *e > 0 {
                    t *= num_traits::pow(x.clone(), *e as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(crate::rational::to_f64(c), |acc, (e, x)| acc * x.powi(*e as i32))
            })
            .sum()
    }

    /// Substitute polynomials for the variables: `x_i ↦ images[i]`.
    pub fn compose(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: images.len(),
            });
        }
        let target = images.first().map_or(0, |p| p.nvars);
        if let Some(bad) = images.iter().find(|p| p.nvars != target) {
            return Err(Error::DimensionMismatch {
                expected: target,
                got: bad.nvars,
            });
        }
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(target), p.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Largest absolute coefficient, zero for the zero polynomial.
    pub fn max_abs_coeff(&self) -> Q {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }

    /// Coefficients listed against a fixed monomial order.
    pub fn coefficient_vector(&self, basis: &[Monomial]) -> Vec<Q> {
        basis.iter().map(|m| self.coeff(m)).collect()
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial dimension mismatch")
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial dimension mismatch")
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial dimension mismatch")
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Q::one())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Binary arithmetic with a dimension check.
pub fn poly_arith(op: ArithOp, p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    match op {
        ArithOp::Add => p.try_add(q),
        ArithOp::Sub => p.try_sub(q),
        ArithOp::Mul => p.try_mul(q),
    }
}

/// All monomials in `n` variables of total degree at most `d`, constant first.
pub fn monomial_vector(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for k in 0..=d {
        out.extend(monomials_of_degree(n, k));
    }
    out
}

/// Monomials of total degree exactly `d`, in the global order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(n: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == n {
            cur[i] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(n, i + 1, left - e, cur, out);
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Monomial(vec![]));
        }
        return out;
    }
    rec(n, 0, d, &mut vec![0; n], &mut out);
    out
}

/// `p(Mx)`: each variable `x_i` is replaced by the `i`-th entry of `Mx`.
pub fn substitute_linear(p: &Polynomial, m: &Mat<Q>) -> Result<Polynomial> {
    let n = p.nvars();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if m.rows() != n { m.rows() } else { m.cols() },
        });
    }
    if let Some(perm) = signed_permutation(m) {
        let mut out = Polynomial::zero(n);
        for (mono, c) in p.terms() {
            let mut exps = vec![0u32; n];
            let mut negative = false;
            for (i, &a) in mono.0.iter().enumerate() {
                let (j, neg) = perm[i];
                exps[j] += a;
                negative ^= neg && a % 2 == 1;
            }
            out.add_term(Monomial(exps), if negative { -c.clone() } else { c.clone() });
        }
        return Ok(out);
    }
    let images: Vec<Polynomial> = (0..n)
        .map(|i| Polynomial::from_terms(n, (0..n).map(|j| (Monomial::var(n, j), m.get(i, j).clone()))))
        .collect();
    p.compose(&images)
}

/// `(column, negated)` per row when every row of `m` has a single `±1` entry.
fn signed_permutation(m: &Mat<Q>) -> Option<Vec<(usize, bool)>> {
    let one = q(1);
    let minus = q(-1);
    (0..m.rows())
        .map(|i| {
            let mut hit = None;
            for (j, v) in m.row(i).iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                if hit.is_some() || (*v != one && *v != minus) {
                    return None;
                }
                hit = Some((j, *v == minus));
            }
            hit
        })
        .collect()
}

/// Names of variables, used for parsing and rendering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarNames(pub Vec<String>);

impl VarNames {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        VarNames(names.iter().map(|s| s.as_ref().to_string()).collect())
    }

    /// `x, y, z` for up to three variables, otherwise `x1, …, xn`.
    pub fn default_for(n: usize) -> Self {
        if n <= 3 {
            VarNames(["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect())
        } else {
            VarNames((1..=n).map(|i| format!("x{i}")).collect())
        }
    }

    /// `prefix1, …, prefixn`.
    pub fn indexed(prefix: &str, n: usize) -> Self {
        VarNames((1..=n).map(|i| format!("{prefix}{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn parse_polynomial(text: &str, vars: &VarNames) -> Result<Polynomial> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        vars,
    };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.err("unexpected character"));
    }
    Ok(p)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a VarNames,
}

impl Parser<'_> {
    fn n(&self) -> usize {
        self.vars.len()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(c) if c.is_alphanumeric() || c == '(' || c == '_' => {
                    acc = &acc * &self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits: String = self.chars[start..self.pos].iter().collect();
            let next = self.chars.get(self.pos).copied();
            if digits.is_empty() || matches!(next, Some('.') | Some('/')) {
                return Err(Error::NonIntegerExponent { pos: start });
            }
            let e: u32 = digits.parse().map_err(|_| Error::NonIntegerExponent { pos: start })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.chars.get(self.pos) == Some(&'/') {
                    self.pos += 1;
                    let dstart = self.pos;
                    while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if dstart == self.pos {
                        return Err(self.err("expected denominator"));
                    }
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                let value = parse_rational(&text).ok_or(Error::Syntax {
                    pos: start,
                    msg: format!("invalid rational `{text}`"),
                })?;
                Ok(Polynomial::constant(self.n(), value))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.vars.0.iter().position(|v| *v == name) {
                    Some(i) => Ok(Polynomial::var(self.n(), i)),
                    None => Err(Error::UnknownVariable { name, pos: start }),
                }
            }
            Some(_) => Err(self.err("expected a number, variable or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn render_monomial(m: &Monomial, vars: &VarNames) -> String {
    let parts: Vec<String> =
        m.0.iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| {
                if *e == 1 {
                    vars.0[i].clone()
                } else {
                    format!("{}^{}", vars.0[i], e)
                }
            })
            .collect();
    parts.join("*")
}

/// Canonical text form, highest-degree terms first; parses back to the same polynomial.
pub fn render_polynomial(p: &Polynomial, vars: &VarNames) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut ordered: Vec<(&Monomial, &Q)> = p.terms.iter().collect();
    ordered.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| a.cmp(b)));
    let mut out = String::new();
    for (k, (m, c)) in ordered.into_iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = render_monomial(m, vars);
        if mono.is_empty() {
            out.push_str(&render_rational(&a));
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&render_rational(&a));
            out.push('*');
            out.push_str(&mono);
        }
    }
    out
}

/// Display wrapper pairing a polynomial with variable names.
pub struct Show<'a>(pub &'a Polynomial, pub &'a VarNames);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_polynomial(self.0, self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn xy() -> VarNames {
        VarNames::new(&["x", "y"])
    }

    pub(crate) const D4_INSTANCE: &str = "x^6+y^6-x^4*y^2-x^2*y^4-x^4-y^4-x^2-y^2+3*x^2*y^2+1";

    #[test]
    fn parse_simple_square() {
        let p = parse_polynomial("x^2 + 2*x*y + y^2", &xy()).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.coeff(&Monomial(vec![2, 0])), q(1));
        assert_eq!(p.coeff(&Monomial(vec![1, 1])), q(2));
        assert_eq!(p.coeff(&Monomial(vec![0, 2])), q(1));
    }

    #[test]
    fn parse_d4_instance() {
        let p = parse_polynomial(D4_INSTANCE, &xy()).unwrap();
        assert_eq!(p.len(), 10);
        assert_eq!(p.degree(), Degree::Finite(6));
    }

    #[test]
    fn zero_has_sentinel_degree() {
        let p = parse_polynomial("0", &xy()).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_polynomial("x + w", &xy()),
            Err(Error::UnknownVariable { pos: 4, .. })
        ));
        assert!(matches!(
            parse_polynomial("x^1.5", &xy()),
            Err(Error::NonIntegerExponent { .. })
        ));
        assert!(matches!(
            parse_polynomial("x^-1", &xy()),
            Err(Error::NonIntegerExponent { .. })
        ));
        assert!(matches!(
            parse_polynomial("x + * y", &xy()),
            Err(Error::Syntax { pos: 4, .. })
        ));
    }

    #[test]
    fn rationals_and_parentheses() {
        let p = parse_polynomial("-3/4*x*(x - 2y) + 1/2", &xy()).unwrap();
        assert_eq!(p.coeff(&Monomial(vec![2, 0])), qr(-3, 4));
        assert_eq!(p.coeff(&Monomial(vec![1, 1])), qr(3, 2));
        assert_eq!(p.coeff(&Monomial(vec![0, 0])), qr(1, 2));
    }

    #[test]
    fn monomial_vector_order() {
        let v = monomial_vector(2, 3);
        assert_eq!(v.len(), 10);
        assert_eq!(v[0], Monomial(vec![0, 0]));
        assert_eq!(v[1], Monomial(vec![1, 0]));
        assert_eq!(v[9], Monomial(vec![0, 3]));
        assert_eq!(monomial_vector(3, 2).len(), 10);
        assert_eq!(monomial_vector(1, 0), vec![Monomial(vec![0])]);
        for w in v.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn substitution_examples() {
        let vars = xy();
        let rot = Mat::from_rows(vec![vec![q(0), q(-1)], vec![q(1), q(0)]]);
        let p = parse_polynomial("x^2 - y^2", &vars).unwrap();
        assert_eq!(substitute_linear(&p, &rot).unwrap(), -&p);
        let f = parse_polynomial(D4_INSTANCE, &vars).unwrap();
        assert_eq!(substitute_linear(&f, &rot).unwrap(), f);
        assert_eq!(substitute_linear(&f, &Mat::identity(2)).unwrap(), f);
        assert!(substitute_linear(&f, &Mat::identity(3)).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let vars = xy();
        let a = parse_polynomial("x + y", &vars).unwrap();
        let b = parse_polynomial("x - y", &vars).unwrap();
        let prod = poly_arith(ArithOp::Mul, &a, &b).unwrap();
        assert_eq!(render_polynomial(&prod, &vars), "x^2 - y^2");
        assert_eq!(poly_arith(ArithOp::Add, &a, &Polynomial::zero(2)).unwrap(), a);
        assert!(poly_arith(ArithOp::Add, &a, &Polynomial::zero(3)).is_err());
        // Squaring xy(x^2 - y^2) gives t1^2 t2 - 4 t2^2 with t1 = x^2 + y^2, t2 = x^2 y^2.
        let eta = parse_polynomial("x*y*(x^2-y^2)", &vars).unwrap();
        let t1 = parse_polynomial("x^2+y^2", &vars).unwrap();
        let t2 = parse_polynomial("x^2*y^2", &vars).unwrap();
        let rhs = &(&(&t1 * &t1) * &t2) - &(&t2 * &t2).scale(&q(4));
        assert_eq!(&eta * &eta, rhs);
    }

    #[test]
    fn evaluation_examples() {
        let vars = xy();
        let f = parse_polynomial(D4_INSTANCE, &vars).unwrap();
        assert_eq!(f.evaluate(&[q(0), q(0)]).unwrap(), q(1));
        assert_eq!(Polynomial::zero(2).evaluate(&[qr(1, 3), q(5)]).unwrap(), q(0));
        let s = parse_polynomial("x^2 + y^2", &vars).unwrap();
        assert_eq!(s.evaluate(&[qr(3, 2), qr(1, 2)]).unwrap(), qr(5, 2));
        assert!(s.evaluate(&[q(1)]).is_err());
    }

    #[test]
    fn render_round_trip_fixed() {
        let vars = xy();
        let f = parse_polynomial(D4_INSTANCE, &vars).unwrap();
        let text = render_polynomial(&f, &vars);
        assert_eq!(parse_polynomial(&text, &vars).unwrap(), f);
        assert!(text.starts_with("x^6"));
    }
}
