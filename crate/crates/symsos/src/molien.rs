//! Molien series of each isotypic component and the dimension tables derived from them.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::cyclotomic::Cyc;
use crate::error::{Error, Result};
use crate::grouprep::{GroupAction, IrrepCatalog, RealIrrep};
use crate::linalg::{Mat, Ring};
use crate::rational::{q, render_rational, Q};

/// Dense univariate polynomial in `ξ`, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly(Vec<Q>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn constant(c: Q) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn one() -> Self {
        UniPoly::constant(q(1))
    }

    /// `c ξ^k`.
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        UniPoly::new(v)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.0.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        UniPoly::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&q(-1)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        UniPoly::new(self.0.iter().map(|v| v * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Q::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(UniPoly::one(), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder; `None` when dividing by zero.
    pub fn divrem(&self, div: &Self) -> Option<(Self, Self)> {
        let dd = div.degree()?;
        let lead = div.lead();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return Some((UniPoly::zero(), self.clone()));
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dv) in div.0.iter().enumerate() {
                rem[i + j] -= &c * dv;
            }
            quot[i] = c;
        }
        Some((UniPoly::new(quot), UniPoly::new(rem)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.lead();
        a.scale(&(Q::one() / lead))
    }

    pub fn evaluate(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{}", render_rational(&mag))?,
                _ => {
                    if !unit {
                        write!(f, "{}*", render_rational(&mag))?;
                    }
                    if k == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Quotient of univariate polynomials, kept reduced with denominator constant term 1
/// whenever that term is nonzero.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: UniPoly,
    den: UniPoly,
}

impl RationalFunction {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidRepresentation("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_zero() || g.degree() == Some(0) {
            (num, den)
        } else {
            (
                num.divrem(&g).expect("gcd nonzero").0,
                den.divrem(&g).expect("gcd nonzero").0,
            )
        };
        let norm = if den.coeff(0).is_zero() {
            den.lead()
        } else {
            den.coeff(0)
        };
        let inv = Q::one() / norm;
        num = num.scale(&inv);
        den = den.scale(&inv);
        Ok(RationalFunction { num, den })
    }

    pub fn polynomial(p: UniPoly) -> Self {
        RationalFunction {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn numerator(&self) -> &UniPoly {
        &self.num
    }

    pub fn denominator(&self) -> &UniPoly {
        &self.den
    }

    pub fn add(&self, other: &Self) -> Self {
        let g = self.den.gcd(&other.den);
        let a = self.den.divrem(&g).expect("gcd nonzero").0;
        let b = other.den.divrem(&g).expect("gcd nonzero").0;
        let num = self.num.mul(&b).add(&other.num.mul(&a));
        RationalFunction::new(num, a.mul(&other.den)).expect("nonzero denominator")
    }

    pub fn scale(&self, c: &Q) -> Self {
        RationalFunction::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    pub fn mul(&self, other: &Self) -> Self {
        RationalFunction::new(self.num.mul(&other.num), self.den.mul(&other.den)).expect("nonzero denominator")
    }

    /// Equality as rational functions, by cross multiplication.
    pub fn equals(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// Taylor coefficients `c_0, …, c_{d_max}` at `ξ = 0`.
    pub fn series_coefficients(&self, d_max: usize) -> Result<Vec<Q>> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(Error::InvalidRepresentation(
                "denominator vanishes at the origin".into(),
            ));
        }
        let mut out: Vec<Q> = Vec::with_capacity(d_max + 1);
        for k in 0..=d_max {
            let mut acc = self.num.coeff(k);
            for j in 1..=k.min(self.den.degree().unwrap_or(0)) {
                acc -= self.den.coeff(j) * &out[k - j];
            }
            out.push(acc / &d0);
        }
        Ok(out)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

pub fn series_coefficients(f: &RationalFunction, d_max: usize) -> Result<Vec<Q>> {
    f.series_coefficients(d_max)
}

/// `det(I − ξM)` as a polynomial in `ξ`.
pub fn det_one_minus(m: &Mat<Q>) -> UniPoly {
    if let Some(p) = signed_permutation_det(m) {
        return p;
    }
    // Faddeev–LeVerrier: coefficients of det(tI − M) = Σ c_k t^k, then reverse.
    let n = m.rows();
    let mut c = vec![Q::zero(); n + 1];
    c[n] = q(1);
    let mut mk = Mat::<Q>::zeros(n, n);
    for k in 1..=n {
        let shifted = mk.add(&Mat::identity(n).scale(&c[n + 1 - k]));
        mk = m.mul(&shifted);
        c[n - k] = -mk.trace() / q(k as i64);
    }
    UniPoly::new(c.into_iter().rev().collect())
}

fn signed_permutation_det(m: &Mat<Q>) -> Option<UniPoly> {
    let n = m.rows();
    let mut image = vec![(0usize, 0i64); n];
    for (j, slot) in image.iter_mut().enumerate() {
        let mut hit = None;
        for i in 0..n {
            let v = m.get(i, j);
            if v.is_zero() {
                continue;
            }
            if hit.is_some() || !v.abs().is_one() {
                return None;
            }
            hit = Some((i, if v.is_positive() { 1 } else { -1 }));
        }
        *slot = hit?;
    }
    let mut seen = vec![false; n];
    let mut out = UniPoly::one();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let (mut len, mut sign, mut j) = (0usize, 1i64, start);
        while !seen[j] {
            seen[j] = true;
            len += 1;
            sign *= image[j].1;
            j = image[j].0;
        }
        // A signed cycle of length L with sign product s contributes 1 − s ξ^L.
        out = out.mul(&UniPoly::one().sub(&UniPoly::monomial(q(sign), len)));
    }
    Some(out)
}

/// Elements grouped by `det(I − ξ ϑ(g))`, shared by all irreps of a catalog.
#[derive(Clone, Debug)]
pub struct DeterminantClasses {
    classes: Vec<(UniPoly, Vec<usize>)>,
    order: usize,
}

impl DeterminantClasses {
    pub fn new(action: &GroupAction) -> Self {
        let mut index: HashMap<UniPoly, usize> = HashMap::new();
        let mut classes: Vec<(UniPoly, Vec<usize>)> = Vec::new();
        for (g, m) in action.elements().iter().enumerate() {
            let d = det_one_minus(m);
            match index.get(&d) {
                Some(&c) => classes[c].1.push(g),
                None => {
                    index.insert(d.clone(), classes.len());
                    classes.push((d, vec![g]));
                }
            }
        }
        DeterminantClasses {
            classes,
            order: action.order(),
        }
    }

    /// `(1/|G|) Σ_g χ(g) / det(I − ξ ϑ(g))`.
    pub fn series(&self, irrep: &RealIrrep) -> Result<RationalFunction> {
        let mut den = UniPoly::one();
        let mut terms: Vec<(Q, &UniPoly)> = Vec::new();
        for (d, members) in &self.classes {
            let mut chi = Cyc::r_zero();
            for &g in members {
                chi = chi.r_add(&irrep.character(g));
            }
            // The character sum over a determinant class is Galois-stable, hence rational.
            let chi = chi.as_rational().ok_or_else(|| {
                Error::InvalidRepresentation(format!(
                    "character sum of {} over a determinant class is irrational",
                    irrep.label
                ))
            })?;
            if chi.is_zero() {
                continue;
            }
            let g = den.gcd(d);
            den = den.mul(&d.divrem(&g).expect("gcd nonzero").0);
            terms.push((chi, d));
        }
        let mut num = UniPoly::zero();
        for (chi, d) in terms {
            let cof = den.divrem(d).expect("nonzero").0;
            num = num.add(&cof.scale(&chi));
        }
        RationalFunction::new(num.scale(&(Q::one() / q(self.order as i64))), den)
    }
}

pub fn molien_series(action: &GroupAction, irrep: &RealIrrep) -> Result<RationalFunction> {
    DeterminantClasses::new(action).series(irrep)
}

/// Molien series of every irrep of a catalog, in catalog order.
pub fn catalog_series(catalog: &IrrepCatalog) -> Result<Vec<RationalFunction>> {
    let classes = DeterminantClasses::new(&catalog.action);
    catalog.irreps.iter().map(|r| classes.series(r)).collect()
}

/// Outcome of comparing `Σ wᵢ ψᵢ` with the Hilbert series `1/(1−ξ)ⁿ`.
#[derive(Clone, Debug)]
pub struct HilbertReport {
    pub holds: bool,
    pub weighted_sum: RationalFunction,
    pub expected: RationalFunction,
}

pub fn hilbert_consistency(catalog: &IrrepCatalog) -> Result<HilbertReport> {
    let series = catalog_series(catalog)?;
    let mut sum = RationalFunction::polynomial(UniPoly::zero());
    for (irrep, psi) in catalog.irreps.iter().zip(&series) {
        sum = sum.add(&psi.scale(&irrep.hilbert_weight()));
    }
    let expected = RationalFunction::new(UniPoly::one(), UniPoly::from_ints(&[1, -1]).pow(catalog.action.n()))?;
    Ok(HilbertReport {
        holds: sum.equals(&expected),
        weighted_sum: sum,
        expected,
    })
}

/// Integer multiplicities of every irrep in each homogeneous degree `0..=d_max`.
pub fn dimension_table(catalog: &IrrepCatalog, d_max: usize) -> Result<Vec<Vec<BigInt>>> {
    catalog_series(catalog)?
        .iter()
        .map(|psi| {
            psi.series_coefficients(d_max)?
                .into_iter()
                .map(|c| {
                    if c.is_integer() && !c.is_negative() {
                        Ok(c.to_integer())
                    } else {
                        Err(Error::InvalidRepresentation(format!(
                            "series coefficient {c} is not a non-negative integer"
                        )))
                    }
                })
                .collect()
        })
        .collect()
}

/// Per-degree totals `Σ wᵢ·cᵢ(d)`, which equal `C(n+d−1, d)`.
pub fn table_totals(catalog: &IrrepCatalog, table: &[Vec<BigInt>]) -> Vec<Q> {
    let width = table.first().map_or(0, Vec::len);
    (0..width)
        .map(|d| {
            catalog
                .irreps
                .iter()
                .zip(table)
                .map(|(irrep, row)| irrep.hilbert_weight() * Q::from_integer(row[d].clone()))
                .sum()
        })
        .collect()
}

/// Render the dimension table with one row per irrep, one column per degree and a
/// final total row.
pub fn render_dimension_table(catalog: &IrrepCatalog, d_max: usize) -> Result<String> {
    let table = dimension_table(catalog, d_max)?;
    let totals = table_totals(catalog, &table);
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["d=".to_string()];
    header.extend((0..=d_max).map(|d| d.to_string()));
    rows.push(header);
    for (i, (irrep, row)) in catalog.irreps.iter().zip(&table).enumerate() {
        let mut line = vec![format!("theta{} {}", i + 1, irrep.label)];
        line.extend(row.iter().map(|c| c.to_string()));
        rows.push(line);
    }
    let mut total = vec!["Total".to_string()];
    total.extend(totals.iter().map(render_rational));
    rows.push(total);
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (r, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
        if r == 0 || r == rows.len() - 2 {
            out.push_str(&"-".repeat(cells.join(" ").len()));
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouprep::{catalog, CatalogSpec};
    use crate::rational::{binomial, qr};

    fn cat(name: &str) -> IrrepCatalog {
        catalog(&CatalogSpec::parse(name).unwrap()).unwrap()
    }

    #[test]
    fn unipoly_division_and_gcd() {
        let a = UniPoly::from_ints(&[-1, 0, 1]);
        let b = UniPoly::from_ints(&[1, 1]);
        let (quot, rem) = a.divrem(&b).unwrap();
        assert_eq!(quot, UniPoly::from_ints(&[-1, 1]));
        assert!(rem.is_zero());
        let c = UniPoly::from_ints(&[1, 0, -1, 0]).mul(&UniPoly::from_ints(&[2, 3]));
        assert_eq!(a.gcd(&c), UniPoly::from_ints(&[-1, 0, 1]));
        assert_eq!(UniPoly::from_ints(&[0, 1, 0, -2]).to_string(), "t - 2*t^3");
    }

    #[test]
    fn geometric_series() {
        let f = RationalFunction::new(UniPoly::one(), UniPoly::from_ints(&[1, -1])).unwrap();
        assert!(f.series_coefficients(6).unwrap().iter().all(|c| *c == q(1)));
        let bad = RationalFunction::new(UniPoly::one(), UniPoly::from_ints(&[0, 1])).unwrap();
        assert!(bad.series_coefficients(3).is_err());
    }

    #[test]
    fn determinant_paths_agree() {
        let rot = Mat::from_rows(vec![
            vec![qr(3, 5), qr(-4, 5), q(0)],
            vec![qr(4, 5), qr(3, 5), q(0)],
            vec![q(0), q(0), q(-1)],
        ]);
        // 1 − (6/5)ξ + ξ² times 1 + ξ.
        let expect = UniPoly::new(vec![q(1), qr(-6, 5), q(1)]).mul(&UniPoly::from_ints(&[1, 1]));
        assert_eq!(det_one_minus(&rot), expect);
        let perm = crate::grouprep::permutation_matrix(&[1, 2, 0]);
        assert_eq!(det_one_minus(&perm), UniPoly::from_ints(&[1, 0, 0, -1]));
    }

    #[test]
    fn d4_series() {
        let d4 = cat("dihedral:4");
        let series = catalog_series(&d4).unwrap();
        let q_den = UniPoly::from_ints(&[1, 0, -1]).mul(&UniPoly::from_ints(&[1, 0, 0, 0, -1]));
        let nums = [
            UniPoly::from_ints(&[1]),
            UniPoly::from_ints(&[0, 0, 0, 0, 1]),
            UniPoly::from_ints(&[0, 0, 1]),
            UniPoly::from_ints(&[0, 0, 1]),
            UniPoly::from_ints(&[0, 1, 0, 1]),
        ];
        for (psi, num) in series.iter().zip(nums) {
            let expect = RationalFunction::new(num, q_den.clone()).unwrap();
            assert!(psi.equals(&expect), "{psi}");
        }
        assert!(hilbert_consistency(&d4).unwrap().holds);
    }

    #[test]
    fn trivial_and_sign_flip_series() {
        let t = cat("trivial:3");
        let psi = molien_series(&t.action, &t.irreps[0]).unwrap();
        let expect = RationalFunction::new(UniPoly::one(), UniPoly::from_ints(&[1, -1]).pow(3)).unwrap();
        assert!(psi.equals(&expect));
        let c = cat("c2n:4");
        let series = catalog_series(&c).unwrap();
        for (irrep, psi) in c.irreps.iter().zip(&series) {
            let r = irrep.label.matches(|ch: char| ch.is_ascii_digit()).count();
            let expect =
                RationalFunction::new(UniPoly::monomial(q(1), r), UniPoly::from_ints(&[1, 0, -1]).pow(4)).unwrap();
            assert!(psi.equals(&expect), "{}: {psi}", irrep.label);
        }
        let coeffs = series[0].series_coefficients(12).unwrap();
        for d in 0..=6 {
            assert_eq!(coeffs[2 * d], Q::from_integer(binomial(4 + d - 1, d)));
        }
    }

    #[test]
    fn s4_table_first_columns() {
        let s4 = cat("symmetric:4");
        let table = dimension_table(&s4, 6).unwrap();
        assert_eq!(table[4][6], BigInt::from(1));
        assert!(table[4][..6].iter().all(Zero::is_zero));
        let totals = table_totals(&s4, &table);
        for (d, t) in totals.iter().enumerate() {
            assert_eq!(*t, Q::from_integer(binomial(4 + d - 1, d)));
        }
    }

    #[test]
    fn complex_type_series_count_real_dimension() {
        let c4 = cat("cyclic:4");
        let table = dimension_table(&c4, 4).unwrap();
        // Degree 1: x, y span the realified rotation irrep once, real dimension 2.
        assert_eq!(table[2][1], BigInt::from(2));
        assert!(hilbert_consistency(&c4).unwrap().holds);
        for name in ["cyclic:3", "cyclic:5", "cyclic:6", "dihedral:5", "symmetric:5", "c2n:3"] {
            assert!(hilbert_consistency(&cat(name)).unwrap().holds, "{name}");
        }
    }
}
