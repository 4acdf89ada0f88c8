//! Presentations of invariant rings by primary and secondary invariants, and exact
//! rewriting of invariant polynomials in those generators.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::grouprep::CatalogSpec;
use crate::linalg::{solve, Mat};
use crate::polyring::{parse_polynomial, render_polynomial, substitute_linear, Monomial, Polynomial, VarNames};
use crate::rational::{q, Q};
use crate::textformat::{format_error, parse_matrix, records, render_matrix, split_binding};

/// Primary invariants `θ`, secondary invariants `η` (with `η₁ = 1`) and syzygies,
/// together with the generators the invariance was checked against.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantPresentation {
    vars: VarNames,
    generators: Vec<Mat<Q>>,
    theta: Vec<Polynomial>,
    theta_names: Vec<String>,
    eta: Vec<Polynomial>,
    eta_names: Vec<String>,
    /// Polynomials in the symbols `θ₁…θ_s, η₁…η_t`.
    syzygies: Vec<Polynomial>,
}

impl InvariantPresentation {
    /// Build and verify: every `θ`, `η` invariant under each generator, `η₁ = 1`,
    /// `η` homogeneous, and each syzygy expanding to zero.
    pub fn new(
        vars: VarNames,
        generators: Vec<Mat<Q>>,
        theta: Vec<(String, Polynomial)>,
        eta: Vec<(String, Polynomial)>,
        syzygies: Vec<Polynomial>,
    ) -> Result<Self> {
        let n = vars.len();
        let (theta_names, theta): (Vec<String>, Vec<Polynomial>) = theta.into_iter().unzip();
        let (eta_names, eta): (Vec<String>, Vec<Polynomial>) = eta.into_iter().unzip();
        if eta.first() != Some(&Polynomial::one(n)) {
            return Err(Error::Rewrite("first secondary invariant must be 1".into()));
        }
        for p in theta.iter().chain(&eta) {
            if p.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.nvars(),
                });
            }
            if !p.is_homogeneous() || p.is_zero() {
                return Err(Error::Rewrite(
                    "invariant generators must be nonzero and homogeneous".into(),
                ));
            }
        }
        if theta.iter().any(|p| p.degree_or_zero() == 0) {
            return Err(Error::Rewrite("primary invariants must have positive degree".into()));
        }
        let pres = InvariantPresentation {
            vars,
            generators,
            theta,
            theta_names,
            eta,
            eta_names,
            syzygies,
        };
        for p in pres.theta.iter().chain(&pres.eta) {
            pres.check_invariant(p)?;
        }
        let symbols = pres.symbol_images();
        for (k, syz) in pres.syzygies.iter().enumerate() {
            if syz.nvars() != symbols.len() || !syz.compose(&symbols)?.is_zero() {
                return Err(Error::Rewrite(format!("syzygy {} does not vanish", k + 1)));
            }
        }
        Ok(pres)
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &VarNames {
        &self.vars
    }

    pub fn generators(&self) -> &[Mat<Q>] {
        &self.generators
    }

    pub fn theta(&self) -> &[Polynomial] {
        &self.theta
    }

    pub fn eta(&self) -> &[Polynomial] {
        &self.eta
    }

    pub fn theta_names(&self) -> VarNames {
        VarNames(self.theta_names.clone())
    }

    pub fn eta_names(&self) -> &[String] {
        &self.eta_names
    }

    /// Names of `θ` followed by `η`, the variables of syzygies.
    pub fn symbol_names(&self) -> VarNames {
        VarNames(self.theta_names.iter().chain(&self.eta_names).cloned().collect())
    }

    pub fn syzygies(&self) -> &[Polynomial] {
        &self.syzygies
    }

    pub fn theta_degrees(&self) -> Vec<u32> {
        self.theta.iter().map(Polynomial::degree_or_zero).collect()
    }

    pub fn eta_degrees(&self) -> Vec<u32> {
        self.eta.iter().map(Polynomial::degree_or_zero).collect()
    }

    fn symbol_images(&self) -> Vec<Polynomial> {
        self.theta.iter().chain(&self.eta).cloned().collect()
    }

    /// Error naming the first generator that does not fix `p`.
    pub fn check_invariant(&self, p: &Polynomial) -> Result<()> {
        for (k, g) in self.generators.iter().enumerate() {
            if substitute_linear(p, g)? != *p {
                return Err(Error::NotInvariant { generator: k });
            }
        }
        Ok(())
    }
}

/// `Σ_j η_j · f̃_j(θ)`, one polynomial in the `θ` symbols per secondary invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantPoly {
    parts: Vec<Polynomial>,
}

impl InvariantPoly {
    pub fn zero(pres: &InvariantPresentation) -> Self {
        InvariantPoly {
            parts: vec![Polynomial::zero(pres.theta.len()); pres.eta.len()],
        }
    }

    /// A polynomial in `θ` alone, attached to `η₁ = 1`.
    pub fn from_theta(pres: &InvariantPresentation, p: Polynomial) -> Result<Self> {
        let mut out = InvariantPoly::zero(pres);
        if p.nvars() != pres.theta.len() {
            return Err(Error::DimensionMismatch {
                expected: pres.theta.len(),
                got: p.nvars(),
            });
        }
        out.parts[0] = p;
        Ok(out)
    }

    pub fn from_parts(pres: &InvariantPresentation, parts: Vec<Polynomial>) -> Result<Self> {
        if parts.len() != pres.eta.len() {
            return Err(Error::DimensionMismatch {
                expected: pres.eta.len(),
                got: parts.len(),
            });
        }
        if let Some(p) = parts.iter().find(|p| p.nvars() != pres.theta.len()) {
            return Err(Error::DimensionMismatch {
                expected: pres.theta.len(),
                got: p.nvars(),
            });
        }
        Ok(InvariantPoly { parts })
    }

    pub fn parts(&self) -> &[Polynomial] {
        &self.parts
    }

    pub fn part(&self, j: usize) -> &Polynomial {
        &self.parts[j]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Polynomial::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        InvariantPoly {
            parts: self.parts.iter().zip(&other.parts).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        InvariantPoly {
            parts: self.parts.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Multiply by a polynomial in `θ`.
    pub fn mul_theta(&self, p: &Polynomial) -> Self {
        InvariantPoly {
            parts: self.parts.iter().map(|a| a * p).collect(),
        }
    }
}

/// Full expansion `Σ_j η_j(x) f̃_j(θ(x))`.
pub fn expand_invariants(f: &InvariantPoly, pres: &InvariantPresentation) -> Result<Polynomial> {
    if f.parts.len() != pres.eta.len() {
        return Err(Error::DimensionMismatch {
            expected: pres.eta.len(),
            got: f.parts.len(),
        });
    }
    let mut out = Polynomial::zero(pres.nvars());
    for (part, eta) in f.parts.iter().zip(&pres.eta) {
        if part.is_zero() {
            continue;
        }
        out = &out + &(eta * &part.compose(&pres.theta)?);
    }
    Ok(out)
}

/// Largest `Σ αᵢ deg θᵢ + deg η_j` over the terms; zero for constants and zero.
pub fn weighted_degree(f: &InvariantPoly, pres: &InvariantPresentation) -> u32 {
    let wt = pres.theta_degrees();
    let wt = &wt;
    let ed = pres.eta_degrees();
    f.parts
        .iter()
        .zip(&ed)
        .flat_map(|(p, e)| p.terms().map(move |(m, _)| m.weighted_degree(wt) + e))
        .max()
        .unwrap_or(0)
}

/// Exponent vectors `α` with `Σ αᵢ wᵢ = target`, in descending lexicographic order.
pub fn weighted_exponents(weights: &[u32], target: u32) -> Vec<Vec<u32>> {
    fn rec(w: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == w.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in (0..=left / w[i]).rev() {
            cur[i] = e;
            rec(w, i + 1, left - e * w[i], cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(weights, 0, target, &mut vec![0; weights.len()], &mut out);
    out
}

/// Exponent vectors of weighted degree at most `bound`, ascending by weighted degree.
pub fn weighted_exponents_upto(weights: &[u32], bound: u32) -> Vec<Vec<u32>> {
    (0..=bound).flat_map(|k| weighted_exponents(weights, k)).collect()
}

/// Expansions of `θ^α` with memoization of already computed products.
pub(crate) struct ThetaPowers<'a> {
    theta: &'a [Polynomial],
    cache: HashMap<Vec<u32>, Polynomial>,
}

impl<'a> ThetaPowers<'a> {
    pub(crate) fn new(theta: &'a [Polynomial]) -> Self {
        ThetaPowers {
            theta,
            cache: HashMap::new(),
        }
    }

    pub(crate) fn get(&mut self, alpha: &[u32]) -> Polynomial {
        if let Some(p) = self.cache.get(alpha) {
            return p.clone();
        }
        let p = match alpha.iter().position(|&e| e > 0) {
            None => Polynomial::one(self.theta.first().map_or(0, Polynomial::nvars)),
            Some(i) => {
                let mut smaller = alpha.to_vec();
                smaller[i] -= 1;
                &self.get(&smaller) * &self.theta[i]
            }
        };
        self.cache.insert(alpha.to_vec(), p.clone());
        p
    }
}

/// Unique `f̃` with `expand(f̃) = p`, solved degree by degree.
pub fn rewrite_in_invariants(p: &Polynomial, pres: &InvariantPresentation) -> Result<InvariantPoly> {
    if p.nvars() != pres.nvars() {
        return Err(Error::DimensionMismatch {
            expected: pres.nvars(),
            got: p.nvars(),
        });
    }
    pres.check_invariant(p)?;
    let wt = pres.theta_degrees();
    let ed = pres.eta_degrees();
    let mut powers = ThetaPowers::new(&pres.theta);
    let mut out = InvariantPoly::zero(pres);
    for k in 0..=p.degree_or_zero() {
        let target = p.homogeneous_part(k);
        if target.is_zero() {
            continue;
        }
        let mut cols: Vec<(usize, Vec<u32>, Polynomial)> = Vec::new();
        for (j, (&e, eta)) in ed.iter().zip(&pres.eta).enumerate() {
            if e > k {
                continue;
            }
            for alpha in weighted_exponents(&wt, k - e) {
                let col = eta * &powers.get(&alpha);
                cols.push((j, alpha, col));
            }
        }
        let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
        for m in target
            .terms()
            .map(|(m, _)| m)
            .chain(cols.iter().flat_map(|c| c.2.terms().map(|(m, _)| m)))
        {
            let next = rows.len();
            rows.entry(m.clone()).or_insert(next);
        }
        let mut a = Mat::<Q>::zeros(rows.len(), cols.len());
        for (c, (_, _, poly)) in cols.iter().enumerate() {
            for (m, v) in poly.terms() {
                a.set(rows[m], c, v.clone());
            }
        }
        let mut b = vec![Q::zero(); rows.len()];
        for (m, v) in target.terms() {
            b[rows[m]] = v.clone();
        }
        let (x, unique) = solve(&a, &b)
            .ok_or_else(|| Error::Rewrite(format!("degree-{k} part is not in the span of the presentation")))?;
        if !unique {
            return Err(Error::Rewrite(format!(
                "representation in degree {k} is not unique; presentation is malformed"
            )));
        }
        for ((j, alpha, _), c) in cols.into_iter().zip(x) {
            if !c.is_zero() {
                out.parts[j].add_term(Monomial(alpha), c);
            }
        }
    }
    Ok(out)
}

/// Render as `f̃₁ + (f̃₂)*η₂ + …` using the presentation's symbol names.
pub fn render_invariant(f: &InvariantPoly, pres: &InvariantPresentation) -> String {
    let names = pres.theta_names();
    let mut pieces = Vec::new();
    for (j, part) in f.parts.iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        let body = render_polynomial(part, &names);
        if j == 0 {
            pieces.push(body);
        } else if part.len() == 1 && part.terms().next().is_some_and(|(m, c)| m.degree() == 0 && *c == q(1)) {
            pieces.push(pres.eta_names[j].clone());
        } else {
            pieces.push(format!("({body})*{}", pres.eta_names[j]));
        }
    }
    if pieces.is_empty() {
        "0".to_string()
    } else {
        pieces.join(" + ")
    }
}

/// Parse an expression in `θ` and `η` symbols; secondary invariants may only
/// appear linearly.
pub fn parse_invariant(text: &str, pres: &InvariantPresentation) -> Result<InvariantPoly> {
    let s = pres.theta.len();
    let p = parse_polynomial(text, &pres.symbol_names())?;
    let mut out = InvariantPoly::zero(pres);
    for (m, c) in p.terms() {
        let etas: Vec<(usize, u32)> = m.0[s..]
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(j, &e)| (j, e))
            .collect();
        let j = match etas.as_slice() {
            [] => 0,
            [(j, 1)] => *j,
            _ => return Err(Error::Rewrite("secondary invariants must appear linearly".into())),
        };
        out.parts[j].add_term(Monomial(m.0[..s].to_vec()), c.clone());
    }
    Ok(out)
}

fn elementary_symmetric(n: usize, k: usize) -> Polynomial {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Polynomial) {
        if k == 0 {
            out.add_term(Monomial(cur.clone()), q(1));
            return;
        }
        for i in start..=n - k {
            cur[i] = 1;
            rec(n, k - 1, i + 1, cur, out);
            cur[i] = 0;
        }
    }
    let mut out = Polynomial::zero(n);
    rec(n, k, 0, &mut vec![0; n], &mut out);
    out
}

/// Built-in presentations: symmetric groups (elementary symmetric polynomials),
/// sign flips (squares), the planar dihedral group of order 8, the planar
/// quarter-turn group (with a secondary invariant), and the trivial group.
pub fn presentation(spec: &CatalogSpec) -> Result<InvariantPresentation> {
    let n = spec.nvars();
    let vars = VarNames::default_for(n);
    let gens = spec.generators();
    let parse = |t: &str| parse_polynomial(t, &vars);
    let one = vec![("eta1".to_string(), Polynomial::one(n))];
    let indexed = |prefix: &str, polys: Vec<Polynomial>| -> Vec<(String, Polynomial)> {
        polys
            .into_iter()
            .enumerate()
            .map(|(i, p)| (format!("{prefix}{}", i + 1), p))
            .collect()
    };
    match *spec {
        CatalogSpec::Symmetric(_) => InvariantPresentation::new(
            vars.clone(),
            gens,
            indexed("e", (1..=n).map(|k| elementary_symmetric(n, k)).collect()),
            one,
            vec![],
        ),
        CatalogSpec::C2n(_) => InvariantPresentation::new(
            vars.clone(),
            gens,
            indexed("theta", (0..n).map(|i| Polynomial::var(n, i).pow(2)).collect()),
            one,
            vec![],
        ),
        CatalogSpec::Trivial(_) => InvariantPresentation::new(
            vars.clone(),
            gens,
            indexed("theta", (0..n).map(|i| Polynomial::var(n, i)).collect()),
            one,
            vec![],
        ),
        CatalogSpec::Dihedral { m: 4, planar: true } => InvariantPresentation::new(
            vars.clone(),
            gens,
            indexed("theta", vec![parse("x^2+y^2")?, parse("x^2*y^2")?]),
            one,
            vec![],
        ),
        CatalogSpec::Cyclic { m: 4, planar: true } => {
            let mut eta = one;
            eta.push(("eta2".to_string(), parse("x^3*y-x*y^3")?));
            let symbols = VarNames::new(&["theta1", "theta2", "eta1", "eta2"]);
            InvariantPresentation::new(
                vars.clone(),
                gens,
                indexed("theta", vec![parse("x^2+y^2")?, parse("x^2*y^2")?]),
                eta,
                vec![parse_polynomial("eta2^2 + 4*theta2^2 - theta1^2*theta2", &symbols)?],
            )
        }
        _ => Err(Error::UnsupportedCatalog(format!(
            "no built-in invariant presentation for {}",
            spec.name()
        ))),
    }
}

/// Text form: `vars`, `generator` (rows split by `;`), `theta name = poly`,
/// `eta name = poly` (the first must be `1`), and `syzygy poly` in the symbol names.
pub fn parse_presentation(text: &str) -> Result<InvariantPresentation> {
    let mut vars: Option<VarNames> = None;
    let mut gens = Vec::new();
    let mut theta = Vec::new();
    let mut eta = Vec::new();
    let mut syz_text = Vec::new();
    for rec in records(text) {
        let need_vars = |v: &Option<VarNames>| {
            v.clone()
                .ok_or_else(|| format_error(rec.line, "`vars` must come first"))
        };
        match rec.key {
            "vars" => {
                let names: Vec<&str> = rec.rest.split_whitespace().collect();
                vars = Some(VarNames::new(&names));
            }
            "generator" => gens.push(parse_matrix(rec.rest, rec.line)?),
            "theta" | "eta" => {
                let v = need_vars(&vars)?;
                let (name, body) = split_binding(rec.rest, rec.line)?;
                let p = parse_polynomial(body, &v).map_err(|e| format_error(rec.line, e.to_string()))?;
                if rec.key == "theta" {
                    theta.push((name.to_string(), p));
                } else {
                    eta.push((name.to_string(), p));
                }
            }
            "syzygy" => syz_text.push((rec.line, rec.rest.to_string())),
            other => return Err(format_error(rec.line, format!("unknown record `{other}`"))),
        }
    }
    let vars = vars.ok_or_else(|| format_error(0, "missing `vars`"))?;
    if let Some(g) = gens.iter().find(|g| g.rows() != vars.len() || !g.is_square()) {
        return Err(Error::DimensionMismatch {
            expected: vars.len(),
            got: g.rows(),
        });
    }
    let symbols = VarNames(
        theta
            .iter()
            .chain(&eta)
            .map(|(n, _): &(String, Polynomial)| n.clone())
            .collect(),
    );
    let syzygies = syz_text
        .into_iter()
        .map(|(line, t)| parse_polynomial(&t, &symbols).map_err(|e| format_error(line, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    InvariantPresentation::new(vars, gens, theta, eta, syzygies)
}

pub fn render_presentation(pres: &InvariantPresentation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vars {}", pres.vars.0.join(" "));
    for g in &pres.generators {
        let _ = writeln!(out, "generator {}", render_matrix(g));
    }
    for (name, p) in pres.theta_names.iter().zip(&pres.theta) {
        let _ = writeln!(out, "theta {name} = {}", render_polynomial(p, &pres.vars));
    }
    for (name, p) in pres.eta_names.iter().zip(&pres.eta) {
        let _ = writeln!(out, "eta {name} = {}", render_polynomial(p, &pres.vars));
    }
    let symbols = pres.symbol_names();
    for s in &pres.syzygies {
        let _ = writeln!(out, "syzygy {}", render_polynomial(s, &symbols));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::VarNames;

    fn pres(name: &str) -> InvariantPresentation {
        presentation(&CatalogSpec::parse(name).unwrap()).unwrap()
    }

    fn theta_poly(p: &InvariantPresentation, text: &str) -> Polynomial {
        parse_polynomial(text, &p.theta_names()).unwrap()
    }

    #[test]
    fn d4_instance_rewrites() {
        let p = pres("dihedral:4");
        let f = parse_polynomial(
            "x^6+y^6-x^4*y^2-x^2*y^4-x^4-y^4-x^2-y^2+3*x^2*y^2+1",
            &VarNames::default_for(2),
        )
        .unwrap();
        let ft = rewrite_in_invariants(&f, &p).unwrap();
        let expect = theta_poly(&p, "theta1^3 - theta1^2 - 4*theta1*theta2 - theta1 + 5*theta2 + 1");
        assert_eq!(ft.part(0), &expect);
        assert_eq!(weighted_degree(&ft, &p), 6);
        assert_eq!(expand_invariants(&ft, &p).unwrap(), f);
    }

    #[test]
    fn s3_quartic_rewrites() {
        let p = pres("symmetric:3");
        let f = parse_polynomial("x^4+y^4+z^4-4*x*y*z+x+y+z", &VarNames::default_for(3)).unwrap();
        let ft = rewrite_in_invariants(&f, &p).unwrap();
        let expect = theta_poly(&p, "e1^4 - 4*e1^2*e2 + 2*e2^2 + 4*e1*e3 - 4*e3 + e1");
        assert_eq!(ft.part(0), &expect);
        assert_eq!(weighted_degree(&ft, &p), 4);
        let x = parse_polynomial("x", &VarNames::default_for(3)).unwrap();
        assert!(matches!(rewrite_in_invariants(&x, &p), Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn c4_syzygy_and_secondary() {
        let p = pres("cyclic:4");
        assert_eq!(p.syzygies().len(), 1);
        let lhs = parse_invariant("eta2*eta2", &p);
        assert!(lhs.is_err());
        // η₂² rewrites into θ alone.
        let eta2_sq = &p.eta()[1] * &p.eta()[1];
        let ft = rewrite_in_invariants(&eta2_sq, &p).unwrap();
        assert_eq!(ft.part(0), &theta_poly(&p, "theta1^2*theta2 - 4*theta2^2"));
        assert!(ft.part(1).is_zero());
        let mixed = parse_invariant("theta1*eta2 + 3", &p).unwrap();
        let back = rewrite_in_invariants(&expand_invariants(&mixed, &p).unwrap(), &p).unwrap();
        assert_eq!(back, mixed);
        assert_eq!(render_invariant(&mixed, &p), "3 + (theta1)*eta2");
        assert_eq!(weighted_degree(&mixed, &p), 6);
    }

    #[test]
    fn constants_and_file_round_trip() {
        let p = pres("cyclic:4");
        let one = InvariantPoly::from_theta(&p, Polynomial::one(2)).unwrap();
        assert_eq!(expand_invariants(&one, &p).unwrap(), Polynomial::one(2));
        assert_eq!(weighted_degree(&one, &p), 0);
        let text = render_presentation(&p);
        assert_eq!(parse_presentation(&text).unwrap(), p);
    }

    #[test]
    fn bad_presentations_rejected() {
        let text = "vars x y\ngenerator 0 -1 ; 1 0\ntheta t = x^2\neta one = 1\n";
        assert!(matches!(
            parse_presentation(text),
            Err(Error::NotInvariant { generator: 0 })
        ));
        let text = "vars x y\ngenerator 0 -1 ; 1 0\ntheta t = x^2+y^2\ntheta u = x^2*y^2\neta one = 1\nsyzygy t - u\n";
        assert!(matches!(parse_presentation(text), Err(Error::Rewrite(_))));
    }

    #[test]
    fn weighted_exponent_counts() {
        assert_eq!(weighted_exponents(&[1, 2, 3], 4).len(), 4);
        assert_eq!(weighted_exponents(&[1, 2, 3, 4], 20).len(), 108);
        assert_eq!(weighted_exponents_upto(&[1, 2, 3], 2).len(), 4);
    }
}
