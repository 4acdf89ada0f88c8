//! Bases of equivariant polynomial maps as modules over the primary invariants, the
//! matrices `Π` of pairwise inner products, and per-row monomial envelopes.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::grouprep::{CatalogSpec, GroupAction, IrrepCatalog, IrrepKind, RealIrrep};
use crate::invariantring::{
    expand_invariants, rewrite_in_invariants, weighted_degree, weighted_exponents, weighted_exponents_upto,
    InvariantPoly, InvariantPresentation, ThetaPowers,
};
use crate::linalg::Mat;
use crate::molien::{molien_series, RationalFunction, UniPoly};
use crate::polyring::{
    monomials_of_degree, parse_polynomial, render_polynomial, substitute_linear, Monomial, Polynomial, VarNames,
};
use crate::rational::{q, Q};
use crate::textformat::{format_error, parse_rationals, parse_usize, records, render_rationals};

/// Generators `q₁…q_r` of the equivariants of one irrep, with `b_k = Γ^{1/2} q_k`
/// satisfying `b(ϑ(g)x) = ϑᵢ(g) b(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantBasis {
    irrep: usize,
    label: String,
    kind: IrrepKind,
    /// Positive multiple of the irrep's `Γ`, fixing the normalization of `Π`.
    gamma: Vec<Q>,
    vectors: Vec<Vec<Polynomial>>,
}

impl EquivariantBasis {
    /// Verify shapes, homogeneity, `gamma ∝ Γ`, and `q(g x) = σ(g) q(x)` on generators.
    pub fn new(catalog: &IrrepCatalog, irrep: usize, gamma: Vec<Q>, vectors: Vec<Vec<Polynomial>>) -> Result<Self> {
        let rep = catalog
            .irreps
            .get(irrep)
            .ok_or_else(|| Error::Equivariance(format!("no irrep with index {irrep}")))?;
        let dim = rep.dim();
        if gamma.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: gamma.len(),
            });
        }
        let ratio = &gamma[0] / &rep.gamma[0];
        if !ratio.is_positive() || gamma.iter().zip(&rep.gamma).any(|(a, b)| *a != &ratio * b) {
            return Err(Error::Equivariance(format!(
                "weights for {} are not a positive multiple of the irrep weights",
                rep.label
            )));
        }
        let n = catalog.action.n();
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().all(Polynomial::is_zero) {
                return Err(Error::Equivariance("zero basis vector".into()));
            }
            if v.iter().any(|p| p.nvars() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.iter().map(Polynomial::nvars).find(|&k| k != n).unwrap_or(n),
                });
            }
            let d = vector_degree(v);
            if v.iter()
                .any(|p| !p.is_zero() && (!p.is_homogeneous() || p.degree_or_zero() != d))
            {
                return Err(Error::Equivariance("basis vectors must be homogeneous".into()));
            }
        }
        let basis = EquivariantBasis {
            irrep,
            label: rep.label.clone(),
            kind: rep.kind,
            gamma,
            vectors,
        };
        check_equivariance(&basis, rep, &catalog.action)?;
        Ok(basis)
    }

    /// Basis for an irrep outside the catalogs. Each generator must act on every
    /// vector by one common matrix `S` with `Sᵀ Γ S = Γ`, which makes `Π` invariant.
    /// Irreducibility is not checked; `label` and `irrep` are taken as given.
    pub fn from_action(
        irrep: usize,
        label: &str,
        gamma: Vec<Q>,
        vectors: Vec<Vec<Polynomial>>,
        generators: &[Mat<Q>],
    ) -> Result<Self> {
        let dim = gamma.len();
        if dim == 0 || gamma.iter().any(|g| !g.is_positive()) {
            return Err(Error::Equivariance(format!("weights for {label} must be positive")));
        }
        let first = vectors
            .first()
            .ok_or_else(|| Error::Equivariance(format!("no basis vectors for {label}")))?;
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        let gram = Mat::from_fn(dim, dim, |i, j| if i == j { gamma[i].clone() } else { Q::zero() });
        for (gi, g) in generators.iter().enumerate() {
            let images = first
                .iter()
                .map(|p| substitute_linear(p, g))
                .collect::<Result<Vec<_>>>()?;
            let s = action_matrix(first, &images).ok_or_else(|| {
                Error::Equivariance(format!("generator {} does not preserve the span of {label}", gi + 1))
            })?;
            if s.transpose().mul(&gram).mul(&s) != gram {
                return Err(Error::Equivariance(format!(
                    "generator {} does not act orthogonally on {label}",
                    gi + 1
                )));
            }
            for (k, v) in vectors.iter().enumerate() {
                for (j, comp) in v.iter().enumerate() {
                    let mut rhs = Polynomial::zero(comp.nvars());
                    for (l, other) in v.iter().enumerate() {
                        rhs = &rhs + &other.scale(s.get(j, l));
                    }
                    if substitute_linear(comp, g)? != rhs {
                        return Err(Error::Equivariance(format!(
                            "vector {} of {label} fails under generator {}",
                            k + 1,
                            gi + 1
                        )));
                    }
                }
            }
        }
        Ok(EquivariantBasis {
            irrep,
            label: label.to_string(),
            kind: IrrepKind::AbsolutelyReal,
            gamma,
            vectors,
        })
    }

    pub fn irrep(&self) -> usize {
        self.irrep
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> IrrepKind {
        self.kind
    }

    pub fn gamma(&self) -> &[Q] {
        &self.gamma
    }

    pub fn vectors(&self) -> &[Vec<Polynomial>] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.vectors.iter().map(|v| vector_degree(v)).collect()
    }

    /// `b_kᵀ b_l = Σ_j γ_j q_kj q_lj`.
    pub fn inner_product(&self, k: usize, l: usize) -> Polynomial {
        let n = self.vectors[k][0].nvars();
        let mut out = Polynomial::zero(n);
        for ((a, b), g) in self.vectors[k].iter().zip(&self.vectors[l]).zip(&self.gamma) {
            out = &out + &(a * b).scale(g);
        }
        out
    }
}

/// `S` with `images_j = Σ_l S_jl basis_l`, when the basis components are independent.
fn action_matrix(basis: &[Polynomial], images: &[Polynomial]) -> Option<Mat<Q>> {
    let mut monos: Vec<Monomial> = basis
        .iter()
        .chain(images)
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect();
    monos.sort();
    monos.dedup();
    let a = Mat::from_fn(monos.len(), basis.len(), |r, c| basis[c].coeff(&monos[r]));
    if crate::linalg::rank(&a) != basis.len() {
        return None;
    }
    let mut s = Mat::<Q>::zeros(basis.len(), basis.len());
    for (j, img) in images.iter().enumerate() {
        let b: Vec<Q> = monos.iter().map(|m| img.coeff(m)).collect();
        let (x, _) = crate::linalg::solve(&a, &b)?;
        for (l, v) in x.into_iter().enumerate() {
            s.set(j, l, v);
        }
    }
    Some(s)
}

fn vector_degree(v: &[Polynomial]) -> u32 {
    v.iter().map(Polynomial::degree_or_zero).max().unwrap_or(0)
}

/// Generator images of an irrep, which must have rational entries.
pub fn rational_images(rep: &RealIrrep, action: &GroupAction) -> Result<Vec<Mat<Q>>> {
    rep.generator_images(action)
        .iter()
        .map(|m| rational_matrix(m, &rep.label))
        .collect()
}

fn rational_matrix(m: &Mat<crate::cyclotomic::Cyc>, label: &str) -> Result<Mat<Q>> {
    let entries: Option<Vec<Q>> = m.data().iter().map(|c| c.as_rational()).collect();
    let entries = entries.ok_or_else(|| Error::UnsupportedCatalog(format!("irrep {label} has irrational entries")))?;
    Ok(Mat::from_fn(m.rows(), m.cols(), |i, j| {
        entries[i * m.cols() + j].clone()
    }))
}

/// Exact check of `q_k(g x) = σ(g) q_k(x)` for every generator `g`.
pub fn check_equivariance(basis: &EquivariantBasis, rep: &RealIrrep, action: &GroupAction) -> Result<()> {
    let images = rational_images(rep, action)?;
    for (gi, (g, sigma)) in action.generators().iter().zip(&images).enumerate() {
        for (k, v) in basis.vectors.iter().enumerate() {
            for (j, comp) in v.iter().enumerate() {
                let lhs = substitute_linear(comp, g)?;
                let mut rhs = Polynomial::zero(comp.nvars());
                for (l, other) in v.iter().enumerate() {
                    if !sigma.get(j, l).is_zero() {
                        rhs = &rhs + &other.scale(sigma.get(j, l));
                    }
                }
                if lhs != rhs {
                    return Err(Error::Equivariance(format!(
                        "vector {} of {} fails under generator {}",
                        k + 1,
                        basis.label,
                        gi + 1
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Degrees of a free basis of the equivariants over `ℝ[θ]`, read off from
/// `ψᵢ(t)·Π(1 − t^{deg θ})`. Errors when that is not a polynomial with
/// non-negative integer coefficients.
pub fn module_degrees(catalog: &IrrepCatalog, pres: &InvariantPresentation, irrep: usize) -> Result<Vec<u32>> {
    let rep = &catalog.irreps[irrep];
    let series = molien_series(&catalog.action, rep)?;
    let mut factor = UniPoly::one();
    for d in pres.theta_degrees() {
        factor = factor.mul(&UniPoly::one().sub(&UniPoly::monomial(q(1), d as usize)));
    }
    let product = series.mul(&RationalFunction::polynomial(factor));
    if product.denominator().degree() != Some(0) {
        return Err(Error::Equivariance(format!(
            "equivariants of {} do not form a free module over the primary invariants",
            rep.label
        )));
    }
    let den = product.denominator().coeff(0);
    let mut out = Vec::new();
    for (d, c) in product.numerator().coeffs().iter().enumerate() {
        let c = c / &den;
        if c.is_negative() || !c.is_integer() {
            return Err(Error::Equivariance(format!(
                "equivariants of {} do not form a free module over the primary invariants",
                rep.label
            )));
        }
        let count: usize = c.to_integer().try_into().unwrap_or(usize::MAX);
        out.extend(std::iter::repeat_n(d as u32, count));
    }
    Ok(out)
}

/// Echelon form over sparse rows, used for incremental independence tests.
struct Echelon {
    rows: BTreeMap<usize, BTreeMap<usize, Q>>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: BTreeMap::new() }
    }

    /// Insert `v`; returns whether it was independent of the rows so far.
    fn insert(&mut self, mut v: BTreeMap<usize, Q>) -> bool {
        v.retain(|_, c| !c.is_zero());
        while let Some((&k, c)) = v.iter().next() {
            let Some(row) = self.rows.get(&k) else {
                let c = c.clone();
                for x in v.values_mut() {
                    *x /= &c;
                }
                self.rows.insert(k, v);
                return true;
            };
            let c = c.clone();
            for (j, r) in row {
                let entry = v.entry(*j).or_insert_with(Q::zero);
                *entry -= &c * r;
                if entry.is_zero() {
                    v.remove(j);
                }
            }
        }
        false
    }
}

struct KeyIndex(HashMap<(usize, Monomial), usize>);

impl KeyIndex {
    fn flatten(&mut self, v: &[Polynomial]) -> BTreeMap<usize, Q> {
        let mut out = BTreeMap::new();
        for (j, p) in v.iter().enumerate() {
            for (m, c) in p.terms() {
                let next = self.0.len();
                let k = *self.0.entry((j, m.clone())).or_insert(next);
                out.insert(k, c.clone());
            }
        }
        out
    }
}

/// Scale to integer coefficients with content 1 and a positive leading coefficient
/// in the first nonzero component.
fn make_primitive(v: Vec<Polynomial>) -> Vec<Polynomial> {
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for p in &v {
        for (_, c) in p.terms() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
    }
    if num.is_zero() {
        return v;
    }
    let lead_negative = v
        .iter()
        .find(|p| !p.is_zero())
        .and_then(|p| p.terms().next_back().map(|(_, c)| c.is_negative()))
        .unwrap_or(false);
    let mut factor = Q::new(den, num);
    if lead_negative {
        factor = -factor;
    }
    v.iter().map(|p| p.scale(&factor)).collect()
}

/// Free basis of the equivariants of `irrep` over `ℝ[θ]` built by projecting monomials
/// degree by degree; `max_degree` truncates the basis. For the trivial irrep the basis
/// is the secondary invariants.
pub fn equivariant_basis(
    catalog: &IrrepCatalog,
    pres: &InvariantPresentation,
    irrep: usize,
    max_degree: Option<u32>,
) -> Result<EquivariantBasis> {
    let rep = &catalog.irreps[irrep];
    let keep = |d: u32| max_degree.is_none_or(|m| d <= m);
    if irrep == 0 {
        let vectors = pres
            .eta()
            .iter()
            .filter(|e| keep(e.degree_or_zero()))
            .map(|e| vec![e.clone()])
            .collect();
        return EquivariantBasis::new(catalog, 0, rep.gamma.clone(), vectors);
    }
    let degrees: Vec<u32> = module_degrees(catalog, pres, irrep)?
        .into_iter()
        .filter(|&d| keep(d))
        .collect();
    let action = &catalog.action;
    let dim = rep.dim();
    // Column 0 of σ(g⁻¹) for every element g.
    let weights: Vec<Vec<Q>> = (0..action.order())
        .map(|g| {
            let m = rational_matrix(&rep.matrices[action.inverse(g)], &rep.label)?;
            Ok((0..dim).map(|j| m.get(j, 0).clone()).collect())
        })
        .collect::<Result<_>>()?;
    let n = action.n();
    let project = |m: &Monomial| -> Result<Vec<Polynomial>> {
        let p = Polynomial::term(q(1), m.clone());
        let mut out = vec![Polynomial::zero(n); dim];
        for (g, w) in weights.iter().enumerate() {
            let image = substitute_linear(&p, action.element(g))?;
            for (slot, c) in out.iter_mut().zip(w) {
                if !c.is_zero() {
                    *slot = &*slot + &image.scale(c);
                }
            }
        }
        Ok(out)
    };
    let wt = pres.theta_degrees();
    let mut powers = ThetaPowers::new(pres.theta());
    let mut vectors: Vec<Vec<Polynomial>> = Vec::new();
    let mut d_prev = None;
    for &d in &degrees {
        if d_prev == Some(d) {
            continue;
        }
        d_prev = Some(d);
        let need = degrees.iter().filter(|&&e| e == d).count();
        let mut keys = KeyIndex(HashMap::new());
        let mut ech = Echelon::new();
        for v in &vectors {
            let e = vector_degree(v);
            for alpha in weighted_exponents(&wt, d - e) {
                let t = powers.get(&alpha);
                let shifted: Vec<Polynomial> = v.iter().map(|p| p * &t).collect();
                ech.insert(keys.flatten(&shifted));
            }
        }
        let mut found = 0;
        for m in monomials_of_degree(n, d) {
            if found == need {
                break;
            }
            let cand = project(&m)?;
            if cand.iter().all(Polynomial::is_zero) {
                continue;
            }
            if ech.insert(keys.flatten(&cand)) {
                vectors.push(make_primitive(cand));
                found += 1;
            }
        }
        if found < need {
            return Err(Error::Equivariance(format!(
                "found {found} of {need} degree-{d} generators for {}",
                rep.label
            )));
        }
    }
    EquivariantBasis::new(catalog, irrep, rep.gamma.clone(), vectors)
}

/// Bases for every irrep of a catalog group: written-out data for the groups with
/// worked examples, projection otherwise. Each basis is checked against the module
/// degrees predicted by the Molien series.
pub fn catalog_equivariants(
    spec: &CatalogSpec,
    catalog: &IrrepCatalog,
    pres: &InvariantPresentation,
    max_degree: Option<u32>,
) -> Result<Vec<EquivariantBasis>> {
    let mut out = Vec::with_capacity(catalog.irreps.len());
    for i in 0..catalog.irreps.len() {
        let basis = match written_basis(spec, catalog, i)? {
            Some((gamma, vectors)) => {
                let b = EquivariantBasis::new(catalog, i, gamma, vectors)?;
                let mut expect = module_degrees(catalog, pres, i)?;
                let mut got = b.degrees();
                expect.sort_unstable();
                got.sort_unstable();
                if expect != got {
                    return Err(Error::Equivariance(format!(
                        "catalog basis for {} has degrees {got:?}, expected {expect:?}",
                        b.label
                    )));
                }
                truncate_basis(b, max_degree)
            }
            None => equivariant_basis(catalog, pres, i, max_degree)?,
        };
        out.push(basis);
    }
    Ok(out)
}

fn truncate_basis(mut b: EquivariantBasis, max_degree: Option<u32>) -> EquivariantBasis {
    if let Some(m) = max_degree {
        b.vectors.retain(|v| vector_degree(v) <= m);
    }
    b
}

type WrittenBasis = Option<(Vec<Q>, Vec<Vec<Polynomial>>)>;

fn written_basis(spec: &CatalogSpec, catalog: &IrrepCatalog, irrep: usize) -> Result<WrittenBasis> {
    let n = spec.nvars();
    let vars = VarNames::default_for(n);
    let vecs = |rows: &[&[&str]]| -> Result<Vec<Vec<Polynomial>>> {
        rows.iter()
            .map(|r| r.iter().map(|t| parse_polynomial(t, &vars)).collect())
            .collect()
    };
    let label = catalog.irreps[irrep].label.as_str();
    let data = match (spec, label) {
        (CatalogSpec::Symmetric(3), "sign") => Some((vec![q(1)], vecs(&[&["(x-y)*(x-z)*(y-z)"]])?)),
        (CatalogSpec::Symmetric(3), "[2,1]") => Some((
            vec![crate::rational::qr(1, 2), crate::rational::qr(3, 2)],
            vecs(&[&["2*x-y-z", "y-z"], &["2*y*z-z*x-x*y", "z*x-x*y"]])?,
        )),
        (CatalogSpec::Dihedral { m: 4, planar: true }, "reflection-sign") => {
            Some((vec![q(1)], vecs(&[&["x*y*(x^2-y^2)"]])?))
        }
        (CatalogSpec::Dihedral { m: 4, planar: true }, "rotation-sign") => Some((vec![q(1)], vecs(&[&["x*y"]])?)),
        (CatalogSpec::Dihedral { m: 4, planar: true }, "both-sign") => Some((vec![q(1)], vecs(&[&["x^2-y^2"]])?)),
        (CatalogSpec::Dihedral { m: 4, planar: true }, "planar1") => {
            Some((vec![q(1), q(1)], vecs(&[&["x", "y"], &["x^3", "y^3"]])?))
        }
        (CatalogSpec::Cyclic { m: 4, planar: true }, "alternating") => {
            Some((vec![q(1)], vecs(&[&["x*y"], &["x^2-y^2"]])?))
        }
        // The pairings with the quarter-turn images come after the plain ones.
        (CatalogSpec::Cyclic { m: 4, planar: true }, "rotation1") => Some((
            vec![q(1), q(1)],
            vecs(&[&["x", "y"], &["x^3", "y^3"], &["-y", "x"], &["-y^3", "x^3"]])?,
        )),
        _ => None,
    };
    Ok(data)
}

/// Symmetric matrix of invariant polynomials `π_kl = b_kᵀ b_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiMatrix {
    irrep: usize,
    label: String,
    entries: Vec<Vec<InvariantPoly>>,
    diagonal_degrees: Vec<u32>,
}

impl PiMatrix {
    pub fn irrep(&self) -> usize {
        self.irrep
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, k: usize, l: usize) -> &InvariantPoly {
        &self.entries[k][l]
    }

    pub fn entries(&self) -> &[Vec<InvariantPoly>] {
        &self.entries
    }

    /// Weighted degree of each diagonal entry.
    pub fn diagonal_degrees(&self) -> &[u32] {
        &self.diagonal_degrees
    }

    /// Build from already rewritten entries, checking symmetry.
    pub fn from_entries(
        irrep: usize,
        label: &str,
        entries: Vec<Vec<InvariantPoly>>,
        pres: &InvariantPresentation,
    ) -> Result<Self> {
        let r = entries.len();
        for (k, row) in entries.iter().enumerate() {
            if row.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    got: row.len(),
                });
            }
            for l in 0..k {
                if row[l] != entries[l][k] {
                    return Err(Error::Equivariance(format!("Π for {label} is not symmetric")));
                }
            }
        }
        let diagonal_degrees = (0..r).map(|k| weighted_degree(&entries[k][k], pres)).collect();
        Ok(PiMatrix {
            irrep,
            label: label.to_string(),
            entries,
            diagonal_degrees,
        })
    }

    /// Numeric value at a point `x`.
    pub fn evaluate_f64(&self, pres: &InvariantPresentation, x: &[f64]) -> DMatrix<f64> {
        let theta: Vec<f64> = pres.theta().iter().map(|t| t.evaluate_f64(x)).collect();
        let eta: Vec<f64> = pres.eta().iter().map(|e| e.evaluate_f64(x)).collect();
        let r = self.size();
        DMatrix::from_fn(r, r, |k, l| {
            self.entries[k][l]
                .parts()
                .iter()
                .zip(&eta)
                .map(|(p, e)| e * p.evaluate_f64(&theta))
                .sum()
        })
    }
}

/// `Π` for a basis, each entry rewritten in the presentation.
#[allow(clippy::needless_range_loop)]
pub fn pi_matrix(basis: &EquivariantBasis, pres: &InvariantPresentation) -> Result<PiMatrix> {
    let r = basis.rank();
    let mut entries = vec![vec![InvariantPoly::zero(pres); r]; r];
    for k in 0..r {
        for l in k..r {
            let e = rewrite_in_invariants(&basis.inner_product(k, l), pres)?;
            entries[l][k] = e.clone();
            entries[k][l] = e;
        }
    }
    PiMatrix::from_entries(basis.irrep, &basis.label, entries, pres)
}

/// `Σ_j γ_j (b_k)_j (b_l)_j` against the expansion of each `π_kl`.
pub fn check_pi_consistency(basis: &EquivariantBasis, pi: &PiMatrix, pres: &InvariantPresentation) -> Result<()> {
    for k in 0..basis.rank() {
        for l in 0..basis.rank() {
            if expand_invariants(pi.entry(k, l), pres)? != basis.inner_product(k, l) {
                return Err(Error::Equivariance(format!(
                    "Π entry ({}, {}) of {} does not expand to b_kᵀb_l",
                    k + 1,
                    l + 1,
                    pi.label
                )));
            }
        }
    }
    Ok(())
}

/// θ-exponent vectors per row of `Π` for a target weighted degree.
///
/// Row `k` receives every θ-monomial with `2·wdeg + deg π_kk ≤ target`; with
/// `homogeneous` only those with equality, which suffices for forms.
pub fn monomial_envelope(
    pres: &InvariantPresentation,
    pi: &PiMatrix,
    target: u32,
    homogeneous: bool,
) -> Vec<Vec<Vec<u32>>> {
    let wt = pres.theta_degrees();
    pi.diagonal_degrees
        .iter()
        .map(|&dk| {
            if dk > target {
                return Vec::new();
            }
            let slack = target - dk;
            if homogeneous {
                if slack % 2 == 1 {
                    Vec::new()
                } else {
                    weighted_exponents(&wt, slack / 2).into_iter().rev().collect()
                }
            } else {
                weighted_exponents_upto(&wt, slack / 2)
            }
        })
        .collect()
}

/// Text form: `vars`, then per irrep `irrep <index>`, `gamma <rationals>` and one
/// `vector p1 ; p2 ; …` record per basis element.
pub fn parse_equivariant_file(text: &str, catalog: &IrrepCatalog) -> Result<Vec<EquivariantBasis>> {
    let mut vars: Option<VarNames> = None;
    let mut pending: Vec<(usize, Vec<Q>, Vec<Vec<Polynomial>>)> = Vec::new();
    for rec in records(text) {
        match rec.key {
            "vars" => {
                let names: Vec<&str> = rec.rest.split_whitespace().collect();
                vars = Some(VarNames::new(&names));
            }
            "irrep" => {
                let idx = parse_usize(rec.rest.split_whitespace().next().unwrap_or(""), rec.line)?;
                if idx == 0 || idx > catalog.irreps.len() {
                    return Err(format_error(rec.line, format!("irrep index {idx} out of range")));
                }
                pending.push((idx - 1, Vec::new(), Vec::new()));
            }
            "gamma" => {
                let cur = pending
                    .last_mut()
                    .ok_or_else(|| format_error(rec.line, "`gamma` before `irrep`"))?;
                cur.1 = parse_rationals(rec.rest, rec.line)?;
            }
            "vector" => {
                let v = vars
                    .as_ref()
                    .ok_or_else(|| format_error(rec.line, "`vars` must come first"))?;
                let cur = pending
                    .last_mut()
                    .ok_or_else(|| format_error(rec.line, "`vector` before `irrep`"))?;
                let comps = rec
                    .rest
                    .split(';')
                    .map(|t| parse_polynomial(t, v).map_err(|e| format_error(rec.line, e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                cur.2.push(comps);
            }
            other => return Err(format_error(rec.line, format!("unknown record `{other}`"))),
        }
    }
    pending
        .into_iter()
        .map(|(i, gamma, vectors)| {
            let gamma = if gamma.is_empty() {
                catalog.irreps[i].gamma.clone()
            } else {
                gamma
            };
            EquivariantBasis::new(catalog, i, gamma, vectors)
        })
        .collect()
}

pub fn render_equivariant_file(bases: &[EquivariantBasis], vars: &VarNames) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vars {}", vars.0.join(" "));
    for b in bases {
        let _ = writeln!(out, "irrep {} {}", b.irrep + 1, b.label);
        let _ = writeln!(out, "gamma {}", render_rationals(&b.gamma));
        for v in &b.vectors {
            let comps: Vec<String> = v.iter().map(|p| render_polynomial(p, vars)).collect();
            let _ = writeln!(out, "vector {}", comps.join(" ; "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouprep::catalog;
    use crate::invariantring::presentation;

    fn setup(name: &str) -> (CatalogSpec, IrrepCatalog, InvariantPresentation) {
        let spec = CatalogSpec::parse(name).unwrap();
        let cat = catalog(&spec).unwrap();
        let pres = presentation(&spec).unwrap();
        (spec, cat, pres)
    }

    fn theta(pres: &InvariantPresentation, text: &str) -> InvariantPoly {
        crate::invariantring::parse_invariant(text, pres).unwrap()
    }

    #[test]
    fn d4_bases_and_pi() {
        let (spec, cat, pres) = setup("dihedral:4");
        let bases = catalog_equivariants(&spec, &cat, &pres, None).unwrap();
        let ranks: Vec<usize> = bases.iter().map(EquivariantBasis::rank).collect();
        assert_eq!(ranks, vec![1, 1, 1, 1, 2]);
        let pis: Vec<PiMatrix> = bases.iter().map(|b| pi_matrix(b, &pres).unwrap()).collect();
        assert_eq!(pis[0].entry(0, 0), &theta(&pres, "1"));
        assert_eq!(pis[1].entry(0, 0), &theta(&pres, "theta2*theta1^2 - 4*theta2^2"));
        assert_eq!(pis[2].entry(0, 0), &theta(&pres, "theta2"));
        assert_eq!(pis[3].entry(0, 0), &theta(&pres, "theta1^2 - 4*theta2"));
        assert_eq!(pis[4].entry(0, 0), &theta(&pres, "theta1"));
        assert_eq!(pis[4].entry(0, 1), &theta(&pres, "theta1^2 - 2*theta2"));
        assert_eq!(pis[4].entry(1, 1), &theta(&pres, "theta1^3 - 3*theta1*theta2"));
        for (b, p) in bases.iter().zip(&pis) {
            check_pi_consistency(b, p, &pres).unwrap();
        }
    }

    #[test]
    fn c4_pi_matrices() {
        let (spec, cat, pres) = setup("cyclic:4");
        let bases = catalog_equivariants(&spec, &cat, &pres, None).unwrap();
        let pis: Vec<PiMatrix> = bases.iter().map(|b| pi_matrix(b, &pres).unwrap()).collect();
        assert_eq!(pis[0].entry(0, 1), &theta(&pres, "eta2"));
        assert_eq!(pis[0].entry(1, 1), &theta(&pres, "theta1^2*theta2 - 4*theta2^2"));
        assert_eq!(pis[1].entry(0, 0), &theta(&pres, "theta2"));
        assert_eq!(pis[1].entry(0, 1), &theta(&pres, "eta2"));
        assert_eq!(pis[1].entry(1, 1), &theta(&pres, "theta1^2 - 4*theta2"));
        assert_eq!(pis[2].size(), 4);
        assert_eq!(pis[2].entry(0, 1), &theta(&pres, "theta1^2 - 2*theta2"));
        assert_eq!(pis[2].entry(0, 3), &theta(&pres, "eta2"));
        // det Π₁ vanishes identically through the syzygy.
        let p0 = &pis[0];
        let det = &p0.entry(0, 0).parts()[0] * &p0.entry(1, 1).parts()[0];
        let det = InvariantPoly::from_theta(&pres, det).unwrap();
        let lhs = expand_invariants(&det, &pres).unwrap();
        let off = expand_invariants(p0.entry(0, 1), &pres).unwrap();
        assert!((&lhs - &(&off * &off)).is_zero());
    }

    #[test]
    fn s3_catalog_matches_worked_example() {
        let (spec, cat, pres) = setup("symmetric:3");
        let bases = catalog_equivariants(&spec, &cat, &pres, None).unwrap();
        let pis: Vec<PiMatrix> = bases.iter().map(|b| pi_matrix(b, &pres).unwrap()).collect();
        assert_eq!(
            pis[1].entry(0, 0),
            &theta(&pres, "e1^2*e2^2 - 4*e2^3 - 4*e1^3*e3 + 18*e1*e2*e3 - 27*e3^2")
        );
        assert_eq!(pis[2].entry(0, 0), &theta(&pres, "2*e1^2 - 6*e2"));
        assert_eq!(pis[2].entry(0, 1), &theta(&pres, "-e1*e2 + 9*e3"));
        assert_eq!(pis[2].entry(1, 1), &theta(&pres, "2*e2^2 - 6*e1*e3"));
        let env: Vec<Vec<Vec<Vec<u32>>>> = pis.iter().map(|p| monomial_envelope(&pres, p, 4, false)).collect();
        assert_eq!(
            env[0][0],
            vec![vec![0, 0, 0], vec![1, 0, 0], vec![2, 0, 0], vec![0, 1, 0]]
        );
        assert!(env[1][0].is_empty());
        assert_eq!(env[2][0].len(), 2);
        assert_eq!(env[2][1].len(), 1);
    }

    #[test]
    fn projection_reproduces_written_data() {
        for name in ["symmetric:3", "dihedral:4", "cyclic:4"] {
            let (_, cat, pres) = setup(name);
            for i in 0..cat.irreps.len() {
                let b = equivariant_basis(&cat, &pres, i, None).unwrap();
                assert_eq!(b.degrees(), module_degrees(&cat, &pres, i).unwrap());
            }
        }
        let (_, cat, pres) = setup("symmetric:4");
        let degs: Vec<Vec<u32>> = (0..5).map(|i| module_degrees(&cat, &pres, i).unwrap()).collect();
        assert_eq!(degs[0], vec![0]);
        assert_eq!(degs[1], vec![1, 2, 3]);
        assert_eq!(degs[2], vec![2, 4]);
        assert_eq!(degs[3], vec![3, 4, 5]);
        assert_eq!(degs[4], vec![6]);
        let b = equivariant_basis(&cat, &pres, 2, None).unwrap();
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn c2n_generators_are_monomials() {
        let (spec, cat, pres) = setup("c2n:3");
        let bases = catalog_equivariants(&spec, &cat, &pres, None).unwrap();
        for b in &bases {
            assert_eq!(b.rank(), 1);
            assert_eq!(b.vectors()[0][0].len(), 1);
        }
    }

    #[test]
    fn file_round_trip_and_rejection() {
        let (spec, cat, pres) = setup("dihedral:4");
        let bases = catalog_equivariants(&spec, &cat, &pres, None).unwrap();
        let vars = VarNames::default_for(2);
        let text = render_equivariant_file(&bases, &vars);
        assert_eq!(parse_equivariant_file(&text, &cat).unwrap(), bases);
        let bad = "vars x y\nirrep 5\nvector y ; x\n";
        assert!(matches!(parse_equivariant_file(bad, &cat), Err(Error::Equivariance(_))));
    }
}
