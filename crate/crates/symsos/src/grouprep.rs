//! Finite groups of orthogonal rational matrices and their real irreducible
//! representations.
//!
//! Irreducible representations are stored in a rational-friendly form: each element
//! maps to a matrix `σ(g)` with cyclotomic entries together with positive rational
//! weights `γ`, and the orthogonal matrix is `ϑ(g) = Γ^{1/2} σ(g) Γ^{-1/2}`. Young's
//! seminormal form for the symmetric groups fits this shape with rational `σ`, and
//! rotation blocks of cyclic and dihedral groups use `γ = 1`.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use crate::cyclotomic::Cyc;
use crate::error::{Error, Result};
use crate::linalg::{Mat, Ring};
use crate::rational::{q, to_f64, Q};

pub const DEFAULT_MAX_ORDER: usize = 10080;
/// Largest `n` with a full `S_n` irrep catalog.
pub const MAX_SYMMETRIC_CATALOG: usize = 5;
/// Largest `n` for which `symmetric:n` is accepted at all (generators and invariants
/// only, beyond the catalog bound).
pub const MAX_SYMMETRIC_PRESENTATION: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ElementKey {
    /// `M e_j = sign_j e_{perm_j}` packed as `±(perm_j + 1)`.
    Signed(Vec<i32>),
    Dense(Vec<Q>),
}

fn element_key(m: &Mat<Q>) -> ElementKey {
    let n = m.rows();
    let mut packed = Vec::with_capacity(n);
    for j in 0..n {
        let mut hit = None;
        for i in 0..n {
            let v = m.get(i, j);
            if v.is_zero() {
                continue;
            }
            if hit.is_some() || !(v.abs().is_one()) {
                return ElementKey::Dense(m.data().to_vec());
            }
            hit = Some(if v.is_positive() { i as i32 + 1 } else { -(i as i32 + 1) });
        }
        match hit {
            Some(h) => packed.push(h),
            None => return ElementKey::Dense(m.data().to_vec()),
        }
    }
    ElementKey::Signed(packed)
}

fn compose_keys(a: &ElementKey, b: &ElementKey) -> Option<ElementKey> {
    match (a, b) {
        (ElementKey::Signed(pa), ElementKey::Signed(pb)) => Some(ElementKey::Signed(
            pb.iter()
                .map(|&s| {
                    let inner = pa[(s.unsigned_abs() - 1) as usize];
                    if s < 0 {
                        -inner
                    } else {
                        inner
                    }
                })
                .collect(),
        )),
        _ => None,
    }
}

/// A finite group acting orthogonally on `ℝⁿ`, with its multiplication table.
#[derive(Clone, Debug)]
pub struct GroupAction {
    n: usize,
    elements: Vec<Mat<Q>>,
    mult: Vec<usize>,
    inverse: Vec<usize>,
    generators: Vec<Mat<Q>>,
    generator_index: Vec<usize>,
    /// `parent[g] = (h, s)` with `g = h · generators[s]`, empty for the identity.
    parent: Vec<Option<(usize, usize)>>,
}

impl GroupAction {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, g: usize) -> &Mat<Q> {
        &self.elements[g]
    }

    pub fn elements(&self) -> &[Mat<Q>] {
        &self.elements
    }

    /// Index of `g·h`.
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult[g * self.order() + h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn generators(&self) -> &[Mat<Q>] {
        &self.generators
    }

    /// Element index of each generator.
    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_index
    }

    pub fn parent(&self, g: usize) -> Option<(usize, usize)> {
        self.parent[g]
    }

    /// Extend generator images to every element along the closure tree.
    pub fn extend_images<T: Ring>(&self, images: &[Mat<T>]) -> Vec<Mat<T>> {
        assert_eq!(images.len(), self.generators.len());
        let dim = images.first().map_or(1, Mat::rows);
        let mut out: Vec<Option<Mat<T>>> = vec![None; self.order()];
        out[0] = Some(Mat::identity(dim));
        // Elements are stored in breadth-first order, so parents come first.
        for g in 1..self.order() {
            let (h, s) = self.parent[g].expect("non-identity element has a parent");
            let base = out[h].as_ref().expect("parent visited first");
            out[g] = Some(base.mul(&images[s]));
        }
        out.into_iter().map(|m| m.expect("filled")).collect()
    }
}

/// Breadth-first closure of orthogonal rational generators.
pub fn close_group(generators: &[Mat<Q>], max_order: usize) -> Result<GroupAction> {
    let n = generators.first().map_or(0, Mat::rows);
    for (i, g) in generators.iter().enumerate() {
        if g.rows() != n || !g.is_orthogonal() {
            return Err(Error::NonOrthogonalGenerator { index: i });
        }
    }
    let identity = Mat::<Q>::identity(n);
    let mut elements = vec![identity.clone()];
    let mut keys = vec![element_key(&identity)];
    let mut lookup: HashMap<ElementKey, usize> = HashMap::new();
    lookup.insert(keys[0].clone(), 0);
    let mut parent = vec![None];
    let gen_keys: Vec<ElementKey> = generators.iter().map(element_key).collect();
    let mut queue = VecDeque::from([0usize]);
    while let Some(g) = queue.pop_front() {
        for (s, gen) in generators.iter().enumerate() {
            let key = compose_keys(&keys[g], &gen_keys[s]);
            let (key, mat) = match key {
                Some(k) => (k, None),
                None => {
                    let m = elements[g].mul(gen);
                    (element_key(&m), Some(m))
                }
            };
            if lookup.contains_key(&key) {
                continue;
            }
            if elements.len() >= max_order {
                return Err(Error::OrderExceeded { max_order });
            }
            let m = mat.unwrap_or_else(|| elements[g].mul(gen));
            let idx = elements.len();
            lookup.insert(key.clone(), idx);
            keys.push(key);
            elements.push(m);
            parent.push(Some((g, s)));
            queue.push_back(idx);
        }
    }
    let order = elements.len();
    let mut mult = vec![0usize; order * order];
    for a in 0..order {
        for b in 0..order {
            let key = match compose_keys(&keys[a], &keys[b]) {
                Some(k) => k,
                None => element_key(&elements[a].mul(&elements[b])),
            };
            mult[a * order + b] = lookup[&key];
        }
    }
    let inverse = (0..order)
        .map(|a| {
            (0..order)
                .find(|&b| mult[a * order + b] == 0)
                .expect("finite group element has an inverse")
        })
        .collect();
    let generator_index = gen_keys.iter().map(|k| lookup[k]).collect();
    Ok(GroupAction {
        n,
        elements,
        mult,
        inverse,
        generators: generators.to_vec(),
        generator_index,
        parent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrrepKind {
    AbsolutelyReal,
    /// Realification of a pair of complex conjugate irreducible representations.
    ComplexType,
}

#[derive(Clone, Debug)]
pub struct RealIrrep {
    pub label: String,
    pub kind: IrrepKind,
    /// `σ(g)` for every group element.
    pub matrices: Vec<Mat<Cyc>>,
    /// Positive weights with `ϑ(g) = Γ^{1/2} σ(g) Γ^{-1/2}` orthogonal.
    pub gamma: Vec<Q>,
}

impl RealIrrep {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn character(&self, g: usize) -> Cyc {
        self.matrices[g].trace()
    }

    /// Weight in `Σ (weight)·ψ = Hilbert series`: the complex dimension of each
    /// member of a conjugate pair counts once per member.
    pub fn hilbert_weight(&self) -> Q {
        match self.kind {
            IrrepKind::AbsolutelyReal => q(self.dim() as i64),
            IrrepKind::ComplexType => crate::rational::qr(self.dim() as i64, 2),
        }
    }

    /// Sum of squared complex dimensions contributed to `|G|`.
    pub fn complex_square_sum(&self) -> Q {
        let d = q(self.dim() as i64);
        match self.kind {
            IrrepKind::AbsolutelyReal => &d * &d,
            IrrepKind::ComplexType => &d * &d / q(2),
        }
    }

    /// Orthogonal matrix `ϑ(g)` in floating point.
    pub fn orthogonal_f64(&self, g: usize) -> DMatrix<f64> {
        let s = &self.matrices[g];
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| {
            s.get(i, j).to_f64() * (to_f64(&self.gamma[i]) / to_f64(&self.gamma[j])).sqrt()
        })
    }

    /// Images of the group generators.
    pub fn generator_images(&self, action: &GroupAction) -> Vec<Mat<Cyc>> {
        action
            .generator_indices()
            .iter()
            .map(|&g| self.matrices[g].clone())
            .collect()
    }
}

/// Diagnostics from checking a representation against a group.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RepresentationReport {
    /// Pairs `(g, h)` with `rep(g) rep(h) ≠ rep(gh)`.
    pub homomorphism_violations: Vec<(usize, usize)>,
    pub non_orthogonal: Vec<usize>,
    /// `(expected, found)` for `(1/|G|) Σ χ(g)²`.
    pub character_norm: Option<(Q, Q)>,
    pub notes: Vec<String>,
}

impl RepresentationReport {
    pub fn is_valid(&self) -> bool {
        self.homomorphism_violations.is_empty()
            && self.non_orthogonal.is_empty()
            && self.character_norm.is_none()
            && self.notes.is_empty()
    }
}

/// Check the homomorphism property, orthogonality of `Γ^{1/2}σΓ^{-1/2}`, and, when
/// `kind` is given, the character norm (1 for absolutely real, 2 for complex type).
///
/// Homomorphism is checked on pairs `(g, generator)`, which suffices because every
/// element is a product of generators.
pub fn verify_representation<T: Ring>(
    matrices: &[Mat<T>],
    gamma: Option<&[Q]>,
    action: &GroupAction,
    kind: Option<IrrepKind>,
    trace_to_cyc: impl Fn(&T) -> Cyc,
) -> RepresentationReport {
    let mut report = RepresentationReport::default();
    let order = action.order();
    if matrices.len() != order {
        report
            .notes
            .push(format!("expected {order} matrices, got {}", matrices.len()));
        return report;
    }
    let rights = action.generator_indices().to_vec();
    if let Some(signs) = sign_values(matrices, &trace_to_cyc) {
        // One-dimensional with values ±1: orthogonal for any weight, character
        // norm 1, and the homomorphism test reduces to sign products.
        for g in 0..order {
            for &h in &rights {
                if signs[g] * signs[h] != signs[action.mul(g, h)] {
                    report.homomorphism_violations.push((g, h));
                }
            }
        }
        if kind == Some(IrrepKind::ComplexType) {
            report.character_norm = Some((q(2), q(1)));
        }
        return report;
    }
    for g in 0..order {
        for &h in &rights {
            let gh = action.mul(g, h);
            if matrices[g].mul(&matrices[h]) != matrices[gh] {
                report.homomorphism_violations.push((g, h));
            }
        }
    }
    let dim = matrices[0].rows();
    let weights: Vec<T> = match gamma {
        Some(gm) => gm.iter().map(|v| T::r_from_q(v)).collect(),
        None => vec![T::r_one(); dim],
    };
    let gmat = Mat::from_fn(dim, dim, |i, j| if i == j { weights[i].clone() } else { T::r_zero() });
    for (g, m) in matrices.iter().enumerate() {
        if m.transpose().mul(&gmat).mul(m) != gmat {
            report.non_orthogonal.push(g);
        }
    }
    if let Some(kind) = kind {
        let mut acc = Cyc::r_zero();
        for m in matrices {
            let chi = trace_to_cyc(&m.trace());
            acc = acc.r_add(&chi.r_mul(&chi));
        }
        let norm = acc.r_mul(&Cyc::rational(crate::rational::qr(1, order as i64)));
        let expected = match kind {
            IrrepKind::AbsolutelyReal => q(1),
            IrrepKind::ComplexType => q(2),
        };
        if norm.as_rational() != Some(expected.clone()) {
            let found = norm
                .as_rational()
                .unwrap_or_else(|| crate::rational::from_f64_exact(norm.to_f64()));
            report.character_norm = Some((expected, found));
        }
    }
    report
}

/// Values of a one-dimensional representation when all of them are `±1`.
fn sign_values<T: Ring>(matrices: &[Mat<T>], trace_to_cyc: &impl Fn(&T) -> Cyc) -> Option<Vec<i8>> {
    let one = q(1);
    matrices
        .iter()
        .map(|m| {
            if m.rows() != 1 || m.cols() != 1 {
                return None;
            }
            let v = trace_to_cyc(&m.trace()).as_rational()?;
            if v == one {
                Some(1)
            } else if v == -one.clone() {
                Some(-1)
            } else {
                None
            }
        })
        .collect()
}

pub fn verify_irrep(irrep: &RealIrrep, action: &GroupAction) -> RepresentationReport {
    verify_representation(
        &irrep.matrices,
        Some(&irrep.gamma),
        action,
        Some(irrep.kind),
        Cyc::clone,
    )
}

/// Realify a pair of complex conjugate irreducible representations into one real
/// representation of twice the dimension via `[[Re, -Im], [Im, Re]]`.
pub fn realify_pair(first: &[Mat<Cyc>], second: &[Mat<Cyc>], action: &GroupAction, label: &str) -> Result<RealIrrep> {
    if first.len() != second.len() || first.is_empty() {
        return Err(Error::NotConjugatePair("element counts differ".into()));
    }
    let conjugate = first.iter().zip(second).all(|(a, b)| a.map(Cyc::conj) == *b);
    if !conjugate {
        return Err(Error::NotConjugatePair(
            "second member is not the conjugate of the first".into(),
        ));
    }
    if first.iter().all(|m| m.trace().is_real()) {
        return Err(Error::NotConjugatePair(
            "character is real; the representation is its own conjugate".into(),
        ));
    }
    let d = first[0].rows();
    let matrices: Vec<Mat<Cyc>> = first
        .iter()
        .map(|m| {
            Mat::from_fn(2 * d, 2 * d, |i, j| {
                let (bi, ri) = (i / d, i % d);
                let (bj, rj) = (j / d, j % d);
                let z = m.get(ri, rj);
                match (bi, bj) {
                    (0, 0) | (1, 1) => z.re(),
                    (0, 1) => z.im().r_neg(),
                    _ => z.im(),
                }
            })
        })
        .collect();
    let irrep = RealIrrep {
        label: label.to_string(),
        kind: IrrepKind::ComplexType,
        matrices,
        gamma: vec![q(1); 2 * d],
    };
    let report = verify_irrep(&irrep, action);
    if !report.homomorphism_violations.is_empty() || !report.non_orthogonal.is_empty() {
        return Err(Error::InvalidRepresentation(format!(
            "realified pair {label} fails checks: {report:?}"
        )));
    }
    Ok(irrep)
}

/// A group action together with its complete list of real irreducible representations.
#[derive(Clone, Debug)]
pub struct IrrepCatalog {
    pub name: String,
    pub action: GroupAction,
    pub irreps: Vec<RealIrrep>,
}

impl IrrepCatalog {
    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(RealIrrep::dim).collect()
    }

    pub fn irrep_index(&self, label: &str) -> Option<usize> {
        self.irreps.iter().position(|r| r.label == label)
    }

    /// Every irrep valid, characters of distinct irreps orthogonal, and the
    /// complex-weighted sum of squared dimensions equal to `|G|`.
    pub fn check(&self) -> Result<()> {
        let order = self.action.order();
        let total: Q = self.irreps.iter().map(RealIrrep::complex_square_sum).sum();
        if total != q(order as i64) {
            return Err(Error::InvalidRepresentation(format!(
                "{}: squared dimensions sum to {total}, group order {order}",
                self.name
            )));
        }
        for irrep in &self.irreps {
            let report = verify_irrep(irrep, &self.action);
            if !report.is_valid() {
                return Err(Error::InvalidRepresentation(format!(
                    "{} {}: {report:?}",
                    self.name, irrep.label
                )));
            }
        }
        // Irreps with verified character norms are orthogonal exactly when their
        // characters differ. Characters are bucketed by their rational values, with
        // irrational values sharing one slot, and compared exactly within buckets.
        let chars: Vec<Vec<Cyc>> = self
            .irreps
            .iter()
            .map(|r| (0..order).map(|g| r.character(g)).collect())
            .collect();
        let mut buckets: HashMap<Vec<Option<Q>>, Vec<usize>> = HashMap::new();
        for (i, c) in chars.iter().enumerate() {
            let key = c.iter().map(Cyc::as_rational).collect();
            buckets.entry(key).or_default().push(i);
        }
        for members in buckets.values() {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[..a] {
                    if chars[i] == chars[j] {
                        return Err(Error::InvalidRepresentation(format!(
                            "{}: {} and {} have the same character",
                            self.name, self.irreps[i].label, self.irreps[j].label
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Catalog families with their action on coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogSpec {
    /// Trivial group on `ℝⁿ`.
    Trivial(usize),
    /// `C₂ⁿ` acting by sign flips of the coordinates.
    C2n(usize),
    /// `C_m` by rotation of the plane (`m ∈ {2, 4}`) or cyclic shift of `m` coordinates.
    Cyclic { m: usize, planar: bool },
    /// `D_m` by the planar symmetries of the square (`m ∈ {2, 4}`) or by permuting
    /// the `m` vertices of a regular polygon.
    Dihedral { m: usize, planar: bool },
    /// `S_n` permuting coordinates.
    Symmetric(usize),
}

impl CatalogSpec {
    /// Parse `family:param[:planar|perm]`, e.g. `dihedral:4` or `cyclic:5`.
    pub fn parse(text: &str) -> Result<CatalogSpec> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let bad = || Error::UnsupportedCatalog(text.to_string());
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let param: usize = parts[1].parse().map_err(|_| bad())?;
        let variant = parts.get(2).copied();
        let planar_default = matches!(param, 2 | 4);
        let planar = match variant {
            None => planar_default,
            Some("planar") if planar_default => true,
            Some("perm") => false,
            _ => return Err(bad()),
        };
        let spec = match parts[0] {
            "trivial" => CatalogSpec::Trivial(param),
            "c2n" => CatalogSpec::C2n(param),
            "cyclic" => CatalogSpec::Cyclic { m: param, planar },
            "dihedral" => CatalogSpec::Dihedral { m: param, planar },
            "symmetric" => CatalogSpec::Symmetric(param),
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CatalogSpec::Trivial(n) => (1..=12).contains(&n),
            CatalogSpec::C2n(n) => (1..=10).contains(&n),
            CatalogSpec::Cyclic { m, planar } => (2..=12).contains(&m) && (!planar || matches!(m, 2 | 4)),
            CatalogSpec::Dihedral { m, planar } => {
                (2..=12).contains(&m) && (!planar || matches!(m, 2 | 4)) && (planar || m >= 3)
            }
            CatalogSpec::Symmetric(n) => (2..=MAX_SYMMETRIC_PRESENTATION).contains(&n),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedCatalog(self.name()))
        }
    }

    pub fn name(&self) -> String {
        match *self {
            CatalogSpec::Trivial(n) => format!("trivial:{n}"),
            CatalogSpec::C2n(n) => format!("c2n:{n}"),
            CatalogSpec::Cyclic { m, planar } => {
                format!("cyclic:{m}{}", if planar { "" } else { ":perm" })
            }
            CatalogSpec::Dihedral { m, planar } => {
                format!("dihedral:{m}{}", if planar { "" } else { ":perm" })
            }
            CatalogSpec::Symmetric(n) => format!("symmetric:{n}"),
        }
    }

    /// Generators of the action, in the order the catalog irreps index them.
    pub fn generators(&self) -> Vec<Mat<Q>> {
        match *self {
            CatalogSpec::Trivial(n) => vec![Mat::identity(n)],
            CatalogSpec::C2n(n) => (0..n)
                .map(|i| {
                    Mat::from_fn(n, n, |a, b| match (a == b, a == i) {
                        (false, _) => q(0),
                        (true, true) => q(-1),
                        (true, false) => q(1),
                    })
                })
                .collect(),
            CatalogSpec::Cyclic { m, planar } => vec![rotation_generator(m, planar)],
            CatalogSpec::Dihedral { m, planar } => {
                let s = if planar {
                    qmat(&[&[0, 1], &[1, 0]])
                } else {
                    permutation_matrix(&(0..m).map(|j| (m - j) % m).collect::<Vec<_>>())
                };
                vec![rotation_generator(m, planar), s]
            }
            // s_k swaps coordinates n-k and n-k+1 (1-based).
            CatalogSpec::Symmetric(n) => (1..n)
                .map(|k| {
                    let mut perm: Vec<usize> = (0..n).collect();
                    perm.swap(n - k - 1, n - k);
                    permutation_matrix(&perm)
                })
                .collect(),
        }
    }

    /// Ambient dimension of the action.
    pub fn nvars(&self) -> usize {
        match *self {
            CatalogSpec::Trivial(n) | CatalogSpec::C2n(n) | CatalogSpec::Symmetric(n) => n,
            CatalogSpec::Cyclic { m, planar } | CatalogSpec::Dihedral { m, planar } => {
                if planar {
                    2
                } else {
                    m
                }
            }
        }
    }
}

fn qmat(rows: &[&[i64]]) -> Mat<Q> {
    Mat::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect())
}

fn cmat(rows: Vec<Vec<Cyc>>) -> Mat<Cyc> {
    Mat::from_rows(rows)
}

fn scalar(v: i64) -> Mat<Cyc> {
    cmat(vec![vec![Cyc::from_int(v)]])
}

/// Permutation matrix sending `e_j` to `e_{perm[j]}`.
pub fn permutation_matrix(perm: &[usize]) -> Mat<Q> {
    let n = perm.len();
    Mat::from_fn(n, n, |i, j| if perm[j] == i { q(1) } else { q(0) })
}

fn rotation_generator(m: usize, planar: bool) -> Mat<Q> {
    match (planar, m) {
        (true, 2) => qmat(&[&[-1, 0], &[0, -1]]),
        (true, _) => qmat(&[&[0, -1], &[1, 0]]),
        (false, _) => permutation_matrix(&(0..m).map(|j| (j + 1) % m).collect::<Vec<_>>()),
    }
}

fn rotation(k: i64, m: u32) -> Mat<Cyc> {
    let c = Cyc::cos_2pi(k, m);
    let s = Cyc::sin_2pi(k, m);
    cmat(vec![vec![c.clone(), s.r_neg()], vec![s, c]])
}

fn build_irrep(action: &GroupAction, label: &str, kind: IrrepKind, images: Vec<Mat<Cyc>>, gamma: Vec<Q>) -> RealIrrep {
    RealIrrep {
        label: label.to_string(),
        kind,
        matrices: action.extend_images(&images),
        gamma,
    }
}

/// Build a catalog group with its irreducible representations, verified.
pub fn catalog(spec: &CatalogSpec) -> Result<IrrepCatalog> {
    spec.validate()?;
    if matches!(*spec, CatalogSpec::Symmetric(n) if n > MAX_SYMMETRIC_CATALOG) {
        return Err(Error::UnsupportedCatalog(format!(
            "{}: irrep catalog limited to n <= {MAX_SYMMETRIC_CATALOG}",
            spec.name()
        )));
    }
    let cat = match *spec {
        CatalogSpec::Trivial(_) => {
            let action = close_group(&spec.generators(), DEFAULT_MAX_ORDER)?;
            let irreps = vec![build_irrep(
                &action,
                "trivial",
                IrrepKind::AbsolutelyReal,
                vec![scalar(1)],
                vec![q(1)],
            )];
            IrrepCatalog {
                name: spec.name(),
                action,
                irreps,
            }
        }
        CatalogSpec::C2n(n) => c2n_catalog(n, spec)?,
        CatalogSpec::Cyclic { m, .. } => cyclic_catalog(m, spec)?,
        CatalogSpec::Dihedral { m, .. } => dihedral_catalog(m, spec)?,
        CatalogSpec::Symmetric(n) => symmetric_catalog(n, spec)?,
    };
    cat.check()?;
    Ok(cat)
}

fn c2n_catalog(n: usize, spec: &CatalogSpec) -> Result<IrrepCatalog> {
    let action = close_group(&spec.generators(), DEFAULT_MAX_ORDER)?;
    let mut subsets: Vec<Vec<usize>> = (0u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let irreps = subsets
        .iter()
        .map(|s| {
            let images = (0..n).map(|i| scalar(if s.contains(&i) { -1 } else { 1 })).collect();
            let label = if s.is_empty() {
                "trivial".to_string()
            } else {
                format!(
                    "odd{{{}}}",
                    s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
                )
            };
            build_irrep(&action, &label, IrrepKind::AbsolutelyReal, images, vec![q(1)])
        })
        .collect();
    Ok(IrrepCatalog {
        name: spec.name(),
        action,
        irreps,
    })
}

fn cyclic_catalog(m: usize, spec: &CatalogSpec) -> Result<IrrepCatalog> {
    let action = close_group(&spec.generators(), DEFAULT_MAX_ORDER)?;
    let mut irreps = vec![build_irrep(
        &action,
        "trivial",
        IrrepKind::AbsolutelyReal,
        vec![scalar(1)],
        vec![q(1)],
    )];
    if m.is_multiple_of(2) {
        irreps.push(build_irrep(
            &action,
            "alternating",
            IrrepKind::AbsolutelyReal,
            vec![scalar(-1)],
            vec![q(1)],
        ));
    }
    for k in 1..m.div_ceil(2) {
        let z = |e: i64| cmat(vec![vec![Cyc::root_of_unity(m as u32, e)]]);
        let first = action.extend_images(&[z(k as i64)]);
        let second = action.extend_images(&[z(-(k as i64))]);
        irreps.push(realify_pair(&first, &second, &action, &format!("rotation{k}"))?);
    }
    Ok(IrrepCatalog {
        name: spec.name(),
        action,
        irreps,
    })
}

fn dihedral_catalog(m: usize, spec: &CatalogSpec) -> Result<IrrepCatalog> {
    let action = close_group(&spec.generators(), DEFAULT_MAX_ORDER)?;
    let mut irreps = Vec::new();
    let mut one_dim = vec![("trivial", 1, 1), ("reflection-sign", 1, -1)];
    if m.is_multiple_of(2) {
        one_dim.push(("rotation-sign", -1, 1));
        one_dim.push(("both-sign", -1, -1));
    }
    for (label, a, b) in one_dim {
        irreps.push(build_irrep(
            &action,
            label,
            IrrepKind::AbsolutelyReal,
            vec![scalar(a), scalar(b)],
            vec![q(1)],
        ));
    }
    let swap = cmat(vec![
        vec![Cyc::from_int(0), Cyc::from_int(1)],
        vec![Cyc::from_int(1), Cyc::from_int(0)],
    ]);
    for k in 1..m.div_ceil(2) {
        irreps.push(build_irrep(
            &action,
            &format!("planar{k}"),
            IrrepKind::AbsolutelyReal,
            vec![rotation(k as i64, m as u32), swap.clone()],
            vec![q(1), q(1)],
        ));
    }
    Ok(IrrepCatalog {
        name: spec.name(),
        action,
        irreps,
    })
}

/// Integer partitions of `n` in reverse lexicographic order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            cur.push(part);
            rec(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Standard Young tableaux of a shape, each given as the row of every entry
/// `1..=n`, ordered lexicographically by that row sequence.
pub fn standard_tableaux(shape: &[usize]) -> Vec<Vec<usize>> {
    fn rec(shape: &[usize], filled: &mut Vec<usize>, rows: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if filled.iter().zip(shape).all(|(f, s)| f == s) {
            out.push(rows.clone());
            return;
        }
        for r in 0..shape.len() {
            let fits = filled[r] < shape[r] && (r == 0 || filled[r - 1] > filled[r]);
            if fits {
                filled[r] += 1;
                rows.push(r);
                rec(shape, filled, rows, out);
                rows.pop();
                filled[r] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(shape, &mut vec![0; shape.len()], &mut Vec::new(), &mut out);
    out
}

fn contents(rows: &[usize]) -> Vec<i64> {
    let mut next_col = vec![0usize; rows.iter().max().map_or(0, |m| m + 1)];
    rows.iter()
        .map(|&r| {
            let c = next_col[r];
            next_col[r] += 1;
            c as i64 - r as i64
        })
        .collect()
}

/// Young's seminormal form: images of the adjacent transpositions `s_1, …, s_{n-1}`
/// and the weights `γ` turning it into the orthogonal form.
pub fn young_seminormal(shape: &[usize]) -> (Vec<Mat<Q>>, Vec<Q>) {
    let tabs = standard_tableaux(shape);
    let n: usize = shape.iter().sum();
    let d = tabs.len();
    let index: HashMap<Vec<usize>, usize> = tabs.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let cont: Vec<Vec<i64>> = tabs.iter().map(|t| contents(t)).collect();
    let swapped = |t: &[usize], k: usize| {
        let mut u = t.to_vec();
        u.swap(k, k + 1);
        u
    };
    // Weights by breadth-first propagation along the swap graph.
    let mut gamma: Vec<Option<Q>> = vec![None; d];
    gamma[0] = Some(q(1));
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        for k in 0..n.saturating_sub(1) {
            let r = cont[a][k + 1] - cont[a][k];
            if r.abs() < 2 {
                continue;
            }
            let b = index[&swapped(&tabs[a], k)];
            if gamma[b].is_none() {
                let ratio = crate::rational::qr(r - 1, r + 1);
                gamma[b] = Some(gamma[a].as_ref().expect("visited") * ratio);
                queue.push_back(b);
            }
        }
    }
    let gamma: Vec<Q> = gamma.into_iter().map(|g| g.expect("connected")).collect();
    let mut images = Vec::new();
    for k in 0..n.saturating_sub(1) {
        let mut m = Mat::<Q>::zeros(d, d);
        for a in 0..d {
            let r = cont[a][k + 1] - cont[a][k];
            match r {
                1 => m.set(a, a, q(1)),
                -1 => m.set(a, a, q(-1)),
                _ => {
                    let b = index[&swapped(&tabs[a], k)];
                    m.set(a, a, crate::rational::qr(1, r));
                    m.set(b, a, crate::rational::qr((r + 1).abs(), r.abs()));
                }
            }
        }
        images.push(m);
    }
    (images, gamma)
}

fn shape_label(shape: &[usize]) -> String {
    format!(
        "[{}]",
        shape.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    )
}

fn symmetric_catalog(n: usize, spec: &CatalogSpec) -> Result<IrrepCatalog> {
    let action = close_group(&spec.generators(), DEFAULT_MAX_ORDER)?;
    let mut shapes = partitions(n);
    if n == 3 {
        // Trivial, sign, then the two-dimensional representation.
        shapes = vec![vec![3], vec![1, 1, 1], vec![2, 1]];
    }
    let irreps = shapes
        .iter()
        .map(|shape| {
            let (imgs, gamma) = young_seminormal(shape);
            let images = imgs.iter().map(|m| m.map(|v| Cyc::rational(v.clone()))).collect();
            let label = match shape.as_slice() {
                s if s.len() == 1 => "trivial".to_string(),
                s if s.iter().all(|&p| p == 1) => "sign".to_string(),
                s => shape_label(s),
            };
            build_irrep(&action, &label, IrrepKind::AbsolutelyReal, images, gamma)
        })
        .collect();
    Ok(IrrepCatalog {
        name: spec.name(),
        action,
        irreps,
    })
}
