//! Certificates of `f − λ` being a sum of squares and their exact verification.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use crate::equivariant::PiMatrix;
use crate::error::Result;
use crate::invariantring::{expand_invariants, InvariantPoly, InvariantPresentation, ThetaPowers};
use crate::linalg::{psd_check, to_f64_mat, Mat, PsdCheck};
use crate::polyring::{render_polynomial, Monomial, Polynomial, VarNames};
use crate::rational::{render_rational, to_f64, Q};

/// A rational or floating-point scalar.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Q),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(v) => to_f64(v),
            Value::Float(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Value::Exact(v) => Some(v),
            Value::Float(_) => None,
        }
    }
}

/// A rational or floating-point Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Gram {
    Exact(Mat<Q>),
    Float(DMatrix<f64>),
}

impl Gram {
    pub fn size(&self) -> usize {
        match self {
            Gram::Exact(m) => m.rows(),
            Gram::Float(m) => m.nrows(),
        }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        match self {
            Gram::Exact(m) => to_f64_mat(m),
            Gram::Float(m) => m.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Mat<Q>> {
        match self {
            Gram::Exact(m) => Some(m),
            Gram::Float(_) => None,
        }
    }
}

/// One block `⟨S, Π ⊗ wwᵀ⟩` of an invariant certificate, carrying the basis that
/// produced `Π` so that the identity can be checked in the original variables.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantBlock {
    pub irrep: usize,
    pub label: String,
    pub gamma: Vec<Q>,
    pub vectors: Vec<Vec<Polynomial>>,
    pub pi: Vec<Vec<InvariantPoly>>,
    /// Row `r` of the Gram matrix is `θ^{α_r}` times row `k_r` of `Π`.
    pub rows: Vec<(usize, Vec<u32>)>,
    pub gram: Gram,
}

impl InvariantBlock {
    pub fn pi_matrix(&self, pres: &InvariantPresentation) -> Result<PiMatrix> {
        PiMatrix::from_entries(self.irrep, &self.label, self.pi.clone(), pres)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertificateBody {
    /// `f − λ = Yᵀ Q Y` over a monomial vector `Y`.
    Plain {
        vars: VarNames,
        monomials: Vec<Monomial>,
        gram: Gram,
    },
    /// `f − λ = Σᵢ ⟨Sᵢ, Πᵢ⟩` expanded in the original variables.
    Invariant {
        presentation: InvariantPresentation,
        blocks: Vec<InvariantBlock>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// Catalog name of the group, or a free-form description.
    pub group: String,
    pub lambda: Value,
    /// Largest constraint residual of a floating-point certificate.
    pub residual: Option<f64>,
    pub body: CertificateBody,
}

impl Certificate {
    pub fn is_exact(&self) -> bool {
        self.lambda.exact().is_some() && self.grams().iter().all(|g| g.exact().is_some())
    }

    pub fn mode(&self) -> &'static str {
        match self.body {
            CertificateBody::Plain { .. } => "plain",
            CertificateBody::Invariant { .. } => "invariant",
        }
    }

    pub fn grams(&self) -> Vec<&Gram> {
        match &self.body {
            CertificateBody::Plain { gram, .. } => vec![gram],
            CertificateBody::Invariant { blocks, .. } => blocks.iter().map(|b| &b.gram).collect(),
        }
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.grams().iter().map(|g| g.size()).collect()
    }

    /// Copy with every Gram matrix replaced, in `grams()` order.
    pub fn with_grams(&self, lambda: Value, grams: Vec<Gram>, residual: Option<f64>) -> Certificate {
        let mut out = self.clone();
        out.lambda = lambda;
        out.residual = residual;
        match &mut out.body {
            CertificateBody::Plain { gram, .. } => {
                if let Some(g) = grams.into_iter().next() {
                    *gram = g;
                }
            }
            CertificateBody::Invariant { blocks, .. } => {
                for (b, g) in blocks.iter_mut().zip(grams) {
                    b.gram = g;
                }
            }
        }
        out
    }

    /// Variable names of the certified polynomial.
    pub fn vars(&self) -> &VarNames {
        match &self.body {
            CertificateBody::Plain { vars, .. } => vars,
            CertificateBody::Invariant { presentation, .. } => presentation.vars(),
        }
    }
}

/// Outcome of an exact check; `failure` names the first failing condition.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub valid: bool,
    pub failure: Option<String>,
}

impl VerificationReport {
    fn ok() -> Self {
        VerificationReport {
            valid: true,
            failure: None,
        }
    }

    fn fail(msg: impl Into<String>) -> Self {
        VerificationReport {
            valid: false,
            failure: Some(msg.into()),
        }
    }
}

/// Exact check that `cert` proves `f − λ` is a sum of squares: every Gram matrix
/// is PSD (rational `LDLᵀ`) and the certificate expands to `f − λ` term by term.
/// Invariant certificates are expanded in the original variables through the stored
/// equivariant vectors, after checking each `Π` entry against them.
pub fn verify_certificate(cert: &Certificate, f: &Polynomial) -> VerificationReport {
    match check(cert, f) {
        Ok(report) => report,
        Err(e) => VerificationReport::fail(e.to_string()),
    }
}

fn check(cert: &Certificate, f: &Polynomial) -> Result<VerificationReport> {
    let Some(lambda) = cert.lambda.exact() else {
        return Ok(VerificationReport::fail("λ is not exact"));
    };
    let n = cert.vars().len();
    if f.nvars() != n {
        return Ok(VerificationReport::fail(format!(
            "polynomial has {} variables, certificate has {n}",
            f.nvars()
        )));
    }
    let target = f - &Polynomial::constant(n, lambda.clone());
    let (expansion, names) = match &cert.body {
        CertificateBody::Plain { vars, monomials, gram } => {
            let Some(q) = gram.exact() else {
                return Ok(VerificationReport::fail("Gram matrix is not exact"));
            };
            if q.rows() != monomials.len() || !q.is_square() {
                return Ok(VerificationReport::fail(
                    "Gram matrix size does not match the monomial vector",
                ));
            }
            if let Some(msg) = psd_failure(q, "Gram matrix") {
                return Ok(VerificationReport::fail(msg));
            }
            let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
            for i in 0..q.rows() {
                for j in 0..q.rows() {
                    if !q.get(i, j).is_zero() {
                        *acc.entry(monomials[i].mul(&monomials[j])).or_insert_with(Q::zero) += q.get(i, j);
                    }
                }
            }
            (Polynomial::from_terms(n, acc), vars.clone())
        }
        CertificateBody::Invariant { presentation, blocks } => {
            let mut total = Polynomial::zero(n);
            let mut powers = ThetaPowers::new(presentation.theta());
            for b in blocks {
                match block_expansion(b, presentation, &mut powers)? {
                    Ok(p) => total = &total + &p,
                    Err(msg) => return Ok(VerificationReport::fail(msg)),
                }
            }
            (total, presentation.vars().clone())
        }
    };
    let diff = &expansion - &target;
    if let Some((m, _)) = diff.terms().next() {
        let probe = Polynomial::term(Q::from_integer(1.into()), m.clone());
        return Ok(VerificationReport::fail(format!(
            "identity fails at {}: certificate gives {}, f − λ has {}",
            render_polynomial(&probe, &names),
            render_rational(&expansion.coeff(m)),
            render_rational(&target.coeff(m))
        )));
    }
    Ok(VerificationReport::ok())
}

fn psd_failure(m: &Mat<Q>, what: &str) -> Option<String> {
    match psd_check(m) {
        PsdCheck::Psd => None,
        PsdCheck::NotSymmetric => Some(format!("{what} is not symmetric")),
        PsdCheck::NegativePivot(k) => Some(format!("{what} is not PSD: negative pivot at step {}", k + 1)),
        PsdCheck::ZeroPivotNonzeroRow(k) => Some(format!(
            "{what} is not PSD: zero pivot with nonzero row at step {}",
            k + 1
        )),
    }
}

/// Expansion of one block in the original variables, or a failure message.
fn block_expansion(
    b: &InvariantBlock,
    pres: &InvariantPresentation,
    powers: &mut ThetaPowers<'_>,
) -> Result<std::result::Result<Polynomial, String>> {
    let what = format!("block {}", b.label);
    let Some(s) = b.gram.exact() else {
        return Ok(Err(format!("{what}: Gram matrix is not exact")));
    };
    let r = b.vectors.len();
    let dim = b.gamma.len();
    if b.gamma.iter().any(|g| !g.is_positive()) {
        return Ok(Err(format!("{what}: weights must be positive")));
    }
    if b.vectors
        .iter()
        .any(|v| v.len() != dim || v.iter().any(|p| p.nvars() != pres.nvars()))
    {
        return Ok(Err(format!("{what}: vectors do not match the weights")));
    }
    if b.pi.len() != r || b.pi.iter().any(|row| row.len() != r) {
        return Ok(Err(format!("{what}: Π has the wrong size")));
    }
    let nt = pres.theta().len();
    if b.rows.iter().any(|(k, a)| *k >= r || a.len() != nt) {
        return Ok(Err(format!("{what}: row index out of range")));
    }
    if !s.is_square() || s.rows() != b.rows.len() {
        return Ok(Err(format!("{what}: Gram matrix size does not match the rows")));
    }
    if let Some(msg) = psd_failure(s, &what) {
        return Ok(Err(msg));
    }
    let inner = |k: usize, l: usize| -> Polynomial {
        let mut out = Polynomial::zero(pres.nvars());
        for ((a, c), g) in b.vectors[k].iter().zip(&b.vectors[l]).zip(&b.gamma) {
            out = &out + &(a * c).scale(g);
        }
        out
    };
    let mut used: BTreeMap<(usize, usize), BTreeMap<Vec<u32>, Q>> = BTreeMap::new();
    for (i, (ki, ai)) in b.rows.iter().enumerate() {
        for (j, (kj, aj)) in b.rows.iter().enumerate() {
            let v = s.get(i, j);
            if v.is_zero() {
                continue;
            }
            let alpha: Vec<u32> = ai.iter().zip(aj).map(|(x, y)| x + y).collect();
            *used.entry((*ki, *kj)).or_default().entry(alpha).or_insert_with(Q::zero) += v;
        }
    }
    let mut total = Polynomial::zero(pres.nvars());
    for ((k, l), terms) in used {
        let ip = inner(k, l);
        if expand_invariants(&b.pi[k][l], pres)? != ip {
            return Ok(Err(format!(
                "{what}: Π entry ({}, {}) does not expand to the inner product of its vectors",
                k + 1,
                l + 1
            )));
        }
        let mut weight = Polynomial::zero(pres.nvars());
        for (alpha, c) in terms {
            if !c.is_zero() {
                weight = &weight + &powers.get(&alpha).scale(&c);
            }
        }
        total = &total + &(&weight * &ip);
    }
    Ok(Ok(total))
}
