//! End-to-end pipeline: generator bundles for a group, invariant SOS programs,
//! lower bounds, rational rounding and exact certificate checks.

mod certificate;
pub mod fixtures;
mod format;
mod rounding;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

pub use certificate::{
    verify_certificate, Certificate, CertificateBody, Gram, InvariantBlock, Value, VerificationReport,
};
pub use format::{parse_certificate, parse_polynomial_file, render_certificate, render_polynomial_file};
pub use rounding::{certify_lower_bound, round_certificate, round_certificate_at, DEFAULT_SCHEDULE};

use crate::equivariant::{
    catalog_equivariants, check_pi_consistency, monomial_envelope, pi_matrix, EquivariantBasis, PiMatrix,
};
use crate::error::{Error, Result};
use crate::grouprep::{catalog, CatalogSpec, IrrepCatalog, MAX_SYMMETRIC_CATALOG};
use crate::invariantring::{presentation, rewrite_in_invariants, InvariantPresentation};
use crate::isotypic::{symmetry_adapted_basis, InducedRep};
use crate::polyring::{Degree, Polynomial};
use crate::rational::{q, to_f64, Q};
use crate::sdp::{
    assemble_gram, assemble_invariant_sos, envelope_rows, lift_reduced, solve, solve_invariant, BlockSDP,
    InvariantAssembly, SdpSolution, SolveOptions, SolveStatus,
};

/// Everything needed to write invariant SOS programs for one group: the
/// presentation of the invariant ring and, per irrep, a module basis of the
/// equivariants with its matrix `Π`.
#[derive(Clone, Debug)]
pub struct GeneratorBundle {
    pub group: String,
    /// The irrep catalog, absent for bundles built without one.
    pub catalog: Option<IrrepCatalog>,
    pub presentation: InvariantPresentation,
    pub bases: Vec<EquivariantBasis>,
    pub pis: Vec<PiMatrix>,
    /// Smallest diagonal degree of `Π` that a missing irrep or a dropped basis
    /// vector could have; `None` when the bundle is complete.
    pub omitted_from: Option<u32>,
}

impl GeneratorBundle {
    /// Compute `Π` for every basis and check it against the basis.
    pub fn from_parts(
        group: String,
        catalog: Option<IrrepCatalog>,
        presentation: InvariantPresentation,
        bases: Vec<EquivariantBasis>,
        omitted_from: Option<u32>,
    ) -> Result<Self> {
        let mut pis = Vec::with_capacity(bases.len());
        for b in &bases {
            let pi = pi_matrix(b, &presentation)?;
            check_pi_consistency(b, &pi, &presentation)?;
            pis.push(pi);
        }
        Ok(GeneratorBundle {
            group,
            catalog,
            presentation,
            bases,
            pis,
            omitted_from,
        })
    }

    /// Whether every square that can occur in a decomposition of degree `d` is covered.
    pub fn covers_degree(&self, d: u32) -> bool {
        self.omitted_from.is_none_or(|m| d < m)
    }
}

/// Bundle for a catalog group with all equivariant generators.
pub fn algorithm_one(spec: &CatalogSpec) -> Result<GeneratorBundle> {
    algorithm_one_upto(spec, None)
}

/// Bundle keeping only generators of degree at most `max_degree`, enough for
/// programs of degree up to `2·max_degree + 1`.
///
/// Symmetric groups beyond the irrep catalog get a bundle with the trivial and
/// standard representations only, which covers degree at most 3.
pub fn algorithm_one_upto(spec: &CatalogSpec, max_degree: Option<u32>) -> Result<GeneratorBundle> {
    if let CatalogSpec::Symmetric(n) = *spec {
        if n > MAX_SYMMETRIC_CATALOG {
            return symmetric_low_degree(spec, n);
        }
    }
    let cat = catalog(spec)?;
    let pres = presentation(spec)?;
    let bases = catalog_equivariants(spec, &cat, &pres, max_degree)?;
    GeneratorBundle::from_parts(spec.name(), Some(cat), pres, bases, max_degree.map(|m| 2 * m + 2))
}

/// Trivial representation and the standard one with generators
/// `q_j = x₁ + … + x_j − j·x_{j+1}` and weights `n / (j(j+1))`.
fn symmetric_low_degree(spec: &CatalogSpec, n: usize) -> Result<GeneratorBundle> {
    let pres = presentation(spec)?;
    let gens = spec.generators();
    let trivial = EquivariantBasis::from_action(0, "trivial", vec![q(1)], vec![vec![Polynomial::one(n)]], &gens)?;
    let helmert: Vec<Polynomial> = (1..n)
        .map(|j| {
            let mut p = Polynomial::zero(n);
            for i in 0..j {
                p = &p + &Polynomial::var(n, i);
            }
            &p - &Polynomial::var(n, j).scale(&q(j as i64))
        })
        .collect();
    let gamma: Vec<Q> = (1..n)
        .map(|j| Q::new((n as i64).into(), ((j * (j + 1)) as i64).into()))
        .collect();
    let standard = EquivariantBasis::from_action(1, &format!("[{},1]", n - 1), gamma, vec![helmert], &gens)?;
    // Every other irrep of S_n first occurs in degree 2 or later, so its Π has degree ≥ 4.
    GeneratorBundle::from_parts(spec.name(), None, pres, vec![trivial, standard], Some(4))
}

/// What the invariant program decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Is `f` itself a sum of squares?
    Feasibility,
    /// Largest `λ` with `f − λ` a sum of squares.
    MaximizeLambda,
}

fn degree_of(f: &Polynomial) -> u32 {
    match f.degree() {
        Degree::NegInfinity => 0,
        Degree::Finite(d) => d,
    }
}

/// Rewrite `f` in the bundle's invariants and assemble `f̃ − λ = Σᵢ ⟨Sᵢ, Πᵢ⟩`.
/// Forms use homogeneous envelopes.
pub fn invariant_program(f: &Polynomial, bundle: &GeneratorBundle, objective: Objective) -> Result<InvariantAssembly> {
    let pres = &bundle.presentation;
    if f.nvars() != pres.nvars() {
        return Err(Error::DimensionMismatch {
            expected: pres.nvars(),
            got: f.nvars(),
        });
    }
    let d = degree_of(f);
    if d % 2 == 1 {
        return Err(Error::OddDegree(d as usize));
    }
    if !bundle.covers_degree(d) {
        return Err(Error::UnsupportedCatalog(format!(
            "the generators for {} only cover degree below {}",
            bundle.group,
            bundle.omitted_from.unwrap_or(0)
        )));
    }
    let inv = rewrite_in_invariants(f, pres)?;
    let homogeneous = f.is_homogeneous() && d > 0;
    let rows: Vec<_> = bundle
        .pis
        .iter()
        .map(|p| envelope_rows(&monomial_envelope(pres, p, d, homogeneous)))
        .collect();
    assemble_invariant_sos(&inv, pres, &bundle.pis, &rows, objective == Objective::MaximizeLambda)
}

/// Map non-optimal outcomes to errors.
fn accept(sol: SdpSolution, objective: Objective) -> Result<SdpSolution> {
    match sol.status {
        SolveStatus::Optimal => Ok(sol),
        SolveStatus::Infeasible | SolveStatus::InfeasibleSuspect => Err(Error::NoCertificate(match objective {
            Objective::Feasibility => "the program is infeasible".into(),
            Objective::MaximizeLambda => "the dual diverges, so no shift λ works (f^sos = −∞ at this degree)".into(),
        })),
        other => Err(Error::Solver(format!("solver finished with status {other:?}"))),
    }
}

/// Solve the invariant program and return a floating-point certificate, or an
/// exact one when the constraints fix a single point.
pub fn algorithm_two(f: &Polynomial, bundle: &GeneratorBundle, objective: Objective) -> Result<Certificate> {
    // Feasibility is solved for `f / s` with unit-size coefficients and the Gram
    // matrices scale back by `s`. With `λ` the solver's absolute accuracy would
    // scale by `s` too, so those programs are solved as given.
    let s = match objective {
        Objective::Feasibility => Some(f.max_abs_coeff()).filter(|c| !c.is_zero()).unwrap_or_else(|| q(1)),
        Objective::MaximizeLambda => q(1),
    };
    let assembly = invariant_program(&f.scale(&(q(1) / &s)), bundle, objective)?;
    let sol = accept(solve(&assembly.sdp, &SolveOptions::default())?, objective)?;
    let mut blocks = Vec::with_capacity(assembly.layouts.len());
    let exact = sol.exact.as_ref();
    for (i, layout) in assembly.layouts.iter().enumerate() {
        let k = bundle
            .pis
            .iter()
            .position(|p| p.irrep() == layout.irrep)
            .expect("layout comes from a bundle irrep");
        let basis = &bundle.bases[k];
        let gram = match exact {
            Some((xs, _)) => Gram::Exact(xs[i].scale(&s)),
            None => Gram::Float(&sol.blocks[i] * to_f64(&s)),
        };
        blocks.push(InvariantBlock {
            irrep: layout.irrep,
            label: layout.label.clone(),
            gamma: basis.gamma().to_vec(),
            vectors: basis.vectors().to_vec(),
            pi: bundle.pis[k].entries().to_vec(),
            rows: layout.rows.clone(),
            gram,
        });
    }
    let lambda = match lambda_value(&sol, objective) {
        Value::Exact(v) => Value::Exact(v * &s),
        Value::Float(v) => Value::Float(v * to_f64(&s)),
    };
    Ok(Certificate {
        group: bundle.group.clone(),
        residual: if exact.is_some() { None } else { Some(sol.residual) },
        lambda,
        body: CertificateBody::Invariant {
            presentation: bundle.presentation.clone(),
            blocks,
        },
    })
}

fn lambda_value(sol: &SdpSolution, objective: Objective) -> Value {
    match (objective, &sol.exact) {
        (Objective::Feasibility, _) => Value::Exact(Q::from_integer(0.into())),
        (Objective::MaximizeLambda, Some((_, free))) => Value::Exact(free[0].clone()),
        (Objective::MaximizeLambda, None) => Value::Float(sol.free[0]),
    }
}

/// Largest `λ` with `f − λ` a sum of squares, computed on the invariant program.
pub fn sos_lower_bound(f: &Polynomial, spec: &CatalogSpec) -> Result<(f64, Certificate)> {
    let bundle = algorithm_one_upto(spec, Some(degree_of(f) / 2))?;
    let cert = algorithm_two(f, &bundle, Objective::MaximizeLambda)?;
    Ok((cert.lambda.to_f64(), cert))
}

/// One square `weight · p²` of a plain decomposition, with `p` given by its
/// coefficients over the certificate's monomials.
#[derive(Clone, Debug)]
pub struct SquareFactor {
    /// Catalog index of the irrep whose isotypic component contains `p`.
    pub irrep: Option<usize>,
    pub weight: f64,
    pub coefficients: DVector<f64>,
}

#[derive(Clone, Debug)]
pub struct PlainBound {
    pub lambda: f64,
    pub certificate: Certificate,
    /// Sizes of the blocks actually solved.
    pub block_sizes: Vec<usize>,
    pub factors: Vec<SquareFactor>,
}

/// Largest `λ` on the Gram program of `f`, optionally block-diagonalized by a
/// symmetry-adapted basis of the group.
pub fn plain_lower_bound(f: &Polynomial, spec: Option<&CatalogSpec>) -> Result<PlainBound> {
    let gram = assemble_gram(f, true)?;
    let vars = crate::polyring::VarNames::default_for(f.nvars());
    let (sdp, reduced): (BlockSDP, _) = match spec {
        None => (gram.sdp.clone(), None),
        Some(spec) => {
            let cat = catalog(spec)?;
            if spec.nvars() != f.nvars() {
                return Err(Error::DimensionMismatch {
                    expected: spec.nvars(),
                    got: f.nvars(),
                });
            }
            let rep = InducedRep::new(&cat.action, gram.monomials.clone())?;
            let basis = symmetry_adapted_basis(&rep, &cat)?;
            let (sdp, sol) = solve_invariant(&gram.sdp, &rep, &basis, &SolveOptions::default())?;
            (sdp, Some((basis, sol)))
        }
    };
    let (basis, sol) = match reduced {
        None => (None, solve(&sdp, &SolveOptions::default())?),
        Some((basis, sol)) => (Some(basis), sol),
    };
    let sol = accept(sol, Objective::MaximizeLambda)?;
    let mut factors = Vec::new();
    let full: DMatrix<f64> = match &basis {
        None => {
            let x = sol.blocks[0].clone();
            factors.extend(eigen_factors(&x, None, &DMatrix::identity(x.nrows(), x.nrows())));
            x
        }
        Some(basis) => {
            for (b, info) in basis.blocks().iter().enumerate() {
                for c in 0..info.copies {
                    factors.extend(eigen_factors(&sol.blocks[b], Some(info.irrep), &basis.columns(b, c)));
                }
            }
            lift_reduced(&sol.blocks, basis)?
        }
    };
    let gram_cert = match &sol.exact {
        Some((xs, _)) if basis.is_none() => Gram::Exact(xs[0].clone()),
        _ => Gram::Float(full),
    };
    let lambda = match (&sol.exact, &basis) {
        (Some((_, free)), None) => Value::Exact(free[0].clone()),
        _ => Value::Float(sol.free[0]),
    };
    let exact = matches!(lambda, Value::Exact(_));
    Ok(PlainBound {
        lambda: lambda.to_f64(),
        block_sizes: sdp.blocks.iter().map(|b| b.size).collect(),
        certificate: Certificate {
            group: spec.map_or_else(|| "none".to_string(), CatalogSpec::name),
            lambda,
            residual: if exact { None } else { Some(sol.residual) },
            body: CertificateBody::Plain {
                vars,
                monomials: gram.monomials,
                gram: gram_cert,
            },
        },
        factors,
    })
}

/// `X = Σ wᵢ vᵢvᵢᵀ` mapped through `t`, dropping numerically zero terms.
fn eigen_factors(x: &DMatrix<f64>, irrep: Option<usize>, t: &DMatrix<f64>) -> Vec<SquareFactor> {
    let eig = x.clone().symmetric_eigen();
    let top = eig.eigenvalues.amax().max(1e-300);
    (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > 1e-9 * top)
        .map(|i| SquareFactor {
            irrep,
            weight: eig.eigenvalues[i],
            coefficients: t * eig.eigenvectors.column(i),
        })
        .collect()
}
