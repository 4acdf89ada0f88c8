//! Rounding floating-point certificates to exact ones.

use nalgebra::DMatrix;
use num_bigint::BigInt;

use super::certificate::{verify_certificate, Certificate, CertificateBody, Gram, Value};
use super::{sos_lower_bound, InvariantBlock};
use crate::error::{Error, Result};
use crate::grouprep::CatalogSpec;
use crate::invariantring::rewrite_in_invariants;
use crate::linalg::{psd_check, Mat, PsdCheck};
use crate::polyring::Polynomial;
use crate::rational::{approximate, best_approximation, floor_to_denominator, from_f64_exact, to_f64, Q};
use crate::sdp::{
    assemble_gram_over, assemble_invariant_sos, exact_system, expose_face, solve, BlockSDP, EntryIndex, SdpSolution,
    SolveOptions, SolveStatus,
};

/// Denominator bounds tried in order when rounding Gram entries.
pub const DEFAULT_SCHEDULE: [u64; 4] = [100, 1_000, 10_000, 1_000_000];

/// Largest denominator for snapping `λ` to a nearby simple rational.
const SNAP_DENOMINATOR: u64 = 10_000;
/// Relative distance within which a snapped `λ` is tried.
const SNAP_TOL: f64 = 1e-7;
/// Grids `λ` is rounded down to, finest first.
const LAMBDA_GRIDS: [u64; 3] = [10_000, 1_000, 100];

/// Exact program `f − λ = certificate form` with `λ` free, rebuilt from the
/// certificate's own data.
fn rebuild_program(cert: &Certificate, f: &Polynomial) -> Result<BlockSDP> {
    match &cert.body {
        CertificateBody::Plain { monomials, .. } => Ok(assemble_gram_over(f, monomials.clone(), true)?.sdp),
        CertificateBody::Invariant { presentation, blocks } => {
            let inv = rewrite_in_invariants(f, presentation)?;
            let pis = blocks
                .iter()
                .map(|b| b.pi_matrix(presentation))
                .collect::<Result<Vec<_>>>()?;
            let rows: Vec<_> = blocks.iter().map(|b: &InvariantBlock| b.rows.clone()).collect();
            let assembly = assemble_invariant_sos(&inv, presentation, &pis, &rows, true)?;
            if assembly.sdp.blocks.len() != blocks.len() {
                return Err(Error::Rounding("certificate has a block without rows".into()));
            }
            Ok(assembly.sdp)
        }
    }
}

/// Exact certificate for `f` from a floating-point one.
///
/// The program is re-solved to find its face and the optimal `λ`. Candidates for
/// `λ` are a nearby simple rational, then the optimum rounded down to finer and
/// coarser grids. For each, a central feasible point at fixed `λ` is rounded to
/// each denominator bound in `schedule`, projected exactly onto the affine
/// constraints, and kept if every block passes the exact PSD test and the whole
/// certificate verifies. An exact input is returned unchanged.
pub fn round_certificate(cert: &Certificate, f: &Polynomial, schedule: &[u64]) -> Result<Certificate> {
    if cert.is_exact() {
        return Ok(cert.clone());
    }
    let sdp = rebuild_program(cert, f)?;
    let sol = solve(&sdp, &SolveOptions::default())?;
    if sol.status != SolveStatus::Optimal {
        return Err(Error::Rounding(format!(
            "re-solve finished with status {:?}",
            sol.status
        )));
    }
    if let Some(out) = exact_solution(cert, f, &sol) {
        return Ok(out);
    }
    let best = sol.free[0];
    for (lambda, at_optimum) in lambda_candidates(best) {
        if let Some(out) = round_at(cert, f, &sdp, &sol, &lambda, at_optimum, schedule)? {
            return Ok(out);
        }
    }
    Err(Error::Rounding(format!(
        "λ at boundary; retry with λ − ε (numerical optimum {best:.10})"
    )))
}

/// Exact certificate at a prescribed `λ`.
pub fn round_certificate_at(cert: &Certificate, f: &Polynomial, lambda: &Q, schedule: &[u64]) -> Result<Certificate> {
    let sdp = rebuild_program(cert, f)?;
    let sol = solve(&sdp, &SolveOptions::default())?;
    if sol.status != SolveStatus::Optimal {
        return Err(Error::Rounding(format!(
            "re-solve finished with status {:?}",
            sol.status
        )));
    }
    for at_optimum in [false, true] {
        if let Some(out) = round_at(cert, f, &sdp, &sol, lambda, at_optimum, schedule)? {
            return Ok(out);
        }
    }
    Err(Error::Rounding(format!(
        "no exact certificate at λ = {}; retry with λ − ε",
        crate::rational::render_rational(lambda)
    )))
}

/// `sos_lower_bound` followed by rounding; when rounding fails at the optimum,
/// retries at `λ − ε` for growing `ε`.
pub fn certify_lower_bound(f: &Polynomial, spec: &CatalogSpec, schedule: &[u64]) -> Result<(f64, Certificate)> {
    let (bound, cert) = sos_lower_bound(f, spec)?;
    let first = match round_certificate(&cert, f, schedule) {
        Ok(c) => return Ok((bound, c)),
        Err(e) => e,
    };
    for eps in [1e-6, 1e-4, 1e-2] {
        let lambda = floor_to_denominator(&from_f64_exact(bound - eps), 1_000_000);
        if let Ok(c) = round_certificate_at(&cert, f, &lambda, schedule) {
            return Ok((bound, c));
        }
    }
    Err(first)
}

fn lambda_candidates(best: f64) -> Vec<(Q, bool)> {
    let mut out: Vec<(Q, bool)> = Vec::new();
    let exact = from_f64_exact(best);
    let snap = best_approximation(&exact, &BigInt::from(SNAP_DENOMINATOR));
    if (to_f64(&snap) - best).abs() <= SNAP_TOL * (1.0 + best.abs()) {
        out.push((snap, true));
    }
    for den in LAMBDA_GRIDS {
        let c = floor_to_denominator(&exact, den);
        if !out.iter().any(|(v, _)| *v == c) {
            out.push((c, false));
        }
    }
    out
}

fn exact_solution(cert: &Certificate, f: &Polynomial, sol: &SdpSolution) -> Option<Certificate> {
    let (blocks, free) = sol.exact.as_ref()?;
    let out = cert.with_grams(
        Value::Exact(free[0].clone()),
        blocks.iter().cloned().map(Gram::Exact).collect(),
        None,
    );
    verify_certificate(&out, f).valid.then_some(out)
}

fn round_at(
    cert: &Certificate,
    f: &Polynomial,
    sdp: &BlockSDP,
    sol: &SdpSolution,
    lambda: &Q,
    at_optimum: bool,
    schedule: &[u64],
) -> Result<Option<Certificate>> {
    let fixed = sdp.fix_free(std::slice::from_ref(lambda))?;
    let mut face = sol.face.clone();
    if at_optimum {
        // At the optimal λ the feasible set shrinks to the face exposed by the
        // optimal dual slack.
        match expose_face(&face.restrict(&fixed), &sol.slack)? {
            Some(exposed) => face = face.refined(exposed.bases()),
            None => return Ok(None),
        }
    }
    let restricted = face.restrict(&fixed);
    if restricted.blocks.is_empty() {
        return Ok(None);
    }
    let central = match solve(&restricted, &SolveOptions::default()) {
        Ok(s) if s.status == SolveStatus::Optimal => s,
        _ => return Ok(None),
    };
    let candidates: Vec<Vec<Mat<Q>>> = match &central.exact {
        Some((blocks, _)) => vec![face.lift_exact(blocks)],
        None => {
            let face = face.refined(central.face.bases());
            let program = face.restrict(&fixed);
            let sys = exact_system(&program)?;
            let index = EntryIndex::new(&program.blocks);
            let mut out = Vec::new();
            for &den in schedule {
                let values = flatten_rounded(&index, &central.reduced, den);
                let projected = sys.project(&values)?;
                let blocks = unflatten(&index, &projected);
                if blocks.iter().all(|b| psd_check(b) == PsdCheck::Psd) {
                    out.push(face.lift_exact(&blocks));
                    break;
                }
            }
            out
        }
    };
    for blocks in candidates {
        let out = cert.with_grams(
            Value::Exact(lambda.clone()),
            blocks.into_iter().map(Gram::Exact).collect(),
            None,
        );
        if verify_certificate(&out, f).valid {
            return Ok(Some(out));
        }
    }
    Ok(None)
}

fn flatten_rounded(index: &EntryIndex, blocks: &[DMatrix<f64>], den: u64) -> Vec<Q> {
    (0..index.len())
        .map(|k| {
            let (b, i, j) = index.position(k);
            approximate(blocks[b][(i, j)], den)
        })
        .collect()
}

fn unflatten(index: &EntryIndex, values: &[Q]) -> Vec<Mat<Q>> {
    let mut out: Vec<Mat<Q>> = index.sizes().iter().map(|&s| Mat::zeros(s, s)).collect();
    for (k, v) in values.iter().enumerate() {
        let (b, i, j) = index.position(k);
        out[b].set(i, j, v.clone());
        out[b].set(j, i, v.clone());
    }
    out
}
