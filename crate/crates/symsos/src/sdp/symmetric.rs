//! Solving an invariant Gram program through its symmetry-adapted restriction.

use nalgebra::DMatrix;

use super::eliminate::exact_system;
use super::facial::{find_face, Face};
use super::solver::{cost_scale, solve_on_faces};
use super::{restrict_invariant, BlockSDP, SdpSolution, SolveOptions};
use crate::error::Result;
use crate::isotypic::{InducedRep, SymmetryAdaptedBasis};
use crate::linalg::{to_f64_mat, Mat};
use crate::rational::from_f64_exact;

/// Singular values below this fraction of the largest count as zero when mapping
/// a face into a block.
const RANK_TOL: f64 = 1e-9;

/// Restrict `sdp` (one invariant block) by `basis` and solve the result.
///
/// The restricted data are floating point, so faces are not read off them.
/// Instead a diverging reduced dual slack is lifted to the original block,
/// certified there as a face of the exact program, and mapped back into each
/// block through the basis. Returns the restricted program with its solution.
pub fn solve_invariant(
    sdp: &BlockSDP,
    rep: &InducedRep,
    basis: &SymmetryAdaptedBasis,
    opts: &SolveOptions,
) -> Result<(BlockSDP, SdpSolution)> {
    let reduced = restrict_invariant(sdp, rep, basis)?;
    let scale = cost_scale(sdp);
    let n = rep.dim();
    let mut plain_face = Face::full(sdp);
    let sol = solve_on_faces(&reduced, opts, |face, sol| {
        let z = lift_slack(face, &sol.slack, basis, n);
        let current = plain_face.restrict(sdp);
        let v = to_f64_mat(&plain_face.bases()[0]);
        let zv = v.transpose() * z * &v;
        let sys = exact_system(&current)?;
        let Some(kernels) = find_face(&current, &sys, &[zv], scale) else {
            return Ok(None);
        };
        plain_face = plain_face.refined(&kernels);
        Ok(Some(block_face(&to_f64_mat(&plain_face.bases()[0]), basis)))
    })?;
    Ok((reduced, sol))
}

/// `Σ_b Σ_c T_bc (K_b Z_b K_bᵀ) T_bcᵀ` for slack blocks `Z_b` on the face `K`.
fn lift_slack(face: &Face, slack: &[DMatrix<f64>], basis: &SymmetryAdaptedBasis, n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::<f64>::zeros(n, n);
    let mut it = slack.iter();
    for (b, k) in face.bases().iter().enumerate() {
        if k.cols() == 0 {
            continue;
        }
        let z = it.next().expect("slack per kept block");
        let k = to_f64_mat(k);
        let y = &k * z * k.transpose();
        for c in 0..basis.blocks()[b].copies {
            let t = basis.columns(b, c);
            out += &t * &y * t.transpose();
        }
    }
    out
}

/// Per block, an orthonormal basis of the range of `T_b0ᵀ V`.
fn block_face(v: &DMatrix<f64>, basis: &SymmetryAdaptedBasis) -> Face {
    let bases = (0..basis.blocks().len())
        .map(|b| {
            let m = basis.columns(b, 0).transpose() * v;
            let svd = m.clone().svd(true, false);
            let u = svd.u.expect("left singular vectors");
            let top = svd.singular_values.amax();
            let keep: Vec<usize> = (0..svd.singular_values.len())
                .filter(|&i| svd.singular_values[i] > RANK_TOL * top)
                .collect();
            Mat::from_fn(m.nrows(), keep.len(), |i, j| from_f64_exact(u[(i, keep[j])]))
        })
        .collect();
    Face::from_bases(bases)
}
