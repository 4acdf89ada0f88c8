//! Facial reduction. When the constraints force a common kernel on every feasible
//! point, the solver's dual iterates diverge along a matrix `W ⪰ 0` in the span of
//! the constraints. That direction is read off the dual slack, rounded, and
//! confirmed exactly; the blocks are then restricted to `ker W`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Zero};

use super::eliminate::{exact_system, ExactSystem};
use super::{BlockSDP, BlockSpec, Constraint, EntryTerm, LinearForm};
use crate::error::Result;
use crate::linalg::{is_psd, nullspace, rank, to_f64_mat, Mat};
use crate::rational::{approximate, Q};

/// Per-block bases `B_b` (`n_b × k_b`): feasible points are `X_b = B_b U_b B_bᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    bases: Vec<Mat<Q>>,
}

impl Face {
    pub fn full(sdp: &BlockSDP) -> Self {
        Face {
            bases: sdp.blocks.iter().map(|b| Mat::identity(b.size)).collect(),
        }
    }

    pub(crate) fn from_bases(bases: Vec<Mat<Q>>) -> Self {
        Face { bases }
    }

    pub fn bases(&self) -> &[Mat<Q>] {
        &self.bases
    }

    /// Reduced size of each original block.
    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Mat::cols).collect()
    }

    pub fn is_full(&self) -> bool {
        self.bases.iter().all(|b| b.rows() == b.cols())
    }

    /// The program in the reduced variables `U_b`; blocks of size zero are dropped.
    pub fn restrict(&self, sdp: &BlockSDP) -> BlockSDP {
        let kept: Vec<usize> = self.kept();
        let remap: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let blocks = kept
            .iter()
            .map(|&b| BlockSpec {
                name: sdp.blocks[b].name.clone(),
                size: self.bases[b].cols(),
                weight: sdp.blocks[b].weight,
            })
            .collect();
        let map_form = |form: &LinearForm| -> LinearForm {
            let mats = block_matrices(form, &sdp.blocks);
            let mut entries = Vec::new();
            for (&b, &nb) in &remap {
                let Some(a) = &mats[b] else { continue };
                let v = &self.bases[b];
                let reduced = v.transpose().mul(a).mul(v);
                entries.extend(matrix_terms(&reduced, nb));
            }
            LinearForm {
                entries,
                free: form.free.clone(),
            }
        };
        let mut out = BlockSDP::new(blocks, sdp.free.clone());
        out.sense = sdp.sense;
        out.approximate = sdp.approximate;
        out.cost = map_form(&sdp.cost);
        out.constraints = sdp
            .constraints
            .iter()
            .map(|c| Constraint {
                form: map_form(&c.form),
                rhs: c.rhs.clone(),
            })
            .collect();
        out
    }

    /// Original blocks whose reduced size is positive, in order.
    pub fn kept(&self) -> Vec<usize> {
        (0..self.bases.len()).filter(|&b| self.bases[b].cols() > 0).collect()
    }

    /// `B_b U_b B_bᵀ` for reduced blocks given in `kept` order.
    pub fn lift_f64(&self, reduced: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
        let mut it = reduced.iter();
        self.bases
            .iter()
            .map(|b| {
                if b.cols() == 0 {
                    return DMatrix::zeros(b.rows(), b.rows());
                }
                let bf = to_f64_mat(b);
                let u = it.next().expect("one reduced block per kept block");
                &bf * u * bf.transpose()
            })
            .collect()
    }

    pub fn lift_exact(&self, reduced: &[Mat<Q>]) -> Vec<Mat<Q>> {
        let mut it = reduced.iter();
        self.bases
            .iter()
            .map(|b| {
                if b.cols() == 0 {
                    return Mat::zeros(b.rows(), b.rows());
                }
                let u = it.next().expect("one reduced block per kept block");
                b.mul(u).mul(&b.transpose())
            })
            .collect()
    }

    /// Compose with kernels found on the reduced program (one per kept block).
    pub(crate) fn refined(&self, kernels: &[Mat<Q>]) -> Face {
        let mut it = kernels.iter();
        let bases = self
            .bases
            .iter()
            .map(|b| {
                if b.cols() == 0 {
                    b.clone()
                } else {
                    b.mul(it.next().expect("kernel per block"))
                }
            })
            .collect();
        Face { bases }
    }
}

/// Symmetric matrix `A_b` with `⟨A_b, X_b⟩` equal to the block-`b` part of `form`.
pub(crate) fn block_matrices(form: &LinearForm, blocks: &[BlockSpec]) -> Vec<Option<Mat<Q>>> {
    let mut out: Vec<Option<Mat<Q>>> = vec![None; blocks.len()];
    let half = Q::new(1.into(), 2.into());
    for t in &form.entries {
        let a = out[t.block].get_or_insert_with(|| Mat::zeros(blocks[t.block].size, blocks[t.block].size));
        if t.row == t.col {
            let v = a.get(t.row, t.row) + &t.coef;
            a.set(t.row, t.row, v);
        } else {
            let v = a.get(t.row, t.col) + &(&t.coef * &half);
            a.set(t.row, t.col, v.clone());
            a.set(t.col, t.row, v);
        }
    }
    out
}

/// Entry terms of `⟨A, X_block⟩` for a symmetric `A`.
pub(crate) fn matrix_terms(a: &Mat<Q>, block: usize) -> Vec<EntryTerm> {
    let mut out = Vec::new();
    for j in 0..a.cols() {
        for i in 0..=j {
            let v = a.get(i, j);
            if v.is_zero() {
                continue;
            }
            let coef = if i == j {
                v.clone()
            } else {
                v * Q::from_integer(2.into())
            };
            out.push(EntryTerm {
                block,
                row: i,
                col: j,
                coef,
            });
        }
    }
    out
}

/// Whether the dual slack shows a diverging direction worth reducing along.
pub(crate) fn diverging(slack: &[DMatrix<f64>], cost_scale: f64) -> bool {
    slack
        .iter()
        .filter(|z| z.nrows() > 0)
        .map(|z| z.symmetric_eigenvalues().max())
        .fold(0.0f64, f64::max)
        > DIVERGENCE * (1.0 + cost_scale)
}

const DIVERGENCE: f64 = 1e3;
const GAP: f64 = 1e2;
const DENOMINATORS: [u64; 5] = [1, 12, 120, 5040, 1_000_000];

/// Try to certify a face from the dual slack of a (possibly stalled) solve of `sdp`.
/// Returns kernel bases per block of `sdp` when at least one block shrinks.
pub(crate) fn find_face(
    sdp: &BlockSDP,
    sys: &ExactSystem,
    slack: &[DMatrix<f64>],
    cost_scale: f64,
) -> Option<Vec<Mat<Q>>> {
    find_face_above(sdp, sys, slack, DIVERGENCE * (1.0 + cost_scale))
}

/// Face of `sdp` exposed by an approximate optimal dual slack, e.g. `slack` of a
/// solution on the current face of a program that differs from `sdp` only in its
/// right-hand side. `None` when no rational exposing matrix is found.
pub fn expose_face(sdp: &BlockSDP, slack: &[DMatrix<f64>]) -> Result<Option<Face>> {
    let top = slack
        .iter()
        .filter(|z| z.nrows() > 0)
        .map(|z| z.symmetric_eigenvalues().max())
        .fold(0.0f64, f64::max);
    if top <= 0.0 {
        return Ok(None);
    }
    let sys = exact_system(sdp)?;
    Ok(find_face_above(sdp, &sys, slack, EXPOSED * top).map(|k| Face::full(sdp).refined(&k)))
}

/// Relative size below which optimal slack eigenvalues count as zero.
const EXPOSED: f64 = 1e-6;

/// Smallest eigenvalue above the largest relative gap (at least `GAP`) among
/// eigenvalues of all blocks that exceed `floor`.
fn dominant_cut(eigs: &[SymmetricEigen<f64, nalgebra::Dyn>], floor: f64) -> Option<f64> {
    let all = sorted_eigenvalues(eigs);
    let mut cut = None;
    let mut best = GAP;
    for r in 0..all.len() {
        if all[r] < floor {
            break;
        }
        let next = all.get(r + 1).copied().unwrap_or(0.0).max(1e-300);
        let ratio = all[r] / next;
        if ratio >= best {
            best = ratio;
            cut = Some(all[r]);
        }
    }
    cut
}

/// Ratio of the largest eigenvalue below `cut` to `cut`.
fn noise_level(eigs: &[SymmetricEigen<f64, nalgebra::Dyn>], cut: f64) -> f64 {
    let below = sorted_eigenvalues(eigs)
        .into_iter()
        .find(|&v| v < cut)
        .unwrap_or(0.0)
        .max(1e-300);
    below / cut
}

fn sorted_eigenvalues(eigs: &[SymmetricEigen<f64, nalgebra::Dyn>]) -> Vec<f64> {
    let mut all: Vec<f64> = eigs.iter().flat_map(|e| e.eigenvalues.iter().copied()).collect();
    all.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    all
}

fn find_face_above(sdp: &BlockSDP, sys: &ExactSystem, slack: &[DMatrix<f64>], floor: f64) -> Option<Vec<Mat<Q>>> {
    let eigs: Vec<SymmetricEigen<f64, nalgebra::Dyn>> = slack.iter().map(|z| SymmetricEigen::new(z.clone())).collect();
    let cut = dominant_cut(&eigs, floor)?;
    let noise = noise_level(&eigs, cut);
    let directions: Vec<DMatrix<f64>> = eigs
        .iter()
        .map(|e| {
            let cols: Vec<usize> = (0..e.eigenvalues.len()).filter(|&i| e.eigenvalues[i] >= cut).collect();
            DMatrix::from_fn(e.eigenvalues.len(), cols.len(), |i, j| e.eigenvectors[(i, cols[j])])
        })
        .collect();
    let echelons: Vec<DMatrix<f64>> = directions
        .iter()
        .map(|d| numeric_rref(&d.transpose(), (10.0 * noise).max(1e-9)))
        .collect();
    for den in DENOMINATORS {
        let ranges: Vec<Mat<Q>> = echelons
            .iter()
            .map(|e| Mat::from_fn(e.ncols(), e.nrows(), |i, j| approximate(e[(j, i)], den)))
            .collect();
        if let Some(kernels) = certify(sdp, sys, &ranges, slack) {
            return Some(kernels);
        }
    }
    None
}

/// Reduced row echelon form of `m`, treating entries below `tol` (relative) as zero.
fn numeric_rref(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = a.amax().max(1e-300);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol * scale {
            continue;
        }
        a.swap_rows(r, best);
        let inv = 1.0 / a[(r, c)];
        a.row_mut(r).scale_mut(inv);
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != 0.0 {
                    for j in 0..cols {
                        let v = a[(r, j)];
                        a[(i, j)] -= f * v;
                    }
                    a[(i, c)] = 0.0;
                }
            }
        }
        r += 1;
    }
    a.rows(0, r).into_owned()
}

/// Given candidate ranges `K_b` (columns), find `M_b ≻ 0` with `Σ_b ⟨K_b M_b K_bᵀ, X_b⟩`
/// implied to vanish on the feasible set. Returns the kernels of `K_bᵀ`.
fn certify(sdp: &BlockSDP, sys: &ExactSystem, ranges: &[Mat<Q>], slack: &[DMatrix<f64>]) -> Option<Vec<Mat<Q>>> {
    if ranges.iter().all(|k| k.cols() == 0) {
        return None;
    }
    if ranges.iter().any(|k| rank(&k.transpose()) != k.cols()) {
        return None;
    }
    // Unknowns: upper-triangle entries of each M_b.
    let mut unknowns: Vec<(usize, usize, usize)> = Vec::new();
    for (b, k) in ranges.iter().enumerate() {
        for c in 0..k.cols() {
            for a in 0..=c {
                unknowns.push((b, a, c));
            }
        }
    }
    let nfree = sdp.free.len();
    let two = Q::from_integer(2.into());
    let mut residuals: Vec<(BTreeMap<usize, Q>, Q)> = Vec::with_capacity(unknowns.len());
    for &(b, a, c) in &unknowns {
        let k = &ranges[b];
        let n = k.rows();
        let mut row = BTreeMap::new();
        for j in 0..n {
            for i in 0..=j {
                // (K E_ac Kᵀ)_ij with E_ac symmetric unit.
                let mut v = k.get(i, a) * k.get(j, c);
                if a != c {
                    v += k.get(i, c) * k.get(j, a);
                }
                if v.is_zero() {
                    continue;
                }
                let coef = if i == j { v } else { v * &two };
                row.insert(nfree + sys.index().index(b, i, j), coef);
            }
        }
        residuals.push(sys.reduce(row, Q::zero()));
    }
    // Linear conditions on the unknowns: every residual coordinate and rhs vanish.
    let mut keys: Vec<usize> = residuals.iter().flat_map(|(r, _)| r.keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    let nrows = keys.len() + 1;
    let cond = Mat::from_fn(nrows, unknowns.len(), |i, u| {
        if i < keys.len() {
            residuals[u].0.get(&keys[i]).cloned().unwrap_or_else(Q::zero)
        } else {
            residuals[u].1.clone()
        }
    });
    let admissible = nullspace(&cond);
    if admissible.is_empty() {
        return None;
    }
    // Numeric guess M_b ≈ K_b⁺ Z_b K_b⁺ᵀ, projected onto the admissible subspace.
    let mut guess = vec![0.0; unknowns.len()];
    for (b, k) in ranges.iter().enumerate() {
        if k.cols() == 0 {
            continue;
        }
        let kf = to_f64_mat(k);
        let pinv = (kf.transpose() * &kf).try_inverse()? * kf.transpose();
        let m = &pinv * &slack[b] * pinv.transpose();
        for (u, &(bb, a, c)) in unknowns.iter().enumerate() {
            if bb == b {
                guess[u] = m[(a, c)];
            }
        }
    }
    let basis = DMatrix::from_fn(unknowns.len(), admissible.len(), |u, j| {
        crate::rational::to_f64(&admissible[j][u])
    });
    let gram = basis.transpose() * &basis;
    let coeffs = gram.try_inverse()? * basis.transpose() * DMatrix::from_column_slice(unknowns.len(), 1, &guess);
    let scale = coeffs.amax().max(1e-300);
    let mut candidates: Vec<Vec<Q>> = Vec::new();
    for den in [1_000u64, 1_000_000] {
        candidates.push(
            (0..admissible.len())
                .map(|j| approximate(coeffs[j] / scale, den))
                .collect(),
        );
    }
    if admissible.len() == 1 {
        candidates.push(vec![Q::one()]);
        candidates.push(vec![-Q::one()]);
    }
    for c in candidates {
        let m: Vec<Q> = (0..unknowns.len())
            .map(|u| {
                admissible
                    .iter()
                    .zip(&c)
                    .fold(Q::zero(), |acc, (v, cj)| acc + &v[u] * cj)
            })
            .collect();
        let mut ok = true;
        for (b, k) in ranges.iter().enumerate() {
            let r = k.cols();
            if r == 0 {
                continue;
            }
            let mut mb = Mat::<Q>::zeros(r, r);
            for (u, &(bb, a, cc)) in unknowns.iter().enumerate() {
                if bb == b {
                    mb.set(a, cc, m[u].clone());
                    mb.set(cc, a, m[u].clone());
                }
            }
            if !is_psd(&mb) || rank(&mb) != r {
                ok = false;
                break;
            }
        }
        if ok {
            return Some(ranges.iter().map(kernel_basis).collect());
        }
    }
    None
}

/// Columns spanning `{v : Kᵀ v = 0}`.
fn kernel_basis(k: &Mat<Q>) -> Mat<Q> {
    let n = k.rows();
    if k.cols() == 0 {
        return Mat::identity(n);
    }
    let vs = nullspace(&k.transpose());
    Mat::from_fn(n, vs.len(), |i, j| vs[j][i].clone())
}
