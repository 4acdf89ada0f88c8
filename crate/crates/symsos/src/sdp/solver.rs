//! Primal-dual path-following interior-point method with Nesterov–Todd scaling and
//! Mehrotra predictor-corrector steps, on dense blocks.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::eliminate::{exact_system, prepare, FreeValue, Prepared};
use super::facial::{diverging, find_face, Face};
use super::{BlockSDP, EntryIndex, Sense};
use crate::error::{Error, Result};
use crate::linalg::{is_psd, Mat};
use crate::rational::{to_f64, Q};

/// Factor on `tol` accepted when the iteration cannot continue.
const NEAR_OPTIMAL: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Decided by exact arithmetic: the constraints admit no PSD point.
    Infeasible,
    /// The dual objective diverged.
    InfeasibleSuspect,
    /// The primal objective diverged.
    UnboundedSuspect,
    /// Internal: `solve` reports this as an error.
    MaxIterations,
    /// Internal: the iteration could not continue before reaching the tolerance;
    /// `solve` reports this as an error.
    Stalled,
}

/// Solution in terms of the original blocks and free variables.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SolveStatus,
    pub blocks: Vec<DMatrix<f64>>,
    pub free: Vec<f64>,
    /// Multipliers of the independent constraint rows left after preprocessing.
    pub duals: Vec<f64>,
    /// Dual slack blocks `Z = C − Aᵀy` in minimization form.
    pub slack: Vec<DMatrix<f64>>,
    /// Objective in the problem's own sense.
    pub objective: f64,
    pub dual_objective: f64,
    /// `|primal − dual| / (1 + |primal|)`.
    pub gap: f64,
    /// Largest absolute residual over the original constraints.
    pub residual: f64,
    pub iterations: usize,
    /// Present when the constraints fix a single point.
    pub exact: Option<(Vec<Mat<Q>>, Vec<Q>)>,
    /// Face the solution was computed on: `blocks[b] = B_b U B_bᵀ`.
    pub face: Face,
    /// Blocks `U` on the face, for original blocks of positive reduced size.
    pub reduced: Vec<DMatrix<f64>>,
}

impl SdpSolution {
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(crate::linalg::min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solve a block SDP. Linear constraints are reduced first; a problem whose
/// constraints determine a single point is decided exactly. For exact data, a
/// diverging dual is answered by facial reduction and a re-solve on the smaller face.
pub fn solve(sdp: &BlockSDP, opts: &SolveOptions) -> Result<SdpSolution> {
    if sdp.approximate {
        return solve_on_faces(sdp, opts, |_, _| Ok(None));
    }
    let cost_scale = cost_scale(sdp);
    solve_on_faces(sdp, opts, |face, sol| {
        let current = face.restrict(sdp);
        let sys = exact_system(&current)?;
        Ok(find_face(&current, &sys, &sol.slack, cost_scale).map(|k| face.refined(&k)))
    })
}

pub(crate) fn cost_scale(sdp: &BlockSDP) -> f64 {
    sdp.cost
        .entries
        .iter()
        .map(|t| to_f64(&t.coef).abs())
        .fold(0.0, f64::max)
}

/// Solve, and while the dual slack diverges ask `next_face` for a smaller face
/// containing every feasible point and re-solve there.
pub(crate) fn solve_on_faces(
    sdp: &BlockSDP,
    opts: &SolveOptions,
    mut next_face: impl FnMut(&Face, &SdpSolution) -> Result<Option<Face>>,
) -> Result<SdpSolution> {
    let scale = cost_scale(sdp);
    let mut face = Face::full(sdp);
    let mut sol = solve_once(sdp, opts)?;
    for _ in 0..MAX_FACE_STEPS {
        if sol.exact.is_some() || sol.status == SolveStatus::Infeasible {
            break;
        }
        if sol.status == SolveStatus::Optimal && !diverging(&sol.slack, scale) {
            break;
        }
        let Some(next) = next_face(&face, &sol)? else {
            break;
        };
        sol = solve_once(&next.restrict(sdp), opts)?;
        face = next;
    }
    if matches!(sol.status, SolveStatus::MaxIterations | SolveStatus::Stalled) {
        return Err(Error::Solver(breakdown_dump(&sol)));
    }
    sol.reduced = sol.blocks.clone();
    sol.blocks = face.lift_f64(&sol.reduced);
    if let Some((blocks, free)) = sol.exact.take() {
        sol.exact = Some((face.lift_exact(&blocks), free));
    }
    sol.face = face;
    Ok(sol)
}

const MAX_FACE_STEPS: usize = 8;

fn breakdown_dump(sol: &SdpSolution) -> String {
    let reason = match sol.status {
        SolveStatus::MaxIterations => "iteration limit reached",
        _ => "numerical breakdown",
    };
    let eig = |ms: &[DMatrix<f64>]| -> String {
        ms.iter()
            .map(|m| {
                if m.nrows() == 0 {
                    return "[]".to_string();
                }
                let e = m.symmetric_eigenvalues();
                format!("[{:.3e}, {:.3e}]", e.min(), e.max())
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!(
        "{reason} after {} iterations: primal {:.10e}, dual {:.10e}, gap {:.3e}, residual {:.3e}, \
         eigenvalue ranges X {}, Z {}",
        sol.iterations,
        sol.objective,
        sol.dual_objective,
        sol.gap,
        sol.residual,
        eig(&sol.blocks),
        eig(&sol.slack)
    )
}

fn solve_once(sdp: &BlockSDP, opts: &SolveOptions) -> Result<SdpSolution> {
    let prep = prepare(sdp)?;
    let sign = match sdp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    if let Some((x, y)) = &prep.exact_point {
        let blocks = exact_blocks(&prep.index, x);
        let feasible = blocks.iter().all(is_psd);
        let fblocks: Vec<DMatrix<f64>> = blocks.iter().map(crate::linalg::to_f64_mat).collect();
        let free: Vec<f64> = y.iter().map(to_f64).collect();
        let objective = sdp.cost.evaluate_f64(&fblocks, &free);
        return Ok(SdpSolution {
            status: if feasible {
                SolveStatus::Optimal
            } else {
                SolveStatus::Infeasible
            },
            residual: residual(sdp, &fblocks, &free),
            blocks: fblocks,
            free,
            duals: Vec::new(),
            slack: Vec::new(),
            objective,
            dual_objective: objective,
            gap: 0.0,
            iterations: 0,
            exact: Some((blocks, y.clone())),
            reduced: Vec::new(),
            face: Face::full(sdp),
        });
    }
    let problem = NumericProblem::from_prepared(&prep);
    let out = interior_point(&problem, opts)?;
    let blocks = out.x.clone();
    let entries = flatten(&prep.index, &blocks);
    let free: Vec<f64> = prep
        .free
        .iter()
        .map(|f| match f {
            FreeValue::Zero => 0.0,
            FreeValue::Affine { constant, terms } => constant - terms.iter().map(|(k, v)| v * entries[*k]).sum::<f64>(),
        })
        .collect();
    let mut status = out.status;
    if status == SolveStatus::Optimal && prep.unbounded_direction {
        status = SolveStatus::UnboundedSuspect;
    }
    let objective = sdp.cost.evaluate_f64(&blocks, &free);
    let dual_objective = sign * (out.dobj + prep.cost_constant);
    Ok(SdpSolution {
        status,
        residual: residual(sdp, &blocks, &free),
        gap: (objective - dual_objective).abs() / (1.0 + objective.abs()),
        blocks,
        free,
        duals: out.y.iter().copied().collect(),
        slack: out.z,
        objective,
        dual_objective,
        iterations: out.iterations,
        exact: None,
        reduced: Vec::new(),
        face: Face::full(sdp),
    })
}

fn exact_blocks(index: &EntryIndex, x: &[Q]) -> Vec<Mat<Q>> {
    let mut blocks: Vec<Mat<Q>> = index.sizes().iter().map(|&s| Mat::zeros(s, s)).collect();
    for (k, v) in x.iter().enumerate() {
        let (b, i, j) = index.position(k);
        blocks[b].set(i, j, v.clone());
        blocks[b].set(j, i, v.clone());
    }
    blocks
}

fn flatten(index: &EntryIndex, blocks: &[DMatrix<f64>]) -> Vec<f64> {
    (0..index.len())
        .map(|k| {
            let (b, i, j) = index.position(k);
            blocks[b][(i, j)]
        })
        .collect()
}

fn residual(sdp: &BlockSDP, blocks: &[DMatrix<f64>], free: &[f64]) -> f64 {
    sdp.constraints
        .iter()
        .map(|c| (c.form.evaluate_f64(blocks, free) - to_f64(&c.rhs)).abs())
        .fold(0.0, f64::max)
}

/// `⟨A_k, X⟩ = Σ coef · X_ij` over upper-triangle entries, with rows scaled to unit norm.
struct NumericProblem {
    sizes: Vec<usize>,
    rows: Vec<Vec<(usize, usize, usize, f64)>>,
    b: DVector<f64>,
    c: Vec<DMatrix<f64>>,
    row_scale: Vec<f64>,
}

impl NumericProblem {
    fn from_prepared(p: &Prepared) -> Self {
        let sizes = p.index.sizes().to_vec();
        let mut rows = Vec::with_capacity(p.rows.len());
        let mut b = Vec::with_capacity(p.rows.len());
        let mut row_scale = Vec::with_capacity(p.rows.len());
        for (terms, rhs) in &p.rows {
            let norm = terms.iter().map(|(_, v)| v * v).sum::<f64>().sqrt().max(1e-300);
            rows.push(
                terms
                    .iter()
                    .map(|(k, v)| {
                        let (blk, i, j) = p.index.position(*k);
                        (blk, i, j, v / norm)
                    })
                    .collect(),
            );
            b.push(rhs / norm);
            row_scale.push(norm);
        }
        let mut c: Vec<DMatrix<f64>> = sizes.iter().map(|&s| DMatrix::zeros(s, s)).collect();
        for (k, v) in p.cost.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            let (blk, i, j) = p.index.position(k);
            if i == j {
                c[blk][(i, i)] += v;
            } else {
                c[blk][(i, j)] += v / 2.0;
                c[blk][(j, i)] += v / 2.0;
            }
        }
        NumericProblem {
            sizes,
            rows,
            b: DVector::from_vec(b),
            c,
            row_scale,
        }
    }

    fn m(&self) -> usize {
        self.rows.len()
    }

    fn apply(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.rows
                .iter()
                .map(|r| r.iter().map(|&(b, i, j, v)| v * x[b][(i, j)]).sum::<f64>()),
        )
    }

    fn apply_row(&self, k: usize, x: &[DMatrix<f64>]) -> f64 {
        self.rows[k].iter().map(|&(b, i, j, v)| v * x[b][(i, j)]).sum()
    }

    fn adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.sizes.iter().map(|&s| DMatrix::zeros(s, s)).collect();
        for (k, r) in self.rows.iter().enumerate() {
            let yk = y[k];
            if yk == 0.0 {
                continue;
            }
            for &(b, i, j, v) in r {
                if i == j {
                    out[b][(i, i)] += yk * v;
                } else {
                    out[b][(i, j)] += yk * v / 2.0;
                    out[b][(j, i)] += yk * v / 2.0;
                }
            }
        }
        out
    }

    fn row_matrices(&self, k: usize) -> Vec<(usize, DMatrix<f64>)> {
        let mut by_block: Vec<(usize, DMatrix<f64>)> = Vec::new();
        for &(b, i, j, v) in &self.rows[k] {
            let pos = match by_block.iter().position(|(bb, _)| *bb == b) {
                Some(p) => p,
                None => {
                    by_block.push((b, DMatrix::zeros(self.sizes[b], self.sizes[b])));
                    by_block.len() - 1
                }
            };
            let m = &mut by_block[pos].1;
            if i == j {
                m[(i, i)] += v;
            } else {
                m[(i, j)] += v / 2.0;
                m[(j, i)] += v / 2.0;
            }
        }
        by_block
    }
}

struct IpmOutput {
    x: Vec<DMatrix<f64>>,
    z: Vec<DMatrix<f64>>,
    y: DVector<f64>,
    dobj: f64,
    status: SolveStatus,
    iterations: usize,
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    inner(a, a).sqrt()
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Nesterov–Todd scaling of one block: `W = G Gᵀ` with `Gᵀ Z G = G⁻¹ X G⁻ᵀ = diag(d)`.
struct Scaling {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    w: DMatrix<f64>,
    d: DVector<f64>,
}

fn nt_scaling(x: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Scaling> {
    let lx = Cholesky::new(x.clone())?.l();
    let lz = Cholesky::new(z.clone())?.l();
    let svd = (lz.transpose() * &lx).svd(true, true);
    let v = svd.v_t?.transpose();
    let d = svd.singular_values;
    if d.iter().any(|&s| s <= 0.0 || !s.is_finite()) {
        return None;
    }
    let d_inv_sqrt = DMatrix::from_diagonal(&d.map(|s| 1.0 / s.sqrt()));
    let d_sqrt = DMatrix::from_diagonal(&d.map(f64::sqrt));
    let g = &lx * &v * d_inv_sqrt;
    let lx_inv = lx.clone().try_inverse()?;
    let g_inv = d_sqrt * v.transpose() * lx_inv;
    let w = &g * g.transpose();
    Some(Scaling { g, g_inv, w, d })
}

/// Largest `α ≤ 1/τ`-style step keeping `X + αΔX ⪰ 0`; `∞` if unrestricted.
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let Some(ch) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l_inv = match ch.l().try_inverse() {
        Some(m) => m,
        None => return 0.0,
    };
    let m = symmetrize(&(&l_inv * dx * l_inv.transpose()));
    let lmin = SymmetricEigen::new(m).eigenvalues.min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn interior_point(p: &NumericProblem, opts: &SolveOptions) -> Result<IpmOutput> {
    let m = p.m();
    let n_total: usize = p.sizes.iter().sum();
    let nf = n_total.max(1) as f64;
    let b_norm = p.b.norm();
    let c_norm = frob(&p.c);
    let xi = (10.0f64)
        .max(nf.sqrt())
        .max(p.b.iter().fold(0.0f64, |acc, v| acc.max(nf.sqrt() * (1.0 + v.abs()))));
    let eta = (10.0f64).max(nf.sqrt()).max(1.0 + c_norm);
    let mut x: Vec<DMatrix<f64>> = p.sizes.iter().map(|&s| DMatrix::identity(s, s) * xi).collect();
    let mut z: Vec<DMatrix<f64>> = p.sizes.iter().map(|&s| DMatrix::identity(s, s) * eta).collect();
    let mut y = DVector::zeros(m);
    // `A Aᵀ`, used to keep primal steps on the affine constraint set.
    let mut aat = DMatrix::<f64>::zeros(m, m);
    for l in 0..m {
        let mut e = DVector::zeros(m);
        e[l] = 1.0;
        let col = p.apply(&p.adjoint(&e));
        aat.set_column(l, &col);
    }
    let aat = Cholesky::new(symmetrize(&aat))
        .ok_or_else(|| Error::Solver("constraint rows are numerically dependent".into()))?;
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    let mut short_steps = 0;
    for iter in 0..opts.max_iter {
        iterations = iter;
        let ax = p.apply(&x);
        let rp = &p.b - &ax;
        let aty = p.adjoint(&y);
        let rd: Vec<DMatrix<f64>> = (0..p.sizes.len()).map(|k| &p.c[k] - &z[k] - &aty[k]).collect();
        let pobj = inner(&p.c, &x);
        let dobj = p.b.dot(&y);
        let mu = inner(&x, &z) / nf;
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = frob(&rd) / (1.0 + c_norm);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pinf <= opts.tol && dinf <= opts.tol && gap <= opts.tol {
            status = SolveStatus::Optimal;
            break;
        }
        if dobj > 1e10 * (1.0 + c_norm) && dinf < 1e-6 {
            status = SolveStatus::InfeasibleSuspect;
            break;
        }
        if pobj < -1e10 * (1.0 + b_norm) && pinf < 1e-6 {
            status = SolveStatus::UnboundedSuspect;
            break;
        }
        if n_total == 0 {
            status = if pinf <= opts.tol {
                SolveStatus::Optimal
            } else {
                SolveStatus::InfeasibleSuspect
            };
            break;
        }
        // Near the boundary the iterates may lose definiteness before the strict
        // tolerance is met; accept a slightly looser one there.
        let near_optimal = pinf.max(dinf).max(gap) <= NEAR_OPTIMAL * opts.tol;
        let scalings: Option<Vec<Scaling>> = x.iter().zip(&z).map(|(xb, zb)| nt_scaling(xb, zb)).collect();
        let Some(scalings) = scalings else {
            if near_optimal {
                status = SolveStatus::Optimal;
                break;
            }
            status = SolveStatus::Stalled;
            break;
        };
        // Schur complement M_kl = ⟨A_k, W A_l W⟩.
        let mut schur = DMatrix::<f64>::zeros(m, m);
        let mut wal: Vec<Vec<DMatrix<f64>>> = Vec::with_capacity(m);
        for l in 0..m {
            let mut full: Vec<DMatrix<f64>> = p.sizes.iter().map(|&s| DMatrix::zeros(s, s)).collect();
            for (b, al) in p.row_matrices(l) {
                full[b] = &scalings[b].w * al * &scalings[b].w;
            }
            wal.push(full);
        }
        for l in 0..m {
            for k in 0..=l {
                let v = p.apply_row(k, &wal[l]);
                schur[(k, l)] = v;
                schur[(l, k)] = v;
            }
        }
        let max_diag = (0..m).fold(0.0f64, |acc, i| acc.max(schur[(i, i)].abs())).max(1e-300);
        let chol = Cholesky::new(schur.clone()).or_else(|| {
            let mut reg = schur.clone();
            for i in 0..m {
                reg[(i, i)] += 1e-12 * max_diag;
            }
            Cholesky::new(reg)
        });
        let Some(chol) = chol else {
            if near_optimal {
                status = SolveStatus::Optimal;
                break;
            }
            status = SolveStatus::Stalled;
            break;
        };
        let w_rd_w: Vec<DMatrix<f64>> = scalings.iter().zip(&rd).map(|(s, r)| &s.w * r * &s.w).collect();
        let a_w_rd_w = p.apply(&w_rd_w);
        let direction = |h: &[DMatrix<f64>]| -> (Vec<DMatrix<f64>>, DVector<f64>, Vec<DMatrix<f64>>) {
            // Scaled complementarity: ΔX̃ + ΔZ̃ = R̃ with R̃_ij = 2 H_ij / (d_i + d_j).
            let gr: Vec<DMatrix<f64>> = scalings
                .iter()
                .zip(h)
                .map(|(s, hb)| {
                    let n = s.d.len();
                    let rt = DMatrix::from_fn(n, n, |i, j| 2.0 * hb[(i, j)] / (s.d[i] + s.d[j]));
                    &s.g * rt * s.g.transpose()
                })
                .collect();
            let rhs = &rp - p.apply(&gr) + &a_w_rd_w;
            let dy = chol.solve(&rhs);
            let atdy = p.adjoint(&dy);
            let dz: Vec<DMatrix<f64>> = rd.iter().zip(&atdy).map(|(r, a)| r - a).collect();
            let mut dx: Vec<DMatrix<f64>> = scalings
                .iter()
                .zip(&gr)
                .zip(&dz)
                .map(|((s, g), dzb)| symmetrize(&(g - &s.w * dzb * &s.w)))
                .collect();
            let fix = p.adjoint(&aat.solve(&(&rp - p.apply(&dx))));
            for (d, f) in dx.iter_mut().zip(&fix) {
                *d += f;
            }
            (dx, dy, dz)
        };
        let steps = |dx: &[DMatrix<f64>], dz: &[DMatrix<f64>]| -> (f64, f64) {
            let ap = x
                .iter()
                .zip(dx)
                .map(|(a, d)| max_step(a, d))
                .fold(f64::INFINITY, f64::min);
            let ad = z
                .iter()
                .zip(dz)
                .map(|(a, d)| max_step(a, d))
                .fold(f64::INFINITY, f64::min);
            (ap, ad)
        };
        // Predictor.
        let h_aff: Vec<DMatrix<f64>> = scalings
            .iter()
            .map(|s| DMatrix::from_diagonal(&s.d.map(|v| -v * v)))
            .collect();
        let (dx_a, _, dz_a) = direction(&h_aff);
        let (ap, ad) = steps(&dx_a, &dz_a);
        let ap_a = ap.min(1.0);
        let ad_a = ad.min(1.0);
        let x_a: Vec<DMatrix<f64>> = x.iter().zip(&dx_a).map(|(a, d)| a + d * ap_a).collect();
        let z_a: Vec<DMatrix<f64>> = z.iter().zip(&dz_a).map(|(a, d)| a + d * ad_a).collect();
        let mu_aff = inner(&x_a, &z_a) / nf;
        let sigma = (mu_aff / mu)
            .clamp(0.0, 1.0)
            .powi(3)
            .max(if pinf > 1e-3 { 0.1 } else { 0.0 });
        // Corrector with the second-order term.
        let h_corr: Vec<DMatrix<f64>> = scalings
            .iter()
            .zip(dx_a.iter().zip(&dz_a))
            .map(|(s, (dxa, dza))| {
                let xt = &s.g_inv * dxa * s.g_inv.transpose();
                let zt = s.g.transpose() * dza * &s.g;
                let n = s.d.len();
                let base = DMatrix::from_diagonal(&s.d.map(|v| sigma * mu - v * v));
                base - symmetrize(&(xt * zt)) * (n > 0) as u8 as f64
            })
            .collect();
        let (dx, dy, dz) = direction(&h_corr);
        let (ap, ad) = steps(&dx, &dz);
        let gamma = 0.9 + 0.09 * ap_a.min(ad_a);
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        for (a, d) in x.iter_mut().zip(&dx) {
            *a += d * ap;
            *a = symmetrize(a);
        }
        for (a, d) in z.iter_mut().zip(&dz) {
            *a += d * ad;
            *a = symmetrize(a);
        }
        y += dy * ad;
        iterations = iter + 1;
        short_steps = if ap.max(ad) < 1e-6 { short_steps + 1 } else { 0 };
        if short_steps >= 5 {
            status = SolveStatus::Stalled;
            break;
        }
        if !mu.is_finite() {
            return Err(Error::Solver(format!(
                "numerical breakdown at iteration {iter}: mu not finite"
            )));
        }
    }
    // Undo the row scaling on the multipliers.
    let y_unscaled = DVector::from_iterator(m, y.iter().zip(&p.row_scale).map(|(v, s)| v / s));
    let dobj = p.b.dot(&y);
    Ok(IpmOutput {
        x,
        z,
        y: y_unscaled,
        dobj,
        status,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::sdp::{BlockSpec, Constraint, EntryTerm, LinearForm};

    fn one_block(size: usize) -> BlockSDP {
        BlockSDP::new(
            vec![BlockSpec {
                name: "X".into(),
                size,
                weight: 1,
            }],
            vec![],
        )
    }

    #[test]
    fn scalar_equality() {
        let mut sdp = one_block(1);
        let e = EntryTerm {
            block: 0,
            row: 0,
            col: 0,
            coef: q(1),
        };
        sdp.constraints.push(Constraint {
            form: LinearForm {
                entries: vec![e.clone()],
                free: vec![],
            },
            rhs: q(3),
        });
        sdp.cost = LinearForm {
            entries: vec![e],
            free: vec![],
        };
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!(sol.exact.is_some());
    }

    #[test]
    fn trace_minimum_is_cone_vertex() {
        let mut sdp = one_block(3);
        sdp.cost = LinearForm {
            entries: (0..3)
                .map(|i| EntryTerm {
                    block: 0,
                    row: i,
                    col: i,
                    coef: q(1),
                })
                .collect(),
            free: vec![],
        };
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.objective.abs() < 1e-7);
    }

    #[test]
    fn two_by_two_with_coupling() {
        // minimize X11 + X22 subject to X12 = 1: optimum 2 at [[1,1],[1,1]].
        let mut sdp = one_block(2);
        sdp.constraints.push(Constraint {
            form: LinearForm {
                entries: vec![EntryTerm {
                    block: 0,
                    row: 0,
                    col: 1,
                    coef: q(1),
                }],
                free: vec![],
            },
            rhs: q(1),
        });
        sdp.cost = LinearForm {
            entries: (0..2)
                .map(|i| EntryTerm {
                    block: 0,
                    row: i,
                    col: i,
                    coef: q(1),
                })
                .collect(),
            free: vec![],
        };
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-7, "{}", sol.objective);
        assert!(sol.residual < 1e-7);
    }

    #[test]
    fn exact_point_outside_cone() {
        let mut sdp = one_block(1);
        sdp.constraints.push(Constraint {
            form: LinearForm {
                entries: vec![EntryTerm {
                    block: 0,
                    row: 0,
                    col: 0,
                    coef: q(1),
                }],
                free: vec![],
            },
            rhs: q(-1),
        });
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn free_variable_maximized() {
        // maximize t subject to X + t = 5, X ⪰ 0: t = 5.
        let mut sdp = BlockSDP::new(
            vec![BlockSpec {
                name: "X".into(),
                size: 2,
                weight: 1,
            }],
            vec!["t".into()],
        );
        sdp.constraints.push(Constraint {
            form: LinearForm {
                entries: vec![EntryTerm {
                    block: 0,
                    row: 0,
                    col: 0,
                    coef: q(1),
                }],
                free: vec![(0, q(1))],
            },
            rhs: q(5),
        });
        sdp.constraints.push(Constraint {
            form: LinearForm {
                entries: vec![EntryTerm {
                    block: 0,
                    row: 1,
                    col: 1,
                    coef: q(1),
                }],
                free: vec![],
            },
            rhs: q(1),
        });
        sdp.cost = LinearForm {
            entries: vec![],
            free: vec![(0, q(1))],
        };
        sdp.sense = Sense::Maximize;
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 5.0).abs() < 1e-6, "{}", sol.objective);
        assert!((sol.free[0] - 5.0).abs() < 1e-6);
    }

    #[test]
    fn dual_divergence_flags_infeasibility() {
        // X11 + X22 = -1 has no PSD solution but leaves two degrees of freedom.
        let mut sdp = one_block(2);
        sdp.constraints.push(Constraint {
            form: LinearForm {
                entries: vec![
                    EntryTerm {
                        block: 0,
                        row: 0,
                        col: 0,
                        coef: q(1),
                    },
                    EntryTerm {
                        block: 0,
                        row: 1,
                        col: 1,
                        coef: q(1),
                    },
                ],
                free: vec![],
            },
            rhs: q(-1),
        });
        let sol = solve(&sdp, &SolveOptions::default()).unwrap();
        assert_ne!(sol.status, SolveStatus::Optimal);
    }
}
