//! Induced representations on spaces of monomials, Reynolds averaging, and
//! symmetry-adapted bases that block-diagonalize invariant matrices.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::cyclotomic::Cyc;
use crate::error::{Error, Result};
use crate::grouprep::{GroupAction, IrrepCatalog, IrrepKind, RealIrrep};
use crate::linalg::{Mat, Ring};
use crate::polyring::{monomial_vector, substitute_linear, Monomial, Polynomial};
use crate::rational::{q, to_f64, Q};

/// Tolerance on `‖TᵀT − I‖` entries for the floating-point basis.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Tolerance on off-block entries of `TᵀXT`, relative to `max(1, ‖X‖_max)`.
pub const OFF_BLOCK_TOL: f64 = 1e-10;

/// Square matrix stored by columns as `(row, value)` lists.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat {
    size: usize,
    cols: Vec<Vec<(usize, Q)>>,
}

impl SparseMat {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn column(&self, j: usize) -> &[(usize, Q)] {
        &self.cols[j]
    }

    pub fn trace(&self) -> Q {
        let mut t = Q::zero();
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                if *i == j {
                    t += v;
                }
            }
        }
        t
    }

    pub fn to_dense(&self) -> Mat<Q> {
        let mut m = Mat::zeros(self.size, self.size);
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                m[(*i, j)] = to_f64(v);
            }
        }
        m
    }
}

/// Action of a group on a space spanned by monomials, `ρ(g)p = p ∘ ϑ(g⁻¹)`.
#[derive(Clone, Debug)]
pub struct InducedRep {
    action: GroupAction,
    basis: Vec<Monomial>,
    matrices: Vec<SparseMat>,
}

impl InducedRep {
    /// Representation on the span of `basis`, which must be mapped into itself.
    pub fn new(action: &GroupAction, basis: Vec<Monomial>) -> Result<Self> {
        let n = action.n();
        if let Some(m) = basis.iter().find(|m| m.nvars() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.nvars(),
            });
        }
        let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut matrices = Vec::with_capacity(action.order());
        for g in 0..action.order() {
            let inv = action.element(action.inverse(g));
            let mut cols = Vec::with_capacity(basis.len());
            for m in &basis {
                let image = substitute_linear(&Polynomial::term(q(1), m.clone()), inv)?;
                let mut col = Vec::with_capacity(image.len());
                for (mono, c) in image.terms() {
                    let row = *index.get(mono).ok_or_else(|| {
                        Error::InvalidRepresentation("monomial span is not closed under the action".into())
                    })?;
                    col.push((row, c.clone()));
                }
                cols.push(col);
            }
            matrices.push(SparseMat {
                size: basis.len(),
                cols,
            });
        }
        Ok(InducedRep {
            action: action.clone(),
            basis,
            matrices,
        })
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix(&self, g: usize) -> &SparseMat {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[SparseMat] {
        &self.matrices
    }

    pub fn dense_matrices(&self) -> Vec<Mat<Q>> {
        self.matrices.iter().map(SparseMat::to_dense).collect()
    }
}

/// The induced representation on all monomials of degree at most `d`.
pub fn induced_representation(action: &GroupAction, d: u32) -> Result<InducedRep> {
    InducedRep::new(action, monomial_vector(action.n(), d))
}

/// Reynolds average `(1/|G|) Σ_g ρ(g)ᵀ X ρ(g)`, exact.
pub fn fixed_point_project(x: &Mat<Q>, rep: &InducedRep) -> Result<Mat<Q>> {
    let n = rep.dim();
    if x.rows() != n || x.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.rows(),
        });
    }
    let mut acc = Mat::<Q>::zeros(n, n);
    for r in &rep.matrices {
        // (ρᵀXρ)_{ab} = Σ ρ_{ia} X_{ij} ρ_{jb}.
        for a in 0..n {
            for b in 0..n {
                let mut s = Q::zero();
                for (i, va) in r.column(a) {
                    for (j, vb) in r.column(b) {
                        let xij = x.get(*i, *j);
                        if !xij.is_zero() {
                            s += va * xij * vb;
                        }
                    }
                }
                if !s.is_zero() {
                    let cur = acc.get(a, b) + &s;
                    acc.set(a, b, cur);
                }
            }
        }
    }
    Ok(acc.scale(&(Q::from_integer(1.into()) / q(rep.matrices.len() as i64))))
}

/// Floating-point Reynolds average.
pub fn fixed_point_project_f64(x: &DMatrix<f64>, rep: &InducedRep) -> Result<DMatrix<f64>> {
    let n = rep.dim();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.nrows(),
        });
    }
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for r in &rep.matrices {
        let d = r.to_f64();
        acc += d.transpose() * x * &d;
    }
    Ok(acc / rep.matrices.len() as f64)
}

/// Diagonal block of `TᵀXT` for one irrep: `size` columns repeated `copies` times.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockInfo {
    pub irrep: usize,
    pub label: String,
    pub size: usize,
    pub copies: usize,
    /// Multiplier of this block's inner products in the reduced objective.
    pub weight: usize,
    /// Column offset of each copy in `T`.
    pub offsets: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SymmetryAdaptedBasis {
    t: DMatrix<f64>,
    blocks: Vec<BlockInfo>,
    multiplicities: Vec<usize>,
}

impl SymmetryAdaptedBasis {
    pub fn t(&self) -> &DMatrix<f64> {
        &self.t
    }

    /// Nonempty blocks in catalog order.
    pub fn blocks(&self) -> &[BlockInfo] {
        &self.blocks
    }

    /// Block size per catalog irrep, zero when absent.
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Columns of `T` spanning copy `copy` of block `b`.
    pub fn columns(&self, b: usize, copy: usize) -> DMatrix<f64> {
        let info = &self.blocks[b];
        self.t.columns(info.offsets[copy], info.size).into_owned()
    }

    /// Largest entry of `|TᵀT − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.t.ncols();
        (self.t.transpose() * &self.t - DMatrix::<f64>::identity(n, n)).amax()
    }
}

/// Build `T` from the component projections `p_kl = (nᵢ/|G|) Σ_g ϑᵢ(g)_{kl} ρ(g)`.
///
/// Multiplicities come from exact traces of `p_11`; orthonormal bases of its image are
/// found by pivoted Gram–Schmidt in floating point and transported to the other copies
/// by `p_j1`. A complex-type irrep contributes its whole isotypic component as one
/// block of weight one.
pub fn symmetry_adapted_basis(rep: &InducedRep, catalog: &IrrepCatalog) -> Result<SymmetryAdaptedBasis> {
    if catalog.action.order() != rep.action.order() || catalog.action.n() != rep.action.n() {
        return Err(Error::InvalidRepresentation(
            "catalog does not match the induced representation".into(),
        ));
    }
    let n = rep.dim();
    let order = rep.matrices.len();
    let traces: Vec<Q> = rep.matrices.iter().map(SparseMat::trace).collect();
    let dense: Vec<DMatrix<f64>> = rep.matrices.iter().map(SparseMat::to_f64).collect();
    let mut columns: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    let mut multiplicities = Vec::with_capacity(catalog.irreps.len());
    for (idx, irrep) in catalog.irreps.iter().enumerate() {
        let ni = irrep.dim();
        let complex = irrep.kind == IrrepKind::ComplexType;
        if complex && ni != 2 {
            return Err(Error::UnsupportedCatalog(format!(
                "complex-type irrep {} of real dimension {ni}",
                irrep.label
            )));
        }
        let m = multiplicity(irrep, &traces)?;
        multiplicities.push(m);
        if m == 0 {
            continue;
        }
        let theta: Vec<DMatrix<f64>> = (0..order).map(|g| irrep.orthogonal_f64(g)).collect();
        let proj = |k: usize, l: usize| -> DMatrix<f64> {
            let mut p = DMatrix::<f64>::zeros(n, n);
            for g in 0..order {
                let w = if complex { theta[g].trace() } else { theta[g][(k, l)] };
                if w != 0.0 {
                    p += &dense[g] * w;
                }
            }
            let s = if complex { 1.0 } else { ni as f64 };
            p * (s / order as f64)
        };
        let p11 = proj(0, 0);
        let first = pivoted_gram_schmidt(&p11, m, &irrep.label)?;
        let copies = if complex { 1 } else { ni };
        let mut offsets = Vec::with_capacity(copies);
        offsets.push(columns.len());
        columns.extend(first.iter().cloned());
        for j in 1..copies {
            let pj1 = proj(j, 0);
            offsets.push(columns.len());
            for u in &first {
                columns.push(&pj1 * u);
            }
        }
        blocks.push(BlockInfo {
            irrep: idx,
            label: irrep.label.clone(),
            size: m,
            copies,
            weight: copies,
            offsets,
        });
    }
    if columns.len() != n {
        return Err(Error::InvalidRepresentation(format!(
            "isotypic dimensions sum to {}, expected {n}",
            columns.len()
        )));
    }
    let t = DMatrix::from_columns(&columns);
    let basis = SymmetryAdaptedBasis {
        t,
        blocks,
        multiplicities,
    };
    let defect = basis.orthogonality_defect();
    if defect > ORTHOGONALITY_TOL {
        return Err(Error::InvalidRepresentation(format!(
            "symmetry-adapted basis is not orthogonal (defect {defect:e})"
        )));
    }
    Ok(basis)
}

/// Number of copies of `irrep` in a representation with the given traces, from
/// exact character sums. For a complex-type irrep this is twice the complex
/// multiplicity, the size of its single block.
fn multiplicity(irrep: &RealIrrep, traces: &[Q]) -> Result<usize> {
    let order = traces.len();
    let complex = irrep.kind == IrrepKind::ComplexType;
    let ni = irrep.dim();
    let mut tr = Cyc::r_zero();
    for (g, t) in traces.iter().enumerate() {
        if t.is_zero() {
            continue;
        }
        let w = if complex {
            irrep.character(g)
        } else {
            irrep.matrices[g].get(0, 0).clone()
        };
        tr = tr.r_add(&w.r_mul(&Cyc::rational(t.clone())));
    }
    let scale = if complex {
        Q::new(1.into(), (order as i64).into())
    } else {
        Q::new((ni as i64).into(), (order as i64).into())
    };
    let m = tr
        .as_rational()
        .map(|v| v * &scale)
        .filter(|v| v.is_integer() && *v >= Q::zero())
        .ok_or_else(|| {
            Error::InvalidRepresentation(format!(
                "projection trace for {} is not a non-negative integer",
                irrep.label
            ))
        })?
        .to_integer();
    Ok(m.try_into().expect("small multiplicity"))
}

/// Block structure of `symmetry_adapted_basis(rep, catalog)` from exact traces
/// alone, without forming any projection.
pub fn isotypic_census(rep: &InducedRep, catalog: &IrrepCatalog) -> Result<Vec<BlockInfo>> {
    if catalog.action.order() != rep.action.order() || catalog.action.n() != rep.action.n() {
        return Err(Error::InvalidRepresentation(
            "catalog does not match the induced representation".into(),
        ));
    }
    let traces: Vec<Q> = rep.matrices.iter().map(SparseMat::trace).collect();
    let mut out = Vec::new();
    let mut at = 0;
    for (idx, irrep) in catalog.irreps.iter().enumerate() {
        let m = multiplicity(irrep, &traces)?;
        if m == 0 {
            continue;
        }
        let copies = if irrep.kind == IrrepKind::ComplexType {
            1
        } else {
            irrep.dim()
        };
        let offsets = (0..copies).map(|j| at + j * m).collect();
        at += copies * m;
        out.push(BlockInfo {
            irrep: idx,
            label: irrep.label.clone(),
            size: m,
            copies,
            weight: copies,
            offsets,
        });
    }
    if at != rep.dim() {
        return Err(Error::InvalidRepresentation(format!(
            "isotypic dimensions sum to {at}, expected {}",
            rep.dim()
        )));
    }
    Ok(out)
}

/// Orthonormal basis of the column space of a projector with known rank.
fn pivoted_gram_schmidt(p: &DMatrix<f64>, rank: usize, label: &str) -> Result<Vec<DVector<f64>>> {
    let n = p.ncols();
    let mut residual: Vec<DVector<f64>> = (0..n).map(|j| p.column(j).into_owned()).collect();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(rank);
    let scale = p.amax().max(1.0);
    for _ in 0..rank {
        let (best, norm) = residual
            .iter()
            .enumerate()
            .map(|(j, r)| (j, r.norm()))
            .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 + 1e-12 { cur } else { acc });
        if norm < 1e-8 * scale {
            return Err(Error::InvalidRepresentation(format!(
                "projection for {label} has rank below its trace"
            )));
        }
        let mut u = residual[best].clone() / norm;
        // Second pass against the accepted vectors for accuracy.
        for v in &basis {
            let c = v.dot(&u);
            u -= v * c;
        }
        u /= u.norm();
        for r in residual.iter_mut() {
            let c = u.dot(r);
            *r -= &u * c;
        }
        basis.push(u);
    }
    let left = residual.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if left > 1e-8 * scale {
        return Err(Error::InvalidRepresentation(format!(
            "projection for {label} has rank above its trace"
        )));
    }
    Ok(basis)
}

/// Representative blocks of `TᵀXT` together with the largest off-block or
/// copy-mismatch entry.
#[derive(Clone, Debug)]
pub struct BlockDiagonal {
    pub blocks: Vec<DMatrix<f64>>,
    pub residual: f64,
}

pub fn block_diagonalize(x: &DMatrix<f64>, basis: &SymmetryAdaptedBasis) -> Result<BlockDiagonal> {
    let n = basis.t.nrows();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.nrows(),
        });
    }
    let y = basis.t.transpose() * x * &basis.t;
    let mut mask = DMatrix::<bool>::from_element(n, n, false);
    let mut residual: f64 = 0.0;
    let mut reps = Vec::with_capacity(basis.blocks.len());
    for info in &basis.blocks {
        let first = info.offsets[0];
        let rep = y.view((first, first), (info.size, info.size)).into_owned();
        for &off in &info.offsets {
            let copy = y.view((off, off), (info.size, info.size));
            residual = residual.max((copy - &rep).amax());
            for i in 0..info.size {
                for j in 0..info.size {
                    mask[(off + i, off + j)] = true;
                }
            }
        }
        reps.push(rep);
    }
    for i in 0..n {
        for j in 0..n {
            if !mask[(i, j)] {
                residual = residual.max(y[(i, j)].abs());
            }
        }
    }
    let tol = OFF_BLOCK_TOL * x.amax().max(1.0);
    if residual > tol {
        return Err(Error::OffBlockResidual { residual });
    }
    Ok(BlockDiagonal { blocks: reps, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouprep::{catalog, close_group, permutation_matrix, CatalogSpec, DEFAULT_MAX_ORDER};
    use crate::polyring::monomials_of_degree;
    use crate::rational::qr;

    fn cat(name: &str) -> IrrepCatalog {
        catalog(&CatalogSpec::parse(name).unwrap()).unwrap()
    }

    #[test]
    fn degree_one_is_constant_plus_action() {
        let d4 = cat("dihedral:4");
        let rep = induced_representation(&d4.action, 1).unwrap();
        for g in 0..d4.action.order() {
            let m = rep.matrix(g).to_dense();
            assert_eq!(*m.get(0, 0), q(1));
            let inv = d4.action.element(d4.action.inverse(g));
            // Column for x_j holds the coefficients of (ϑ(g⁻¹)x)_j.
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(m.get(1 + i, 1 + j), inv.get(j, i));
                }
            }
        }
    }

    #[test]
    fn c2_on_the_line() {
        let g = close_group(&[Mat::from_rows(vec![vec![q(-1)]])], DEFAULT_MAX_ORDER).unwrap();
        let rep = induced_representation(&g, 3).unwrap();
        let s = rep.matrix(1).to_dense();
        let diag: Vec<Q> = (0..4).map(|i| s.get(i, i).clone()).collect();
        assert_eq!(diag, vec![q(1), q(-1), q(1), q(-1)]);
    }

    #[test]
    fn d4_basis_segments() {
        let d4 = cat("dihedral:4");
        let rep = induced_representation(&d4.action, 3).unwrap();
        assert_eq!(rep.dim(), 10);
        let basis = symmetry_adapted_basis(&rep, &d4).unwrap();
        assert_eq!(basis.multiplicities(), &[2, 0, 1, 1, 3]);
        // v1 spans {1, x²+y²}: the columns vanish on odd monomials and on xy.
        let cols = basis.columns(0, 0);
        for (row, m) in rep.basis().iter().enumerate() {
            let odd = m.0.iter().any(|e| e % 2 == 1);
            if odd {
                assert!(cols.row(row).amax() < 1e-14);
            }
        }
        // x² and y² carry equal weight in every v1 column.
        let ix = rep.basis().iter().position(|m| m.0 == vec![2, 0]).unwrap();
        let iy = rep.basis().iter().position(|m| m.0 == vec![0, 2]).unwrap();
        for c in 0..2 {
            assert!((cols[(ix, c)] - cols[(iy, c)]).abs() < 1e-14);
        }
    }

    #[test]
    fn s2_on_last_two_coordinates() {
        let swap = permutation_matrix(&[0, 2, 1]);
        let g = close_group(&[swap], DEFAULT_MAX_ORDER).unwrap();
        let s2 = cat("symmetric:2");
        let cat = IrrepCatalog {
            name: "swap".into(),
            action: g.clone(),
            irreps: s2.irreps.clone(),
        };
        let rep = InducedRep::new(&g, monomials_of_degree(3, 1)).unwrap();
        let basis = symmetry_adapted_basis(&rep, &cat).unwrap();
        assert_eq!(basis.multiplicities(), &[2, 1]);
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let expect = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, a, a, 0.0, a, -a]);
        assert!((basis.t() - expect).amax() < 1e-15);
        let (av, bv, cv, dv) = (1.5, -0.25, 2.0, 0.75);
        let x = DMatrix::from_row_slice(3, 3, &[av, bv, bv, bv, cv, dv, bv, dv, cv]);
        let bd = block_diagonalize(&x, &basis).unwrap();
        let r2 = 2f64.sqrt();
        let b1 = DMatrix::from_row_slice(2, 2, &[av, r2 * bv, r2 * bv, cv + dv]);
        assert!((&bd.blocks[0] - b1).amax() < 1e-14);
        assert!((bd.blocks[1][(0, 0)] - (cv - dv)).abs() < 1e-14);
    }

    #[test]
    fn c2_matrix_average() {
        // Conjugation by the quarter turn acts on 2×2 symmetric matrices as the
        // order-two map [[a,b],[b,c]] ↦ [[c,−b],[−b,a]].
        let c4 = cat("cyclic:4");
        let rep = InducedRep::new(&c4.action, monomials_of_degree(2, 1)).unwrap();
        let x = Mat::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(3)]]);
        let avg = fixed_point_project(&x, &rep).unwrap();
        assert_eq!(avg, Mat::from_rows(vec![vec![q(2), q(0)], vec![q(0), q(2)]]));
        assert_eq!(fixed_point_project(&avg, &rep).unwrap(), avg);
    }

    #[test]
    fn trivial_group_basis_is_identity() {
        let t = cat("trivial:2");
        let rep = induced_representation(&t.action, 2).unwrap();
        let basis = symmetry_adapted_basis(&rep, &t).unwrap();
        assert_eq!(basis.multiplicities(), &[6]);
        assert!((basis.t() - DMatrix::<f64>::identity(6, 6)).amax() < 1e-15);
    }

    #[test]
    fn complex_type_block() {
        let c4 = cat("cyclic:4");
        let rep = induced_representation(&c4.action, 3).unwrap();
        let basis = symmetry_adapted_basis(&rep, &c4).unwrap();
        // 1, x²+y², x²−y² and xy, and six odd monomials in one realified block.
        assert_eq!(basis.multiplicities(), &[2, 2, 6]);
        assert_eq!(basis.blocks()[2].weight, 1);
        let x = Mat::from_fn(10, 10, |i, j| qr((i * j + 1) as i64, (i + j + 1) as i64));
        let avg = fixed_point_project(&x, &rep).unwrap();
        let bd = block_diagonalize(&crate::linalg::to_f64_mat(&avg), &basis).unwrap();
        assert!(bd.residual < 1e-12);
    }
}
