//! SDP assembly: plain Gram matrices, invariant block programs built from `Π`, and
//! block restriction of a group-invariant SDP through a symmetry-adapted basis.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::Zero;

use super::eliminate::exact_system;
use super::{BlockSDP, BlockSpec, Constraint, EntryTerm, LinearForm, Sense};
use crate::equivariant::PiMatrix;
use crate::error::{Error, Result};
use crate::invariantring::{InvariantPoly, InvariantPresentation};
use crate::isotypic::{InducedRep, SparseMat, SymmetryAdaptedBasis};
use crate::linalg::Mat;
use crate::polyring::{monomial_vector, Degree, Monomial, Polynomial};
use crate::rational::{from_f64_exact, q, Q};

/// Gram program `f − λ = Yᵀ X Y` over the monomial vector `Y` of degree `deg f / 2`.
#[derive(Clone, Debug)]
pub struct GramAssembly {
    pub sdp: BlockSDP,
    pub monomials: Vec<Monomial>,
}

fn half_degree(f: &Polynomial) -> Result<u32> {
    let d = match f.degree() {
        Degree::NegInfinity => 0,
        Degree::Finite(d) => d,
    };
    if d % 2 == 1 {
        return Err(Error::OddDegree(d as usize));
    }
    Ok(d / 2)
}

/// One constraint per monomial of `Y Yᵀ`. With `with_lambda`, maximize the constant
/// shift `λ`; otherwise a feasibility problem.
pub fn assemble_gram(f: &Polynomial, with_lambda: bool) -> Result<GramAssembly> {
    let d = half_degree(f)?;
    assemble_gram_over(f, monomial_vector(f.nvars(), d), with_lambda)
}

/// Gram program over a given monomial vector.
pub fn assemble_gram_over(f: &Polynomial, monomials: Vec<Monomial>, with_lambda: bool) -> Result<GramAssembly> {
    let n = f.nvars();
    if let Some(m) = monomials.iter().find(|m| m.nvars() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.nvars(),
        });
    }
    let one = Monomial::one(n);
    let mut rows: BTreeMap<Monomial, Vec<EntryTerm>> = BTreeMap::new();
    for (m, _) in f.terms() {
        rows.entry(m.clone()).or_default();
    }
    if with_lambda {
        rows.entry(one.clone()).or_default();
    }
    for j in 0..monomials.len() {
        for i in 0..=j {
            let coef = if i == j { q(1) } else { q(2) };
            rows.entry(monomials[i].mul(&monomials[j]))
                .or_default()
                .push(EntryTerm {
                    block: 0,
                    row: i,
                    col: j,
                    coef,
                });
        }
    }
    let free = if with_lambda {
        vec!["lambda".to_string()]
    } else {
        vec![]
    };
    let mut sdp = BlockSDP::new(
        vec![BlockSpec {
            name: "gram".into(),
            size: monomials.len(),
            weight: 1,
        }],
        free,
    );
    for (m, entries) in rows {
        let lambda = if with_lambda && m == one {
            vec![(0, q(1))]
        } else {
            vec![]
        };
        sdp.constraints.push(Constraint {
            rhs: f.coeff(&m),
            form: LinearForm { entries, free: lambda },
        });
    }
    if with_lambda {
        sdp.cost = LinearForm {
            entries: vec![],
            free: vec![(0, q(1))],
        };
        sdp.sense = Sense::Maximize;
    }
    Ok(GramAssembly { sdp, monomials })
}

/// Rows of one invariant block: `(row k of Π, θ-exponent)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantBlockLayout {
    pub irrep: usize,
    pub label: String,
    pub rows: Vec<(usize, Vec<u32>)>,
}

#[derive(Clone, Debug)]
pub struct InvariantAssembly {
    pub sdp: BlockSDP,
    pub layouts: Vec<InvariantBlockLayout>,
}

/// Flatten per-row envelopes into block rows `(k, α)`, row by row.
pub fn envelope_rows(envelope: &[Vec<Vec<u32>>]) -> Vec<(usize, Vec<u32>)> {
    envelope
        .iter()
        .enumerate()
        .flat_map(|(k, exps)| exps.iter().map(move |a| (k, a.clone())))
        .collect()
}

/// Program `f − λ = Σᵢ ⟨Sᵢ, Πᵢ ⊗ θθᵀ⟩` with coefficients matched in the free module
/// `⊕_j η_j ℝ[θ]`.
///
/// `rows[i]` lists the block rows `(k, α)` of `pis[i]`: row `k` of `Π` times the
/// θ-monomial `θ^α`. Irreps with no rows are dropped.
pub fn assemble_invariant_sos(
    f: &InvariantPoly,
    pres: &InvariantPresentation,
    pis: &[PiMatrix],
    rows: &[Vec<(usize, Vec<u32>)>],
    with_lambda: bool,
) -> Result<InvariantAssembly> {
    if pis.len() != rows.len() {
        return Err(Error::DimensionMismatch {
            expected: pis.len(),
            got: rows.len(),
        });
    }
    let nt = pres.theta().len();
    let mut keys: BTreeMap<(usize, Monomial), Vec<EntryTerm>> = BTreeMap::new();
    for (j, part) in f.parts().iter().enumerate() {
        for (m, _) in part.terms() {
            keys.entry((j, m.clone())).or_default();
        }
    }
    let mut blocks = Vec::new();
    let mut layouts = Vec::new();
    for (pi, rows) in pis.iter().zip(rows) {
        if let Some((k, a)) = rows.iter().find(|(k, a)| *k >= pi.size() || a.len() != nt) {
            return Err(Error::Format {
                line: 0,
                msg: format!("row ({k}, {a:?}) does not fit Π for {}", pi.label()),
            });
        }
        if rows.is_empty() {
            continue;
        }
        let b = blocks.len();
        for c in 0..rows.len() {
            for r in 0..=c {
                let (k, a) = &rows[r];
                let (l, bexp) = &rows[c];
                let shift = Monomial(a.iter().zip(bexp).map(|(x, y)| x + y).collect());
                let mult = if r == c { q(1) } else { q(2) };
                for (j, part) in pi.entry(*k, *l).parts().iter().enumerate() {
                    for (m, coef) in part.terms() {
                        keys.entry((j, m.mul(&shift))).or_default().push(EntryTerm {
                            block: b,
                            row: r,
                            col: c,
                            coef: coef * &mult,
                        });
                    }
                }
            }
        }
        blocks.push(BlockSpec {
            name: pi.label().to_string(),
            size: rows.len(),
            weight: 1,
        });
        layouts.push(InvariantBlockLayout {
            irrep: pi.irrep(),
            label: pi.label().to_string(),
            rows: rows.clone(),
        });
    }
    if blocks.is_empty() {
        return Err(Error::NoCertificate("no envelope rows at this degree".into()));
    }
    let free = if with_lambda {
        vec!["lambda".to_string()]
    } else {
        vec![]
    };
    let mut sdp = BlockSDP::new(blocks, free);
    let one = Monomial::one(nt);
    if with_lambda {
        // Homogeneous rows never reach the constant term, which then pins λ.
        keys.entry((0, one.clone())).or_default();
    }
    for ((j, m), mut entries) in keys {
        merge_terms(&mut entries);
        let lambda = if with_lambda && j == 0 && m == one {
            vec![(0, q(1))]
        } else {
            vec![]
        };
        sdp.constraints.push(Constraint {
            rhs: f.part(j).coeff(&m),
            form: LinearForm { entries, free: lambda },
        });
    }
    if with_lambda {
        sdp.cost = LinearForm {
            entries: vec![],
            free: vec![(0, q(1))],
        };
        sdp.sense = Sense::Maximize;
    }
    Ok(InvariantAssembly { sdp, layouts })
}

fn merge_terms(entries: &mut Vec<EntryTerm>) {
    let mut acc: BTreeMap<(usize, usize, usize), Q> = BTreeMap::new();
    for t in entries.drain(..) {
        *acc.entry((t.block, t.row, t.col)).or_insert_with(Q::zero) += t.coef;
    }
    entries.extend(
        acc.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((block, row, col), coef)| EntryTerm { block, row, col, coef }),
    );
}

fn single_block(sdp: &BlockSDP, rep: &InducedRep) -> Result<()> {
    if sdp.blocks.len() != 1 || sdp.blocks[0].size != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            got: sdp.blocks.first().map_or(0, |b| b.size),
        });
    }
    Ok(())
}

/// Symmetric matrix of a linear form on one block: `⟨A, X⟩ = form(X)`.
fn form_matrix(form: &LinearForm, n: usize) -> Mat<Q> {
    let mut a = Mat::<Q>::zeros(n, n);
    let half = Q::new(1.into(), 2.into());
    for t in &form.entries {
        if t.row == t.col {
            let v = a.get(t.row, t.row) + &t.coef;
            a.set(t.row, t.row, v);
        } else {
            let h = &t.coef * &half;
            let v = a.get(t.row, t.col) + &h;
            a.set(t.row, t.col, v.clone());
            a.set(t.col, t.row, v);
        }
    }
    a
}

/// `M A Mᵀ` for a sparse `M`.
fn conjugate(m: &SparseMat, a: &Mat<Q>) -> Mat<Q> {
    let n = m.size();
    let mut am = Mat::<Q>::zeros(n, n);
    // (A Mᵀ)_{i,r} = Σ_c A_{i,c} M_{r,c}; column c of M holds M_{r,c}.
    for c in 0..n {
        for (r, v) in m.column(c) {
            for i in 0..n {
                let x = a.get(i, c);
                if !x.is_zero() {
                    let s = am.get(i, *r) + &(x * v);
                    am.set(i, *r, s);
                }
            }
        }
    }
    let mut out = Mat::<Q>::zeros(n, n);
    for c in 0..n {
        for (r, v) in m.column(c) {
            for j in 0..n {
                let x = am.get(c, j);
                if !x.is_zero() {
                    let s = out.get(*r, j) + &(v * x);
                    out.set(*r, j, s);
                }
            }
        }
    }
    out
}

/// Check that the feasible set and cost of a one-block SDP are preserved by
/// `X ↦ ρ(g) X ρ(g)ᵀ` for each generator `g`, exactly.
pub fn check_invariance(sdp: &BlockSDP, rep: &InducedRep) -> Result<()> {
    single_block(sdp, rep)?;
    let sys = exact_system(sdp)?;
    let n = rep.dim();
    let nfree = sdp.free.len();
    let cost = form_matrix(&sdp.cost, n);
    for (gi, &g) in rep.action().generator_indices().iter().enumerate() {
        let m = rep.matrix(g);
        if conjugate(m, &cost) != cost {
            return Err(Error::NotInvariant { generator: gi });
        }
        for c in &sdp.constraints {
            let image = conjugate(m, &form_matrix(&c.form, n));
            let mut row: BTreeMap<usize, Q> = BTreeMap::new();
            for (k, v) in &c.form.free {
                *row.entry(*k).or_insert_with(Q::zero) += v;
            }
            for j in 0..n {
                for i in 0..=j {
                    let v = image.get(i, j);
                    if v.is_zero() {
                        continue;
                    }
                    let coef = if i == j { v.clone() } else { v * q(2) };
                    *row.entry(nfree + sys.index().index(0, i, j)).or_insert_with(Q::zero) += coef;
                }
            }
            row.retain(|_, v| !v.is_zero());
            if !sys.implies(row, c.rhs.clone()) {
                return Err(Error::NotInvariant { generator: gi });
            }
        }
    }
    Ok(())
}

/// Restrict an invariant one-block SDP to the blocks of a symmetry-adapted basis:
/// `X = Σ_b Σ_copies T_c X_b T_cᵀ`. The transformed data are floating point, so the
/// result is marked approximate.
pub fn restrict_invariant(sdp: &BlockSDP, rep: &InducedRep, basis: &SymmetryAdaptedBasis) -> Result<BlockSDP> {
    check_invariance(sdp, rep)?;
    let n = rep.dim();
    if basis.t().nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: basis.t().nrows(),
        });
    }
    let blocks: Vec<BlockSpec> = basis
        .blocks()
        .iter()
        .map(|info| BlockSpec {
            name: info.label.clone(),
            size: info.size,
            weight: info.weight,
        })
        .collect();
    let copies: Vec<Vec<DMatrix<f64>>> = (0..blocks.len())
        .map(|b| (0..basis.blocks()[b].copies).map(|c| basis.columns(b, c)).collect())
        .collect();
    let transform = |form: &LinearForm| -> LinearForm {
        let a = crate::linalg::to_f64_mat(&form_matrix(form, n));
        let scale = a.amax().max(1.0);
        let mut entries = Vec::new();
        for (b, cols) in copies.iter().enumerate() {
            let mut acc = DMatrix::<f64>::zeros(blocks[b].size, blocks[b].size);
            for t in cols {
                acc += t.transpose() * &a * t;
            }
            for j in 0..blocks[b].size {
                for i in 0..=j {
                    let v = if i == j { acc[(i, i)] } else { acc[(i, j)] + acc[(j, i)] };
                    if v.abs() > 1e-12 * scale {
                        entries.push(EntryTerm {
                            block: b,
                            row: i,
                            col: j,
                            coef: from_f64_exact(v),
                        });
                    }
                }
            }
        }
        LinearForm {
            entries,
            free: form.free.clone(),
        }
    };
    let mut out = BlockSDP::new(blocks.clone(), sdp.free.clone());
    out.sense = sdp.sense;
    out.cost = transform(&sdp.cost);
    out.constraints = sdp
        .constraints
        .iter()
        .map(|c| Constraint {
            form: transform(&c.form),
            rhs: c.rhs.clone(),
        })
        .collect();
    out.approximate = true;
    Ok(out)
}

/// Reassemble the full matrix from representative blocks.
pub fn lift_reduced(blocks: &[DMatrix<f64>], basis: &SymmetryAdaptedBasis) -> Result<DMatrix<f64>> {
    if blocks.len() != basis.blocks().len() {
        return Err(Error::DimensionMismatch {
            expected: basis.blocks().len(),
            got: blocks.len(),
        });
    }
    let n = basis.t().nrows();
    let mut x = DMatrix::<f64>::zeros(n, n);
    for (b, xb) in blocks.iter().enumerate() {
        for c in 0..basis.blocks()[b].copies {
            let t = basis.columns(b, c);
            x += &t * xb * t.transpose();
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::{catalog_equivariants, monomial_envelope, pi_matrix};
    use crate::grouprep::{catalog, close_group, CatalogSpec};
    use crate::invariantring::{presentation, rewrite_in_invariants};
    use crate::isotypic::symmetry_adapted_basis;
    use crate::polyring::{parse_polynomial, VarNames};
    use crate::sdp::{solve, SolveOptions, SolveStatus};

    fn s3_quartic() -> Polynomial {
        let vars = VarNames::new(&["x", "y", "z"]);
        parse_polynomial("x^4 + y^4 + z^4 - 4*x*y*z + x + y + z", &vars).unwrap()
    }

    #[test]
    fn gram_affine_dimension() {
        let g = assemble_gram(&s3_quartic(), true).unwrap();
        assert_eq!(g.monomials.len(), 10);
        assert_eq!(g.sdp.entry_count(), 55);
        assert_eq!(g.sdp.constraints.len(), 35);
        assert_eq!(g.sdp.affine_dimension().unwrap(), 20);
    }

    fn invariant_program(spec: &str, f: &Polynomial, homogeneous: bool) -> InvariantAssembly {
        let spec = CatalogSpec::parse(spec).unwrap();
        let cat = catalog(&spec).unwrap();
        let pres = presentation(&spec).unwrap();
        let bases = catalog_equivariants(&spec, &cat, &pres, None).unwrap();
        let pis: Vec<PiMatrix> = bases.iter().map(|b| pi_matrix(b, &pres).unwrap()).collect();
        let target = f.degree_or_zero();
        let envs: Vec<_> = pis
            .iter()
            .map(|p| envelope_rows(&monomial_envelope(&pres, p, target, homogeneous)))
            .collect();
        let inv = rewrite_in_invariants(f, &pres).unwrap();
        assemble_invariant_sos(&inv, &pres, &pis, &envs, true).unwrap()
    }

    #[test]
    fn s3_invariant_blocks() {
        let a = invariant_program("symmetric:3", &s3_quartic(), false);
        let sizes: Vec<usize> = a.sdp.blocks.iter().map(|b| b.size).collect();
        assert_eq!(sizes, vec![4, 3]);
        assert_eq!(a.sdp.affine_dimension().unwrap(), 5);
        let sol = solve(&a.sdp, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective + 2.112913882).abs() < 1e-6, "{}", sol.objective);
    }

    #[test]
    fn d4_block_sizes_and_bound() {
        let vars = VarNames::new(&["x", "y"]);
        let f = parse_polynomial(
            "x^6 + y^6 - x^4*y^2 - x^2*y^4 - x^4 - y^4 - x^2 - y^2 + 3*x^2*y^2 + 1",
            &vars,
        )
        .unwrap();
        let a = invariant_program("dihedral:4", &f, false);
        let sizes: Vec<usize> = a.sdp.blocks.iter().map(|b| b.size).collect();
        assert_eq!(sizes, vec![2, 1, 1, 3]);
        let sol = solve(&a.sdp, &SolveOptions::default()).unwrap();
        assert!((sol.objective + 3825.0 / 4096.0).abs() < 1e-6, "{}", sol.objective);
    }

    #[test]
    fn restriction_of_two_variable_example() {
        // minimize X11 + X22 over 3×3 X with X12 = X13 and X11 = 1, invariant under
        // swapping the last two indices.
        let spec = CatalogSpec::parse("symmetric:2").unwrap();
        let cat = catalog(&spec).unwrap();
        let s2 = close_group(&spec.generators(), 10).unwrap();
        let rep = InducedRep::new(&s2, monomial_vector(2, 1)).unwrap();
        let mut sdp = BlockSDP::new(
            vec![BlockSpec {
                name: "X".into(),
                size: 3,
                weight: 1,
            }],
            vec![],
        );
        sdp.constraints.push(Constraint {
            form: LinearForm {
                entries: vec![
                    EntryTerm {
                        block: 0,
                        row: 0,
                        col: 1,
                        coef: q(1),
                    },
                    EntryTerm {
                        block: 0,
                        row: 0,
                        col: 2,
                        coef: q(-1),
                    },
                ],
                free: vec![],
            },
            rhs: q(0),
        });
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
            rhs: q(1),
        });
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
            entries: vec![
                EntryTerm {
                    block: 0,
                    row: 1,
                    col: 1,
                    coef: q(1),
                },
                EntryTerm {
                    block: 0,
                    row: 2,
                    col: 2,
                    coef: q(1),
                },
            ],
            free: vec![],
        };
        check_invariance(&sdp, &rep).unwrap();
        let basis = symmetry_adapted_basis(&rep, &cat).unwrap();
        let reduced = restrict_invariant(&sdp, &rep, &basis).unwrap();
        let sizes: Vec<usize> = reduced.blocks.iter().map(|b| b.size).collect();
        assert_eq!(sizes, vec![2, 1]);
        let full = solve(&sdp, &SolveOptions::default()).unwrap();
        let red = solve(&reduced, &SolveOptions::default()).unwrap();
        assert!((full.objective - 2.0).abs() < 1e-6, "{}", full.objective);
        assert!((red.objective - full.objective).abs() < 1e-6);
        let lifted = lift_reduced(&red.blocks, &basis).unwrap();
        assert!((lifted[(0, 1)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn non_invariant_constraint_rejected() {
        let spec = CatalogSpec::parse("symmetric:2").unwrap();
        let s2 = close_group(&spec.generators(), 10).unwrap();
        let rep = InducedRep::new(&s2, monomial_vector(2, 1)).unwrap();
        let mut sdp = BlockSDP::new(
            vec![BlockSpec {
                name: "X".into(),
                size: 3,
                weight: 1,
            }],
            vec![],
        );
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
        assert!(matches!(check_invariance(&sdp, &rep), Err(Error::NotInvariant { .. })));
    }
}
