//! Constraint preprocessing: exact or numerical row reduction, elimination of free
//! variables, and the reduced data handed to the interior-point solver.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{BlockSDP, EntryIndex, Sense};
use crate::error::{Error, Result};
use crate::linalg::{solve as exact_solve, Mat};
use crate::rational::{to_f64, Q};

type SparseRow = BTreeMap<usize, Q>;

/// Reduced row echelon form of the constraints. Columns `0..nfree` are free
/// variables, column `nfree + k` is block entry `k`.
#[derive(Clone, Debug)]
pub struct ExactSystem {
    nfree: usize,
    index: EntryIndex,
    rows: Vec<(usize, SparseRow, Q)>,
}

impl ExactSystem {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn nfree(&self) -> usize {
        self.nfree
    }

    pub fn entry_count(&self) -> usize {
        self.index.len()
    }

    /// `(pivot column, row, rhs)`; each row has coefficient 1 at its pivot and 0 at
    /// every other pivot column.
    pub fn rows(&self) -> &[(usize, BTreeMap<usize, Q>, Q)] {
        &self.rows
    }

    /// Keep `values` on non-pivot entry columns and solve for the pivots. Free
    /// variables are not allowed here.
    pub fn complete(&self, values: &[Q]) -> Result<Vec<Q>> {
        self.require_no_free()?;
        let mut x = values.to_vec();
        for (p, row, rhs) in &self.rows {
            let mut v = rhs.clone();
            for (c, coef) in row {
                if c != p {
                    v -= coef * &values[*c];
                }
            }
            x[*p] = v;
        }
        Ok(x)
    }

    /// Orthogonal projection of `values` onto the affine solution set.
    pub fn project(&self, values: &[Q]) -> Result<Vec<Q>> {
        self.require_no_free()?;
        let r = self.rows.len();
        if r == 0 {
            return Ok(values.to_vec());
        }
        let mut gram = Mat::<Q>::zeros(r, r);
        for i in 0..r {
            for j in i..r {
                let (small, big) = if self.rows[i].1.len() <= self.rows[j].1.len() {
                    (&self.rows[i].1, &self.rows[j].1)
                } else {
                    (&self.rows[j].1, &self.rows[i].1)
                };
                let mut acc = Q::zero();
                for (c, v) in small {
                    if let Some(w) = big.get(c) {
                        acc += v * w;
                    }
                }
                gram.set(i, j, acc.clone());
                gram.set(j, i, acc);
            }
        }
        let resid: Vec<Q> = self
            .rows
            .iter()
            .map(|(_, row, rhs)| {
                let mut v = rhs.clone();
                for (c, coef) in row {
                    v -= coef * &values[*c];
                }
                v
            })
            .collect();
        let (z, _) =
            exact_solve(&gram, &resid).ok_or_else(|| Error::Rounding("projection system is singular".into()))?;
        let mut x = values.to_vec();
        for ((_, row, _), zi) in self.rows.iter().zip(&z) {
            if zi.is_zero() {
                continue;
            }
            for (c, coef) in row {
                x[*c] += coef * zi;
            }
        }
        Ok(x)
    }

    /// Entries forced to a single value, when the solution set is a point.
    pub fn unique_point(&self) -> Option<Vec<Q>> {
        if self.nfree != 0 || self.rows.len() != self.index.len() {
            return None;
        }
        let mut x = vec![Q::zero(); self.index.len()];
        for (p, _, rhs) in &self.rows {
            x[*p] = rhs.clone();
        }
        Some(x)
    }

    /// Whether `row · (free, entries) = rhs` follows from the constraints.
    pub(crate) fn implies(&self, row: SparseRow, rhs: Q) -> bool {
        let (row, rhs) = self.reduce(row, rhs);
        row.is_empty() && rhs.is_zero()
    }

    /// Remainder of `(row, rhs)` after eliminating every pivot column.
    pub(crate) fn reduce(&self, mut row: SparseRow, mut rhs: Q) -> (SparseRow, Q) {
        for (p, prow, prhs) in &self.rows {
            let Some(f) = row.get(p).cloned() else { continue };
            for (c, v) in prow {
                let e = row.entry(*c).or_insert_with(Q::zero);
                *e -= &f * v;
                if e.is_zero() {
                    row.remove(c);
                }
            }
            rhs -= &f * prhs;
        }
        (row, rhs)
    }

    pub(crate) fn index(&self) -> &EntryIndex {
        &self.index
    }

    fn require_no_free(&self) -> Result<()> {
        if self.nfree != 0 {
            return Err(Error::Solver("free variables must be fixed first".into()));
        }
        Ok(())
    }
}

/// Reduce `row` against existing pivots, add it if independent; rows stay fully reduced.
fn insert_row(rows: &mut Vec<(usize, SparseRow, Q)>, mut row: SparseRow, mut rhs: Q) -> Result<()> {
    for (p, prow, prhs) in rows.iter() {
        let Some(f) = row.get(p).cloned() else { continue };
        for (c, v) in prow {
            let e = row.entry(*c).or_insert_with(Q::zero);
            *e -= &f * v;
            if e.is_zero() {
                row.remove(c);
            }
        }
        rhs -= &f * prhs;
    }
    let Some((&pivot, lead)) = row.iter().next() else {
        if rhs.is_zero() {
            return Ok(());
        }
        return Err(Error::Infeasible("linear constraints are inconsistent".into()));
    };
    let inv = lead.recip();
    for v in row.values_mut() {
        *v *= &inv;
    }
    rhs *= &inv;
    for (_, prow, prhs) in rows.iter_mut() {
        let Some(f) = prow.get(&pivot).cloned() else { continue };
        for (c, v) in &row {
            let e = prow.entry(*c).or_insert_with(Q::zero);
            *e -= &f * v;
            if e.is_zero() {
                prow.remove(c);
            }
        }
        *prhs -= &f * &rhs;
    }
    rows.push((pivot, row, rhs));
    Ok(())
}

/// Exact row reduction of the constraints. Errors with `Infeasible` when they are
/// inconsistent.
pub fn exact_system(sdp: &BlockSDP) -> Result<ExactSystem> {
    sdp.validate()?;
    let index = EntryIndex::new(&sdp.blocks);
    let nfree = sdp.free.len();
    let mut rows = Vec::new();
    for c in &sdp.constraints {
        let mut row = SparseRow::new();
        for (k, v) in &c.form.free {
            *row.entry(*k).or_insert_with(Q::zero) += v;
        }
        for t in &c.form.entries {
            *row.entry(nfree + index.index(t.block, t.row, t.col))
                .or_insert_with(Q::zero) += &t.coef;
        }
        row.retain(|_, v| !v.is_zero());
        insert_row(&mut rows, row, c.rhs.clone())?;
    }
    // Sorting by pivot keeps the output deterministic and pivots in column order.
    rows.sort_by_key(|(p, _, _)| *p);
    Ok(ExactSystem { nfree, index, rows })
}

/// Value of a free variable after elimination.
#[derive(Clone, Debug)]
pub(crate) enum FreeValue {
    /// `constant − Σ coef · entry`.
    Affine {
        constant: f64,
        terms: Vec<(usize, f64)>,
    },
    Zero,
}

/// Data for the cone solver: equality rows over block entries only and a cost in
/// minimization form.
#[derive(Clone, Debug)]
pub(crate) struct Prepared {
    pub index: EntryIndex,
    pub rows: Vec<(Vec<(usize, f64)>, f64)>,
    pub cost: Vec<f64>,
    pub cost_constant: f64,
    pub free: Vec<FreeValue>,
    /// A free variable with nonzero reduced cost: the problem is unbounded if feasible.
    pub unbounded_direction: bool,
    /// Exact entry and free values when the constraints pin down a single point.
    pub exact_point: Option<(Vec<Q>, Vec<Q>)>,
}

pub(crate) fn prepare(sdp: &BlockSDP) -> Result<Prepared> {
    if sdp.approximate {
        prepare_numeric(sdp)
    } else {
        prepare_exact(sdp)
    }
}

fn sense_sign(sdp: &BlockSDP) -> f64 {
    match sdp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    }
}

fn prepare_exact(sdp: &BlockSDP) -> Result<Prepared> {
    let sys = exact_system(sdp)?;
    let nfree = sys.nfree;
    let nx = sys.index.len();
    let sign = sense_sign(sdp);
    let mut cost_free = vec![Q::zero(); nfree];
    for (k, c) in &sdp.cost.free {
        cost_free[*k] += c;
    }
    let mut cost = vec![0.0; nx];
    for t in &sdp.cost.entries {
        cost[sys.index.index(t.block, t.row, t.col)] += sign * to_f64(&t.coef);
    }
    let mut cost_constant = 0.0;
    let mut free = vec![FreeValue::Zero; nfree];
    let mut reduced_free_cost = cost_free.clone();
    let mut rows = Vec::new();
    let mut exact_free_rows = Vec::new();
    for (p, row, rhs) in &sys.rows {
        if *p < nfree {
            let cp = to_f64(&cost_free[*p]) * sign;
            let mut terms = Vec::new();
            for (c, v) in row {
                if *c == *p {
                    continue;
                }
                if *c < nfree {
                    let delta = &cost_free[*p] * v;
                    reduced_free_cost[*c] -= delta;
                } else {
                    terms.push((c - nfree, to_f64(v)));
                    cost[c - nfree] -= cp * to_f64(v);
                }
            }
            cost_constant += cp * to_f64(rhs);
            free[*p] = FreeValue::Affine {
                constant: to_f64(rhs),
                terms,
            };
            exact_free_rows.push((*p, row, rhs));
        } else {
            let r: Vec<(usize, f64)> = row.iter().map(|(c, v)| (c - nfree, to_f64(v))).collect();
            rows.push((r, to_f64(rhs)));
        }
    }
    let pivot_free: Vec<bool> = (0..nfree).map(|k| sys.rows.iter().any(|(p, _, _)| *p == k)).collect();
    let unbounded_direction = (0..nfree).any(|k| !pivot_free[k] && !reduced_free_cost[k].is_zero());
    let affine_dimension = nx - rows.len();
    let exact_point = if affine_dimension == 0 {
        let mut x = vec![Q::zero(); nx];
        for (p, _, rhs) in &sys.rows {
            if *p >= nfree {
                x[p - nfree] = rhs.clone();
            }
        }
        let mut y = vec![Q::zero(); nfree];
        for (p, row, rhs) in exact_free_rows {
            let mut v = rhs.clone();
            for (c, coef) in row {
                if *c >= nfree {
                    v -= coef * &x[c - nfree];
                }
            }
            y[p] = v;
        }
        Some((x, y))
    } else {
        None
    };
    Ok(Prepared {
        index: sys.index,
        rows,
        cost,
        cost_constant,
        free,
        unbounded_direction,
        exact_point,
    })
}

/// Gaussian elimination with partial pivoting and a relative drop tolerance.
fn prepare_numeric(sdp: &BlockSDP) -> Result<Prepared> {
    sdp.validate()?;
    let index = EntryIndex::new(&sdp.blocks);
    let nfree = sdp.free.len();
    let nx = index.len();
    let ncols = nfree + nx;
    let m = sdp.constraints.len();
    let mut a = vec![vec![0.0; ncols + 1]; m];
    for (i, c) in sdp.constraints.iter().enumerate() {
        for (k, v) in &c.form.free {
            a[i][*k] += to_f64(v);
        }
        for t in &c.form.entries {
            a[i][nfree + index.index(t.block, t.row, t.col)] += to_f64(&t.coef);
        }
        a[i][ncols] = to_f64(&c.rhs);
    }
    let scale = a
        .iter()
        .flat_map(|r| r[..ncols].iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let tol = 1e-9 * scale;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let (best, val) = (r..m)
            .map(|i| (i, a[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            for row in a.iter_mut().skip(r) {
                row[c] = 0.0;
            }
            continue;
        }
        a.swap(r, best);
        let inv = 1.0 / a[r][c];
        for v in a[r].iter_mut() {
            *v *= inv;
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c] == 0.0 {
                continue;
            }
            let f = row[c];
            for (x, p) in row.iter_mut().zip(&prow) {
                *x -= f * p;
            }
            row[c] = 0.0;
        }
        pivots.push(c);
        r += 1;
    }
    let rhs_scale = a.iter().fold(0.0f64, |acc, row| acc.max(row[ncols].abs())).max(1.0);
    if a[r..].iter().any(|row| row[ncols].abs() > 1e-7 * rhs_scale) {
        return Err(Error::Infeasible("linear constraints are inconsistent".into()));
    }
    let sign = sense_sign(sdp);
    let mut cost_free = vec![0.0; nfree];
    for (k, c) in &sdp.cost.free {
        cost_free[*k] += sign * to_f64(c);
    }
    let mut cost = vec![0.0; nx];
    for t in &sdp.cost.entries {
        cost[index.index(t.block, t.row, t.col)] += sign * to_f64(&t.coef);
    }
    let mut reduced_free_cost = cost_free.clone();
    let mut cost_constant = 0.0;
    let mut free = vec![FreeValue::Zero; nfree];
    let mut rows = Vec::new();
    for (i, &p) in pivots.iter().enumerate() {
        let row = &a[i];
        if p < nfree {
            let cp = cost_free[p];
            let mut terms = Vec::new();
            for c in 0..ncols {
                if c == p || row[c].abs() <= tol * 1e-3 {
                    continue;
                }
                if c < nfree {
                    reduced_free_cost[c] -= cp * row[c];
                } else {
                    terms.push((c - nfree, row[c]));
                    cost[c - nfree] -= cp * row[c];
                }
            }
            cost_constant += cp * row[ncols];
            free[p] = FreeValue::Affine {
                constant: row[ncols],
                terms,
            };
        } else {
            let r: Vec<(usize, f64)> = (nfree..ncols)
                .filter(|&c| row[c].abs() > tol * 1e-3)
                .map(|c| (c - nfree, row[c]))
                .collect();
            rows.push((r, row[ncols]));
        }
    }
    let cost_scale = reduced_free_cost.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let unbounded_direction =
        (0..nfree).any(|k| !pivots.contains(&k) && reduced_free_cost[k].abs() > 1e-9 * cost_scale);
    Ok(Prepared {
        index,
        rows,
        cost,
        cost_constant,
        free,
        unbounded_direction,
        exact_point: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::sdp::{BlockSpec, Constraint, EntryTerm, LinearForm};

    fn entry(block: usize, row: usize, col: usize, c: i64) -> EntryTerm {
        EntryTerm {
            block,
            row,
            col,
            coef: q(c),
        }
    }

    #[test]
    fn rref_detects_dependence_and_inconsistency() {
        let mut sdp = BlockSDP::new(
            vec![BlockSpec {
                name: "b".into(),
                size: 2,
                weight: 1,
            }],
            vec![],
        );
        let f = |c: &[EntryTerm]| LinearForm {
            entries: c.to_vec(),
            free: vec![],
        };
        sdp.constraints.push(Constraint {
            form: f(&[entry(0, 0, 0, 1), entry(0, 1, 1, 1)]),
            rhs: q(2),
        });
        sdp.constraints.push(Constraint {
            form: f(&[entry(0, 0, 0, 2), entry(0, 1, 1, 2)]),
            rhs: q(4),
        });
        let sys = exact_system(&sdp).unwrap();
        assert_eq!(sys.rank(), 1);
        let p = sys.project(&[q(0), q(0), q(0)]).unwrap();
        assert_eq!(p, vec![q(1), q(0), q(1)]);
        sdp.constraints.push(Constraint {
            form: f(&[entry(0, 0, 0, 1), entry(0, 1, 1, 1)]),
            rhs: q(3),
        });
        assert!(matches!(exact_system(&sdp), Err(Error::Infeasible(_))));
    }

    #[test]
    fn free_variable_elimination() {
        let mut sdp = BlockSDP::new(
            vec![BlockSpec {
                name: "b".into(),
                size: 1,
                weight: 1,
            }],
            vec!["t".into()],
        );
        sdp.constraints.push(Constraint {
            form: LinearForm {
                entries: vec![entry(0, 0, 0, 1)],
                free: vec![(0, q(1))],
            },
            rhs: q(5),
        });
        sdp.cost = LinearForm {
            entries: vec![],
            free: vec![(0, q(1))],
        };
        sdp.sense = Sense::Maximize;
        let p = prepare(&sdp).unwrap();
        assert!(p.rows.is_empty());
        assert!(p.exact_point.is_none());
        // maximize t = 5 − X  ⇔  minimize X − 5.
        assert_eq!(p.cost, vec![1.0]);
        assert_eq!(p.cost_constant, -5.0);
        assert!(!p.unbounded_direction);
    }
}
