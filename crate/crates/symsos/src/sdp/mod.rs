//! Block-structured semidefinite programs: data model, assembly from polynomial
//! data, symmetry reduction, exact preprocessing and a primal-dual solver.

mod assemble;
mod eliminate;
mod facial;
mod format;
mod solver;
mod symmetric;

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rational::{to_f64, Q};

pub use assemble::{
    assemble_gram, assemble_gram_over, assemble_invariant_sos, check_invariance, envelope_rows, lift_reduced,
    restrict_invariant, GramAssembly, InvariantAssembly, InvariantBlockLayout,
};
pub use eliminate::{exact_system, ExactSystem};
pub use facial::{expose_face, Face};
pub use format::{parse_sdp, render_sdp};
pub use solver::{solve, SdpSolution, SolveOptions, SolveStatus};
pub use symmetric::solve_invariant;

/// One PSD block variable.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpec {
    pub name: String,
    pub size: usize,
    /// Number of identical copies the block stands for after symmetry reduction.
    pub weight: usize,
}

/// Coefficient on the entry `X_b[row, col]` (`row ≤ col`) of a block; off-diagonal
/// entries are single variables shared by both symmetric positions.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryTerm {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub coef: Q,
}

/// Linear functional over block entries and free variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearForm {
    pub entries: Vec<EntryTerm>,
    pub free: Vec<(usize, Q)>,
}

impl LinearForm {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|t| t.coef.is_zero()) && self.free.iter().all(|(_, c)| c.is_zero())
    }

    pub fn evaluate_f64(&self, blocks: &[DMatrix<f64>], free: &[f64]) -> f64 {
        let e: f64 = self
            .entries
            .iter()
            .map(|t| to_f64(&t.coef) * blocks[t.block][(t.row, t.col)])
            .sum();
        let f: f64 = self.free.iter().map(|(k, c)| to_f64(c) * free[*k]).sum();
        e + f
    }

    pub fn evaluate(&self, blocks: &[Mat<Q>], free: &[Q]) -> Q {
        let mut acc = Q::zero();
        for t in &self.entries {
            acc += &t.coef * blocks[t.block].get(t.row, t.col);
        }
        for (k, c) in &self.free {
            acc += c * &free[*k];
        }
        acc
    }
}

/// `form = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub form: LinearForm,
    pub rhs: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `opt cost(X, y)` subject to linear equations, `X_b ⪰ 0`, `y` free.
///
/// `approximate` marks data derived from floating-point transformations; such
/// problems are preprocessed numerically instead of exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSDP {
    pub blocks: Vec<BlockSpec>,
    pub free: Vec<String>,
    pub cost: LinearForm,
    pub sense: Sense,
    pub constraints: Vec<Constraint>,
    pub approximate: bool,
}

impl BlockSDP {
    pub fn new(blocks: Vec<BlockSpec>, free: Vec<String>) -> Self {
        BlockSDP {
            blocks,
            free,
            cost: LinearForm::default(),
            sense: Sense::Minimize,
            constraints: Vec::new(),
            approximate: false,
        }
    }

    /// Range-check every term.
    pub fn validate(&self) -> Result<()> {
        let forms = self.constraints.iter().map(|c| &c.form).chain([&self.cost]);
        for form in forms {
            for t in &form.entries {
                let size = self
                    .blocks
                    .get(t.block)
                    .map(|b| b.size)
                    .ok_or_else(|| Error::Solver(format!("block {} out of range", t.block)))?;
                if t.row > t.col || t.col >= size {
                    return Err(Error::Solver(format!(
                        "entry ({}, {}) invalid for block {} of size {size}",
                        t.row, t.col, t.block
                    )));
                }
            }
            if let Some((k, _)) = form.free.iter().find(|(k, _)| *k >= self.free.len()) {
                return Err(Error::Solver(format!("free variable {k} out of range")));
            }
        }
        if self.blocks.iter().any(|b| b.weight == 0) {
            return Err(Error::Solver("block weights must be positive".into()));
        }
        Ok(())
    }

    /// Number of scalar block variables `Σ s(s+1)/2`.
    pub fn entry_count(&self) -> usize {
        self.blocks.iter().map(|b| b.size * (b.size + 1) / 2).sum()
    }

    /// Replace free variables by fixed values, moving them to the right-hand sides.
    pub fn fix_free(&self, values: &[Q]) -> Result<BlockSDP> {
        if values.len() != self.free.len() {
            return Err(Error::DimensionMismatch {
                expected: self.free.len(),
                got: values.len(),
            });
        }
        let mut out = self.clone();
        out.free.clear();
        for c in &mut out.constraints {
            for (k, coef) in c.form.free.drain(..) {
                c.rhs -= coef * &values[k];
            }
        }
        out.cost.free.clear();
        Ok(out)
    }

    /// Dimension of the affine space of block entries cut out by the constraints,
    /// with free variables held fixed.
    pub fn affine_dimension(&self) -> Result<usize> {
        let zeros = vec![Q::zero(); self.free.len()];
        let fixed = self.fix_free(&zeros)?;
        let sys = exact_system(&fixed)?;
        Ok(fixed.entry_count() - sys.rank())
    }
}

/// Flat index of `(block, row, col)` with `row ≤ col`.
#[derive(Clone, Debug)]
pub(crate) struct EntryIndex {
    offsets: Vec<usize>,
    sizes: Vec<usize>,
}

impl EntryIndex {
    pub(crate) fn new(blocks: &[BlockSpec]) -> Self {
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for b in blocks {
            offsets.push(acc);
            acc += b.size * (b.size + 1) / 2;
        }
        offsets.push(acc);
        EntryIndex {
            offsets,
            sizes: blocks.iter().map(|b| b.size).collect(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub(crate) fn index(&self, block: usize, row: usize, col: usize) -> usize {
        let (i, j) = if row <= col { (row, col) } else { (col, row) };
        self.offsets[block] + j * (j + 1) / 2 + i
    }

    pub(crate) fn position(&self, idx: usize) -> (usize, usize, usize) {
        let block = self.offsets.partition_point(|&o| o <= idx) - 1;
        let mut rem = idx - self.offsets[block];
        let mut j = 0;
        while rem > j {
            rem -= j + 1;
            j += 1;
        }
        (block, rem, j)
    }

    pub(crate) fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}
