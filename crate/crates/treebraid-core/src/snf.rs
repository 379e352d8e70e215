//! Smith normal form over arbitrary-precision integers, and the integral
//! cohomology of the cubical model read off from it.
//!
//! The matrices that show up here are sparse boundary matrices with entries
//! ±1, so the reduction keeps rows as sorted maps, picks pivots of minimal
//! magnitude (breaking ties toward low fill-in), and only falls back to
//! Euclidean steps when a pivot fails to divide its row and column.

use crate::cube::{self, Model, Orientation};
use crate::error::{Error, Result};
use crate::tree::RootedPlaneTree;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Diagonal of a Smith normal form: `rank` nonzero invariant factors, each
/// dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithNormalForm {
    pub factors: Vec<BigInt>,
}

impl SmithNormalForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Invariant factors different from 1, i.e. the torsion the matrix
    /// imposes on its cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors
            .iter()
            .filter(|f| !f.is_one())
            .cloned()
            .collect()
    }
}

/// A sparse integer matrix assembled row by row.
#[derive(Debug, Clone, Default)]
pub struct SparseIntMatrix {
    rows: Vec<BTreeMap<usize, BigInt>>,
    cols: usize,
}

impl SparseIntMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseIntMatrix {
            rows: vec![BTreeMap::new(); rows],
            cols,
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: i64) {
        if value == 0 {
            return;
        }
        debug_assert!(col < self.cols);
        let entry = self.rows[row].entry(col).or_insert_with(BigInt::zero);
        *entry += value;
        if entry.is_zero() {
            self.rows[row].remove(&col);
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    /// Reduces the matrix to Smith normal form (destroying it) and returns
    /// the invariant factors.
    pub fn into_smith_normal_form(mut self) -> SmithNormalForm {
        let mut diagonal: Vec<BigInt> = Vec::new();
        // Rows/columns already consumed as pivots.
        let mut row_done = vec![false; self.rows.len()];
        let mut col_done = vec![false; self.cols];
        // Column index: which active rows touch a column.
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); self.cols];
        for (r, m) in self.rows.iter().enumerate() {
            for &c in m.keys() {
                col_rows[c].push(r);
            }
        }

        loop {
            // Pick the pivot: minimal |value|, then minimal estimated fill.
            let mut best: Option<(usize, usize, BigInt, usize)> = None;
            for (r, m) in self.rows.iter().enumerate() {
                if row_done[r] {
                    continue;
                }
                for (&c, v) in m.iter() {
                    debug_assert!(!col_done[c]);
                    let mag = v.abs();
                    let fill = (m.len() - 1) * col_rows[c].len().saturating_sub(1);
                    let better = match &best {
                        None => true,
                        Some((_, _, bm, bf)) => mag < *bm || (mag == *bm && fill < *bf),
                    };
                    if better {
                        let stop = mag.is_one() && fill == 0;
                        best = Some((r, c, mag, fill));
                        if stop {
                            break;
                        }
                    }
                }
                if let Some((_, _, m, f)) = &best {
                    if m.is_one() && *f == 0 {
                        break;
                    }
                }
            }
            let Some((pr, mut pc, _, _)) = best else {
                break;
            };

            // Make the pivot divide everything in its row and column. Each
            // corrective step strictly shrinks the pivot's magnitude, so
            // this terminates.
            loop {
                // A column entry the pivot does not divide: a Euclidean row
                // step leaves the remainder, which becomes the new pivot.
                let bad_row = col_rows[pc]
                    .iter()
                    .copied()
                    .filter(|&r| !row_done[r] && r != pr)
                    .find(|&r| {
                        self.rows[r]
                            .get(&pc)
                            .map(|v| !v.mod_floor(&self.rows[pr][&pc]).is_zero())
                            .unwrap_or(false)
                    });
                if let Some(r) = bad_row {
                    let q = self.rows[r][&pc].div_floor(&self.rows[pr][&pc]);
                    self.row_op(r, pr, &-q);
                    self.rows.swap(r, pr);
                    col_rows = Self::rebuild_all_cols(&self.rows, &row_done, self.cols);
                    continue;
                }
                // A row entry the pivot does not divide: reduce it with a
                // column operation (columns through the pivot column touch
                // every row holding that column), then move the pivot onto
                // the remainder.
                let bad_col = self.rows[pr]
                    .iter()
                    .find(|(&c, v)| c != pc && !v.mod_floor(&self.rows[pr][&pc]).is_zero())
                    .map(|(&c, _)| c);
                if let Some(c) = bad_col {
                    let q = self.rows[pr][&c].div_floor(&self.rows[pr][&pc]);
                    let holders: Vec<usize> = col_rows[pc]
                        .iter()
                        .copied()
                        .filter(|&r| !row_done[r])
                        .collect();
                    for r in holders {
                        let sub = &self.rows[r][&pc] * &q;
                        let entry = self.rows[r].entry(c).or_insert_with(BigInt::zero);
                        *entry -= sub;
                        if entry.is_zero() {
                            self.rows[r].remove(&c);
                        }
                    }
                    pc = c;
                    col_rows = Self::rebuild_all_cols(&self.rows, &row_done, self.cols);
                    continue;
                }
                break;
            }

            // Clear the pivot column with row operations.
            let pivot = self.rows[pr][&pc].clone();
            let holders: Vec<usize> = col_rows[pc]
                .iter()
                .copied()
                .filter(|&r| !row_done[r] && r != pr)
                .collect();
            for r in holders {
                if let Some(v) = self.rows[r].get(&pc) {
                    let q = v / &pivot;
                    self.row_op(r, pr, &-q);
                }
            }
            // Clearing the pivot row is now free: column operations through
            // the pivot column only touch the pivot row.
            let entries: Vec<usize> = self.rows[pr].keys().copied().collect();
            for c in entries {
                if c != pc {
                    self.rows[pr].remove(&c);
                }
            }

            diagonal.push(pivot.abs());
            row_done[pr] = true;
            col_done[pc] = true;
            col_rows = Self::rebuild_all_cols(&self.rows, &row_done, self.cols);
        }

        // Repair the divisibility chain: replacing a pair (a, b) by
        // (gcd, lcm) preserves the group the diagonal presents.
        let n = diagonal.len();
        loop {
            let mut changed = false;
            for i in 0..n.saturating_sub(1) {
                for j in i + 1..n {
                    if !(&diagonal[j] % &diagonal[i]).is_zero() {
                        let g = diagonal[i].gcd(&diagonal[j]);
                        let l = &diagonal[i] / &g * &diagonal[j];
                        diagonal[i] = g;
                        diagonal[j] = l;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        diagonal.sort();
        SmithNormalForm { factors: diagonal }
    }

    fn rebuild_all_cols(
        rows: &[BTreeMap<usize, BigInt>],
        row_done: &[bool],
        cols: usize,
    ) -> Vec<Vec<usize>> {
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); cols];
        for (r, m) in rows.iter().enumerate() {
            if row_done[r] {
                continue;
            }
            for &c in m.keys() {
                col_rows[c].push(r);
            }
        }
        col_rows
    }

    /// row_target += q * row_source.
    fn row_op(&mut self, target: usize, source: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let source_row: Vec<(usize, BigInt)> =
            self.rows[source].iter().map(|(&c, v)| (c, v.clone())).collect();
        for (c, v) in source_row {
            let entry = self.rows[target].entry(c).or_insert_with(BigInt::zero);
            *entry += v * q;
            if entry.is_zero() {
                self.rows[target].remove(&c);
            }
        }
    }
}

/// Integral cohomology of the model, one entry per dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cohomology {
    /// Free ranks, indexed by degree.
    pub betti: Vec<usize>,
    /// Torsion coefficients per degree (each > 1, dividing the next).
    pub torsion: Vec<Vec<BigInt>>,
    /// Cells per dimension, for reporting.
    pub cell_counts: Vec<usize>,
}

/// Computes the integral cohomology of the chosen model.
///
/// Enumerates cells dimension by dimension (stopping at the first empty
/// one), assembles the gradient-orientation boundary matrices, and reduces
/// them to Smith normal form. `budget` caps the total number of cells.
pub fn integral_cohomology(
    tree: &RootedPlaneTree,
    n: usize,
    model: Model,
    budget: u64,
) -> Result<Cohomology> {
    // Count everything first so an oversized instance fails fast.
    let mut counts: Vec<u64> = Vec::new();
    let factorial: u64 = (1..=n as u64).product();
    for dim in 0..=n {
        let unordered = cube::count_orbit_cells(tree, n, dim)?;
        let count = match model {
            Model::Unordered => unordered,
            Model::Ordered => unordered
                .checked_mul(factorial)
                .ok_or(Error::BudgetExceeded {
                    budget,
                    estimate: u64::MAX,
                })?,
        };
        if count == 0 {
            break;
        }
        counts.push(count);
    }
    let estimate: u64 = counts.iter().sum();
    if estimate > budget {
        return Err(Error::BudgetExceeded { budget, estimate });
    }

    // Index cells per dimension and build boundary matrices. The enumerations
    // are sorted, so positions can be found by binary search.
    let top = counts.len(); // dims 0 .. top-1 are nonempty
    let mut betti = vec![0usize; top];
    let mut torsion: Vec<Vec<BigInt>> = vec![Vec::new(); top];
    let mut cell_counts = vec![0usize; top];
    // ranks[d] = rank of the boundary map from dimension d to d-1.
    let mut ranks = vec![0usize; top + 1];
    let mut torsion_from_boundary: Vec<Vec<BigInt>> = vec![Vec::new(); top + 1];

    match model {
        Model::Unordered => {
            let mut below = cube::enumerate_orbit_cells(tree, n, 0)?;
            cell_counts[0] = below.len();
            for dim in 1..top {
                let here = cube::enumerate_orbit_cells(tree, n, dim)?;
                cell_counts[dim] = here.len();
                let mut mat = SparseIntMatrix::new(below.len(), here.len());
                for (j, cell) in here.iter().enumerate() {
                    for (face, sign) in cube::boundary_orbit(cell, Orientation::Gradient) {
                        let i = below.binary_search(&face).expect("face was enumerated");
                        mat.add(i, j, sign);
                    }
                }
                let snf = mat.into_smith_normal_form();
                ranks[dim] = snf.rank();
                torsion_from_boundary[dim] = snf.torsion();
                below = here;
            }
        }
        Model::Ordered => {
            let mut below = cube::enumerate_ordered_cells(tree, n, 0)?;
            below.sort();
            cell_counts[0] = below.len();
            for dim in 1..top {
                let mut here = cube::enumerate_ordered_cells(tree, n, dim)?;
                here.sort();
                cell_counts[dim] = here.len();
                let mut mat = SparseIntMatrix::new(below.len(), here.len());
                for (j, cell) in here.iter().enumerate() {
                    for (face, sign) in cube::boundary_conf(cell, Orientation::Gradient) {
                        let i = below.binary_search(&face).expect("face was enumerated");
                        mat.add(i, j, sign);
                    }
                }
                let snf = mat.into_smith_normal_form();
                ranks[dim] = snf.rank();
                torsion_from_boundary[dim] = snf.torsion();
                below = here;
            }
        }
    }

    for dim in 0..top {
        betti[dim] = cell_counts[dim] - ranks[dim] - ranks[dim + 1];
        // Cohomology torsion in degree d equals homology torsion in degree
        // d − 1, which the boundary map out of dimension d presents.
        torsion[dim] = torsion_from_boundary[dim].clone();
    }
    Ok(Cohomology {
        betti,
        torsion,
        cell_counts,
    })
}
