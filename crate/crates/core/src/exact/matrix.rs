use num_traits::{One, Zero};

use super::GaussianRational;
use crate::error::{check_dim, Result};

pub type ExactVector = Vec<GaussianRational>;

/// Dense matrix over the Gaussian rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

/// Outcome of an affine solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    Feasible { particular: ExactVector, kernel: Vec<ExactVector> },
    Infeasible,
}

/// Reduced row-echelon form. Pivots are only taken from the matrix columns,
/// never from appended right-hand sides.
struct Reduced {
    data: Vec<GaussianRational>,
    width: usize,
    rank: usize,
    /// `pivots[k]` is the (original) column of the pivot in row `k`.
    pivots: Vec<usize>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![GaussianRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, GaussianRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_dim(c, row.len())?;
            data.extend(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| GaussianRational::from_int(v)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussianRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GaussianRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[GaussianRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ExactVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        check_dim(self.cols, other.cols)?;
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(ExactMatrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn mul_vec(&self, v: &[GaussianRational]) -> Result<ExactVector> {
        check_dim(self.cols, v.len())?;
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = GaussianRational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn reduce(&self, extra: &[&[GaussianRational]]) -> Reduced {
        let width = self.cols + extra.len();
        let mut data = Vec::with_capacity(self.rows * width);
        for i in 0..self.rows {
            data.extend(self.row(i).iter().cloned());
            for col in extra {
                data.push(col[i].clone());
            }
        }
        let rows = self.rows;
        let mut is_pivot_col = vec![false; self.cols];
        let mut pivots = Vec::new();
        let mut rank = 0;
        while rank < rows {
            // full pivoting: the lightest nonzero entry of the remaining block
            let mut best: Option<(u64, usize, usize)> = None;
            for i in rank..rows {
                for j in (0..self.cols).filter(|&j| !is_pivot_col[j]) {
                    let e = &data[i * width + j];
                    if e.is_zero() {
                        continue;
                    }
                    let h = e.height();
                    if best.is_none_or(|(bh, _, _)| h < bh) {
                        best = Some((h, i, j));
                    }
                }
            }
            let Some((_, pi, pj)) = best else { break };
            if pi != rank {
                for j in 0..width {
                    data.swap(pi * width + j, rank * width + j);
                }
            }
            let inv = data[rank * width + pj].inv().expect("nonzero pivot");
            for j in 0..width {
                let e = &mut data[rank * width + j];
                if !e.is_zero() {
                    *e = &*e * &inv;
                }
            }
            let pivot_row: Vec<GaussianRational> = data[rank * width..(rank + 1) * width].to_vec();
            for i in 0..rows {
                if i == rank {
                    continue;
                }
                let f = data[i * width + pj].clone();
                if f.is_zero() {
                    continue;
                }
                for (j, pv) in pivot_row.iter().enumerate() {
                    if pv.is_zero() {
                        continue;
                    }
                    let e = &mut data[i * width + j];
                    *e -= &(&f * pv);
                }
            }
            is_pivot_col[pj] = true;
            pivots.push(pj);
            rank += 1;
        }
        Reduced { data, width, rank, pivots }
    }

    pub fn rank(&self) -> usize {
        self.reduce(&[]).rank
    }

    fn kernel_from(&self, red: &Reduced) -> Vec<ExactVector> {
        let mut is_pivot_col = vec![false; self.cols];
        for &p in &red.pivots {
            is_pivot_col[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot_col[f])
            .map(|f| {
                let mut v = vec![GaussianRational::zero(); self.cols];
                v[f] = GaussianRational::one();
                for (k, &p) in red.pivots.iter().enumerate() {
                    v[p] = -&red.data[k * red.width + f];
                }
                v
            })
            .collect()
    }

    /// Exact basis of the right kernel; empty iff the matrix is injective.
    pub fn kernel_basis(&self) -> Vec<ExactVector> {
        let red = self.reduce(&[]);
        self.kernel_from(&red)
    }

    /// Solves `M x = b` exactly. `Infeasible` is an ordinary outcome.
    pub fn solve_affine(&self, b: &[GaussianRational]) -> Result<AffineSolution> {
        check_dim(self.rows, b.len())?;
        let red = self.reduce(&[b]);
        let rhs = self.cols;
        for k in red.rank..self.rows {
            if !red.data[k * red.width + rhs].is_zero() {
                return Ok(AffineSolution::Infeasible);
            }
        }
        let mut particular = vec![GaussianRational::zero(); self.cols];
        for (k, &p) in red.pivots.iter().enumerate() {
            particular[p] = red.data[k * red.width + rhs].clone();
        }
        Ok(AffineSolution::Feasible { particular, kernel: self.kernel_from(&red) })
    }

    /// Whether `w` lies in the column span of `self`.
    pub fn in_column_span(&self, w: &[GaussianRational]) -> Result<bool> {
        Ok(matches!(self.solve_affine(w)?, AffineSolution::Feasible { .. }))
    }

    pub fn to_c64_rows(&self) -> Vec<Vec<num_complex::Complex64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|e| e.to_c64()).collect()).collect()
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = GaussianRational;
    fn index(&self, (i, j): (usize, usize)) -> &GaussianRational {
        self.get(i, j)
    }
}

pub fn is_zero_vector(v: &[GaussianRational]) -> bool {
    v.iter().all(Zero::is_zero)
}
