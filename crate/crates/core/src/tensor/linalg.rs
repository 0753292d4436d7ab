use crate::scalar::CycScalar;

use super::TensorError;

/// Dense matrix over Q(q), row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    order: u32,
    rows: usize,
    cols: usize,
    data: Vec<CycScalar>,
}

impl Matrix {
    pub fn zero(order: u32, rows: usize, cols: usize) -> Matrix {
        Matrix { order, rows, cols, data: vec![CycScalar::zero(order); rows * cols] }
    }

    pub fn identity(order: u32, d: usize) -> Matrix {
        let mut m = Matrix::zero(order, d, d);
        for i in 0..d {
            m.set(i, i, CycScalar::one(order));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[CycScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.order, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Matrix::zero(self.order, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    /// Reduced row echelon form; returns pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|i| !self.get(*i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inv().expect("nonzero pivot");
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let x = self.get(r, j);
                    if !x.is_zero() {
                        let v = self.get(i, j) - &(&f * x);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn inverse(&self) -> Result<Matrix, TensorError> {
        if self.rows != self.cols {
            return Err(TensorError::Arity(format!("{}x{} matrix is not square", self.rows, self.cols)));
        }
        let d = self.rows;
        let mut aug = Matrix::zero(self.order, d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, d + i, CycScalar::one(self.order));
        }
        let pivots = aug.rref();
        let rank = pivots.iter().filter(|c| **c < d).count();
        if rank < d {
            return Err(TensorError::Singular { rank, dim: d });
        }
        let mut inv = Matrix::zero(self.order, d, d);
        for i in 0..d {
            for j in 0..d {
                inv.set(i, j, aug.get(i, d + j).clone());
            }
        }
        Ok(inv)
    }

    /// Basis of {x : M x = 0}.
    pub fn nullspace(&self) -> Vec<Vec<CycScalar>> {
        let mut r = self.clone();
        let pivots = r.rref();
        null_basis(self.order, self.cols, &pivots, |i, j| r.get(i, j).clone())
    }
}

fn null_basis(
    order: u32,
    cols: usize,
    pivots: &[usize],
    entry: impl Fn(usize, usize) -> CycScalar,
) -> Vec<Vec<CycScalar>> {
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![CycScalar::zero(order); cols];
        v[free] = CycScalar::one(order);
        for (i, p) in pivots.iter().enumerate() {
            v[*p] = -entry(i, free);
        }
        out.push(v);
    }
    out
}

/// Incremental reduced row echelon form for tall sparse systems.
pub struct RowReducer {
    order: u32,
    cols: usize,
    // (pivot column, fully reduced row with 1 at the pivot)
    rows: Vec<(usize, Vec<CycScalar>)>,
}

impl RowReducer {
    pub fn new(order: u32, cols: usize) -> RowReducer {
        RowReducer { order, cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a sparse row given as (column, coefficient) pairs.
    pub fn add_row(&mut self, entries: &[(usize, CycScalar)]) {
        if entries.is_empty() || self.rows.len() == self.cols {
            return;
        }
        let mut row = vec![CycScalar::zero(self.order); self.cols];
        for (c, v) in entries {
            row[*c] += v;
        }
        for (p, prow) in &self.rows {
            let f = row[*p].clone();
            if f.is_zero() {
                continue;
            }
            for (j, x) in prow.iter().enumerate() {
                if !x.is_zero() {
                    row[j] -= &(&f * x);
                }
            }
        }
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            return;
        };
        let inv = row[p].inv().expect("nonzero pivot");
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for (_, prow) in self.rows.iter_mut() {
            let f = prow[p].clone();
            if f.is_zero() {
                continue;
            }
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    prow[j] -= &(&f * x);
                }
            }
        }
        self.rows.push((p, row));
    }

    pub fn nullspace(&self) -> Vec<Vec<CycScalar>> {
        let pivots: Vec<usize> = self.rows.iter().map(|r| r.0).collect();
        null_basis(self.order, self.cols, &pivots, |i, j| self.rows[i].1[j].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(order: u32, rows: &[&[i64]]) -> Matrix {
        let mut out = Matrix::zero(order, rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                out.set(i, j, CycScalar::from_int(order, *v));
            }
        }
        out
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(3, &[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(3, 2));
        let sing = m(3, &[&[1, 2], &[2, 4]]);
        assert_eq!(sing.inverse(), Err(TensorError::Singular { rank: 1, dim: 2 }));
    }

    #[test]
    fn nullspace_agrees_with_incremental() {
        let a = m(1, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        let mut rr = RowReducer::new(1, 3);
        for i in 0..3 {
            let e: Vec<_> = (0..3).map(|j| (j, a.get(i, j).clone())).collect();
            rr.add_row(&e);
        }
        assert_eq!(rr.rank(), 2);
        assert_eq!(rr.nullspace(), ns);
    }
}
