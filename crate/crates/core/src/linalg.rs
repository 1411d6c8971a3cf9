use crate::error::{CoreError, Result};
use crate::scalar::PadicScalar;

/// Dense matrix over the fixed-modulus p-adics, with valuation-aware
/// elimination. Pivots are chosen with minimal valuation (maximal norm) so
/// kernels and solves stay exact at truncation; the largest pivot valuation
/// encountered is reported so callers can detect shallow truncations.
#[derive(Debug, Clone)]
pub struct PMat {
    pub p: u64,
    pub n: u32,
    pub rows: usize,
    pub cols: usize,
    data: Vec<PadicScalar>,
}

impl PMat {
    pub fn new(p: u64, n: u32, rows: usize, cols: usize) -> Self {
        PMat { p, n, rows, cols, data: vec![PadicScalar::zero(p, n); rows * cols] }
    }

    pub fn from_fn(p: u64, n: u32, rows: usize, cols: usize, f: impl Fn(usize, usize) -> PadicScalar) -> Self {
        let mut m = Self::new(p, n, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn identity(p: u64, n: u32, k: usize) -> Self {
        Self::from_fn(p, n, k, k, |i, j| {
            if i == j {
                PadicScalar::one(p, n)
            } else {
                PadicScalar::zero(p, n)
            }
        })
    }

    pub fn get(&self, i: usize, j: usize) -> PadicScalar {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PadicScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &PMat) -> PMat {
        assert_eq!(self.cols, other.rows);
        let mut out = PMat::new(self.p, self.n, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur.add(&a.mul(&other.get(k, j))));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[PadicScalar]) -> Vec<PadicScalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = PadicScalar::zero(self.p, self.n);
                for j in 0..self.cols {
                    acc = acc.add(&self.get(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    /// Row echelon form in place. Returns `(pivot columns, max pivot
    /// valuation)`; rows are normalized so each pivot is 1.
    fn echelonize(&mut self) -> (Vec<(usize, usize)>, i64) {
        let mut pivots = Vec::new();
        let mut max_piv_val: i64 = 0;
        let mut r = 0;
        for c in 0..self.cols {
            // pick the remaining row with minimal valuation in column c
            let mut best: Option<(usize, i64)> = None;
            for i in r..self.rows {
                if let Some(v) = self.get(i, c).valuation() {
                    if best.map_or(true, |(_, bv)| v < bv) {
                        best = Some((i, v));
                    }
                }
            }
            let Some((pi, pv)) = best else { continue };
            max_piv_val = max_piv_val.max(pv);
            // swap rows pi and r
            if pi != r {
                for j in 0..self.cols {
                    let a = self.get(pi, j);
                    let b = self.get(r, j);
                    self.set(pi, j, b);
                    self.set(r, j, a);
                }
            }
            let inv = self.get(r, c).inv().expect("pivot nonzero");
            for j in 0..self.cols {
                self.set(r, j, self.get(r, j).mul(&inv));
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f.is_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    let v = self.get(i, j).sub(&f.mul(&self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push((r, c));
            r += 1;
            if r == self.rows {
                break;
            }
        }
        (pivots, max_piv_val)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelonize().0.len()
    }

    /// Kernel basis (columns are variables). Also returns the largest pivot
    /// valuation seen, a shallow-truncation indicator.
    pub fn kernel(&self) -> (Vec<Vec<PadicScalar>>, i64) {
        let mut m = self.clone();
        let (pivots, max_pv) = m.echelonize();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![PadicScalar::zero(self.p, self.n); self.cols];
            v[free] = PadicScalar::one(self.p, self.n);
            for &(r, c) in &pivots {
                v[c] = m.get(r, free).neg();
            }
            basis.push(v);
        }
        (basis, max_pv)
    }

    /// Solve `A x = b`; `None` when inconsistent at truncation.
    pub fn solve(&self, b: &[PadicScalar]) -> Option<Vec<PadicScalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = PMat::new(self.p, self.n, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let (pivots, _) = aug.echelonize();
        // inconsistent if a pivot lands in the augmented column
        if pivots.iter().any(|&(_, c)| c == self.cols) {
            return None;
        }
        let mut x = vec![PadicScalar::zero(self.p, self.n); self.cols];
        for &(r, c) in &pivots {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix; error when not invertible at truncation.
    pub fn inverse(&self) -> Result<PMat> {
        assert_eq!(self.rows, self.cols);
        let k = self.rows;
        let mut aug = PMat::new(self.p, self.n, k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, k + i, PadicScalar::one(self.p, self.n));
        }
        let (pivots, _) = aug.echelonize();
        let in_left = pivots.iter().filter(|&&(_, c)| c < k).count();
        if in_left < k {
            return Err(CoreError::RankDeficient("matrix not invertible at truncation".into()));
        }
        let mut out = PMat::new(self.p, self.n, k, k);
        for &(r, c) in &pivots {
            for j in 0..k {
                out.set(c, j, aug.get(r, k + j));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_simple_system() {
        // x + y = 0 over Z/3^4
        let m = PMat::from_fn(3, 4, 1, 2, |_, j| PadicScalar::from_i64(3, 4, if j == 0 { 1 } else { 1 }));
        let (ker, _) = m.kernel();
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        assert_eq!(v[0].add(&v[1]), PadicScalar::zero(3, 4));
    }

    #[test]
    fn solve_and_inverse() {
        let m = PMat::from_fn(3, 5, 2, 2, |i, j| {
            PadicScalar::from_i64(3, 5, [[2, 1], [1, 1]][i][j])
        });
        let b = vec![PadicScalar::from_i64(3, 5, 5), PadicScalar::from_i64(3, 5, 3)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        assert_eq!(id.get(0, 0), PadicScalar::one(3, 5));
        assert_eq!(id.get(0, 1), PadicScalar::zero(3, 5));
    }

    #[test]
    fn pivots_handle_p_scaled_rows() {
        // matrix [[p, p], [0, 0]] has kernel (1, -1) with pivot valuation 1
        let m = PMat::from_fn(3, 4, 2, 2, |i, _| {
            if i == 0 {
                PadicScalar::from_i64(3, 4, 3)
            } else {
                PadicScalar::zero(3, 4)
            }
        });
        let (ker, max_pv) = m.kernel();
        assert_eq!(ker.len(), 1);
        assert_eq!(max_pv, 1);
    }
}
