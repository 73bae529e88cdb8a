use alloc::vec::Vec;

/// A real matrix accessed only through products with vectors.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// `y = A^T x`
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);
}

/// Compressed sparse row matrix. Column indices within a row are ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_parts(rows: usize, cols: usize, offsets: Vec<usize>, indices: Vec<u32>, values: Vec<f64>) -> Self {
        assert_eq!(offsets.len(), rows + 1);
        assert_eq!(indices.len(), values.len());
        assert_eq!(*offsets.last().unwrap(), indices.len());
        CsrMatrix { rows, cols, offsets, indices, values }
    }

    /// Builds from triplets; repeated coordinates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(u32, u32, f64)]) -> Self {
        let mut t: Vec<(u32, u32, f64)> = triplets.to_vec();
        t.sort_by_key(|&(r, c, _)| (r, c));
        let mut offsets = alloc::vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(u32, u32)> = None;
        for (r, c, v) in t {
            assert!((r as usize) < rows && (c as usize) < cols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                offsets[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        CsrMatrix { rows, cols, offsets, indices, values }
    }

    pub fn from_dense(rows: usize, cols: usize, row_major: &[f64]) -> Self {
        let mut t = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = row_major[r * cols + c];
                if v != 0.0 {
                    t.push((r as u32, c as u32, v));
                }
            }
        }
        Self::from_triplets(rows, cols, &t)
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n as u32).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &t)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.offsets[r], self.offsets[r + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (idx, val) = self.row(r);
        idx.binary_search(&(c as u32)).map(|k| val[k]).unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = alloc::vec![0.0; self.rows * self.cols];
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                d[r * self.cols + c as usize] = v;
            }
        }
        d
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                t.push((c, r as u32, v));
            }
        }
        Self::from_triplets(self.cols, self.rows, &t)
    }

    /// Sparse product `self * other` (row-by-row accumulation).
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.cols, other.rows);
        let mut acc = alloc::vec![0.0f64; other.cols];
        let mut mark = alloc::vec![false; other.cols];
        let mut touched: Vec<u32> = Vec::new();
        let mut offsets = alloc::vec![0usize; self.rows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.rows {
            let (ia, va) = self.row(r);
            for (&k, &a) in ia.iter().zip(va) {
                let (ib, vb) = other.row(k as usize);
                for (&c, &b) in ib.iter().zip(vb) {
                    if !mark[c as usize] {
                        mark[c as usize] = true;
                        touched.push(c);
                    }
                    acc[c as usize] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                indices.push(c);
                values.push(acc[c as usize]);
                acc[c as usize] = 0.0;
                mark[c as usize] = false;
            }
            offsets[r + 1] = indices.len();
            touched.clear();
        }
        CsrMatrix { rows: self.rows, cols: other.cols, offsets, indices, values }
    }

    /// Column sums.
    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = alloc::vec![0.0; self.cols];
        for (&c, &v) in self.indices.iter().zip(&self.values) {
            s[c as usize] += v;
        }
        s
    }

    /// Keeps the entries for which `f(row, col, value)` returns `Some`.
    pub fn filter_map(&self, mut f: impl FnMut(usize, usize, f64) -> Option<f64>) -> CsrMatrix {
        let mut offsets = alloc::vec![0usize; self.rows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                if let Some(w) = f(r, c as usize, v) {
                    indices.push(c);
                    values.push(w);
                }
            }
            offsets[r + 1] = indices.len();
        }
        CsrMatrix { rows: self.rows, cols: self.cols, offsets, indices, values }
    }
}

impl LinearOperator for CsrMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (r, yr) in y.iter_mut().enumerate().take(self.rows) {
            let (idx, val) = self.row(r);
            *yr = idx.iter().zip(val).map(|(&c, &v)| v * x[c as usize]).sum();
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, &xr) in x.iter().enumerate().take(self.rows) {
            if xr == 0.0 {
                continue;
            }
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                y[c as usize] += v * xr;
            }
        }
    }
}
