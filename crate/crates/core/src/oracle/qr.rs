//! Dense Householder QR with column pivoting for least-squares problems.

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ColMajor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl ColMajor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (j, xj) in x.iter().enumerate() {
            if *xj != 0.0 {
                for (o, a) in out.iter_mut().zip(self.col(j)) {
                    *o += a * xj;
                }
            }
        }
        out
    }
}

/// A pivot fell below the rank tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankDeficient {
    /// Original index of the offending column.
    pub column: usize,
    pub pivot: f64,
    pub tolerance: f64,
}

/// Factorization `A P = Q R`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// `R` above the diagonal, Householder vectors (unit leading entry
    /// implied) below it.
    qr: ColMajor,
    beta: Vec<f64>,
    perm: Vec<usize>,
}

fn norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * s.sqrt()
}

impl PivotedQr {
    /// Factors `a` (rows >= cols). Fails when a pivot drops below
    /// `rel_tol` times the largest initial column norm.
    pub fn factor(mut a: ColMajor, rel_tol: f64) -> Result<Self, RankDeficient> {
        let (m, n) = (a.rows, a.cols);
        assert!(m >= n, "least squares needs rows >= cols");
        let mut perm: Vec<usize> = (0..n).collect();
        let mut norms: Vec<f64> = (0..n).map(|j| norm(a.col(j))).collect();
        let mut reference = norms.clone();
        let tolerance = rel_tol * norms.iter().fold(0.0f64, |x, y| x.max(*y));
        let mut beta = vec![0.0; n];

        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| norms[i].total_cmp(&norms[j])).unwrap();
            if p != k {
                let (lo, hi) = a.data.split_at_mut(p * m);
                lo[k * m..(k + 1) * m].swap_with_slice(&mut hi[..m]);
                perm.swap(k, p);
                norms.swap(k, p);
                reference.swap(k, p);
            }

            let alpha = norm(&a.col(k)[k..]);
            if alpha <= tolerance {
                return Err(RankDeficient { column: perm[k], pivot: alpha, tolerance });
            }
            // v = x - s e1 with s = -sign(x0) |x|; stored with v0 = 1
            let col = a.col_mut(k);
            let x0 = col[k];
            let s = if x0 >= 0.0 { -alpha } else { alpha };
            let v0 = x0 - s;
            for v in &mut col[k + 1..] {
                *v /= v0;
            }
            col[k] = s;
            beta[k] = -v0 / s;

            let (head, tail) = a.data.split_at_mut((k + 1) * m);
            let v = &head[k * m + k + 1..(k + 1) * m];
            for (jj, cj) in tail.chunks_exact_mut(m).enumerate() {
                let j = k + 1 + jj;
                let mut dot = cj[k];
                for (a, b) in cj[k + 1..].iter().zip(v) {
                    dot += a * b;
                }
                let f = beta[k] * dot;
                cj[k] -= f;
                for (a, b) in cj[k + 1..].iter_mut().zip(v) {
                    *a -= f * b;
                }
                // downdate the partial norm, recomputing when cancellation
                // has eaten most of it
                let r = cj[k];
                let t = (1.0 - (r / norms[j]).powi(2)).max(0.0);
                if norms[j] == 0.0 {
                    continue;
                }
                if t * (norms[j] / reference[j]).powi(2) < 1e-8 {
                    norms[j] = norm(&cj[k + 1..]);
                    reference[j] = norms[j];
                } else {
                    norms[j] *= t.sqrt();
                }
            }
        }
        Ok(Self { qr: a, beta, perm })
    }

    /// Least-squares solution of `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (m, n) = (self.qr.rows, self.qr.cols);
        let mut y = b.to_vec();
        for k in 0..n {
            let col = self.qr.col(k);
            let v = &col[k + 1..];
            let mut dot = y[k];
            for (a, b) in y[k + 1..m].iter().zip(v) {
                dot += a * b;
            }
            let f = self.beta[k] * dot;
            y[k] -= f;
            for (a, b) in y[k + 1..m].iter_mut().zip(v) {
                *a -= f * b;
            }
        }
        let mut z = vec![0.0; n];
        for k in (0..n).rev() {
            let mut s = y[k];
            for j in k + 1..n {
                s -= self.qr.get(k, j) * z[j];
            }
            z[k] = s / self.qr.get(k, k);
        }
        let mut x = vec![0.0; n];
        for (k, p) in self.perm.iter().enumerate() {
            x[*p] = z[k];
        }
        x
    }

    /// Magnitudes of the diagonal of `R` in pivot order.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.qr.cols).map(|k| self.qr.get(k, k).abs()).collect()
    }
}
