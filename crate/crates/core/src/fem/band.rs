//! Symmetric band matrices: storage, Cholesky and inertia counting.

/// Lower band of a symmetric matrix; row `i` holds columns `i-bw ..= i`.
#[derive(Debug, Clone)]
pub struct SymBand {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Entry `(i, j)` in either triangle; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Adds `v` at `(i, j)` (and implicitly `(j, i)`).
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    /// `self - shift * other`, same layout.
    pub fn shifted(&self, other: &SymBand, shift: f64) -> SymBand {
        assert_eq!((self.n, self.bw), (other.n, other.bw));
        SymBand {
            n: self.n,
            bw: self.bw,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - shift * b)
                .collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let w = self.bw + 1;
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            let row = &self.data[i * w..(i + 1) * w];
            let mut acc = 0.0;
            for j in j0..i {
                let a = row[j + self.bw - i];
                acc += a * x[j];
                y[j] += a * x[i];
            }
            acc += row[self.bw] * x[i];
            y[i] += acc;
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Band Cholesky `A = L Lᵀ`; `None` if `A` is not positive definite.
    pub fn cholesky(&self) -> Option<BandCholesky> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let mut l = self.data.clone();
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(bw));
                let mut sum = l[i * w + (j + bw - i)];
                for k in k0..j {
                    sum -= l[i * w + (k + bw - i)] * l[j * w + (k + bw - j)];
                }
                if j == i {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return None;
                    }
                    l[i * w + bw] = sum.sqrt();
                } else {
                    l[i * w + (j + bw - i)] = sum / l[j * w + bw];
                }
            }
        }
        Some(BandCholesky { n, bw, l })
    }

    /// Number of negative pivots of an unpivoted `L D Lᵀ` factorization,
    /// i.e. the number of negative eigenvalues by Sylvester's law of
    /// inertia. `None` when a pivot vanishes.
    pub fn negative_pivots(&self) -> Option<usize> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        // store L (unit lower) in the band, D separately
        let mut l = self.data.clone();
        let mut d = vec![0.0; n];
        let mut negatives = 0;
        let scale = self
            .data
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..i {
                let k0 = j0.max(j.saturating_sub(bw));
                let mut sum = l[i * w + (j + bw - i)];
                for k in k0..j {
                    sum -= l[i * w + (k + bw - i)] * d[k] * l[j * w + (k + bw - j)];
                }
                l[i * w + (j + bw - i)] = sum / d[j];
            }
            let mut piv = l[i * w + bw];
            for k in j0..i {
                let lik = l[i * w + (k + bw - i)];
                piv -= lik * lik * d[k];
            }
            if !piv.is_finite() || piv.abs() <= 1e-300 * scale {
                return None;
            }
            if piv < 0.0 {
                negatives += 1;
            }
            d[i] = piv;
        }
        Some(negatives)
    }
}

#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Solves `A x = b` in place.
    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            let mut s = x[i];
            for j in j0..i {
                s -= self.l[i * w + (j + bw - i)] * x[j];
            }
            x[i] = s / self.l[i * w + bw];
        }
        for i in (0..n).rev() {
            x[i] /= self.l[i * w + bw];
            let xi = x[i];
            let j0 = i.saturating_sub(bw);
            for j in j0..i {
                x[j] -= self.l[i * w + (j + bw - i)] * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn sample(n: usize, bw: usize) -> SymBand {
        let mut a = SymBand::zeros(n, bw);
        for i in 0..n {
            a.add(i, i, 4.0 + i as f64 * 0.1);
            for j in i.saturating_sub(bw)..i {
                a.add(i, j, 0.3 / (1.0 + (i - j) as f64) * if (i + j) % 2 == 0 { 1.0 } else { -1.0 });
            }
        }
        a
    }

    #[test]
    fn matvec_and_solve_match_dense() {
        let a = sample(17, 4);
        let dense = a.to_dense();
        assert_eq!(dense, dense.transpose());
        let x: Vec<f64> = (0..17).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut y = vec![0.0; 17];
        a.mul_vec(&x, &mut y);
        let yd = &dense * DVector::from_column_slice(&x);
        for i in 0..17 {
            assert!((y[i] - yd[i]).abs() < 1e-13);
        }
        let chol = a.cholesky().unwrap();
        let mut z = y.clone();
        chol.solve_in_place(&mut z);
        for i in 0..17 {
            assert!((z[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn inertia_counts_negative_eigenvalues() {
        let a = sample(12, 3);
        let dense = a.to_dense();
        let eig = dense.clone().symmetric_eigenvalues();
        let mut sorted: Vec<f64> = eig.iter().copied().collect();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mid = 0.5 * (sorted[4] + sorted[5]);
        let ident = {
            let mut b = SymBand::zeros(12, 3);
            for i in 0..12 {
                b.add(i, i, 1.0);
            }
            b
        };
        assert_eq!(a.shifted(&ident, mid).negative_pivots(), Some(5));
        assert!(a.shifted(&ident, mid).cholesky().is_none());
        assert_eq!(a.negative_pivots(), Some(0));
        let _ = DMatrix::<f64>::zeros(1, 1);
    }
}
