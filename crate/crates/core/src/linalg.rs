//! Small dense symmetric positive-definite solves (row-major storage).

pub(crate) struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factor `a` (n x n, row-major). `None` if not positive definite.
    pub(crate) fn new(a: &[f64], n: usize) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Some(Cholesky { n, l })
    }

    /// Solve `A x = b` in place.
    pub(crate) fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }
}

/// Factor `a` if it is comfortably positive definite, otherwise
/// `a + ridge * I` where `ridge = rel * trace(a) / n`, retrying with a ridge
/// ten times larger until the factorization succeeds.
pub(crate) fn ridge_cholesky(a: &[f64], n: usize, rel: f64) -> Option<Cholesky> {
    let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
    if let Some(c) = Cholesky::new(a, n) {
        // squared pivots are the conditional variances of each column
        let min_pivot = (0..n).map(|i| c.l[i * n + i].powi(2)).fold(f64::INFINITY, f64::min);
        if min_pivot > 1e-12 * trace / n as f64 {
            return Some(c);
        }
    }
    let mut ridge = rel * (trace / n as f64).max(f64::MIN_POSITIVE);
    let mut m = a.to_vec();
    for _ in 0..12 {
        for i in 0..n {
            m[i * n + i] = a[i * n + i] + ridge;
        }
        if let Some(c) = Cholesky::new(&m, n) {
            return Some(c);
        }
        ridge *= 10.0;
    }
    None
}
