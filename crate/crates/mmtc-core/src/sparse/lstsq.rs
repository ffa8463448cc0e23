use alloc::vec::Vec;

use super::{CMatrix, CVector, C64};

#[derive(Clone, Debug)]
pub struct LstsqResult {
    /// Coefficients for the requested columns, in the order given.
    pub coefficients: Vec<C64>,
    pub rank: usize,
}

impl LstsqResult {
    pub fn rank_deficient(&self) -> bool {
        self.rank < self.coefficients.len()
    }
}

/// Least squares on the columns `cols` of `a`, least-norm when the restricted
/// matrix is rank-deficient.
pub fn restricted_lstsq(a: &CMatrix, cols: &[usize], y: &CVector) -> LstsqResult {
    if cols.is_empty() {
        return LstsqResult { coefficients: Vec::new(), rank: 0 };
    }
    let sub = a.select_columns(cols.iter());
    if sub.nrows() >= sub.ncols() {
        // Well-conditioned tall systems go through the normal equations;
        // anything close to rank-deficient falls back to the SVD.
        if let Some(chol) = sub.ad_mul(&sub).cholesky() {
            let l = chol.l_dirty();
            let diag: Vec<f64> = (0..l.ncols()).map(|i| l[(i, i)].re).collect();
            let dmax = diag.iter().cloned().fold(0.0, f64::max);
            if dmax > 0.0 && diag.iter().all(|&d| d > dmax * 1e-6) {
                let x = chol.solve(&sub.ad_mul(y));
                return LstsqResult { coefficients: x.iter().copied().collect(), rank: cols.len() };
            }
        }
    }
    if sub.nrows() < sub.ncols() {
        // Full row rank: the least-norm solution is `A^H (A A^H)^-1 y`.
        if let Some(chol) = (&sub * sub.adjoint()).cholesky() {
            let l = chol.l_dirty();
            let diag: Vec<f64> = (0..l.ncols()).map(|i| l[(i, i)].re).collect();
            let dmax = diag.iter().cloned().fold(0.0, f64::max);
            if dmax > 0.0 && diag.iter().all(|&d| d > dmax * 1e-6) {
                let x = sub.ad_mul(&chol.solve(y));
                return LstsqResult { coefficients: x.iter().copied().collect(), rank: sub.nrows() };
            }
        }
    }
    let svd = sub.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = smax * 1e-10 * (a.nrows().max(cols.len()) as f64);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let x = svd.solve(y, tol).expect("SVD was computed with both factors");
    LstsqResult { coefficients: x.iter().copied().collect(), rank }
}

/// Writes `coefficients` into a length-`n` vector at `cols`.
pub(super) fn scatter(n: usize, cols: &[usize], coefficients: &[C64]) -> CVector {
    let mut out = CVector::zeros(n);
    for (&c, &v) in cols.iter().zip(coefficients) {
        out[c] = v;
    }
    out
}
