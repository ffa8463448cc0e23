use alloc::vec::Vec;

use super::lstsq::{restricted_lstsq, scatter};
use super::threshold::{block_column_threshold, top_k_threshold, BlockSparsityPattern};
use super::{CMatrix, CVector, C64};
use crate::error::SparseError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HihtpOptions {
    pub max_iters: usize,
    /// Gradient step; the problem does not fix one, unit step is the default.
    pub step: f64,
}

impl Default for HihtpOptions {
    fn default() -> Self {
        HihtpOptions { max_iters: 50, step: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub struct HihtpResult {
    pub estimate: CVector,
    pub support: Vec<usize>,
    pub iterations: usize,
    /// The support reached a fixpoint before `max_iters`.
    pub converged: bool,
    /// Some restricted fit was rank-deficient and used the least-norm solution.
    pub rank_deficient: bool,
}

fn pursuit<F>(y: &CVector, a: &CMatrix, opts: HihtpOptions, mut threshold: F) -> Result<HihtpResult, SparseError>
where
    F: FnMut(&[C64]) -> Result<Vec<usize>, SparseError>,
{
    if a.nrows() != y.len() {
        return Err(SparseError::Dimension("observation length differs from matrix rows".into()));
    }
    let mut x = CVector::zeros(a.ncols());
    let mut support: Vec<usize> = Vec::new();
    let mut rank_deficient = false;
    let step = C64::new(opts.step, 0.0);
    for it in 0..opts.max_iters {
        let g = &x + a.ad_mul(&(y - a * &x)) * step;
        let next = threshold(g.as_slice())?;
        let fit = restricted_lstsq(a, &next, y);
        rank_deficient |= fit.rank_deficient();
        x = scatter(a.ncols(), &next, &fit.coefficients);
        if next == support {
            return Ok(HihtpResult { estimate: x, support, iterations: it + 1, converged: true, rank_deficient });
        }
        support = next;
    }
    Ok(HihtpResult { estimate: x, support, iterations: opts.max_iters, converged: false, rank_deficient })
}

/// Hierarchical hard thresholding pursuit: gradient step, `L_{k_u,k_s}`
/// support selection, least squares on that support, until the support
/// repeats.
pub fn hihtp_solve(
    y: &CVector,
    a: &CMatrix,
    pattern: &BlockSparsityPattern,
    opts: HihtpOptions,
) -> Result<HihtpResult, SparseError> {
    if a.ncols() != pattern.len() {
        return Err(SparseError::Dimension("matrix columns differ from u*s".into()));
    }
    pattern.validate()?;
    pursuit(y, a, opts, |g| block_column_threshold(g, pattern))
}

/// Unstructured hard thresholding pursuit with `k` entries.
pub fn htp_solve(y: &CVector, a: &CMatrix, k: usize, opts: HihtpOptions) -> Result<HihtpResult, SparseError> {
    pursuit(y, a, opts, |g| Ok(top_k_threshold(g, k)))
}
