use alloc::vec::Vec;

use super::lstsq::{restricted_lstsq, scatter};
use super::{CMatrix, CVector, SparseProblem};
use crate::error::SparseError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GompOptions {
    pub max_groups: usize,
    /// Stop once the residual norm falls below this.
    pub residual_threshold: f64,
}

#[derive(Clone, Debug)]
pub struct GompResult {
    pub estimate: CVector,
    /// Selected groups, ascending.
    pub active_set: Vec<usize>,
    /// Residual norm before the first and after every selection.
    pub residual_norms: Vec<f64>,
    /// The residual threshold was met.
    pub converged: bool,
    /// Some re-fit fell back to the least-norm solution.
    pub rank_deficient: bool,
}

/// Group orthogonal matching pursuit.
///
/// Each iteration adds the unselected group whose columns correlate most with
/// the residual (summed squared magnitude; ties to the lower group index) and
/// re-fits all selected groups by least squares.
pub fn gomp(a: &CMatrix, y: &CVector, group_size: usize, opts: GompOptions) -> Result<GompResult, SparseError> {
    if group_size == 0 || a.ncols() % group_size != 0 || a.nrows() != y.len() {
        return Err(SparseError::Dimension("matrix, observation and group size disagree".into()));
    }
    let n_groups = a.ncols() / group_size;
    let max_groups = opts.max_groups.min(n_groups);
    let mut selected: Vec<usize> = Vec::new();
    let mut cols: Vec<usize> = Vec::new();
    let mut estimate = CVector::zeros(a.ncols());
    let mut residual = y.clone();
    let mut norms = alloc::vec![residual.norm()];
    let mut rank_deficient = false;
    while selected.len() < max_groups && residual.norm() >= opts.residual_threshold {
        let corr = a.ad_mul(&residual);
        let mut best: Option<(usize, f64)> = None;
        for g in (0..n_groups).filter(|g| !selected.contains(g)) {
            let score: f64 = (0..group_size).map(|t| corr[g * group_size + t].norm_sqr()).sum();
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((g, score));
            }
        }
        let Some((g, _)) = best else { break };
        selected.push(g);
        cols.extend(g * group_size..(g + 1) * group_size);
        let fit = restricted_lstsq(a, &cols, y);
        rank_deficient |= fit.rank_deficient();
        estimate = scatter(a.ncols(), &cols, &fit.coefficients);
        residual = y - a * &estimate;
        norms.push(residual.norm());
    }
    let converged = residual.norm() < opts.residual_threshold;
    selected.sort_unstable();
    Ok(GompResult { estimate, active_set: selected, residual_norms: norms, converged, rank_deficient })
}

/// [`gomp`] on a generated problem.
pub fn gomp_solve(problem: &SparseProblem, opts: GompOptions) -> Result<GompResult, SparseError> {
    gomp(&problem.matrix, &problem.observation, problem.group_size, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::C64;

    #[test]
    fn identity_recovers_exactly() {
        let a = CMatrix::identity(6, 6);
        let mut h = CVector::zeros(6);
        h[2] = C64::new(1.5, -0.5);
        h[4] = C64::new(-2.0, 0.25);
        let y = &a * &h;
        let r = gomp(&a, &y, 1, GompOptions { max_groups: 6, residual_threshold: 1e-9 }).unwrap();
        assert_eq!(r.active_set, [2, 4]);
        assert!((r.estimate - h).norm() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn flags_non_convergence() {
        let a = CMatrix::identity(4, 4);
        let y = CVector::from_element(4, C64::new(1.0, 0.0));
        let r = gomp(&a, &y, 1, GompOptions { max_groups: 2, residual_threshold: 1e-9 }).unwrap();
        assert!(!r.converged);
        assert_eq!(r.active_set.len(), 2);
    }
}
