//! Linear algebra over GF(p) and GF(2^n): rank, inversion, equation solving
//! and symbol-wise pre-coding.

mod field;
mod matrix;

use alloc::format;
use alloc::vec::Vec;

pub use field::{Field, FieldSpec, BINARY_POLYNOMIALS};
pub use matrix::FfMatrix;

use crate::error::FfError;

/// `B w = u`: `coefficients` is `B x M`, `rhs` is `B x k` (one message of
/// `k` symbols per unknown).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub coefficients: FfMatrix,
    pub rhs: FfMatrix,
}

impl EquationSystem {
    pub fn new(coefficients: FfMatrix, rhs: FfMatrix) -> Result<Self, FfError> {
        if coefficients.rows() != rhs.rows() || coefficients.field() != rhs.field() {
            return Err(FfError::Dimension(format!(
                "{} equations but {} right-hand sides",
                coefficients.rows(),
                rhs.rows()
            )));
        }
        Ok(EquationSystem { coefficients, rhs })
    }

    pub fn unknowns(&self) -> usize {
        self.coefficients.cols()
    }
}

/// Result of [`ff_solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub rank: usize,
    /// Per unknown: its message when pinned down by the system.
    pub recovered: Vec<Option<Vec<u32>>>,
}

impl SolveReport {
    pub fn is_unique(&self) -> bool {
        self.rank == self.recovered.len()
    }

    /// Number of unknowns recovered individually.
    pub fn recovered_count(&self) -> usize {
        self.recovered.iter().filter(|r| r.is_some()).count()
    }

    /// The full solution when the system has full column rank.
    pub fn solution(&self) -> Option<Vec<Vec<u32>>> {
        if self.is_unique() {
            self.recovered.iter().cloned().collect()
        } else {
            None
        }
    }
}

pub fn ff_rank(m: &FfMatrix) -> usize {
    m.rank()
}

/// Solves by elimination on `[B | u]`.
///
/// Returns the rank and every unknown whose unit vector lies in the row space
/// (in reduced echelon form: some row has a single nonzero coefficient).
/// A unique solution is re-substituted before it is returned.
pub fn ff_solve(system: &EquationSystem) -> Result<SolveReport, FfError> {
    let b = &system.coefficients;
    let (rows, m, k) = (b.rows(), b.cols(), system.rhs.cols());
    let field = b.field().clone();
    let mut aug = FfMatrix::zeros(field.clone(), rows, m + k);
    for i in 0..rows {
        for j in 0..m {
            aug.set(i, j, b.get(i, j));
        }
        for j in 0..k {
            aug.set(i, m + j, system.rhs.get(i, j));
        }
    }
    let pivots = aug.rref_in_place(m);
    let rank = pivots.len();
    for i in rank..rows {
        if (0..k).any(|j| aug.get(i, m + j) != 0) {
            return Err(FfError::Inconsistent { row: i });
        }
    }
    let mut recovered = alloc::vec![None; m];
    for (i, &c) in pivots.iter().enumerate() {
        let lone = (0..m).all(|j| j == c || aug.get(i, j) == 0);
        if lone {
            recovered[c] = Some((0..k).map(|j| aug.get(i, m + j)).collect());
        }
    }
    let report = SolveReport { rank, recovered };
    if let Some(w) = report.solution() {
        let w = FfMatrix::from_rows(field, &w)?;
        if k > 0 && b.mul(&w)? != system.rhs {
            return Err(FfError::Inconsistent { row: 0 });
        }
    }
    Ok(report)
}

/// Per-replica pre-coding coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecodeConfig {
    pub alpha: u32,
    pub enabled: bool,
}

/// Symbol-wise product `alpha * u`. With pre-coding disabled only `alpha = 1`
/// (a GF(2) coefficient) is meaningful and the symbols pass through.
pub fn precode(field: &Field, symbols: &[u32], cfg: PrecodeConfig) -> Result<Vec<u32>, FfError> {
    if cfg.enabled && cfg.alpha == 0 {
        return Err(FfError::ZeroCoefficient);
    }
    field.check(cfg.alpha)?;
    if !cfg.enabled {
        return Ok(symbols.to_vec());
    }
    symbols.iter().map(|&s| field.check(s).map(|s| field.mul(cfg.alpha, s))).collect()
}

/// Inverse of [`precode`].
pub fn unprecode(field: &Field, symbols: &[u32], cfg: PrecodeConfig) -> Result<Vec<u32>, FfError> {
    if !cfg.enabled {
        return Ok(symbols.to_vec());
    }
    let inv = field.inv(cfg.alpha).ok_or(FfError::ZeroCoefficient)?;
    precode(field, symbols, PrecodeConfig { alpha: inv, enabled: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn gf(p: u32) -> Field {
        Field::new(FieldSpec::prime(p)).unwrap()
    }

    #[test]
    fn small_ranks() {
        let f2 = Field::new(FieldSpec::binary(1)).unwrap();
        assert_eq!(ff_rank(&FfMatrix::identity(f2.clone(), 3)), 3);
        let ones = FfMatrix::from_rows(f2, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(ff_rank(&ones), 1);
    }

    #[test]
    fn gf5_hand_system() {
        let f = gf(5);
        let b = FfMatrix::from_rows(f.clone(), &[vec![1, 2], vec![3, 4]]).unwrap();
        let w = FfMatrix::from_rows(f.clone(), &[vec![4, 0, 2], vec![1, 3, 3]]).unwrap();
        let u = b.mul(&w).unwrap();
        let rep = ff_solve(&EquationSystem::new(b, u).unwrap()).unwrap();
        assert_eq!(rep.solution().unwrap(), vec![vec![4, 0, 2], vec![1, 3, 3]]);
    }

    #[test]
    fn identity_passes_rhs_through() {
        let f = gf(257);
        let b = FfMatrix::identity(f.clone(), 3);
        let u = FfMatrix::from_rows(f, &[vec![5], vec![6], vec![7]]).unwrap();
        let rep = ff_solve(&EquationSystem::new(b, u).unwrap()).unwrap();
        assert_eq!(rep.solution().unwrap(), vec![vec![5], vec![6], vec![7]]);
    }

    #[test]
    fn duplicate_rows_are_rank_deficient() {
        let f = Field::new(FieldSpec::binary(1)).unwrap();
        let b = FfMatrix::from_rows(f.clone(), &[vec![1, 1], vec![1, 1]]).unwrap();
        let u = FfMatrix::from_rows(f, &[vec![1], vec![1]]).unwrap();
        let rep = ff_solve(&EquationSystem::new(b, u).unwrap()).unwrap();
        assert_eq!(rep.rank, 1);
        assert!(!rep.is_unique());
        assert_eq!(rep.recovered_count(), 0);
    }

    #[test]
    fn contradiction_is_flagged() {
        let f = gf(7);
        let b = FfMatrix::from_rows(f.clone(), &[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let u = FfMatrix::from_rows(f, &[vec![1], vec![2], vec![4]]).unwrap();
        assert!(matches!(ff_solve(&EquationSystem::new(b, u).unwrap()), Err(FfError::Inconsistent { .. })));
    }

    #[test]
    fn partial_recovery() {
        // w0 pinned, w1 and w2 only through their sum.
        let f = gf(11);
        let b = FfMatrix::from_rows(f.clone(), &[vec![1, 0, 0], vec![0, 1, 1]]).unwrap();
        let u = FfMatrix::from_rows(f, &[vec![3], vec![9]]).unwrap();
        let rep = ff_solve(&EquationSystem::new(b, u).unwrap()).unwrap();
        assert_eq!(rep.recovered, vec![Some(vec![3]), None, None]);
    }

    #[test]
    fn gf4_precode() {
        let f = Field::new(FieldSpec::binary(2)).unwrap();
        let cfg = PrecodeConfig { alpha: 2, enabled: true };
        assert_eq!(precode(&f, &[1, 2], cfg).unwrap(), vec![2, 3]);
        assert_eq!(unprecode(&f, &[2, 3], cfg).unwrap(), vec![1, 2]);
        assert_eq!(
            precode(&f, &[1, 2], PrecodeConfig { alpha: 0, enabled: true }),
            Err(FfError::ZeroCoefficient)
        );
        assert_eq!(precode(&f, &[1, 2], PrecodeConfig { alpha: 1, enabled: false }).unwrap(), vec![1, 2]);
    }
}
