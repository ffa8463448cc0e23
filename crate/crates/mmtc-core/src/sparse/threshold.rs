use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::SparseError;

/// `(k_u, k_s)` sparsity over `u` blocks of length `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSparsityPattern {
    pub n_blocks: usize,
    pub block_length: usize,
    pub active_blocks: usize,
    pub within_block_sparsity: usize,
}

impl BlockSparsityPattern {
    pub fn validate(&self) -> Result<(), SparseError> {
        if self.n_blocks == 0 || self.block_length == 0 {
            return Err(SparseError::Pattern("empty block structure".into()));
        }
        if self.active_blocks > self.n_blocks || self.within_block_sparsity > self.block_length {
            return Err(SparseError::Pattern(format!(
                "need k_u <= u and k_s <= s, got ({}, {}) for u={}, s={}",
                self.active_blocks, self.within_block_sparsity, self.n_blocks, self.block_length
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_blocks * self.block_length
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total sparsity `k_u * k_s`.
    pub fn sparsity(&self) -> usize {
        self.active_blocks * self.within_block_sparsity
    }
}

/// Indices of the `k` largest entries of `mag` (ties: lower index first).
fn top_k(mag: &[f64], offset: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..mag.len()).collect();
    idx.sort_by(|&a, &b| mag[b].total_cmp(&mag[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx.iter().map(|i| i + offset).collect()
}

/// Hierarchical thresholding `L_{k_u, k_s}`: keep the `k_s` largest entries
/// of every block, then the `k_u` blocks with the largest remaining l2 norm.
/// Returns exactly `k_u * k_s` indices, ascending. Ties go to the lower index.
pub fn block_column_threshold(values: &[C64], pattern: &BlockSparsityPattern) -> Result<Vec<usize>, SparseError> {
    pattern.validate()?;
    if values.len() != pattern.len() {
        return Err(SparseError::Dimension(format!(
            "vector of length {} for u*s = {}",
            values.len(),
            pattern.len()
        )));
    }
    let s = pattern.block_length;
    let mag: Vec<f64> = values.iter().map(|v| v.norm_sqr()).collect();
    let mut blocks: Vec<(f64, Vec<usize>)> = (0..pattern.n_blocks)
        .map(|b| {
            let kept = top_k(&mag[b * s..(b + 1) * s], b * s, pattern.within_block_sparsity);
            let energy = kept.iter().map(|&i| mag[i]).sum();
            (energy, kept)
        })
        .collect();
    let energies: Vec<f64> = blocks.iter().map(|b| b.0).collect();
    let chosen = top_k(&energies, 0, pattern.active_blocks);
    let mut support: Vec<usize> = chosen.into_iter().flat_map(|b| core::mem::take(&mut blocks[b].1)).collect();
    support.sort_unstable();
    Ok(support)
}

/// Plain hard thresholding: the `k` largest entries, ascending.
pub fn top_k_threshold(values: &[C64], k: usize) -> Vec<usize> {
    let mag: Vec<f64> = values.iter().map(|v| v.norm_sqr()).collect();
    let mut s = top_k(&mag, 0, k.min(values.len()));
    s.sort_unstable();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    fn pat(u: usize, s: usize, ku: usize, ks: usize) -> BlockSparsityPattern {
        BlockSparsityPattern { n_blocks: u, block_length: s, active_blocks: ku, within_block_sparsity: ks }
    }

    #[test]
    fn hand_example() {
        let v = re(&[1.0, 0.0, 2.0, 0.0, 5.0, 4.0]);
        assert_eq!(block_column_threshold(&v, &pat(2, 3, 1, 2)).unwrap(), [4, 5]);
    }

    #[test]
    fn zero_vector_takes_first_blocks() {
        let v = re(&[0.0; 8]);
        assert_eq!(block_column_threshold(&v, &pat(4, 2, 2, 1)).unwrap(), [0, 2]);
    }

    #[test]
    fn full_pattern_is_full_support() {
        let v = re(&[3.0, 1.0, 4.0, 1.0, 5.0, 9.0]);
        assert_eq!(block_column_threshold(&v, &pat(3, 2, 3, 2)).unwrap(), [0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn length_mismatch() {
        assert!(block_column_threshold(&re(&[1.0; 5]), &pat(2, 3, 1, 1)).is_err());
    }
}
