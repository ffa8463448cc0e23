use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{CMatrix, CVector, C64};
use crate::capture::db_to_linear;
use crate::error::SparseError;

/// Spreading setup for code-domain multiple access.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadingConfig {
    pub n_sequences: usize,
    pub spreading_length: usize,
    #[serde(default = "default_pilot")]
    pub pilot_length: usize,
    #[serde(default = "default_data")]
    pub data_length: usize,
    #[serde(default = "one")]
    pub channel_taps: usize,
}

fn default_pilot() -> usize {
    1
}

fn default_data() -> usize {
    8
}

fn one() -> usize {
    1
}

impl Default for SpreadingConfig {
    fn default() -> Self {
        SpreadingConfig {
            n_sequences: 64,
            spreading_length: 32,
            pilot_length: default_pilot(),
            data_length: default_data(),
            channel_taps: 1,
        }
    }
}

impl SpreadingConfig {
    pub fn validate(&self) -> Result<(), SparseError> {
        let dims = [self.n_sequences, self.spreading_length, self.pilot_length, self.data_length, self.channel_taps];
        if dims.contains(&0) {
            return Err(SparseError::Dimension("spreading dimensions must be positive".into()));
        }
        if self.channel_taps > self.spreading_length {
            return Err(SparseError::Dimension("more channel taps than chips".into()));
        }
        Ok(())
    }
}

/// Draws `CN(0, 1)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Pseudo-noise measurement matrix with `K * N_h` columns.
///
/// Sequence chips are `(+-1 +-j) / sqrt(2 N_S)`, so every column has unit
/// norm. Tap `t` of a user is its sequence delayed cyclically by `t` chips.
pub fn pn_matrix<R: Rng + ?Sized>(config: &SpreadingConfig, rng: &mut R) -> CMatrix {
    let m = config.spreading_length;
    let taps = config.channel_taps;
    let scale = 1.0 / libm::sqrt(2.0 * m as f64);
    let mut a = CMatrix::zeros(m, config.n_sequences * taps);
    for user in 0..config.n_sequences {
        let seq: Vec<C64> = (0..m)
            .map(|_| {
                let re = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let im = if rng.random::<bool>() { 1.0 } else { -1.0 };
                C64::new(re, im) * scale
            })
            .collect();
        for t in 0..taps {
            for i in 0..m {
                a[(i, user * taps + t)] = seq[(i + m - t) % m];
            }
        }
    }
    a
}

/// Constraint level `sigma * sqrt(m + 2 sqrt(m))` on the residual norm; a
/// tiny floor keeps noiseless problems solvable in floating point.
pub fn default_epsilon(noise_sigma: f64, m: usize) -> f64 {
    let m = m as f64;
    (noise_sigma * libm::sqrt(m + 2.0 * libm::sqrt(m))).max(1e-9)
}

/// `y = S h + n` with a group-sparse `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseProblem {
    pub matrix: CMatrix,
    pub truth: CVector,
    pub noise: CVector,
    pub observation: CVector,
    pub group_size: usize,
    pub noise_sigma: f64,
    pub epsilon: f64,
    /// Active groups in ascending order.
    pub active_set: Vec<usize>,
}

impl SparseProblem {
    /// Assembles a problem from its parts; the observation is computed.
    pub fn from_parts(
        matrix: CMatrix,
        truth: CVector,
        noise: CVector,
        group_size: usize,
        noise_sigma: f64,
    ) -> Result<Self, SparseError> {
        if group_size == 0 || matrix.ncols() % group_size != 0 {
            return Err(SparseError::Dimension(format!(
                "{} columns do not split into groups of {group_size}",
                matrix.ncols()
            )));
        }
        if truth.len() != matrix.ncols() || noise.len() != matrix.nrows() {
            return Err(SparseError::Dimension("truth or noise length does not match the matrix".into()));
        }
        let observation = &matrix * &truth + &noise;
        let active_set = (0..matrix.ncols() / group_size)
            .filter(|g| (0..group_size).any(|t| truth[g * group_size + t] != C64::new(0.0, 0.0)))
            .collect();
        let epsilon = default_epsilon(noise_sigma, matrix.nrows());
        Ok(SparseProblem { matrix, truth, noise, observation, group_size, noise_sigma, epsilon, active_set })
    }

    pub fn n_groups(&self) -> usize {
        self.matrix.ncols() / self.group_size
    }
}

/// Random instance with `n_active` users on one-shot PN sequences.
///
/// Channel taps are `CN(0, 1/N_h)`, so each user delivers unit energy.
/// Noise is `CN(0, sigma^2)` per chip with `sigma^2 = 1 / (N_S * snr)`, i.e.
/// `snr` is the ratio of one user's received energy to the total noise
/// energy. `snr_db = inf` gives a noiseless instance.
pub fn generate_problem<R: Rng + ?Sized>(
    config: &SpreadingConfig,
    n_active: usize,
    snr_db: f64,
    rng: &mut R,
) -> Result<SparseProblem, SparseError> {
    config.validate()?;
    if n_active > config.n_sequences {
        return Err(SparseError::TooManyActive { active: n_active, available: config.n_sequences });
    }
    let matrix = pn_matrix(config, rng);
    let taps = config.channel_taps;
    let mut truth = CVector::zeros(matrix.ncols());
    let tap_scale = 1.0 / libm::sqrt(taps as f64);
    let mut active = sample(rng, config.n_sequences, n_active).into_vec();
    active.sort_unstable();
    for &user in &active {
        for t in 0..taps {
            truth[user * taps + t] = complex_normal(rng) * tap_scale;
        }
    }
    let m = config.spreading_length;
    let sigma = if snr_db.is_infinite() && snr_db > 0.0 {
        0.0
    } else {
        libm::sqrt(1.0 / (m as f64 * db_to_linear(snr_db)))
    };
    let noise = CVector::from_fn(m, |_, _| if sigma > 0.0 { complex_normal(rng) * sigma } else { C64::new(0.0, 0.0) });
    SparseProblem::from_parts(matrix, truth, noise, taps, sigma)
}

/// Common control channel of coded random access: the pilot part of every
/// user's signal seen through `m` rows of an `n`-point DFT.
///
/// `y_B = sqrt(alpha) A h + z` with `A = F_B / sqrt(m)` restricted to the
/// first `u * s` columns and `z ~ CN(0, sigma^2 / n)`, `sigma^2 = 1 / snr`.
#[derive(Clone, Debug)]
pub struct CcraControlChannel {
    pub n_subcarriers: usize,
    pub rows: Vec<usize>,
    pub alpha: f64,
    pub noise_var: f64,
    pub matrix: CMatrix,
}

impl CcraControlChannel {
    pub fn new<R: Rng + ?Sized>(
        n_subcarriers: usize,
        m: usize,
        columns: usize,
        alpha: f64,
        snr_db: f64,
        rng: &mut R,
    ) -> Result<Self, SparseError> {
        if m == 0 || m > n_subcarriers || columns > n_subcarriers {
            return Err(SparseError::Dimension(format!(
                "need m <= n and u*s <= n, got m={m}, u*s={columns}, n={n_subcarriers}"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(SparseError::Dimension("pilot fraction must lie in [0, 1]".into()));
        }
        let mut rows = sample(rng, n_subcarriers, m).into_vec();
        rows.sort_unstable();
        let scale = 1.0 / libm::sqrt(m as f64);
        let n = n_subcarriers as f64;
        let matrix = CMatrix::from_fn(m, columns, |j, c| {
            let phase = -2.0 * PI * ((rows[j] * c) % n_subcarriers) as f64 / n;
            C64::new(libm::cos(phase), libm::sin(phase)) * scale
        });
        let noise_var = 1.0 / (db_to_linear(snr_db) * n);
        Ok(CcraControlChannel { n_subcarriers, rows, alpha, noise_var, matrix })
    }

    /// Data share of the transmit power.
    pub fn alpha_prime(&self) -> f64 {
        1.0 - self.alpha
    }

    pub fn observe<R: Rng + ?Sized>(&self, h: &CVector, rng: &mut R) -> CVector {
        let sd = libm::sqrt(self.noise_var);
        let mut y = &self.matrix * h * C64::new(libm::sqrt(self.alpha), 0.0);
        for v in y.iter_mut() {
            *v += complex_normal(rng) * sd;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn columns_have_unit_norm() {
        let mut rng = stream(3, Stream::Scheme);
        let a = pn_matrix(&SpreadingConfig::default(), &mut rng);
        for c in 0..a.ncols() {
            assert!((a.column(c).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inactive_groups_are_zero_and_model_is_exact() {
        let mut rng = stream(4, Stream::Scheme);
        let p = generate_problem(&SpreadingConfig::default(), 8, 10.0, &mut rng).unwrap();
        assert_eq!(p.active_set.len(), 8);
        for g in 0..p.n_groups() {
            if !p.active_set.contains(&g) {
                assert_eq!(p.truth[g], C64::new(0.0, 0.0));
            }
        }
        assert_eq!(p.observation, &p.matrix * &p.truth + &p.noise);
    }

    #[test]
    fn zero_active_is_pure_noise() {
        let mut rng = stream(5, Stream::Scheme);
        let p = generate_problem(&SpreadingConfig::default(), 0, 10.0, &mut rng).unwrap();
        assert_eq!(p.observation, p.noise);
    }

    #[test]
    fn rejects_overload() {
        let mut rng = stream(5, Stream::Scheme);
        assert!(generate_problem(&SpreadingConfig::default(), 65, 10.0, &mut rng).is_err());
    }

    #[test]
    fn control_matrix_columns_unit_norm() {
        let mut rng = stream(6, Stream::Setup);
        let ch = CcraControlChannel::new(512, 64, 256, 0.2, 10.0, &mut rng).unwrap();
        assert!((ch.alpha + ch.alpha_prime() - 1.0).abs() < 1e-15);
        for c in 0..ch.matrix.ncols() {
            assert!((ch.matrix.column(c).norm() - 1.0).abs() < 1e-9);
        }
    }
}
