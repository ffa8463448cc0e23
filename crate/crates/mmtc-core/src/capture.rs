//! Stand-in PHY models: data-resource capture, preamble detection, and
//! SNR-indexed decode tables for the schemes whose link level is abstracted.

use alloc::format;
use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// How packets sharing one data resource are decoded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CaptureModel {
    /// Single-user detection: only a lone packet survives.
    Sud,
    /// Idealized multi-user detection of up to `k` packets with distinct preambles.
    Mud { k: u32 },
    /// Each packet decoded independently with probability `p[n-1]` when `n` overlap.
    /// Overlaps beyond the table length are lost.
    Table { p: Vec<f64> },
}

impl CaptureModel {
    pub fn mud2() -> Self {
        CaptureModel::Mud { k: 2 }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            CaptureModel::Sud => Ok(()),
            CaptureModel::Mud { k } if *k >= 1 => Ok(()),
            CaptureModel::Mud { .. } => Err(SimError::Scheme("MUD needs k >= 1".into())),
            CaptureModel::Table { p } => {
                if p.iter().all(|v| (0.0..=1.0).contains(v)) {
                    Ok(())
                } else {
                    Err(SimError::Scheme("capture probabilities must lie in [0, 1]".into()))
                }
            }
        }
    }

    /// Packets a scheduler may place on one resource.
    pub fn grants_per_resource(&self) -> u32 {
        match self {
            CaptureModel::Mud { k } => *k,
            _ => 1,
        }
    }

    /// Decodes `n_packets` overlapping on one resource; returns the decoded
    /// packet indices in ascending order.
    pub fn resolve<R: Rng + ?Sized>(&self, n_packets: usize, distinct_preambles: bool, rng: &mut R) -> Vec<usize> {
        match self {
            CaptureModel::Sud => {
                if n_packets == 1 {
                    alloc::vec![0]
                } else {
                    Vec::new()
                }
            }
            CaptureModel::Mud { k } => {
                if n_packets >= 1 && n_packets <= *k as usize && (n_packets == 1 || distinct_preambles) {
                    (0..n_packets).collect()
                } else {
                    Vec::new()
                }
            }
            CaptureModel::Table { p } => {
                if n_packets == 0 {
                    return Vec::new();
                }
                let prob = p.get(n_packets - 1).copied().unwrap_or(0.0);
                (0..n_packets).filter(|_| rng.random::<f64>() < prob).collect()
            }
        }
    }
}

/// Preamble activity detector with misses and false alarms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionModel {
    pub p_detect: f64,
    pub p_false: f64,
}

impl Default for DetectionModel {
    fn default() -> Self {
        DetectionModel { p_detect: 0.99, p_false: 1e-3 }
    }
}

impl DetectionModel {
    pub const IDEAL: DetectionModel = DetectionModel { p_detect: 1.0, p_false: 0.0 };

    pub fn validate(&self) -> Result<(), SimError> {
        if (0.0..=1.0).contains(&self.p_detect) && (0.0..=1.0).contains(&self.p_false) {
            Ok(())
        } else {
            Err(SimError::Scheme("detection probabilities must lie in [0, 1]".into()))
        }
    }

    /// Reports activity on a preamble hit by `count` transmitters. Only
    /// `count >= 1` matters, never who sent it. Always consumes one draw.
    pub fn detect<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> bool {
        let u: f64 = rng.random();
        if count >= 1 {
            u < self.p_detect
        } else {
            u < self.p_false
        }
    }
}

/// Decode probability indexed by SNR (dB) and collider count.
///
/// Lookups between tabulated SNRs interpolate linearly in dB; outside the
/// range they clamp. Collider counts beyond the table decode with probability 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SnrDecodeTable {
    snr_db: Vec<f64>,
    /// `probs[i][n - 1]` for SNR point `i`.
    probs: Vec<Vec<f64>>,
}

impl SnrDecodeTable {
    /// Builds a table from `(snr_db, n_colliders, p_decode)` rows. Every SNR
    /// point must list the same collider counts `1..=n_max`.
    pub fn from_rows(rows: &[(f64, u32, f64)]) -> Result<Self, SimError> {
        if rows.is_empty() {
            return Err(SimError::Table("no rows".into()));
        }
        let mut snrs: Vec<f64> = Vec::new();
        for &(snr, _, _) in rows {
            if !snr.is_finite() {
                return Err(SimError::Table("non-finite SNR".into()));
            }
            if !snrs.contains(&snr) {
                snrs.push(snr);
            }
        }
        snrs.sort_by(f64::total_cmp);
        let n_max = rows.iter().map(|r| r.1).max().unwrap_or(0) as usize;
        if n_max == 0 || rows.iter().any(|r| r.1 == 0) {
            return Err(SimError::Table("collider counts start at 1".into()));
        }
        let mut probs = alloc::vec![alloc::vec![f64::NAN; n_max]; snrs.len()];
        for &(snr, n, p) in rows {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::Table(format!("p_decode {p} outside [0, 1]")));
            }
            let i = snrs.iter().position(|&s| s == snr).unwrap_or(0);
            let cell = &mut probs[i][n as usize - 1];
            if !cell.is_nan() {
                return Err(SimError::Table(format!("duplicate row for snr {snr} dB, n {n}")));
            }
            *cell = p;
        }
        for (i, row) in probs.iter().enumerate() {
            if row.iter().any(|p| p.is_nan()) {
                return Err(SimError::Table(format!("missing collider counts at snr {} dB", snrs[i])));
            }
            if row.windows(2).any(|w| w[1] > w[0]) {
                return Err(SimError::Table(format!(
                    "decode probability increases with colliders at snr {} dB",
                    snrs[i]
                )));
            }
        }
        Ok(SnrDecodeTable { snr_db: snrs, probs })
    }

    pub fn rows(&self) -> Vec<(f64, u32, f64)> {
        let mut out = Vec::new();
        for (i, &snr) in self.snr_db.iter().enumerate() {
            for (j, &p) in self.probs[i].iter().enumerate() {
                out.push((snr, j as u32 + 1, p));
            }
        }
        out
    }

    pub fn max_colliders(&self) -> usize {
        self.probs[0].len()
    }

    pub fn snr_points(&self) -> &[f64] {
        &self.snr_db
    }

    pub fn p_decode(&self, snr_db: f64, n_colliders: usize) -> f64 {
        if n_colliders == 0 {
            return 1.0;
        }
        if n_colliders > self.max_colliders() {
            return 0.0;
        }
        let j = n_colliders - 1;
        let s = &self.snr_db;
        if snr_db <= s[0] {
            return self.probs[0][j];
        }
        if snr_db >= s[s.len() - 1] {
            return self.probs[s.len() - 1][j];
        }
        let i = s.iter().position(|&x| x > snr_db).unwrap_or(s.len() - 1);
        let (s0, s1) = (s[i - 1], s[i]);
        let t = (snr_db - s0) / (s1 - s0);
        self.probs[i - 1][j] * (1.0 - t) + self.probs[i][j] * t
    }

    /// Physical-layer network coding slot decoder for coded random access.
    ///
    /// A lone packet at rate `r = 0.5` bit/symbol survives a Rayleigh block
    /// fade with probability `exp(-(2^r - 1) / snr)`. Each extra collider
    /// multiplies the outage exponent and costs a factor `0.7` for the
    /// equation search; more than four colliders never decode.
    pub fn plnc_default() -> Self {
        Self::plnc(0.7, 4)
    }

    /// Conservative variant: factor `0.5` per extra collider, at most three.
    pub fn plnc_conservative() -> Self {
        Self::plnc(0.5, 3)
    }

    fn plnc(penalty: f64, n_max: u32) -> Self {
        let threshold = libm::pow(2.0, 0.5) - 1.0;
        let mut rows = Vec::new();
        for snr in [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0] {
            let lin = db_to_linear(snr);
            for n in 1..=n_max {
                let p = libm::exp(-(n as f64) * threshold / lin) * libm::pow(penalty, (n - 1) as f64);
                rows.push((snr, n, p));
            }
        }
        Self::from_rows(&rows).expect("closed-form table is well formed")
    }

    /// Compute-and-forward equation decoder at one mini base station.
    ///
    /// `p(snr, n) = 0.97^(n-1) * (1 - exp(-snr / n))`: the equation is found
    /// unless the per-collider SNR share fades below 0 dB, with a small
    /// per-collider coefficient-search loss. Saturates above 20 dB. At most 9
    /// colliders.
    pub fn scf_default() -> Self {
        let mut rows = Vec::new();
        for snr in [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0] {
            let lin = db_to_linear(snr);
            for n in 1..=9u32 {
                let p = libm::pow(0.97, (n - 1) as f64) * (1.0 - libm::exp(-lin / n as f64));
                rows.push((snr, n, p));
            }
        }
        Self::from_rows(&rows).expect("closed-form table is well formed")
    }

    /// Shipped tables by name.
    pub fn builtin(name: &str) -> Result<Self, SimError> {
        match name {
            "plnc" => Ok(Self::plnc_default()),
            "plnc-conservative" => Ok(Self::plnc_conservative()),
            "scf" => Ok(Self::scf_default()),
            other => Err(SimError::Table(format!("unknown built-in table `{other}`"))),
        }
    }

    pub const BUILTINS: &'static [&'static str] = &["plnc", "plnc-conservative", "scf"];
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn sud_and_mud_rules() {
        let mut rng = stream(1, Stream::Scheme);
        assert_eq!(CaptureModel::Sud.resolve(1, true, &mut rng), [0]);
        assert!(CaptureModel::Sud.resolve(2, true, &mut rng).is_empty());
        assert_eq!(CaptureModel::mud2().resolve(2, true, &mut rng), [0, 1]);
        assert!(CaptureModel::mud2().resolve(2, false, &mut rng).is_empty());
        assert!(CaptureModel::mud2().resolve(3, true, &mut rng).is_empty());
        assert!(CaptureModel::mud2().resolve(0, true, &mut rng).is_empty());
    }

    #[test]
    fn mud1_is_sud() {
        let mut rng = stream(1, Stream::Scheme);
        for n in 0..5 {
            for d in [false, true] {
                assert_eq!(
                    CaptureModel::Mud { k: 1 }.resolve(n, d, &mut rng),
                    CaptureModel::Sud.resolve(n, d, &mut rng)
                );
            }
        }
    }

    #[test]
    fn detection_edges() {
        let mut rng = stream(2, Stream::Scheme);
        let ideal = DetectionModel::IDEAL;
        assert!(ideal.detect(3, &mut rng));
        assert!(!ideal.detect(0, &mut rng));
    }

    #[test]
    fn shipped_tables_are_monotone() {
        for name in SnrDecodeTable::BUILTINS {
            let t = SnrDecodeTable::builtin(name).unwrap();
            for &snr in t.snr_points() {
                for n in 1..t.max_colliders() {
                    assert!(t.p_decode(snr, n + 1) <= t.p_decode(snr, n));
                }
            }
        }
    }

    #[test]
    fn table_rejects_increasing_rows() {
        let rows = [(10.0, 1, 0.5), (10.0, 2, 0.6)];
        assert!(SnrDecodeTable::from_rows(&rows).is_err());
    }

    #[test]
    fn interpolation_and_limits() {
        let rows = [(0.0, 1, 0.2), (0.0, 2, 0.1), (10.0, 1, 0.6), (10.0, 2, 0.3)];
        let t = SnrDecodeTable::from_rows(&rows).unwrap();
        assert!((t.p_decode(5.0, 1) - 0.4).abs() < 1e-12);
        assert_eq!(t.p_decode(20.0, 2), 0.3);
        assert_eq!(t.p_decode(10.0, 3), 0.0);
    }
}
