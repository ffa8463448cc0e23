//! Bloom-filter access signatures over a frame of PRACH occasions.

use alloc::vec::Vec;
use rand::Rng;

use crate::capture::DetectionModel;
use crate::resource::SignatureFramePlan;

/// Preamble activation pattern of one identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    /// Active positions `subframe * M + preamble`, ascending, no repeats.
    positions: Vec<u32>,
    preambles_per_prach: u32,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes `identity` with `k` independent hash functions onto the `L * M`
/// positions of the frame. Coinciding hashes leave fewer than `k` bits set.
pub fn build_signature(identity: &[u8], plan: &SignatureFramePlan) -> Signature {
    let base = fnv1a(identity);
    let n = plan.positions() as u128;
    let mut positions: Vec<u32> = (0..plan.hashes_per_signature as u64)
        .map(|j| {
            let h = splitmix(base ^ splitmix(j + 1));
            ((h as u128 * n) >> 64) as u32
        })
        .collect();
    positions.sort_unstable();
    positions.dedup();
    Signature { positions, preambles_per_prach: plan.preambles_per_prach }
}

impl Signature {
    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn set_bits(&self) -> usize {
        self.positions.len()
    }

    pub fn to_bits(&self, plan: &SignatureFramePlan) -> Vec<bool> {
        let mut bits = alloc::vec![false; plan.positions()];
        for &p in &self.positions {
            bits[p as usize] = true;
        }
        bits
    }

    /// Membership test `s AND y == s`.
    pub fn covered_by(&self, observation: &[bool]) -> bool {
        self.positions.iter().all(|&p| observation[p as usize])
    }

    /// Subframe in which the last active preamble is sent; the test can
    /// pass no earlier.
    pub fn last_subframe(&self) -> u32 {
        self.positions.last().map_or(0, |&p| p / self.preambles_per_prach)
    }
}

/// Bitwise OR of the signatures.
pub fn superpose<'a, I: IntoIterator<Item = &'a Signature>>(signatures: I, plan: &SignatureFramePlan) -> Vec<bool> {
    let mut y = alloc::vec![false; plan.positions()];
    for s in signatures {
        for &p in &s.positions {
            y[p as usize] = true;
        }
    }
    y
}

/// Observed signature frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureFrameResult {
    /// Universe indices passing the membership test, ascending.
    pub decoded: Vec<usize>,
    /// Decoded indices that did not transmit.
    pub false_positives: Vec<usize>,
    pub observation: Vec<bool>,
}

/// One frame: `active` universe members transmit; every position is then
/// seen through `detection` (one draw per position) and the whole universe
/// is tested for membership.
pub fn scheme_signature_frame<R: Rng + ?Sized>(
    active: &[usize],
    universe: &[Signature],
    plan: &SignatureFramePlan,
    detection: &DetectionModel,
    rng: &mut R,
) -> SignatureFrameResult {
    let mut counts = alloc::vec![0u32; plan.positions()];
    for &a in active {
        for &p in universe[a].positions() {
            counts[p as usize] += 1;
        }
    }
    let observation: Vec<bool> = counts.iter().map(|&c| detection.detect(c as usize, rng)).collect();
    let mut is_active = alloc::vec![false; universe.len()];
    for &a in active {
        is_active[a] = true;
    }
    let decoded: Vec<usize> = (0..universe.len()).filter(|&i| universe[i].covered_by(&observation)).collect();
    let false_positives = decoded.iter().copied().filter(|&i| !is_active[i]).collect();
    SignatureFrameResult { decoded, false_positives, observation }
}
