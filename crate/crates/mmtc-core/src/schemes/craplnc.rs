//! Coded random access with physical-layer network coding.
//!
//! Devices send `R` replicas in random slots of an `S`-slot frame, each
//! replica optionally pre-coded by a random nonzero GF(2^n) coefficient.
//! A slot yields either nothing or one linear equation over the messages of
//! its colliders, with probability from an SNR decode table. The receiver
//! runs standard SIC first and falls back to rank-based resolution of the
//! collected equations; decisions are made at the end of the frame.

use alloc::vec::Vec;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AccessScheme, BuildContext, Outcome, TableRef};
use crate::capture::SnrDecodeTable;
use crate::error::SimError;
use crate::ff::{ff_solve, EquationSystem, FfMatrix, Field, FieldSpec};
use crate::resource::FramePlan;
use crate::rng::SimRng;
use crate::sim::DeviceId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CraplncParams {
    pub frame: FramePlan,
    /// Independent frames running side by side (one per PRB).
    pub channels: u32,
    /// Extension degree `n` of GF(2^n).
    pub field_degree: u32,
    pub precoding: bool,
    pub message_symbols: u32,
    pub snr_db: f64,
    pub decode_table: TableRef,
}

impl Default for CraplncParams {
    fn default() -> Self {
        CraplncParams {
            frame: FramePlan { slots_per_frame: 10, replicas: 2 },
            channels: 50,
            field_degree: 8,
            precoding: true,
            message_symbols: 4,
            snr_db: 10.0,
            decode_table: TableRef::Builtin("plnc".into()),
        }
    }
}

impl CraplncParams {
    pub fn validate(&self) -> Result<(), SimError> {
        self.frame.validate()?;
        if self.channels == 0 || self.message_symbols == 0 {
            return Err(SimError::Scheme("channels and message_symbols must be positive".into()));
        }
        Field::new(FieldSpec::binary(self.field_degree)).map_err(|e| SimError::Scheme(alloc::format!("{e}")))?;
        self.decode_table.resolve()?;
        Ok(())
    }
}

/// One slot of a frame: who collided there, with which coefficients, and the
/// uniform draw that fixes whether it decodes for a given collider count.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotDraw {
    pub colliders: Vec<usize>,
    pub coefficients: Vec<u32>,
    pub draw: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameResolution {
    pub resolved: Vec<bool>,
    /// Equations gathered from decoded slots.
    pub equations: usize,
}

struct Equation {
    terms: Vec<(usize, u32)>,
    rhs: Vec<u32>,
}

/// Resolves one frame.
///
/// A slot decodes once `draw < p_decode(remaining colliders)`; remaining
/// colliders only shrink as devices resolve, so the outcome does not depend on
/// the slot order. `slot_order` fixes the SIC sweep order. Recovered messages
/// are checked against `messages`.
pub fn resolve_frame(
    field: &Field,
    messages: &[Vec<u32>],
    slots: &[SlotDraw],
    p_decode: &dyn Fn(usize) -> f64,
    slot_order: &[usize],
) -> FrameResolution {
    let n = messages.len();
    let k = messages.first().map_or(0, Vec::len);
    let mut known: Vec<Option<Vec<u32>>> = alloc::vec![None; n];
    let mut decoded = alloc::vec![false; slots.len()];
    let mut equations: Vec<Equation> = Vec::new();
    loop {
        // Standard SIC sweeps.
        loop {
            let mut progress = false;
            for &s in slot_order {
                let slot = &slots[s];
                if decoded[s] {
                    continue;
                }
                let open: Vec<usize> =
                    (0..slot.colliders.len()).filter(|&i| known[slot.colliders[i]].is_none()).collect();
                if open.is_empty() {
                    decoded[s] = true;
                    continue;
                }
                if slot.draw >= p_decode(open.len()) {
                    continue;
                }
                decoded[s] = true;
                let terms: Vec<(usize, u32)> =
                    slot.colliders.iter().zip(&slot.coefficients).map(|(&d, &a)| (d, a)).collect();
                let mut rhs = alloc::vec![0u32; k];
                for &(d, a) in &terms {
                    for (r, &m) in rhs.iter_mut().zip(&messages[d]) {
                        *r = field.add(*r, field.mul(a, m));
                    }
                }
                if open.len() == 1 {
                    let (d, a) = terms[open[0]];
                    let mut residual = rhs.clone();
                    for &(e, b) in &terms {
                        if let Some(me) = &known[e] {
                            for (r, &m) in residual.iter_mut().zip(me) {
                                *r = field.sub(*r, field.mul(b, m));
                            }
                        }
                    }
                    let inv = field.inv(a).expect("coefficients are nonzero");
                    known[d] = Some(residual.iter().map(|&r| field.mul(inv, r)).collect());
                    progress = true;
                }
                equations.push(Equation { terms, rhs });
            }
            if !progress {
                break;
            }
        }
        // Rank-based resolution of what SIC left.
        let unknown: Vec<usize> = (0..n).filter(|&d| known[d].is_none()).collect();
        if unknown.is_empty() || equations.is_empty() {
            break;
        }
        let mut col = alloc::vec![usize::MAX; n];
        for (j, &d) in unknown.iter().enumerate() {
            col[d] = j;
        }
        let mut b = FfMatrix::zeros(field.clone(), equations.len(), unknown.len());
        let mut u = FfMatrix::zeros(field.clone(), equations.len(), k);
        for (i, eq) in equations.iter().enumerate() {
            let mut rhs = eq.rhs.clone();
            for &(d, a) in &eq.terms {
                match &known[d] {
                    Some(md) => {
                        for (r, &m) in rhs.iter_mut().zip(md) {
                            *r = field.sub(*r, field.mul(a, m));
                        }
                    }
                    None => b.set(i, col[d], field.add(b.get(i, col[d]), a)),
                }
            }
            for (j, &r) in rhs.iter().enumerate() {
                u.set(i, j, r);
            }
        }
        let report = ff_solve(&EquationSystem::new(b, u).expect("shapes match")).expect("equations are consistent");
        let mut progress = false;
        for (j, rec) in report.recovered.into_iter().enumerate() {
            if let Some(m) = rec {
                known[unknown[j]] = Some(m);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    for (d, m) in known.iter().enumerate() {
        if let Some(m) = m {
            assert_eq!(m, &messages[d], "recovered message differs from the transmitted one");
        }
    }
    FrameResolution { resolved: known.iter().map(Option::is_some).collect(), equations: equations.len() }
}

pub struct Craplnc {
    params: CraplncParams,
    field: Field,
    table: SnrDecodeTable,
    ack_delay: u64,
    waiting: Vec<DeviceId>,
    frame: Vec<DeviceId>,
}

impl Craplnc {
    pub fn new(params: &CraplncParams, ctx: &BuildContext) -> Result<Self, SimError> {
        params.validate()?;
        let field = Field::new(FieldSpec::binary(params.field_degree)).map_err(|e| SimError::Scheme(alloc::format!("{e}")))?;
        Ok(Craplnc {
            params: params.clone(),
            field,
            table: params.decode_table.resolve()?,
            ack_delay: ctx.arq.ack_delay_ttis as u64,
            waiting: Vec::new(),
            frame: Vec::new(),
        })
    }

    fn run_frame(&mut self, frame_end: u64, rng: &mut SimRng, out: &mut Vec<Outcome>) {
        let devices = core::mem::take(&mut self.frame);
        let s = self.params.frame.slots_per_frame as usize;
        let r = self.params.frame.replicas as usize;
        let mut per_channel: Vec<Vec<usize>> = alloc::vec![Vec::new(); self.params.channels as usize];
        for i in 0..devices.len() {
            per_channel[rng.random_range(0..self.params.channels) as usize].push(i);
        }
        let mut resolved = alloc::vec![false; devices.len()];
        let order: Vec<usize> = (0..s).collect();
        for members in &per_channel {
            if members.is_empty() {
                continue;
            }
            let mut slots: Vec<SlotDraw> =
                (0..s).map(|_| SlotDraw { colliders: Vec::new(), coefficients: Vec::new(), draw: 0.0 }).collect();
            let messages: Vec<Vec<u32>> = members
                .iter()
                .map(|_| (0..self.params.message_symbols).map(|_| self.field.random(rng)).collect())
                .collect();
            for local in 0..members.len() {
                for slot in sample(rng, s, r) {
                    let alpha = if self.params.precoding { self.field.random_nonzero(rng) } else { 1 };
                    slots[slot].colliders.push(local);
                    slots[slot].coefficients.push(alpha);
                }
            }
            for slot in &mut slots {
                slot.draw = rng.random();
            }
            let snr = self.params.snr_db;
            let table = &self.table;
            let res = resolve_frame(&self.field, &messages, &slots, &|n| table.p_decode(snr, n), &order);
            for (local, &ok) in res.resolved.iter().enumerate() {
                resolved[members[local]] = ok;
            }
        }
        for (i, &device) in devices.iter().enumerate() {
            out.push(if resolved[i] {
                Outcome::Success { device, tx_tti: frame_end }
            } else {
                Outcome::Failure { device, feedback_tti: frame_end + self.ack_delay }
            });
        }
    }
}

impl AccessScheme for Craplnc {
    fn name(&self) -> &'static str {
        "craplnc"
    }

    fn on_tti(&mut self, now: u64, starting: &[DeviceId], rng: &mut SimRng, out: &mut Vec<Outcome>) {
        self.waiting.extend_from_slice(starting);
        let s = self.params.frame.slots_per_frame as u64;
        if now % s == 0 {
            self.frame = core::mem::take(&mut self.waiting);
        }
        if now % s == s - 1 {
            self.run_frame(now, rng, out);
        }
    }

    fn capacity_per_tti(&self) -> u32 {
        // A whole frame of devices can complete in its last TTI.
        self.params.channels * self.params.frame.slots_per_frame
    }
}
