//! Sparse compute-and-forward over a cloud of mini base stations.
//!
//! Every device sends the same message in a few frequency slots. Each mini
//! base station independently decodes, per slot, two GF(p) linear equations
//! over the messages of the colliders there (each device carries two
//! independent unknowns). The macro base station stacks everything it
//! received and recovers what the equations determine.

use alloc::vec::Vec;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AccessScheme, BuildContext, Outcome, TableRef};
use crate::capture::SnrDecodeTable;
use crate::error::SimError;
use crate::ff::{ff_solve, EquationSystem, FfMatrix, Field, FieldSpec};
use crate::rng::SimRng;
use crate::sim::DeviceId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScfParams {
    pub slots: u32,
    /// Slots carrying each message.
    pub replicas: u32,
    pub mini_bs: u32,
    /// Prime field order.
    pub prime: u32,
    pub unknowns_per_device: u32,
    pub message_symbols: u32,
    /// Equations each mini base station extracts from a decodable slot.
    pub equations_per_slot: u32,
    pub snr_db: f64,
    pub decode_table: TableRef,
}

impl Default for ScfParams {
    fn default() -> Self {
        ScfParams {
            slots: 50,
            replicas: 4,
            mini_bs: 4,
            prime: 257,
            unknowns_per_device: 2,
            message_symbols: 4,
            equations_per_slot: 2,
            snr_db: 20.0,
            decode_table: TableRef::Builtin("scf".into()),
        }
    }
}

impl ScfParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Scheme(m.into()));
        if self.replicas == 0 || self.replicas > self.slots {
            return bad("need 1 <= replicas <= slots");
        }
        if self.mini_bs == 0 || self.unknowns_per_device == 0 || self.message_symbols == 0 {
            return bad("mini_bs, unknowns_per_device and message_symbols must be positive");
        }
        Field::new(FieldSpec::prime(self.prime)).map_err(|e| SimError::Scheme(alloc::format!("{e}")))?;
        self.decode_table.resolve()?;
        Ok(())
    }
}

/// Summary of one resolved frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScfFrameReport {
    pub devices: usize,
    pub resolved: Vec<bool>,
    /// Rank of the full stacked system.
    pub rank: usize,
    pub unknowns: usize,
}

struct Equation {
    terms: Vec<(usize, u32)>,
    rhs: Vec<u32>,
}

pub struct Scf {
    params: ScfParams,
    field: Field,
    table: SnrDecodeTable,
    ack_delay: u64,
    last_report: Option<ScfFrameReport>,
}

impl Scf {
    pub fn new(params: &ScfParams, ctx: &BuildContext) -> Result<Self, SimError> {
        params.validate()?;
        Ok(Scf {
            params: params.clone(),
            field: Field::new(FieldSpec::prime(params.prime)).map_err(|e| SimError::Scheme(alloc::format!("{e}")))?,
            table: params.decode_table.resolve()?,
            ack_delay: ctx.arq.ack_delay_ttis as u64,
            last_report: None,
        })
    }

    pub fn last_report(&self) -> Option<&ScfFrameReport> {
        self.last_report.as_ref()
    }

    /// Draws and resolves one frame with `n` devices.
    pub fn run_frame(&self, n: usize, rng: &mut SimRng) -> ScfFrameReport {
        let f = &self.field;
        let p = &self.params;
        let u = p.unknowns_per_device as usize;
        let k = p.message_symbols as usize;
        let unknowns = n * u;
        let truth: Vec<Vec<u32>> = (0..unknowns).map(|_| (0..k).map(|_| f.random(rng)).collect()).collect();
        let mut slot_users: Vec<Vec<usize>> = alloc::vec![Vec::new(); p.slots as usize];
        for d in 0..n {
            for s in sample(rng, p.slots as usize, p.replicas as usize) {
                slot_users[s].push(d);
            }
        }
        let mut slot_eqs: Vec<Vec<Equation>> = Vec::with_capacity(slot_users.len());
        for users in &slot_users {
            let mut eqs = Vec::new();
            if !users.is_empty() {
                let pd = self.table.p_decode(p.snr_db, users.len());
                for _ in 0..p.mini_bs {
                    if rng.random::<f64>() >= pd {
                        continue;
                    }
                    for _ in 0..p.equations_per_slot {
                        let terms: Vec<(usize, u32)> = users
                            .iter()
                            .flat_map(|&d| (0..u).map(move |j| d * u + j))
                            .map(|x| (x, f.random_nonzero(rng)))
                            .collect();
                        let mut rhs = alloc::vec![0u32; k];
                        for &(x, a) in &terms {
                            for (r, &m) in rhs.iter_mut().zip(&truth[x]) {
                                *r = f.add(*r, f.mul(a, m));
                            }
                        }
                        eqs.push(Equation { terms, rhs });
                    }
                }
            }
            slot_eqs.push(eqs);
        }

        let mut known: Vec<Option<Vec<u32>>> = alloc::vec![None; unknowns];
        // Local solves per slot until nothing moves, then one global solve.
        loop {
            let mut progress = false;
            for eqs in &slot_eqs {
                if !eqs.is_empty() && self.solve_into(eqs.iter(), &mut known).0 > 0 {
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        let open_before = known.iter().filter(|m| m.is_none()).count();
        let residual_rank =
            if open_before > 0 { self.solve_into(slot_eqs.iter().flatten(), &mut known).1 } else { 0 };
        for (x, m) in known.iter().enumerate() {
            if let Some(m) = m {
                assert_eq!(m, &truth[x], "recovered message differs from the transmitted one");
            }
        }
        let resolved: Vec<bool> = (0..n).map(|d| (0..u).all(|j| known[d * u + j].is_some())).collect();
        let n_known = unknowns - open_before;
        let rank = n_known + residual_rank;
        let all_resolved = resolved.iter().all(|&r| r);
        assert_eq!(all_resolved, rank == unknowns, "frame resolution disagrees with the rank condition");
        ScfFrameReport { devices: n, resolved, rank, unknowns }
    }

    /// Solves the equations after substituting known unknowns; returns how
    /// many new unknowns were recovered and the rank of the reduced system.
    fn solve_into<'a>(&self, eqs: impl Iterator<Item = &'a Equation>, known: &mut [Option<Vec<u32>>]) -> (usize, usize) {
        let f = &self.field;
        let (cols, rows) = self.reduce(eqs, known);
        if cols.is_empty() || rows.is_empty() {
            return (0, 0);
        }
        let k = self.params.message_symbols as usize;
        let mut b = FfMatrix::zeros(f.clone(), rows.len(), cols.len());
        let mut r = FfMatrix::zeros(f.clone(), rows.len(), k);
        for (i, (terms, rhs)) in rows.iter().enumerate() {
            for &(c, a) in terms {
                b.set(i, c, a);
            }
            for (j, &v) in rhs.iter().enumerate() {
                r.set(i, j, v);
            }
        }
        let report = ff_solve(&EquationSystem::new(b, r).expect("shapes match")).expect("equations are consistent");
        let mut found = 0;
        for (c, rec) in report.recovered.into_iter().enumerate() {
            if let Some(m) = rec {
                known[cols[c]] = Some(m);
                found += 1;
            }
        }
        (found, report.rank)
    }

    #[allow(clippy::type_complexity)]
    fn reduce<'a>(
        &self,
        eqs: impl Iterator<Item = &'a Equation>,
        known: &[Option<Vec<u32>>],
    ) -> (Vec<usize>, Vec<(Vec<(usize, u32)>, Vec<u32>)>) {
        let f = &self.field;
        let mut cols: Vec<usize> = Vec::new();
        let mut col_of = alloc::vec![usize::MAX; known.len()];
        let mut rows = Vec::new();
        for eq in eqs {
            let mut rhs = eq.rhs.clone();
            let mut terms = Vec::new();
            for &(x, a) in &eq.terms {
                match &known[x] {
                    Some(m) => {
                        for (r, &v) in rhs.iter_mut().zip(m) {
                            *r = f.sub(*r, f.mul(a, v));
                        }
                    }
                    None => {
                        if col_of[x] == usize::MAX {
                            col_of[x] = cols.len();
                            cols.push(x);
                        }
                        terms.push((col_of[x], a));
                    }
                }
            }
            if !terms.is_empty() {
                rows.push((terms, rhs));
            }
        }
        (cols, rows)
    }
}

impl AccessScheme for Scf {
    fn name(&self) -> &'static str {
        "scf"
    }

    fn on_tti(&mut self, now: u64, starting: &[DeviceId], rng: &mut SimRng, out: &mut Vec<Outcome>) {
        if starting.is_empty() {
            return;
        }
        let report = self.run_frame(starting.len(), rng);
        for (&device, &ok) in starting.iter().zip(&report.resolved) {
            out.push(if ok {
                Outcome::Success { device, tx_tti: now }
            } else {
                Outcome::Failure { device, feedback_tti: now + self.ack_delay }
            });
        }
        self.last_report = Some(report);
    }

    fn capacity_per_tti(&self) -> u32 {
        let p = &self.params;
        let equations = p.slots * p.mini_bs * p.equations_per_slot / p.unknowns_per_device;
        equations.min(p.slots * self.table.max_colliders() as u32)
    }
}
