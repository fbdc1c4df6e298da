//! Cell loads, PF/RR resource-block shares and link capacities.
//!
//! Shares are kept fractional. Under PF a donor splits its RBs over its
//! direct UEs plus every UE behind each of its MIABs; under RR each MIAB
//! backhaul counts as a single UE. Quantities whose formula would divide by
//! an empty cell are reported as `None`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchedulerKind {
    /// Proportional fair.
    Pf,
    /// Round robin.
    Rr,
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchedulerKind::Pf => "PF",
            SchedulerKind::Rr => "RR",
        })
    }
}

/// The cell a UE is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellId {
    Fiab(usize),
    Miab(usize),
}

impl CellId {
    /// Position in the cell order `FIAB 0..F` then `MIAB 0..M`.
    pub fn index(self, fiab_count: usize) -> usize {
        match self {
            CellId::Fiab(k) => k,
            CellId::Miab(m) => fiab_count + m,
        }
    }

    pub fn from_index(index: usize, fiab_count: usize) -> Self {
        if index < fiab_count {
            CellId::Fiab(index)
        } else {
            CellId::Miab(index - fiab_count)
        }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellId::Fiab(k) => write!(f, "F{k}"),
            CellId::Miab(m) => write!(f, "M{m}"),
        }
    }
}

/// Per-cell load counters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LoadCounts {
    /// UEs attached to each MIAB.
    pub miab_ues: Vec<u32>,
    /// UEs attached directly to each FIAB.
    pub fiab_ues: Vec<u32>,
    /// RNTIs among which each FIAB splits its RBs.
    pub fiab_rntis: Vec<u32>,
    /// MIAB backhauls terminating at each FIAB.
    pub fiab_backhauls: Vec<u32>,
}

/// Counts loads for a single-association assignment.
///
/// `backhaul_donor[m]` is the FIAB serving MIAB `m`. Cells referenced out of
/// range are ignored; structural checks belong to the caller.
pub fn compute_loads(
    ue_cells: &[CellId],
    backhaul_donor: &[usize],
    fiab_count: usize,
    scheduler: SchedulerKind,
) -> LoadCounts {
    let mut miab_ues = vec![0u32; backhaul_donor.len()];
    let mut fiab_ues = vec![0u32; fiab_count];
    for cell in ue_cells {
        match *cell {
            CellId::Fiab(k) if k < fiab_count => fiab_ues[k] += 1,
            CellId::Miab(m) if m < miab_ues.len() => miab_ues[m] += 1,
            _ => {}
        }
    }
    let mut fiab_rntis = fiab_ues.clone();
    let mut fiab_backhauls = vec![0u32; fiab_count];
    for (m, &k) in backhaul_donor.iter().enumerate() {
        if k >= fiab_count {
            continue;
        }
        fiab_backhauls[k] += 1;
        fiab_rntis[k] += match scheduler {
            SchedulerKind::Pf => miab_ues[m],
            SchedulerKind::Rr => 1,
        };
    }
    LoadCounts { miab_ues, fiab_ues, fiab_rntis, fiab_backhauls }
}

/// RB shares seen by one MIAB and its donor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RbAllocation {
    /// Per direct UE of the donor.
    pub access_fiab: Option<f64>,
    /// Per UE of the MIAB.
    pub access_miab: Option<f64>,
    /// For the MIAB backhaul.
    pub backhaul: Option<f64>,
}

pub fn rb_allocation(rb_per_slot: f64, miab_ues: u32, fiab_rntis: u32, scheduler: SchedulerKind) -> RbAllocation {
    let b = rb_per_slot;
    let u_m = f64::from(miab_ues);
    let u_z = f64::from(fiab_rntis);
    let access_fiab = (fiab_rntis > 0).then(|| b / u_z);
    let access_miab = (miab_ues > 0).then(|| b / u_m);
    let backhaul = match scheduler {
        SchedulerKind::Pf if miab_ues == 0 => Some(0.0),
        SchedulerKind::Pf => (fiab_rntis > 0).then(|| b * u_m / u_z),
        SchedulerKind::Rr => (fiab_rntis > 0).then(|| b / u_z),
    };
    RbAllocation { access_fiab, access_miab, backhaul }
}

pub fn link_bandwidth(rb: f64, delta_hz: f64) -> f64 {
    rb * delta_hz
}

/// `B * delta * eta / divisor`: `U_m` for MIAB access, `U_z` for FIAB access.
pub fn access_capacity(rb_per_slot: f64, delta_hz: f64, eta: f64, divisor: u32) -> Option<f64> {
    (divisor > 0).then(|| rb_per_slot * delta_hz * eta / f64::from(divisor))
}

/// Capacity of a MIAB backhaul from its donor, in bit/s.
pub fn backhaul_capacity(
    rb_per_slot: f64,
    delta_hz: f64,
    eta: f64,
    miab_ues: u32,
    fiab_rntis: u32,
    scheduler: SchedulerKind,
) -> Option<f64> {
    match scheduler {
        SchedulerKind::Pf if miab_ues == 0 => Some(0.0),
        SchedulerKind::Pf => {
            (fiab_rntis > 0).then(|| rb_per_slot * f64::from(miab_ues) * delta_hz * eta / f64::from(fiab_rntis))
        }
        SchedulerKind::Rr => (fiab_rntis > 0).then(|| rb_per_slot * delta_hz * eta / f64::from(fiab_rntis)),
    }
}
