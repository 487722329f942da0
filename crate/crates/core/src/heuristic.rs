//! Randomized greedy first-fit placement.
//!
//! One run draws from a single [`SplitMix64`] seeded with the run seed, in
//! this order: one shuffle of the VM list (ID order before shuffling), then
//! per VM one shuffle of the used-PM list and, only if no used PM fits, one
//! shuffle of the unused-PM list (PM ID order initially, opened PMs removed
//! in place). A PM fits when policy, vCPU, memory and the lexicographically
//! first disk assignment over the remaining disk capacities all allow it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::first_fit_single;
use crate::model::{Instance, PmId, VmId};
use crate::rng::SplitMix64;
use crate::solution::{cost, Placement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicParams {
    pub seed: u64,
    pub runs: usize,
}

/// One placement decision of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub vm: VmId,
    pub pm: PmId,
    pub opened: bool,
}

#[derive(Debug, Clone)]
struct PmState {
    id: PmId,
    cpu: u64,
    mem: u64,
    disks: Vec<u64>,
}

impl PmState {
    fn accommodate(&self, instance: &Instance, vm: VmId) -> Option<Vec<usize>> {
        if !instance.allows(vm, self.id) {
            return None;
        }
        let ty = instance.vm_type(vm);
        if ty.vcpus as u64 > self.cpu || ty.memory_mib > self.mem {
            return None;
        }
        first_fit_single(&ty.volumes, &self.disks)
    }

    fn take(&mut self, instance: &Instance, vm: VmId, disks: &[usize]) {
        let ty = instance.vm_type(vm);
        self.cpu -= ty.vcpus as u64;
        self.mem -= ty.memory_mib;
        for (&l, &v) in disks.iter().zip(&ty.volumes) {
            self.disks[l] -= v;
        }
    }
}

/// Placement for `seed`, or `None` when some VM found no PM.
pub fn place_randomized(instance: &Instance, seed: u64) -> Option<Placement> {
    place_with_log(instance, seed).0
}

/// Like [`place_randomized`], also returning the decisions in order.
pub fn place_with_log(instance: &Instance, seed: u64) -> (Option<Placement>, Vec<Step>) {
    let mut rng = SplitMix64::new(seed);
    let mut vms = instance.vms();
    rng.shuffle(&mut vms);
    let mut pms: Vec<PmState> = instance
        .pms()
        .into_iter()
        .map(|id| {
            let ty = instance.pm_type(id);
            PmState { id, cpu: ty.vcpus as u64, mem: ty.memory_mib, disks: ty.disks.clone() }
        })
        .collect();
    let mut used: Vec<usize> = Vec::new();
    let mut unused: Vec<usize> = (0..pms.len()).collect();
    let mut placement = Placement::default();
    let mut log = Vec::with_capacity(vms.len());

    for vm in vms {
        let mut order = used.clone();
        rng.shuffle(&mut order);
        let mut choice = order
            .iter()
            .find_map(|&p| pms[p].accommodate(instance, vm).map(|d| (p, d, false)));
        if choice.is_none() {
            let mut order = unused.clone();
            rng.shuffle(&mut order);
            choice = order
                .iter()
                .find_map(|&p| pms[p].accommodate(instance, vm).map(|d| (p, d, true)));
        }
        let Some((p, disks, opened)) = choice else {
            return (None, log);
        };
        pms[p].take(instance, vm, &disks);
        if opened {
            unused.retain(|&q| q != p);
            used.push(p);
        }
        placement.vm_to_pm.insert(vm, pms[p].id);
        placement.disk_map.insert(vm, disks);
        log.push(Step { vm, pm: pms[p].id, opened });
    }
    (Some(placement), log)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// `None` for an infeasible run.
    pub cost: Option<u64>,
    pub used_pms: usize,
}

/// Per-run outcomes plus statistics over the feasible runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub runs: Vec<RunRecord>,
    pub mean: Option<f64>,
    pub min: Option<u64>,
    pub max: Option<u64>,
    /// Sample standard deviation; zero for a single feasible run.
    pub std_dev: Option<f64>,
    pub infeasible: usize,
}

impl RunStats {
    fn from_runs(runs: Vec<RunRecord>) -> RunStats {
        let costs: Vec<u64> = runs.iter().filter_map(|r| r.cost).collect();
        let infeasible = runs.len() - costs.len();
        let k = costs.len();
        let mean = (k > 0).then(|| costs.iter().sum::<u64>() as f64 / k as f64);
        let std_dev = mean.map(|m| {
            if k < 2 {
                0.0
            } else {
                let ss: f64 = costs.iter().map(|&c| (c as f64 - m).powi(2)).sum();
                (ss / (k - 1) as f64).sqrt()
            }
        });
        RunStats {
            mean,
            min: costs.iter().copied().min(),
            max: costs.iter().copied().max(),
            std_dev,
            infeasible,
            runs,
        }
    }
}

/// Independent runs with seeds `seed, seed + 1, ...`, executed in parallel.
pub fn run_batch(instance: &Instance, params: HeuristicParams) -> Result<RunStats> {
    if params.runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    let runs: Vec<RunRecord> = (0..params.runs)
        .into_par_iter()
        .map(|run| {
            let seed = params.seed.wrapping_add(run as u64);
            let placement = place_randomized(instance, seed);
            RunRecord {
                run,
                seed,
                cost: placement.as_ref().map(|p| cost(p, instance)),
                used_pms: placement.as_ref().map_or(0, |p| p.used_pms().len()),
            }
        })
        .collect();
    Ok(RunStats::from_runs(runs))
}
