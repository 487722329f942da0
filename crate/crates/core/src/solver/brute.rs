//! Exhaustive placement oracle for tiny instances. Shares no code with the
//! model builders; per-PM disk checks go through the exact matcher.

use crate::error::{Error, Result};
use crate::feasibility::match_disks;
use crate::model::{Instance, PmId, VmId};
use crate::solution::Placement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vms: usize,
    pub max_pms: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_vms: 8, max_pms: 5 }
    }
}

/// Minimum-cost placement and its cost, or `None` when infeasible.
pub fn brute_force(instance: &Instance) -> Result<Option<(Placement, u64)>> {
    brute_force_with(instance, OracleLimits::default())
}

pub fn brute_force_with(instance: &Instance, limits: OracleLimits) -> Result<Option<(Placement, u64)>> {
    let (n, m) = (instance.num_vms(), instance.num_pms());
    if n > limits.max_vms || m > limits.max_pms {
        return Err(Error::OracleGuard(format!(
            "{n} VMs and {m} PMs exceed the limit of {} VMs and {} PMs",
            limits.max_vms, limits.max_pms
        )));
    }
    let vms = instance.vms();
    let pms = instance.pms();
    let mut search = Search {
        instance,
        vms: &vms,
        pms: &pms,
        assign: vec![usize::MAX; n],
        cpu: vec![0; m],
        mem: vec![0; m],
        hosted: vec![Vec::new(); m],
        best: None,
    };
    search.dfs(0, 0);
    let Some((cost, assign)) = search.best else {
        return Ok(None);
    };
    let mut placement = Placement::default();
    for (p, &pm) in pms.iter().enumerate() {
        let on: Vec<usize> = (0..n).filter(|&i| assign[i] == p).collect();
        if on.is_empty() {
            continue;
        }
        let vols: Vec<&[u64]> = on.iter().map(|&i| instance.vm_type(vms[i]).volumes.as_slice()).collect();
        let disks = match_disks(&vols, &instance.pm_type(pm).disks)
            .ok_or_else(|| Error::Numerical("oracle lost a disk witness".into()))?;
        for (&i, d) in on.iter().zip(disks) {
            placement.vm_to_pm.insert(vms[i], pm);
            placement.disk_map.insert(vms[i], d);
        }
    }
    Ok(Some((placement, cost)))
}

struct Search<'a> {
    instance: &'a Instance,
    vms: &'a [VmId],
    pms: &'a [PmId],
    assign: Vec<usize>,
    cpu: Vec<u64>,
    mem: Vec<u64>,
    hosted: Vec<Vec<usize>>,
    best: Option<(u64, Vec<usize>)>,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize, cost: u64) {
        if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
            return;
        }
        if i == self.vms.len() {
            self.best = Some((cost, self.assign.clone()));
            return;
        }
        let vm = self.vms[i];
        let vm_ty = self.instance.vm_type(vm);
        for p in 0..self.pms.len() {
            let pm = self.pms[p];
            if !self.instance.allows(vm, pm) {
                continue;
            }
            let pm_ty = self.instance.pm_type(pm);
            if self.cpu[p] + vm_ty.vcpus as u64 > pm_ty.vcpus as u64
                || self.mem[p] + vm_ty.memory_mib > pm_ty.memory_mib
            {
                continue;
            }
            self.hosted[p].push(i);
            let vols: Vec<&[u64]> = self.hosted[p]
                .iter()
                .map(|&h| self.instance.vm_type(self.vms[h]).volumes.as_slice())
                .collect();
            if match_disks(&vols, &pm_ty.disks).is_some() {
                let opened = self.hosted[p].len() == 1;
                self.cpu[p] += vm_ty.vcpus as u64;
                self.mem[p] += vm_ty.memory_mib;
                self.assign[i] = p;
                self.dfs(i + 1, cost + if opened { pm_ty.cost } else { 0 });
                self.cpu[p] -= vm_ty.vcpus as u64;
                self.mem[p] -= vm_ty.memory_mib;
            }
            self.hosted[p].pop();
        }
        self.assign[i] = usize::MAX;
    }
}
