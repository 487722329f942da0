//! Exact single-PM feasibility: scalar capacities plus the disk matching
//! problem under per-VM anti-colocation.
//!
//! The matcher is a complete backtracking search. VMs are placed in
//! descending order of (largest volume, volume count), each VM's volumes in
//! descending size, and candidate disks in descending remaining capacity.
//! Three reductions keep it exact:
//!
//! * among disks not yet used by the current VM, disks of equal remaining
//!   capacity are interchangeable, so only the lowest-indexed one is tried;
//! * equal volumes of one VM are interchangeable, so their disk indices are
//!   forced to increase;
//! * the state between two VMs is fully described by the multiset of
//!   remaining capacities, so failed `(vm position, sorted capacities)` pairs
//!   are memoized for the duration of one call.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Catalog, PmType};

/// Disk placement of one VM: `disks[k]` is the physical disk holding
/// virtual disk `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessVm {
    pub vm_type: usize,
    pub disks: Vec<usize>,
}

/// One witness entry per VM of the mix, in catalog type order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskWitness {
    pub vms: Vec<WitnessVm>,
}

impl DiskWitness {
    /// Re-check anti-colocation and disk capacities from raw data.
    pub fn is_sound(&self, catalog: &Catalog, pm: &PmType) -> bool {
        let mut load = vec![0u64; pm.disks.len()];
        for entry in &self.vms {
            let Some(vm) = catalog.vm_types().get(entry.vm_type) else {
                return false;
            };
            if entry.disks.len() != vm.volumes.len() {
                return false;
            }
            let mut seen = HashSet::new();
            for (&l, &vol) in entry.disks.iter().zip(&vm.volumes) {
                if l >= load.len() || !seen.insert(l) {
                    return false;
                }
                load[l] += vol;
            }
        }
        load.iter().zip(&pm.disks).all(|(used, cap)| used <= cap)
    }
}

fn check_dim(catalog: &Catalog, mix: &[u32]) -> Result<()> {
    let expected = catalog.vm_types().len();
    if mix.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: mix.len(),
        });
    }
    Ok(())
}

/// Total vCPU and memory (MiB) requested by a mix.
pub fn mix_demand(catalog: &Catalog, mix: &[u32]) -> (u64, u64) {
    catalog
        .vm_types()
        .iter()
        .zip(mix)
        .fold((0, 0), |(c, m), (vm, &n)| {
            (c + vm.vcpus as u64 * n as u64, m + vm.memory_mib * n as u64)
        })
}

pub fn scalar_feasible(catalog: &Catalog, mix: &[u32], pm: &PmType) -> Result<bool> {
    check_dim(catalog, mix)?;
    let (cpu, mem) = mix_demand(catalog, mix);
    Ok(cpu <= pm.vcpus as u64 && mem <= pm.memory_mib)
}

pub fn disk_assignment(catalog: &Catalog, mix: &[u32], pm: &PmType) -> Result<Option<DiskWitness>> {
    check_dim(catalog, mix)?;
    let mut types = Vec::new();
    let mut volumes: Vec<&[u64]> = Vec::new();
    for (u, &n) in mix.iter().enumerate() {
        for _ in 0..n {
            types.push(u);
            volumes.push(&catalog.vm_types()[u].volumes);
        }
    }
    Ok(match_disks(&volumes, &pm.disks).map(|assign| DiskWitness {
        vms: types
            .into_iter()
            .zip(assign)
            .map(|(vm_type, disks)| WitnessVm { vm_type, disks })
            .collect(),
    }))
}

pub fn config_feasible(catalog: &Catalog, mix: &[u32], pm: &PmType) -> Result<bool> {
    Ok(scalar_feasible(catalog, mix, pm)? && disk_assignment(catalog, mix, pm)?.is_some())
}

/// True iff a single VM with these volumes fits on distinct disks with the
/// given remaining capacities: the k-th largest volume must not exceed the
/// k-th largest capacity.
pub fn single_vm_fits(volumes: &[u64], capacities: &[u64]) -> bool {
    if volumes.len() > capacities.len() {
        return false;
    }
    let mut v = volumes.to_vec();
    let mut c = capacities.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    c.sort_unstable_by(|a, b| b.cmp(a));
    v.iter().zip(&c).all(|(a, b)| a <= b)
}

/// Lexicographically first assignment of one VM's volumes (in their given
/// order) to distinct disks, comparing candidate tuples by disk index.
pub fn first_fit_single(volumes: &[u64], capacities: &[u64]) -> Option<Vec<usize>> {
    if !single_vm_fits(volumes, capacities) {
        return None;
    }
    let mut used = vec![false; capacities.len()];
    let mut out = Vec::with_capacity(volumes.len());
    for (k, &vol) in volumes.iter().enumerate() {
        // Feasibility of the remainder is exactly the dominance test, so the
        // first disk that keeps it true is the lexicographic choice.
        let rest = &volumes[k + 1..];
        let chosen = (0..capacities.len()).find(|&l| {
            if used[l] || capacities[l] < vol {
                return false;
            }
            used[l] = true;
            let free: Vec<u64> = (0..capacities.len())
                .filter(|&d| !used[d])
                .map(|d| capacities[d])
                .collect();
            let ok = single_vm_fits(rest, &free);
            used[l] = false;
            ok
        })?;
        used[chosen] = true;
        out.push(chosen);
    }
    Some(out)
}

const MEMO_LIMIT: usize = 1 << 20;

/// Exact disk matching for several VMs. Returns, per VM in input order and
/// per volume in its original order, the chosen disk index.
pub fn match_disks(vms: &[&[u64]], capacities: &[u64]) -> Option<Vec<Vec<usize>>> {
    let total_vol: u64 = vms.iter().flat_map(|v| v.iter()).sum();
    let total_cap: u64 = capacities.iter().sum();
    if total_vol > total_cap || !vms.iter().all(|v| single_vm_fits(v, capacities)) {
        return None;
    }

    let mut order: Vec<usize> = (0..vms.len()).collect();
    let key = |i: usize| (vms[i].iter().copied().max().unwrap_or(0), vms[i].len());
    order.sort_by(|&a, &b| key(b).cmp(&key(a)));

    let items: Vec<Item> = order
        .iter()
        .map(|&i| {
            let mut idx: Vec<usize> = (0..vms[i].len()).collect();
            idx.sort_by(|&a, &b| vms[i][b].cmp(&vms[i][a]));
            let sizes: Vec<u64> = idx.iter().map(|&k| vms[i][k]).collect();
            Item { sizes, original: idx }
        })
        .collect();
    let mut suffix_vol = vec![0u64; items.len() + 1];
    for p in (0..items.len()).rev() {
        suffix_vol[p] = suffix_vol[p + 1] + items[p].sizes.iter().sum::<u64>();
    }

    let mut search = Search {
        items: &items,
        suffix_vol: &suffix_vol,
        remaining: capacities.to_vec(),
        used: vec![false; capacities.len()],
        chosen: items.iter().map(|it| vec![0; it.sizes.len()]).collect(),
        failed: HashSet::new(),
    };
    if !search.place_vm(0) {
        return None;
    }

    let mut out = vec![Vec::new(); vms.len()];
    for (p, &i) in order.iter().enumerate() {
        let mut disks = vec![0; vms[i].len()];
        for (pos, &k) in items[p].original.iter().enumerate() {
            disks[k] = search.chosen[p][pos];
        }
        out[i] = disks;
    }
    Some(out)
}

struct Item {
    sizes: Vec<u64>,
    original: Vec<usize>,
}

struct Search<'a> {
    items: &'a [Item],
    suffix_vol: &'a [u64],
    remaining: Vec<u64>,
    used: Vec<bool>,
    chosen: Vec<Vec<usize>>,
    failed: HashSet<(usize, Vec<u64>)>,
}

impl Search<'_> {
    fn place_vm(&mut self, pos: usize) -> bool {
        if pos == self.items.len() {
            return true;
        }
        if self.suffix_vol[pos] > self.remaining.iter().sum::<u64>() {
            return false;
        }
        if !single_vm_fits(&self.items[pos].sizes, &self.remaining) {
            return false;
        }
        let mut profile = self.remaining.clone();
        profile.sort_unstable();
        let key = (pos, profile);
        if self.failed.contains(&key) {
            return false;
        }
        let ok = self.place_volume(pos, 0);
        if !ok && self.failed.len() < MEMO_LIMIT {
            self.failed.insert(key);
        }
        ok
    }

    fn place_volume(&mut self, pos: usize, k: usize) -> bool {
        let item = &self.items[pos];
        if k == item.sizes.len() {
            let mine = self.chosen[pos].clone();
            for &l in &mine {
                self.used[l] = false;
            }
            let ok = self.place_vm(pos + 1);
            for &l in &mine {
                self.used[l] = true;
            }
            return ok;
        }
        let size = item.sizes[k];
        let min_index = if k > 0 && item.sizes[k - 1] == size {
            self.chosen[pos][k - 1] + 1
        } else {
            0
        };
        let mut candidates: Vec<usize> = (min_index..self.remaining.len())
            .filter(|&l| !self.used[l] && self.remaining[l] >= size)
            .collect();
        candidates.sort_by(|&a, &b| self.remaining[b].cmp(&self.remaining[a]).then(a.cmp(&b)));
        candidates.dedup_by(|b, a| self.remaining[*a] == self.remaining[*b]);
        for l in candidates {
            self.remaining[l] -= size;
            self.used[l] = true;
            self.chosen[pos][k] = l;
            let ok = self.place_volume(pos, k + 1);
            self.used[l] = false;
            self.remaining[l] += size;
            if ok {
                return true;
            }
        }
        false
    }
}
