//! Enumeration of feasible configurations: nonzero per-VM-type count vectors
//! that one PM of a given type can host.
//!
//! Vectors are produced by a depth-first walk of the box
//! `0 <= w_u <= upper_bounds[u]` in lexicographic order (catalog VM order).
//! Feasibility is downward monotone, so the walk stops increasing `w_u` at the
//! first infeasible prefix. Each step carries the remaining disk capacities of
//! a witness for the current prefix; a new VM is first tried against those
//! leftovers and only on failure is the whole prefix re-matched from scratch.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::feasibility::{first_fit_single, match_disks, single_vm_fits};
use crate::model::{Catalog, PmType, Policy};

pub const DEFAULT_CAP: usize = 1_000_000;

/// All feasible configurations of one PM type, in lexicographic order.
/// Configuration `t` is the `t`-th vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSet {
    pub pm_type: String,
    pub policy_tag: String,
    dim: usize,
    data: Vec<u16>,
}

impl ConfigSet {
    pub fn from_vectors(pm_type: &str, policy_tag: &str, dim: usize, vectors: &[Vec<u32>]) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * vectors.len());
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            for &x in v {
                data.push(u16::try_from(x).map_err(|_| {
                    Error::InvalidModel(format!("configuration entry {x} does not fit in 16 bits"))
                })?);
            }
        }
        Ok(ConfigSet {
            pm_type: pm_type.to_string(),
            policy_tag: policy_tag.to_string(),
            dim,
            data,
        })
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 { 0 } else { self.data.len() / self.dim }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, t: usize) -> &[u16] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    /// Number of type-`u` VMs in configuration `t`.
    pub fn w(&self, t: usize, u: usize) -> u32 {
        self.data[t * self.dim + u] as u32
    }

    pub fn vector(&self, t: usize) -> Vec<u32> {
        self.get(t).iter().map(|&x| x as u32).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u16]> {
        self.data.chunks_exact(self.dim.max(1))
    }
}

/// Sound per-type caps on how many VMs of each type one PM can host.
///
/// A type gets 0 when the policy forbids it or a single copy cannot be
/// disk-matched; otherwise the minimum of the vCPU, memory and aggregate disk
/// capacity quotients. Anti-colocation is per VM, so disk count alone never
/// bounds the number of copies.
pub fn upper_bounds(pm: &PmType, catalog: &Catalog, policy: &Policy) -> Vec<u32> {
    let disk_total: u64 = pm.disks.iter().sum();
    catalog
        .vm_types()
        .iter()
        .map(|vm| {
            if !policy.allows(&pm.name, &vm.name) || !single_vm_fits(&vm.volumes, &pm.disks) {
                return 0;
            }
            let by_cpu = pm.vcpus as u64 / vm.vcpus as u64;
            let by_mem = pm.memory_mib / vm.memory_mib;
            let by_disk = disk_total / vm.volumes.iter().sum::<u64>();
            by_cpu.min(by_mem).min(by_disk) as u32
        })
        .collect()
}

/// Options beyond the PM type and policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions<'a> {
    pub cap: usize,
    /// Optional per-type demand; when present, `w_u <= demand[u]`.
    pub instance_cap: Option<&'a [u32]>,
}

impl Default for EnumerateOptions<'_> {
    fn default() -> Self {
        EnumerateOptions { cap: DEFAULT_CAP, instance_cap: None }
    }
}

pub fn enumerate(pm: &PmType, catalog: &Catalog, policy: &Policy, cap: usize) -> Result<ConfigSet> {
    enumerate_with(pm, catalog, policy, EnumerateOptions { cap, instance_cap: None })
}

pub fn enumerate_with(
    pm: &PmType,
    catalog: &Catalog,
    policy: &Policy,
    opts: EnumerateOptions<'_>,
) -> Result<ConfigSet> {
    let dim = catalog.vm_types().len();
    let mut bounds = upper_bounds(pm, catalog, policy);
    if let Some(demand) = opts.instance_cap {
        if demand.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: demand.len() });
        }
        for (b, &d) in bounds.iter_mut().zip(demand) {
            *b = (*b).min(d);
        }
    }
    let mut walk = Walk {
        catalog,
        pm,
        bounds: &bounds,
        cap: opts.cap,
        prefix: vec![0; dim],
        out: Vec::new(),
        count: 0,
    };
    let start = State { cpu: 0, mem: 0, remaining: pm.disks.clone() };
    if !walk.descend(0, &start) {
        return Err(Error::CapExceeded { pm_type: pm.name.clone(), cap: opts.cap });
    }
    Ok(ConfigSet {
        pm_type: pm.name.clone(),
        policy_tag: policy.digest(),
        dim,
        data: walk.out,
    })
}

#[derive(Clone)]
struct State {
    cpu: u64,
    mem: u64,
    remaining: Vec<u64>,
}

struct Walk<'a> {
    catalog: &'a Catalog,
    pm: &'a PmType,
    bounds: &'a [u32],
    cap: usize,
    prefix: Vec<u32>,
    out: Vec<u16>,
    count: usize,
}

impl Walk<'_> {
    /// Returns false once the cap is exceeded.
    fn descend(&mut self, u: usize, state: &State) -> bool {
        if u == self.bounds.len() {
            if self.prefix.iter().all(|&x| x == 0) {
                return true;
            }
            self.count += 1;
            if self.count > self.cap {
                return false;
            }
            self.out.extend(self.prefix.iter().map(|&x| x as u16));
            return true;
        }
        if !self.descend(u + 1, state) {
            return false;
        }
        let mut cur = state.clone();
        for _ in 0..self.bounds[u] {
            match self.add_one(u, &cur) {
                Some(next) => cur = next,
                None => break,
            }
            self.prefix[u] += 1;
            let ok = self.descend(u + 1, &cur);
            if !ok {
                self.prefix[u] = 0;
                return false;
            }
        }
        self.prefix[u] = 0;
        true
    }

    /// State after adding one type-`u` VM to the current prefix, if feasible.
    fn add_one(&self, u: usize, state: &State) -> Option<State> {
        let vm = &self.catalog.vm_types()[u];
        let cpu = state.cpu + vm.vcpus as u64;
        let mem = state.mem + vm.memory_mib;
        if cpu > self.pm.vcpus as u64 || mem > self.pm.memory_mib {
            return None;
        }
        if let Some(disks) = first_fit_single(&vm.volumes, &state.remaining) {
            let mut remaining = state.remaining.clone();
            for (&l, &size) in disks.iter().zip(&vm.volumes) {
                remaining[l] -= size;
            }
            return Some(State { cpu, mem, remaining });
        }
        // The leftover witness is stuck; re-match the whole extended prefix.
        let mut vms: Vec<&[u64]> = Vec::new();
        for (t, &n) in self.prefix.iter().enumerate() {
            let n = n + u32::from(t == u);
            for _ in 0..n {
                vms.push(&self.catalog.vm_types()[t].volumes);
            }
        }
        let assign = match_disks(&vms, &self.pm.disks)?;
        let mut remaining = self.pm.disks.clone();
        for (v, disks) in vms.iter().zip(&assign) {
            for (&l, &size) in disks.iter().zip(v.iter()) {
                remaining[l] -= size;
            }
        }
        Some(State { cpu, mem, remaining })
    }
}

/// Configuration count of one PM type, or a marker that the cap was passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountEntry {
    Count(usize),
    CapExceeded,
}

impl std::fmt::Display for CountEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CountEntry::Count(n) => write!(f, "{n}"),
            CountEntry::CapExceeded => f.write_str("cap-exceeded"),
        }
    }
}

/// Counts for every PM type of the catalog, computed in parallel.
pub fn count_table(catalog: &Catalog, policy: &Policy, cap: usize) -> Vec<(String, CountEntry)> {
    catalog
        .pm_types()
        .par_iter()
        .map(|pm| {
            let entry = match enumerate(pm, catalog, policy, cap) {
                Ok(set) => CountEntry::Count(set.len()),
                Err(_) => CountEntry::CapExceeded,
            };
            (pm.name.clone(), entry)
        })
        .collect()
}

/// On-disk store of enumeration results keyed by catalog digest, PM type,
/// policy digest, cap and optional instance cap.
#[derive(Debug, Clone)]
pub struct ConfigCache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    catalog_digest: String,
    pm_type: String,
    policy_digest: String,
    cap: usize,
    instance_cap: Option<Vec<u32>>,
    count: Option<usize>,
    configs: Option<Vec<Vec<u32>>>,
}

impl ConfigCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ConfigCache { dir: dir.into() }
    }

    /// `ANTICOLOC_CACHE` if set, else `./.anticoloc-cache`.
    pub fn default_dir() -> PathBuf {
        std::env::var_os("ANTICOLOC_CACHE")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".anticoloc-cache"))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &CacheFile) -> PathBuf {
        let mut h = Sha256::new();
        h.update(key.catalog_digest.as_bytes());
        h.update([0]);
        h.update(key.pm_type.as_bytes());
        h.update([0]);
        h.update(key.policy_digest.as_bytes());
        h.update(key.cap.to_le_bytes());
        if let Some(c) = &key.instance_cap {
            for x in c {
                h.update(x.to_le_bytes());
            }
        }
        let name = hex::encode(h.finalize());
        self.dir.join(format!("{}-{}.json", key.pm_type, &name[..16]))
    }

    /// Enumerate through the cache. Unreadable or mismatched cache files are
    /// recomputed and overwritten.
    pub fn enumerate_with(
        &self,
        pm: &PmType,
        catalog: &Catalog,
        policy: &Policy,
        opts: EnumerateOptions<'_>,
    ) -> Result<ConfigSet> {
        let mut key = CacheFile {
            catalog_digest: catalog.digest(),
            pm_type: pm.name.clone(),
            policy_digest: policy.digest(),
            cap: opts.cap,
            instance_cap: opts.instance_cap.map(<[u32]>::to_vec),
            count: None,
            configs: None,
        };
        let path = self.path(&key);
        if let Some(hit) = self.read(&path, &key) {
            return match hit.configs {
                Some(v) => ConfigSet::from_vectors(&pm.name, &key.policy_digest, catalog.vm_types().len(), &v),
                None => Err(Error::CapExceeded { pm_type: pm.name.clone(), cap: opts.cap }),
            };
        }
        let result = enumerate_with(pm, catalog, policy, opts);
        match &result {
            Ok(set) => {
                key.count = Some(set.len());
                key.configs = Some((0..set.len()).map(|t| set.vector(t)).collect());
            }
            Err(Error::CapExceeded { .. }) => {}
            Err(_) => return result,
        }
        std::fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec(&key)?)?;
        std::fs::rename(&tmp, &path)?;
        result
    }

    fn read(&self, path: &Path, key: &CacheFile) -> Option<CacheFile> {
        let bytes = std::fs::read(path).ok()?;
        let file: CacheFile = serde_json::from_slice(&bytes).ok()?;
        let same = file.catalog_digest == key.catalog_digest
            && file.pm_type == key.pm_type
            && file.policy_digest == key.policy_digest
            && file.cap == key.cap
            && file.instance_cap == key.instance_cap
            && file.count == file.configs.as_ref().map(Vec::len);
        same.then_some(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::config_feasible;
    use proptest::prelude::*;

    fn pm<'a>(catalog: &'a Catalog, name: &str) -> &'a PmType {
        &catalog.pm_types()[catalog.pm_index(name).unwrap()]
    }

    /// Every vector of the bounding box, checked one by one.
    fn box_scan(catalog: &Catalog, pm: &PmType, bounds: &[u32]) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut w = vec![0u32; bounds.len()];
        loop {
            if w.iter().any(|&x| x > 0) && config_feasible(catalog, &w, pm).unwrap() {
                out.push(w.clone());
            }
            let mut u = bounds.len();
            loop {
                if u == 0 {
                    return out;
                }
                u -= 1;
                if w[u] < bounds[u] {
                    w[u] += 1;
                    break;
                }
                w[u] = 0;
            }
        }
    }

    #[test]
    fn upper_bound_examples() {
        let cat = Catalog::builtin();
        let policy = Policy::allow_all();
        let s1 = upper_bounds(pm(&cat, "s1"), &cat, &policy);
        assert_eq!(s1[cat.vm_index("i2.8xlarge").unwrap()], 0);
        assert_eq!(s1[cat.vm_index("m3.medium").unwrap()], 4);
        let l2 = upper_bounds(pm(&cat, "l2"), &cat, &policy);
        assert_eq!(l2[cat.vm_index("c3.8xlarge").unwrap()], 1);
        let restricted = upper_bounds(pm(&cat, "l2"), &cat, &Policy::large_pm_reservation());
        assert_eq!(restricted[cat.vm_index("m3.medium").unwrap()], 0);
    }

    #[test]
    fn s_types_match_a_box_scan() {
        let cat = Catalog::builtin();
        let policy = Policy::allow_all();
        for name in ["s1", "s2", "s3"] {
            let p = pm(&cat, name);
            let set = enumerate(p, &cat, &policy, DEFAULT_CAP).unwrap();
            let got: Vec<Vec<u32>> = (0..set.len()).map(|t| set.vector(t)).collect();
            assert_eq!(got, box_scan(&cat, p, &upper_bounds(p, &cat, &policy)), "{name}");
        }
    }

    #[test]
    fn s1_configurations() {
        let cat = Catalog::builtin();
        let set = enumerate(pm(&cat, "s1"), &cat, &Policy::allow_all(), DEFAULT_CAP).unwrap();
        // Only single-volume types fit the one disk. Memory allows m3.medium
        // 1..=4, m3.large 1..=2, 1 large + 1 or 2 medium, or one r3.large.
        assert_eq!(set.len(), 9);
        assert!(set.iter().all(|v| v.iter().any(|&x| x > 0)));
        let l = cat.vm_index("m3.large").unwrap();
        assert_eq!(set.w(set.len() - 1, 0), 4);
        assert_eq!(set.w(0, l), 0);
    }

    #[test]
    fn cap_and_empty_policy() {
        let cat = Catalog::builtin();
        let s2 = pm(&cat, "s2");
        assert!(matches!(
            enumerate(s2, &cat, &Policy::allow_all(), 5),
            Err(Error::CapExceeded { cap: 5, .. })
        ));
        let none = Policy::deny_all(&cat);
        let table = count_table(&cat, &none, DEFAULT_CAP);
        assert!(table.iter().all(|(_, c)| *c == CountEntry::Count(0)));
    }

    #[test]
    fn instance_cap_restricts_counts() {
        let cat = Catalog::builtin();
        let mut demand = vec![0; 18];
        demand[0] = 2;
        let set = enumerate_with(
            pm(&cat, "s2"),
            &cat,
            &Policy::allow_all(),
            EnumerateOptions { cap: DEFAULT_CAP, instance_cap: Some(&demand) },
        )
        .unwrap();
        let vectors: Vec<Vec<u32>> = (0..set.len()).map(|t| set.vector(t)).collect();
        let mut one = vec![0; 18];
        one[0] = 1;
        let mut two = vec![0; 18];
        two[0] = 2;
        assert_eq!(vectors, vec![one, two]);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ConfigCache::new(dir.path());
        let cat = Catalog::builtin();
        let opts = EnumerateOptions::default();
        let a = cache.enumerate_with(pm(&cat, "s3"), &cat, &Policy::allow_all(), opts).unwrap();
        let b = cache.enumerate_with(pm(&cat, "s3"), &cat, &Policy::allow_all(), opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let small = EnumerateOptions { cap: 3, instance_cap: None };
        for _ in 0..2 {
            let r = cache.enumerate_with(pm(&cat, "s3"), &cat, &Policy::allow_all(), small);
            assert!(matches!(r, Err(Error::CapExceeded { .. })));
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let cat = Catalog::builtin();
        let a = enumerate(pm(&cat, "m1"), &cat, &Policy::allow_all(), DEFAULT_CAP).unwrap();
        let b = enumerate(pm(&cat, "m1"), &cat, &Policy::allow_all(), DEFAULT_CAP).unwrap();
        assert_eq!(a, b);
        let vectors: Vec<Vec<u32>> = (0..a.len()).map(|t| a.vector(t)).collect();
        assert!(vectors.windows(2).all(|w| w[0] < w[1]));
    }

    fn small_catalog() -> impl Strategy<Value = Catalog> {
        let vm = (1u32..=4, 1u64..=8, prop::collection::vec(1u64..=6, 1..=3));
        let pm = (2u32..=8, 4u64..=24, prop::collection::vec(2u64..=12, 1..=4));
        (prop::collection::vec(vm, 1..=3), pm).prop_map(|(vms, (c, m, d))| {
            let vm_types = vms
                .into_iter()
                .enumerate()
                .map(|(i, (a, b, v))| crate::model::VmType::new(&format!("v{i}"), a, b, v))
                .collect();
            Catalog::new(vm_types, vec![PmType::new("p", c, m, d, 1)]).unwrap()
        })
    }

    proptest! {
        #[test]
        fn enumeration_equals_box_scan(cat in small_catalog()) {
            let p = &cat.pm_types()[0];
            let policy = Policy::allow_all();
            let set = enumerate(p, &cat, &policy, DEFAULT_CAP).unwrap();
            let got: Vec<Vec<u32>> = (0..set.len()).map(|t| set.vector(t)).collect();
            prop_assert_eq!(got, box_scan(&cat, p, &upper_bounds(p, &cat, &policy)));
        }

        #[test]
        fn tighter_policy_never_adds(cat in small_catalog(), drop in 0usize..3) {
            let p = &cat.pm_types()[0];
            let all = enumerate(p, &cat, &Policy::allow_all(), DEFAULT_CAP).unwrap();
            let keep: Vec<String> = cat.vm_types().iter().enumerate()
                .filter(|(i, _)| *i != drop % cat.vm_types().len())
                .map(|(_, v)| v.name.clone())
                .collect();
            let tight = enumerate(p, &cat, &Policy::allow_all().restrict("p", keep), DEFAULT_CAP).unwrap();
            prop_assert!(tight.len() <= all.len());
        }
    }
}
