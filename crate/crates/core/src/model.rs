//! Domain types, the built-in catalog, experiment presets and the JSON
//! instance format.
//!
//! Memory is kept in integer MiB (3.75 GiB = 3840 MiB) and disk sizes in
//! integer GB, so every capacity comparison is exact integer arithmetic.
//! Memory is only ever compared with memory and disk with disk.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VmType {
    pub name: String,
    pub vcpus: u32,
    pub memory_mib: u64,
    /// Virtual disk sizes in GB, in request order.
    pub volumes: Vec<u64>,
}

impl VmType {
    pub fn new(name: &str, vcpus: u32, memory_mib: u64, volumes: Vec<u64>) -> Self {
        VmType {
            name: name.to_string(),
            vcpus,
            memory_mib,
            volumes,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.vcpus == 0 || self.memory_mib == 0 {
            return Err(Error::InvalidCatalog(format!(
                "VM type `{}` must request at least one vCPU and some memory",
                self.name
            )));
        }
        if self.volumes.is_empty() || self.volumes.contains(&0) {
            return Err(Error::InvalidCatalog(format!(
                "VM type `{}` needs a nonempty list of positive volumes",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmType {
    pub name: String,
    pub vcpus: u32,
    pub memory_mib: u64,
    /// Physical disk sizes in GB.
    pub disks: Vec<u64>,
    /// Normalized fixed cost of running one PM of this type.
    pub cost: u64,
}

impl PmType {
    pub fn new(name: &str, vcpus: u32, memory_mib: u64, disks: Vec<u64>, cost: u64) -> Self {
        PmType {
            name: name.to_string(),
            vcpus,
            memory_mib,
            disks,
            cost,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.vcpus == 0 || self.memory_mib == 0 {
            return Err(Error::InvalidCatalog(format!(
                "PM type `{}` must offer at least one vCPU and some memory",
                self.name
            )));
        }
        if self.disks.is_empty() || self.disks.contains(&0) {
            return Err(Error::InvalidCatalog(format!(
                "PM type `{}` needs a nonempty list of positive disks",
                self.name
            )));
        }
        Ok(())
    }
}

/// Ordered VM and PM type lists. The VM order fixes the dimension order of
/// every configuration vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Catalog {
    vm_types: Vec<VmType>,
    pm_types: Vec<PmType>,
}

impl<'de> Deserialize<'de> for Catalog {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            vm_types: Vec<VmType>,
            pm_types: Vec<PmType>,
        }
        let raw = Raw::deserialize(d)?;
        Catalog::new(raw.vm_types, raw.pm_types).map_err(serde::de::Error::custom)
    }
}

const GIB: u64 = 1024;

fn gib_quarters(quarters: u64) -> u64 {
    quarters * GIB / 4
}

impl Catalog {
    pub fn new(vm_types: Vec<VmType>, pm_types: Vec<PmType>) -> Result<Self> {
        let mut seen = HashSet::new();
        for vm in &vm_types {
            vm.validate()?;
            if !seen.insert(vm.name.as_str()) {
                return Err(Error::InvalidCatalog(format!("duplicate VM type `{}`", vm.name)));
            }
        }
        let mut seen = HashSet::new();
        for pm in &pm_types {
            pm.validate()?;
            if !seen.insert(pm.name.as_str()) {
                return Err(Error::InvalidCatalog(format!("duplicate PM type `{}`", pm.name)));
            }
        }
        Ok(Catalog { vm_types, pm_types })
    }

    /// The 18 EC2-derived VM types and 15 PM types used throughout the
    /// experiments. Costs are normalized so that the cheapest PM costs 100.
    pub fn builtin() -> Self {
        let vm = |name, vcpus, quarters, count: usize, size| {
            VmType::new(name, vcpus, gib_quarters(quarters), vec![size; count])
        };
        let vm_types = vec![
            vm("m3.medium", 1, 15, 1, 4),
            vm("m3.large", 2, 30, 1, 32),
            vm("m3.xlarge", 4, 60, 2, 40),
            vm("m3.2xlarge", 8, 120, 2, 80),
            vm("c3.large", 2, 15, 2, 16),
            vm("c3.xlarge", 4, 30, 2, 40),
            vm("c3.2xlarge", 8, 60, 2, 80),
            vm("c3.4xlarge", 16, 120, 2, 160),
            vm("c3.8xlarge", 32, 240, 2, 320),
            vm("r3.large", 2, 61, 1, 32),
            vm("r3.xlarge", 4, 122, 1, 80),
            vm("r3.2xlarge", 8, 244, 1, 160),
            vm("r3.4xlarge", 16, 488, 1, 320),
            vm("r3.8xlarge", 32, 976, 2, 320),
            vm("i2.xlarge", 4, 122, 1, 800),
            vm("i2.2xlarge", 8, 244, 2, 800),
            vm("i2.4xlarge", 16, 488, 4, 800),
            vm("i2.8xlarge", 32, 976, 8, 800),
        ];
        let pm = |name, vcpus, gib: u64, count: usize, size, cost| {
            PmType::new(name, vcpus, gib * GIB, vec![size; count], cost)
        };
        let pm_types = vec![
            pm("s1", 8, 16, 1, 256, 100),
            pm("s2", 8, 32, 1, 512, 120),
            pm("s3", 8, 64, 2, 512, 200),
            pm("s4", 8, 64, 4, 512, 300),
            pm("m1", 16, 32, 2, 512, 600),
            pm("m2", 16, 64, 4, 512, 700),
            pm("m3", 16, 128, 4, 1000, 900),
            pm("m4", 16, 256, 8, 1000, 1500),
            pm("m5", 16, 256, 16, 512, 1800),
            pm("l1", 32, 256, 4, 1000, 2500),
            pm("l2", 48, 512, 8, 1000, 3500),
            pm("l3", 64, 1024, 4, 1000, 5000),
            pm("l4", 80, 2048, 16, 1600, 7000),
            pm("l5", 120, 4096, 4, 1000, 9000),
            pm("l6", 120, 4096, 24, 1600, 12000),
        ];
        Catalog::new(vm_types, pm_types).expect("built-in catalog is valid")
    }

    pub fn vm_types(&self) -> &[VmType] {
        &self.vm_types
    }

    pub fn pm_types(&self) -> &[PmType] {
        &self.pm_types
    }

    pub fn vm_index(&self, name: &str) -> Result<usize> {
        self.vm_types
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVmType(name.to_string()))
    }

    pub fn pm_index(&self, name: &str) -> Result<usize> {
        self.pm_types
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| Error::UnknownPmType(name.to_string()))
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("catalog serializes");
        hex::encode(Sha256::digest(&json))
    }

    /// Copy with every PM cost multiplied by `factor`.
    pub fn with_scaled_costs(&self, factor: u64) -> Catalog {
        let mut out = self.clone();
        for pm in &mut out.pm_types {
            pm.cost *= factor;
        }
        out
    }
}

/// Per-PM-type allow lists. PM types without an entry accept every VM type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Policy {
    restrictions: BTreeMap<String, BTreeSet<String>>,
}

impl Policy {
    pub fn allow_all() -> Self {
        Policy::default()
    }

    /// Nothing is allowed anywhere.
    pub fn deny_all(catalog: &Catalog) -> Self {
        let restrictions = catalog
            .pm_types()
            .iter()
            .map(|pm| (pm.name.clone(), BTreeSet::new()))
            .collect();
        Policy { restrictions }
    }

    pub fn restrict<I, S>(mut self, pm_type: &str, allowed: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.restrictions
            .insert(pm_type.to_string(), allowed.into_iter().map(Into::into).collect());
        self
    }

    /// Large PMs reserved for resource-intensive VM types.
    pub fn large_pm_reservation() -> Self {
        let l1 = [
            "m3.xlarge", "m3.2xlarge", "c3.xlarge", "c3.2xlarge", "c3.4xlarge", "c3.8xlarge",
            "r3.xlarge", "r3.2xlarge", "r3.4xlarge", "r3.8xlarge", "i2.xlarge", "i2.2xlarge",
            "i2.4xlarge", "i2.8xlarge",
        ];
        let l2_l3 = [
            "m3.2xlarge", "c3.2xlarge", "c3.4xlarge", "c3.8xlarge", "r3.2xlarge", "r3.4xlarge",
            "r3.8xlarge", "i2.2xlarge", "i2.4xlarge", "i2.8xlarge",
        ];
        let l4_l6 = [
            "c3.4xlarge", "c3.8xlarge", "r3.4xlarge", "r3.8xlarge", "i2.4xlarge", "i2.8xlarge",
        ];
        Policy::allow_all()
            .restrict("l1", l1)
            .restrict("l2", l2_l3)
            .restrict("l3", l2_l3)
            .restrict("l4", l4_l6)
            .restrict("l5", l4_l6)
            .restrict("l6", l4_l6)
    }

    pub fn is_unrestricted(&self) -> bool {
        self.restrictions.is_empty()
    }

    pub fn validate(&self, catalog: &Catalog) -> Result<()> {
        for (pm, vms) in &self.restrictions {
            catalog.pm_index(pm)?;
            for vm in vms {
                catalog.vm_index(vm)?;
            }
        }
        Ok(())
    }

    pub fn allows(&self, pm_type: &str, vm_type: &str) -> bool {
        match self.restrictions.get(pm_type) {
            Some(set) => set.contains(vm_type),
            None => true,
        }
    }

    /// `mask[v][u]` is true when VM type `u` may run on PM type `v`.
    pub fn mask(&self, catalog: &Catalog) -> Vec<Vec<bool>> {
        catalog
            .pm_types()
            .iter()
            .map(|pm| {
                catalog
                    .vm_types()
                    .iter()
                    .map(|vm| self.allows(&pm.name, &vm.name))
                    .collect()
            })
            .collect()
    }

    /// Allow list of one PM type, in catalog VM order.
    pub fn allowed_row(&self, catalog: &Catalog, pm_type: usize) -> Vec<bool> {
        let pm = &catalog.pm_types()[pm_type].name;
        catalog
            .vm_types()
            .iter()
            .map(|vm| self.allows(pm, &vm.name))
            .collect()
    }

    /// Hex SHA-256 of the canonical (sorted) JSON encoding; the empty policy
    /// hashes `{}`.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(&self.restrictions).expect("policy serializes");
        hex::encode(Sha256::digest(&json))
    }
}

/// Stable identity of one VM: (type index, ordinal within the type).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VmId {
    pub ty: usize,
    pub ord: u32,
}

/// Stable identity of one PM: (type index, ordinal within the type).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PmId {
    pub ty: usize,
    pub ord: u32,
}

impl fmt::Display for VmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i{}_{}", self.ty, self.ord)
    }
}

impl fmt::Display for PmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "j{}_{}", self.ty, self.ord)
    }
}

/// A placement problem: demanded VM counts and the available PM fleet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub catalog: Arc<Catalog>,
    pub vm_demand: Vec<u32>,
    pub pm_fleet: Vec<u32>,
    pub policy: Policy,
}

impl Instance {
    pub fn new(catalog: Arc<Catalog>, vm_demand: Vec<u32>, pm_fleet: Vec<u32>) -> Result<Self> {
        Instance::with_policy(catalog, vm_demand, pm_fleet, Policy::allow_all())
    }

    pub fn with_policy(
        catalog: Arc<Catalog>,
        vm_demand: Vec<u32>,
        pm_fleet: Vec<u32>,
        policy: Policy,
    ) -> Result<Self> {
        if vm_demand.len() != catalog.vm_types().len() {
            return Err(Error::InvalidInstance(format!(
                "demand vector has {} entries, catalog has {} VM types",
                vm_demand.len(),
                catalog.vm_types().len()
            )));
        }
        if pm_fleet.len() != catalog.pm_types().len() {
            return Err(Error::InvalidInstance(format!(
                "fleet vector has {} entries, catalog has {} PM types",
                pm_fleet.len(),
                catalog.pm_types().len()
            )));
        }
        policy.validate(&catalog)?;
        let inst = Instance {
            catalog,
            vm_demand,
            pm_fleet,
            policy,
        };
        if inst.num_vms() == 0 {
            return Err(Error::InvalidInstance("no VMs demanded".into()));
        }
        if inst.num_pms() == 0 {
            return Err(Error::InvalidInstance("empty PM fleet".into()));
        }
        Ok(inst)
    }

    /// Build from `(name, count)` pairs against a catalog.
    pub fn from_counts(
        catalog: Arc<Catalog>,
        vms: &[(&str, u32)],
        pms: &[(&str, u32)],
    ) -> Result<Self> {
        let mut demand = vec![0; catalog.vm_types().len()];
        for (name, n) in vms {
            demand[catalog.vm_index(name)?] += n;
        }
        let mut fleet = vec![0; catalog.pm_types().len()];
        for (name, n) in pms {
            fleet[catalog.pm_index(name)?] += n;
        }
        Instance::new(catalog, demand, fleet)
    }

    pub fn num_vms(&self) -> usize {
        self.vm_demand.iter().map(|&c| c as usize).sum()
    }

    pub fn num_pms(&self) -> usize {
        self.pm_fleet.iter().map(|&c| c as usize).sum()
    }

    /// Individual VMs in catalog order, then ordinal order.
    pub fn vms(&self) -> Vec<VmId> {
        expand(&self.vm_demand)
            .map(|(ty, ord)| VmId { ty, ord })
            .collect()
    }

    /// Individual PMs in catalog order, then ordinal order.
    pub fn pms(&self) -> Vec<PmId> {
        expand(&self.pm_fleet)
            .map(|(ty, ord)| PmId { ty, ord })
            .collect()
    }

    pub fn vm_type(&self, vm: VmId) -> &VmType {
        &self.catalog.vm_types()[vm.ty]
    }

    pub fn pm_type(&self, pm: PmId) -> &PmType {
        &self.catalog.pm_types()[pm.ty]
    }

    pub fn total_virtual_disks(&self) -> usize {
        self.vm_demand
            .iter()
            .zip(self.catalog.vm_types())
            .map(|(&n, vm)| n as usize * vm.volumes.len())
            .sum()
    }

    pub fn total_physical_disks(&self) -> usize {
        self.pm_fleet
            .iter()
            .zip(self.catalog.pm_types())
            .map(|(&n, pm)| n as usize * pm.disks.len())
            .sum()
    }

    pub fn allows(&self, vm: VmId, pm: PmId) -> bool {
        self.policy
            .allows(&self.pm_type(pm).name, &self.vm_type(vm).name)
    }

    /// Same instance with every PM cost multiplied by `factor`.
    pub fn with_scaled_costs(&self, factor: u64) -> Instance {
        Instance {
            catalog: Arc::new(self.catalog.with_scaled_costs(factor)),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = InstanceDoc {
            catalog: Some((*self.catalog).clone()),
            vm_demand: named_counts(
                self.catalog.vm_types().iter().map(|v| v.name.as_str()),
                &self.vm_demand,
            ),
            pm_fleet: named_counts(
                self.catalog.pm_types().iter().map(|p| p.name.as_str()),
                &self.pm_fleet,
            ),
            policy: (!self.policy.is_unrestricted()).then(|| self.policy.clone()),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

fn expand(counts: &[u32]) -> impl Iterator<Item = (usize, u32)> + '_ {
    counts
        .iter()
        .enumerate()
        .flat_map(|(ty, &n)| (0..n).map(move |ord| (ty, ord)))
}

fn named_counts<'a>(names: impl Iterator<Item = &'a str>, counts: &[u32]) -> BTreeMap<String, i64> {
    names
        .zip(counts)
        .filter(|(_, &c)| c > 0)
        .map(|(n, &c)| (n.to_string(), c as i64))
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    catalog: Option<Catalog>,
    vm_demand: BTreeMap<String, i64>,
    pm_fleet: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    policy: Option<Policy>,
}

/// Parse and validate a JSON instance document. A missing `catalog` means
/// the built-in one.
pub fn load_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let catalog = Arc::new(doc.catalog.unwrap_or_else(Catalog::builtin));
    let mut demand = vec![0u32; catalog.vm_types().len()];
    for (name, &count) in &doc.vm_demand {
        demand[catalog.vm_index(name)?] = checked_count(name, count)?;
    }
    let mut fleet = vec![0u32; catalog.pm_types().len()];
    for (name, &count) in &doc.pm_fleet {
        fleet[catalog.pm_index(name)?] = checked_count(name, count)?;
    }
    Instance::with_policy(catalog, demand, fleet, doc.policy.unwrap_or_default())
}

fn checked_count(name: &str, count: i64) -> Result<u32> {
    u32::try_from(count)
        .map_err(|_| Error::InvalidInstance(format!("count for `{name}` must be in 0..=u32::MAX, got {count}")))
}

/// The seven experiment setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::I,
        Experiment::II,
        Experiment::III,
        Experiment::IV,
        Experiment::V,
        Experiment::VI,
        Experiment::VII,
    ];
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Experiment::I => "I",
            Experiment::II => "II",
            Experiment::III => "III",
            Experiment::IV => "IV",
            Experiment::V => "V",
            Experiment::VI => "VI",
            Experiment::VII => "VII",
        };
        f.write_str(s)
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

const M3: [&str; 4] = ["m3.medium", "m3.large", "m3.xlarge", "m3.2xlarge"];
const C3: [&str; 5] = ["c3.large", "c3.xlarge", "c3.2xlarge", "c3.4xlarge", "c3.8xlarge"];
const R3: [&str; 5] = ["r3.large", "r3.xlarge", "r3.2xlarge", "r3.4xlarge", "r3.8xlarge"];
const I2: [&str; 4] = ["i2.xlarge", "i2.2xlarge", "i2.4xlarge", "i2.8xlarge"];
const S: [&str; 4] = ["s1", "s2", "s3", "s4"];
const M: [&str; 5] = ["m1", "m2", "m3", "m4", "m5"];
const L: [&str; 6] = ["l1", "l2", "l3", "l4", "l5", "l6"];

fn zip_counts<'a>(names: &[&'a str], counts: &[u32]) -> Vec<(&'a str, u32)> {
    names.iter().copied().zip(counts.iter().copied()).collect()
}

/// Exact VM/PM counts of one experiment on the built-in catalog. Experiments
/// V–VII carry the large-PM reservation policy.
pub fn preset_instance(exp: Experiment) -> Instance {
    let catalog = Arc::new(Catalog::builtin());
    let mut vms: Vec<(&str, u32)> = Vec::new();
    let mut pms: Vec<(&str, u32)> = Vec::new();
    let mut policy = Policy::allow_all();
    match exp {
        Experiment::I => {
            vms.extend(zip_counts(&M3, &[36, 14, 10, 10]));
            pms.extend(zip_counts(&S, &[7, 7, 10, 7]));
            pms.extend(zip_counts(&M, &[5, 5, 5, 2, 2]));
        }
        Experiment::II => {
            vms.extend(zip_counts(&M3, &[5; 4]));
            vms.extend(zip_counts(&C3, &[5; 5]));
            vms.extend(zip_counts(&R3, &[5; 5]));
            vms.extend(zip_counts(&I2, &[2, 2, 3, 0]));
            pms.extend(zip_counts(&S, &[5; 4]));
            pms.extend(zip_counts(&M, &[5; 5]));
            pms.extend(zip_counts(&L, &[5, 5, 5, 5, 5, 0]));
        }
        Experiment::III | Experiment::IV => {
            vms.extend(zip_counts(&M3, &[500, 200, 150, 150]));
            pms.extend(zip_counts(&S, &[150; 4]));
            pms.extend(zip_counts(&M, &[100, 100, 100, 50, 50]));
            if exp == Experiment::IV {
                vms.extend(zip_counts(&C3, &[2; 5]));
                pms.extend(zip_counts(&L, &[2; 6]));
            }
        }
        Experiment::V => {
            vms.extend(zip_counts(&M3, &[0, 4000, 2000, 0]));
            vms.extend(zip_counts(&C3, &[0, 0, 0, 3, 3]));
            vms.extend(zip_counts(&R3, &[0, 0, 0, 3, 3]));
            vms.extend(zip_counts(&I2, &[0, 3, 3, 2]));
            pms.extend(zip_counts(&S, &[300; 4]));
            pms.extend(zip_counts(&M, &[200, 200, 200, 100, 100]));
            pms.extend(zip_counts(&L, &[2; 6]));
            policy = Policy::large_pm_reservation();
        }
        Experiment::VI => {
            vms.extend(zip_counts(&M3, &[0, 0, 0, 15]));
            vms.extend(zip_counts(&C3, &[0, 0, 0, 15, 15]));
            vms.extend(zip_counts(&R3, &[0, 0, 0, 0, 15]));
            vms.extend(zip_counts(&I2, &[0, 15, 15, 15]));
            pms.extend(zip_counts(&M, &[10; 5]));
            pms.extend(zip_counts(&L, &[5, 5, 5, 5, 5, 2]));
            policy = Policy::large_pm_reservation();
        }
        Experiment::VII => {
            vms.extend(zip_counts(&M3, &[1875, 750, 563, 562]));
            vms.extend(zip_counts(&C3, &[600, 600, 150, 75, 75]));
            vms.extend(zip_counts(&R3, &[600, 600, 150, 150, 75]));
            vms.extend(zip_counts(&I2, &[300, 300, 75, 75]));
            pms.extend(zip_counts(&S, &[900; 4]));
            pms.extend(zip_counts(&M, &[450, 375, 375, 375, 375]));
            pms.extend(zip_counts(&L, &[75; 6]));
            policy = Policy::large_pm_reservation();
        }
    }
    let mut inst = Instance::from_counts(catalog, &vms, &pms).expect("preset is valid");
    inst.policy = policy;
    inst
}

/// Experiment III's VMs against a fleet of `total_pms` PMs in the same type
/// proportions (3:3:3:3:2:2:2:1:1 over s1..m5). `total_pms` must be a
/// positive multiple of 20.
pub fn skewed_ratio_instance(total_pms: u32) -> Result<Instance> {
    if total_pms == 0 || total_pms % 20 != 0 {
        return Err(Error::InvalidInstance(format!(
            "fleet size {total_pms} is not a positive multiple of 20"
        )));
    }
    let unit = total_pms / 20;
    let mut pms = zip_counts(&S, &[3 * unit; 4]);
    pms.extend(zip_counts(&M, &[2 * unit, 2 * unit, 2 * unit, unit, unit]));
    Instance::from_counts(
        Arc::new(Catalog::builtin()),
        &zip_counts(&M3, &[500, 200, 150, 150]),
        &pms,
    )
}

/// Parameters for drawing small random instances from a catalog.
#[derive(Debug, Clone)]
pub struct RandomInstanceSpec {
    pub max_vms: usize,
    pub max_pms: usize,
    /// Redraw until `(virtual disks) x (physical disks)` is at most this.
    pub max_disk_pairs: Option<usize>,
}

/// Draw VM count and PM count uniformly from `1..=max`, then each VM and PM
/// type uniformly from the catalog.
pub fn random_instance(
    catalog: &Arc<Catalog>,
    spec: &RandomInstanceSpec,
    rng: &mut SplitMix64,
) -> Instance {
    loop {
        let n = 1 + rng.below(spec.max_vms);
        let m = 1 + rng.below(spec.max_pms);
        let mut demand = vec![0u32; catalog.vm_types().len()];
        for _ in 0..n {
            let u = rng.below(demand.len());
            demand[u] += 1;
        }
        let mut fleet = vec![0u32; catalog.pm_types().len()];
        for _ in 0..m {
            let v = rng.below(fleet.len());
            fleet[v] += 1;
        }
        let inst = Instance::new(catalog.clone(), demand, fleet).expect("nonempty by construction");
        match spec.max_disk_pairs {
            Some(limit) if inst.total_virtual_disks() * inst.total_physical_disks() > limit => continue,
            _ => return inst,
        }
    }
}
