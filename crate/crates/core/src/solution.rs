//! Explicit placements: decoding solver values, validation from raw
//! catalog data, cost, and utilization.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::disk_assignment;
use crate::mip::{LinearModel, VarMap, VarRole};
use crate::model::{Catalog, Instance, PmId, VmId};

pub const INTEGRALITY_TOL: f64 = 1e-6;

/// VM to PM map plus, per placed VM, the physical disk of each volume.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Placement {
    pub vm_to_pm: BTreeMap<VmId, PmId>,
    pub disk_map: BTreeMap<VmId, Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementDoc {
    placements: Vec<PlacementEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementEntry {
    vm: String,
    pm: String,
    disks: Vec<usize>,
}

fn label(name: &str, ord: u32) -> String {
    format!("{name}#{ord}")
}

fn parse_label(text: &str) -> Result<(&str, u32)> {
    let (name, ord) = text
        .rsplit_once('#')
        .ok_or_else(|| Error::Decode(format!("label `{text}` is not `type#ordinal`")))?;
    let ord = ord
        .parse()
        .map_err(|_| Error::Decode(format!("label `{text}` has a bad ordinal")))?;
    Ok((name, ord))
}

impl Placement {
    pub fn used_pms(&self) -> BTreeSet<PmId> {
        self.vm_to_pm.values().copied().collect()
    }

    pub fn vms_on(&self, pm: PmId) -> Vec<VmId> {
        self.vm_to_pm.iter().filter(|(_, &p)| p == pm).map(|(&v, _)| v).collect()
    }

    /// JSON with `type#ordinal` labels, e.g. `{"vm": "m3.medium#0", "pm": "s1#0", "disks": [0]}`.
    pub fn to_json(&self, catalog: &Catalog) -> Result<String> {
        let placements = self
            .vm_to_pm
            .iter()
            .map(|(vm, pm)| PlacementEntry {
                vm: label(&catalog.vm_types()[vm.ty].name, vm.ord),
                pm: label(&catalog.pm_types()[pm.ty].name, pm.ord),
                disks: self.disk_map.get(vm).cloned().unwrap_or_default(),
            })
            .collect();
        Ok(serde_json::to_string_pretty(&PlacementDoc { placements })?)
    }

    pub fn from_json(text: &str, catalog: &Catalog) -> Result<Placement> {
        let doc: PlacementDoc = serde_json::from_str(text)?;
        let mut p = Placement::default();
        for e in doc.placements {
            let (vm_name, vm_ord) = parse_label(&e.vm)?;
            let (pm_name, pm_ord) = parse_label(&e.pm)?;
            let vm = VmId { ty: catalog.vm_index(vm_name)?, ord: vm_ord };
            let pm = PmId { ty: catalog.pm_index(pm_name)?, ord: pm_ord };
            if p.vm_to_pm.insert(vm, pm).is_some() {
                return Err(Error::Decode(format!("VM `{}` listed twice", e.vm)));
            }
            p.disk_map.insert(vm, e.disks);
        }
        Ok(p)
    }
}

/// One broken placement rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    UnplacedVm(VmId),
    UnknownVm(VmId),
    UnknownPm { vm: VmId, pm: PmId },
    Forbidden { vm: VmId, pm: PmId },
    MissingDiskMap(VmId),
    StrayDiskMap(VmId),
    DiskMapLength { vm: VmId, expected: usize, got: usize },
    NoSuchDisk { vm: VmId, pm: PmId, disk: usize },
    AntiColocation { vm: VmId, pm: PmId, disk: usize },
    DiskCapacity { pm: PmId, disk: usize, load: u64, capacity: u64 },
    Vcpu { pm: PmId, used: u64, capacity: u64 },
    Memory { pm: PmId, used: u64, capacity: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnplacedVm(vm) => write!(f, "unplaced VM {vm}"),
            Violation::UnknownVm(vm) => write!(f, "VM {vm} is not part of the instance"),
            Violation::UnknownPm { vm, pm } => write!(f, "VM {vm} placed on PM {pm} outside the fleet"),
            Violation::Forbidden { vm, pm } => write!(f, "policy forbids VM {vm} on PM {pm}"),
            Violation::MissingDiskMap(vm) => write!(f, "VM {vm} has no disk map"),
            Violation::StrayDiskMap(vm) => write!(f, "disk map for unplaced VM {vm}"),
            Violation::DiskMapLength { vm, expected, got } => {
                write!(f, "VM {vm} maps {got} volumes, expected {expected}")
            }
            Violation::NoSuchDisk { vm, pm, disk } => write!(f, "VM {vm} uses missing disk {disk} of PM {pm}"),
            Violation::AntiColocation { vm, pm, disk } => {
                write!(f, "anti-colocation ({vm}, disk {disk} of {pm})")
            }
            Violation::DiskCapacity { pm, disk, load, capacity } => {
                write!(f, "disk {disk} of PM {pm} holds {load} GB > {capacity} GB")
            }
            Violation::Vcpu { pm, used, capacity } => write!(f, "PM {pm} runs {used} vCPUs > {capacity}"),
            Violation::Memory { pm, used, capacity } => write!(f, "PM {pm} uses {used} MiB > {capacity} MiB"),
        }
    }
}

fn instance_has_vm(instance: &Instance, vm: VmId) -> bool {
    instance.vm_demand.get(vm.ty).is_some_and(|&n| vm.ord < n)
}

fn instance_has_pm(instance: &Instance, pm: PmId) -> bool {
    instance.pm_fleet.get(pm.ty).is_some_and(|&n| pm.ord < n)
}

/// Every rule the placement breaks; empty means valid.
pub fn validate(placement: &Placement, instance: &Instance) -> Vec<Violation> {
    let catalog = &instance.catalog;
    let mut out = Vec::new();
    for vm in instance.vms() {
        if !placement.vm_to_pm.contains_key(&vm) {
            out.push(Violation::UnplacedVm(vm));
        }
    }
    for &vm in placement.disk_map.keys() {
        if !placement.vm_to_pm.contains_key(&vm) {
            out.push(Violation::StrayDiskMap(vm));
        }
    }
    let mut cpu: BTreeMap<PmId, u64> = BTreeMap::new();
    let mut mem: BTreeMap<PmId, u64> = BTreeMap::new();
    let mut load: BTreeMap<(PmId, usize), u64> = BTreeMap::new();
    for (&vm, &pm) in &placement.vm_to_pm {
        if !instance_has_vm(instance, vm) {
            out.push(Violation::UnknownVm(vm));
            continue;
        }
        if !instance_has_pm(instance, pm) {
            out.push(Violation::UnknownPm { vm, pm });
            continue;
        }
        let vm_ty = &catalog.vm_types()[vm.ty];
        let pm_ty = &catalog.pm_types()[pm.ty];
        if !instance.policy.allows(&pm_ty.name, &vm_ty.name) {
            out.push(Violation::Forbidden { vm, pm });
        }
        *cpu.entry(pm).or_default() += vm_ty.vcpus as u64;
        *mem.entry(pm).or_default() += vm_ty.memory_mib;
        let Some(disks) = placement.disk_map.get(&vm) else {
            if !vm_ty.volumes.is_empty() {
                out.push(Violation::MissingDiskMap(vm));
            }
            continue;
        };
        if disks.len() != vm_ty.volumes.len() {
            out.push(Violation::DiskMapLength { vm, expected: vm_ty.volumes.len(), got: disks.len() });
            continue;
        }
        let mut seen = BTreeSet::new();
        for (&l, &vol) in disks.iter().zip(&vm_ty.volumes) {
            if l >= pm_ty.disks.len() {
                out.push(Violation::NoSuchDisk { vm, pm, disk: l });
                continue;
            }
            if !seen.insert(l) {
                out.push(Violation::AntiColocation { vm, pm, disk: l });
            }
            *load.entry((pm, l)).or_default() += vol;
        }
    }
    for ((pm, l), used) in load {
        let capacity = catalog.pm_types()[pm.ty].disks[l];
        if used > capacity {
            out.push(Violation::DiskCapacity { pm, disk: l, load: used, capacity });
        }
    }
    for (pm, used) in cpu {
        let capacity = catalog.pm_types()[pm.ty].vcpus as u64;
        if used > capacity {
            out.push(Violation::Vcpu { pm, used, capacity });
        }
    }
    for (pm, used) in mem {
        let capacity = catalog.pm_types()[pm.ty].memory_mib;
        if used > capacity {
            out.push(Violation::Memory { pm, used, capacity });
        }
    }
    out
}

/// Sum of the costs of the used PMs.
pub fn cost(placement: &Placement, instance: &Instance) -> u64 {
    placement
        .used_pms()
        .iter()
        .map(|pm| instance.catalog.pm_types()[pm.ty].cost)
        .sum()
}

/// Requested over available, per resource; all in `[0, 1]` for valid placements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ratios {
    pub vcpu: f64,
    pub memory: f64,
    /// Fraction of physical disks holding at least one volume.
    pub disk_count: f64,
    pub disk_capacity: f64,
}

impl Ratios {
    pub fn max(&self) -> f64 {
        self.vcpu.max(self.memory).max(self.disk_count).max(self.disk_capacity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmUtilization {
    pub pm: PmId,
    pub pm_type: String,
    pub vms: usize,
    pub ratios: Ratios,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeUtilization {
    pub pm_type: String,
    pub used_pms: usize,
    pub ratios: Ratios,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilizationReport {
    pub pms: Vec<PmUtilization>,
    pub by_type: Vec<TypeUtilization>,
}

#[derive(Default, Clone, Copy)]
struct Totals {
    cpu: (u64, u64),
    mem: (u64, u64),
    disks: (u64, u64),
    space: (u64, u64),
}

impl Totals {
    fn add(&mut self, o: &Totals) {
        self.cpu = (self.cpu.0 + o.cpu.0, self.cpu.1 + o.cpu.1);
        self.mem = (self.mem.0 + o.mem.0, self.mem.1 + o.mem.1);
        self.disks = (self.disks.0 + o.disks.0, self.disks.1 + o.disks.1);
        self.space = (self.space.0 + o.space.0, self.space.1 + o.space.1);
    }

    fn ratios(&self) -> Ratios {
        let r = |(a, b): (u64, u64)| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        Ratios {
            vcpu: r(self.cpu),
            memory: r(self.mem),
            disk_count: r(self.disks),
            disk_capacity: r(self.space),
        }
    }
}

fn pm_totals(placement: &Placement, instance: &Instance, pm: PmId) -> (Totals, usize) {
    let catalog = &instance.catalog;
    let pm_ty = &catalog.pm_types()[pm.ty];
    let mut loads = vec![0u64; pm_ty.disks.len()];
    let mut t = Totals::default();
    let vms = placement.vms_on(pm);
    for vm in &vms {
        let vm_ty = &catalog.vm_types()[vm.ty];
        t.cpu.0 += vm_ty.vcpus as u64;
        t.mem.0 += vm_ty.memory_mib;
        if let Some(disks) = placement.disk_map.get(vm) {
            for (&l, &v) in disks.iter().zip(&vm_ty.volumes) {
                loads[l] += v;
            }
        }
    }
    t.cpu.1 = pm_ty.vcpus as u64;
    t.mem.1 = pm_ty.memory_mib;
    t.disks = (loads.iter().filter(|&&x| x > 0).count() as u64, pm_ty.disks.len() as u64);
    t.space = (loads.iter().sum(), pm_ty.disks.iter().sum());
    (t, vms.len())
}

/// Per used PM and per PM type. Expects a valid placement.
pub fn utilization(placement: &Placement, instance: &Instance) -> UtilizationReport {
    let mut pms = Vec::new();
    let mut by_type: BTreeMap<usize, (Totals, usize)> = BTreeMap::new();
    for pm in placement.used_pms() {
        let (t, vms) = pm_totals(placement, instance, pm);
        let entry = by_type.entry(pm.ty).or_default();
        entry.0.add(&t);
        entry.1 += 1;
        pms.push(PmUtilization {
            pm,
            pm_type: instance.catalog.pm_types()[pm.ty].name.clone(),
            vms,
            ratios: t.ratios(),
        });
    }
    let by_type = by_type
        .into_iter()
        .map(|(ty, (t, used_pms))| TypeUtilization {
            pm_type: instance.catalog.pm_types()[ty].name.clone(),
            used_pms,
            ratios: t.ratios(),
        })
        .collect();
    UtilizationReport { pms, by_type }
}

/// Each used PM has a saturated resource, or no unplaced VM could be added
/// to it.
pub fn saturation_holds(placement: &Placement, instance: &Instance) -> bool {
    let catalog = &instance.catalog;
    let unplaced: BTreeSet<usize> = instance
        .vms()
        .into_iter()
        .filter(|vm| !placement.vm_to_pm.contains_key(vm))
        .map(|vm| vm.ty)
        .collect();
    placement.used_pms().into_iter().all(|pm| {
        let (t, _) = pm_totals(placement, instance, pm);
        if t.ratios().max() >= 1.0 {
            return true;
        }
        let mut mix = vec![0u32; catalog.vm_types().len()];
        for vm in placement.vms_on(pm) {
            mix[vm.ty] += 1;
        }
        let pm_ty = &catalog.pm_types()[pm.ty];
        !unplaced.iter().any(|&u| {
            if !instance.policy.allows(&pm_ty.name, &catalog.vm_types()[u].name) {
                return false;
            }
            mix[u] += 1;
            let fits = crate::feasibility::config_feasible(catalog, &mix, pm_ty).unwrap_or(false);
            mix[u] -= 1;
            fits
        })
    })
}

fn check_integral(values: &[f64]) -> Result<()> {
    for (j, &v) in values.iter().enumerate() {
        if (v - v.round()).abs() > INTEGRALITY_TOL {
            return Err(Error::Decode(format!("variable {j} has fractional value {v}")));
        }
    }
    Ok(())
}

/// Turn integral model values into a placement. Configured PMs receive
/// still unplaced VMs of each type in ID order; surplus slots stay empty.
pub fn decode(varmap: &VarMap, instance: &Instance, values: &[f64]) -> Result<Placement> {
    if values.len() != varmap.roles.len() {
        return Err(Error::Decode(format!(
            "{} values for {} variables",
            values.len(),
            varmap.roles.len()
        )));
    }
    check_integral(values)?;
    let catalog = &instance.catalog;
    let mut p = Placement::default();
    let mut configured: Vec<(PmId, usize)> = Vec::new();
    let mut disks: BTreeMap<VmId, BTreeMap<usize, usize>> = BTreeMap::new();
    for (role, &v) in varmap.roles.iter().zip(values) {
        if v.round() != 1.0 {
            continue;
        }
        match *role {
            VarRole::Assign { vm, pm } => {
                if p.vm_to_pm.insert(vm, pm).is_some() {
                    return Err(Error::Decode(format!("VM {vm} assigned twice")));
                }
            }
            VarRole::Disk { vm, k, pm: _, l } => {
                if disks.entry(vm).or_default().insert(k, l).is_some() {
                    return Err(Error::Decode(format!("volume {k} of VM {vm} placed twice")));
                }
            }
            VarRole::Config { pm, t } => configured.push((pm, t)),
            VarRole::Used { .. } => {}
        }
    }
    for (vm, map) in disks {
        let n = catalog.vm_types()[vm.ty].volumes.len();
        if map.len() != n || map.keys().copied().ne(0..n) {
            return Err(Error::Decode(format!("VM {vm} has an incomplete disk assignment")));
        }
        p.disk_map.insert(vm, map.into_values().collect());
    }

    configured.sort();
    let mut pending: Vec<std::collections::VecDeque<VmId>> = vec![Default::default(); catalog.vm_types().len()];
    for vm in instance.vms() {
        if !p.vm_to_pm.contains_key(&vm) {
            pending[vm.ty].push_back(vm);
        }
    }
    for w in configured.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Decode(format!("PM {} runs two configurations", w[0].0)));
        }
    }
    for (pm, t) in configured {
        let pm_ty = &catalog.pm_types()[pm.ty];
        let set = varmap
            .config_set(&pm_ty.name)
            .ok_or_else(|| Error::MissingConfigSet(pm_ty.name.clone()))?;
        if t >= set.len() {
            return Err(Error::Decode(format!("PM {pm} selects unknown configuration {t}")));
        }
        let mut mix = vec![0u32; catalog.vm_types().len()];
        let mut filled = Vec::new();
        for (u, queue) in pending.iter_mut().enumerate() {
            for _ in 0..set.w(t, u) {
                let Some(vm) = queue.pop_front() else { break };
                mix[u] += 1;
                filled.push(vm);
            }
        }
        if filled.is_empty() {
            continue;
        }
        let witness = disk_assignment(catalog, &mix, pm_ty)?
            .ok_or_else(|| Error::Decode(format!("filled configuration on PM {pm} has no disk assignment")))?;
        // Witness entries and `filled` are both in type order.
        for (vm, entry) in filled.into_iter().zip(witness.vms) {
            p.vm_to_pm.insert(vm, pm);
            p.disk_map.insert(vm, entry.disks);
        }
    }
    if let Some(vm) = pending.iter().flatten().next() {
        return Err(Error::Decode(format!("VM {vm} is not covered by the solution")));
    }
    Ok(p)
}

/// Read a `{variable name: value}` JSON object into a dense value vector;
/// absent variables are zero.
pub fn import_values(model: &LinearModel, text: &str) -> Result<Vec<f64>> {
    let raw: HashMap<String, f64> = serde_json::from_str(text)?;
    let index: HashMap<&str, usize> = model.variables.iter().enumerate().map(|(j, v)| (v.name.as_str(), j)).collect();
    let mut values = vec![0.0; model.variables.len()];
    for (name, v) in raw {
        let j = *index
            .get(name.as_str())
            .ok_or_else(|| Error::Decode(format!("unknown variable `{name}`")))?;
        values[j] = v;
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::configs::{enumerate, ConfigSet, DEFAULT_CAP};
    use crate::mip::{build_f1, build_f2};
    use crate::model::Catalog;

    fn inst(vms: &[(&str, u32)], pms: &[(&str, u32)]) -> Instance {
        Instance::from_counts(Arc::new(Catalog::builtin()), vms, pms).unwrap()
    }

    fn vm(ty: usize, ord: u32) -> VmId {
        VmId { ty, ord }
    }

    fn pm(ty: usize, ord: u32) -> PmId {
        PmId { ty, ord }
    }

    #[test]
    fn decode_f1_toy() {
        let i = inst(&[("m3.medium", 1)], &[("s1", 1)]);
        let (model, map) = build_f1(&i).unwrap();
        let p = decode(&map, &i, &vec![1.0; model.num_vars()]).unwrap();
        assert_eq!(p.vm_to_pm[&vm(0, 0)], pm(0, 0));
        assert_eq!(p.disk_map[&vm(0, 0)], vec![0]);
        assert!(validate(&p, &i).is_empty());
        assert_eq!(cost(&p, &i), 100);
    }

    #[test]
    fn decode_f2_leaves_surplus_slots_empty() {
        let i = inst(&[("m3.medium", 3)], &[("s1", 1)]);
        let set = enumerate(&i.catalog.pm_types()[0], &i.catalog, &i.policy, DEFAULT_CAP).unwrap();
        let t = (0..set.len()).find(|&t| set.w(t, 0) == 4 && set.get(t).iter().skip(1).all(|&w| w == 0)).unwrap();
        let (model, map) = build_f2(&i, std::slice::from_ref(&set)).unwrap();
        let mut values = vec![0.0; model.num_vars()];
        values[t] = 1.0;
        *values.last_mut().unwrap() = 1.0;
        let p = decode(&map, &i, &values).unwrap();
        assert_eq!(p.vm_to_pm.len(), 3);
        assert!(validate(&p, &i).is_empty());
        assert_eq!(model.objective_value(&values) as u64, cost(&p, &i));
    }

    #[test]
    fn decode_rejects_fractional_values() {
        let i = inst(&[("m3.medium", 1)], &[("s1", 1)]);
        let (_, map) = build_f1(&i).unwrap();
        assert!(matches!(decode(&map, &i, &[0.5, 1.0, 1.0]), Err(Error::Decode(_))));
        assert!(decode(&map, &i, &[1.0 - 1e-7, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn decode_reports_uncovered_vms() {
        let i = inst(&[("m3.medium", 2)], &[("s1", 1)]);
        let set = ConfigSet::from_vectors("s1", &i.policy.digest(), 18, &[{
            let mut v = vec![0; 18];
            v[0] = 1;
            v
        }])
        .unwrap();
        let (_, map) = build_f2(&i, &[set]).unwrap();
        assert!(matches!(decode(&map, &i, &[1.0, 1.0]), Err(Error::Decode(_))));
    }

    #[test]
    fn validator_catches_constructed_violations() {
        let i = inst(&[("m3.xlarge", 1), ("m3.medium", 1)], &[("s3", 1)]);
        let large = i.catalog.vm_index("m3.xlarge").unwrap();
        let medium = i.catalog.vm_index("m3.medium").unwrap();
        let s2 = pm(i.catalog.pm_index("s3").unwrap(), 0);
        let mut p = Placement::default();
        p.vm_to_pm.insert(vm(large, 0), s2);
        p.disk_map.insert(vm(large, 0), vec![0, 0]);
        let v = validate(&p, &i);
        assert!(v.contains(&Violation::AntiColocation { vm: vm(large, 0), pm: s2, disk: 0 }));
        assert!(v.contains(&Violation::UnplacedVm(vm(medium, 0))));
        assert!(v.iter().any(|x| x.to_string().starts_with("anti-colocation")));
        assert!(v.iter().any(|x| x.to_string().starts_with("unplaced VM")));
    }

    #[test]
    fn validator_checks_capacities_and_policy() {
        let mut i = inst(&[("i2.8xlarge", 1)], &[("m5", 1)]);
        let big = vm(i.catalog.vm_index("i2.8xlarge").unwrap(), 0);
        let m5 = pm(i.catalog.pm_index("m5").unwrap(), 0);
        let mut p = Placement::default();
        p.vm_to_pm.insert(big, m5);
        p.disk_map.insert(big, (0..8).collect());
        let v = validate(&p, &i);
        assert!(v.iter().any(|x| matches!(x, Violation::DiskCapacity { .. })));
        i.policy = crate::model::Policy::allow_all().restrict("m5", ["m3.medium"]);
        assert!(validate(&p, &i).iter().any(|x| matches!(x, Violation::Forbidden { .. })));
    }

    #[test]
    fn utilization_examples() {
        let i = inst(&[("c3.xlarge", 2)], &[("s3", 1)]);
        let c3 = i.catalog.vm_index("c3.xlarge").unwrap();
        let s2 = pm(i.catalog.pm_index("s3").unwrap(), 0);
        assert_eq!(i.catalog.vm_types()[c3].vcpus, 4);
        assert_eq!(i.catalog.pm_types()[s2.ty].vcpus, 8);
        let mut p = Placement::default();
        for ord in 0..2 {
            p.vm_to_pm.insert(vm(c3, ord), s2);
            p.disk_map.insert(vm(c3, ord), vec![ord as usize, (ord as usize + 1) % 2]);
        }
        assert!(validate(&p, &i).is_empty());
        let r = utilization(&p, &i);
        assert_eq!(r.pms[0].ratios.vcpu, 1.0);

        let i = inst(&[("m3.medium", 1)], &[("s4", 1)]);
        let s4 = pm(i.catalog.pm_index("s4").unwrap(), 0);
        let mut p = Placement::default();
        p.vm_to_pm.insert(vm(0, 0), s4);
        p.disk_map.insert(vm(0, 0), vec![2]);
        assert_eq!(utilization(&p, &i).pms[0].ratios.disk_count, 0.25);

        let i = inst(&[("m3.medium", 1)], &[("s1", 1)]);
        let mut p = Placement::default();
        p.vm_to_pm.insert(vm(0, 0), pm(0, 0));
        p.disk_map.insert(vm(0, 0), vec![0]);
        let r = utilization(&p, &i);
        assert_eq!(r.pms[0].ratios.disk_capacity, 4.0 / 256.0);
        assert_eq!(r.by_type[0].used_pms, 1);
        assert!(saturation_holds(&p, &i));
    }

    #[test]
    fn json_round_trip() {
        let i = inst(&[("m3.medium", 2)], &[("s1", 2)]);
        let mut p = Placement::default();
        p.vm_to_pm.insert(vm(0, 0), pm(0, 1));
        p.disk_map.insert(vm(0, 0), vec![0]);
        p.vm_to_pm.insert(vm(0, 1), pm(0, 1));
        p.disk_map.insert(vm(0, 1), vec![0]);
        let text = p.to_json(&i.catalog).unwrap();
        assert!(text.contains("\"m3.medium#1\"") && text.contains("\"s1#1\""));
        assert_eq!(Placement::from_json(&text, &i.catalog).unwrap(), p);
        assert!(Placement::from_json(r#"{"placements":[{"vm":"nope#0","pm":"s1#0","disks":[]}]}"#, &i.catalog).is_err());
    }

    #[test]
    fn import_solution_values() {
        let i = inst(&[("m3.medium", 1)], &[("s1", 1)]);
        let (model, _) = build_f1(&i).unwrap();
        let v = import_values(&model, r#"{"z_j0_0": 1, "x_i0_0_j0_0": 1.0}"#).unwrap();
        assert_eq!(v, vec![1.0, 0.0, 1.0]);
        assert!(import_values(&model, r#"{"bogus": 1}"#).is_err());
    }
}
