use crate::configs::ConfigSet;
use crate::error::{Error, Result};
use crate::model::{Instance, PmId, VmId};

use super::{used_var_name, Formulation, LinearModel, Partition, Sense, VarMap, VarRole};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Use 1 instead of `N` as the big-M of configuration-side `z` rows.
    /// Valid because at most one configuration is chosen per PM.
    pub config_big_m_one: bool,
}

pub fn build_f1(instance: &Instance) -> Result<(LinearModel, VarMap)> {
    Assembler::new(instance, Partition::all_direct(instance), &[], BuildOptions::default(), Formulation::F1)?.run()
}

pub fn build_f2(instance: &Instance, config_sets: &[ConfigSet]) -> Result<(LinearModel, VarMap)> {
    build_with(instance, Formulation::F2, None, config_sets, BuildOptions::default())
}

pub fn build_comb(
    instance: &Instance,
    partition: &Partition,
    config_sets: &[ConfigSet],
) -> Result<(LinearModel, VarMap)> {
    build_with(instance, Formulation::Comb, Some(partition), config_sets, BuildOptions::default())
}

/// Dispatch on the formulation. `partition` is required for `Comb` and
/// ignored otherwise.
pub fn build(
    instance: &Instance,
    formulation: Formulation,
    partition: Option<&Partition>,
    config_sets: &[ConfigSet],
    opts: BuildOptions,
) -> Result<(LinearModel, VarMap)> {
    build_with(instance, formulation, partition, config_sets, opts)
}

fn build_with(
    instance: &Instance,
    formulation: Formulation,
    partition: Option<&Partition>,
    config_sets: &[ConfigSet],
    opts: BuildOptions,
) -> Result<(LinearModel, VarMap)> {
    let partition = match formulation {
        Formulation::F1 => Partition::all_direct(instance),
        Formulation::F2 => Partition::all_configured(instance),
        Formulation::Comb => partition
            .cloned()
            .ok_or_else(|| Error::InvalidPartition("COMB needs a partition".into()))?,
    };
    Assembler::new(instance, partition, config_sets, opts, formulation)?.run()
}

struct Assembler<'a> {
    inst: &'a Instance,
    form: Formulation,
    opts: BuildOptions,
    partition: Partition,
    sets: Vec<&'a ConfigSet>,
    vms: Vec<VmId>,
    /// Offset of each VM's first volume among all volumes.
    vol_off: Vec<usize>,
    total_vols: usize,
    /// Offset of each P1 PM's first disk among all P1 disks.
    disk_off: Vec<usize>,
    total_disks: usize,
    model: LinearModel,
    roles: Vec<VarRole>,
}

impl<'a> Assembler<'a> {
    fn new(
        inst: &'a Instance,
        partition: Partition,
        config_sets: &'a [ConfigSet],
        opts: BuildOptions,
        form: Formulation,
    ) -> Result<Self> {
        partition.validate(inst)?;
        let dim = inst.catalog.vm_types().len();
        let policy_tag = inst.policy.digest();
        let mut sets = Vec::new();
        let mut needed: Vec<usize> = partition.p2.iter().map(|pm| pm.ty).collect();
        needed.dedup();
        for ty in needed {
            let name = &inst.catalog.pm_types()[ty].name;
            let set = config_sets
                .iter()
                .find(|s| &s.pm_type == name)
                .ok_or_else(|| Error::MissingConfigSet(name.clone()))?;
            if set.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: set.dim() });
            }
            if set.policy_tag != policy_tag {
                return Err(Error::InvalidModel(format!(
                    "configuration set for `{name}` was enumerated under a different policy"
                )));
            }
            sets.push(set);
        }

        let vms = inst.vms();
        let mut vol_off = Vec::with_capacity(vms.len());
        let mut total_vols = 0;
        for &vm in &vms {
            vol_off.push(total_vols);
            total_vols += inst.vm_type(vm).volumes.len();
        }
        let mut disk_off = Vec::with_capacity(partition.p1.len());
        let mut total_disks = 0;
        for &pm in &partition.p1 {
            disk_off.push(total_disks);
            total_disks += inst.pm_type(pm).disks.len();
        }
        Ok(Assembler {
            inst,
            form,
            opts,
            partition,
            sets,
            vms,
            vol_off,
            total_vols,
            disk_off,
            total_disks,
            model: LinearModel::new(&form.to_string()),
            roles: Vec::new(),
        })
    }

    fn big_m(&self) -> f64 {
        self.vms.len() as f64
    }

    fn set_for(&self, pm: PmId) -> &'a ConfigSet {
        let name = &self.inst.pm_type(pm).name;
        self.sets.iter().find(|s| &s.pm_type == name).expect("checked in new")
    }

    fn run(mut self) -> Result<(LinearModel, VarMap)> {
        let p1 = self.partition.p1.clone();
        let p2 = self.partition.p2.clone();
        let n1 = p1.len();

        // x, then y, over P1.
        let x0 = self.model.num_vars();
        for &vm in &self.vms {
            for &pm in &p1 {
                let ub = if self.inst.allows(vm, pm) { 1.0 } else { 0.0 };
                self.model.add_var(format!("x_{vm}_{pm}"), 0.0, ub, super::VarKind::Binary);
                self.roles.push(VarRole::Assign { vm, pm });
            }
        }
        let y0 = self.model.num_vars();
        for &vm in &self.vms {
            for k in 0..self.inst.vm_type(vm).volumes.len() {
                for &pm in &p1 {
                    let ub = if self.inst.allows(vm, pm) { 1.0 } else { 0.0 };
                    for l in 0..self.inst.pm_type(pm).disks.len() {
                        self.model
                            .add_var(format!("y_{vm}_k{k}_{pm}_l{l}"), 0.0, ub, super::VarKind::Binary);
                        self.roles.push(VarRole::Disk { vm, k, pm, l });
                    }
                }
            }
        }
        // g over P2.
        let mut g_start = Vec::with_capacity(p2.len());
        for &pm in &p2 {
            g_start.push(self.model.num_vars());
            for t in 0..self.set_for(pm).len() {
                self.model.add_binary(format!("g_{pm}_t{t}"));
                self.roles.push(VarRole::Config { pm, t });
            }
        }
        // z over all PMs.
        let z0 = self.model.num_vars();
        let pms = self.inst.pms();
        for &pm in &pms {
            self.model.add_binary(used_var_name(pm));
            self.roles.push(VarRole::Used { pm });
        }
        let z_of = |pm: PmId| z0 + pms.binary_search(&pm).expect("PM of the instance");
        self.model.objective = pms
            .iter()
            .enumerate()
            .map(|(p, &pm)| (z0 + p, self.inst.pm_type(pm).cost as f64))
            .filter(|&(_, c)| c != 0.0)
            .collect();

        let x = |i: usize, jp: usize| x0 + i * n1 + jp;
        let (vol_off, disk_off, total_disks) = (self.vol_off.clone(), self.disk_off.clone(), self.total_disks);
        let y = |i: usize, k: usize, jp: usize, l: usize| y0 + (vol_off[i] + k) * total_disks + disk_off[jp] + l;
        let exact = self.form == Formulation::F1;
        let big_m = self.big_m();

        if n1 > 0 {
            for (i, &vm) in self.vms.iter().enumerate() {
                for k in 0..self.inst.vm_type(vm).volumes.len() {
                    for (jp, &pm) in p1.iter().enumerate() {
                        for l in 0..self.inst.pm_type(pm).disks.len() {
                            self.model.add_constraint(
                                format!("link_{vm}_k{k}_{pm}_l{l}"),
                                vec![(x(i, jp), -1.0), (y(i, k, jp, l), 1.0)],
                                Sense::Le,
                                0.0,
                            );
                        }
                    }
                }
            }
            for (i, &vm) in self.vms.iter().enumerate() {
                for k in 0..self.inst.vm_type(vm).volumes.len() {
                    let mut row: Vec<(usize, f64)> = Vec::new();
                    for (jp, &pm) in p1.iter().enumerate() {
                        for l in 0..self.inst.pm_type(pm).disks.len() {
                            row.push((y(i, k, jp, l), 1.0));
                        }
                    }
                    let (sense, rhs) = if exact {
                        (Sense::Eq, 1.0)
                    } else {
                        row.extend((0..n1).map(|jp| (x(i, jp), -1.0)));
                        (Sense::Eq, 0.0)
                    };
                    self.model.add_constraint(format!("diskone_{vm}_k{k}"), row, sense, rhs);
                }
            }
            for (i, &vm) in self.vms.iter().enumerate() {
                let row = (0..n1).map(|jp| (x(i, jp), 1.0)).collect();
                let sense = if exact { Sense::Eq } else { Sense::Le };
                self.model.add_constraint(format!("vmone_{vm}"), row, sense, 1.0);
            }
            for (i, &vm) in self.vms.iter().enumerate() {
                let nk = self.inst.vm_type(vm).volumes.len();
                for (jp, &pm) in p1.iter().enumerate() {
                    for l in 0..self.inst.pm_type(pm).disks.len() {
                        let row = (0..nk).map(|k| (y(i, k, jp, l), 1.0)).collect();
                        self.model.add_constraint(format!("anti_{vm}_{pm}_l{l}"), row, Sense::Le, 1.0);
                    }
                }
            }
            for (jp, &pm) in p1.iter().enumerate() {
                for (l, &cap) in self.inst.pm_type(pm).disks.iter().enumerate() {
                    let mut row = Vec::with_capacity(self.total_vols);
                    for (i, &vm) in self.vms.iter().enumerate() {
                        for (k, &size) in self.inst.vm_type(vm).volumes.iter().enumerate() {
                            row.push((y(i, k, jp, l), size as f64));
                        }
                    }
                    self.model.add_constraint(format!("diskcap_{pm}_l{l}"), row, Sense::Le, cap as f64);
                }
            }
            for (jp, &pm) in p1.iter().enumerate() {
                let row = (0..self.vms.len())
                    .map(|i| (x(i, jp), self.inst.vm_type(self.vms[i]).vcpus as f64))
                    .collect();
                self.model
                    .add_constraint(format!("cpu_{pm}"), row, Sense::Le, self.inst.pm_type(pm).vcpus as f64);
            }
            for (jp, &pm) in p1.iter().enumerate() {
                let row = (0..self.vms.len())
                    .map(|i| (x(i, jp), self.inst.vm_type(self.vms[i]).memory_mib as f64))
                    .collect();
                self.model
                    .add_constraint(format!("mem_{pm}"), row, Sense::Le, self.inst.pm_type(pm).memory_mib as f64);
            }
            for (jp, &pm) in p1.iter().enumerate() {
                let mut row: Vec<(usize, f64)> = (0..self.vms.len()).map(|i| (x(i, jp), -1.0)).collect();
                row.push((z_of(pm), 1.0));
                self.model.add_constraint(format!("zlo_{pm}"), row, Sense::Le, 0.0);
            }
            for (jp, &pm) in p1.iter().enumerate() {
                let mut row: Vec<(usize, f64)> = (0..self.vms.len()).map(|i| (x(i, jp), -1.0)).collect();
                row.push((z_of(pm), big_m));
                self.model.add_constraint(format!("zhi_{pm}"), row, Sense::Ge, 0.0);
            }
        }

        if !p2.is_empty() {
            let cfg_m = if self.opts.config_big_m_one { 1.0 } else { big_m };
            let g_row = |p: usize, len: usize, coef: f64| -> Vec<(usize, f64)> {
                (g_start[p]..g_start[p] + len).map(|v| (v, coef)).collect()
            };
            for (p, &pm) in p2.iter().enumerate() {
                let row = g_row(p, self.set_for(pm).len(), 1.0);
                self.model.add_constraint(format!("onecfg_{pm}"), row, Sense::Le, 1.0);
            }
            if self.form == Formulation::F2 {
                self.cover_rows(&p2, &g_start, None);
            }
            for (p, &pm) in p2.iter().enumerate() {
                let mut row = g_row(p, self.set_for(pm).len(), -1.0);
                row.push((z_of(pm), 1.0));
                self.model.add_constraint(format!("zlo_{pm}"), row, Sense::Le, 0.0);
            }
            for (p, &pm) in p2.iter().enumerate() {
                let mut row = g_row(p, self.set_for(pm).len(), -1.0);
                row.push((z_of(pm), cfg_m));
                self.model.add_constraint(format!("zhi_{pm}"), row, Sense::Ge, 0.0);
            }
        }
        if self.form == Formulation::Comb {
            self.cover_rows(&p2, &g_start, Some((x0, n1)));
        }

        let map = VarMap {
            formulation: self.form,
            roles: self.roles,
            partition: (self.form == Formulation::Comb).then_some(self.partition),
            config_sets: self.sets.iter().map(|s| (*s).clone()).collect(),
            big_m,
        };
        Ok((self.model, map))
    }

    /// One demand row per catalog VM type, including zero-demand types.
    fn cover_rows(&mut self, p2: &[PmId], g_start: &[usize], direct: Option<(usize, usize)>) {
        let dim = self.inst.catalog.vm_types().len();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        if let Some((x0, n1)) = direct {
            for (i, vm) in self.vms.iter().enumerate() {
                rows[vm.ty].extend((0..n1).map(|jp| (x0 + i * n1 + jp, 1.0)));
            }
        }
        for (p, &pm) in p2.iter().enumerate() {
            let set = self.set_for(pm);
            for t in 0..set.len() {
                for (u, &w) in set.get(t).iter().enumerate() {
                    if w > 0 {
                        rows[u].push((g_start[p] + t, w as f64));
                    }
                }
            }
        }
        for (u, row) in rows.into_iter().enumerate() {
            let demand = self.inst.vm_demand[u] as f64;
            self.model.add_constraint(format!("cover_u{u}"), row, Sense::Ge, demand);
        }
    }
}
