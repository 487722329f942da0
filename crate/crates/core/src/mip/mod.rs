//! Solver-neutral linear models and the three placement formulations.
//!
//! * `F1` assigns VMs (`x`) and virtual disks (`y`) to PMs and physical disks
//!   directly.
//! * `F2` picks at most one feasible configuration (`g`) per PM and covers
//!   the per-type demand.
//! * `COMB` assigns directly on a PM subset `P1` and by configuration on the
//!   complement `P2`.
//!
//! Every formulation also has one `z` variable per PM that is 1 iff the PM
//! is used; the objective is the sum of their costs. The big-M constant of
//! the `z` linking rows is `N`, the number of VMs.

mod build;
mod mps;
mod size;

pub use build::{build, build_comb, build_f1, build_f2, BuildOptions};
pub use mps::{write_mps, write_mps_to};
pub use size::{choose_partition, estimate_size, SizeReport};

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::configs::ConfigSet;
use crate::error::{Error, Result};
use crate::model::{Instance, PmId, VmId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    /// `(variable index, coefficient)`, sorted by index, no zeros.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization MIP.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Sorted by index, no zeros.
    pub objective: Vec<(usize, f64)>,
}

impl LinearModel {
    pub fn new(name: &str) -> Self {
        LinearModel {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn add_var(&mut self, name: String, lower: f64, upper: f64, kind: VarKind) -> usize {
        self.variables.push(Variable { name, lower, upper, kind });
        self.variables.len() - 1
    }

    pub fn add_binary(&mut self, name: String) -> usize {
        self.add_var(name, 0.0, 1.0, VarKind::Binary)
    }

    /// Coefficients are sorted and zeros dropped here.
    pub fn add_constraint(&mut self, name: String, mut coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        coeffs.retain(|&(_, c)| c != 0.0);
        coeffs.sort_by_key(|&(j, _)| j);
        self.constraints.push(Constraint { name, coeffs, sense, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.constraints.iter().map(|c| c.coeffs.len()).sum()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, c)| c * values[j]).sum()
    }

    /// Check the structural invariants: indices in range, rows sorted without
    /// duplicates or zeros, binary bounds inside `[0, 1]`, unique names.
    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        let mut names = HashSet::with_capacity(n);
        for v in &self.variables {
            if !names.insert(v.name.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate variable `{}`", v.name)));
            }
            if v.lower > v.upper {
                return Err(Error::InvalidModel(format!("empty bounds on `{}`", v.name)));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(Error::InvalidModel(format!("binary `{}` has bounds outside [0, 1]", v.name)));
            }
        }
        let check_row = |what: &str, row: &[(usize, f64)]| -> Result<()> {
            for w in row.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(Error::InvalidModel(format!("{what}: unsorted or repeated index")));
                }
            }
            for &(j, c) in row {
                if j >= n {
                    return Err(Error::InvalidModel(format!("{what}: variable {j} out of range")));
                }
                if c == 0.0 || !c.is_finite() {
                    return Err(Error::InvalidModel(format!("{what}: bad coefficient {c}")));
                }
            }
            Ok(())
        };
        check_row("objective", &self.objective)?;
        let mut names = HashSet::with_capacity(self.constraints.len());
        for c in &self.constraints {
            if !names.insert(c.name.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate constraint `{}`", c.name)));
            }
            check_row(&c.name, &c.coeffs)?;
        }
        Ok(())
    }

    /// Largest violation of any row or bound by `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (v, &x) in self.variables.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(j, a)| a * values[j]).sum();
            let viol = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formulation {
    F1,
    F2,
    Comb,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::F1 => "f1",
            Formulation::F2 => "f2",
            Formulation::Comb => "comb",
        })
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(Formulation::F1),
            "f2" => Ok(Formulation::F2),
            "comb" => Ok(Formulation::Comb),
            other => Err(Error::InvalidModel(format!("unknown formulation `{other}`"))),
        }
    }
}

/// Split of the PMs into the directly assigned set `p1` and the
/// configuration set `p2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub p1: Vec<PmId>,
    pub p2: Vec<PmId>,
}

impl Partition {
    /// All PMs of the listed types go to `p1`, the rest to `p2`.
    pub fn by_types(instance: &Instance, p1_types: &[usize]) -> Partition {
        let (p1, p2) = instance.pms().into_iter().partition(|pm| p1_types.contains(&pm.ty));
        Partition { p1, p2 }
    }

    pub fn all_direct(instance: &Instance) -> Partition {
        Partition { p1: instance.pms(), p2: Vec::new() }
    }

    pub fn all_configured(instance: &Instance) -> Partition {
        Partition { p1: Vec::new(), p2: instance.pms() }
    }

    /// `p1` and `p2` must be disjoint, cover every PM of the instance, and
    /// list PMs in instance order.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let mut all: Vec<PmId> = self.p1.iter().chain(&self.p2).copied().collect();
        let sorted_parts = self.p1.windows(2).all(|w| w[0] < w[1]) && self.p2.windows(2).all(|w| w[0] < w[1]);
        all.sort();
        if !sorted_parts || all != instance.pms() {
            return Err(Error::InvalidPartition(
                "P1 and P2 must be sorted, disjoint and cover every PM exactly once".into(),
            ));
        }
        Ok(())
    }

    pub fn is_direct(&self, pm: PmId) -> bool {
        self.p1.binary_search(&pm).is_ok()
    }
}

/// Placement meaning of one model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum VarRole {
    /// VM `vm` runs on PM `pm`.
    Assign { vm: VmId, pm: PmId },
    /// Virtual disk `k` of `vm` sits on physical disk `l` of `pm`.
    Disk { vm: VmId, k: usize, pm: PmId, l: usize },
    /// PM `pm` runs configuration `t` of its type.
    Config { pm: PmId, t: usize },
    /// PM `pm` is switched on.
    Used { pm: PmId },
}

/// Bridge from variable indices back to placement semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarMap {
    pub formulation: Formulation,
    /// One role per model variable, in model order.
    pub roles: Vec<VarRole>,
    pub partition: Option<Partition>,
    /// Configuration sets referenced by `Config` roles.
    pub config_sets: Vec<ConfigSet>,
    pub big_m: f64,
}

impl VarMap {
    pub fn config_set(&self, pm_type_name: &str) -> Option<&ConfigSet> {
        self.config_sets.iter().find(|c| c.pm_type == pm_type_name)
    }

    /// Index of the `Used` variable per PM, in the order the roles list them.
    pub fn used_vars(&self) -> Vec<(PmId, usize)> {
        self.roles
            .iter()
            .enumerate()
            .filter_map(|(i, r)| match r {
                VarRole::Used { pm } => Some((*pm, i)),
                _ => None,
            })
            .collect()
    }
}

/// Name of the `z` variable of a PM.
pub fn used_var_name(pm: PmId) -> String {
    format!("z_{pm}")
}
