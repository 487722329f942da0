use serde::{Deserialize, Serialize};

use crate::configs::CountEntry;
use crate::error::{Error, Result};
use crate::model::Instance;

use super::{Formulation, Partition};

/// Exact variable and constraint counts, with per-family breakdowns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeReport {
    pub variables: usize,
    pub constraints: usize,
    pub variable_families: Vec<(String, usize)>,
    pub constraint_families: Vec<(String, usize)>,
}

/// Closed-form model size. `config_counts[v]` is the configuration count
/// of PM type `v`; it is only consulted for types with PMs in `P2`.
pub fn estimate_size(
    instance: &Instance,
    formulation: Formulation,
    partition: Option<&Partition>,
    config_counts: &[Option<usize>],
) -> Result<SizeReport> {
    let partition = match formulation {
        Formulation::F1 => Partition::all_direct(instance),
        Formulation::F2 => Partition::all_configured(instance),
        Formulation::Comb => partition
            .cloned()
            .ok_or_else(|| Error::InvalidPartition("COMB needs a partition".into()))?,
    };
    partition.validate(instance)?;

    let n = instance.num_vms();
    let m = instance.num_pms();
    let vols = instance.total_virtual_disks();
    let m1 = partition.p1.len();
    let m2 = partition.p2.len();
    let d1: usize = partition.p1.iter().map(|&pm| instance.pm_type(pm).disks.len()).sum();
    let mut g = 0;
    for &pm in &partition.p2 {
        g += config_counts
            .get(pm.ty)
            .copied()
            .flatten()
            .ok_or_else(|| Error::MissingConfigSet(instance.pm_type(pm).name.clone()))?;
    }
    let types = instance.catalog.vm_types().len();
    let cover = if formulation == Formulation::F1 { 0 } else { types };

    let variable_families = vec![
        ("x".to_string(), n * m1),
        ("y".to_string(), vols * d1),
        ("g".to_string(), g),
        ("z".to_string(), m),
    ];
    let constraint_families = vec![
        ("link".to_string(), vols * d1),
        ("diskone".to_string(), if m1 > 0 { vols } else { 0 }),
        ("vmone".to_string(), if m1 > 0 { n } else { 0 }),
        ("anti".to_string(), n * d1),
        ("diskcap".to_string(), d1),
        ("cpu".to_string(), m1),
        ("mem".to_string(), m1),
        ("onecfg".to_string(), m2),
        ("zlo".to_string(), m1 + m2),
        ("zhi".to_string(), m1 + m2),
        ("cover".to_string(), cover),
    ];
    Ok(SizeReport {
        variables: variable_families.iter().map(|f| f.1).sum(),
        constraints: constraint_families.iter().map(|f| f.1).sum(),
        variable_families,
        constraint_families,
    })
}

/// PM types whose count is over `threshold`, capped, or absent from the
/// table go to `P1`; everything else to `P2`.
pub fn choose_partition(instance: &Instance, counts: &[(String, CountEntry)], threshold: usize) -> Partition {
    let direct: Vec<usize> = instance
        .catalog
        .pm_types()
        .iter()
        .enumerate()
        .filter(|(_, pm)| match counts.iter().find(|(name, _)| name == &pm.name) {
            Some((_, CountEntry::Count(c))) => *c > threshold,
            _ => true,
        })
        .map(|(v, _)| v)
        .collect();
    Partition::by_types(instance, &direct)
}
