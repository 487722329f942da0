//! LP-based branch-and-bound for minimization MIPs.
//!
//! One dual-simplex tableau is shared by all nodes; a node is the list of
//! bound changes on the path from the root, re-applied before each solve.
//! Nodes are explored depth-first until the first incumbent, then by lowest
//! parent bound (ties to the most recently created node). Branching picks
//! a fractional variable with nonzero cost if there is one, otherwise any
//! fractional integer variable; within the class the most fractional,
//! lowest index on ties. The nearer rounding is explored first. Bounds are
//! tightened by row-activity propagation before every LP; a refuted node is
//! pruned without solving.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::propagate::Propagator;
use super::simplex::{DualSimplex, LpStatus};
use crate::error::Result;
use crate::mip::{LinearModel, VarKind};

pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MipParams {
    pub time_limit: Option<Duration>,
    /// Stop once `(incumbent - bound) / max(1, |incumbent|)` is at most this.
    pub gap_tolerance: f64,
    pub node_limit: Option<usize>,
    pub record_trace: bool,
}

impl Default for MipParams {
    fn default() -> Self {
        MipParams {
            time_limit: None,
            gap_tolerance: 0.0,
            node_limit: None,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MipStatus {
    Optimal,
    Infeasible,
    /// A time or node limit stopped the search.
    TimeLimitWithIncumbent,
    TimeLimitNoIncumbent,
}

/// Snapshot after one processed node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEvent {
    pub node: usize,
    pub root_lp: f64,
    pub best_bound: f64,
    pub incumbent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MipResult {
    pub status: MipStatus,
    pub objective: Option<f64>,
    pub best_bound: f64,
    pub gap: Option<f64>,
    #[serde(skip)]
    pub values: Option<Vec<f64>>,
    pub nodes: usize,
    pub seconds: f64,
    pub root_lp: Option<f64>,
    pub lp_pivots: usize,
    #[serde(skip)]
    pub trace: Vec<TraceEvent>,
}

pub fn gap(incumbent: f64, bound: f64) -> f64 {
    ((incumbent - bound) / incumbent.abs().max(1.0)).max(0.0)
}

#[derive(Debug, Clone)]
struct Node {
    bound: f64,
    seq: usize,
    changes: Vec<(usize, f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Max-heap order: lower bound first, then newer node first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(self.seq.cmp(&other.seq))
    }
}

enum Open {
    Dive(Vec<Node>),
    Best(BinaryHeap<Node>),
}

impl Open {
    fn pop(&mut self) -> Option<Node> {
        match self {
            Open::Dive(v) => v.pop(),
            Open::Best(h) => h.pop(),
        }
    }

    fn push(&mut self, n: Node) {
        match self {
            Open::Dive(v) => v.push(n),
            Open::Best(h) => h.push(n),
        }
    }

    fn min_bound(&self) -> f64 {
        match self {
            Open::Dive(v) => v.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min),
            Open::Best(h) => h.peek().map_or(f64::INFINITY, |n| n.bound),
        }
    }

    fn into_best(self) -> Open {
        match self {
            Open::Dive(v) => Open::Best(v.into_iter().collect()),
            b => b,
        }
    }
}

struct Incumbent {
    value: f64,
    values: Vec<f64>,
}

pub fn solve_mip(model: &LinearModel, params: &MipParams) -> Result<MipResult> {
    let start = Instant::now();
    let n = model.variables.len();
    let integer: Vec<usize> = (0..n).filter(|&j| model.variables[j].kind != VarKind::Continuous).collect();
    // With integer costs on integer variables only, any improvement is >= 1.
    let integral_objective = model
        .objective
        .iter()
        .all(|&(j, c)| c.fract() == 0.0 && model.variables[j].kind != VarKind::Continuous);
    let mut costly = vec![false; n];
    for &(j, c) in &model.objective {
        costly[j] |= c != 0.0;
    }
    let mut root_lb: Vec<f64> = model.variables.iter().map(|v| v.lower).collect();
    let mut root_ub: Vec<f64> = model.variables.iter().map(|v| v.upper).collect();
    let propagator = Propagator::new(model);
    let root_feasible = propagator.propagate(&mut root_lb, &mut root_ub);

    let mut lp = DualSimplex::new(model)?;
    let mut open = Open::Dive(vec![Node { bound: f64::NEG_INFINITY, seq: 0, changes: Vec::new() }]);
    let mut seq = 1usize;
    let mut incumbent: Option<Incumbent> = None;
    let mut root_lp = None;
    let mut nodes = 0usize;
    let mut trace = Vec::new();
    let mut lb = root_lb.clone();
    let mut ub = root_ub.clone();
    let mut stopped_early = false;

    let cannot_improve = |bound: f64, inc: &Option<Incumbent>| -> bool {
        match inc {
            None => false,
            Some(i) if integral_objective => (bound - 1e-6).ceil() >= i.value,
            Some(i) => bound >= i.value - 1e-9 * i.value.abs().max(1.0),
        }
    };

    // Child processed next, straight from its parent's basis.
    let mut plunge: Option<Node> = None;
    while let Some(node) = plunge.take().or_else(|| open.pop()) {
        if cannot_improve(node.bound, &incumbent) {
            continue;
        }
        let over_time = params.time_limit.is_some_and(|t| start.elapsed() >= t);
        let over_nodes = params.node_limit.is_some_and(|k| nodes >= k);
        let within_gap = incumbent.as_ref().is_some_and(|i| {
            let bound = open.min_bound().min(node.bound);
            gap(i.value, bound) <= params.gap_tolerance
        });
        if over_time || over_nodes || within_gap {
            stopped_early = !within_gap;
            open.push(node);
            break;
        }
        nodes += 1;

        lb.copy_from_slice(&root_lb);
        ub.copy_from_slice(&root_ub);
        for &(j, l, u) in &node.changes {
            lb[j] = l;
            ub[j] = u;
        }
        let lp_value = if root_feasible && propagator.propagate(&mut lb, &mut ub) {
            lp.set_bounds(&lb, &ub);
            match lp.solve()? {
                LpStatus::Optimal => Some(lp.objective()),
                _ => None,
            }
        } else {
            None
        };
        if nodes == 1 {
            root_lp = lp_value;
        }
        let mut children = Vec::new();
        if let Some(value) = lp_value {
            if !cannot_improve(value, &incumbent) {
                let x = lp.values();
                try_rounding(model, &integer, &x, &mut incumbent);
                match branching_variable(&integer, &costly, &x) {
                    None => {
                        let mut clean = x;
                        for &j in &integer {
                            clean[j] = clean[j].round();
                        }
                        let obj = model.objective_value(&clean);
                        if incumbent.as_ref().is_none_or(|i| obj < i.value) {
                            incumbent = Some(Incumbent { value: obj, values: clean });
                        }
                    }
                    Some(j) if !cannot_improve(value, &incumbent) => {
                        let v = x[j];
                        let down = (j, lb[j], v.floor());
                        let up = (j, v.ceil(), ub[j]);
                        let (first, second) = if v - v.floor() >= 0.5 { (up, down) } else { (down, up) };
                        // Pushed so that `first` pops first in a dive.
                        for change in [second, first] {
                            let mut changes = node.changes.clone();
                            changes.push(change);
                            children.push(Node { bound: value, seq, changes });
                            seq += 1;
                        }
                    }
                    Some(_) => {}
                }
            }
        }
        if matches!(open, Open::Best(_)) {
            plunge = children.pop();
        }
        for c in children {
            open.push(c);
        }
        if incumbent.is_some() && matches!(open, Open::Dive(_)) {
            open = std::mem::replace(&mut open, Open::Dive(Vec::new())).into_best();
        }
        if params.record_trace {
            let inc = incumbent.as_ref().map(|i| i.value);
            let pending = plunge.as_ref().map_or(f64::INFINITY, |n| n.bound);
            let bound = open.min_bound().min(pending).min(inc.unwrap_or(f64::INFINITY));
            trace.push(TraceEvent {
                node: nodes,
                root_lp: root_lp.unwrap_or(f64::INFINITY),
                best_bound: bound,
                incumbent: inc,
            });
        }
    }

    let seconds = start.elapsed().as_secs_f64();
    let remaining = open.min_bound();
    let (status, best_bound) = match (&incumbent, stopped_early) {
        (Some(i), false) => (MipStatus::Optimal, remaining.min(i.value)),
        (Some(i), true) => (MipStatus::TimeLimitWithIncumbent, remaining.min(i.value)),
        (None, false) => (MipStatus::Infeasible, f64::INFINITY),
        (None, true) => (MipStatus::TimeLimitNoIncumbent, remaining),
    };
    // A fully explored tree proves the incumbent optimal.
    let best_bound = match (status, &incumbent) {
        (MipStatus::Optimal, Some(i)) if remaining == f64::INFINITY => i.value,
        _ => best_bound,
    };
    Ok(MipResult {
        status,
        objective: incumbent.as_ref().map(|i| i.value),
        best_bound,
        gap: incumbent.as_ref().map(|i| gap(i.value, best_bound)),
        values: incumbent.map(|i| i.values),
        nodes,
        seconds,
        root_lp,
        lp_pivots: lp.pivots,
        trace,
    })
}

/// Fractional integer variable to branch on: variables with a nonzero cost
/// first, then the most fractional, lowest index on ties.
fn branching_variable(integer: &[usize], costly: &[bool], x: &[f64]) -> Option<usize> {
    let mut best = None;
    let mut best_key = (false, INTEGRALITY_TOL);
    for &j in integer {
        let frac = (x[j] - x[j].round()).abs();
        if frac <= INTEGRALITY_TOL {
            continue;
        }
        let key = (costly[j], frac);
        if key.0 > best_key.0 || (key.0 == best_key.0 && key.1 > best_key.1) {
            best = Some(j);
            best_key = key;
        }
    }
    best
}

fn try_rounding(model: &LinearModel, integer: &[usize], x: &[f64], incumbent: &mut Option<Incumbent>) {
    let mut r = x.to_vec();
    for &j in integer {
        r[j] = r[j].round();
    }
    if model.max_violation(&r) > INTEGRALITY_TOL {
        return;
    }
    let obj = model.objective_value(&r);
    if incumbent.as_ref().is_none_or(|i| obj < i.value) {
        *incumbent = Some(Incumbent { value: obj, values: r });
    }
}
