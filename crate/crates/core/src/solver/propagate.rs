//! Activity-based bound tightening on integer variables.
//!
//! For a row `sum a_j x_j <= b`, the minimum activity over the current box
//! bounds every term: `a_j x_j <= b - (minact - min term_j)`. Rounded to the
//! integer grid this tightens one side of `x_j`; a minimum activity above
//! `b` proves the box empty. `>=` rows use the maximum activity and `=` rows
//! both. Rows are revisited through a queue whenever one of their variables
//! moves, up to a fixed visit budget.

use std::collections::VecDeque;

use crate::mip::{LinearModel, Sense, VarKind};

const FEAS_TOL: f64 = 1e-6;
const VISITS_PER_ROW: usize = 8;

pub struct Propagator {
    rows: Vec<(Vec<(usize, f64)>, Sense, f64)>,
    columns: Vec<Vec<usize>>,
    integer: Vec<bool>,
}

/// Sum of finite terms plus the number of infinite ones.
#[derive(Clone, Copy)]
struct Activity {
    finite: f64,
    infinite: usize,
}

impl Activity {
    fn without(self, term: f64) -> Option<f64> {
        match (term.is_finite(), self.infinite) {
            (true, 0) => Some(self.finite - term),
            (false, 1) => Some(self.finite),
            _ => None,
        }
    }
}

impl Propagator {
    pub fn new(model: &LinearModel) -> Self {
        let mut columns = vec![Vec::new(); model.num_vars()];
        let rows = model
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| {
                for &(j, _) in &c.coeffs {
                    columns[j].push(i);
                }
                (c.coeffs.clone(), c.sense, c.rhs)
            })
            .collect();
        let integer = model.variables.iter().map(|v| v.kind != VarKind::Continuous).collect();
        Propagator { rows, columns, integer }
    }

    /// Tighten `lb`/`ub` in place. Returns false if some row cannot be met.
    pub fn propagate(&self, lb: &mut [f64], ub: &mut [f64]) -> bool {
        let m = self.rows.len();
        let mut queued = vec![true; m];
        let mut queue: VecDeque<usize> = (0..m).collect();
        let mut budget = VISITS_PER_ROW * m.max(1);
        while let Some(i) = queue.pop_front() {
            queued[i] = false;
            if budget == 0 {
                break;
            }
            budget -= 1;
            let (coeffs, sense, rhs) = &self.rows[i];
            let (lo, hi) = activities(coeffs, lb, ub);
            let tol = FEAS_TOL * (1.0 + rhs.abs());
            let check_le = matches!(sense, Sense::Le | Sense::Eq);
            let check_ge = matches!(sense, Sense::Ge | Sense::Eq);
            if (check_le && lo.infinite == 0 && lo.finite > rhs + tol)
                || (check_ge && hi.infinite == 0 && hi.finite < rhs - tol)
            {
                return false;
            }
            for &(j, a) in coeffs {
                if !self.integer[j] {
                    continue;
                }
                let (min_term, max_term) = if a > 0.0 { (a * lb[j], a * ub[j]) } else { (a * ub[j], a * lb[j]) };
                let mut new_lb = lb[j];
                let mut new_ub = ub[j];
                // a x_j <= rhs - (other terms at their minimum)
                if check_le {
                    if let Some(rest) = lo.without(min_term) {
                        let cap = (rhs - rest) / a;
                        if a > 0.0 {
                            new_ub = new_ub.min((cap + FEAS_TOL).floor());
                        } else {
                            new_lb = new_lb.max((cap - FEAS_TOL).ceil());
                        }
                    }
                }
                // a x_j >= rhs - (other terms at their maximum)
                if check_ge {
                    if let Some(rest) = hi.without(max_term) {
                        let floor = (rhs - rest) / a;
                        if a > 0.0 {
                            new_lb = new_lb.max((floor - FEAS_TOL).ceil());
                        } else {
                            new_ub = new_ub.min((floor + FEAS_TOL).floor());
                        }
                    }
                }
                if new_lb > new_ub {
                    return false;
                }
                if new_lb > lb[j] || new_ub < ub[j] {
                    lb[j] = new_lb;
                    ub[j] = new_ub;
                    for &r in &self.columns[j] {
                        if !queued[r] {
                            queued[r] = true;
                            queue.push_back(r);
                        }
                    }
                }
            }
        }
        true
    }
}

fn activities(coeffs: &[(usize, f64)], lb: &[f64], ub: &[f64]) -> (Activity, Activity) {
    let mut lo = Activity { finite: 0.0, infinite: 0 };
    let mut hi = Activity { finite: 0.0, infinite: 0 };
    for &(j, a) in coeffs {
        let (min_term, max_term) = if a > 0.0 { (a * lb[j], a * ub[j]) } else { (a * ub[j], a * lb[j]) };
        if min_term.is_finite() {
            lo.finite += min_term;
        } else {
            lo.infinite += 1;
        }
        if max_term.is_finite() {
            hi.finite += max_term;
        } else {
            hi.infinite += 1;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn fixes_and_detects_conflicts() {
        let mut m = LinearModel::new("p");
        let a = m.add_binary("a".into());
        let b = m.add_binary("b".into());
        let c = m.add_binary("c".into());
        m.add_constraint("cover".into(), vec![(a, 1.0), (b, 1.0)], Sense::Ge, 1.0);
        m.add_constraint("link".into(), vec![(b, 1.0), (c, -1.0)], Sense::Le, 0.0);
        let p = Propagator::new(&m);
        let (mut lb, mut ub) = (vec![0.0; 3], vec![1.0; 3]);
        ub[a] = 0.0;
        assert!(p.propagate(&mut lb, &mut ub));
        assert_eq!((lb[b], lb[c]), (1.0, 1.0));
        let (mut lb, mut ub) = (vec![0.0; 3], vec![0.0, 1.0, 0.0]);
        assert!(!p.propagate(&mut lb, &mut ub));
    }

    #[test]
    fn leaves_unbounded_terms_alone() {
        let mut m = LinearModel::new("p");
        let x = m.add_var("x".into(), 0.0, f64::INFINITY, VarKind::Integer);
        let y = m.add_var("y".into(), 0.0, f64::INFINITY, VarKind::Integer);
        m.add_constraint("r".into(), vec![(x, 2.0), (y, 3.0)], Sense::Le, 7.0);
        let p = Propagator::new(&m);
        let (mut lb, mut ub) = (vec![0.0; 2], vec![f64::INFINITY; 2]);
        assert!(p.propagate(&mut lb, &mut ub));
        assert_eq!(ub, vec![3.0, 2.0]);
    }

    fn rows() -> impl Strategy<Value = Vec<(Vec<i32>, u8, i32)>> {
        prop::collection::vec((prop::collection::vec(-3i32..=3, 4), 0u8..3, -4i32..=6), 1..5)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn never_cuts_off_an_integer_point(rows in rows(), upper in prop::collection::vec(0i32..=2, 4)) {
            let mut m = LinearModel::new("p");
            for (j, &u) in upper.iter().enumerate() {
                m.add_var(format!("x{j}"), 0.0, u as f64, VarKind::Integer);
            }
            for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
                let sense = [Sense::Le, Sense::Ge, Sense::Eq][*sense as usize];
                let coeffs = coeffs.iter().enumerate().map(|(j, &a)| (j, a as f64)).collect();
                m.add_constraint(format!("r{i}"), coeffs, sense, *rhs as f64);
            }
            let (mut lb, mut ub) = (vec![0.0; 4], upper.iter().map(|&u| u as f64).collect::<Vec<_>>());
            let kept = Propagator::new(&m).propagate(&mut lb, &mut ub);
            for code in 0..81 {
                let x: Vec<f64> = (0..4).map(|j| ((code / 3usize.pow(j)) % 3) as f64).collect();
                if x.iter().zip(&upper).any(|(&v, &u)| v > u as f64) || m.max_violation(&x) > 0.0 {
                    continue;
                }
                prop_assert!(kept);
                for j in 0..4 {
                    prop_assert!(lb[j] <= x[j] && x[j] <= ub[j]);
                }
            }
        }
    }
}
