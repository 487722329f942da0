//! Dense bounded dual simplex.
//!
//! Every row `a x (<=|>=|=) b` is divided by its largest coefficient and
//! becomes `a x + s = b` with a bounded slack: `s >= 0` for `<=`, `s <= 0`
//! for `>=`, `s = 0` for `=`, further boxed by the activity range of the
//! row. Once every column is boxed any basis can be made dual feasible by
//! seating nonbasics on the bound their reduced cost asks for, which holds
//! for all 0-1 models. The tableau `B^-1 [A | I]` is stored
//! densely, row-major, so the slack block of each row is a row of `B^-1`.
//!
//! Leaving row: largest `violation^2 / |row of B^-1|^2`. Entering column:
//! bound-flipping ratio test, boxed columns are flipped past while the
//! row stays infeasible, then the largest pivot within the Harris window.
//! After a streak of degenerate pivots both choices switch to lowest index
//! (Bland) for the rest of the pass. A pass first runs on slightly
//! perturbed costs, then finishes on the exact costs.

use crate::error::{Error, Result};
use crate::mip::{LinearModel, Sense};

pub const FEAS_TOL: f64 = 1e-7;
const PIVOT_TOL: f64 = 1e-7;
const DUAL_TOL: f64 = 1e-9;
/// Reduced-cost magnitude below which a sign is treated as noise.
const DRIFT_TOL: f64 = 1e-6;
const PERTURBATION: f64 = 1e-6;
const DEGENERATE_STREAK: usize = 50;
/// Tableau cells beyond which in-process solving is refused.
pub const MAX_CELLS: usize = 25_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    /// Structural values; empty unless optimal.
    pub values: Vec<f64>,
}

/// Solve the continuous relaxation of `model`.
pub fn solve_lp(model: &LinearModel) -> Result<LpResult> {
    let mut lp = DualSimplex::new(model)?;
    let status = lp.solve()?;
    Ok(lp.result(status))
}

#[derive(Debug, Clone)]
pub(crate) struct DualSimplex {
    m: usize,
    n: usize,
    cols: usize,
    /// Scaled rows of `[A | I]` (non-empty rows only) and right-hand sides.
    a0: Vec<f64>,
    b0: Vec<f64>,
    tab: Vec<f64>,
    rhs: Vec<f64>,
    /// Squared norm of the slack block of each tableau row.
    weight: Vec<f64>,
    basis: Vec<usize>,
    /// Row of a basic column, `usize::MAX` when nonbasic.
    row_of: Vec<usize>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    /// Structural costs shifted away from their bound side.
    perturbed: Vec<f64>,
    perturb: bool,
    d: Vec<f64>,
    x: Vec<f64>,
    /// A dropped empty row is violated.
    trivially_infeasible: bool,
    pub pivots: usize,
}

impl DualSimplex {
    pub fn new(model: &LinearModel) -> Result<Self> {
        let n = model.variables.len();
        let mut rows = Vec::new();
        let mut trivially_infeasible = false;
        for c in &model.constraints {
            if c.coeffs.iter().all(|&(_, a)| a == 0.0) {
                let ok = match c.sense {
                    Sense::Le => 0.0 <= c.rhs + FEAS_TOL,
                    Sense::Ge => 0.0 >= c.rhs - FEAS_TOL,
                    Sense::Eq => c.rhs.abs() <= FEAS_TOL,
                };
                trivially_infeasible |= !ok;
            } else {
                rows.push(c);
            }
        }
        let m = rows.len();
        let cols = n + m;
        let cells = m.saturating_mul(cols);
        if cells > MAX_CELLS {
            return Err(Error::ModelTooLarge { cells, limit: MAX_CELLS });
        }
        let mut a0 = vec![0.0; cells];
        let mut b0 = vec![0.0; m];
        let mut lb = Vec::with_capacity(cols);
        let mut ub = Vec::with_capacity(cols);
        for v in &model.variables {
            lb.push(v.lower);
            ub.push(v.upper);
        }
        for (r, c) in rows.iter().enumerate() {
            let scale = c.coeffs.iter().map(|&(_, a)| a.abs()).fold(0.0, f64::max);
            for &(j, a) in &c.coeffs {
                a0[r * cols + j] += a / scale;
            }
            a0[r * cols + n + r] = 1.0;
            b0[r] = c.rhs / scale;
            // The slack also stays within the range the row activity allows
            // over the original column bounds, padded outward by one unit.
            let (mut lo_act, mut hi_act) = (0.0, 0.0);
            for &(j, a) in &c.coeffs {
                let (p, q) = (a / scale * lb[j], a / scale * ub[j]);
                lo_act += if a > 0.0 { p } else { q };
                hi_act += if a > 0.0 { q } else { p };
            }
            let (implied_lo, implied_hi) = (b0[r] - hi_act - 1.0, b0[r] - lo_act + 1.0);
            let (l, u) = match c.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            let (l, u) = (f64::max(l, implied_lo.min(u)), f64::min(u, implied_hi.max(l)));
            lb.push(if l.is_nan() { f64::NEG_INFINITY } else { l });
            ub.push(if u.is_nan() { f64::INFINITY } else { u });
        }
        let mut cost = vec![0.0; cols];
        for &(j, c) in &model.objective {
            cost[j] += c;
        }
        let perturbed = (0..cols)
            .map(|j| {
                // Deterministic spread in [1, 2) times the base shift.
                let h = ((j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11) as f64 / (1u64 << 53) as f64;
                let shift = PERTURBATION * (1.0 + h) * cost[j].abs().max(1.0);
                let toward_lower = cost[j] > 0.0 || (cost[j] == 0.0 && lb[j].is_finite());
                if j >= n || lb[j] == ub[j] {
                    cost[j]
                } else if toward_lower {
                    cost[j] + shift
                } else {
                    cost[j] - shift
                }
            })
            .collect();
        let mut row_of = vec![usize::MAX; cols];
        for r in 0..m {
            row_of[n + r] = r;
        }
        let mut lp = DualSimplex {
            m,
            n,
            cols,
            tab: a0.clone(),
            rhs: b0.clone(),
            a0,
            b0,
            weight: vec![1.0; m],
            basis: (n..cols).collect(),
            row_of,
            lb,
            ub,
            d: cost.clone(),
            cost,
            perturbed,
            perturb: false,
            x: vec![0.0; cols],
            trivially_infeasible,
            pivots: 0,
        };
        lp.place_nonbasics(true)?;
        Ok(lp)
    }

    /// Replace structural bounds; the basis is kept, so the next `solve`
    /// is warm.
    pub fn set_bounds(&mut self, lb: &[f64], ub: &[f64]) {
        self.lb[..self.n].copy_from_slice(lb);
        self.ub[..self.n].copy_from_slice(ub);
    }

    /// Recompute duals for the active costs, re-seat nonbasic columns and
    /// recompute basic values.
    fn restart(&mut self, perturb: bool) -> Result<()> {
        self.perturb = perturb;
        self.recompute_duals();
        self.place_nonbasics(false)?;
        self.recompute_basics();
        Ok(())
    }

    /// Put each nonbasic column at the bound its reduced cost asks for.
    fn place_nonbasics(&mut self, fresh: bool) -> Result<()> {
        for j in 0..self.cols {
            if self.row_of[j] != usize::MAX {
                continue;
            }
            let (l, u) = (self.lb[j], self.ub[j]);
            let at_upper_before = !fresh && self.x[j] == u && l != u;
            let want_upper = if self.d[j] > DUAL_TOL {
                false
            } else if self.d[j] < -DUAL_TOL {
                true
            } else if l.is_finite() && u.is_finite() {
                at_upper_before
            } else {
                !l.is_finite()
            };
            let mut val = if l == u {
                l
            } else if want_upper {
                u
            } else {
                l
            };
            if !val.is_finite() && self.d[j].abs() <= DRIFT_TOL {
                // Reduced-cost noise: drop it and sit on the finite side.
                self.d[j] = 0.0;
                val = if l.is_finite() { l } else { u };
            }
            if !val.is_finite() {
                return Err(Error::Numerical(format!(
                    "column {j} has no finite bound on its improving side"
                )));
            }
            self.x[j] = val;
        }
        Ok(())
    }

    fn recompute_basics(&mut self) {
        let active: Vec<(usize, f64)> = (0..self.cols)
            .filter(|&j| self.row_of[j] == usize::MAX && self.x[j] != 0.0)
            .map(|j| (j, self.x[j]))
            .collect();
        for r in 0..self.m {
            let row = &self.tab[r * self.cols..(r + 1) * self.cols];
            let v = self.rhs[r] - active.iter().map(|&(j, x)| row[j] * x).sum::<f64>();
            self.x[self.basis[r]] = v;
        }
    }

    fn recompute_duals(&mut self) {
        let cost = if self.perturb { &self.perturbed } else { &self.cost };
        self.d.copy_from_slice(cost);
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.tab[r * self.cols..(r + 1) * self.cols];
            for (dj, &t) in self.d.iter_mut().zip(row) {
                *dj -= cb * t;
            }
        }
        for r in 0..self.m {
            self.d[self.basis[r]] = 0.0;
        }
    }

    fn row_weight(&self, r: usize) -> f64 {
        self.tab[r * self.cols + self.n..(r + 1) * self.cols].iter().map(|v| v * v).sum()
    }

    /// Rebuild `B^-1 [A | I]` from the original rows for the current basis.
    fn refactor(&mut self) -> Result<()> {
        self.tab.copy_from_slice(&self.a0);
        self.rhs.copy_from_slice(&self.b0);
        let wanted = self.basis.clone();
        let mut placed = vec![false; self.m];
        let mut new_basis = vec![usize::MAX; self.m];
        for &q in &wanted {
            let mut best = None;
            let mut best_abs = PIVOT_TOL;
            for r in 0..self.m {
                let v = self.tab[r * self.cols + q].abs();
                if !placed[r] && v > best_abs {
                    best = Some(r);
                    best_abs = v;
                }
            }
            let r = best.ok_or_else(|| Error::Numerical("singular basis during refactorization".into()))?;
            placed[r] = true;
            new_basis[r] = q;
            self.eliminate(r, q);
        }
        self.basis = new_basis;
        self.row_of.iter_mut().for_each(|x| *x = usize::MAX);
        for (r, &q) in self.basis.iter().enumerate() {
            self.row_of[q] = r;
        }
        for r in 0..self.m {
            self.weight[r] = self.row_weight(r);
        }
        self.recompute_duals();
        self.place_nonbasics(false)?;
        self.recompute_basics();
        Ok(())
    }

    /// Gauss-Jordan step on `(r, q)` for `tab`, `rhs` and the row weights.
    fn eliminate(&mut self, r: usize, q: usize) {
        let (cols, n) = (self.cols, self.n);
        let piv = self.tab[r * cols + q];
        let inv = 1.0 / piv;
        {
            let row = &mut self.tab[r * cols..(r + 1) * cols];
            row.iter_mut().for_each(|v| *v *= inv);
            row[q] = 1.0;
        }
        self.rhs[r] *= inv;
        self.weight[r] = self.row_weight(r);
        let (pivot_nz, pivot_row): (Vec<usize>, Vec<f64>) = {
            let row = &self.tab[r * cols..(r + 1) * cols];
            row.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(j, &v)| (j, v)).unzip()
        };
        let rhs_r = self.rhs[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.tab[i * cols + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.tab[i * cols..(i + 1) * cols];
            for (&j, &v) in pivot_nz.iter().zip(&pivot_row) {
                row[j] -= f * v;
            }
            row[q] = 0.0;
            self.rhs[i] -= f * rhs_r;
            self.weight[i] = row[n..].iter().map(|v| v * v).sum::<f64>().max(1e-12);
        }
    }

    pub fn solve(&mut self) -> Result<LpStatus> {
        if self.trivially_infeasible {
            return Ok(LpStatus::Infeasible);
        }
        self.restart(true)?;
        let status = self.iterate()?;
        if status != LpStatus::Optimal {
            self.perturb = false;
            return Ok(status);
        }
        self.restart(false)?;
        let status = self.iterate()?;
        if status != LpStatus::Optimal {
            return Ok(status);
        }
        // Drift guard: recompute from the stored tableau, and refactor once
        // if bounds are still violated.
        self.recompute_basics();
        if self.max_bound_violation() > FEAS_TOL * 10.0 {
            self.refactor()?;
            let status = self.iterate()?;
            if status == LpStatus::Optimal && self.max_bound_violation() > 1e-5 {
                return Err(Error::Numerical("primal drift persists after refactorization".into()));
            }
            return Ok(status);
        }
        Ok(status)
    }

    fn max_bound_violation(&self) -> f64 {
        self.basis
            .iter()
            .map(|&j| (self.lb[j] - self.x[j]).max(self.x[j] - self.ub[j]))
            .fold(0.0, f64::max)
    }

    fn iterate(&mut self) -> Result<LpStatus> {
        let budget = 50 * (self.m + self.cols) + 10_000;
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut count = 0usize;
        loop {
            let Some((r, below)) = self.choose_leaving(bland) else {
                return Ok(LpStatus::Optimal);
            };
            let Some((q, flips)) = self.choose_entering(r, below, bland) else {
                return Ok(LpStatus::Infeasible);
            };
            if self.d[q].abs() <= DUAL_TOL {
                degenerate += 1;
                if degenerate >= DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.flip(&flips);
            self.pivot(r, q, below);
            count += 1;
            self.pivots += 1;
            if count > budget {
                return Err(Error::Numerical(format!(
                    "pivot budget of {budget} exhausted (Bland rule {})",
                    if bland { "active" } else { "inactive" }
                )));
            }
        }
    }

    /// Row whose basic variable is out of bounds, and whether it is below.
    fn choose_leaving(&self, bland: bool) -> Option<(usize, bool)> {
        let mut best: Option<(usize, bool)> = None;
        let mut best_key = f64::NEG_INFINITY;
        let mut best_col = usize::MAX;
        for r in 0..self.m {
            let j = self.basis[r];
            let below = self.lb[j] - self.x[j];
            let above = self.x[j] - self.ub[j];
            let (viol, is_below) = if below > above { (below, true) } else { (above, false) };
            if viol <= FEAS_TOL {
                continue;
            }
            if bland {
                if j < best_col {
                    best_col = j;
                    best = Some((r, is_below));
                }
            } else {
                let key = viol * viol / self.weight[r];
                if key > best_key {
                    best_key = key;
                    best = Some((r, is_below));
                }
            }
        }
        best
    }

    /// Entering column for row `r` plus the boxed columns to flip first;
    /// `None` when no column can repair the row.
    fn choose_entering(&self, r: usize, below: bool, bland: bool) -> Option<(usize, Vec<usize>)> {
        let row = &self.tab[r * self.cols..(r + 1) * self.cols];
        // (column, ratio |d_j| / |alpha_j|, |alpha_j|)
        let mut candidates: Vec<(usize, f64, f64)> = row
            .iter()
            .enumerate()
            .filter_map(|(j, &alpha)| {
                if alpha.abs() <= PIVOT_TOL || self.row_of[j] != usize::MAX || self.lb[j] == self.ub[j] {
                    return None;
                }
                let at_upper = self.x[j] == self.ub[j];
                // Moving j off its bound must push the leaving variable
                // toward its violated bound.
                let ok = if below { (alpha < 0.0) != at_upper } else { (alpha > 0.0) != at_upper };
                if !ok {
                    return None;
                }
                let dj = if at_upper { -self.d[j] } else { self.d[j] };
                Some((j, dj.max(0.0) / alpha.abs(), alpha.abs()))
            })
            .collect();
        if bland {
            let mut best: Option<(usize, f64)> = None;
            for &(j, ratio, _) in &candidates {
                if best.is_none_or(|(_, b)| ratio < b - 1e-12) {
                    best = Some((j, ratio));
                }
            }
            return best.map(|b| (b.0, Vec::new()));
        }
        candidates.sort_by(|a, b| a.1.total_cmp(&b.1).then(b.2.total_cmp(&a.2)).then(a.0.cmp(&b.0)));
        let leaving = self.basis[r];
        let mut slope = if below { self.lb[leaving] - self.x[leaving] } else { self.x[leaving] - self.ub[leaving] };
        let mut flips = Vec::new();
        let mut k = 0;
        while k < candidates.len() {
            let (j, _, a) = candidates[k];
            let range = self.ub[j] - self.lb[j];
            if !range.is_finite() || slope - a * range <= FEAS_TOL {
                break;
            }
            slope -= a * range;
            flips.push(j);
            k += 1;
        }
        let rest = &candidates[k..];
        let limit = rest.iter().map(|&(_, t, a)| t + DUAL_TOL / a).fold(f64::INFINITY, f64::min);
        let mut best = None;
        let mut best_alpha = 0.0;
        for &(j, t, a) in rest {
            if t <= limit && a > best_alpha {
                best = Some(j);
                best_alpha = a;
            }
        }
        best.map(|q| (q, flips))
    }

    /// Move each listed nonbasic column to its opposite bound.
    fn flip(&mut self, flips: &[usize]) {
        for &j in flips {
            let to = if self.x[j] == self.ub[j] { self.lb[j] } else { self.ub[j] };
            let delta = to - self.x[j];
            for i in 0..self.m {
                let t = self.tab[i * self.cols + j];
                if t != 0.0 {
                    self.x[self.basis[i]] -= t * delta;
                }
            }
            self.x[j] = to;
        }
    }

    fn pivot(&mut self, r: usize, q: usize, below: bool) {
        let cols = self.cols;
        let leaving = self.basis[r];
        let target = if below { self.lb[leaving] } else { self.ub[leaving] };
        let alpha = self.tab[r * cols + q];
        let delta = (self.x[leaving] - target) / alpha;
        for i in 0..self.m {
            let t = self.tab[i * cols + q];
            if t != 0.0 {
                self.x[self.basis[i]] -= t * delta;
            }
        }
        let entering_value = self.x[q] + delta;

        let dq = self.d[q];
        self.eliminate(r, q);
        if dq != 0.0 {
            let row = &self.tab[r * cols..(r + 1) * cols];
            for (dj, &t) in self.d.iter_mut().zip(row) {
                if t != 0.0 {
                    *dj -= dq * t;
                }
            }
        }
        self.d[q] = 0.0;

        self.row_of[leaving] = usize::MAX;
        self.x[leaving] = target;
        self.basis[r] = q;
        self.row_of[q] = r;
        self.x[q] = entering_value;
    }

    pub fn objective(&self) -> f64 {
        (0..self.n).map(|j| self.cost[j] * self.x[j]).sum()
    }

    pub fn values(&self) -> Vec<f64> {
        self.x[..self.n].to_vec()
    }

    pub fn result(&self, status: LpStatus) -> LpResult {
        match status {
            LpStatus::Optimal => LpResult {
                status,
                objective: self.objective(),
                values: self.values(),
            },
            _ => LpResult {
                status,
                objective: f64::NAN,
                values: Vec::new(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::{LinearModel, VarKind};

    #[test]
    fn single_binary_with_positive_cost() {
        let mut m = LinearModel::new("t");
        let z = m.add_binary("z".into());
        m.add_constraint("r".into(), vec![(z, 1.0)], Sense::Ge, 0.0);
        m.objective = vec![(z, 100.0)];
        let r = solve_lp(&m).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn textbook_lp() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3  ->  min -3x - 2y.
        let mut m = LinearModel::new("t");
        let x = m.add_var("x".into(), 0.0, 3.0, VarKind::Continuous);
        let y = m.add_var("y".into(), 0.0, 10.0, VarKind::Continuous);
        m.add_constraint("a".into(), vec![(x, 1.0), (y, 1.0)], Sense::Le, 4.0);
        m.add_constraint("b".into(), vec![(x, 1.0), (y, 3.0)], Sense::Le, 6.0);
        m.objective = vec![(x, -3.0), (y, -2.0)];
        let r = solve_lp(&m).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective + 11.0).abs() < 1e-9);
        assert!((r.values[0] - 3.0).abs() < 1e-9 && (r.values[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_infeasibility() {
        let mut m = LinearModel::new("t");
        let a = m.add_binary("a".into());
        let b = m.add_binary("b".into());
        m.add_constraint("e".into(), vec![(a, 1.0), (b, 1.0)], Sense::Eq, 1.5);
        m.objective = vec![(a, 2.0), (b, 1.0)];
        let r = solve_lp(&m).unwrap();
        assert!((r.objective - 2.0).abs() < 1e-9);
        m.add_constraint("g".into(), vec![(a, 1.0), (b, 1.0)], Sense::Ge, 2.5);
        assert_eq!(solve_lp(&m).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn empty_violated_row_is_infeasible() {
        let mut m = LinearModel::new("t");
        m.add_binary("a".into());
        m.add_constraint("e".into(), vec![], Sense::Ge, 1.0);
        assert_eq!(solve_lp(&m).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn warm_restart_after_bound_change() {
        let mut m = LinearModel::new("t");
        let a = m.add_binary("a".into());
        let b = m.add_binary("b".into());
        m.add_constraint("c".into(), vec![(a, 1.0), (b, 1.0)], Sense::Ge, 1.0);
        m.objective = vec![(a, 1.0), (b, 3.0)];
        let mut lp = DualSimplex::new(&m).unwrap();
        assert_eq!(lp.solve().unwrap(), LpStatus::Optimal);
        assert!((lp.objective() - 1.0).abs() < 1e-9);
        lp.set_bounds(&[0.0, 0.0], &[0.0, 1.0]);
        assert_eq!(lp.solve().unwrap(), LpStatus::Optimal);
        assert!((lp.objective() - 3.0).abs() < 1e-9);
        lp.set_bounds(&[0.0, 0.0], &[0.0, 0.0]);
        assert_eq!(lp.solve().unwrap(), LpStatus::Infeasible);
        lp.set_bounds(&[0.0, 0.0], &[1.0, 1.0]);
        assert_eq!(lp.solve().unwrap(), LpStatus::Optimal);
        assert!((lp.objective() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn refuses_huge_models() {
        let mut m = LinearModel::new("t");
        for i in 0..6000 {
            m.add_binary(format!("v{i}"));
        }
        for i in 0..6000 {
            m.add_constraint(format!("r{i}"), vec![(i, 1.0)], Sense::Le, 1.0);
        }
        assert!(matches!(DualSimplex::new(&m), Err(Error::ModelTooLarge { .. })));
    }
}
