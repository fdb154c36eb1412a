//! Exact linear programming: dense two-phase simplex over the rationals with
//! Bland's anti-cycling rule. Deterministic given the input order; optima are
//! attained exactly, which is what lets curvature signs be certified.

use num_traits::Zero;

use crate::rational::{rat_int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<(Vec<Rational>, Relation, Rational)>,
    pub bounds: Vec<VarBound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Rational,
    pub point: Vec<Rational>,
}

impl LpProblem {
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![VarBound::NonNegative; n],
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<Rational>, rel: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.objective.len(), "dimension mismatch");
        self.constraints.push((coeffs, rel, rhs));
    }

    pub fn free_var(&mut self, j: usize) {
        self.bounds[j] = VarBound::Free;
    }
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
    artificial_from: usize,
}

impl Tableau {
    fn pivot(
        &mut self,
        r: usize,
        col: usize,
        obj_rows: &mut [(&mut Vec<Rational>, &mut Rational)],
    ) {
        let piv = self.a[r][col].clone();
        debug_assert!(!piv.is_zero());
        for x in self.a[r].iter_mut() {
            *x /= &piv;
        }
        self.b[r] /= &piv;
        for i in 0..self.a.len() {
            if i == r || self.a[i][col].is_zero() {
                continue;
            }
            let f = self.a[i][col].clone();
            for j in 0..self.ncols {
                if !self.a[r][j].is_zero() {
                    let sub = &f * &self.a[r][j];
                    self.a[i][j] -= sub;
                }
            }
            let sub = &f * &self.b[r];
            self.b[i] -= sub;
        }
        for (row, val) in obj_rows.iter_mut() {
            let f = row[col].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                if !self.a[r][j].is_zero() {
                    let sub = &f * &self.a[r][j];
                    row[j] -= sub;
                }
            }
            **val += &f * &self.b[r];
        }
        self.basis[r] = col;
    }

    /// One simplex phase under Bland's rule: entering variable is the
    /// lowest-index column with positive reduced cost, leaving row breaks
    /// ratio ties by lowest basic-variable index. Returns false on
    /// unboundedness.
    fn maximize(
        &mut self,
        obj: &mut Vec<Rational>,
        obj_val: &mut Rational,
        other: Option<(&mut Vec<Rational>, &mut Rational)>,
        allow_artificial: bool,
    ) -> bool {
        let mut other = other;
        loop {
            let limit = if allow_artificial {
                self.ncols
            } else {
                self.artificial_from
            };
            let Some(col) = (0..limit).find(|&j| obj[j] > Rational::zero()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                if self.a[i][col] <= Rational::zero() {
                    continue;
                }
                let ratio = &self.b[i] / &self.a[i][col];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            match other.as_mut() {
                Some((row, val)) => {
                    self.pivot(r, col, &mut [(obj, obj_val), (row, val)]);
                }
                None => self.pivot(r, col, &mut [(obj, obj_val)]),
            }
        }
    }
}

/// Solves the problem exactly. Infeasible and unbounded outcomes are
/// reported as statuses, not errors.
pub fn solve_lp(prob: &LpProblem) -> LpSolution {
    let nvars = prob.objective.len();
    assert_eq!(prob.bounds.len(), nvars);

    // Column layout: structural columns first (free variables split into a
    // positive and a negative part), then slack/surplus, then artificials.
    let mut col_of_var = Vec::with_capacity(nvars);
    let mut neg_col_of_var = vec![None; nvars];
    let mut ncols = 0;
    for j in 0..nvars {
        col_of_var.push(ncols);
        ncols += 1;
        if prob.bounds[j] == VarBound::Free {
            neg_col_of_var[j] = Some(ncols);
            ncols += 1;
        }
    }
    let structural = ncols;

    let m = prob.constraints.len();
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    let mut rels: Vec<Relation> = Vec::with_capacity(m);
    for (coeffs, rel, r) in &prob.constraints {
        let mut row = vec![Rational::zero(); structural];
        let mut flip = false;
        let mut rhs_val = r.clone();
        if rhs_val < Rational::zero() {
            flip = true;
            rhs_val = -rhs_val;
        }
        for j in 0..nvars {
            let mut c = coeffs[j].clone();
            if flip {
                c = -c;
            }
            if !c.is_zero() {
                row[col_of_var[j]] = c.clone();
                if let Some(nc) = neg_col_of_var[j] {
                    row[nc] = -c;
                }
            }
        }
        let rel = match (rel, flip) {
            (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
            (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
            (Relation::Eq, _) => Relation::Eq,
        };
        rows.push(row);
        rhs.push(rhs_val);
        rels.push(rel);
    }

    // slack / surplus columns
    let slack_from = structural;
    let n_slack = rels.iter().filter(|r| **r != Relation::Eq).count();
    let artificial_from = slack_from + n_slack;
    let n_art = rels.iter().filter(|r| **r != Relation::Le).count();
    let total = artificial_from + n_art;

    let mut a: Vec<Vec<Rational>> = rows
        .into_iter()
        .map(|mut row| {
            row.resize(total, Rational::zero());
            row
        })
        .collect();
    let mut basis = vec![0usize; m];
    let mut next_slack = slack_from;
    let mut next_art = artificial_from;
    for i in 0..m {
        match rels[i] {
            Relation::Le => {
                a[i][next_slack] = rat_int(1);
                basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                a[i][next_slack] = rat_int(-1);
                next_slack += 1;
                a[i][next_art] = rat_int(1);
                basis[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                a[i][next_art] = rat_int(1);
                basis[i] = next_art;
                next_art += 1;
            }
        }
    }

    let mut tab = Tableau {
        a,
        b: rhs,
        basis,
        ncols: total,
        artificial_from,
    };

    // phase-2 objective in maximization form, kept in reduced form through
    // every pivot of both phases
    let negate = prob.sense == Sense::Min;
    let mut obj = vec![Rational::zero(); total];
    for j in 0..nvars {
        let c = if negate {
            -prob.objective[j].clone()
        } else {
            prob.objective[j].clone()
        };
        if !c.is_zero() {
            obj[col_of_var[j]] = c.clone();
            if let Some(nc) = neg_col_of_var[j] {
                obj[nc] = -c;
            }
        }
    }
    let mut obj_val = Rational::zero();

    if n_art > 0 {
        // phase 1: maximize minus the sum of artificials, starting value
        // -sum b over artificial rows
        let mut art = vec![Rational::zero(); total];
        let mut art_val = Rational::zero();
        for i in 0..m {
            if tab.basis[i] >= artificial_from {
                for j in 0..total {
                    if j < artificial_from || j == tab.basis[i] {
                        let add = tab.a[i][j].clone();
                        art[j] += add;
                    }
                }
                art_val -= &tab.b[i];
            }
        }
        for j in artificial_from..total {
            art[j] = Rational::zero();
        }
        let ok = tab.maximize(&mut art, &mut art_val, Some((&mut obj, &mut obj_val)), true);
        debug_assert!(ok, "phase 1 is always bounded");
        if art_val < Rational::zero() {
            return LpSolution {
                status: LpStatus::Infeasible,
                value: Rational::zero(),
                point: Vec::new(),
            };
        }
        // drive leftover degenerate artificials out of the basis
        let mut r = 0;
        while r < tab.a.len() {
            if tab.basis[r] >= artificial_from {
                debug_assert!(tab.b[r].is_zero());
                match (0..artificial_from).find(|&j| !tab.a[r][j].is_zero()) {
                    Some(col) => tab.pivot(r, col, &mut [(&mut obj, &mut obj_val)]),
                    None => {
                        // redundant constraint
                        tab.a.remove(r);
                        tab.b.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    if !tab.maximize(&mut obj, &mut obj_val, None, false) {
        return LpSolution {
            status: LpStatus::Unbounded,
            value: Rational::zero(),
            point: Vec::new(),
        };
    }

    let mut col_values = vec![Rational::zero(); total];
    for (i, &bv) in tab.basis.iter().enumerate() {
        col_values[bv] = tab.b[i].clone();
    }
    let mut point = Vec::with_capacity(nvars);
    for j in 0..nvars {
        let mut v = col_values[col_of_var[j]].clone();
        if let Some(nc) = neg_col_of_var[j] {
            v -= &col_values[nc];
        }
        point.push(v);
    }
    let value = if negate { -obj_val } else { obj_val };

    let sol = LpSolution {
        status: LpStatus::Optimal,
        value,
        point,
    };
    verify(prob, &sol);
    sol
}

/// The optimal point must satisfy every constraint exactly and attain the
/// reported value exactly; anything else is a solver bug.
fn verify(prob: &LpProblem, sol: &LpSolution) {
    let attained: Rational = prob
        .objective
        .iter()
        .zip(&sol.point)
        .map(|(c, x)| c * x)
        .sum();
    assert_eq!(attained, sol.value, "objective value mismatch");
    for (k, (coeffs, rel, rhs)) in prob.constraints.iter().enumerate() {
        let lhs: Rational = coeffs.iter().zip(&sol.point).map(|(c, x)| c * x).sum();
        let ok = match rel {
            Relation::Le => lhs <= *rhs,
            Relation::Eq => lhs == *rhs,
            Relation::Ge => lhs >= *rhs,
        };
        assert!(ok, "constraint {k} violated by optimal point");
    }
    for (j, bound) in prob.bounds.iter().enumerate() {
        if *bound == VarBound::NonNegative {
            assert!(sol.point[j] >= Rational::zero(), "bound {j} violated");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn bounded_single_variable() {
        let mut p = LpProblem::new(Sense::Max, vec![rat(1, 1)]);
        p.constrain(vec![rat(1, 1)], Relation::Le, rat(1, 1));
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, rat(1, 1));
        assert_eq!(s.point, vec![rat(1, 1)]);
    }

    #[test]
    fn infeasible_bounds() {
        let mut p = LpProblem::new(Sense::Max, vec![rat(1, 1)]);
        p.constrain(vec![rat(1, 1)], Relation::Ge, rat(2, 1));
        p.constrain(vec![rat(1, 1)], Relation::Le, rat(1, 1));
        assert_eq!(solve_lp(&p).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let p = LpProblem::new(Sense::Max, vec![rat(1, 1), rat(1, 1)]);
        assert_eq!(solve_lp(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_optimum_is_exact() {
        // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut p = LpProblem::new(Sense::Max, vec![rat(3, 1), rat(5, 1)]);
        p.constrain(vec![rat(1, 1), rat(0, 1)], Relation::Le, rat(4, 1));
        p.constrain(vec![rat(0, 1), rat(2, 1)], Relation::Le, rat(12, 1));
        p.constrain(vec![rat(3, 1), rat(2, 1)], Relation::Le, rat(18, 1));
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, rat(36, 1));
        assert_eq!(s.point, vec![rat(2, 1), rat(6, 1)]);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + y st x - y = 3, x free, y >= 0: optimum at y = 0, x = 3
        let mut p = LpProblem::new(Sense::Min, vec![rat(1, 1), rat(1, 1)]);
        p.free_var(0);
        p.constrain(vec![rat(1, 1), rat(-1, 1)], Relation::Eq, rat(3, 1));
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, rat(3, 1));
        // min x st x >= -5, x free: negative optimum reachable
        let mut p = LpProblem::new(Sense::Min, vec![rat(1, 1)]);
        p.free_var(0);
        p.constrain(vec![rat(1, 1)], Relation::Ge, rat(-5, 1));
        let s = solve_lp(&p);
        assert_eq!(s.value, rat(-5, 1));
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // classic degenerate instance that cycles without an anti-cycling rule
        let mut p = LpProblem::new(
            Sense::Max,
            vec![rat(3, 4), rat(-150, 1), rat(1, 50), rat(-6, 1)],
        );
        p.constrain(
            vec![rat(1, 4), rat(-60, 1), rat(-1, 25), rat(9, 1)],
            Relation::Le,
            rat(0, 1),
        );
        p.constrain(
            vec![rat(1, 2), rat(-90, 1), rat(-1, 50), rat(3, 1)],
            Relation::Le,
            rat(0, 1),
        );
        p.constrain(
            vec![rat(0, 1), rat(0, 1), rat(1, 1), rat(0, 1)],
            Relation::Le,
            rat(1, 1),
        );
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, rat(1, 20));
    }

    #[test]
    fn fractional_data_stays_exact() {
        // max x/3 + y/7 st x/2 + y/5 <= 1/11, x,y >= 0
        let mut p = LpProblem::new(Sense::Max, vec![rat(1, 3), rat(1, 7)]);
        p.constrain(vec![rat(1, 2), rat(1, 5)], Relation::Le, rat(1, 11));
        let s = solve_lp(&p);
        // best single-variable ratio: x = 2/11 gives 2/33; y = 5/11 gives 5/77
        assert_eq!(s.value, rat(5, 77).max(rat(2, 33)));
    }
}
