//! Exact two-phase simplex with Bland's rule.
//!
//! Feasibility answers carry either a witness point or a Farkas certificate
//! `(y ≥ 0, z)` with `yᵀA + zᵀE = 0` and `yᵀb + zᵀf < 0`, both checkable by
//! substitution.

use num_traits::{One, Signed, Zero};

use super::{Constraint, HPolytope};
use crate::rational::{dot, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub inequality_multipliers: Vec<Q>,
    pub equation_multipliers: Vec<Q>,
}

impl FarkasCertificate {
    /// Re-checks the certificate against `system` by one combination of rows.
    pub fn verify(&self, system: &HPolytope) -> bool {
        if self.inequality_multipliers.len() != system.inequalities().len()
            || self.equation_multipliers.len() != system.equations().len()
        {
            return false;
        }
        if self.inequality_multipliers.iter().any(|y| y.is_negative()) {
            return false;
        }
        let mut combo = vec![Q::zero(); system.dim()];
        let mut rhs = Q::zero();
        let rows = system
            .inequalities()
            .iter()
            .zip(&self.inequality_multipliers)
            .chain(system.equations().iter().zip(&self.equation_multipliers));
        for (c, y) in rows {
            if y.is_zero() {
                continue;
            }
            for (acc, a) in combo.iter_mut().zip(&c.coefficients) {
                if !a.is_zero() {
                    *acc += y * a;
                }
            }
            rhs += y * &c.rhs;
        }
        combo.iter().all(Zero::is_zero) && rhs.is_negative()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityCertificate {
    Witness(Vec<Q>),
    Farkas(FarkasCertificate),
}

impl FeasibilityCertificate {
    pub fn verify(&self, system: &HPolytope) -> bool {
        match self {
            Self::Witness(x) => system.contains(x),
            Self::Farkas(f) => f.verify(system),
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Witness(_))
    }

    pub fn witness(&self) -> Option<&[Q]> {
        match self {
            Self::Witness(x) => Some(x),
            Self::Farkas(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { point: Vec<Q>, value: Q },
    /// A feasible point and a recession direction improving the objective.
    Unbounded { point: Vec<Q>, direction: Vec<Q> },
    Infeasible(FarkasCertificate),
}

pub fn lp_feasible(system: &HPolytope) -> FeasibilityCertificate {
    let mut solver = Solver::new(system);
    match solver.phase_one() {
        Ok(()) => {
            let x = solver.primal();
            debug_assert!(system.contains(&x));
            FeasibilityCertificate::Witness(x)
        }
        Err(cert) => FeasibilityCertificate::Farkas(cert),
    }
}

/// Maximizes `objective · x` over `system`.
pub fn lp_maximize(system: &HPolytope, objective: &[Q]) -> LpOutcome {
    assert_eq!(objective.len(), system.dim(), "objective length");
    let mut solver = Solver::new(system);
    if let Err(cert) = solver.phase_one() {
        return LpOutcome::Infeasible(cert);
    }
    solver.phase_two(objective)
}

#[derive(Clone, Copy, Debug)]
enum Column {
    Pos(usize),
    Neg(usize),
    Slack,
}

#[derive(Clone, Copy, Debug)]
enum Origin {
    Inequality(usize),
    Equation(usize),
}

struct Solver<'a> {
    system: &'a HPolytope,
    columns: Vec<Column>,
    origin: Vec<Origin>,
    negated: Vec<bool>,
    // per variable: the sign row `-c·x_v ≤ 0` absorbed as a bound
    sign_row: Vec<Option<usize>>,
    // m rows × (n + 1), last column the right-hand side
    table: Vec<Vec<Q>>,
    // reduced costs, last entry the negated objective value
    costs: Vec<Q>,
    basis: Vec<usize>,
    real_columns: usize,
}

fn single_negative(c: &Constraint) -> Option<usize> {
    if !c.rhs.is_zero() {
        return None;
    }
    let mut found = None;
    for (k, a) in c.coefficients.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        if found.is_some() || a.is_positive() {
            return None;
        }
        found = Some(k);
    }
    found
}

impl<'a> Solver<'a> {
    fn new(system: &'a HPolytope) -> Self {
        let dim = system.dim();
        let mut sign_row = vec![None; dim];
        let mut absorbed = vec![false; system.inequalities().len()];
        for (k, c) in system.inequalities().iter().enumerate() {
            if let Some(v) = single_negative(c) {
                if sign_row[v].is_none() {
                    sign_row[v] = Some(k);
                    absorbed[k] = true;
                }
            }
        }
        let mut columns = Vec::new();
        for (v, s) in sign_row.iter().enumerate() {
            columns.push(Column::Pos(v));
            if s.is_none() {
                columns.push(Column::Neg(v));
            }
        }
        let mut origin = Vec::new();
        let mut rows: Vec<(Vec<Q>, Q)> = Vec::new();
        let kept: Vec<usize> = (0..absorbed.len()).filter(|&k| !absorbed[k]).collect();
        let first_slack = columns.len();
        columns.extend(kept.iter().map(|_| Column::Slack));
        let n = columns.len();
        let expand = |a: &[Q]| -> Vec<Q> {
            let mut row = vec![Q::zero(); n];
            for (j, col) in columns.iter().enumerate() {
                match *col {
                    Column::Pos(v) => row[j] = a[v].clone(),
                    Column::Neg(v) => row[j] = -a[v].clone(),
                    Column::Slack => {}
                }
            }
            row
        };
        for (s, &k) in kept.iter().enumerate() {
            let c = &system.inequalities()[k];
            let mut row = expand(&c.coefficients);
            row[first_slack + s] = Q::one();
            rows.push((row, c.rhs.clone()));
            origin.push(Origin::Inequality(k));
        }
        for (k, c) in system.equations().iter().enumerate() {
            rows.push((expand(&c.coefficients), c.rhs.clone()));
            origin.push(Origin::Equation(k));
        }
        let m = rows.len();
        let width = n + m + 1;
        let mut negated = Vec::with_capacity(m);
        let mut table = Vec::with_capacity(m);
        for (i, (mut row, mut rhs)) in rows.into_iter().enumerate() {
            let flip = rhs.is_negative();
            if flip {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                rhs = -rhs;
            }
            negated.push(flip);
            row.resize(width - 1, Q::zero());
            row[n + i] = Q::one();
            row.push(rhs);
            table.push(row);
        }
        // phase-one costs: 1 on artificials, reduced by the initial basis
        let mut costs = vec![Q::zero(); width];
        for row in &table {
            for j in 0..n {
                if !row[j].is_zero() {
                    costs[j] -= &row[j];
                }
            }
            costs[width - 1] -= &row[width - 1];
        }
        Self {
            system,
            columns,
            origin,
            negated,
            sign_row,
            table,
            costs,
            basis: (n..n + m).collect(),
            real_columns: n,
        }
    }

    fn width(&self) -> usize {
        self.costs.len()
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.width();
        let inv = Q::one() / &self.table[r][s];
        for v in self.table[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.table[r]);
        let nz: Vec<usize> = (0..w).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.table.iter_mut().enumerate() {
            if i == r || row[s].is_zero() {
                continue;
            }
            let factor = row[s].clone();
            for &j in &nz {
                row[j] -= &factor * &pivot_row[j];
            }
        }
        if !self.costs[s].is_zero() {
            let factor = self.costs[s].clone();
            for &j in &nz {
                self.costs[j] -= &factor * &pivot_row[j];
            }
        }
        self.table[r] = pivot_row;
        self.basis[r] = s;
    }

    /// Bland's rule over columns `< limit`; `Err(col)` on an unbounded ray.
    fn iterate(&mut self, limit: usize) -> Result<(), usize> {
        let rhs = self.width() - 1;
        loop {
            let Some(s) = (0..limit).find(|&j| self.costs[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.table.len() {
                let a = &self.table[i][s];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.table[i][rhs] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, s),
                None => return Err(s),
            }
        }
    }

    fn phase_one(&mut self) -> Result<(), FarkasCertificate> {
        let total = self.width() - 1;
        self.iterate(total).expect("phase one is bounded below by zero");
        let value = -self.costs[total].clone();
        if value.is_zero() {
            return Ok(());
        }
        Err(self.farkas())
    }

    fn farkas(&self) -> FarkasCertificate {
        let n = self.real_columns;
        let system = self.system;
        let mut ineq = vec![Q::zero(); system.inequalities().len()];
        let mut eq = vec![Q::zero(); system.equations().len()];
        for (i, origin) in self.origin.iter().enumerate() {
            // dual of the signed row is 1 - reduced cost of its artificial
            let y = Q::one() - &self.costs[n + i];
            let v = if self.negated[i] { y } else { -y };
            match *origin {
                Origin::Inequality(k) => ineq[k] = v,
                Origin::Equation(k) => eq[k] = v,
            }
        }
        for (var, row) in self.sign_row.iter().enumerate() {
            let Some(k) = *row else { continue };
            let mut column_total = Q::zero();
            for (c, y) in system.inequalities().iter().zip(&ineq).chain(system.equations().iter().zip(&eq)) {
                if !y.is_zero() && !c.coefficients[var].is_zero() {
                    column_total += y * &c.coefficients[var];
                }
            }
            let coef = &system.inequalities()[k].coefficients[var];
            ineq[k] = -column_total / coef;
        }
        let cert = FarkasCertificate {
            inequality_multipliers: ineq,
            equation_multipliers: eq,
        };
        debug_assert!(cert.verify(system), "derived Farkas certificate must verify");
        cert
    }

    fn column_values(&self) -> Vec<Q> {
        let rhs = self.width() - 1;
        let mut w = vec![Q::zero(); self.width() - 1];
        for (i, &b) in self.basis.iter().enumerate() {
            w[b] = self.table[i][rhs].clone();
        }
        w
    }

    fn to_point(&self, w: &[Q]) -> Vec<Q> {
        let mut x = vec![Q::zero(); self.system.dim()];
        for (j, col) in self.columns.iter().enumerate() {
            match *col {
                Column::Pos(v) => x[v] += &w[j],
                Column::Neg(v) => x[v] -= &w[j],
                Column::Slack => {}
            }
        }
        x
    }

    fn primal(&self) -> Vec<Q> {
        self.to_point(&self.column_values())
    }

    fn phase_two(&mut self, objective: &[Q]) -> LpOutcome {
        let n = self.real_columns;
        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < self.table.len() {
            if self.basis[i] >= n {
                if let Some(s) = (0..n).find(|&j| !self.table[i][j].is_zero()) {
                    self.pivot(i, s);
                    i += 1;
                } else {
                    self.table.remove(i);
                    self.basis.remove(i);
                    self.origin.remove(i);
                    self.negated.remove(i);
                }
            } else {
                i += 1;
            }
        }
        let rhs_old = self.width() - 1;
        for row in self.table.iter_mut() {
            let rhs = row[rhs_old].clone();
            row.truncate(n);
            row.push(rhs);
        }
        // minimize -objective
        let cost: Vec<Q> = self
            .columns
            .iter()
            .map(|col| match *col {
                Column::Pos(v) => -objective[v].clone(),
                Column::Neg(v) => objective[v].clone(),
                Column::Slack => Q::zero(),
            })
            .collect();
        let mut costs = cost.clone();
        costs.push(Q::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=n {
                if !self.table[i][j].is_zero() {
                    costs[j] -= cb * &self.table[i][j];
                }
            }
        }
        self.costs = costs;
        match self.iterate(n) {
            Ok(()) => {
                let point = self.primal();
                let value = dot(objective, &point);
                LpOutcome::Optimal { point, value }
            }
            Err(s) => {
                let point = self.primal();
                let mut w = vec![Q::zero(); n];
                w[s] = Q::one();
                for (i, &b) in self.basis.iter().enumerate() {
                    w[b] = -self.table[i][s].clone();
                }
                let direction = self.to_point(&w);
                LpOutcome::Unbounded { point, direction }
            }
        }
    }
}
