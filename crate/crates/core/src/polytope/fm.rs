use num_traits::{Signed, Zero};

use super::lp::{lp_maximize, LpOutcome};
use super::{Constraint, HPolytope};
use crate::rational::Q;

fn scale_row(c: &Constraint, s: &Q) -> Constraint {
    Constraint::new(c.coefficients.iter().map(|a| a * s).collect(), &c.rhs * s)
}

fn add_rows(a: &Constraint, b: &Constraint) -> Constraint {
    Constraint::new(
        a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| x + y).collect(),
        &a.rhs + &b.rhs,
    )
}

/// Scales so the first nonzero coefficient has absolute value one.
fn canonical(mut c: Constraint, keep_sign: bool) -> Constraint {
    if let Some(lead) = c.coefficients.iter().find(|a| !a.is_zero()).cloned() {
        let s = if keep_sign { lead.abs() } else { lead };
        c = scale_row(&c, &(Q::from_integer(1.into()) / s));
    }
    c
}

/// Removes inequalities implied by the rest, one LP per row.
fn prune(dim: usize, inequalities: Vec<Constraint>, equations: &[Constraint]) -> Option<Vec<Constraint>> {
    let mut rows = inequalities;
    let mut k = 0;
    while k < rows.len() {
        let mut rest = rows.clone();
        let row = rest.remove(k);
        let sys = HPolytope::with_rows(dim, rest, equations.to_vec()).expect("consistent shapes");
        match lp_maximize(&sys, &row.coefficients) {
            LpOutcome::Optimal { value, .. } if value <= row.rhs => {
                rows.remove(k);
            }
            LpOutcome::Infeasible(_) => return None,
            _ => k += 1,
        }
    }
    Some(rows)
}

/// Projection of `p` onto the coordinates `keep` (in that order) by
/// Fourier–Motzkin elimination of the others.
pub fn fm_project(p: &HPolytope, keep: &[usize]) -> HPolytope {
    let n = p.dim();
    let out_dim = keep.len();
    let mut ineqs: Vec<Constraint> = p.inequalities().to_vec();
    let mut eqs: Vec<Constraint> = p.equations().to_vec();
    let eliminate: Vec<usize> = (0..n).filter(|v| !keep.contains(v)).collect();

    for &v in &eliminate {
        if let Some(pos) = eqs.iter().position(|e| !e.coefficients[v].is_zero()) {
            let pivot = eqs.remove(pos);
            let substitute = |c: &Constraint| {
                if c.coefficients[v].is_zero() {
                    return c.clone();
                }
                let s = -(&c.coefficients[v] / &pivot.coefficients[v]);
                add_rows(c, &scale_row(&pivot, &s))
            };
            ineqs = ineqs.iter().map(substitute).collect();
            eqs = eqs.iter().map(substitute).collect();
        } else {
            let mut next = Vec::new();
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for c in ineqs {
                let a = &c.coefficients[v];
                if a.is_positive() {
                    pos.push(c);
                } else if a.is_negative() {
                    neg.push(c);
                } else {
                    next.push(c);
                }
            }
            for up in &pos {
                for down in &neg {
                    let combined = add_rows(
                        &scale_row(up, &-down.coefficients[v].clone()),
                        &scale_row(down, &up.coefficients[v]),
                    );
                    next.push(combined);
                }
            }
            ineqs = next;
        }
        // trivial rows: drop `0 ≤ b` for b ≥ 0, detect `0 ≤ b` for b < 0
        let mut empty = false;
        ineqs.retain(|c| {
            if c.coefficients.iter().all(Zero::is_zero) {
                empty |= c.rhs.is_negative();
                false
            } else {
                true
            }
        });
        eqs.retain(|c| {
            if c.coefficients.iter().all(Zero::is_zero) {
                empty |= !c.rhs.is_zero();
                false
            } else {
                true
            }
        });
        if empty {
            return HPolytope::empty(out_dim);
        }
        ineqs = ineqs.into_iter().map(|c| canonical(c, true)).collect();
        ineqs.sort_by(|a, b| a.coefficients.cmp(&b.coefficients).then(a.rhs.cmp(&b.rhs)));
        ineqs.dedup_by(|later, earlier| later.coefficients == earlier.coefficients);
        eqs = eqs.into_iter().map(|c| canonical(c, false)).collect();
        eqs.dedup();
        match prune(n, ineqs, &eqs) {
            Some(rows) => ineqs = rows,
            None => return HPolytope::empty(out_dim),
        }
    }
    if eliminate.is_empty() {
        match prune(n, ineqs, &eqs) {
            Some(rows) => ineqs = rows,
            None => return HPolytope::empty(out_dim),
        }
    }
    let restrict = |c: &Constraint| Constraint::new(keep.iter().map(|&k| c.coefficients[k].clone()).collect(), c.rhs.clone());
    HPolytope::with_rows(
        out_dim,
        ineqs.iter().map(restrict).collect(),
        eqs.iter().map(restrict).collect(),
    )
    .expect("projected rows have the kept dimension")
}
