//! Sampled estimate of the openness modulus of an affine surjection.
//!
//! Balls are ∞-norm boxes. For a sample `x ∈ P` and a unit direction `e` in
//! the affine hull of `Q`, the image of the `r`-box around `x` reaches
//! `f(x) + g e` where `g` solves an exact LP; the `Q`-ball of radius `c r`
//! along `e` is covered iff `g ≥ min(c r, t)` with `t` the exit distance from
//! `Q`. The modulus is the smallest `g / r` over directions that stay inside
//! `Q` beyond the reached point.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::convert::vertex_enumeration;
use super::linalg::null_space;
use super::lp::{lp_maximize, LpOutcome};
use super::{AffineMap, Constraint, HPolytope, PolytopeError};
use crate::rational::{dot, to_f64, zero, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct SampledOpenness {
    /// Minimum over samples; infinite when no sampled direction constrains it.
    pub modulus: f64,
    pub samples: usize,
    pub directions: usize,
    pub worst_point: Option<Vec<Q>>,
    pub worst_direction: Option<Vec<Q>>,
}

fn normalized(v: Vec<Q>) -> Option<Vec<Q>> {
    let m = v.iter().map(|x| x.abs()).max()?;
    if m.is_zero() {
        return None;
    }
    Some(v.into_iter().map(|x| x / &m).collect())
}

fn directions(q: &HPolytope, rng: &mut ChaCha8Rng) -> Vec<Vec<Q>> {
    let rows: Vec<Vec<Q>> = q.equations().iter().map(|c| c.coefficients.clone()).collect();
    let basis = null_space(&rows, q.dim());
    let mut out = Vec::new();
    for b in &basis {
        out.extend(normalized(b.clone()));
        out.extend(normalized(b.iter().map(|x| -x).collect()));
    }
    for _ in 0..2 * basis.len() {
        let mut v = vec![zero(); q.dim()];
        for b in &basis {
            let t = Q::from_integer(rng.gen_range(-3i64..=3).into());
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += &t * bi;
            }
        }
        out.extend(normalized(v));
    }
    out
}

fn sample_points(vertices: &[Vec<Q>], count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = vertices.iter().take(count).cloned().collect();
    while out.len() < count {
        let mut weights: Vec<i64> = vertices
            .iter()
            .map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..=8) } else { 0 })
            .collect();
        if weights.iter().all(|&w| w == 0) {
            weights[rng.gen_range(0..vertices.len())] = 1;
        }
        let total = Q::from_integer(weights.iter().sum::<i64>().into());
        let mut x = vec![zero(); vertices[0].len()];
        for (w, v) in weights.iter().zip(vertices) {
            if *w == 0 {
                continue;
            }
            let w = Q::from_integer((*w).into()) / &total;
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += &w * vi;
            }
        }
        out.push(x);
    }
    out
}

/// Exit distance from `q` starting at `y` along `e`; `None` if unbounded.
fn exit_distance(q: &HPolytope, y: &[Q], e: &[Q]) -> Option<Q> {
    q.inequalities()
        .iter()
        .filter_map(|c| {
            let rate = dot(&c.coefficients, e);
            rate.is_positive().then(|| c.slack(y) / rate)
        })
        .min()
}

/// Farthest `s` with `f(x + d) = f(x) + s e`, `x + d ∈ P`, `|d|∞ ≤ r`.
fn reach(f: &AffineMap, p: &HPolytope, x: &[Q], e: &[Q], r: &Q) -> Q {
    let n = p.dim();
    let mut sys = HPolytope::new(n + 1);
    for k in 0..n {
        let mut up = vec![zero(); n + 1];
        up[k] = Q::from_integer(1.into());
        let down: Vec<Q> = up.iter().map(|v| -v).collect();
        sys.add_inequality(up, r.clone()).expect("shape");
        sys.add_inequality(down, r.clone()).expect("shape");
    }
    let extend = |c: &Constraint| {
        let mut a = c.coefficients.clone();
        a.push(zero());
        a
    };
    for c in p.inequalities() {
        sys.add_inequality(extend(c), c.slack(x)).expect("shape");
    }
    for c in p.equations() {
        sys.add_equation(extend(c), zero()).expect("shape");
    }
    for (row, ei) in f.matrix().iter().zip(e) {
        let mut a = row.clone();
        a.push(-ei.clone());
        sys.add_equation(a, zero()).expect("shape");
    }
    let mut objective = vec![zero(); n + 1];
    objective[n] = Q::from_integer(1.into());
    match lp_maximize(&sys, &objective) {
        LpOutcome::Optimal { value, .. } => value,
        _ => zero(),
    }
}

/// Estimates the openness modulus of `f: P → Q` at radius `radius`.
pub fn sampled_metric_openness(
    f: &AffineMap,
    p: &HPolytope,
    q: &HPolytope,
    samples: usize,
    radius: &Q,
    seed: u64,
) -> Result<SampledOpenness, PolytopeError> {
    if f.source_dim() != p.dim() || f.target_dim() != q.dim() {
        return Err(PolytopeError::DimensionMismatch {
            expected: f.source_dim(),
            found: p.dim(),
        });
    }
    let vertices = vertex_enumeration(p)?;
    if vertices.is_empty() {
        return Err(PolytopeError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs = directions(q, &mut rng);
    let points = sample_points(vertices.vertices(), samples, &mut rng);
    let mut best: Option<(Q, Vec<Q>, Vec<Q>)> = None;
    for x in &points {
        let y = f.apply(x);
        for e in &dirs {
            let g = reach(f, p, x, e, radius);
            let bounded = match exit_distance(q, &y, e) {
                Some(t) => g < t,
                None => true,
            };
            if !bounded {
                continue;
            }
            let c = &g / radius;
            if best.as_ref().is_none_or(|(b, _, _)| &c < b) {
                best = Some((c, x.clone(), e.clone()));
            }
        }
    }
    Ok(match best {
        Some((c, x, e)) => SampledOpenness {
            modulus: to_f64(&c),
            samples: points.len(),
            directions: dirs.len(),
            worst_point: Some(x),
            worst_direction: Some(e),
        },
        None => SampledOpenness {
            modulus: f64::INFINITY,
            samples: points.len(),
            directions: dirs.len(),
            worst_point: None,
            worst_direction: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::unit;
    use crate::rational::{q, qi};

    #[test]
    fn identity_has_unit_modulus() {
        let p = HPolytope::simplex(3);
        let s = sampled_metric_openness(&AffineMap::identity(3), &p, &p, 30, &q(1, 1000), 7).unwrap();
        assert!((s.modulus - 1.0).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn square_projection_has_unit_modulus() {
        let sq = HPolytope::cube(2, qi(0), qi(1));
        let f = AffineMap::linear(vec![unit(2, 0, 1)], 2).unwrap();
        let seg = HPolytope::cube(1, qi(0), qi(1));
        let s = sampled_metric_openness(&f, &sq, &seg, 30, &q(1, 1000), 1).unwrap();
        assert!((s.modulus - 1.0).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn deterministic_for_a_seed() {
        let sq = HPolytope::cube(2, qi(0), qi(1));
        let f = AffineMap::linear(vec![vec![qi(1), qi(1)]], 2).unwrap();
        let seg = HPolytope::cube(1, qi(0), qi(2));
        let a = sampled_metric_openness(&f, &sq, &seg, 20, &q(1, 100), 3).unwrap();
        let b = sampled_metric_openness(&f, &sq, &seg, 20, &q(1, 100), 3).unwrap();
        assert_eq!(a, b);
        assert!(a.modulus >= 1.0);
    }
}
