use num_traits::Zero;

use super::dd::cone_generators;
use super::linalg::solve_affine;
use super::lp::{lp_feasible, FeasibilityCertificate};
use super::{unit, AffineMap, Constraint, HPolytope, PolytopeError, VPolytope};
use crate::rational::{dot, one, zero, Q};

/// Vertices of a bounded H-polytope, sorted; empty input yields no vertices.
pub fn vertex_enumeration(p: &HPolytope) -> Result<VPolytope, PolytopeError> {
    let n = p.dim();
    if !lp_feasible(p).is_feasible() {
        return Ok(VPolytope::from_vertices_unchecked(n, Vec::new()));
    }
    let eqs: Vec<(Vec<Q>, Q)> = p
        .equations()
        .iter()
        .map(|c| (c.coefficients.clone(), c.rhs.clone()))
        .collect();
    let (x0, basis) = solve_affine(&eqs, n).expect("feasible system has consistent equations");
    let k = basis.len();
    // homogenized cone in (t, λ): λ(b − a·x0) − (a·N) t ≥ 0, λ ≥ 0
    let mut rows = Vec::with_capacity(p.inequalities().len() + 1);
    for c in p.inequalities() {
        let mut row: Vec<Q> = basis.iter().map(|v| -dot(&c.coefficients, v)).collect();
        row.push(c.slack(&x0));
        rows.push(row);
    }
    rows.push(unit(k + 1, k, 1));
    let gens = cone_generators(k + 1, &rows, &[]);
    if !gens.lineality.is_empty() {
        return Err(PolytopeError::UnboundedInput);
    }
    let mut vertices = Vec::with_capacity(gens.rays.len());
    for ray in gens.rays {
        let lambda = &ray[k];
        if lambda.is_zero() {
            return Err(PolytopeError::UnboundedInput);
        }
        let mut x = x0.clone();
        for (t, v) in ray[..k].iter().zip(&basis) {
            if t.is_zero() {
                continue;
            }
            let t = t / lambda;
            for (xi, vi) in x.iter_mut().zip(v) {
                if !vi.is_zero() {
                    *xi += &t * vi;
                }
            }
        }
        vertices.push(x);
    }
    Ok(VPolytope::from_vertices_unchecked(n, vertices))
}

/// Facets (inequalities tight at some vertex) and affine-hull equations of a
/// V-polytope.
pub fn hull(v: &VPolytope) -> HPolytope {
    let d = v.dim();
    if v.is_empty() {
        return HPolytope::empty(d);
    }
    // cone of valid (a, β): β − a·v ≥ 0
    let rows: Vec<Vec<Q>> = v
        .vertices()
        .iter()
        .map(|p| {
            let mut r: Vec<Q> = p.iter().map(|x| -x).collect();
            r.push(one());
            r
        })
        .collect();
    let gens = cone_generators(d + 1, &rows, &[]);
    let split = |g: &Vec<Q>| Constraint::new(g[..d].to_vec(), g[d].clone());
    let equations: Vec<Constraint> = gens.lineality.iter().map(split).collect();
    let mut inequalities: Vec<Constraint> = gens
        .rays
        .iter()
        .map(split)
        .filter(|c| v.vertices().iter().any(|p| c.slack(p).is_zero()))
        .collect();
    inequalities.sort_by(|a, b| a.coefficients.cmp(&b.coefficients).then(a.rhs.cmp(&b.rhs)));
    HPolytope::with_rows(d, inequalities, equations).expect("rows have the hull dimension")
}

/// Convex weights expressing `x` over `points`, if any.
pub(crate) fn in_hull(points: &[Vec<Q>], x: &[Q]) -> Option<Vec<Q>> {
    if points.is_empty() {
        return None;
    }
    let m = points.len();
    let mut sys = HPolytope::new(m);
    for k in 0..m {
        sys.add_inequality(unit(m, k, -1), zero()).expect("shape");
    }
    sys.add_equation(vec![one(); m], one()).expect("shape");
    for (c, target) in x.iter().enumerate() {
        let row: Vec<Q> = points.iter().map(|p| p[c].clone()).collect();
        sys.add_equation(row, target.clone()).expect("shape");
    }
    match lp_feasible(&sys) {
        FeasibilityCertificate::Witness(w) => Some(w),
        FeasibilityCertificate::Farkas(_) => None,
    }
}

/// Deduplicates and drops points lying in the hull of the others.
pub(crate) fn extreme_points(mut points: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    points.sort();
    points.dedup();
    let mut keep: Vec<Vec<Q>> = points.clone();
    let mut k = 0;
    while k < keep.len() {
        let mut others = keep.clone();
        let candidate = others.remove(k);
        if in_hull(&others, &candidate).is_some() {
            keep.remove(k);
        } else {
            k += 1;
        }
    }
    keep
}

/// Irredundant image of a V-polytope under an affine map.
pub fn image_polytope(f: &AffineMap, p: &VPolytope) -> Result<VPolytope, PolytopeError> {
    if f.source_dim() != p.dim() {
        return Err(PolytopeError::DimensionMismatch {
            expected: f.source_dim(),
            found: p.dim(),
        });
    }
    let images = p.vertices().iter().map(|v| f.apply(v)).collect();
    VPolytope::from_points(f.target_dim(), images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn pt(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| qi(x)).collect()
    }

    #[test]
    fn simplex_vertices() {
        let v = vertex_enumeration(&HPolytope::simplex(3)).unwrap();
        assert_eq!(v.vertices(), &[pt(&[0, 0, 1]), pt(&[0, 1, 0]), pt(&[1, 0, 0])]);
    }

    #[test]
    fn square_vertices() {
        let v = vertex_enumeration(&HPolytope::cube(2, qi(0), qi(1))).unwrap();
        assert_eq!(v.vertices().len(), 4);
    }

    #[test]
    fn unbounded_rejected() {
        let mut p = HPolytope::new(2);
        p.add_inequality(unit(2, 0, -1), zero()).unwrap();
        p.add_inequality(unit(2, 1, -1), zero()).unwrap();
        assert_eq!(vertex_enumeration(&p), Err(PolytopeError::UnboundedInput));
    }

    #[test]
    fn empty_has_no_vertices() {
        let v = vertex_enumeration(&HPolytope::empty(2)).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn hull_round_trip() {
        let tri = VPolytope::from_points(2, vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), vec![q(1, 4), q(1, 4)]]).unwrap();
        assert_eq!(tri.vertices().len(), 3);
        let h = hull(&tri);
        assert_eq!(h.inequalities().len(), 3);
        assert!(h.equations().is_empty());
        let back = vertex_enumeration(&h).unwrap();
        assert_eq!(back.vertices(), tri.vertices());
    }

    #[test]
    fn hull_of_lower_dimensional_set() {
        let seg = VPolytope::from_points(3, vec![pt(&[1, 0, 0]), pt(&[0, 1, 0])]).unwrap();
        let h = hull(&seg);
        assert_eq!(h.equations().len(), 2);
        assert_eq!(h.inequalities().len(), 2);
        assert_eq!(vertex_enumeration(&h).unwrap().vertices(), seg.vertices());
        let point = VPolytope::from_points(2, vec![pt(&[3, 4])]).unwrap();
        let h = hull(&point);
        assert!(h.inequalities().is_empty());
        assert_eq!(h.equations().len(), 2);
    }

    #[test]
    fn image_under_projection() {
        let sq = vertex_enumeration(&HPolytope::cube(2, qi(0), qi(1))).unwrap();
        let proj = AffineMap::linear(vec![pt(&[1, 0])], 2).unwrap();
        let img = image_polytope(&proj, &sq).unwrap();
        assert_eq!(img.vertices(), &[pt(&[0]), pt(&[1])]);
        let same = image_polytope(&AffineMap::identity(2), &sq).unwrap();
        assert_eq!(same, sq);
    }
}
