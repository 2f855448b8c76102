//! Open-map certification for affine surjections between polytopes.
//!
//! At a relative-interior point `x` of each face of `P`, every generator of
//! the tangent cone of `Q` at `f(x)` must be the image of a direction in the
//! tangent cone of `P` at `x`. Each lift is an exact LP witness; a failed
//! lift comes with a Farkas certificate.

use std::collections::BTreeMap;

use super::convert::{image_polytope, in_hull, vertex_enumeration};
use super::faces::{enumerate_faces, Face};
use super::lp::{lp_feasible, FarkasCertificate, FeasibilityCertificate};
use super::{AffineMap, ConeGenerators, Constraint, HPolytope, PolyhedralCone, PolytopeError};
use crate::rational::{zero, Q};

pub const DEFAULT_FACE_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpennessOptions {
    pub face_budget: usize,
}

impl Default for OpennessOptions {
    fn default() -> Self {
        Self {
            face_budget: DEFAULT_FACE_BUDGET,
        }
    }
}

/// `f(lift) = target` with `lift` in the domain tangent cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionLift {
    pub target: Vec<Q>,
    pub lift: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceCertificate {
    pub face: Face,
    pub point: Vec<Q>,
    pub image: Vec<Q>,
    pub lifts: Vec<DirectionLift>,
}

impl FaceCertificate {
    /// Re-checks every lift: inside the tangent cone at `point`, mapped onto its target.
    pub fn verify(&self, f: &AffineMap, p: &HPolytope) -> bool {
        let Ok(cone) = tangent_cone(p, &self.point) else {
            return false;
        };
        f.apply(&self.point) == self.image
            && self
                .lifts
                .iter()
                .all(|l| cone.contains(&l.lift) && f.apply_linear(&l.lift) == l.target)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpennessVerdict {
    Open {
        faces: Vec<FaceCertificate>,
    },
    NotOpen {
        face: Face,
        point: Vec<Q>,
        direction: Vec<Q>,
        certificate: FarkasCertificate,
    },
}

impl OpennessVerdict {
    pub fn is_open(&self) -> bool {
        matches!(self, Self::Open { .. })
    }
}

pub fn tangent_cone(p: &HPolytope, x: &[Q]) -> Result<PolyhedralCone, PolytopeError> {
    if x.len() != p.dim() {
        return Err(PolytopeError::DimensionMismatch {
            expected: p.dim(),
            found: x.len(),
        });
    }
    if !p.contains(x) {
        return Err(PolytopeError::PointOutside);
    }
    Ok(PolyhedralCone {
        dim: p.dim(),
        inequalities: p
            .tight_inequalities(x)
            .into_iter()
            .map(|k| p.inequalities()[k].coefficients.clone())
            .collect(),
        equations: p.equations().iter().map(|c| c.coefficients.clone()).collect(),
    })
}

/// Directions `d` in the tangent cone of `p` at `x` with `M d = g`.
pub fn lift_system(f: &AffineMap, p: &HPolytope, x: &[Q], g: &[Q]) -> Result<HPolytope, PolytopeError> {
    let cone = tangent_cone(p, x)?;
    if g.len() != f.target_dim() {
        return Err(PolytopeError::DimensionMismatch {
            expected: f.target_dim(),
            found: g.len(),
        });
    }
    let n = p.dim();
    let inequalities = cone.inequalities.into_iter().map(|a| Constraint::new(a, zero())).collect();
    let mut equations: Vec<Constraint> = cone.equations.into_iter().map(|a| Constraint::new(a, zero())).collect();
    equations.extend(f.matrix().iter().zip(g).map(|(row, gi)| Constraint::new(row.clone(), gi.clone())));
    HPolytope::with_rows(n, inequalities, equations)
}

/// `Ok(())` iff `f(P) = Q` as point sets.
pub fn check_image_equals(f: &AffineMap, p: &HPolytope, q: &HPolytope) -> Result<(), PolytopeError> {
    if f.source_dim() != p.dim() || f.target_dim() != q.dim() {
        return Err(PolytopeError::DimensionMismatch {
            expected: f.source_dim(),
            found: p.dim(),
        });
    }
    let image = image_polytope(f, &vertex_enumeration(p)?)?;
    if let Some(v) = image.vertices().iter().find(|v| !q.contains(v)) {
        return Err(PolytopeError::NotSurjectiveOntoQ { witness: v.clone() });
    }
    let q_vertices = vertex_enumeration(q)?;
    if let Some(v) = q_vertices.vertices().iter().find(|v| in_hull(image.vertices(), v).is_none()) {
        return Err(PolytopeError::NotSurjectiveOntoQ { witness: v.clone() });
    }
    Ok(())
}

fn negated(v: &[Q]) -> Vec<Q> {
    v.iter().map(|x| -x).collect()
}

/// Decides whether `f` restricted to `p` is (relatively) open onto `q`.
pub fn affine_map_is_open(
    f: &AffineMap,
    p: &HPolytope,
    q: &HPolytope,
    options: OpennessOptions,
) -> Result<OpennessVerdict, PolytopeError> {
    check_image_equals(f, p, q)?;
    let vertices = vertex_enumeration(p)?;
    let faces = enumerate_faces(p, &vertices, options.face_budget)?;
    let mut generator_cache: BTreeMap<Vec<usize>, Vec<Vec<Q>>> = BTreeMap::new();
    let mut certificates = Vec::with_capacity(faces.len());
    for face in faces {
        let x = face.barycenter(&vertices);
        let y = f.apply(&x);
        let key = q.tight_inequalities(&y);
        let targets = generator_cache.entry(key).or_insert_with(|| {
            let ConeGenerators { lineality, rays } = tangent_cone(q, &y).expect("f(x) lies in Q").generators();
            let mut all = rays;
            for l in lineality {
                all.push(negated(&l));
                all.push(l);
            }
            all
        });
        let mut lifts = Vec::with_capacity(targets.len());
        for g in targets.iter() {
            let sys = lift_system(f, p, &x, g)?;
            match lp_feasible(&sys) {
                FeasibilityCertificate::Witness(d) => lifts.push(DirectionLift {
                    target: g.clone(),
                    lift: d,
                }),
                FeasibilityCertificate::Farkas(certificate) => {
                    return Ok(OpennessVerdict::NotOpen {
                        face,
                        point: x,
                        direction: g.clone(),
                        certificate,
                    })
                }
            }
        }
        certificates.push(FaceCertificate {
            face,
            point: x,
            image: y,
            lifts,
        });
    }
    Ok(OpennessVerdict::Open { faces: certificates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::unit;
    use crate::rational::{q, qi};

    fn square() -> HPolytope {
        HPolytope::cube(2, qi(0), qi(1))
    }

    #[test]
    fn tangent_cones() {
        let sq = square();
        let interior = tangent_cone(&sq, &[q(1, 2), q(1, 2)]).unwrap();
        assert!(interior.inequalities.is_empty());
        let corner = tangent_cone(&sq, &[qi(0), qi(0)]).unwrap();
        assert!(corner.contains(&[qi(1), qi(2)]));
        assert!(!corner.contains(&[qi(-1), qi(2)]));
        let edge = tangent_cone(&sq, &[q(1, 2), qi(0)]).unwrap();
        assert!(edge.contains(&[qi(-5), qi(1)]));
        assert!(!edge.contains(&[qi(0), qi(-1)]));
        assert_eq!(tangent_cone(&sq, &[qi(2), qi(0)]), Err(PolytopeError::PointOutside));
    }

    #[test]
    fn interior_cone_of_simplex_is_equation_space() {
        let s = HPolytope::simplex(3);
        let c = tangent_cone(&s, &[q(1, 3), q(1, 3), q(1, 3)]).unwrap();
        let mut expected = PolyhedralCone {
            dim: 3,
            inequalities: Vec::new(),
            equations: vec![vec![qi(1), qi(1), qi(1)]],
        };
        assert!(c.same_as(&expected));
        expected.equations.clear();
        assert!(!c.same_as(&expected));
    }

    #[test]
    fn identity_is_open() {
        for p in [square(), HPolytope::simplex(3)] {
            let v = affine_map_is_open(&AffineMap::identity(p.dim()), &p, &p, OpennessOptions::default()).unwrap();
            match v {
                OpennessVerdict::Open { faces } => {
                    for c in &faces {
                        assert!(c.verify(&AffineMap::identity(p.dim()), &p));
                    }
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn square_projection_is_open() {
        let f = AffineMap::linear(vec![unit(2, 0, 1)], 2).unwrap();
        let seg = HPolytope::cube(1, qi(0), qi(1));
        assert!(affine_map_is_open(&f, &square(), &seg, OpennessOptions::default())
            .unwrap()
            .is_open());
    }

    #[test]
    fn apex_of_triangle_projects_openly() {
        // vertices (0,0), (2,0), (1,1); the apex maps into the interior of [0,2]
        let mut p = HPolytope::new(2);
        p.add_inequality(unit(2, 1, -1), qi(0)).unwrap();
        p.add_inequality(vec![qi(-1), qi(1)], qi(0)).unwrap();
        p.add_inequality(vec![qi(1), qi(1)], qi(2)).unwrap();
        let f = AffineMap::linear(vec![unit(2, 0, 1)], 2).unwrap();
        let seg = HPolytope::cube(1, qi(0), qi(2));
        match affine_map_is_open(&f, &p, &seg, OpennessOptions::default()).unwrap() {
            OpennessVerdict::Open { faces } => {
                assert_eq!(faces.len(), 7);
                assert!(faces.iter().all(|c| c.verify(&f, &p)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn blocked_direction_has_farkas_certificate() {
        let sq = square();
        let sys = lift_system(&AffineMap::identity(2), &sq, &[qi(0), qi(0)], &[qi(-1), qi(0)]).unwrap();
        match lp_feasible(&sys) {
            FeasibilityCertificate::Farkas(c) => assert!(c.verify(&sys)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn not_onto_is_an_error() {
        let f = AffineMap::linear(vec![unit(2, 0, 1)], 2).unwrap();
        let seg = HPolytope::cube(1, qi(0), qi(2));
        assert!(matches!(
            affine_map_is_open(&f, &square(), &seg, OpennessOptions::default()),
            Err(PolytopeError::NotSurjectiveOntoQ { .. })
        ));
    }
}
