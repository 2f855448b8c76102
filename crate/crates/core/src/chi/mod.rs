//! The characteristic map `χ: P(lim D) → lim P(D)` as an exact linear map
//! from the simplex over limit elements into stacked per-index simplices.

mod checks;

use std::ops::Range;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::diagram::{Cone, Diagram, DiagramError, FinMap, LimitSpace};
use crate::measure::{check_consistent_family, pushforward, MarginalFamily, Measure, MeasureError};
use crate::polytope::linalg::mat_mul;
use crate::polytope::{
    affine_map_is_open, check_image_equals, hull, image_polytope, lp_feasible, sampled_metric_openness,
    vertex_enumeration, AffineMap, FarkasCertificate, FeasibilityCertificate, HPolytope, OpennessOptions,
    OpennessVerdict, PolytopeError, SampledOpenness, DEFAULT_FACE_BUDGET,
};
use crate::rational::{q, Q};

pub use checks::{chi_checks, AffinityReport, CheckOutcome, ChiCheck};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ChiError {
    #[error("the diagram has an empty limit")]
    EmptyLimit,
    #[error("measure lives on {found} points but the limit has {expected}")]
    SpaceMismatch { expected: usize, found: usize },
    #[error("inconsistent family: {0}")]
    InconsistentFamily(MeasureError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("cone is not open-multicommutative: limit element {missed} has no preimage")]
    ConeNotOpenMulticommutative { missed: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiMap {
    diagram: Diagram,
    limit: LimitSpace,
    domain: HPolytope,
    codomain: HPolytope,
    map: AffineMap,
    offsets: Vec<usize>,
    pushforward_equations: usize,
}

impl ChiMap {
    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn limit(&self) -> &LimitSpace {
        &self.limit
    }

    /// The simplex over limit elements.
    pub fn domain_simplex(&self) -> &HPolytope {
        &self.domain
    }

    /// Consistent families: per-index simplices cut by pushforward equations.
    pub fn codomain_polytope(&self) -> &HPolytope {
        &self.codomain
    }

    pub fn map(&self) -> &AffineMap {
        &self.map
    }

    /// Coordinates of index `i` in the stacked codomain.
    pub fn block(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn pushforward_equation_count(&self) -> usize {
        self.pushforward_equations
    }

    /// Splits a stacked codomain point into a family, checking consistency.
    pub fn family_from_stacked(&self, stacked: &[Q]) -> Result<MarginalFamily, ChiError> {
        let components = (0..self.diagram.len())
            .map(|i| Measure::new(stacked[self.block(i)].to_vec()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(ChiError::InconsistentFamily)?;
        check_consistent_family(&self.diagram, components).map_err(ChiError::InconsistentFamily)
    }

    /// `{τ ≥ 0, Σ τ = 1, M τ = target}`.
    pub fn preimage_system(&self, target: &[Q]) -> HPolytope {
        let mut sys = self.domain.clone();
        for (row, t) in self.map.matrix().iter().zip(target) {
            sys.add_equation(row.clone(), t.clone()).expect("row has the limit dimension");
        }
        sys
    }
}

pub fn build_chi(diagram: &Diagram) -> Result<ChiMap, ChiError> {
    let limit = diagram.limit();
    if limit.is_empty() {
        return Err(ChiError::EmptyLimit);
    }
    let n = diagram.len();
    let mut offsets = vec![0];
    for s in diagram.spaces() {
        offsets.push(offsets.last().unwrap() + s.len());
    }
    let total = offsets[n];
    let mut matrix = Vec::with_capacity(total);
    for i in 0..n {
        for p in 0..diagram.space(i).len() {
            matrix.push(
                limit
                    .elements()
                    .iter()
                    .map(|e| if e[i] == p { Q::one() } else { Q::zero() })
                    .collect(),
            );
        }
    }
    let map = AffineMap::linear(matrix, limit.len()).expect("rows have the limit dimension");
    let mut codomain = HPolytope::new(total);
    for k in 0..total {
        let mut row = vec![Q::zero(); total];
        row[k] = -Q::one();
        codomain.add_inequality(row, Q::zero()).expect("shape");
    }
    for i in 0..n {
        let mut row = vec![Q::zero(); total];
        for r in &mut row[offsets[i]..offsets[i + 1]] {
            *r = Q::one();
        }
        codomain.add_equation(row, Q::one()).expect("shape");
    }
    let mut pushforward_equations = 0;
    for (i, j) in diagram.poset().strict_pairs() {
        let f = diagram.map_ref(i, j).expect("map for every strict pair");
        for y in 0..diagram.space(j).len() {
            let mut row = vec![Q::zero(); total];
            for x in f.fiber(y) {
                row[offsets[i] + x] = Q::one();
            }
            row[offsets[j] + y] = -Q::one();
            codomain.add_equation(row, Q::zero()).expect("shape");
            pushforward_equations += 1;
        }
    }
    Ok(ChiMap {
        diagram: diagram.clone(),
        domain: HPolytope::simplex(limit.len()),
        limit,
        codomain,
        map,
        offsets,
        pushforward_equations,
    })
}

/// `χ(τ) = (P π_i(τ))_i`, computed by pushforward along each projection.
pub fn chi_apply(chi: &ChiMap, tau: &Measure) -> Result<MarginalFamily, ChiError> {
    if tau.len() != chi.limit.len() {
        return Err(ChiError::SpaceMismatch {
            expected: chi.limit.len(),
            found: tau.len(),
        });
    }
    let components = (0..chi.diagram.len())
        .map(|i| {
            let pi = chi.limit.projection(i).expect("index in range");
            pushforward(&pi, tau).expect("projection domain is the limit")
        })
        .collect();
    Ok(check_consistent_family(&chi.diagram, components).expect("pushforwards of one measure are consistent"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preimage {
    Witness(Measure),
    Infeasible(FarkasCertificate),
}

impl Preimage {
    /// Re-checks the witness by `chi_apply` or the certificate by substitution.
    pub fn verify(&self, chi: &ChiMap, family: &MarginalFamily) -> bool {
        match self {
            Self::Witness(tau) => chi_apply(chi, tau).is_ok_and(|f| &f == family),
            Self::Infeasible(cert) => cert.verify(&chi.preimage_system(&family.stacked())),
        }
    }

    pub fn witness(&self) -> Option<&Measure> {
        match self {
            Self::Witness(tau) => Some(tau),
            Self::Infeasible(_) => None,
        }
    }
}

pub fn preimage_witness(chi: &ChiMap, family: &MarginalFamily) -> Result<Preimage, ChiError> {
    check_consistent_family(&chi.diagram, family.components().to_vec()).map_err(ChiError::InconsistentFamily)?;
    let system = chi.preimage_system(&family.stacked());
    Ok(match lp_feasible(&system) {
        FeasibilityCertificate::Witness(w) => {
            let tau = Measure::new(w).expect("feasible point of the simplex");
            debug_assert!(chi_apply(chi, &tau).is_ok_and(|f| &f == family));
            Preimage::Witness(tau)
        }
        FeasibilityCertificate::Farkas(cert) => Preimage::Infeasible(cert),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexWitness {
    pub vertex: MarginalFamily,
    pub preimage: Measure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnreachedVertex {
    pub vertex: MarginalFamily,
    pub certificate: FarkasCertificate,
}

/// Vertices of the codomain polytope with preimages, in vertex order, up to
/// the first vertex without one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectivityReport {
    pub vertex_count: usize,
    pub covered: Vec<VertexWitness>,
    pub unreached: Option<UnreachedVertex>,
}

impl SurjectivityReport {
    pub fn is_surjective(&self) -> bool {
        self.unreached.is_none()
    }

    pub fn verify(&self, chi: &ChiMap) -> bool {
        let covered = self.covered.iter().all(|w| {
            chi.codomain.contains(&w.vertex.stacked()) && chi_apply(chi, &w.preimage).is_ok_and(|f| f == w.vertex)
        });
        let unreached = self.unreached.as_ref().is_none_or(|u| {
            chi.codomain.contains(&u.vertex.stacked()) && u.certificate.verify(&chi.preimage_system(&u.vertex.stacked()))
        });
        covered && unreached
    }
}

/// Surjectivity by vertex coverage: the image is a polytope, so it equals the
/// codomain iff every codomain vertex has a preimage.
pub fn check_chi_surjective(chi: &ChiMap) -> Result<SurjectivityReport, ChiError> {
    let vertices = vertex_enumeration(&chi.codomain)?;
    let mut covered = Vec::new();
    for v in vertices.vertices() {
        let vertex = chi.family_from_stacked(v)?;
        match preimage_witness(chi, &vertex)? {
            Preimage::Witness(preimage) => covered.push(VertexWitness { vertex, preimage }),
            Preimage::Infeasible(certificate) => {
                return Ok(SurjectivityReport {
                    vertex_count: vertices.vertices().len(),
                    covered,
                    unreached: Some(UnreachedVertex { vertex, certificate }),
                })
            }
        }
    }
    Ok(SurjectivityReport {
        vertex_count: vertices.vertices().len(),
        covered,
        unreached: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpennessTarget {
    Codomain,
    Image,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenOptions {
    pub face_budget: usize,
    pub samples: usize,
    pub radius: Q,
    pub seed: u64,
}

impl Default for OpenOptions {
    fn default() -> Self {
        Self {
            face_budget: DEFAULT_FACE_BUDGET,
            samples: 100,
            radius: q(1, 1000),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiOpenness {
    pub target: OpennessTarget,
    pub target_polytope: HPolytope,
    pub verdict: OpennessVerdict,
    pub sampled: SampledOpenness,
}

impl ChiOpenness {
    pub fn is_open(&self) -> bool {
        self.verdict.is_open()
    }

    pub fn verify(&self, chi: &ChiMap) -> bool {
        match &self.verdict {
            OpennessVerdict::Open { faces } => faces.iter().all(|c| c.verify(&chi.map, &chi.domain)),
            OpennessVerdict::NotOpen { point, direction, certificate, .. } => {
                crate::polytope::lift_system(&chi.map, &chi.domain, point, direction)
                    .is_ok_and(|sys| certificate.verify(&sys))
            }
        }
    }
}

/// Openness onto the codomain polytope, or onto the image when χ is not onto.
pub fn check_chi_open(chi: &ChiMap, options: &OpenOptions) -> Result<ChiOpenness, ChiError> {
    let opts = OpennessOptions {
        face_budget: options.face_budget,
    };
    let (target, target_polytope) = match check_image_equals(&chi.map, &chi.domain, &chi.codomain) {
        Ok(()) => (OpennessTarget::Codomain, chi.codomain.clone()),
        Err(PolytopeError::NotSurjectiveOntoQ { .. }) => {
            let image = image_polytope(&chi.map, &vertex_enumeration(&chi.domain)?)?;
            (OpennessTarget::Image, hull(&image))
        }
        Err(e) => return Err(e.into()),
    };
    let verdict = affine_map_is_open(&chi.map, &chi.domain, &target_polytope, opts)?;
    let sampled = sampled_metric_openness(
        &chi.map,
        &chi.domain,
        &target_polytope,
        options.samples,
        &options.radius,
        options.seed,
    )?;
    Ok(ChiOpenness {
        target,
        target_polytope,
        verdict,
        sampled,
    })
}

/// Column-stochastic 0/1 matrix of `P(f)`: entry `(y, x)` is 1 iff `f(x) = y`.
pub fn pushforward_matrix(f: &FinMap) -> Vec<Vec<Q>> {
    (0..f.codomain_len())
        .map(|y| {
            (0..f.domain_len())
                .map(|x| if f.apply(x) == y { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionVerdict {
    /// `χ · P(χ_{T,D})`.
    pub composed: Vec<Vec<Q>>,
    /// The marginalization matrix of the cone legs.
    pub direct: Vec<Vec<Q>>,
    pub equal: bool,
}

/// Compares `χ · P(χ_{T,D})` with the leg-marginalization matrix entrywise.
pub fn verify_composition_identity(cone: &Cone, diagram: &Diagram) -> Result<CompositionVerdict, ChiError> {
    let cone = Cone::new(diagram, cone.apex().clone(), cone.legs().to_vec())?;
    let chi = build_chi(diagram)?;
    let characteristic = cone.characteristic_map(&chi.limit);
    let composed = mat_mul(chi.map.matrix(), &pushforward_matrix(&characteristic));
    let direct: Vec<Vec<Q>> = cone.legs().iter().flat_map(pushforward_matrix).collect();
    let equal = composed == direct;
    Ok(CompositionVerdict { composed, direct, equal })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctorVerdict {
    pub pushforward_surjective: bool,
    pub pushforward_open: OpennessVerdict,
    pub chi_surjective: SurjectivityReport,
    pub chi_open: ChiOpenness,
    pub composition: CompositionVerdict,
}

impl FunctorVerdict {
    /// `χ_{P(T),P(D)}` is onto and open.
    pub fn preserved(&self) -> bool {
        self.pushforward_surjective
            && self.pushforward_open.is_open()
            && self.chi_surjective.is_surjective()
            && self.chi_open.target == OpennessTarget::Codomain
            && self.chi_open.is_open()
            && self.composition.equal
    }
}

/// Decides whether `P` carries an open-multicommutative cone to one, through
/// the factorization `χ_{P(T),P(D)} = χ · P(χ_{T,D})`.
pub fn check_functor_preserves(cone: &Cone, diagram: &Diagram, options: &OpenOptions) -> Result<FunctorVerdict, ChiError> {
    let chi = build_chi(diagram)?;
    let cone = Cone::new(diagram, cone.apex().clone(), cone.legs().to_vec())?;
    let space_level = cone.check_open_multicommutative(&chi.limit);
    if let Some(missed) = space_level.missed {
        return Err(ChiError::ConeNotOpenMulticommutative { missed });
    }
    let characteristic = cone.characteristic_map(&chi.limit);
    let pf = AffineMap::linear(pushforward_matrix(&characteristic), characteristic.domain_len())?;
    let apex_simplex = HPolytope::simplex(characteristic.domain_len());
    let limit_simplex = HPolytope::simplex(characteristic.codomain_len());
    let pushforward_surjective = check_image_equals(&pf, &apex_simplex, &limit_simplex).is_ok();
    let pushforward_open = affine_map_is_open(
        &pf,
        &apex_simplex,
        &limit_simplex,
        OpennessOptions {
            face_budget: options.face_budget,
        },
    )?;
    let chi_surjective = check_chi_surjective(&chi)?;
    let chi_open = check_chi_open(&chi, options)?;
    let composition = verify_composition_identity(&cone, diagram)?;
    Ok(FunctorVerdict {
        pushforward_surjective,
        pushforward_open,
        chi_surjective,
        chi_open,
        composition,
    })
}

#[cfg(test)]
mod tests;
