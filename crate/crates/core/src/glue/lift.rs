use super::GlueError;
use crate::chi::{build_chi, chi_apply, pushforward_matrix};
use crate::diagram::{Diagram, FinMap, LimitSpace};
use crate::measure::{check_consistent_family, pushforward, MarginalFamily, Measure};
use crate::polytope::{lp_feasible, FarkasCertificate, FeasibilityCertificate, HPolytope};
use crate::rational::format_fraction;

/// Componentwise maps `f_i: X_i → X′_i` between two diagrams over the same
/// poset, natural in the index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramMorphism {
    source: Diagram,
    target: Diagram,
    components: Vec<FinMap>,
}

impl DiagramMorphism {
    pub fn new(source: Diagram, target: Diagram, components: Vec<FinMap>) -> Result<Self, GlueError> {
        if source.poset() != target.poset() {
            return Err(GlueError::ShapeMismatch("source and target posets differ".into()));
        }
        if components.len() != source.len() {
            return Err(GlueError::ShapeMismatch(format!(
                "expected {} component maps, got {}",
                source.len(),
                components.len()
            )));
        }
        for (i, f) in components.iter().enumerate() {
            if f.domain_len() != source.space(i).len() || f.codomain_len() != target.space(i).len() {
                return Err(GlueError::ShapeMismatch(format!(
                    "component at `{}` has the wrong shape",
                    source.poset().name(i)
                )));
            }
        }
        for ((i, j), phi) in source.maps() {
            let phi_t = target.map_ref(*i, *j).expect("same poset, same pairs");
            let left = components[*i].then(phi_t);
            let right = phi.then(&components[*j]);
            if let Some(x) = (0..left.domain_len()).find(|&x| left.apply(x) != right.apply(x)) {
                return Err(GlueError::NaturalityViolation {
                    upper: source.poset().name(*i).to_string(),
                    lower: source.poset().name(*j).to_string(),
                    point: source.space(*i).label(x).to_string(),
                });
            }
        }
        Ok(Self {
            source,
            target,
            components,
        })
    }

    pub fn source(&self) -> &Diagram {
        &self.source
    }

    pub fn target(&self) -> &Diagram {
        &self.target
    }

    pub fn components(&self) -> &[FinMap] {
        &self.components
    }

    /// `lim D → lim D′`, tuple by tuple.
    pub fn induced_map(&self, limit: &LimitSpace, target_limit: &LimitSpace) -> FinMap {
        let images = limit
            .elements()
            .iter()
            .map(|t| {
                let image: Vec<usize> = t.iter().zip(&self.components).map(|(&x, f)| f.apply(x)).collect();
                target_limit.index_of(&image).expect("natural maps preserve compatibility")
            })
            .collect();
        FinMap::new(images, target_limit.len()).expect("indices in range")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lift {
    Witness(Measure),
    Infeasible(FarkasCertificate),
}

impl Lift {
    pub fn witness(&self) -> Option<&Measure> {
        match self {
            Self::Witness(t) => Some(t),
            Self::Infeasible(_) => None,
        }
    }
}

/// `{τ ≥ 0, Σ τ = 1, χ(τ) = family, F_* τ = τ0}` over the limit of the source.
pub fn lift_system(morphism: &DiagramMorphism, tau0: &Measure, family: &MarginalFamily) -> Result<HPolytope, GlueError> {
    let chi = build_chi(&morphism.source)?;
    let target_limit = morphism.target.limit();
    let induced = morphism.induced_map(chi.limit(), &target_limit);
    let mut sys = chi.preimage_system(&family.stacked());
    for (row, w) in pushforward_matrix(&induced).into_iter().zip(tau0.weights()) {
        sys.add_equation(row, w.clone()).expect("row has the limit dimension");
    }
    Ok(sys)
}

/// A measure on `lim D` with marginals `family` and pushforward `τ0`, or a
/// certificate that none exists.
pub fn lift_diagram_morphism(morphism: &DiagramMorphism, tau0: &Measure, family: &MarginalFamily) -> Result<Lift, GlueError> {
    let family =
        check_consistent_family(&morphism.source, family.components().to_vec()).map_err(GlueError::InconsistentFamily)?;
    let chi_t = build_chi(&morphism.target)?;
    let pushed_tau0 = chi_apply(&chi_t, tau0)?;
    for (i, f) in morphism.components.iter().enumerate() {
        let expected = pushforward(f, family.component(i)).map_err(GlueError::InconsistentFamily)?;
        let found = pushed_tau0.component(i);
        if let Some(p) = (0..expected.len()).find(|&p| expected.weight(p) != found.weight(p)) {
            return Err(GlueError::PreconditionMismatch {
                index: morphism.target.poset().name(i).to_string(),
                point: morphism.target.space(i).label(p).to_string(),
                expected: format_fraction(expected.weight(p)),
                found: format_fraction(found.weight(p)),
            });
        }
    }
    let sys = lift_system(morphism, tau0, &family)?;
    Ok(match lp_feasible(&sys) {
        FeasibilityCertificate::Witness(w) => {
            let tau = Measure::new(w).expect("feasible point of the simplex");
            Lift::Witness(tau)
        }
        FeasibilityCertificate::Farkas(cert) => Lift::Infeasible(cert),
    })
}

/// Both conclusions for a witness; substitution for a certificate.
pub fn verify_lift(morphism: &DiagramMorphism, tau0: &Measure, family: &MarginalFamily, lift: &Lift) -> bool {
    let Ok(chi) = build_chi(&morphism.source) else {
        return false;
    };
    match lift {
        Lift::Witness(tau) => {
            let target_limit = morphism.target.limit();
            let induced = morphism.induced_map(chi.limit(), &target_limit);
            chi_apply(&chi, tau).is_ok_and(|f| &f == family)
                && pushforward(&induced, tau).is_ok_and(|m| &m == tau0)
        }
        Lift::Infeasible(cert) => lift_system(morphism, tau0, family).is_ok_and(|s| cert.verify(&s)),
    }
}
