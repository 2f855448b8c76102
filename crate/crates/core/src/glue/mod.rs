//! Gluing consistent marginal families into joint measures on the limit,
//! and lifting measures along morphisms of diagrams.

mod lift;

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::chi::{build_chi, chi_apply, preimage_witness, ChiError, ChiMap, Preimage};
use crate::diagram::{Diagram, DiagramError, FinMap, Poset};
use crate::measure::{check_consistent_family, gluing_coupling, MarginalFamily, Measure, MeasureError};
use crate::polytope::FarkasCertificate;
use crate::rational::Q;
use crate::registry::Registry;

pub use lift::{lift_diagram_morphism, lift_system, verify_lift, DiagramMorphism, Lift};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GlueError {
    #[error("the diagram has an empty limit")]
    EmptyLimit,
    #[error("inconsistent family: {0}")]
    InconsistentFamily(MeasureError),
    #[error("precondition fails at index {index}, point `{point}`: expected {expected}, found {found}")]
    PreconditionMismatch {
        index: String,
        point: String,
        expected: String,
        found: String,
    },
    #[error("naturality fails on {upper} >= {lower} at point `{point}`")]
    NaturalityViolation { upper: String, lower: String, point: String },
    #[error("morphism does not fit the diagrams: {0}")]
    ShapeMismatch(String),
    #[error("unknown gluing strategy `{0}`")]
    UnknownStrategy(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Chi(ChiError),
}

impl From<ChiError> for GlueError {
    fn from(e: ChiError) -> Self {
        match e {
            ChiError::EmptyLimit => Self::EmptyLimit,
            ChiError::InconsistentFamily(m) => Self::InconsistentFamily(m),
            other => Self::Chi(other),
        }
    }
}

/// Non-maximal indices grouped under the first maximal index above them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaPartition {
    pub maximal_order: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

pub fn gamma_partition(poset: &Poset) -> GammaPartition {
    let maximal_order = poset.maximal().to_vec();
    let mut claimed = vec![false; poset.len()];
    for &m in &maximal_order {
        claimed[m] = true;
    }
    let blocks = maximal_order
        .iter()
        .map(|&m| {
            let block: Vec<usize> = (0..poset.len()).filter(|&j| !claimed[j] && poset.geq(m, j)).collect();
            for &j in &block {
                claimed[j] = true;
            }
            block
        })
        .collect();
    GammaPartition { maximal_order, blocks }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagramClass {
    Chain,
    Forest,
    SingleQuotient,
    General,
}

impl DiagramClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Chain => "CHAIN",
            Self::Forest => "FOREST",
            Self::SingleQuotient => "SINGLE_QUOTIENT",
            Self::General => "GENERAL",
        }
    }

    /// Classes on which constructive gluing always succeeds.
    pub fn is_constructive(self) -> bool {
        self != Self::General
    }
}

impl fmt::Display for DiagramClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The greatest element of `set`, if it has one.
fn greatest(poset: &Poset, set: &[usize]) -> Option<usize> {
    set.iter().copied().find(|&g| set.iter().all(|&s| poset.geq(g, s)))
}

/// For each maximal index in canonical order, the part of its down-set
/// already below an earlier maximal index, with its greatest element.
/// `None` when some such part is nonempty without a greatest element.
fn shared_quotients(poset: &Poset) -> Option<Vec<Option<usize>>> {
    let mut covered = vec![false; poset.len()];
    let mut out = Vec::new();
    for &m in poset.maximal() {
        let down = poset.down_set(m);
        let shared: Vec<usize> = down.iter().copied().filter(|&j| covered[j]).collect();
        if shared.is_empty() {
            out.push(None);
        } else {
            out.push(Some(greatest(poset, &shared)?));
        }
        for j in down {
            covered[j] = true;
        }
    }
    Some(out)
}

/// `CHAIN` if total; `FOREST` if each non-maximal index lies under exactly
/// one maximal index; `SINGLE_QUOTIENT` if each maximal index meets the
/// down-sets of the earlier ones in a principal down-set (or not at all);
/// `GENERAL` otherwise.
pub fn classify_diagram(poset: &Poset) -> DiagramClass {
    if poset.is_total() {
        return DiagramClass::Chain;
    }
    let forest = (0..poset.len())
        .filter(|&j| !poset.is_maximal(j))
        .all(|j| poset.maximal().iter().filter(|&&m| poset.geq(m, j)).count() == 1);
    if forest {
        DiagramClass::Forest
    } else if shared_quotients(poset).is_some() {
        DiagramClass::SingleQuotient
    } else {
        DiagramClass::General
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GlueMethod {
    Constructive,
    Lp,
    Infeasible,
}

impl GlueMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Constructive => "CONSTRUCTIVE",
            Self::Lp => "LP",
            Self::Infeasible => "INFEASIBLE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Glued {
    Constructive(Measure),
    Lp(Measure),
    Infeasible(FarkasCertificate),
}

impl Glued {
    pub fn method(&self) -> GlueMethod {
        match self {
            Self::Constructive(_) => GlueMethod::Constructive,
            Self::Lp(_) => GlueMethod::Lp,
            Self::Infeasible(_) => GlueMethod::Infeasible,
        }
    }

    pub fn measure(&self) -> Option<&Measure> {
        match self {
            Self::Constructive(m) | Self::Lp(m) => Some(m),
            Self::Infeasible(_) => None,
        }
    }
}

/// What one strategy made of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Attempt {
    Glued(Measure),
    /// The strategy does not apply to this instance.
    Declined,
    Infeasible(FarkasCertificate),
}

pub trait GluingStrategy {
    fn method(&self) -> GlueMethod;
    fn attempt(&self, chi: &ChiMap, family: &MarginalFamily) -> Attempt;
}

struct Constructive;
struct LinearProgram;

impl GluingStrategy for Constructive {
    fn method(&self) -> GlueMethod {
        GlueMethod::Constructive
    }

    fn attempt(&self, chi: &ChiMap, family: &MarginalFamily) -> Attempt {
        match constructive_glue(chi, family) {
            Some(tau) => Attempt::Glued(tau),
            None => Attempt::Declined,
        }
    }
}

impl GluingStrategy for LinearProgram {
    fn method(&self) -> GlueMethod {
        GlueMethod::Lp
    }

    fn attempt(&self, chi: &ChiMap, family: &MarginalFamily) -> Attempt {
        match preimage_witness(chi, family) {
            Ok(Preimage::Witness(tau)) => Attempt::Glued(tau),
            Ok(Preimage::Infeasible(cert)) => Attempt::Infeasible(cert),
            Err(_) => Attempt::Declined,
        }
    }
}

/// `constructive`, then `lp`.
pub fn gluing_strategies() -> Registry<dyn GluingStrategy> {
    let mut r: Registry<dyn GluingStrategy> = Registry::new();
    r.register("constructive", Box::new(Constructive));
    r.register("lp", Box::new(LinearProgram));
    r
}

/// Processes maximal indices in canonical order. Each new maximal space is
/// coupled to the partial joint conditionally independently over the
/// greatest shared index (a singleton when nothing is shared); the rest of
/// its block is filled in deterministically by the diagram maps.
fn constructive_glue(chi: &ChiMap, family: &MarginalFamily) -> Option<Measure> {
    let diagram = chi.diagram();
    let poset = diagram.poset();
    let quotients = shared_quotients(poset)?;
    let n = diagram.len();
    let mut covered = vec![false; n];
    let mut support: Vec<Vec<usize>> = vec![vec![usize::MAX; n]];
    let mut joint = Measure::dirac(1, 0);
    for (&m, quotient) in poset.maximal().iter().zip(quotients) {
        let mu_m = family.component(m);
        let (q_joint, q_new) = match quotient {
            Some(g) => (
                FinMap::new(support.iter().map(|t| t[g]).collect(), diagram.space(g).len()).ok()?,
                diagram.map(m, g)?,
            ),
            None => (FinMap::constant(support.len(), 1, 0), FinMap::constant(mu_m.len(), 1, 0)),
        };
        let coupling = gluing_coupling(&joint, mu_m, &q_joint, &q_new).ok()?;
        let block: Vec<usize> = poset.down_set(m).into_iter().filter(|&j| !covered[j]).collect();
        let mut next_support = Vec::new();
        let mut next_weights = Vec::new();
        for (&(k, x), w) in coupling.pairs.iter().zip(coupling.measure.weights()) {
            if w.is_zero() {
                continue;
            }
            let mut tuple = support[k].clone();
            for &j in &block {
                tuple[j] = if j == m { x } else { diagram.map_ref(m, j)?.apply(x) };
            }
            next_support.push(tuple);
            next_weights.push(w.clone());
        }
        for j in block {
            covered[j] = true;
        }
        support = next_support;
        joint = Measure::new(next_weights).ok()?;
    }
    let limit = chi.limit();
    let mut weights = vec![Q::zero(); limit.len()];
    for (tuple, w) in support.iter().zip(joint.weights()) {
        weights[limit.index_of(tuple)?] += w;
    }
    let tau = Measure::new(weights).ok()?;
    (chi_apply(chi, &tau).ok()? == *family).then_some(tau)
}

/// Glues `family` with the named strategies in order; the first that glues
/// or proves infeasibility wins.
pub fn glue_family_with(diagram: &Diagram, family: &MarginalFamily, strategies: &[&str]) -> Result<Glued, GlueError> {
    let family = check_consistent_family(diagram, family.components().to_vec()).map_err(GlueError::InconsistentFamily)?;
    let chi = build_chi(diagram)?;
    let registry = gluing_strategies();
    for name in strategies {
        let strategy = registry.get(name).ok_or_else(|| GlueError::UnknownStrategy(name.to_string()))?;
        match strategy.attempt(&chi, &family) {
            Attempt::Glued(tau) => {
                assert_eq!(chi_apply(&chi, &tau)?, family, "glued measure reproduces the family");
                return Ok(match strategy.method() {
                    GlueMethod::Constructive => Glued::Constructive(tau),
                    _ => Glued::Lp(tau),
                });
            }
            Attempt::Infeasible(cert) => {
                debug_assert!(cert.verify(&chi.preimage_system(&family.stacked())));
                return Ok(Glued::Infeasible(cert));
            }
            Attempt::Declined => {}
        }
    }
    // every strategy declined; the LP always decides, so this needs it
    match preimage_witness(&chi, &family)? {
        Preimage::Witness(tau) => Ok(Glued::Lp(tau)),
        Preimage::Infeasible(cert) => Ok(Glued::Infeasible(cert)),
    }
}

/// Constructive gluing with LP fallback.
pub fn glue_family(diagram: &Diagram, family: &MarginalFamily) -> Result<Glued, GlueError> {
    glue_family_with(diagram, family, &["constructive", "lp"])
}

/// Re-checks a gluing result: `χ(τ) = family`, or the certificate by substitution.
pub fn verify_glued(diagram: &Diagram, family: &MarginalFamily, glued: &Glued) -> bool {
    let Ok(chi) = build_chi(diagram) else {
        return false;
    };
    match glued {
        Glued::Constructive(tau) | Glued::Lp(tau) => chi_apply(&chi, tau).is_ok_and(|f| &f == family),
        Glued::Infeasible(cert) => cert.verify(&chi.preimage_system(&family.stacked())),
    }
}

#[cfg(test)]
mod tests;
