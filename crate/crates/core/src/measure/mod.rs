//! Exact-rational probability measures on finite sets, pushforwards,
//! couplings, and consistent marginal families.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::diagram::{Diagram, FinMap, Pullback};
use crate::rational::{format_fraction, Q};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("negative weight at point {point}")]
    NegativeWeight { point: usize },
    #[error("weights sum to {total}, not 1")]
    NotNormalized { total: String },
    #[error("measure lives on {found} points but the space has {expected}")]
    SpaceMismatch { expected: usize, found: usize },
    #[error("expected {expected} components, got {found}")]
    ComponentCountMismatch { expected: usize, found: usize },
    #[error("pushforwards disagree at point {point} of the shared quotient: {left} vs {right}")]
    MarginalMismatch { point: usize, left: String, right: String },
    #[error("family inconsistent on {upper} >= {lower} at point `{point}`: pushforward gives {expected}, component has {found}")]
    Inconsistent {
        upper: String,
        lower: String,
        point: String,
        expected: String,
        found: String,
    },
}

/// A probability measure on `{0, …, n-1}`: nonnegative rationals summing to
/// exactly one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Measure {
    weights: Vec<Q>,
}

impl Measure {
    pub fn new(weights: Vec<Q>) -> Result<Self, MeasureError> {
        if let Some(point) = weights.iter().position(|w| w.is_negative()) {
            return Err(MeasureError::NegativeWeight { point });
        }
        let total: Q = weights.iter().sum();
        if !total.is_one() {
            return Err(MeasureError::NotNormalized {
                total: format_fraction(&total),
            });
        }
        Ok(Self { weights })
    }

    /// Normalizes nonnegative integer masses; `None` when all are zero.
    pub fn from_masses(masses: &[u64]) -> Option<Self> {
        let total: u64 = masses.iter().sum();
        if total == 0 {
            return None;
        }
        let total = Q::from_integer(total.into());
        Some(Self {
            weights: masses.iter().map(|&m| Q::from_integer(m.into()) / &total).collect(),
        })
    }

    pub fn dirac(n: usize, x: usize) -> Self {
        let mut weights = vec![Q::zero(); n];
        weights[x] = Q::one();
        Self { weights }
    }

    pub fn uniform(n: usize) -> Self {
        let w = Q::new(1.into(), (n as u64).into());
        Self { weights: vec![w; n] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, x: usize) -> &Q {
        &self.weights[x]
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<Q> {
        self.weights
    }

    /// Points of positive mass, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| !self.weights[x].is_zero()).collect()
    }

    /// `t·self + (1 − t)·other` for `t ∈ [0, 1]`.
    pub fn mix(&self, t: &Q, other: &Measure) -> Result<Measure, MeasureError> {
        if self.len() != other.len() {
            return Err(MeasureError::SpaceMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let s = Q::one() - t;
        Measure::new(
            self.weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| t * a + &s * b)
                .collect(),
        )
    }
}

/// Image measure `ν(y) = Σ_{f(x) = y} μ(x)`.
pub fn pushforward(f: &FinMap, mu: &Measure) -> Result<Measure, MeasureError> {
    if f.domain_len() != mu.len() {
        return Err(MeasureError::SpaceMismatch {
            expected: f.domain_len(),
            found: mu.len(),
        });
    }
    let mut weights = vec![Q::zero(); f.codomain_len()];
    for (x, w) in mu.weights.iter().enumerate() {
        if !w.is_zero() {
            weights[f.apply(x)] += w;
        }
    }
    Ok(Measure { weights })
}

/// Product measure on `X × Y`, point `(x, y)` at index `x·|Y| + y`.
pub fn product_measure(mu: &Measure, nu: &Measure) -> Measure {
    let mut weights = Vec::with_capacity(mu.len() * nu.len());
    for a in &mu.weights {
        for b in &nu.weights {
            weights.push(a * b);
        }
    }
    Measure { weights }
}

/// The measure on `X × Y` carried by the graph of `f`: mass `μ(x)` at
/// `(x, f(x))`, index `x·|Y| + y`.
pub fn graph_pushforward(mu: &Measure, f: &FinMap) -> Result<Measure, MeasureError> {
    if f.domain_len() != mu.len() {
        return Err(MeasureError::SpaceMismatch {
            expected: f.domain_len(),
            found: mu.len(),
        });
    }
    let ny = f.codomain_len();
    let mut weights = vec![Q::zero(); mu.len() * ny];
    for (x, w) in mu.weights.iter().enumerate() {
        weights[x * ny + f.apply(x)] = w.clone();
    }
    Ok(Measure { weights })
}

/// A measure on the fiber product `A ×_S B`; `pairs[k]` is the point carrying
/// `measure.weight(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coupling {
    pub pairs: Vec<(usize, usize)>,
    pub measure: Measure,
}

impl Coupling {
    pub fn first_marginal(&self, len: usize) -> Measure {
        let f = FinMap::new(self.pairs.iter().map(|p| p.0).collect(), len).expect("pairs in range");
        pushforward(&f, &self.measure).expect("shapes match")
    }

    pub fn second_marginal(&self, len: usize) -> Measure {
        let f = FinMap::new(self.pairs.iter().map(|p| p.1).collect(), len).expect("pairs in range");
        pushforward(&f, &self.measure).expect("shapes match")
    }
}

/// Conditionally independent coupling of `μ_A` and `μ_B` over their common
/// quotient `S`: `τ(a, b) = μ_A(a)·μ_B(b)/ν(s)` when `q_A(a) = q_B(b) = s`
/// and `ν(s) > 0`, zero otherwise.
pub fn gluing_coupling(
    mu_a: &Measure,
    mu_b: &Measure,
    q_a: &FinMap,
    q_b: &FinMap,
) -> Result<Coupling, MeasureError> {
    if q_a.codomain_len() != q_b.codomain_len() {
        return Err(MeasureError::SpaceMismatch {
            expected: q_a.codomain_len(),
            found: q_b.codomain_len(),
        });
    }
    let nu_a = pushforward(q_a, mu_a)?;
    let nu_b = pushforward(q_b, mu_b)?;
    if let Some(s) = (0..nu_a.len()).find(|&s| nu_a.weights[s] != nu_b.weights[s]) {
        return Err(MeasureError::MarginalMismatch {
            point: s,
            left: format_fraction(&nu_a.weights[s]),
            right: format_fraction(&nu_b.weights[s]),
        });
    }
    let pullback = Pullback::of(q_a, q_b);
    let weights = pullback
        .pairs
        .iter()
        .map(|&(a, b)| {
            let mass = &nu_a.weights[q_a.apply(a)];
            if mass.is_zero() {
                Q::zero()
            } else {
                &mu_a.weights[a] * &mu_b.weights[b] / mass
            }
        })
        .collect();
    Ok(Coupling {
        pairs: pullback.pairs,
        measure: Measure { weights },
    })
}

/// One measure per diagram index, commuting with every pushforward: a point
/// of `lim P(D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarginalFamily {
    components: Vec<Measure>,
}

impl MarginalFamily {
    pub fn components(&self) -> &[Measure] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Measure {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<Measure> {
        self.components
    }

    /// Concatenated weights, block `i` of length `|X_i|`.
    pub fn stacked(&self) -> Vec<Q> {
        self.components.iter().flat_map(|m| m.weights.iter().cloned()).collect()
    }
}

/// Accepts `components` iff every pushforward equation `φ_ij μ_i = μ_j` holds
/// exactly; otherwise reports the first violated pair in lexicographic order.
pub fn check_consistent_family(diagram: &Diagram, components: Vec<Measure>) -> Result<MarginalFamily, MeasureError> {
    if components.len() != diagram.len() {
        return Err(MeasureError::ComponentCountMismatch {
            expected: diagram.len(),
            found: components.len(),
        });
    }
    for (i, mu) in components.iter().enumerate() {
        if mu.len() != diagram.space(i).len() {
            return Err(MeasureError::SpaceMismatch {
                expected: diagram.space(i).len(),
                found: mu.len(),
            });
        }
    }
    for ((i, j), f) in diagram.maps() {
        let pushed = pushforward(f, &components[*i])?;
        if let Some(y) = (0..pushed.len()).find(|&y| pushed.weights[y] != components[*j].weights[y]) {
            return Err(MeasureError::Inconsistent {
                upper: diagram.poset().name(*i).to_string(),
                lower: diagram.poset().name(*j).to_string(),
                point: diagram.space(*j).label(y).to_string(),
                expected: format_fraction(&pushed.weights[y]),
                found: format_fraction(&components[*j].weights[y]),
            });
        }
    }
    Ok(MarginalFamily { components })
}
