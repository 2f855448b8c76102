//! Finite posets, diagrams of finite sets over them, limits, cones, and
//! characteristic maps.

mod cone;
mod limit;
mod poset;
mod space;
mod square;

use std::collections::BTreeMap;

use thiserror::Error;

pub use cone::{ConeVerdict, Cone};
pub use limit::{LimitEmbedding, LimitSpace};
pub use poset::Poset;
pub use space::{FinMap, FiniteSpace, SpaceMap};
pub use square::{BicommutativityVerdict, Pullback, Square};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("covers induce a cycle through {0:?}")]
    CycleDetected(Vec<String>),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element `{0}` listed twice")]
    DuplicateElement(String),
    #[error("point `{point}` listed twice in space `{space}`")]
    DuplicatePoint { space: String, point: String },
    #[error("image {image} out of range for a codomain of size {codomain}")]
    ImageOutOfRange { image: usize, codomain: usize },
    #[error("expected {expected} spaces, got {found}")]
    SpaceCountMismatch { expected: usize, found: usize },
    #[error("missing map {source_index}->{target}")]
    MissingMap { source_index: String, target: String },
    #[error("map {source_index}->{target} given for a pair that is not strictly comparable")]
    UnexpectedMap { source_index: String, target: String },
    #[error("map {source_index}->{target} does not match the shapes of its spaces")]
    MapShapeMismatch { source_index: String, target: String },
    #[error("coherence violated on chain {upper} >= {middle} >= {lower} at point `{point}`")]
    CoherenceViolation {
        upper: String,
        middle: String,
        lower: String,
        point: String,
    },
    #[error("unknown index `{0}`")]
    UnknownIndex(String),
    #[error("cone leg {upper}->{lower} incoherent at apex point `{point}`")]
    LegIncoherent {
        upper: String,
        lower: String,
        point: String,
    },
    #[error("cone needs {expected} legs, got {found}")]
    LegCountMismatch { expected: usize, found: usize },
    #[error("square does not commute at point `{0}`")]
    SquareNotCommutative(String),
}

/// A functor from a finite poset into finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    poset: Poset,
    spaces: Vec<FiniteSpace>,
    maps: BTreeMap<(usize, usize), FinMap>,
}

impl Diagram {
    /// Validates shapes, presence of a map for every strict comparable pair,
    /// and composition coherence on every chain `i > j > k`.
    pub fn new(poset: Poset, spaces: Vec<FiniteSpace>, maps: Vec<SpaceMap>) -> Result<Self, DiagramError> {
        if spaces.len() != poset.len() {
            return Err(DiagramError::SpaceCountMismatch {
                expected: poset.len(),
                found: spaces.len(),
            });
        }
        let name = |i: usize| poset.name(i).to_string();
        let mut stored = BTreeMap::new();
        for m in maps {
            if m.source >= poset.len() || m.target >= poset.len() {
                return Err(DiagramError::UnknownIndex(format!("{}->{}", m.source, m.target)));
            }
            if !poset.gt(m.source, m.target) {
                return Err(DiagramError::UnexpectedMap {
                    source_index: name(m.source),
                    target: name(m.target),
                });
            }
            if m.map.domain_len() != spaces[m.source].len() || m.map.codomain_len() != spaces[m.target].len() {
                return Err(DiagramError::MapShapeMismatch {
                    source_index: name(m.source),
                    target: name(m.target),
                });
            }
            stored.insert((m.source, m.target), m.map);
        }
        for (i, j) in poset.strict_pairs() {
            if !stored.contains_key(&(i, j)) {
                return Err(DiagramError::MissingMap {
                    source_index: name(i),
                    target: name(j),
                });
            }
        }
        let diagram = Self {
            poset,
            spaces,
            maps: stored,
        };
        diagram.check_coherence()?;
        Ok(diagram)
    }

    fn check_coherence(&self) -> Result<(), DiagramError> {
        let n = self.poset.len();
        for i in 0..n {
            for j in 0..n {
                if !self.poset.gt(i, j) {
                    continue;
                }
                for k in 0..n {
                    if !self.poset.gt(j, k) {
                        continue;
                    }
                    let via = self.maps[&(i, j)].then(&self.maps[&(j, k)]);
                    let direct = &self.maps[&(i, k)];
                    if let Some(x) = (0..via.domain_len()).find(|&x| via.apply(x) != direct.apply(x)) {
                        return Err(DiagramError::CoherenceViolation {
                            upper: self.poset.name(i).to_string(),
                            middle: self.poset.name(j).to_string(),
                            lower: self.poset.name(k).to_string(),
                            point: self.spaces[i].label(x).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn spaces(&self) -> &[FiniteSpace] {
        &self.spaces
    }

    pub fn space(&self, i: usize) -> &FiniteSpace {
        &self.spaces[i]
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    /// `φ_ij`, including the implicit identity when `i == j`.
    pub fn map(&self, i: usize, j: usize) -> Option<FinMap> {
        if i == j {
            return Some(FinMap::identity(self.spaces[i].len()));
        }
        self.maps.get(&(i, j)).cloned()
    }

    pub fn map_ref(&self, i: usize, j: usize) -> Option<&FinMap> {
        self.maps.get(&(i, j))
    }

    /// Stored maps for strict pairs in lexicographic order.
    pub fn maps(&self) -> impl Iterator<Item = (&(usize, usize), &FinMap)> {
        self.maps.iter()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, DiagramError> {
        self.poset
            .index_of(name)
            .ok_or_else(|| DiagramError::UnknownIndex(name.to_string()))
    }

    pub fn limit(&self) -> LimitSpace {
        LimitSpace::compute(self)
    }

    /// Restriction to the sub-poset on `keep` (indices of `self`), preserving order.
    pub fn restrict(&self, keep: &[usize]) -> Diagram {
        let elements: Vec<String> = keep.iter().map(|&i| self.poset.name(i).to_string()).collect();
        let mut covers = Vec::new();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                if self.poset.gt(i, j) {
                    covers.push((a, b));
                }
            }
        }
        let poset = Poset::from_indices(elements, covers).expect("sub-poset of a poset");
        let spaces = keep.iter().map(|&i| self.spaces[i].clone()).collect();
        let maps = poset
            .strict_pairs()
            .into_iter()
            .map(|(a, b)| SpaceMap {
                source: a,
                target: b,
                map: self.maps[&(keep[a], keep[b])].clone(),
            })
            .collect();
        Diagram::new(poset, spaces, maps).expect("restriction of a valid diagram")
    }
}
