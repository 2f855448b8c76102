use super::{Diagram, DiagramError, FinMap, FiniteSpace, LimitSpace};

/// A cone `(T, h_i)` over a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    apex: FiniteSpace,
    legs: Vec<FinMap>,
}

/// Outcome of checking whether a cone is open-multicommutative.
///
/// Every map between finite discrete spaces is open, so the verdict reduces
/// to surjectivity of the characteristic map; `open` is recorded as `true`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeVerdict {
    pub surjective: bool,
    pub open: bool,
    /// First limit element outside the image, if any.
    pub missed: Option<usize>,
}

impl ConeVerdict {
    pub fn is_open_multicommutative(&self) -> bool {
        self.surjective && self.open
    }
}

impl Cone {
    pub fn new(diagram: &Diagram, apex: FiniteSpace, legs: Vec<FinMap>) -> Result<Self, DiagramError> {
        if legs.len() != diagram.len() {
            return Err(DiagramError::LegCountMismatch {
                expected: diagram.len(),
                found: legs.len(),
            });
        }
        for (i, leg) in legs.iter().enumerate() {
            if leg.domain_len() != apex.len() || leg.codomain_len() != diagram.space(i).len() {
                return Err(DiagramError::MapShapeMismatch {
                    source_index: apex.id().to_string(),
                    target: diagram.poset().name(i).to_string(),
                });
            }
        }
        for ((i, j), f) in diagram.maps() {
            let via = legs[*i].then(f);
            if let Some(t) = (0..apex.len()).find(|&t| via.apply(t) != legs[*j].apply(t)) {
                return Err(DiagramError::LegIncoherent {
                    upper: diagram.poset().name(*i).to_string(),
                    lower: diagram.poset().name(*j).to_string(),
                    point: apex.label(t).to_string(),
                });
            }
        }
        Ok(Self { apex, legs })
    }

    /// The universal cone: apex `lim D`, legs the projections.
    pub fn limit_cone(diagram: &Diagram, limit: &LimitSpace) -> Self {
        let apex = FiniteSpace::numbered("lim", limit.len());
        let legs = (0..diagram.len())
            .map(|i| limit.projection(i).expect("index in range"))
            .collect();
        Self { apex, legs }
    }

    pub fn apex(&self) -> &FiniteSpace {
        &self.apex
    }

    pub fn legs(&self) -> &[FinMap] {
        &self.legs
    }

    pub fn leg(&self, i: usize) -> &FinMap {
        &self.legs[i]
    }

    /// `χ_C : T → lim D`, `t ↦ (h_i(t))_i`, as a map into limit-element indices.
    pub fn characteristic_map(&self, limit: &LimitSpace) -> FinMap {
        let images = (0..self.apex.len())
            .map(|t| {
                let tuple: Vec<usize> = self.legs.iter().map(|h| h.apply(t)).collect();
                limit
                    .index_of(&tuple)
                    .expect("coherent legs land in the limit")
            })
            .collect();
        FinMap::new(images, limit.len()).expect("indices in range")
    }

    pub fn check_open_multicommutative(&self, limit: &LimitSpace) -> ConeVerdict {
        let chi = self.characteristic_map(limit);
        let mut hit = vec![false; limit.len()];
        for &e in chi.images() {
            hit[e] = true;
        }
        let missed = hit.iter().position(|h| !h);
        ConeVerdict {
            surjective: missed.is_none(),
            open: true,
            missed,
        }
    }
}
