use std::collections::HashSet;

use super::DiagramError;

/// A finite discrete space: an ordered list of distinct point labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    id: String,
    points: Vec<String>,
}

impl FiniteSpace {
    pub fn new<S: Into<String>>(id: impl Into<String>, points: Vec<S>) -> Result<Self, DiagramError> {
        let id = id.into();
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for p in &points {
            if !seen.insert(p.as_str()) {
                return Err(DiagramError::DuplicatePoint {
                    space: id.clone(),
                    point: p.clone(),
                });
            }
        }
        Ok(Self { id, points })
    }

    /// Space with points labelled `0..n`.
    pub fn numbered(id: impl Into<String>, n: usize) -> Self {
        Self {
            id: id.into(),
            points: (0..n).map(|k| k.to_string()).collect(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self, p: usize) -> &str {
        &self.points[p]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }
}

/// A total function between finite point sets, stored as the image of each
/// source point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinMap {
    codomain: usize,
    images: Vec<usize>,
}

impl FinMap {
    pub fn new(images: Vec<usize>, codomain: usize) -> Result<Self, DiagramError> {
        if let Some(&bad) = images.iter().find(|&&y| y >= codomain) {
            return Err(DiagramError::ImageOutOfRange { image: bad, codomain });
        }
        Ok(Self { codomain, images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            codomain: n,
            images: (0..n).collect(),
        }
    }

    pub fn constant(domain: usize, codomain: usize, value: usize) -> Self {
        assert!(value < codomain);
        Self {
            codomain,
            images: vec![value; domain],
        }
    }

    pub fn domain_len(&self) -> usize {
        self.images.len()
    }

    pub fn codomain_len(&self) -> usize {
        self.codomain
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FinMap) -> FinMap {
        assert_eq!(self.codomain, other.domain_len(), "maps are not composable");
        FinMap {
            codomain: other.codomain,
            images: self.images.iter().map(|&y| other.images[y]).collect(),
        }
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain];
        for &y in &self.images {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Points of the domain mapping to `y`.
    pub fn fiber(&self, y: usize) -> Vec<usize> {
        (0..self.images.len()).filter(|&x| self.images[x] == y).collect()
    }
}

/// A connecting map `φ_ij : X_i → X_j` of a diagram, for `i > j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceMap {
    pub source: usize,
    pub target: usize,
    pub map: FinMap,
}
