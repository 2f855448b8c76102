use std::collections::HashMap;

use super::DiagramError;

/// A finite partially ordered set of named indices.
///
/// Elements are addressed by their position in `elements`; that order is the
/// canonical order used for maximal elements, blocks, and coordinates.
/// Two posets are equal when they list the same elements in the same order
/// under the same relation, however the relation was presented.
#[derive(Clone, Debug)]
pub struct Poset {
    elements: Vec<String>,
    covers: Vec<(usize, usize)>,
    // geq[i][j] <=> i >= j, reflexive and transitive
    geq: Vec<Vec<bool>>,
    maximal: Vec<usize>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.geq == other.geq
    }
}

impl Eq for Poset {}

impl Poset {
    /// Builds a poset from element names and pairs `(i, j)` meaning `i >= j`.
    pub fn new<S: AsRef<str>>(elements: &[S], covers: &[(S, S)]) -> Result<Self, DiagramError> {
        let elements: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let mut position = HashMap::new();
        for (idx, name) in elements.iter().enumerate() {
            if position.insert(name.clone(), idx).is_some() {
                return Err(DiagramError::DuplicateElement(name.clone()));
            }
        }
        let lookup = |name: &str| {
            position
                .get(name)
                .copied()
                .ok_or_else(|| DiagramError::UnknownElement(name.to_string()))
        };
        let mut pairs = Vec::with_capacity(covers.len());
        for (hi, lo) in covers {
            pairs.push((lookup(hi.as_ref())?, lookup(lo.as_ref())?));
        }
        Self::from_indices(elements, pairs)
    }

    pub fn from_indices(elements: Vec<String>, covers: Vec<(usize, usize)>) -> Result<Self, DiagramError> {
        let n = elements.len();
        let mut geq = vec![vec![false; n]; n];
        for (i, row) in geq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(hi, lo) in &covers {
            if hi >= n {
                return Err(DiagramError::UnknownElement(format!("#{hi}")));
            }
            if lo >= n {
                return Err(DiagramError::UnknownElement(format!("#{lo}")));
            }
            if hi == lo {
                return Err(DiagramError::CycleDetected(vec![elements[hi].clone()]));
            }
            geq[hi][lo] = true;
        }
        // Warshall closure
        for k in 0..n {
            for i in 0..n {
                if geq[i][k] {
                    for j in 0..n {
                        if geq[k][j] {
                            geq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if geq[i][j] && geq[j][i] {
                    return Err(DiagramError::CycleDetected(vec![
                        elements[i].clone(),
                        elements[j].clone(),
                    ]));
                }
            }
        }
        let maximal = (0..n)
            .filter(|&i| !(0..n).any(|j| j != i && geq[j][i]))
            .collect();
        Ok(Self {
            elements,
            covers,
            geq,
            maximal,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.elements[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    /// The pairs the poset was built from.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// `i >= j` in the derived order.
    pub fn geq(&self, i: usize, j: usize) -> bool {
        self.geq[i][j]
    }

    pub fn gt(&self, i: usize, j: usize) -> bool {
        i != j && self.geq[i][j]
    }

    /// Maximal elements in canonical (input) order.
    pub fn maximal(&self) -> &[usize] {
        &self.maximal
    }

    pub fn is_maximal(&self, i: usize) -> bool {
        self.maximal.contains(&i)
    }

    /// All strict comparable pairs `(i, j)` with `i > j`, lexicographic in index order.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.gt(i, j) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// Indices `j <= i`, ascending.
    pub fn down_set(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.geq[i][j]).collect()
    }

    /// The covering relation (transitive reduction), lexicographic.
    pub fn hasse_covers(&self) -> Vec<(usize, usize)> {
        self.strict_pairs()
            .into_iter()
            .filter(|&(i, j)| !(0..self.len()).any(|k| k != i && k != j && self.gt(i, k) && self.gt(k, j)))
            .collect()
    }

    /// True when every two elements are comparable.
    pub fn is_total(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.geq[i][j] || self.geq[j][i]))
    }

    /// Order-preserving enumeration: every element appears after all elements below it.
    pub fn bottom_up(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.down_set(i).len(), i));
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton() {
        let p = Poset::new(&["a"], &[]).unwrap();
        assert_eq!(p.maximal(), &[0]);
    }

    #[test]
    fn equality_ignores_redundant_pairs() {
        let hasse = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let full = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        assert_eq!(hasse, full);
        assert_ne!(hasse, Poset::new(&["a", "b", "c"], &[("a", "b")]).unwrap());
    }

    #[test]
    fn two_maximal_over_one() {
        let p = Poset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        assert_eq!(p.maximal(), &[0, 1]);
        assert!(p.geq(0, 2) && p.geq(1, 2) && !p.geq(0, 1));
    }

    #[test]
    fn cycle_is_rejected() {
        let err = Poset::new(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, DiagramError::CycleDetected(_)));
        let err = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap_err();
        assert!(matches!(err, DiagramError::CycleDetected(_)));
    }

    #[test]
    fn unknown_element() {
        let err = Poset::new(&["a"], &[("a", "z")]).unwrap_err();
        assert_eq!(err, DiagramError::UnknownElement("z".into()));
    }

    #[test]
    fn transitive_closure_and_hasse() {
        let p = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        assert!(p.geq(0, 2));
        assert!(p.is_total());
        assert_eq!(p.hasse_covers(), vec![(0, 1), (1, 2)]);
        assert_eq!(p.bottom_up(), vec![2, 1, 0]);
    }

    #[test]
    fn order_axioms_hold() {
        let p = Poset::new(&["a", "b", "c", "d"], &[("a", "c"), ("b", "c"), ("c", "d")]).unwrap();
        let n = p.len();
        for i in 0..n {
            assert!(p.geq(i, i));
            for j in 0..n {
                if i != j {
                    assert!(!(p.geq(i, j) && p.geq(j, i)));
                }
                for k in 0..n {
                    if p.geq(i, j) && p.geq(j, k) {
                        assert!(p.geq(i, k));
                    }
                }
            }
            assert!(p.maximal().iter().any(|&m| p.geq(m, i)));
        }
    }
}
