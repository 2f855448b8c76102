use std::collections::HashMap;

use super::{Diagram, DiagramError, FinMap};

/// The limit of a diagram: all index-compatible tuples, one point per index.
///
/// Tuples are stored in full (every index, not only maximal ones) and sorted
/// lexicographically by point position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitSpace {
    sizes: Vec<usize>,
    maximal: Vec<usize>,
    elements: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
}

/// The injection `h` of the limit into the product of maximal-index spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitEmbedding {
    pub maximal: Vec<usize>,
    pub images: Vec<Vec<usize>>,
    inverse: HashMap<Vec<usize>, usize>,
}

impl LimitEmbedding {
    pub fn apply(&self, element: usize) -> &[usize] {
        &self.images[element]
    }

    /// `h⁻¹` on the image; `None` off the image.
    pub fn invert(&self, coordinates: &[usize]) -> Option<usize> {
        self.inverse.get(coordinates).copied()
    }
}

impl LimitSpace {
    pub fn compute(diagram: &Diagram) -> Self {
        let poset = diagram.poset();
        let n = poset.len();
        let maximal = poset.maximal().to_vec();
        let sizes: Vec<usize> = diagram.spaces().iter().map(|s| s.len()).collect();
        // for each non-maximal index, the maximal indices above it
        let above: Vec<Vec<usize>> = (0..n)
            .map(|j| maximal.iter().copied().filter(|&m| m != j && poset.geq(m, j)).collect())
            .collect();

        let mut elements = Vec::new();
        let radices: Vec<usize> = maximal.iter().map(|&m| sizes[m]).collect();
        if radices.iter().all(|&r| r > 0) {
            let mut counter = vec![0usize; maximal.len()];
            'outer: loop {
                let mut tuple = vec![usize::MAX; n];
                for (slot, &m) in maximal.iter().enumerate() {
                    tuple[m] = counter[slot];
                }
                let mut ok = true;
                for j in 0..n {
                    if tuple[j] != usize::MAX {
                        continue;
                    }
                    let mut value = None;
                    for &m in &above[j] {
                        let y = diagram.map_ref(m, j).expect("validated").apply(tuple[m]);
                        match value {
                            None => value = Some(y),
                            Some(v) if v != y => {
                                ok = false;
                                break;
                            }
                            _ => {}
                        }
                    }
                    match value {
                        Some(v) if ok => tuple[j] = v,
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && Self::compatible(diagram, &tuple) {
                    elements.push(tuple);
                }
                // odometer
                let mut slot = maximal.len();
                loop {
                    if slot == 0 {
                        break 'outer;
                    }
                    slot -= 1;
                    counter[slot] += 1;
                    if counter[slot] < radices[slot] {
                        break;
                    }
                    counter[slot] = 0;
                }
            }
        }
        elements.sort();
        let lookup = elements.iter().enumerate().map(|(k, t)| (t.clone(), k)).collect();
        Self {
            sizes,
            maximal,
            elements,
            lookup,
        }
    }

    fn compatible(diagram: &Diagram, tuple: &[usize]) -> bool {
        diagram.maps().all(|(&(i, j), f)| f.apply(tuple[i]) == tuple[j])
    }

    /// Whether a full tuple satisfies every compatibility equation of `diagram`.
    pub fn is_compatible_tuple(diagram: &Diagram, tuple: &[usize]) -> bool {
        tuple.len() == diagram.len()
            && tuple.iter().enumerate().all(|(i, &x)| x < diagram.space(i).len())
            && Self::compatible(diagram, tuple)
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &[usize] {
        &self.elements[k]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, tuple: &[usize]) -> Option<usize> {
        self.lookup.get(tuple).copied()
    }

    pub fn maximal(&self) -> &[usize] {
        &self.maximal
    }

    pub fn space_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn maximal_coordinates(&self, k: usize) -> Vec<usize> {
        self.maximal.iter().map(|&m| self.elements[k][m]).collect()
    }

    pub fn embedding(&self) -> LimitEmbedding {
        let images: Vec<Vec<usize>> = (0..self.len()).map(|k| self.maximal_coordinates(k)).collect();
        let inverse = images.iter().enumerate().map(|(k, t)| (t.clone(), k)).collect();
        LimitEmbedding {
            maximal: self.maximal.clone(),
            images,
            inverse,
        }
    }

    /// Coordinate projection `π_i : lim D → X_i`.
    pub fn projection(&self, i: usize) -> Result<FinMap, DiagramError> {
        if i >= self.sizes.len() {
            return Err(DiagramError::UnknownIndex(format!("#{i}")));
        }
        Ok(FinMap::new(self.elements.iter().map(|t| t[i]).collect(), self.sizes[i]).expect("coordinates in range"))
    }
}

#[cfg(test)]
mod tests {
    use crate::instances::*;
    use super::*;

    #[test]
    fn one_object_limit_is_the_space() {
        let lim = one_object(2).limit();
        assert_eq!(lim.elements(), &[vec![0], vec![1]]);
        let h = lim.embedding();
        assert_eq!(h.apply(1), &[1]);
    }

    #[test]
    fn square_limit_is_full_product() {
        let lim = square(2, 2).limit();
        assert_eq!(
            lim.elements(),
            &[vec![0, 0, 0], vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 0]]
        );
        let h = lim.embedding();
        for a in 0..2 {
            for b in 0..2 {
                assert!(h.invert(&[a, b]).is_some());
            }
        }
        assert_eq!(lim.projection(0).unwrap().apply(1), 0);
    }

    #[test]
    fn diamond_limit_is_diagonal() {
        let d = diamond2();
        let lim = d.limit();
        // oracle: filter all 16 pairs by both equations
        let first = |x: usize| x / 2;
        let second = |x: usize| x % 2;
        let mut expected = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                if first(a) == first(b) && second(a) == second(b) {
                    expected.push(vec![a, b, first(a), second(a)]);
                }
            }
        }
        assert_eq!(lim.elements(), expected.as_slice());
        assert_eq!(lim.len(), 4);
        let h = lim.embedding();
        let image: Vec<_> = h.images.clone();
        assert_eq!(image, vec![vec![0, 0], vec![1, 1], vec![2, 2], vec![3, 3]]);
        assert_eq!(h.invert(&[0, 1]), None);
        // π_c of the diagonal element "10"
        let k = lim.index_of(&[2, 2, 1, 0]).unwrap();
        assert_eq!(lim.projection(2).unwrap().apply(k), 1);
    }

    #[test]
    fn projections_commute_with_maps() {
        for d in [square(3, 2), diamond2(), chain(vec![0, 1, 1, 0], 2, vec![0, 0], 1)] {
            let lim = d.limit();
            for ((i, j), f) in d.maps() {
                let via = lim.projection(*i).unwrap().then(f);
                assert_eq!(via, lim.projection(*j).unwrap());
            }
        }
    }

    #[test]
    fn chain_limit_has_top_size() {
        let lim = chain(vec![0, 1, 1, 0, 1], 2, vec![0, 0], 1).limit();
        assert_eq!(lim.len(), 5);
    }

    #[test]
    fn unknown_projection() {
        assert!(square(2, 2).limit().projection(7).is_err());
    }

    #[test]
    fn empty_limit_is_allowed() {
        use super::super::{FiniteSpace, Poset, SpaceMap};
        // a ≥ c ≤ b where the images of a and b in c are disjoint
        let poset = Poset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        let spaces = vec![
            FiniteSpace::numbered("a", 1),
            FiniteSpace::numbered("b", 1),
            FiniteSpace::numbered("c", 2),
        ];
        let maps = vec![
            SpaceMap { source: 0, target: 2, map: FinMap::new(vec![0], 2).unwrap() },
            SpaceMap { source: 1, target: 2, map: FinMap::new(vec![1], 2).unwrap() },
        ];
        let d = Diagram::new(poset, spaces, maps).unwrap();
        assert!(d.limit().is_empty());
    }
}
