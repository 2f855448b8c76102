use super::{DiagramError, FinMap, FiniteSpace};

/// A commutative square
///
/// ```text
/// X --f--> Y
/// |        |
/// g        p
/// v        v
/// Z --q--> T
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Square {
    pub x: FiniteSpace,
    pub y: FiniteSpace,
    pub z: FiniteSpace,
    pub t: FiniteSpace,
    pub f: FinMap,
    pub g: FinMap,
    pub p: FinMap,
    pub q: FinMap,
}

/// The fiber product `Y ×_T Z` as the lexicographically ordered list of
/// pairs with equal images in `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub pairs: Vec<(usize, usize)>,
}

impl Pullback {
    pub fn of(p: &FinMap, q: &FinMap) -> Self {
        assert_eq!(p.codomain_len(), q.codomain_len(), "cospan legs must share a target");
        let mut pairs = Vec::new();
        for y in 0..p.domain_len() {
            for z in 0..q.domain_len() {
                if p.apply(y) == q.apply(z) {
                    pairs.push((y, z));
                }
            }
        }
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn index_of(&self, pair: (usize, usize)) -> Option<usize> {
        self.pairs.binary_search(&pair).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BicommutativityVerdict {
    pub bicommutative: bool,
    /// A pullback pair not reached by `(f, g)`.
    pub missed: Option<(usize, usize)>,
}

impl Square {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x: FiniteSpace,
        y: FiniteSpace,
        z: FiniteSpace,
        t: FiniteSpace,
        f: FinMap,
        g: FinMap,
        p: FinMap,
        q: FinMap,
    ) -> Result<Self, DiagramError> {
        let shape_ok = f.domain_len() == x.len()
            && g.domain_len() == x.len()
            && f.codomain_len() == y.len()
            && g.codomain_len() == z.len()
            && p.domain_len() == y.len()
            && q.domain_len() == z.len()
            && p.codomain_len() == t.len()
            && q.codomain_len() == t.len();
        if !shape_ok {
            return Err(DiagramError::MapShapeMismatch {
                source_index: x.id().to_string(),
                target: t.id().to_string(),
            });
        }
        let pf = f.then(&p);
        let qg = g.then(&q);
        if let Some(pt) = (0..x.len()).find(|&pt| pf.apply(pt) != qg.apply(pt)) {
            return Err(DiagramError::SquareNotCommutative(x.label(pt).to_string()));
        }
        Ok(Self {
            x,
            y,
            z,
            t,
            f,
            g,
            p,
            q,
        })
    }

    pub fn pullback(&self) -> Pullback {
        Pullback::of(&self.p, &self.q)
    }

    /// The characteristic map `(f, g) : X → Y ×_T Z` as pullback indices.
    pub fn characteristic_map(&self) -> FinMap {
        let pb = self.pullback();
        let images = (0..self.x.len())
            .map(|pt| {
                pb.index_of((self.f.apply(pt), self.g.apply(pt)))
                    .expect("commutative square lands in the pullback")
            })
            .collect();
        FinMap::new(images, pb.len()).expect("indices in range")
    }

    pub fn check_bicommutative(&self) -> BicommutativityVerdict {
        let pb = self.pullback();
        let chi = self.characteristic_map();
        let mut hit = vec![false; pb.len()];
        for &k in chi.images() {
            hit[k] = true;
        }
        let missed = hit.iter().position(|h| !h).map(|k| pb.pairs[k]);
        BicommutativityVerdict {
            bicommutative: missed.is_none(),
            missed,
        }
    }
}
