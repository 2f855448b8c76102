//! Small named diagrams used in examples and tests.

use crate::diagram::{Diagram, FinMap, FiniteSpace, Poset, SpaceMap};

pub fn one_object(n: usize) -> Diagram {
    let poset = Poset::new(&["a"], &[]).unwrap();
    Diagram::new(poset, vec![FiniteSpace::numbered("a", n)], vec![]).unwrap()
}

/// `a, b ≥ c` with `X_c` a singleton.
pub fn square(na: usize, nb: usize) -> Diagram {
    let poset = Poset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
    let spaces = vec![
        FiniteSpace::numbered("a", na),
        FiniteSpace::numbered("b", nb),
        FiniteSpace::new("c", vec!["*"]).unwrap(),
    ];
    let maps = vec![
        SpaceMap {
            source: 0,
            target: 2,
            map: FinMap::constant(na, 1, 0),
        },
        SpaceMap {
            source: 1,
            target: 2,
            map: FinMap::constant(nb, 1, 0),
        },
    ];
    Diagram::new(poset, spaces, maps).unwrap()
}

/// `a, b ≥ c, d`; `X_a = X_b = {00,01,10,11}`, `c` reads the first bit and `d` the second.
pub fn diamond2() -> Diagram {
    let poset = Poset::new(
        &["a", "b", "c", "d"],
        &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
    )
    .unwrap();
    let bits = vec!["00", "01", "10", "11"];
    let spaces = vec![
        FiniteSpace::new("a", bits.clone()).unwrap(),
        FiniteSpace::new("b", bits).unwrap(),
        FiniteSpace::new("c", vec!["0", "1"]).unwrap(),
        FiniteSpace::new("d", vec!["0", "1"]).unwrap(),
    ];
    let first = FinMap::new(vec![0, 0, 1, 1], 2).unwrap();
    let second = FinMap::new(vec![0, 1, 0, 1], 2).unwrap();
    let maps = vec![
        SpaceMap { source: 0, target: 2, map: first.clone() },
        SpaceMap { source: 0, target: 3, map: second.clone() },
        SpaceMap { source: 1, target: 2, map: first },
        SpaceMap { source: 1, target: 3, map: second },
    ];
    Diagram::new(poset, spaces, maps).unwrap()
}

/// Chain `a ≥ b ≥ c` with the given maps; `φ_ac` is their composite.
pub fn chain(phi_ab: Vec<usize>, nb: usize, phi_bc: Vec<usize>, nc: usize) -> Diagram {
    let na = phi_ab.len();
    let poset = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
    let ab = FinMap::new(phi_ab, nb).unwrap();
    let bc = FinMap::new(phi_bc, nc).unwrap();
    let ac = ab.then(&bc);
    let spaces = vec![
        FiniteSpace::numbered("a", na),
        FiniteSpace::numbered("b", nb),
        FiniteSpace::numbered("c", nc),
    ];
    let maps = vec![
        SpaceMap { source: 0, target: 1, map: ab },
        SpaceMap { source: 1, target: 2, map: bc },
        SpaceMap { source: 0, target: 2, map: ac },
    ];
    Diagram::new(poset, spaces, maps).unwrap()
}

/// `a, b ≥ c` with arbitrary maps `q_a: X_a → X_c`, `q_b: X_b → X_c`.
pub fn square_over(q_a: Vec<usize>, q_b: Vec<usize>, nc: usize) -> Diagram {
    let poset = Poset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
    let spaces = vec![
        FiniteSpace::numbered("a", q_a.len()),
        FiniteSpace::numbered("b", q_b.len()),
        FiniteSpace::numbered("c", nc),
    ];
    let maps = vec![
        SpaceMap { source: 0, target: 2, map: FinMap::new(q_a, nc).unwrap() },
        SpaceMap { source: 1, target: 2, map: FinMap::new(q_b, nc).unwrap() },
    ];
    Diagram::new(poset, spaces, maps).unwrap()
}
