use proptest::prelude::*;

use super::*;
use crate::rational::q;

fn points(max_dim: usize, max_points: usize) -> impl Strategy<Value = (usize, Vec<Vec<Q>>)> {
    (1..=max_dim).prop_flat_map(move |d| {
        let point = prop::collection::vec((-6i64..=6, 1i64..=3), d)
            .prop_map(|v| v.into_iter().map(|(n, den)| q(n, den)).collect::<Vec<Q>>());
        (Just(d), prop::collection::vec(point, 1..=max_points))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn hull_vertex_round_trip((d, pts) in points(4, 8)) {
        let v = VPolytope::from_points(d, pts).unwrap();
        let h = hull(&v);
        let back = vertex_enumeration(&h).unwrap();
        prop_assert_eq!(back.vertices(), v.vertices());
        prop_assert!(hull(&back).equivalent(&h));
    }

    #[test]
    fn lp_answers_verify((d, pts) in points(4, 6), target in prop::collection::vec(-4i64..=4, 4)) {
        let h = hull(&VPolytope::from_points(d, pts).unwrap());
        prop_assert!(lp_feasible(&h).verify(&h));
        let mut cut = h.clone();
        cut.add_inequality(unit(d, 0, 1), q(target[0], 2)).unwrap();
        let ans = lp_feasible(&cut);
        prop_assert!(ans.verify(&cut));
        let objective: Vec<Q> = target[..d].iter().map(|&t| q(t, 1)).collect();
        match lp_maximize(&h, &objective) {
            LpOutcome::Optimal { point, value } => {
                prop_assert!(h.contains(&point));
                prop_assert_eq!(crate::rational::dot(&objective, &point), value.clone());
                let verts = vertex_enumeration(&h).unwrap();
                let best = verts.vertices().iter().map(|v| crate::rational::dot(&objective, v)).max().unwrap();
                prop_assert_eq!(best, value);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn projection_matches_projected_vertices((d, pts) in points(6, 7), mask in 1u8..64) {
        let h = hull(&VPolytope::from_points(d, pts).unwrap());
        let keep: Vec<usize> = (0..d).filter(|k| mask >> k & 1 == 1).collect();
        prop_assume!(!keep.is_empty());
        let projected = fm_project(&h, &keep);
        let rows = keep.iter().map(|&k| unit(d, k, 1)).collect();
        let f = AffineMap::linear(rows, d).unwrap();
        let image = image_polytope(&f, &vertex_enumeration(&h).unwrap()).unwrap();
        prop_assert!(projected.equivalent(&hull(&image)));
    }
}
