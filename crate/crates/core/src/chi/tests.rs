use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::diagram::FiniteSpace;
use crate::generate::{random_cone, random_diagram_with_limit, random_measure};
use crate::instances::{diamond2, one_object, square};
use crate::rational::{q, qi};

fn measure(ws: &[(i64, i64)]) -> Measure {
    Measure::new(ws.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
}

fn diamond2_family() -> MarginalFamily {
    let d = diamond2();
    check_consistent_family(
        &d,
        vec![
            Measure::uniform(4),
            measure(&[(1, 2), (0, 1), (0, 1), (1, 2)]),
            Measure::uniform(2),
            Measure::uniform(2),
        ],
    )
    .unwrap()
}

#[test]
fn one_object_chi_is_identity() {
    let chi = build_chi(&one_object(3)).unwrap();
    assert_eq!(chi.map(), &AffineMap::identity(3));
    assert!(check_chi_surjective(&chi).unwrap().is_surjective());
    assert!(check_chi_open(&chi, &OpenOptions::default()).unwrap().is_open());
}

#[test]
fn square_chi_is_two_marginal_map() {
    let chi = build_chi(&square(2, 2)).unwrap();
    assert_eq!(chi.limit().len(), 4);
    // rows a0, a1, b0, b1, c*
    let expected: Vec<Vec<Q>> = [
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [1, 0, 1, 0],
        [0, 1, 0, 1],
        [1, 1, 1, 1],
    ]
    .iter()
    .map(|r| r.iter().map(|&v| qi(v)).collect())
    .collect();
    assert_eq!(chi.map().matrix(), expected.as_slice());
    let fam = chi_apply(&chi, &measure(&[(1, 6), (1, 3), (1, 3), (1, 6)])).unwrap();
    assert_eq!(fam.component(0), &Measure::uniform(2));
    assert_eq!(fam.component(1), &Measure::uniform(2));
    let uniform = chi_apply(&chi, &Measure::uniform(4)).unwrap();
    assert_eq!(uniform.component(0), &Measure::uniform(2));
}

#[test]
fn square_codomain_has_four_vertices() {
    let chi = build_chi(&square(2, 2)).unwrap();
    let v = vertex_enumeration(chi.codomain_polytope()).unwrap();
    assert_eq!(v.vertices().len(), 4);
    for x in v.vertices() {
        // pairs of point masses: every coordinate is 0 or 1
        assert!(x.iter().all(|c| c.is_zero() || c.is_one()));
    }
    let image = image_polytope(chi.map(), &vertex_enumeration(chi.domain_simplex()).unwrap()).unwrap();
    assert_eq!(image.vertices(), v.vertices());
}

#[test]
fn point_mass_maps_to_point_masses() {
    let chi = build_chi(&diamond2()).unwrap();
    for e in 0..chi.limit().len() {
        let fam = chi_apply(&chi, &Measure::dirac(4, e)).unwrap();
        for i in 0..4 {
            assert_eq!(fam.component(i), &Measure::dirac(chi.diagram().space(i).len(), chi.limit().element(e)[i]));
        }
        match preimage_witness(&chi, &fam).unwrap() {
            Preimage::Witness(t) => assert_eq!(t, Measure::dirac(4, e)),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn diamond2_shape_counts() {
    let chi = build_chi(&diamond2()).unwrap();
    assert_eq!(chi.limit().len(), 4);
    assert_eq!(chi.map().target_dim(), 12);
    assert_eq!(chi.pushforward_equation_count(), 8);
}

#[test]
fn square_is_surjective_and_open() {
    let chi = build_chi(&square(2, 2)).unwrap();
    let s = check_chi_surjective(&chi).unwrap();
    assert!(s.is_surjective());
    assert_eq!(s.vertex_count, 4);
    assert!(s.verify(&chi));
    let o = check_chi_open(&chi, &OpenOptions::default()).unwrap();
    assert_eq!(o.target, OpennessTarget::Codomain);
    assert!(o.is_open());
    assert!(o.verify(&chi));
    assert!(o.sampled.modulus >= 1e-6, "{:?}", o.sampled);
}

#[test]
fn diamond2_is_not_surjective() {
    let chi = build_chi(&diamond2()).unwrap();
    let s = check_chi_surjective(&chi).unwrap();
    assert!(!s.is_surjective());
    assert!(s.verify(&chi));
    let fam = diamond2_family();
    let p = preimage_witness(&chi, &fam).unwrap();
    assert!(matches!(p, Preimage::Infeasible(_)));
    assert!(p.verify(&chi, &fam));
}

#[test]
fn diamond2_is_open_onto_its_image() {
    let chi = build_chi(&diamond2()).unwrap();
    let o = check_chi_open(&chi, &OpenOptions::default()).unwrap();
    assert_eq!(o.target, OpennessTarget::Image);
    assert!(o.is_open());
    assert!(o.verify(&chi));
    // the image is a 3-simplex: four affinely independent vertices
    assert_eq!(vertex_enumeration(&o.target_polytope).unwrap().vertices().len(), 4);
}

#[test]
fn inconsistent_family_is_rejected() {
    let chi = build_chi(&square(2, 2)).unwrap();
    let other = build_chi(&diamond2()).unwrap();
    let fam = chi_apply(&other, &Measure::uniform(4)).unwrap();
    assert!(matches!(preimage_witness(&chi, &fam), Err(ChiError::InconsistentFamily(_))));
}

#[test]
fn empty_limit_is_an_error() {
    let d = crate::instances::square_over(vec![0], vec![1], 2);
    assert_eq!(build_chi(&d), Err(ChiError::EmptyLimit));
}

#[test]
fn composition_identity_examples() {
    let d = square(2, 2);
    let lim = d.limit();
    let universal = Cone::limit_cone(&d, &lim);
    let v = verify_composition_identity(&universal, &d).unwrap();
    assert!(v.equal);
    assert_eq!(v.direct, build_chi(&d).unwrap().map().matrix());

    let constant = Cone::new(
        &d,
        FiniteSpace::numbered("t", 3),
        vec![FinMap::constant(3, 2, 1), FinMap::constant(3, 2, 0), FinMap::constant(3, 1, 0)],
    )
    .unwrap();
    let v = verify_composition_identity(&constant, &d).unwrap();
    assert!(v.equal);
    let first = v.composed.iter().map(|r| r[0].clone()).collect::<Vec<_>>();
    assert!(v.composed.iter().zip(&first).all(|(row, c)| row.iter().all(|x| x == c)));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let cone = random_cone(&d, &lim, 3, &mut rng);
        assert!(verify_composition_identity(&cone, &d).unwrap().equal);
    }
}

#[test]
fn functor_preserves_limit_cone_and_surjections() {
    let d = square(2, 2);
    let lim = d.limit();
    let v = check_functor_preserves(&Cone::limit_cone(&d, &lim), &d, &OpenOptions::default()).unwrap();
    assert!(v.preserved());

    let x = one_object(2);
    let cone = Cone::new(&x, FiniteSpace::numbered("t", 3), vec![FinMap::new(vec![0, 1, 1], 2).unwrap()]).unwrap();
    let v = check_functor_preserves(&cone, &x, &OpenOptions::default()).unwrap();
    assert!(v.preserved());
    assert!(v.pushforward_open.is_open());

    let thin = Cone::new(&x, FiniteSpace::numbered("t", 2), vec![FinMap::constant(2, 2, 0)]).unwrap();
    assert_eq!(
        check_functor_preserves(&thin, &x, &OpenOptions::default()),
        Err(ChiError::ConeNotOpenMulticommutative { missed: 1 })
    );
}

#[test]
fn registry_has_the_three_checks() {
    let r = chi_checks();
    assert_eq!(r.names(), vec!["surjective", "open", "affine"]);
    let chi = build_chi(&square(2, 3)).unwrap();
    for (name, check) in r.iter() {
        assert!(check.run(&chi, &OpenOptions::default()).unwrap().passed(), "{name}");
    }
}

/// All families on the 1/4-grid inside the codomain, enumerated over the
/// maximal components and completed by pushforward.
fn grid_families(chi: &ChiMap) -> Vec<MarginalFamily> {
    fn compositions(n: usize, total: i64) -> Vec<Vec<i64>> {
        if n == 1 {
            return vec![vec![total]];
        }
        (0..=total)
            .flat_map(|k| {
                compositions(n - 1, total - k).into_iter().map(move |mut rest| {
                    rest.insert(0, k);
                    rest
                })
            })
            .collect()
    }
    let d = chi.diagram();
    let maximal = d.poset().maximal().to_vec();
    let options: Vec<Vec<Vec<i64>>> = maximal.iter().map(|&m| compositions(d.space(m).len(), 4)).collect();
    let mut out = Vec::new();
    let mut counter = vec![0usize; maximal.len()];
    'outer: loop {
        let mut comps: Vec<Option<Measure>> = vec![None; d.len()];
        for (slot, &m) in maximal.iter().enumerate() {
            comps[m] = Some(Measure::new(options[slot][counter[slot]].iter().map(|&k| q(k, 4)).collect()).unwrap());
        }
        for j in 0..d.len() {
            if comps[j].is_none() {
                let m = *maximal.iter().find(|&&m| d.poset().gt(m, j)).unwrap();
                comps[j] = Some(pushforward(d.map_ref(m, j).unwrap(), comps[m].as_ref().unwrap()).unwrap());
            }
        }
        if let Ok(f) = check_consistent_family(d, comps.into_iter().map(Option::unwrap).collect()) {
            out.push(f);
        }
        for k in 0..counter.len() {
            counter[k] += 1;
            if counter[k] < options[k].len() {
                continue 'outer;
            }
            counter[k] = 0;
        }
        break;
    }
    out
}

#[test]
fn surjectivity_agrees_with_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..8 {
        let d = random_diagram_with_limit(3, 3, &mut rng);
        let chi = build_chi(&d).unwrap();
        let verdict = check_chi_surjective(&chi).unwrap();
        let all_reached = grid_families(&chi)
            .iter()
            .all(|f| matches!(preimage_witness(&chi, f).unwrap(), Preimage::Witness(_)));
        if verdict.is_surjective() {
            assert!(all_reached);
        }
    }
    let chi = build_chi(&diamond2()).unwrap();
    assert!(grid_families(&chi).iter().any(|f| matches!(preimage_witness(&chi, f).unwrap(), Preimage::Infeasible(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chi_is_consistent_affine_and_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_diagram_with_limit(4, 3, &mut rng);
        let chi = build_chi(&d).unwrap();
        let n = chi.limit().len();
        let a = random_measure(n, &mut rng);
        let b = random_measure(n, &mut rng);
        let fa = chi_apply(&chi, &a).unwrap();
        let fb = chi_apply(&chi, &b).unwrap();
        prop_assert!(check_consistent_family(&d, fa.components().to_vec()).is_ok());
        prop_assert!(chi.codomain_polytope().contains(&fa.stacked()));
        for t in [q(0, 1), q(1, 3), q(1, 2), q(1, 1)] {
            let mixed = chi_apply(&chi, &a.mix(&t, &b).unwrap()).unwrap().stacked();
            let expected: Vec<Q> = fa.stacked().iter().zip(fb.stacked()).map(|(x, y)| &t * x + (Q::one() - &t) * y).collect();
            prop_assert_eq!(mixed, expected);
        }
        let p = preimage_witness(&chi, &fa).unwrap();
        prop_assert!(p.witness().is_some());
        prop_assert!(p.verify(&chi, &fa));
    }
}
