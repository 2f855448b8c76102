use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::chi::build_chi;
use crate::diagram::{FiniteSpace, SpaceMap};
use crate::generate::{random_diagram_with_limit, random_measure, refinement_instance};
use crate::instances::{chain, diamond2, one_object, square, square_over};
use crate::rational::q;

fn poset(elements: &[&str], covers: &[(&str, &str)]) -> Poset {
    Poset::new(elements, covers).unwrap()
}

/// Three maximal indices pairwise sharing a distinct quotient.
fn triangle() -> Poset {
    poset(
        &["x", "y", "z", "p", "q", "r"],
        &[("x", "p"), ("y", "p"), ("y", "q"), ("z", "q"), ("x", "r"), ("z", "r")],
    )
}

#[test]
fn gamma_partition_examples() {
    let sq = gamma_partition(square(2, 2).poset());
    assert_eq!(sq.maximal_order, vec![0, 1]);
    assert_eq!(sq.blocks, vec![vec![2], vec![]]);
    let ch = gamma_partition(chain(vec![0, 1], 2, vec![0, 0], 1).poset());
    assert_eq!(ch.blocks, vec![vec![1, 2]]);
    let di = gamma_partition(diamond2().poset());
    assert_eq!(di.blocks, vec![vec![2, 3], vec![]]);
}

#[test]
fn classification_examples() {
    assert_eq!(classify_diagram(chain(vec![0], 1, vec![0], 1).poset()), DiagramClass::Chain);
    assert_eq!(classify_diagram(one_object(2).poset()), DiagramClass::Chain);
    assert_eq!(classify_diagram(square(2, 2).poset()), DiagramClass::SingleQuotient);
    assert_eq!(classify_diagram(diamond2().poset()), DiagramClass::General);
    assert_eq!(classify_diagram(&poset(&["a", "b", "c", "d"], &[("a", "c"), ("b", "d")])), DiagramClass::Forest);
    assert_eq!(classify_diagram(&poset(&["a", "b"], &[])), DiagramClass::Forest);
    assert_eq!(classify_diagram(&triangle()), DiagramClass::General);
    // a chain of shared quotients: b meets a in c, then d meets both in the principal ↓c
    assert_eq!(
        classify_diagram(&poset(&["a", "b", "d", "c"], &[("a", "c"), ("b", "c"), ("d", "c")])),
        DiagramClass::SingleQuotient
    );
}

#[test]
fn chain_glues_to_graph_measure() {
    let d = chain(vec![0, 1, 1, 2], 3, vec![0, 1, 1], 2);
    let chi = build_chi(&d).unwrap();
    let mu = Measure::new(vec![q(1, 2), q(1, 6), q(1, 6), q(1, 6)]).unwrap();
    let family = chi_apply(&chi, &mu).unwrap();
    let glued = glue_family(&d, &family).unwrap();
    assert_eq!(glued.method(), GlueMethod::Constructive);
    // the limit is the graph of X_a: element k carries μ_a(k)
    assert_eq!(glued.measure().unwrap(), &mu);
}

#[test]
fn square_glues_to_product() {
    let d = square(2, 2);
    let chi = build_chi(&d).unwrap();
    let family = chi_apply(&chi, &Measure::uniform(4)).unwrap();
    let glued = glue_family(&d, &family).unwrap();
    assert_eq!(glued, Glued::Constructive(Measure::uniform(4)));
    assert!(verify_glued(&d, &family, &glued));
}

#[test]
fn diamond2_family_is_infeasible() {
    let d = diamond2();
    let family = check_consistent_family(
        &d,
        vec![
            Measure::uniform(4),
            Measure::new(vec![q(1, 2), q(0, 1), q(0, 1), q(1, 2)]).unwrap(),
            Measure::uniform(2),
            Measure::uniform(2),
        ],
    )
    .unwrap();
    let glued = glue_family(&d, &family).unwrap();
    assert_eq!(glued.method(), GlueMethod::Infeasible);
    assert!(verify_glued(&d, &family, &glued));
    // a realizable family on the same diagram goes through the LP
    let chi = build_chi(&d).unwrap();
    let ok = chi_apply(&chi, &Measure::uniform(4)).unwrap();
    assert_eq!(glue_family(&d, &ok).unwrap().method(), GlueMethod::Lp);
}

#[test]
fn strategies_are_registered_and_selectable() {
    let r = gluing_strategies();
    assert_eq!(r.names(), vec!["constructive", "lp"]);
    let d = square(2, 3);
    let chi = build_chi(&d).unwrap();
    let family = chi_apply(&chi, &Measure::uniform(6)).unwrap();
    assert_eq!(glue_family_with(&d, &family, &["lp"]).unwrap().method(), GlueMethod::Lp);
    assert_eq!(
        glue_family_with(&d, &family, &["nope"]),
        Err(GlueError::UnknownStrategy("nope".into()))
    );
}

#[test]
fn inconsistent_family_is_an_error() {
    let d = square(2, 2);
    let other = build_chi(&diamond2()).unwrap();
    let family = chi_apply(&other, &Measure::uniform(4)).unwrap();
    assert!(matches!(glue_family(&d, &family), Err(GlueError::InconsistentFamily(_))));
}

#[test]
fn identity_lift_returns_tau0() {
    let d = square(2, 3);
    let chi = build_chi(&d).unwrap();
    let tau0 = Measure::new(vec![q(1, 12), q(1, 6), q(1, 4), q(1, 12), q(1, 3), q(1, 12)]).unwrap();
    let family = chi_apply(&chi, &tau0).unwrap();
    let ids = d.spaces().iter().map(|s| FinMap::identity(s.len())).collect();
    let m = DiagramMorphism::new(d.clone(), d.clone(), ids).unwrap();
    let lift = lift_diagram_morphism(&m, &tau0, &family).unwrap();
    assert_eq!(lift, Lift::Witness(tau0.clone()));
    assert!(verify_lift(&m, &tau0, &family, &lift));
}

#[test]
fn one_object_surjection_lift() {
    let d = one_object(3);
    let t = one_object(2);
    let f = FinMap::new(vec![0, 1, 1], 2).unwrap();
    let m = DiagramMorphism::new(d.clone(), t, vec![f.clone()]).unwrap();
    let mu = Measure::new(vec![q(1, 5), q(2, 5), q(2, 5)]).unwrap();
    let family = chi_apply(&build_chi(&d).unwrap(), &mu).unwrap();
    let tau0 = crate::measure::pushforward(&f, &mu).unwrap();
    let lift = lift_diagram_morphism(&m, &tau0, &family).unwrap();
    assert_eq!(lift, Lift::Witness(mu));
}

#[test]
fn collapsing_square_lift() {
    let d = square(3, 2);
    let t = square(2, 2);
    let components = vec![
        FinMap::new(vec![0, 1, 1], 2).unwrap(),
        FinMap::identity(2),
        FinMap::identity(1),
    ];
    let m = DiagramMorphism::new(d.clone(), t.clone(), components).unwrap();
    let tau = Measure::new(vec![q(1, 6), q(0, 1), q(1, 6), q(1, 3), q(1, 4), q(1, 12)]).unwrap();
    let family = chi_apply(&build_chi(&d).unwrap(), &tau).unwrap();
    let pushed = check_consistent_family(
        &t,
        m.components()
            .iter()
            .zip(family.components())
            .map(|(f, mu)| crate::measure::pushforward(f, mu).unwrap())
            .collect(),
    )
    .unwrap();
    // τ0: the product coupling of the pushed marginals, not the image of τ
    let tau0 = glue_family(&t, &pushed).unwrap().measure().unwrap().clone();
    let lift = lift_diagram_morphism(&m, &tau0, &family).unwrap();
    assert!(lift.witness().is_some());
    assert!(verify_lift(&m, &tau0, &family, &lift));
}

#[test]
fn precondition_and_naturality_failures() {
    let d = one_object(2);
    let m = DiagramMorphism::new(d.clone(), d.clone(), vec![FinMap::identity(2)]).unwrap();
    let family = chi_apply(&build_chi(&d).unwrap(), &Measure::dirac(2, 0)).unwrap();
    assert!(matches!(
        lift_diagram_morphism(&m, &Measure::dirac(2, 1), &family),
        Err(GlueError::PreconditionMismatch { .. })
    ));

    let c = chain(vec![0, 1], 2, vec![0, 1], 2);
    let swap = FinMap::new(vec![1, 0], 2).unwrap();
    let err = DiagramMorphism::new(c.clone(), c.clone(), vec![swap, FinMap::identity(2), FinMap::identity(2)]).unwrap_err();
    assert!(matches!(err, GlueError::NaturalityViolation { .. }));

    let p = Poset::new(&["a", "b"], &[("a", "b")]).unwrap();
    let other = Diagram::new(
        p,
        vec![FiniteSpace::numbered("a", 2), FiniteSpace::numbered("b", 1)],
        vec![SpaceMap { source: 0, target: 1, map: FinMap::constant(2, 1, 0) }],
    )
    .unwrap();
    assert!(matches!(
        DiagramMorphism::new(c, other, vec![]),
        Err(GlueError::ShapeMismatch(_))
    ));
}

#[test]
fn generated_lift_instances_have_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut done = 0;
    while done < 10 {
        let target = random_diagram_with_limit(3, 2, &mut rng);
        let Some(inst) = refinement_instance(&target, 2, &mut rng) else { continue };
        let lift = lift_diagram_morphism(&inst.morphism, &inst.tau0, &inst.family).unwrap();
        assert!(lift.witness().is_some());
        assert!(verify_lift(&inst.morphism, &inst.tau0, &inst.family, &lift));
        done += 1;
    }
}

#[test]
fn pullback_squares_glue_constructively() {
    for q_a in [vec![0, 0, 1], vec![0, 1, 1], vec![1, 1, 1]] {
        for q_b in [vec![0, 1], vec![1, 1], vec![0, 0, 1]] {
            let d = square_over(q_a.clone(), q_b.clone(), 2);
            let Ok(chi) = build_chi(&d) else { continue };
            let mut rng = ChaCha8Rng::seed_from_u64(q_a.len() as u64 * 7 + q_b.len() as u64);
            let family = chi_apply(&chi, &random_measure(chi.limit().len(), &mut rng)).unwrap();
            assert_eq!(glue_family(&d, &family).unwrap().method(), GlueMethod::Constructive);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_blocks_partition_non_maximal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = crate::generate::random_poset(6, &mut rng);
        let g = gamma_partition(&p);
        let mut seen: Vec<usize> = g.blocks.iter().flatten().copied().collect();
        seen.sort();
        let expected: Vec<usize> = (0..p.len()).filter(|&j| !p.is_maximal(j)).collect();
        prop_assert_eq!(seen, expected);
        for (m, block) in g.maximal_order.iter().zip(&g.blocks) {
            prop_assert!(block.iter().all(|&j| p.gt(*m, j)));
        }
    }

    #[test]
    fn constructive_classes_glue_constructively(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_diagram_with_limit(5, 3, &mut rng);
        let chi = build_chi(&d).unwrap();
        let family = chi_apply(&chi, &random_measure(chi.limit().len(), &mut rng)).unwrap();
        let glued = glue_family(&d, &family).unwrap();
        prop_assert_eq!(&glue_family(&d, &family).unwrap(), &glued);
        prop_assert!(verify_glued(&d, &family, &glued));
        if classify_diagram(d.poset()).is_constructive() {
            prop_assert_eq!(glued.method(), GlueMethod::Constructive);
        }
        prop_assert!(preimage_witness(&chi, &family).unwrap().witness().is_some());
    }
}
