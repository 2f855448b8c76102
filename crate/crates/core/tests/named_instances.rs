use pchi::chi::{
    build_chi, check_chi_open, check_chi_surjective, check_functor_preserves, chi_apply, chi_checks, preimage_witness,
    CheckOutcome, ChiCheck, ChiError, ChiMap, OpenOptions, OpennessTarget, Preimage,
};
use pchi::diagram::{Cone, Diagram, DiagramError, FinMap, FiniteSpace, Poset, SpaceMap};
use pchi::generate::refinement_instance;
use pchi::glue::{
    classify_diagram, glue_family, glue_family_with, lift_diagram_morphism, verify_glued, verify_lift, DiagramClass,
    DiagramMorphism, GlueError, GlueMethod, Glued, Lift,
};
use pchi::instances::{chain, diamond2, one_object, square, square_over};
use pchi::measure::{check_consistent_family, MarginalFamily, Measure};
use pchi::rational::{q, qi};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quick() -> OpenOptions {
    OpenOptions {
        samples: 10,
        ..OpenOptions::default()
    }
}

fn correlated_diamond_family() -> MarginalFamily {
    let half = q(1, 2);
    let b = Measure::new(vec![half.clone(), qi(0), qi(0), half]).unwrap();
    check_consistent_family(&diamond2(), vec![Measure::uniform(4), b, Measure::uniform(2), Measure::uniform(2)]).unwrap()
}

#[test]
fn one_object_marginalization_is_the_identity() {
    let chi = build_chi(&one_object(3)).unwrap();
    assert_eq!(chi.limit().len(), 3);
    for (r, row) in chi.map().matrix().iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            assert_eq!(*v, if r == c { qi(1) } else { qi(0) });
        }
    }
    let report = check_chi_surjective(&chi).unwrap();
    assert!(report.is_surjective());
    assert_eq!(report.vertex_count, 3);
}

#[test]
fn square_with_point_quotient_is_onto_and_open() {
    let chi = build_chi(&square(2, 2)).unwrap();
    assert_eq!(chi.limit().len(), 4);
    let report = check_chi_surjective(&chi).unwrap();
    // codomain vertices are pairs of point masses
    assert_eq!(report.vertex_count, 4);
    assert!(report.is_surjective() && report.verify(&chi));
    let open = check_chi_open(&chi, &quick()).unwrap();
    assert_eq!(open.target, OpennessTarget::Codomain);
    assert!(open.is_open() && open.verify(&chi));
    assert!(open.sampled.modulus > 0.0);
}

#[test]
fn chain_limit_is_its_top_space() {
    let d = chain(vec![0, 1, 1], 2, vec![0, 0], 1);
    assert_eq!(classify_diagram(d.poset()), DiagramClass::Chain);
    let chi = build_chi(&d).unwrap();
    assert_eq!(chi.limit().len(), 3);
    assert!(check_chi_surjective(&chi).unwrap().is_surjective());
}

#[test]
fn diamond_is_not_onto() {
    let d = diamond2();
    let chi = build_chi(&d).unwrap();
    // the two top spaces must agree on both bits
    assert_eq!(chi.limit().len(), 4);
    let report = check_chi_surjective(&chi).unwrap();
    assert!(!report.is_surjective());
    assert!(report.verify(&chi));
    let open = check_chi_open(&chi, &quick()).unwrap();
    assert_eq!(open.target, OpennessTarget::Image);

    let family = correlated_diamond_family();
    match preimage_witness(&chi, &family).unwrap() {
        Preimage::Infeasible(cert) => assert!(cert.verify(&chi.preimage_system(&family.stacked()))),
        Preimage::Witness(w) => panic!("unexpected preimage {w:?}"),
    }
    let glued = glue_family(&d, &family).unwrap();
    assert_eq!(glued.method(), GlueMethod::Infeasible);
    assert!(verify_glued(&d, &family, &glued));
}

#[test]
fn disjoint_quotients_have_no_limit() {
    let d = square_over(vec![0], vec![1], 2);
    assert_eq!(build_chi(&d).unwrap_err(), ChiError::EmptyLimit);
}

#[test]
fn strategies_can_be_forced() {
    let d = square(2, 3);
    let chi = build_chi(&d).unwrap();
    let tau = Measure::new((1..=6).map(|k| q(k, 21)).collect()).unwrap();
    let family = chi_apply(&chi, &tau).unwrap();
    let lp = glue_family_with(&d, &family, &["lp"]).unwrap();
    assert!(matches!(lp, Glued::Lp(_)));
    assert!(verify_glued(&d, &family, &lp));
    let constructive = glue_family_with(&d, &family, &["constructive"]).unwrap();
    assert_eq!(chi_apply(&chi, constructive.measure().unwrap()).unwrap(), family);
    assert!(matches!(
        glue_family_with(&d, &family, &["sinkhorn"]),
        Err(GlueError::UnknownStrategy(_))
    ));
}

#[test]
fn refinement_lift_has_both_marginals() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let target = square(2, 2);
    let inst = refinement_instance(&target, 2, &mut rng).unwrap();
    let lift = lift_diagram_morphism(&inst.morphism, &inst.tau0, &inst.family).unwrap();
    assert!(lift.witness().is_some());
    assert!(verify_lift(&inst.morphism, &inst.tau0, &inst.family, &lift));
}

#[test]
fn limit_cone_survives_the_functor() {
    let d = square(2, 2);
    let limit = d.limit();
    let cone = Cone::limit_cone(&d, &limit);
    let verdict = check_functor_preserves(&cone, &d, &quick()).unwrap();
    assert!(verdict.preserved());
}

#[test]
fn incoherent_triangle_is_rejected() {
    let poset = Poset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
    let spaces = vec![
        FiniteSpace::numbered("a", 2),
        FiniteSpace::numbered("b", 2),
        FiniteSpace::numbered("c", 2),
    ];
    let map = |source, target, images: Vec<usize>| SpaceMap {
        source,
        target,
        map: FinMap::new(images, 2).unwrap(),
    };
    let maps = vec![map(0, 1, vec![0, 1]), map(1, 2, vec![0, 1]), map(0, 2, vec![1, 0])];
    let err = Diagram::new(poset, spaces, maps).unwrap_err();
    assert!(matches!(err, DiagramError::CoherenceViolation { .. }));
}

struct VertexCoverage;

impl ChiCheck for VertexCoverage {
    fn run(&self, chi: &ChiMap, _: &OpenOptions) -> Result<CheckOutcome, ChiError> {
        let report = check_chi_surjective(chi)?;
        Ok(CheckOutcome::Surjective(report))
    }
}

#[test]
fn registry_accepts_new_checks() {
    let mut checks = chi_checks();
    assert_eq!(checks.names(), vec!["surjective", "open", "affine"]);
    checks.register("coverage", Box::new(VertexCoverage));
    let chi = build_chi(&square(1, 2)).unwrap();
    let outcome = checks.get("coverage").unwrap().run(&chi, &quick()).unwrap();
    assert!(outcome.passed());
    for (name, check) in checks.iter() {
        assert!(check.run(&chi, &quick()).unwrap().passed(), "{name}");
    }
}

#[test]
fn lift_fails_where_marginalization_is_not_onto() {
    let source = diamond2();
    let poset = source.poset().clone();
    let spaces = (0..poset.len()).map(|i| FiniteSpace::numbered(poset.name(i), 1)).collect();
    let maps = poset
        .strict_pairs()
        .into_iter()
        .map(|(i, j)| SpaceMap {
            source: i,
            target: j,
            map: FinMap::constant(1, 1, 0),
        })
        .collect();
    let target = Diagram::new(poset, spaces, maps).unwrap();
    let components = source.spaces().iter().map(|s| FinMap::constant(s.len(), 1, 0)).collect();
    let morphism = DiagramMorphism::new(source, target, components).unwrap();
    let family = correlated_diamond_family();
    let tau0 = Measure::dirac(1, 0);
    let lift = lift_diagram_morphism(&morphism, &tau0, &family).unwrap();
    assert!(matches!(lift, Lift::Infeasible(_)));
    assert!(verify_lift(&morphism, &tau0, &family, &lift));
}
