//! `chi --check surjective|open|affine|all`.

use std::fmt::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use pchi::chi::{
    build_chi, chi_apply, chi_checks, AffinityReport, CheckOutcome, ChiMap, ChiOpenness, OpenOptions,
    OpennessTarget, SurjectivityReport,
};
use pchi::diagram::Diagram;
use pchi::glue::classify_diagram;
use pchi::measure::MarginalFamily;
use pchi::polytope::{
    check_image_equals, enumerate_faces, hull, image_polytope, lift_system, tangent_cone, vertex_enumeration,
    DirectionLift, Face, FaceCertificate, HPolytope, OpennessVerdict,
};
use pchi::rational::format_fraction;
use pchi::Q;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{OpenArgs, OpenSettings, Recheck};
use crate::document::{
    fractions, parse_fractions, CertificateDocument, DiagramDocument, FamilyDocument, LimitMeasureDocument,
};
use crate::error::{domain, parse, CliError};
use crate::report::{to_value, Output, Report};

#[derive(Debug, Args)]
pub struct ChiArgs {
    diagram: PathBuf,
    /// `surjective`, `open`, `affine` or `all`.
    #[arg(long, default_value = "all")]
    check: String,
    #[command(flatten)]
    open: OpenArgs,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiInputs {
    pub diagram: DiagramDocument,
    pub checks: Vec<String>,
    pub options: OpenSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexWitnessDocument {
    pub vertex: FamilyDocument,
    pub preimage: LimitMeasureDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnreachedDocument {
    pub vertex: FamilyDocument,
    pub certificate: CertificateDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurjectiveResult {
    /// `SURJECTIVE` or `NOT_SURJECTIVE`.
    pub verdict: String,
    pub vertex_count: usize,
    pub witnesses: Vec<VertexWitnessDocument>,
    pub unreached: Option<UnreachedDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftDocument {
    pub target: Vec<String>,
    pub lift: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceDocument {
    /// Domain vertex indices (limit elements) spanning the face.
    pub vertices: Vec<usize>,
    pub tight: Vec<usize>,
    pub point: Vec<String>,
    pub image: Vec<String>,
    pub lifts: Vec<LiftDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockedDocument {
    pub point: Vec<String>,
    pub direction: Vec<String>,
    pub certificate: CertificateDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledDocument {
    /// `None` when no sampled direction was constrained.
    pub modulus: Option<f64>,
    pub samples: usize,
    pub directions: usize,
    pub radius: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenResult {
    /// `OPEN` or `NOT_OPEN`.
    pub verdict: String,
    /// `codomain`, or `image` when χ is not onto its codomain.
    pub target: String,
    pub faces: Vec<FaceDocument>,
    pub blocked: Option<BlockedDocument>,
    pub sampled: SampledDocument,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineResult {
    /// `AFFINE` or `NOT_AFFINE`.
    pub verdict: String,
    pub zero_offset: bool,
    pub zero_one_entries: bool,
    pub one_per_column_per_block: bool,
    pub columns_match_pushforwards: bool,
    pub image_contained: bool,
    pub mixtures_checked: usize,
    pub mixtures_hold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiResults {
    pub class: String,
    pub limit_size: usize,
    pub codomain_dim: usize,
    pub surjective: Option<SurjectiveResult>,
    pub open: Option<OpenResult>,
    pub affine: Option<AffineResult>,
}

fn family_doc(chi: &ChiMap, f: &MarginalFamily) -> FamilyDocument {
    FamilyDocument::from_family(chi.diagram(), f)
}

pub fn surjective_result(chi: &ChiMap, r: &SurjectivityReport) -> SurjectiveResult {
    SurjectiveResult {
        verdict: if r.is_surjective() { "SURJECTIVE" } else { "NOT_SURJECTIVE" }.to_string(),
        vertex_count: r.vertex_count,
        witnesses: r
            .covered
            .iter()
            .map(|w| VertexWitnessDocument {
                vertex: family_doc(chi, &w.vertex),
                preimage: LimitMeasureDocument::from_measure(chi.diagram(), chi.limit(), &w.preimage),
            })
            .collect(),
        unreached: r.unreached.as_ref().map(|u| UnreachedDocument {
            vertex: family_doc(chi, &u.vertex),
            certificate: CertificateDocument::from_certificate(&u.certificate),
        }),
    }
}

fn open_result(o: &ChiOpenness, options: &OpenOptions) -> OpenResult {
    let (verdict, faces, blocked) = match &o.verdict {
        OpennessVerdict::Open { faces } => (
            "OPEN",
            faces
                .iter()
                .map(|c| FaceDocument {
                    vertices: c.face.vertices.clone(),
                    tight: c.face.tight.clone(),
                    point: fractions(&c.point),
                    image: fractions(&c.image),
                    lifts: c
                        .lifts
                        .iter()
                        .map(|l| LiftDocument {
                            target: fractions(&l.target),
                            lift: fractions(&l.lift),
                        })
                        .collect(),
                })
                .collect(),
            None,
        ),
        OpennessVerdict::NotOpen {
            point,
            direction,
            certificate,
            ..
        } => (
            "NOT_OPEN",
            Vec::new(),
            Some(BlockedDocument {
                point: fractions(point),
                direction: fractions(direction),
                certificate: CertificateDocument::from_certificate(certificate),
            }),
        ),
    };
    OpenResult {
        verdict: verdict.to_string(),
        target: match o.target {
            OpennessTarget::Codomain => "codomain",
            OpennessTarget::Image => "image",
        }
        .to_string(),
        faces,
        blocked,
        sampled: SampledDocument {
            modulus: o.sampled.modulus.is_finite().then_some(o.sampled.modulus),
            samples: o.sampled.samples,
            directions: o.sampled.directions,
            radius: format_fraction(&options.radius),
        },
    }
}

fn affine_result(a: &AffinityReport) -> AffineResult {
    AffineResult {
        verdict: if a.holds() { "AFFINE" } else { "NOT_AFFINE" }.to_string(),
        zero_offset: a.zero_offset,
        zero_one_entries: a.zero_one_entries,
        one_per_column_per_block: a.one_per_column_per_block,
        columns_match_pushforwards: a.columns_match_pushforwards,
        image_contained: a.image_contained,
        mixtures_checked: a.mixtures_checked,
        mixtures_hold: a.mixtures_hold,
    }
}

fn requested_checks(check: &str) -> Result<Vec<String>, CliError> {
    let registry = chi_checks();
    if check == "all" {
        return Ok(registry.names().iter().map(|s| s.to_string()).collect());
    }
    let mut out = Vec::new();
    for name in check.split(',').map(str::trim) {
        if registry.get(name).is_none() {
            return Err(CliError::Parse(format!(
                "unknown check `{name}`; expected one of {} or all",
                registry.names().join(", ")
            )));
        }
        out.push(name.to_string());
    }
    Ok(out)
}

pub fn run_checks(diagram: &Diagram, checks: &[String], options: &OpenOptions) -> Result<ChiResults, CliError> {
    let chi = build_chi(diagram).map_err(domain)?;
    let registry = chi_checks();
    let mut results = ChiResults {
        class: classify_diagram(diagram.poset()).as_str().to_string(),
        limit_size: chi.limit().len(),
        codomain_dim: chi.codomain_polytope().dim(),
        surjective: None,
        open: None,
        affine: None,
    };
    for name in checks {
        let check = registry.get(name).ok_or_else(|| CliError::Parse(format!("unknown check `{name}`")))?;
        match check.run(&chi, options).map_err(domain)? {
            CheckOutcome::Surjective(r) => results.surjective = Some(surjective_result(&chi, &r)),
            CheckOutcome::Open(o) => results.open = Some(open_result(&o, options)),
            CheckOutcome::Affine(a) => results.affine = Some(affine_result(&a)),
        }
    }
    Ok(results)
}

pub fn execute(args: &ChiArgs) -> Result<Output, CliError> {
    let started = Instant::now();
    let checks = requested_checks(&args.check)?;
    let options = args.open.settings()?;
    let diagram = DiagramDocument::read(&args.diagram)?.to_diagram()?;
    let results = run_checks(&diagram, &checks, &options.options()?)?;
    let inputs = ChiInputs {
        diagram: DiagramDocument::from_diagram(&diagram),
        checks,
        options,
    };
    let text = render(&results);
    Ok(Output {
        report: Report::new("chi", to_value(&inputs), to_value(&results), started),
        text,
    })
}

fn render(r: &ChiResults) -> String {
    let mut t = format!("chi: class {}, |lim| = {}, codomain dimension {}\n", r.class, r.limit_size, r.codomain_dim);
    if let Some(s) = &r.surjective {
        write!(t, "  surjective: {} ({} codomain vertices", s.verdict, s.vertex_count).unwrap();
        match &s.unreached {
            Some(_) => t.push_str(", Farkas certificate for an unreached vertex)\n"),
            None => t.push_str(", each with a preimage)\n"),
        }
    }
    if let Some(o) = &r.open {
        let modulus = o.sampled.modulus.map_or("unconstrained".to_string(), |m| format!("{m:.6}"));
        writeln!(
            t,
            "  open: {} onto the {} ({} face certificates; sampled modulus {} at radius {})",
            o.verdict,
            o.target,
            o.faces.len(),
            modulus,
            o.sampled.radius
        )
        .unwrap();
    }
    if let Some(a) = &r.affine {
        writeln!(t, "  affine: {} ({} mixtures checked)", a.verdict, a.mixtures_checked).unwrap();
    }
    t
}

fn vector(v: &[String]) -> Result<Vec<Q>, CliError> {
    parse_fractions(v)
}

fn recheck_surjective(chi: &ChiMap, s: &SurjectiveResult) -> Result<Vec<Recheck>, CliError> {
    let d = chi.diagram();
    let mut witnesses_ok = true;
    let mut found = Vec::new();
    for w in &s.witnesses {
        let vertex = w.vertex.to_family(d)?;
        let tau = w.preimage.to_measure(d, chi.limit())?;
        witnesses_ok &= chi_apply(chi, &tau).map_err(domain)? == vertex;
        found.push(vertex.stacked());
    }
    let vertices = vertex_enumeration(chi.codomain_polytope()).map_err(domain)?;
    let mut checks = vec![Recheck::new("each vertex preimage maps onto its vertex", witnesses_ok)];
    match (&s.unreached, s.verdict.as_str()) {
        (None, "SURJECTIVE") => {
            found.sort();
            checks.push(Recheck::new(
                "witnesses cover every codomain vertex",
                found == vertices.vertices() && s.vertex_count == vertices.vertices().len(),
            ));
        }
        (Some(u), "NOT_SURJECTIVE") => {
            let vertex = u.vertex.to_family(d)?;
            let cert = u.certificate.to_certificate()?;
            checks.push(Recheck::new(
                "unreached vertex certificate substitutes to a contradiction",
                cert.verify(&chi.preimage_system(&vertex.stacked())),
            ));
        }
        _ => checks.push(Recheck::new("surjectivity verdict matches its evidence", false)),
    }
    Ok(checks)
}

fn target_polytope(chi: &ChiMap, target: &str) -> Result<HPolytope, CliError> {
    match target {
        "codomain" => {
            check_image_equals(chi.map(), chi.domain_simplex(), chi.codomain_polytope()).map_err(domain)?;
            Ok(chi.codomain_polytope().clone())
        }
        "image" => {
            let image = image_polytope(chi.map(), &vertex_enumeration(chi.domain_simplex()).map_err(domain)?)
                .map_err(domain)?;
            Ok(hull(&image))
        }
        other => Err(CliError::Parse(format!("unknown openness target `{other}`"))),
    }
}

fn recheck_open(chi: &ChiMap, o: &OpenResult, face_budget: usize) -> Result<Vec<Recheck>, CliError> {
    let f = chi.map();
    let p = chi.domain_simplex();
    let q = target_polytope(chi, &o.target)?;
    match (&o.blocked, o.verdict.as_str()) {
        (None, "OPEN") => {
            let mut lifts_ok = true;
            let mut generated = true;
            for doc in &o.faces {
                let cert = FaceCertificate {
                    face: Face {
                        vertices: doc.vertices.clone(),
                        tight: doc.tight.clone(),
                    },
                    point: vector(&doc.point)?,
                    image: vector(&doc.image)?,
                    lifts: doc
                        .lifts
                        .iter()
                        .map(|l| Ok(DirectionLift { target: vector(&l.target)?, lift: vector(&l.lift)? }))
                        .collect::<Result<Vec<_>, CliError>>()?,
                };
                lifts_ok &= cert.verify(f, p);
                let Ok(cone) = tangent_cone(&q, &cert.image) else {
                    generated = false;
                    continue;
                };
                let g = cone.generators();
                let targets: Vec<&Vec<Q>> = cert.lifts.iter().map(|l| &l.target).collect();
                let has = |v: &Vec<Q>| targets.contains(&v);
                generated &= g.rays.iter().all(has)
                    && g.lineality.iter().all(|l| has(l) && has(&l.iter().map(|x| -x).collect()));
            }
            let vertices = vertex_enumeration(p).map_err(domain)?;
            let faces = enumerate_faces(p, &vertices, face_budget).map_err(domain)?;
            let covered = faces.iter().all(|face| o.faces.iter().any(|c| c.vertices == face.vertices));
            Ok(vec![
                Recheck::new("every lift lies in the domain tangent cone and maps onto its target", lifts_ok),
                Recheck::new("lift targets include the target tangent cone generators", generated),
                Recheck::new("every face of the domain has a certificate", covered),
            ])
        }
        (Some(b), "NOT_OPEN") => {
            let point = vector(&b.point)?;
            let direction = vector(&b.direction)?;
            let cert = b.certificate.to_certificate()?;
            let ok = lift_system(f, p, &point, &direction).is_ok_and(|sys| cert.verify(&sys))
                && tangent_cone(&q, &f.apply(&point)).is_ok_and(|c| c.contains(&direction));
            Ok(vec![Recheck::new("blocked direction certificate substitutes to a contradiction", ok)])
        }
        _ => Ok(vec![Recheck::new("openness verdict matches its evidence", false)]),
    }
}

pub fn verify(inputs: &Value, results: &Value) -> Result<Vec<Recheck>, CliError> {
    let inputs: ChiInputs = serde_json::from_value(inputs.clone()).map_err(parse)?;
    let results: ChiResults = serde_json::from_value(results.clone()).map_err(parse)?;
    let options = inputs.options.options()?;
    let d = inputs.diagram.to_diagram()?;
    let chi = build_chi(&d).map_err(domain)?;
    let mut checks = Vec::new();
    if let Some(s) = &results.surjective {
        checks.extend(recheck_surjective(&chi, s)?);
    }
    if let Some(o) = &results.open {
        checks.extend(recheck_open(&chi, o, options.face_budget)?);
    }
    if let Some(a) = &results.affine {
        let again = match chi_checks().get("affine").expect("registered").run(&chi, &options).map_err(domain)? {
            CheckOutcome::Affine(r) => affine_result(&r),
            _ => unreachable!("the affine check reports affinity"),
        };
        checks.push(Recheck::new("affinity checks reproduce", &again == a));
    }
    let requested = |name: &str| inputs.checks.iter().any(|c| c == name);
    checks.push(Recheck::new(
        "every requested check is reported",
        requested("surjective") == results.surjective.is_some()
            && requested("open") == results.open.is_some()
            && requested("affine") == results.affine.is_some(),
    ));
    Ok(checks)
}
