//! `glue` and `lift`.

use std::fmt::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use pchi::chi::{build_chi, chi_apply};
use pchi::diagram::Diagram;
use pchi::glue::{
    classify_diagram, glue_family_with, lift_diagram_morphism, verify_glued, verify_lift, DiagramMorphism, GlueError,
    Glued, Lift,
};
use pchi::measure::{pushforward, MarginalFamily, Measure};
use pchi::rational::format_fraction;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::Recheck;
use crate::document::{
    CertificateDocument, DiagramDocument, FamilyDocument, LimitMeasureDocument, MorphismDocument,
};
use crate::error::{domain, parse, CliError};
use crate::report::{to_value, Output, Report};

#[derive(Debug, Args)]
pub struct GlueArgs {
    diagram: PathBuf,
    family: PathBuf,
    /// Gluing strategies to try in order (default: constructive, then lp).
    #[arg(long = "strategy")]
    strategies: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueInputs {
    pub diagram: DiagramDocument,
    pub family: FamilyDocument,
    pub strategies: Vec<String>,
}

/// One marginal of the witness compared with the prescribed measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalCheck {
    pub index: String,
    pub point: String,
    pub expected: String,
    pub found: String,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueResults {
    pub class: String,
    /// `CONSTRUCTIVE`, `LP` or `INFEASIBLE`.
    pub method: String,
    pub witness: Option<LimitMeasureDocument>,
    pub certificate: Option<CertificateDocument>,
    pub transcript: Vec<MarginalCheck>,
}

fn glue_error(e: GlueError) -> CliError {
    match e {
        GlueError::UnknownStrategy(_) => CliError::Parse(e.to_string()),
        e => domain(e),
    }
}

fn transcript(diagram: &Diagram, family: &MarginalFamily, tau: &Measure) -> Result<Vec<MarginalCheck>, CliError> {
    let chi = build_chi(diagram).map_err(domain)?;
    let found = chi_apply(&chi, tau).map_err(domain)?;
    let mut out = Vec::new();
    for i in 0..diagram.len() {
        for p in 0..diagram.space(i).len() {
            let (e, f) = (family.component(i).weight(p), found.component(i).weight(p));
            out.push(MarginalCheck {
                index: diagram.poset().name(i).to_string(),
                point: diagram.space(i).label(p).to_string(),
                expected: format_fraction(e),
                found: format_fraction(f),
                equal: e == f,
            });
        }
    }
    Ok(out)
}

pub fn execute_glue(args: &GlueArgs) -> Result<Output, CliError> {
    let started = Instant::now();
    let diagram = DiagramDocument::read(&args.diagram)?.to_diagram()?;
    let family = FamilyDocument::read(&args.family)?.to_family(&diagram)?;
    let strategies = if args.strategies.is_empty() {
        vec!["constructive".to_string(), "lp".to_string()]
    } else {
        args.strategies.clone()
    };
    let names: Vec<&str> = strategies.iter().map(String::as_str).collect();
    let glued = glue_family_with(&diagram, &family, &names).map_err(glue_error)?;
    let results = glue_results(&diagram, &family, &glued)?;
    let inputs = GlueInputs {
        diagram: DiagramDocument::from_diagram(&diagram),
        family: FamilyDocument::from_family(&diagram, &family),
        strategies,
    };
    let mut text = format!("glue: class {}, method {}\n", results.class, results.method);
    match (&results.witness, &results.certificate) {
        (Some(w), _) => {
            for m in &w.masses {
                let coords: Vec<String> = m.point.iter().map(|(i, x)| format!("{i}={x}")).collect();
                writeln!(text, "  {}  {}", m.mass, coords.join(" ")).unwrap();
            }
            let equal = results.transcript.iter().filter(|c| c.equal).count();
            writeln!(text, "  marginals re-checked: {equal}/{} equal", results.transcript.len()).unwrap();
        }
        (None, Some(_)) => text.push_str("  no gluing exists; Farkas certificate included in the JSON report\n"),
        (None, None) => {}
    }
    Ok(Output {
        report: Report::new("glue", to_value(&inputs), to_value(&results), started),
        text,
    })
}

fn glue_results(diagram: &Diagram, family: &MarginalFamily, glued: &Glued) -> Result<GlueResults, CliError> {
    let class = classify_diagram(diagram.poset()).as_str().to_string();
    let limit = diagram.limit();
    Ok(GlueResults {
        class,
        method: glued.method().as_str().to_string(),
        witness: glued.measure().map(|tau| LimitMeasureDocument::from_measure(diagram, &limit, tau)),
        certificate: match glued {
            Glued::Infeasible(c) => Some(CertificateDocument::from_certificate(c)),
            _ => None,
        },
        transcript: match glued.measure() {
            Some(tau) => transcript(diagram, family, tau)?,
            None => Vec::new(),
        },
    })
}

pub fn verify_glue(inputs: &Value, results: &Value) -> Result<Vec<Recheck>, CliError> {
    let inputs: GlueInputs = serde_json::from_value(inputs.clone()).map_err(parse)?;
    let results: GlueResults = serde_json::from_value(results.clone()).map_err(parse)?;
    let d = inputs.diagram.to_diagram()?;
    let family = inputs.family.to_family(&d)?;
    let limit = d.limit();
    let glued = match (results.method.as_str(), &results.witness, &results.certificate) {
        ("CONSTRUCTIVE", Some(w), None) => Glued::Constructive(w.to_measure(&d, &limit)?),
        ("LP", Some(w), None) => Glued::Lp(w.to_measure(&d, &limit)?),
        ("INFEASIBLE", None, Some(c)) => Glued::Infeasible(c.to_certificate()?),
        _ => return Ok(vec![Recheck::new("method tag matches its evidence", false)]),
    };
    let transcript_ok = match glued.measure() {
        Some(tau) => transcript(&d, &family, tau)? == results.transcript && results.transcript.iter().all(|c| c.equal),
        None => results.transcript.is_empty(),
    };
    Ok(vec![
        Recheck::new(
            match glued {
                Glued::Infeasible(_) => "certificate substitutes to a contradiction",
                _ => "witness reproduces every marginal",
            },
            verify_glued(&d, &family, &glued),
        ),
        Recheck::new("marginal transcript is exact", transcript_ok),
    ])
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    /// Diagram whose limit carries the lift.
    source: PathBuf,
    target: PathBuf,
    morphism: PathBuf,
    /// Measure on the target limit.
    tau0: PathBuf,
    /// Marginal family on the source diagram.
    family: PathBuf,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftInputs {
    pub source: DiagramDocument,
    pub target: DiagramDocument,
    pub morphism: MorphismDocument,
    pub tau0: LimitMeasureDocument,
    pub family: FamilyDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftResults {
    /// `WITNESS` or `INFEASIBLE`.
    pub outcome: String,
    pub witness: Option<LimitMeasureDocument>,
    pub certificate: Option<CertificateDocument>,
    pub marginals_match: Option<bool>,
    pub pushforward_matches: Option<bool>,
}

fn lift_results(m: &DiagramMorphism, tau0: &Measure, family: &MarginalFamily, lift: &Lift) -> Result<LiftResults, CliError> {
    let (source, target) = (m.source(), m.target());
    let limit = source.limit();
    Ok(match lift {
        Lift::Witness(tau) => {
            let chi = build_chi(source).map_err(domain)?;
            let induced = m.induced_map(&limit, &target.limit());
            LiftResults {
                outcome: "WITNESS".into(),
                witness: Some(LimitMeasureDocument::from_measure(source, &limit, tau)),
                certificate: None,
                marginals_match: Some(chi_apply(&chi, tau).map_err(domain)? == *family),
                pushforward_matches: Some(pushforward(&induced, tau).map_err(domain)? == *tau0),
            }
        }
        Lift::Infeasible(c) => LiftResults {
            outcome: "INFEASIBLE".into(),
            witness: None,
            certificate: Some(CertificateDocument::from_certificate(c)),
            marginals_match: None,
            pushforward_matches: None,
        },
    })
}

pub fn execute_lift(args: &LiftArgs) -> Result<Output, CliError> {
    let started = Instant::now();
    let source = DiagramDocument::read(&args.source)?.to_diagram()?;
    let target = DiagramDocument::read(&args.target)?.to_diagram()?;
    let morphism = MorphismDocument::read(&args.morphism)?.to_morphism(&source, &target)?;
    let tau0 = LimitMeasureDocument::read(&args.tau0)?.to_measure(&target, &target.limit())?;
    let family = FamilyDocument::read(&args.family)?.to_family(&source)?;
    let lift = lift_diagram_morphism(&morphism, &tau0, &family).map_err(glue_error)?;
    let results = lift_results(&morphism, &tau0, &family, &lift)?;
    let inputs = LiftInputs {
        source: DiagramDocument::from_diagram(&source),
        target: DiagramDocument::from_diagram(&target),
        morphism: MorphismDocument::from_morphism(&morphism),
        tau0: LimitMeasureDocument::from_measure(&target, &target.limit(), &tau0),
        family: FamilyDocument::from_family(&source, &family),
    };
    let mut text = format!("lift: {}\n", results.outcome);
    if let Some(w) = &results.witness {
        for m in &w.masses {
            let coords: Vec<String> = m.point.iter().map(|(i, x)| format!("{i}={x}")).collect();
            writeln!(text, "  {}  {}", m.mass, coords.join(" ")).unwrap();
        }
        writeln!(
            text,
            "  marginals match: {}; pushforward matches: {}",
            results.marginals_match == Some(true),
            results.pushforward_matches == Some(true)
        )
        .unwrap();
    }
    Ok(Output {
        report: Report::new("lift", to_value(&inputs), to_value(&results), started),
        text,
    })
}

pub fn verify_lift_report(inputs: &Value, results: &Value) -> Result<Vec<Recheck>, CliError> {
    let inputs: LiftInputs = serde_json::from_value(inputs.clone()).map_err(parse)?;
    let results: LiftResults = serde_json::from_value(results.clone()).map_err(parse)?;
    let source = inputs.source.to_diagram()?;
    let target = inputs.target.to_diagram()?;
    let morphism = inputs.morphism.to_morphism(&source, &target)?;
    let tau0 = inputs.tau0.to_measure(&target, &target.limit())?;
    let family = inputs.family.to_family(&source)?;
    let lift = match (results.outcome.as_str(), &results.witness, &results.certificate) {
        ("WITNESS", Some(w), None) => Lift::Witness(w.to_measure(&source, &source.limit())?),
        ("INFEASIBLE", None, Some(c)) => Lift::Infeasible(c.to_certificate()?),
        _ => return Ok(vec![Recheck::new("outcome matches its evidence", false)]),
    };
    let again = lift_results(&morphism, &tau0, &family, &lift)?;
    Ok(vec![
        Recheck::new(
            match lift {
                Lift::Witness(_) => "witness has the family as marginals and pushes forward to tau0",
                Lift::Infeasible(_) => "certificate substitutes to a contradiction",
            },
            verify_lift(&morphism, &tau0, &family, &lift),
        ),
        Recheck::new("reported conclusions reproduce", again == results),
    ])
}
