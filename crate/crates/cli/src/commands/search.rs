//! `search`: seeded diagrams within bounds, classified and checked.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Instant;

use clap::Args;
use pchi::chi::{build_chi, check_chi_open, check_chi_surjective, ChiError, OpenOptions};
use pchi::diagram::{Diagram, Poset};
use pchi::generate::{
    minimal_elements, posets_up_to_isomorphism, random_covering_diagram_over, random_diagram_over,
    random_diagram_with_minimal_sizes, random_poset,
};
use pchi::glue::classify_diagram;
use pchi::polytope::PolytopeError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{OpenSettings, Recheck};
use crate::document::{CertificateDocument, DiagramDocument, FamilyDocument};
use crate::error::{domain, parse, CliError};
use crate::report::{to_value, Output, Report};

/// Shapes are enumerated for posets of at most this many elements; larger
/// bounds draw a random poset per instance.
const ENUMERATED_ELEMENTS: usize = 5;

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    max_elements: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    max_points: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Instances whose domain has more faces than this are not certified for openness.
    #[arg(long, default_value_t = 255)]
    face_budget: usize,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value = "1/1000")]
    radius: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchInputs {
    pub max_elements: usize,
    pub max_points: usize,
    pub seed: u64,
    pub count: usize,
    pub options: OpenSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRow {
    pub index: usize,
    pub class: String,
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
    pub space_sizes: Vec<usize>,
    pub limit_size: usize,
    /// `SURJECTIVE`, `NOT_SURJECTIVE` or `EMPTY_LIMIT`.
    pub surjective: String,
    /// `OPEN`, `NOT_OPEN`, `BUDGET_EXCEEDED` or `EMPTY_LIMIT`.
    pub open: String,
    pub modulus: Option<f64>,
}

impl InstanceRow {
    fn total_points(&self) -> usize {
        self.space_sizes.iter().sum()
    }
}

/// The smallest instance whose characteristic map missed a vertex, with the
/// vertex and its certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegativeInstance {
    /// Always `instance-level`: a finding about this diagram only.
    pub label: String,
    pub index: usize,
    pub total_points: usize,
    pub class: String,
    pub diagram: DiagramDocument,
    pub vertex: FamilyDocument,
    pub certificate: CertificateDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchResults {
    pub instances: Vec<InstanceRow>,
    /// Class to verdict to count.
    pub surjective_summary: BTreeMap<String, BTreeMap<String, usize>>,
    pub open_summary: BTreeMap<String, BTreeMap<String, usize>>,
    pub minimal_not_surjective: Option<NegativeInstance>,
}

/// A poset with the sizes of its minimal spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub poset: Poset,
    pub minimal_sizes: Vec<usize>,
}

/// Every shape over the enumerated posets, ordered by the total size of the
/// minimal spaces, then poset, then sizes. Empty when the posets are not
/// enumerated.
pub fn shapes(max_elements: usize, max_points: usize) -> Vec<Shape> {
    if max_elements > ENUMERATED_ELEMENTS {
        return Vec::new();
    }
    let mut out: Vec<(usize, usize, Shape)> = Vec::new();
    for (p, poset) in posets_up_to_isomorphism(max_elements).into_iter().enumerate() {
        let k = minimal_elements(&poset).len();
        let mut sizes = vec![1; k];
        loop {
            out.push((sizes.iter().sum(), p, Shape { poset: poset.clone(), minimal_sizes: sizes.clone() }));
            let Some(pos) = sizes.iter().rposition(|&s| s < max_points) else {
                break;
            };
            sizes[pos] += 1;
            for s in &mut sizes[pos + 1..] {
                *s = 1;
            }
        }
    }
    out.sort_by(|a, b| (a.0, a.1, &a.2.minimal_sizes).cmp(&(b.0, b.1, &b.2.minimal_sizes)));
    out.into_iter().map(|(_, _, s)| s).collect()
}

/// The `k`-th instance, drawn from its own stream of the seeded generator.
/// Consecutive pairs share the next shape in the cyclic enumeration (or a
/// random poset when bounds are too large to enumerate); even instances use
/// covering maps, odd ones uniformly random maps.
pub fn instance(k: usize, shapes: &[Shape], max_elements: usize, max_points: usize, seed: u64) -> Diagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    let covering = k.is_multiple_of(2);
    if shapes.is_empty() {
        let poset = random_poset(max_elements, &mut rng);
        return if covering {
            random_covering_diagram_over(&poset, max_points, &mut rng)
        } else {
            random_diagram_over(&poset, max_points, &mut rng)
        };
    }
    let shape = &shapes[(k / 2) % shapes.len()];
    random_diagram_with_minimal_sizes(&shape.poset, &shape.minimal_sizes, max_points, covering, &mut rng)
}

fn evaluate(k: usize, d: &Diagram, options: &OpenOptions) -> Result<(InstanceRow, Option<NegativeInstance>), CliError> {
    let doc = DiagramDocument::from_diagram(d);
    let class = classify_diagram(d.poset()).as_str().to_string();
    let mut row = InstanceRow {
        index: k,
        class: class.clone(),
        elements: doc.elements.clone(),
        covers: doc.covers.clone(),
        space_sizes: d.spaces().iter().map(|s| s.len()).collect(),
        limit_size: 0,
        surjective: "EMPTY_LIMIT".into(),
        open: "EMPTY_LIMIT".into(),
        modulus: None,
    };
    let chi = match build_chi(d) {
        Ok(chi) => chi,
        Err(ChiError::EmptyLimit) => return Ok((row, None)),
        Err(e) => return Err(domain(e)),
    };
    row.limit_size = chi.limit().len();
    let report = check_chi_surjective(&chi).map_err(domain)?;
    row.surjective = if report.is_surjective() { "SURJECTIVE" } else { "NOT_SURJECTIVE" }.into();
    let negative = report.unreached.map(|u| NegativeInstance {
        label: "instance-level".into(),
        index: k,
        total_points: row.total_points(),
        class,
        diagram: doc,
        vertex: FamilyDocument::from_family(d, &u.vertex),
        certificate: CertificateDocument::from_certificate(&u.certificate),
    });
    let faces_fit = row.limit_size < 64 && (1u64 << row.limit_size) - 1 <= options.face_budget as u64;
    row.open = if faces_fit {
        match check_chi_open(&chi, options) {
            Ok(o) => {
                row.modulus = o.sampled.modulus.is_finite().then_some(o.sampled.modulus);
                if o.is_open() { "OPEN" } else { "NOT_OPEN" }.into()
            }
            Err(ChiError::Polytope(PolytopeError::FaceBudgetExceeded(_))) => "BUDGET_EXCEEDED".into(),
            Err(e) => return Err(domain(e)),
        }
    } else {
        "BUDGET_EXCEEDED".into()
    };
    Ok((row, negative))
}

fn summarize(rows: &[InstanceRow], verdict: impl Fn(&InstanceRow) -> &str) -> BTreeMap<String, BTreeMap<String, usize>> {
    let mut out: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for r in rows {
        *out.entry(r.class.clone()).or_default().entry(verdict(r).to_string()).or_default() += 1;
    }
    out
}

pub fn search(inputs: &SearchInputs) -> Result<SearchResults, CliError> {
    let options = inputs.options.options()?;
    let shapes = shapes(inputs.max_elements, inputs.max_points);
    let mut instances = Vec::with_capacity(inputs.count);
    let mut minimal: Option<NegativeInstance> = None;
    for k in 0..inputs.count {
        let d = instance(k, &shapes, inputs.max_elements, inputs.max_points, inputs.seed);
        let (row, negative) = evaluate(k, &d, &options)?;
        if let Some(n) = negative {
            if minimal.as_ref().is_none_or(|m| n.total_points < m.total_points) {
                minimal = Some(n);
            }
        }
        instances.push(row);
    }
    Ok(SearchResults {
        surjective_summary: summarize(&instances, |r| &r.surjective),
        open_summary: summarize(&instances, |r| &r.open),
        instances,
        minimal_not_surjective: minimal,
    })
}

pub fn execute(args: &SearchArgs) -> Result<Output, CliError> {
    let started = Instant::now();
    let radius = super::OpenArgs {
        face_budget: args.face_budget,
        samples: args.samples,
        radius: args.radius.clone(),
        seed: args.seed,
    }
    .settings()?;
    let inputs = SearchInputs {
        max_elements: args.max_elements as usize,
        max_points: args.max_points as usize,
        seed: args.seed,
        count: args.count,
        options: radius,
    };
    let results = search(&inputs)?;
    let text = render(&inputs, &results);
    Ok(Output {
        report: Report::new("search", to_value(&inputs), to_value(&results), started),
        text,
    })
}

fn render(inputs: &SearchInputs, r: &SearchResults) -> String {
    let mut t = format!(
        "search: {} instances, at most {} elements and {} points per space, seed {}\n",
        inputs.count, inputs.max_elements, inputs.max_points, inputs.seed
    );
    for (title, table) in [("surjectivity", &r.surjective_summary), ("openness", &r.open_summary)] {
        writeln!(t, "{title}:").unwrap();
        for (class, verdicts) in table {
            let cells: Vec<String> = verdicts.iter().map(|(v, n)| format!("{v} {n}")).collect();
            writeln!(t, "  {class:<16} {}", cells.join(", ")).unwrap();
        }
    }
    match &r.minimal_not_surjective {
        Some(n) => {
            writeln!(
                t,
                "smallest NOT_SURJECTIVE instance ({}): #{} with {} points, class {}",
                n.label, n.index, n.total_points, n.class
            )
            .unwrap();
            let doc = serde_json::to_string_pretty(&n.diagram).expect("documents serialize");
            for line in doc.lines() {
                writeln!(t, "  {line}").unwrap();
            }
        }
        None => t.push_str("no NOT_SURJECTIVE instance\n"),
    }
    t
}

pub fn verify(inputs: &Value, results: &Value) -> Result<Vec<Recheck>, CliError> {
    let inputs: SearchInputs = serde_json::from_value(inputs.clone()).map_err(parse)?;
    let results: SearchResults = serde_json::from_value(results.clone()).map_err(parse)?;
    let rows = &results.instances;
    let mut checks = vec![
        Recheck::new("one row per instance, in order", rows.len() == inputs.count && rows.iter().enumerate().all(|(k, r)| r.index == k)),
        Recheck::new(
            "summaries count the rows",
            results.surjective_summary == summarize(rows, |r| &r.surjective) && results.open_summary == summarize(rows, |r| &r.open),
        ),
    ];
    let smallest = rows.iter().filter(|r| r.surjective == "NOT_SURJECTIVE").map(InstanceRow::total_points).min();
    match &results.minimal_not_surjective {
        None => checks.push(Recheck::new("no row is NOT_SURJECTIVE", smallest.is_none())),
        Some(n) => {
            let d = n.diagram.to_diagram()?;
            let chi = build_chi(&d).map_err(domain)?;
            let vertex = n.vertex.to_family(&d)?;
            let cert = n.certificate.to_certificate()?;
            checks.push(Recheck::new(
                "smallest negative instance certificate substitutes to a contradiction",
                cert.verify(&chi.preimage_system(&vertex.stacked())),
            ));
            let row = rows.get(n.index);
            checks.push(Recheck::new(
                "smallest negative instance matches its row",
                n.label == "instance-level"
                    && row.is_some_and(|r| {
                        r.surjective == "NOT_SURJECTIVE"
                            && r.elements == n.diagram.elements
                            && r.covers == n.diagram.covers
                            && r.total_points() == n.total_points
                            && r.class == n.class
                    })
                    && smallest == Some(n.total_points),
            ));
        }
    }
    Ok(checks)
}
