//! `validate` and `limit`.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;
use std::time::Instant;

use pchi::diagram::Diagram;
use pchi::glue::classify_diagram;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::Recheck;
use crate::document::{limit_point, DiagramDocument};
use crate::error::{parse, CliError};
use crate::report::{to_value, Output, Report};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramInputs {
    pub diagram: DiagramDocument,
}

impl DiagramInputs {
    pub fn load(path: &Path) -> Result<(Self, Diagram), CliError> {
        let diagram = DiagramDocument::read(path)?.to_diagram()?;
        Ok((
            Self {
                diagram: DiagramDocument::from_diagram(&diagram),
            },
            diagram,
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateResults {
    pub valid: bool,
    pub elements: usize,
    pub maximal: Vec<String>,
    pub total_points: usize,
    pub class: String,
}

fn validate_results(d: &Diagram) -> ValidateResults {
    let poset = d.poset();
    ValidateResults {
        valid: true,
        elements: d.len(),
        maximal: poset.maximal().iter().map(|&m| poset.name(m).to_string()).collect(),
        total_points: d.spaces().iter().map(|s| s.len()).sum(),
        class: classify_diagram(poset).as_str().to_string(),
    }
}

pub fn validate(path: &Path) -> Result<Output, CliError> {
    let started = Instant::now();
    let (inputs, d) = DiagramInputs::load(path)?;
    let results = validate_results(&d);
    let text = format!(
        "valid diagram: {} elements, {} points, maximal {}, class {}\n",
        results.elements,
        results.total_points,
        results.maximal.join(","),
        results.class
    );
    Ok(Output {
        report: Report::new("validate", to_value(&inputs), to_value(&results), started),
        text,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitElement {
    pub point: BTreeMap<String, String>,
    /// Labels at the maximal indices, in `maximal` order.
    pub maximal_coordinates: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitResults {
    pub size: usize,
    pub maximal: Vec<String>,
    pub elements: Vec<LimitElement>,
}

fn limit_results(d: &Diagram) -> LimitResults {
    let lim = d.limit();
    let maximal = lim.maximal().to_vec();
    LimitResults {
        size: lim.len(),
        maximal: maximal.iter().map(|&m| d.poset().name(m).to_string()).collect(),
        elements: lim
            .elements()
            .iter()
            .map(|t| LimitElement {
                point: limit_point(d, t),
                maximal_coordinates: maximal.iter().map(|&m| d.space(m).label(t[m]).to_string()).collect(),
            })
            .collect(),
    }
}

pub fn limit(path: &Path) -> Result<Output, CliError> {
    let started = Instant::now();
    let (inputs, d) = DiagramInputs::load(path)?;
    let results = limit_results(&d);
    let mut text = format!("limit: {} elements; embedding through ({})\n", results.size, results.maximal.join(", "));
    for e in &results.elements {
        let coords: Vec<String> = e.point.iter().map(|(i, x)| format!("{i}={x}")).collect();
        writeln!(text, "  {}  ->  ({})", coords.join(" "), e.maximal_coordinates.join(", ")).unwrap();
    }
    Ok(Output {
        report: Report::new("limit", to_value(&inputs), to_value(&results), started),
        text,
    })
}

pub fn verify(command: &str, inputs: &Value, results: &Value) -> Result<Vec<Recheck>, CliError> {
    let inputs: DiagramInputs = serde_json::from_value(inputs.clone()).map_err(parse)?;
    let d = inputs.diagram.to_diagram()?;
    let canonical = DiagramDocument::from_diagram(&d) == inputs.diagram;
    let same = match command {
        "validate" => serde_json::from_value::<ValidateResults>(results.clone()).map_err(parse)? == validate_results(&d),
        _ => serde_json::from_value::<LimitResults>(results.clone()).map_err(parse)? == limit_results(&d),
    };
    Ok(vec![
        Recheck::new("diagram parses and is canonical", canonical),
        Recheck::new(format!("{command} results reproduce"), same),
    ])
}
