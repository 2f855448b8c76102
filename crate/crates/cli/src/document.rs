//! JSON interchange documents. Points and indices are addressed by label;
//! all numbers are fraction strings such as `"2/3"`.

use std::collections::BTreeMap;
use std::path::Path;

use pchi::diagram::{Diagram, FinMap, FiniteSpace, LimitSpace, Poset, SpaceMap};
use pchi::glue::DiagramMorphism;
use pchi::measure::{check_consistent_family, MarginalFamily, Measure};
use pchi::polytope::FarkasCertificate;
use pchi::rational::{format_fraction, parse_fraction};
use pchi::Q;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{domain, parse, CliError};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| parse(format!("{}: {e}", path.display())))
}

pub fn fraction(text: &str) -> Result<Q, CliError> {
    parse_fraction(text).ok_or_else(|| parse(format!("`{text}` is not a fraction")))
}

pub fn fractions(values: &[Q]) -> Vec<String> {
    values.iter().map(format_fraction).collect()
}

pub fn parse_fractions(values: &[String]) -> Result<Vec<Q>, CliError> {
    values.iter().map(|v| fraction(v)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDocument {
    pub elements: Vec<String>,
    #[serde(default)]
    pub covers: Vec<(String, String)>,
    pub spaces: BTreeMap<String, Vec<String>>,
    /// `"i->j"` to a label map; maps of composite pairs may be omitted.
    #[serde(default)]
    pub maps: BTreeMap<String, BTreeMap<String, String>>,
}

fn split_key(key: &str) -> Result<(&str, &str), CliError> {
    key.split_once("->")
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| parse(format!("map key `{key}` is not of the form `i->j`")))
}

fn label_map(
    source: &FiniteSpace,
    target: &FiniteSpace,
    entries: &BTreeMap<String, String>,
    what: &str,
) -> Result<FinMap, CliError> {
    for from in entries.keys() {
        if source.position(from).is_none() {
            return Err(domain(format!("{what}: unknown point `{from}` of `{}`", source.id())));
        }
    }
    let images = source
        .points()
        .iter()
        .map(|p| {
            let to = entries
                .get(p)
                .ok_or_else(|| domain(format!("{what}: no image for point `{p}`")))?;
            target
                .position(to)
                .ok_or_else(|| domain(format!("{what}: unknown point `{to}` of `{}`", target.id())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    FinMap::new(images, target.len()).map_err(domain)
}

impl DiagramDocument {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn to_diagram(&self) -> Result<Diagram, CliError> {
        let poset = Poset::new(&self.elements, &self.covers).map_err(domain)?;
        if let Some(extra) = self.spaces.keys().find(|k| poset.index_of(k).is_none()) {
            return Err(domain(format!("space given for unknown element `{extra}`")));
        }
        let spaces = self
            .elements
            .iter()
            .map(|e| {
                let labels = self.spaces.get(e).ok_or_else(|| domain(format!("no space for element `{e}`")))?;
                FiniteSpace::new(e.clone(), labels.clone()).map_err(domain)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut given: BTreeMap<(usize, usize), FinMap> = BTreeMap::new();
        for (key, entries) in &self.maps {
            let (a, b) = split_key(key)?;
            let i = poset.index_of(a).ok_or_else(|| domain(format!("map `{key}`: unknown element `{a}`")))?;
            let j = poset.index_of(b).ok_or_else(|| domain(format!("map `{key}`: unknown element `{b}`")))?;
            given.insert((i, j), label_map(&spaces[i], &spaces[j], entries, &format!("map `{key}`"))?);
        }
        // strict pairs without a given map are filled in by composition
        let mut pairs = poset.strict_pairs();
        pairs.sort_by_key(|&(i, j)| (0..poset.len()).filter(|&k| poset.gt(i, k) && poset.gt(k, j)).count());
        for (i, j) in pairs {
            if given.contains_key(&(i, j)) {
                continue;
            }
            let via = (0..poset.len()).find_map(|k| Some(given.get(&(i, k))?.then(given.get(&(k, j))?)));
            match via {
                Some(f) => {
                    given.insert((i, j), f);
                }
                None => {
                    return Err(domain(format!(
                        "missing map {}->{}",
                        poset.name(i),
                        poset.name(j)
                    )))
                }
            }
        }
        let maps = given
            .into_iter()
            .map(|((source, target), map)| SpaceMap { source, target, map })
            .collect();
        Diagram::new(poset, spaces, maps).map_err(domain)
    }

    /// Canonical form: Hasse covers only, maps on covers only.
    pub fn from_diagram(diagram: &Diagram) -> Self {
        let poset = diagram.poset();
        let covers: Vec<(usize, usize)> = poset.hasse_covers();
        let name = |i: usize| poset.name(i).to_string();
        Self {
            elements: poset.elements().to_vec(),
            covers: covers.iter().map(|&(i, j)| (name(i), name(j))).collect(),
            spaces: (0..diagram.len())
                .map(|i| (name(i), diagram.space(i).points().to_vec()))
                .collect(),
            maps: covers
                .iter()
                .map(|&(i, j)| {
                    let f = diagram.map_ref(i, j).expect("cover is a strict pair");
                    let entries = (0..f.domain_len())
                        .map(|x| (diagram.space(i).label(x).to_string(), diagram.space(j).label(f.apply(x)).to_string()))
                        .collect();
                    (format!("{}->{}", name(i), name(j)), entries)
                })
                .collect(),
        }
    }
}

fn measure_on(space: &FiniteSpace, entries: &BTreeMap<String, String>, what: &str) -> Result<Measure, CliError> {
    let mut weights = vec![Q::from_integer(0.into()); space.len()];
    for (label, value) in entries {
        let p = space
            .position(label)
            .ok_or_else(|| domain(format!("{what}: unknown point `{label}`")))?;
        weights[p] = fraction(value)?;
    }
    Measure::new(weights).map_err(|e| domain(format!("{what}: {e}")))
}

/// The support only, so zero masses stay implicit.
fn measure_entries(space: &FiniteSpace, mu: &Measure) -> BTreeMap<String, String> {
    mu.support()
        .into_iter()
        .map(|p| (space.label(p).to_string(), format_fraction(mu.weight(p))))
        .collect()
}

/// One measure per index; omitted points carry zero mass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub measures: BTreeMap<String, BTreeMap<String, String>>,
}

impl FamilyDocument {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    /// Parses the measures without checking consistency.
    pub fn components(&self, diagram: &Diagram) -> Result<Vec<Measure>, CliError> {
        let poset = diagram.poset();
        if let Some(extra) = self.measures.keys().find(|k| poset.index_of(k).is_none()) {
            return Err(domain(format!("measure given for unknown element `{extra}`")));
        }
        (0..diagram.len())
            .map(|i| {
                let name = poset.name(i);
                let entries = self
                    .measures
                    .get(name)
                    .ok_or_else(|| domain(format!("no measure for element `{name}`")))?;
                measure_on(diagram.space(i), entries, &format!("measure at `{name}`"))
            })
            .collect()
    }

    pub fn to_family(&self, diagram: &Diagram) -> Result<MarginalFamily, CliError> {
        check_consistent_family(diagram, self.components(diagram)?).map_err(domain)
    }

    pub fn from_family(diagram: &Diagram, family: &MarginalFamily) -> Self {
        Self {
            measures: (0..diagram.len())
                .map(|i| (diagram.poset().name(i).to_string(), measure_entries(diagram.space(i), family.component(i))))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mass {
    /// Labels by index; the maximal indices suffice to name a limit element.
    pub point: BTreeMap<String, String>,
    pub mass: String,
}

/// A measure on the limit, listed by support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitMeasureDocument {
    pub masses: Vec<Mass>,
}

impl LimitMeasureDocument {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn to_measure(&self, diagram: &Diagram, limit: &LimitSpace) -> Result<Measure, CliError> {
        let mut weights = vec![Q::from_integer(0.into()); limit.len()];
        let mut seen = vec![false; limit.len()];
        for m in &self.masses {
            let mut fixed = Vec::new();
            for (index, label) in &m.point {
                let i = diagram
                    .index_of(index)
                    .map_err(|_| domain(format!("limit point names unknown element `{index}`")))?;
                let p = diagram
                    .space(i)
                    .position(label)
                    .ok_or_else(|| domain(format!("limit point: unknown point `{label}` of `{index}`")))?;
                fixed.push((i, p));
            }
            let matches: Vec<usize> = (0..limit.len())
                .filter(|&k| fixed.iter().all(|&(i, p)| limit.element(k)[i] == p))
                .collect();
            let k = match matches.as_slice() {
                [k] => *k,
                [] => return Err(domain(format!("{:?} is not a limit element", m.point))),
                _ => return Err(domain(format!("{:?} names more than one limit element", m.point))),
            };
            if std::mem::replace(&mut seen[k], true) {
                return Err(domain(format!("{:?} listed twice", m.point)));
            }
            weights[k] = fraction(&m.mass)?;
        }
        Measure::new(weights).map_err(|e| domain(format!("limit measure: {e}")))
    }

    /// Support in limit order, full tuples.
    pub fn from_measure(diagram: &Diagram, limit: &LimitSpace, tau: &Measure) -> Self {
        Self {
            masses: tau
                .support()
                .into_iter()
                .map(|k| Mass {
                    point: limit_point(diagram, limit.element(k)),
                    mass: format_fraction(tau.weight(k)),
                })
                .collect(),
        }
    }
}

pub fn limit_point(diagram: &Diagram, tuple: &[usize]) -> BTreeMap<String, String> {
    tuple
        .iter()
        .enumerate()
        .map(|(i, &p)| (diagram.poset().name(i).to_string(), diagram.space(i).label(p).to_string()))
        .collect()
}

/// Component maps `X_i → X′_i` by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDocument {
    pub components: BTreeMap<String, BTreeMap<String, String>>,
}

impl MorphismDocument {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn to_morphism(&self, source: &Diagram, target: &Diagram) -> Result<DiagramMorphism, CliError> {
        let poset = source.poset();
        let components = (0..source.len())
            .map(|i| {
                let name = poset.name(i);
                let entries = self
                    .components
                    .get(name)
                    .ok_or_else(|| domain(format!("no component map for element `{name}`")))?;
                label_map(source.space(i), target.space(i), entries, &format!("component `{name}`"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        DiagramMorphism::new(source.clone(), target.clone(), components).map_err(domain)
    }

    pub fn from_morphism(m: &DiagramMorphism) -> Self {
        let (s, t) = (m.source(), m.target());
        Self {
            components: m
                .components()
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let entries = (0..f.domain_len())
                        .map(|x| (s.space(i).label(x).to_string(), t.space(i).label(f.apply(x)).to_string()))
                        .collect();
                    (s.poset().name(i).to_string(), entries)
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub inequality_multipliers: Vec<String>,
    pub equation_multipliers: Vec<String>,
}

impl CertificateDocument {
    pub fn from_certificate(c: &FarkasCertificate) -> Self {
        Self {
            inequality_multipliers: fractions(&c.inequality_multipliers),
            equation_multipliers: fractions(&c.equation_multipliers),
        }
    }

    pub fn to_certificate(&self) -> Result<FarkasCertificate, CliError> {
        Ok(FarkasCertificate {
            inequality_multipliers: parse_fractions(&self.inequality_multipliers)?,
            equation_multipliers: parse_fractions(&self.equation_multipliers)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pchi::generate::{random_diagram, random_measure};
    use pchi::instances::{chain, diamond2, square};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_round_trip() {
        for d in [square(2, 3), diamond2(), chain(vec![0, 1, 1], 2, vec![0, 0], 1)] {
            let doc = DiagramDocument::from_diagram(&d);
            let back = doc.to_diagram().unwrap();
            assert_eq!(back, d);
            let text = serde_json::to_string(&doc).unwrap();
            let reparsed: DiagramDocument = serde_json::from_str(&text).unwrap();
            assert_eq!(reparsed, doc);
            assert_eq!(DiagramDocument::from_diagram(&back), doc);
        }
    }

    proptest! {
        #[test]
        fn random_documents_round_trip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_diagram(4, 3, &mut rng);
            let doc = DiagramDocument::from_diagram(&d);
            let text = serde_json::to_string(&doc).unwrap();
            let back = serde_json::from_str::<DiagramDocument>(&text).unwrap().to_diagram().unwrap();
            prop_assert_eq!(&back, &d);
            let lim = d.limit();
            if !lim.is_empty() {
                let tau = random_measure(lim.len(), &mut rng);
                let chi = pchi::chi::build_chi(&d).unwrap();
                let family = pchi::chi::chi_apply(&chi, &tau).unwrap();
                let fdoc = FamilyDocument::from_family(&d, &family);
                prop_assert_eq!(fdoc.to_family(&d).unwrap(), family);
                let tdoc = LimitMeasureDocument::from_measure(&d, &lim, &tau);
                prop_assert_eq!(tdoc.to_measure(&d, &lim).unwrap(), tau);
            }
        }
    }

    #[test]
    fn composite_maps_are_derived() {
        let d = chain(vec![0, 1, 1], 2, vec![0, 1], 2);
        let doc = DiagramDocument::from_diagram(&d);
        assert!(!doc.maps.contains_key("a->c"));
        assert_eq!(doc.to_diagram().unwrap().map(0, 2), d.map(0, 2));
    }

    #[test]
    fn bad_key_is_a_parse_error() {
        let mut doc = DiagramDocument::from_diagram(&square(1, 1));
        doc.maps.insert("a=>c".into(), BTreeMap::new());
        assert_eq!(doc.to_diagram().unwrap_err().exit_code(), 3);
    }

    #[test]
    fn limit_measures_by_maximal_coordinates() {
        let d = square(2, 2);
        let lim = d.limit();
        let doc: LimitMeasureDocument = serde_json::from_str(
            r#"{"masses": [{"point": {"a": "0", "b": "1"}, "mass": "1/3"}, {"point": {"a": "1", "b": "1", "c": "*"}, "mass": "2/3"}]}"#,
        )
        .unwrap();
        let tau = doc.to_measure(&d, &lim).unwrap();
        assert_eq!(tau.weights()[1], pchi::rational::q(1, 3));
        let back = LimitMeasureDocument::from_measure(&d, &lim, &tau);
        assert_eq!(back.to_measure(&d, &lim).unwrap(), tau);
    }
}
