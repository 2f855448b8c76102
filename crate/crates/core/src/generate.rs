//! Seeded random instances: posets, diagrams, measures, cones.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chi::{build_chi, chi_apply};
use crate::diagram::{Cone, Diagram, FinMap, FiniteSpace, LimitSpace, Poset, SpaceMap};
use crate::glue::{glue_family, DiagramMorphism};
use crate::measure::{check_consistent_family, pushforward, MarginalFamily, Measure};

fn element_name(i: usize) -> String {
    let letters = b"abcdefghijklmnopqrstuvwxyz";
    if i < letters.len() {
        (letters[i] as char).to_string()
    } else {
        format!("x{i}")
    }
}

/// A random poset on `1..=max_elements` elements; each pair `i < j` is
/// related (`i ≥ j`) with probability one half, then closed transitively.
pub fn random_poset<R: Rng>(max_elements: usize, rng: &mut R) -> Poset {
    let n = rng.gen_range(1..=max_elements.max(1));
    let mut covers = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                covers.push((i, j));
            }
        }
    }
    Poset::from_indices((0..n).map(element_name).collect(), covers).expect("acyclic by construction")
}

/// One representative of every poset on `1..=max_elements` elements up to
/// isomorphism, ordered by size and then by relation set. Sizes above six
/// are not enumerated.
pub fn posets_up_to_isomorphism(max_elements: usize) -> Vec<Poset> {
    let mut out = Vec::new();
    for n in 1..=max_elements.min(6) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let perms = permutations(n);
        let mut seen: Vec<Vec<(usize, usize)>> = Vec::new();
        for mask in 0u32..(1 << pairs.len()) {
            let rel: Vec<(usize, usize)> = (0..pairs.len()).filter(|&k| mask >> k & 1 == 1).map(|k| pairs[k]).collect();
            let closed = rel.iter().all(|&(i, j)| {
                rel.iter().filter(|&&(a, _)| a == j).all(|&(_, k)| rel.contains(&(i, k)))
            });
            if !closed {
                continue;
            }
            let canonical = perms
                .iter()
                .map(|p| {
                    let mut r: Vec<(usize, usize)> = rel.iter().map(|&(i, j)| (p[i], p[j])).collect();
                    r.sort_unstable();
                    r
                })
                .min()
                .expect("at least one permutation");
            if !seen.contains(&canonical) {
                seen.push(canonical);
            }
        }
        seen.sort();
        out.extend(seen.into_iter().map(|rel| {
            Poset::from_indices((0..n).map(element_name).collect(), rel).expect("closed and acyclic")
        }));
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Compatible tuples over `members` (a down-closed set), coordinates in
/// `members` order.
fn sub_limit(poset: &Poset, sizes: &[usize], maps: &[SpaceMap], members: &[usize]) -> Vec<Vec<usize>> {
    let find = |i: usize, j: usize| maps.iter().find(|m| m.source == i && m.target == j).map(|m| &m.map);
    let mut out = Vec::new();
    let mut counter = vec![0usize; members.len()];
    if members.iter().any(|&m| sizes[m] == 0) {
        return out;
    }
    loop {
        let ok = members.iter().enumerate().all(|(a, &i)| {
            members.iter().enumerate().all(|(b, &j)| {
                !poset.gt(i, j) || find(i, j).is_some_and(|f| f.apply(counter[a]) == counter[b])
            })
        });
        if ok {
            out.push(counter.clone());
        }
        let mut k = 0;
        loop {
            if k == members.len() {
                return out;
            }
            counter[k] += 1;
            if counter[k] < sizes[members[k]] {
                break;
            }
            counter[k] = 0;
            k += 1;
        }
    }
}

/// A coherent diagram over `poset` with spaces of `1..=max_points` points.
/// Maps are drawn bottom-up: each point of `X_i` picks a compatible tuple of
/// the spaces strictly below `i`.
pub fn random_diagram_over<R: Rng>(poset: &Poset, max_points: usize, rng: &mut R) -> Diagram {
    draw_diagram(poset, None, max_points, false, rng)
}

/// Like [`random_diagram_over`], but each non-minimal space is drawn at least
/// as large as its set of compatible tuples below (capped by `max_points`)
/// and its points cover as many of those tuples as they can.
pub fn random_covering_diagram_over<R: Rng>(poset: &Poset, max_points: usize, rng: &mut R) -> Diagram {
    draw_diagram(poset, None, max_points, true, rng)
}

/// A random diagram over `poset` whose minimal spaces (in index order) have
/// the given sizes; maps are covering or uniform as in the two functions above.
pub fn random_diagram_with_minimal_sizes<R: Rng>(
    poset: &Poset,
    minimal_sizes: &[usize],
    max_points: usize,
    covering: bool,
    rng: &mut R,
) -> Diagram {
    draw_diagram(poset, Some(minimal_sizes), max_points, covering, rng)
}

/// Indices with nothing strictly below them.
pub fn minimal_elements(poset: &Poset) -> Vec<usize> {
    (0..poset.len()).filter(|&i| (0..poset.len()).all(|j| !poset.gt(i, j))).collect()
}

fn draw_diagram<R: Rng>(
    poset: &Poset,
    minimal_sizes: Option<&[usize]>,
    max_points: usize,
    covering: bool,
    rng: &mut R,
) -> Diagram {
    let max_points = max_points.max(1);
    let minimal = minimal_elements(poset);
    if let Some(fixed) = minimal_sizes {
        assert_eq!(fixed.len(), minimal.len(), "one size per minimal element");
    }
    loop {
        let mut sizes: Vec<usize> = (0..poset.len()).map(|_| rng.gen_range(1..=max_points)).collect();
        if let Some(fixed) = minimal_sizes {
            for (&m, &n) in minimal.iter().zip(fixed) {
                sizes[m] = n;
            }
        }
        let mut maps: Vec<SpaceMap> = Vec::new();
        let mut stuck = false;
        for i in poset.bottom_up() {
            let below: Vec<usize> = (0..poset.len()).filter(|&j| poset.gt(i, j)).collect();
            if below.is_empty() {
                continue;
            }
            let mut tuples = sub_limit(poset, &sizes, &maps, &below);
            if tuples.is_empty() {
                stuck = true;
                break;
            }
            let picks: Vec<&Vec<usize>> = if covering {
                sizes[i] = rng.gen_range(tuples.len().min(max_points)..=max_points);
                tuples.shuffle(rng);
                (0..sizes[i])
                    .map(|p| tuples.get(p).unwrap_or_else(|| tuples.choose(rng).expect("nonempty")))
                    .collect()
            } else {
                (0..sizes[i]).map(|_| tuples.choose(rng).expect("nonempty")).collect()
            };
            for (b, &j) in below.iter().enumerate() {
                let images = picks.iter().map(|t| t[b]).collect();
                maps.push(SpaceMap {
                    source: i,
                    target: j,
                    map: FinMap::new(images, sizes[j]).expect("tuple coordinates in range"),
                });
            }
        }
        if stuck {
            continue;
        }
        let spaces = (0..poset.len())
            .map(|i| FiniteSpace::numbered(poset.name(i), sizes[i]))
            .collect();
        return Diagram::new(poset.clone(), spaces, maps).expect("coherent by construction");
    }
}

pub fn random_diagram<R: Rng>(max_elements: usize, max_points: usize, rng: &mut R) -> Diagram {
    let poset = random_poset(max_elements, rng);
    random_diagram_over(&poset, max_points, rng)
}

/// A random diagram whose limit is nonempty.
pub fn random_diagram_with_limit<R: Rng>(max_elements: usize, max_points: usize, rng: &mut R) -> Diagram {
    loop {
        let d = random_diagram(max_elements, max_points, rng);
        if !d.limit().is_empty() {
            return d;
        }
    }
}

/// Rational weights from integer masses in `0..=6`, at least one positive;
/// sparse supports are common.
pub fn random_measure<R: Rng>(n: usize, rng: &mut R) -> Measure {
    loop {
        let masses: Vec<u64> = (0..n)
            .map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=6) })
            .collect();
        if let Some(m) = Measure::from_masses(&masses) {
            return m;
        }
    }
}

/// A cone with `apex_len` points, each sent to a random limit element.
pub fn random_cone<R: Rng>(diagram: &Diagram, limit: &LimitSpace, apex_len: usize, rng: &mut R) -> Cone {
    let images: Vec<usize> = (0..apex_len).map(|_| rng.gen_range(0..limit.len())).collect();
    cone_through(diagram, limit, images)
}

/// A cone whose characteristic map hits every limit element.
pub fn random_surjective_cone<R: Rng>(diagram: &Diagram, limit: &LimitSpace, extra: usize, rng: &mut R) -> Cone {
    let mut images: Vec<usize> = (0..limit.len()).collect();
    images.extend((0..extra).map(|_| rng.gen_range(0..limit.len())));
    images.shuffle(rng);
    cone_through(diagram, limit, images)
}

fn cone_through(diagram: &Diagram, limit: &LimitSpace, images: Vec<usize>) -> Cone {
    let apex = FiniteSpace::numbered("t", images.len());
    let legs = (0..diagram.len())
        .map(|i| {
            let coords = images.iter().map(|&e| limit.element(e)[i]).collect();
            FinMap::new(coords, diagram.space(i).len()).expect("limit coordinates in range")
        })
        .collect();
    Cone::new(diagram, apex, legs).expect("legs factor through the limit")
}

/// A morphism `D → D′` together with a family on `D` and a measure `τ0` on
/// `lim D′` meeting the lifting precondition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftInstance {
    pub morphism: DiagramMorphism,
    pub family: MarginalFamily,
    pub tau0: Measure,
}

/// Refines each space of `target` to `X′_i × {0..r_i}`; maps send `(x, k)`
/// to `(φ′(x), 0)` and the morphism forgets `k`. The family is `χ` of a
/// random measure; `τ0` is a gluing of its image family over `target`,
/// generally not the image of that measure.
pub fn refinement_instance<R: Rng>(target: &Diagram, max_extra: usize, rng: &mut R) -> Option<LiftInstance> {
    let poset = target.poset().clone();
    let extra: Vec<usize> = (0..poset.len()).map(|_| rng.gen_range(1..=max_extra.max(1))).collect();
    let spaces = (0..poset.len())
        .map(|i| {
            let labels: Vec<String> = target
                .space(i)
                .points()
                .iter()
                .flat_map(|p| (0..extra[i]).map(move |k| format!("{p}.{k}")))
                .collect();
            FiniteSpace::new(target.space(i).id(), labels).expect("distinct labels")
        })
        .collect();
    let maps = poset
        .strict_pairs()
        .into_iter()
        .map(|(i, j)| {
            let phi = target.map_ref(i, j).expect("strict pair");
            let images = (0..target.space(i).len() * extra[i])
                .map(|p| phi.apply(p / extra[i]) * extra[j])
                .collect();
            SpaceMap {
                source: i,
                target: j,
                map: FinMap::new(images, target.space(j).len() * extra[j]).expect("in range"),
            }
        })
        .collect();
    let source = Diagram::new(poset.clone(), spaces, maps).expect("refinement is coherent");
    let components = (0..poset.len())
        .map(|i| FinMap::new((0..source.space(i).len()).map(|p| p / extra[i]).collect(), target.space(i).len()).expect("in range"))
        .collect();
    let morphism = DiagramMorphism::new(source, target.clone(), components).expect("forgetting k is natural");
    let chi = build_chi(morphism.source()).ok()?;
    let tau = random_measure(chi.limit().len(), rng);
    let family = chi_apply(&chi, &tau).expect("measure on the limit");
    let pushed: Vec<Measure> = morphism
        .components()
        .iter()
        .zip(family.components())
        .map(|(f, mu)| pushforward(f, mu).expect("shapes match"))
        .collect();
    let pushed = check_consistent_family(target, pushed).expect("pushforward of a consistent family");
    let tau0 = glue_family(target, &pushed).ok()?.measure()?.clone();
    Some(LiftInstance { morphism, family, tau0 })
}
