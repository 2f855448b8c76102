use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_chi_open, check_chi_surjective, chi_apply, ChiError, ChiMap, ChiOpenness, OpenOptions, SurjectivityReport};
use crate::generate::random_measure;
use crate::measure::Measure;
use crate::rational::{q, Q};
use crate::registry::Registry;

/// Structural checks of χ as an affine map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinityReport {
    pub zero_offset: bool,
    pub zero_one_entries: bool,
    pub one_per_column_per_block: bool,
    /// Matrix columns are the families of point masses.
    pub columns_match_pushforwards: bool,
    pub image_contained: bool,
    pub mixtures_checked: usize,
    pub mixtures_hold: bool,
}

impl AffinityReport {
    pub fn holds(&self) -> bool {
        self.zero_offset
            && self.zero_one_entries
            && self.one_per_column_per_block
            && self.columns_match_pushforwards
            && self.image_contained
            && self.mixtures_hold
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CheckOutcome {
    Surjective(SurjectivityReport),
    Open(ChiOpenness),
    Affine(AffinityReport),
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        match self {
            Self::Surjective(r) => r.is_surjective(),
            Self::Open(o) => o.is_open(),
            Self::Affine(a) => a.holds(),
        }
    }
}

pub trait ChiCheck {
    fn run(&self, chi: &ChiMap, options: &OpenOptions) -> Result<CheckOutcome, ChiError>;
}

struct SurjectiveCheck;
struct OpenCheck;
struct AffineCheck;

impl ChiCheck for SurjectiveCheck {
    fn run(&self, chi: &ChiMap, _: &OpenOptions) -> Result<CheckOutcome, ChiError> {
        check_chi_surjective(chi).map(CheckOutcome::Surjective)
    }
}

impl ChiCheck for OpenCheck {
    fn run(&self, chi: &ChiMap, options: &OpenOptions) -> Result<CheckOutcome, ChiError> {
        check_chi_open(chi, options).map(CheckOutcome::Open)
    }
}

impl ChiCheck for AffineCheck {
    fn run(&self, chi: &ChiMap, options: &OpenOptions) -> Result<CheckOutcome, ChiError> {
        Ok(CheckOutcome::Affine(affinity_report(chi, options.seed)?))
    }
}

fn affinity_report(chi: &ChiMap, seed: u64) -> Result<AffinityReport, ChiError> {
    let m = chi.map().matrix();
    let cols = chi.limit().len();
    let zero_offset = chi.map().offset().iter().all(Zero::is_zero);
    let zero_one_entries = m.iter().flatten().all(|v| v.is_zero() || v.is_one());
    let one_per_column_per_block = (0..chi.diagram().len()).all(|i| {
        (0..cols).all(|c| m[chi.block(i)].iter().filter(|row| row[c].is_one()).count() == 1)
    });
    let mut columns_match_pushforwards = true;
    let mut image_contained = true;
    for c in 0..cols {
        let column: Vec<Q> = m.iter().map(|row| row[c].clone()).collect();
        columns_match_pushforwards &= chi_apply(chi, &Measure::dirac(cols, c))?.stacked() == column;
        image_contained &= chi.codomain_polytope().contains(&column);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts = [Q::zero(), q(1, 3), q(1, 2), Q::one()];
    let mut mixtures_hold = true;
    let rounds = 5;
    for _ in 0..rounds {
        let a = random_measure(cols, &mut rng);
        let b = random_measure(cols, &mut rng);
        let (fa, fb) = (chi_apply(chi, &a)?.stacked(), chi_apply(chi, &b)?.stacked());
        for t in &ts {
            let mixed = chi_apply(chi, &a.mix(t, &b).expect("same space"))?.stacked();
            let expected: Vec<Q> = fa.iter().zip(&fb).map(|(x, y)| t * x + (Q::one() - t) * y).collect();
            mixtures_hold &= mixed == expected;
        }
    }
    Ok(AffinityReport {
        zero_offset,
        zero_one_entries,
        one_per_column_per_block,
        columns_match_pushforwards,
        image_contained,
        mixtures_checked: rounds * ts.len(),
        mixtures_hold,
    })
}

/// The checks available to `chi --check`: `surjective`, `open`, `affine`.
pub fn chi_checks() -> Registry<dyn ChiCheck> {
    let mut r: Registry<dyn ChiCheck> = Registry::new();
    r.register("surjective", Box::new(SurjectiveCheck));
    r.register("open", Box::new(OpenCheck));
    r.register("affine", Box::new(AffineCheck));
    r
}
