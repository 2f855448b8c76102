//! Exact rational polyhedra: H- and V-representations, linear feasibility
//! with certificates, Fourier–Motzkin projection, double-description
//! conversion, tangent cones, and open-map certification for affine maps.

mod convert;
mod dd;
mod faces;
mod fm;
pub mod linalg;
mod lp;
mod openness;
mod sampled;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{dot, one, zero, Q};

pub use convert::{hull, image_polytope, vertex_enumeration};
pub use dd::{cone_generators, ConeGenerators};
pub use faces::{enumerate_faces, Face};
pub use fm::fm_project;
pub use lp::{lp_feasible, lp_maximize, FarkasCertificate, FeasibilityCertificate, LpOutcome};
pub use openness::{
    affine_map_is_open, check_image_equals, lift_system, tangent_cone, DirectionLift, FaceCertificate,
    OpennessOptions, OpennessVerdict, DEFAULT_FACE_BUDGET,
};
pub use sampled::{sampled_metric_openness, SampledOpenness};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("polytope is unbounded")]
    UnboundedInput,
    #[error("point lies outside the polytope")]
    PointOutside,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("affine map does not carry the domain onto the codomain")]
    NotSurjectiveOntoQ { witness: Vec<Q> },
    #[error("face enumeration exceeded the budget of {0} faces")]
    FaceBudgetExceeded(usize),
    #[error("polytope is empty")]
    Empty,
}

/// `coefficients · x (≤ | =) rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coefficients: Vec<Q>,
    pub rhs: Q,
}

impl Constraint {
    pub fn new(coefficients: Vec<Q>, rhs: Q) -> Self {
        Self { coefficients, rhs }
    }

    pub fn slack(&self, x: &[Q]) -> Q {
        &self.rhs - dot(&self.coefficients, x)
    }
}

/// `{x : A x ≤ b, E x = f}` with rational data.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HPolytope {
    dim: usize,
    inequalities: Vec<Constraint>,
    equations: Vec<Constraint>,
}

impl HPolytope {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            inequalities: Vec::new(),
            equations: Vec::new(),
        }
    }

    pub fn with_rows(dim: usize, inequalities: Vec<Constraint>, equations: Vec<Constraint>) -> Result<Self, PolytopeError> {
        let mut p = Self::new(dim);
        for c in inequalities {
            p.add_inequality(c.coefficients, c.rhs)?;
        }
        for c in equations {
            p.add_equation(c.coefficients, c.rhs)?;
        }
        Ok(p)
    }

    fn check_len(&self, len: usize) -> Result<(), PolytopeError> {
        if len != self.dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: self.dim,
                found: len,
            });
        }
        Ok(())
    }

    pub fn add_inequality(&mut self, coefficients: Vec<Q>, rhs: Q) -> Result<(), PolytopeError> {
        self.check_len(coefficients.len())?;
        self.inequalities.push(Constraint { coefficients, rhs });
        Ok(())
    }

    pub fn add_equation(&mut self, coefficients: Vec<Q>, rhs: Q) -> Result<(), PolytopeError> {
        self.check_len(coefficients.len())?;
        self.equations.push(Constraint { coefficients, rhs });
        Ok(())
    }

    /// The standard simplex `{x ≥ 0, Σ x = 1}` in `R^n`.
    pub fn simplex(n: usize) -> Self {
        let mut p = Self::new(n);
        for k in 0..n {
            p.inequalities.push(Constraint::new(unit(n, k, -1), zero()));
        }
        p.equations.push(Constraint::new(vec![one(); n], one()));
        p
    }

    /// The box `[lo, hi]^n`.
    pub fn cube(n: usize, lo: Q, hi: Q) -> Self {
        let mut p = Self::new(n);
        for k in 0..n {
            p.inequalities.push(Constraint::new(unit(n, k, -1), -lo.clone()));
            p.inequalities.push(Constraint::new(unit(n, k, 1), hi.clone()));
        }
        p
    }

    /// An H-system with no solutions.
    pub fn empty(dim: usize) -> Self {
        let mut p = Self::new(dim);
        p.inequalities.push(Constraint::new(vec![zero(); dim], -one()));
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Constraint] {
        &self.inequalities
    }

    pub fn equations(&self) -> &[Constraint] {
        &self.equations
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        x.len() == self.dim
            && self.inequalities.iter().all(|c| !c.slack(x).is_negative())
            && self.equations.iter().all(|c| c.slack(x).is_zero())
    }

    /// Indices of inequalities holding with equality at `x`.
    pub fn tight_inequalities(&self, x: &[Q]) -> Vec<usize> {
        (0..self.inequalities.len())
            .filter(|&k| self.inequalities[k].slack(x).is_zero())
            .collect()
    }

    pub fn is_feasible(&self) -> bool {
        matches!(lp_feasible(self), FeasibilityCertificate::Witness(_))
    }

    /// Boundedness by maximizing and minimizing each coordinate.
    pub fn is_bounded(&self) -> bool {
        (0..self.dim).all(|k| {
            [1, -1].iter().all(|&s| {
                !matches!(lp_maximize(self, &unit(self.dim, k, s)), LpOutcome::Unbounded { .. })
            })
        })
    }

    /// `self ⊆ other`, decided by one LP per row of `other`.
    pub fn is_subset_of(&self, other: &HPolytope) -> bool {
        if self.dim != other.dim {
            return false;
        }
        if !self.is_feasible() {
            return true;
        }
        let below = |a: &[Q], b: &Q| match lp_maximize(self, a) {
            LpOutcome::Optimal { value, .. } => &value <= b,
            LpOutcome::Unbounded { .. } => false,
            LpOutcome::Infeasible(_) => true,
        };
        other.inequalities.iter().all(|c| below(&c.coefficients, &c.rhs))
            && other.equations.iter().all(|c| {
                let neg: Vec<Q> = c.coefficients.iter().map(|v| -v).collect();
                below(&c.coefficients, &c.rhs) && below(&neg, &-c.rhs.clone())
            })
    }

    /// Same point set, by mutual containment.
    pub fn equivalent(&self, other: &HPolytope) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }
}

pub(crate) fn unit(n: usize, k: usize, sign: i64) -> Vec<Q> {
    let mut v = vec![zero(); n];
    v[k] = Q::from_integer(sign.into());
    v
}

/// A polytope as the convex hull of its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<Vec<Q>>,
}

impl VPolytope {
    /// Hull of `points`, keeping only extreme points, sorted.
    pub fn from_points(dim: usize, points: Vec<Vec<Q>>) -> Result<Self, PolytopeError> {
        for p in &points {
            if p.len() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
        }
        Ok(Self {
            dim,
            vertices: convert::extreme_points(points),
        })
    }

    pub(crate) fn from_vertices_unchecked(dim: usize, mut vertices: Vec<Vec<Q>>) -> Self {
        vertices.sort();
        vertices.dedup();
        Self { dim, vertices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Q>] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Membership in the hull by LP on convex weights.
    pub fn contains(&self, x: &[Q]) -> bool {
        convert::in_hull(&self.vertices, x).is_some()
    }
}

/// `x ↦ M x + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    matrix: Vec<Vec<Q>>,
    offset: Vec<Q>,
    source_dim: usize,
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<Q>>, offset: Vec<Q>, source_dim: usize) -> Result<Self, PolytopeError> {
        if offset.len() != matrix.len() {
            return Err(PolytopeError::DimensionMismatch {
                expected: matrix.len(),
                found: offset.len(),
            });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != source_dim) {
            return Err(PolytopeError::DimensionMismatch {
                expected: source_dim,
                found: row.len(),
            });
        }
        Ok(Self {
            matrix,
            offset,
            source_dim,
        })
    }

    pub fn linear(matrix: Vec<Vec<Q>>, source_dim: usize) -> Result<Self, PolytopeError> {
        let offset = vec![zero(); matrix.len()];
        Self::new(matrix, offset, source_dim)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: (0..n).map(|k| unit(n, k, 1)).collect(),
            offset: vec![zero(); n],
            source_dim: n,
        }
    }

    pub fn matrix(&self) -> &[Vec<Q>] {
        &self.matrix
    }

    pub fn offset(&self) -> &[Q] {
        &self.offset
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, c)| dot(row, x) + c)
            .collect()
    }

    /// The linear part applied to a direction.
    pub fn apply_linear(&self, d: &[Q]) -> Vec<Q> {
        linalg::mat_vec(&self.matrix, d)
    }
}

/// `{d : a·d ≤ 0 for each inequality row, a·d = 0 for each equation row}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhedralCone {
    pub dim: usize,
    pub inequalities: Vec<Vec<Q>>,
    pub equations: Vec<Vec<Q>>,
}

impl PolyhedralCone {
    pub fn contains(&self, d: &[Q]) -> bool {
        d.len() == self.dim
            && self.inequalities.iter().all(|a| !dot(a, d).is_positive())
            && self.equations.iter().all(|a| dot(a, d).is_zero())
    }

    /// Lineality basis and extreme rays.
    pub fn generators(&self) -> ConeGenerators {
        let flipped: Vec<Vec<Q>> = self
            .inequalities
            .iter()
            .map(|a| a.iter().map(|v| -v).collect())
            .collect();
        cone_generators(self.dim, &flipped, &self.equations)
    }

    /// Same cone, decided by checking each side's generators against the other.
    pub fn same_as(&self, other: &PolyhedralCone) -> bool {
        let within = |a: &PolyhedralCone, b: &PolyhedralCone| {
            let g = a.generators();
            g.rays.iter().all(|r| b.contains(r))
                && g.lineality.iter().all(|l| {
                    let neg: Vec<Q> = l.iter().map(|v| -v).collect();
                    b.contains(l) && b.contains(&neg)
                })
        };
        self.dim == other.dim && within(self, other) && within(other, self)
    }
}

#[cfg(test)]
mod proptests;
