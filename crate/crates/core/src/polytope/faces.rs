use std::collections::{BTreeSet, VecDeque};

use super::{HPolytope, PolytopeError, VPolytope};
use crate::rational::Q;

/// A nonempty face: the vertices it contains and the inequalities tight on it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub tight: Vec<usize>,
}

impl Face {
    /// Average of the face's vertices, a relative-interior point.
    pub fn barycenter(&self, vertices: &VPolytope) -> Vec<Q> {
        let k = Q::from_integer(self.vertices.len().into());
        let mut sum = vec![Q::from_integer(0.into()); vertices.dim()];
        for &v in &self.vertices {
            for (s, x) in sum.iter_mut().zip(&vertices.vertices()[v]) {
                *s += x;
            }
        }
        sum.into_iter().map(|s| s / &k).collect()
    }
}

/// All nonempty faces of `p`, from its vertex list, by closing vertex
/// incidence sets under intersection with single inequalities.
pub fn enumerate_faces(p: &HPolytope, vertices: &VPolytope, budget: usize) -> Result<Vec<Face>, PolytopeError> {
    if vertices.is_empty() {
        return Ok(Vec::new());
    }
    let incidence: Vec<BTreeSet<usize>> = vertices
        .vertices()
        .iter()
        .map(|v| p.tight_inequalities(v).into_iter().collect())
        .collect();
    let close = |members: Vec<usize>| -> Face {
        let mut tight = incidence[members[0]].clone();
        for &m in &members[1..] {
            tight = tight.intersection(&incidence[m]).copied().collect();
        }
        // the face is everything tight on the same rows
        let vertices: Vec<usize> = (0..incidence.len())
            .filter(|&v| tight.is_subset(&incidence[v]))
            .collect();
        Face {
            vertices,
            tight: tight.into_iter().collect(),
        }
    };
    let top = close((0..incidence.len()).collect());
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(top.vertices.clone());
    let mut faces = vec![top.clone()];
    let mut queue = VecDeque::from([top]);
    while let Some(face) = queue.pop_front() {
        for row in 0..p.inequalities().len() {
            if face.tight.binary_search(&row).is_ok() {
                continue;
            }
            let members: Vec<usize> = face
                .vertices
                .iter()
                .copied()
                .filter(|&v| incidence[v].contains(&row))
                .collect();
            if members.is_empty() {
                continue;
            }
            let sub = close(members);
            if seen.insert(sub.vertices.clone()) {
                if faces.len() >= budget {
                    return Err(PolytopeError::FaceBudgetExceeded(budget));
                }
                faces.push(sub.clone());
                queue.push_back(sub);
            }
        }
    }
    faces.sort_by(|a, b| a.vertices.len().cmp(&b.vertices.len()).then_with(|| a.vertices.cmp(&b.vertices)));
    Ok(faces)
}
