//! Double-description conversion of `{x : A x ≥ 0, E x = 0}` into a lineality
//! basis plus extreme rays.
//!
//! Rows are scaled to integers up front and all ray arithmetic stays in
//! primitive integer vectors. Adjacency uses the combinatorial test: two rays
//! are adjacent iff no third ray is tight on every constraint both are tight on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Q;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConeGenerators {
    pub lineality: Vec<Vec<Q>>,
    pub rays: Vec<Vec<Q>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64).max(1)])
    }

    fn full(n: usize, upto: usize) -> Self {
        let mut b = Self::new(n);
        for k in 0..upto {
            b.insert(k);
        }
        b
    }

    fn insert(&mut self, k: usize) {
        self.0[k / 64] |= 1 << (k % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray {
    v: Vec<BigInt>,
    zero: Bits,
}

fn integer_row(row: &[Q]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut v: Vec<BigInt> = row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    normalize(&mut v);
    v
}

fn normalize(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// `alpha·u − beta·w`, normalized.
fn combine(alpha: &BigInt, u: &[BigInt], beta: &BigInt, w: &[BigInt]) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = u.iter().zip(w).map(|(x, y)| alpha * x - beta * y).collect();
    normalize(&mut out);
    out
}

fn to_q(v: Vec<BigInt>) -> Vec<Q> {
    v.into_iter().map(Q::from_integer).collect()
}

/// Generators of `{x ∈ R^dim : a·x ≥ 0 for a in inequalities, e·x = 0 for e in equations}`.
pub fn cone_generators(dim: usize, inequalities: &[Vec<Q>], equations: &[Vec<Q>]) -> ConeGenerators {
    let rows: Vec<(Vec<BigInt>, bool)> = equations
        .iter()
        .map(|e| (integer_row(e), true))
        .chain(inequalities.iter().map(|a| (integer_row(a), false)))
        .collect();
    let total = rows.len();
    let mut lineality: Vec<Vec<BigInt>> = (0..dim)
        .map(|k| {
            let mut v = vec![BigInt::zero(); dim];
            v[k] = BigInt::one();
            v
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, (a, is_eq)) in rows.iter().enumerate() {
        if let Some(p) = lineality.iter().position(|l| !idot(a, l).is_zero()) {
            let mut l = lineality.remove(p);
            let mut al = idot(a, &l);
            if al.is_negative() {
                for x in l.iter_mut() {
                    *x = -&*x;
                }
                al = -al;
            }
            for other in lineality.iter_mut() {
                let c = idot(a, other);
                if !c.is_zero() {
                    *other = combine(&al, other, &c, &l);
                }
            }
            for r in rays.iter_mut() {
                let c = idot(a, &r.v);
                if !c.is_zero() {
                    r.v = combine(&al, &r.v, &c, &l);
                }
                r.zero.insert(k);
            }
            if !is_eq {
                rays.push(Ray {
                    v: l,
                    zero: Bits::full(total, k),
                });
            }
            continue;
        }

        let signs: Vec<BigInt> = rays.iter().map(|r| idot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| signs[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| signs[i].is_negative()).collect();
        let min_tight = dim.saturating_sub(lineality.len() + 2);
        let mut fresh = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zero.and(&rays[n].zero);
                if common.count() < min_tight {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(i, r)| i != p && i != n && common.subset_of(&r.zero));
                if blocked {
                    continue;
                }
                let v = combine(&signs[p], &rays[n].v, &signs[n], &rays[p].v);
                let mut zero = common;
                zero.insert(k);
                fresh.push(Ray { v, zero });
            }
        }
        let mut next = Vec::with_capacity(rays.len() + fresh.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if signs[i].is_zero() {
                r.zero.insert(k);
                next.push(r);
            } else if signs[i].is_positive() && !is_eq {
                next.push(r);
            }
        }
        next.extend(fresh);
        rays = next;
    }

    let mut rays: Vec<Vec<BigInt>> = rays.into_iter().map(|r| r.v).collect();
    rays.sort();
    rays.dedup();
    ConeGenerators {
        lineality: lineality.into_iter().map(to_q).collect(),
        rays: rays.into_iter().map(to_q).collect(),
    }
}
