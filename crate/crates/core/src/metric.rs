//! Finite metric spaces with exact distances: closed forms for the generated
//! families, validated matrices otherwise. Distances are integers at a fixed
//! scale so every bound comparison is exact.

use crate::error::{Error, Result};
use crate::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
enum Shape {
    /// 0..n in a line, unit steps.
    Path { n: usize },
    /// side x side points, row-major, Manhattan distance.
    Grid { side: usize },
    /// Complete rooted binary tree of the given depth, heap-indexed, edge
    /// distance.
    Tree { depth: usize },
    /// Explicit scaled matrix, row-major.
    Matrix { n: usize, dist: Vec<u64> },
    /// Ball of a permutation group under the word metric. Distances live in
    /// the table, indexed by the permutation pair's quotient.
    CayleyBall {
        elements: Vec<Vec<usize>>,
        word_length: BTreeMap<Vec<usize>, u64>,
    },
}

/// A finite metric space. `dist` returns scale-multiplied integers; for the
/// generated families the scale is 1.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    shape: Shape,
    scale: u64,
}

impl FiniteMetricSpace {
    pub fn path(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("empty space".into()));
        }
        Ok(FiniteMetricSpace { shape: Shape::Path { n }, scale: 1 })
    }

    pub fn grid(side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::Invalid("empty space".into()));
        }
        Ok(FiniteMetricSpace { shape: Shape::Grid { side }, scale: 1 })
    }

    pub fn tree(depth: usize) -> Result<Self> {
        Ok(FiniteMetricSpace { shape: Shape::Tree { depth }, scale: 1 })
    }

    /// Validates the axioms and clears denominators: the stored scale is the
    /// least common multiple of the entries' denominators.
    pub fn from_matrix(entries: &[Vec<Rational>]) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::Invalid("empty space".into()));
        }
        if entries.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(n, entries[0].len(), n, n));
        }
        let mut scale_int = BigInt::from(1);
        for row in entries {
            for v in row {
                if v.is_negative() {
                    return Err(Error::Invalid("negative distance".into()));
                }
                scale_int = lcm(&scale_int, v.denom());
            }
        }
        let scale = scale_int
            .to_u64()
            .ok_or_else(|| Error::Invalid("denominators overflow the scale".into()))?;
        let mut dist = vec![0u64; n * n];
        for (i, row) in entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let scaled = v * Rational::from_integer(scale_int.clone());
                debug_assert!(scaled.is_integer());
                dist[i * n + j] = scaled
                    .numer()
                    .to_u64()
                    .ok_or_else(|| Error::Invalid("distance overflows".into()))?;
            }
        }
        for i in 0..n {
            if dist[i * n + i] != 0 {
                return Err(Error::Invalid(format!("nonzero self-distance at {i}")));
            }
            for j in 0..n {
                if dist[i * n + j] != dist[j * n + i] {
                    return Err(Error::Invalid(format!("asymmetric distance at ({i},{j})")));
                }
                if i != j && dist[i * n + j] == 0 {
                    return Err(Error::Invalid(format!("distinct points {i},{j} at distance 0")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i * n + j] > dist[i * n + k] + dist[k * n + j] {
                        return Err(Error::Invalid(format!(
                            "triangle inequality fails via {k} for ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { shape: Shape::Matrix { n, dist }, scale })
    }

    /// Ball of the given radius in the group generated by the permutations,
    /// under the word metric. Generators act on 0..degree-1 and must be
    /// bijections; `cap` bounds the closure.
    pub fn cayley_ball(generators: &[Vec<usize>], radius: usize, cap: usize) -> Result<Self> {
        let degree = generators
            .first()
            .ok_or_else(|| Error::Invalid("no generators".into()))?
            .len();
        let mut gens = Vec::new();
        for g in generators {
            if g.len() != degree {
                return Err(Error::Invalid("generators act on different sets".into()));
            }
            let mut seen = vec![false; degree];
            for &v in g {
                if v >= degree || seen[v] {
                    return Err(Error::NotBijective);
                }
                seen[v] = true;
            }
            gens.push(g.clone());
            gens.push(invert_perm(g));
        }
        let identity: Vec<usize> = (0..degree).collect();
        // word lengths out to twice the radius cover every quotient of two
        // ball elements
        let mut word_length: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        word_length.insert(identity.clone(), 0);
        let mut frontier = vec![identity.clone()];
        for len in 1..=(2 * radius as u64) {
            let mut next = Vec::new();
            for p in &frontier {
                for g in &gens {
                    let q = compose_perm(p, g);
                    if !word_length.contains_key(&q) {
                        if word_length.len() >= cap {
                            return Err(Error::CapExceeded(cap));
                        }
                        word_length.insert(q.clone(), len);
                        next.push(q);
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        let elements: Vec<Vec<usize>> = word_length
            .iter()
            .filter(|(_, &l)| l <= radius as u64)
            .map(|(p, _)| p.clone())
            .collect();
        Ok(FiniteMetricSpace {
            shape: Shape::CayleyBall { elements, word_length },
            scale: 1,
        })
    }

    pub fn len(&self) -> usize {
        match &self.shape {
            Shape::Path { n } => *n,
            Shape::Grid { side } => side * side,
            Shape::Tree { depth } => (1usize << (depth + 1)) - 1,
            Shape::Matrix { n, .. } => *n,
            Shape::CayleyBall { elements, .. } => elements.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All distances are integer multiples of 1/scale.
    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Scaled distance: the actual distance times `scale`.
    pub fn dist(&self, x: usize, y: usize) -> u64 {
        let n = self.len();
        assert!(x < n && y < n);
        match &self.shape {
            Shape::Path { .. } => x.abs_diff(y) as u64,
            Shape::Grid { side } => {
                let (xr, xc) = (x / side, x % side);
                let (yr, yc) = (y / side, y % side);
                (xr.abs_diff(yr) + xc.abs_diff(yc)) as u64
            }
            Shape::Tree { .. } => {
                // heap indexing: parent of node k is k >> 1
                let (mut a, mut b) = (x + 1, y + 1);
                let mut steps = 0u64;
                while a != b {
                    if a >= b {
                        a >>= 1;
                    } else {
                        b >>= 1;
                    }
                    steps += 1;
                }
                steps
            }
            Shape::Matrix { n, dist } => dist[x * n + y],
            Shape::CayleyBall { elements, word_length } => {
                let q = compose_perm(&invert_perm(&elements[x]), &elements[y]);
                *word_length.get(&q).expect("quotient stays within twice the radius")
            }
        }
    }

    /// Scaled threshold for a rational bound: dist(x,y) <= floor(c*scale)
    /// exactly captures d(x,y) <= c because distances are integers.
    pub fn threshold(&self, c: &Rational) -> Result<u64> {
        if c.is_negative() {
            return Err(Error::Invalid("negative bound".into()));
        }
        let scaled = c * Rational::from_integer(BigInt::from(self.scale));
        (scaled.numer() / scaled.denom())
            .to_u64()
            .ok_or_else(|| Error::Invalid("bound overflows".into()))
    }

    /// Points within scaled distance `threshold` of some point of `set`.
    pub fn neighborhood(&self, set: &[usize], threshold: u64) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| set.iter().any(|&x| self.dist(x, y) <= threshold))
            .collect()
    }

    /// Closed ball around one point, in point order.
    pub fn ball(&self, center: usize, threshold: u64) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| self.dist(center, y) <= threshold)
            .collect()
    }
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        out[v] = i;
    }
    out
}

fn compose_perm(p: &[usize], q: &[usize]) -> Vec<usize> {
    // p then q
    p.iter().map(|&v| q[v]).collect()
}

fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    let g = gcd(a.clone(), b.clone());
    a / &g * b
}

fn gcd(mut a: BigInt, mut b: BigInt) -> BigInt {
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a.abs()
}
