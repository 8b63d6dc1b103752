//! Finite principal groupoids: equivalence relations on a point set, with
//! arrows the ordered pairs inside a block. Full groups, rigid stabilizers,
//! germ groupoids of finite actions, and measures on the unit space.

use crate::error::{Error, Result};
use crate::monoid::generate_monoid;
use crate::pbij::{GroundSet, PartialBijection};
use crate::Rational;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// An equivalence relation on {0, .., n-1}. Principal by construction: a
/// pair of points carries at most one arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    n: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl FiniteGroupoid {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; n];
        let mut cleaned: Vec<Vec<usize>> = Vec::new();
        for block in blocks {
            let mut b = block;
            b.sort_unstable();
            b.dedup();
            if b.is_empty() {
                continue;
            }
            for &x in &b {
                if x >= n {
                    return Err(Error::PointOutOfRange(x, n));
                }
                if block_of[x] != usize::MAX {
                    return Err(Error::Invalid(format!("point {x} in two blocks")));
                }
                block_of[x] = cleaned.len();
            }
            cleaned.push(b);
        }
        if let Some(x) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::Invalid(format!("point {x} not covered")));
        }
        cleaned.sort();
        for (i, b) in cleaned.iter().enumerate() {
            for &x in b {
                block_of[x] = i;
            }
        }
        Ok(FiniteGroupoid {
            n,
            blocks: cleaned,
            block_of,
        })
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet::new(self.n)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> Result<usize> {
        if x >= self.n {
            return Err(Error::PointOutOfRange(x, self.n));
        }
        Ok(self.block_of[x])
    }

    pub fn has_arrow(&self, x: usize, y: usize) -> bool {
        x < self.n && y < self.n && self.block_of[x] == self.block_of[y]
    }

    pub fn arrow_count(&self) -> usize {
        self.blocks.iter().map(|b| b.len() * b.len()).sum()
    }

    /// Minimal means every point sees every other: a single block.
    pub fn is_minimal(&self) -> bool {
        self.blocks.len() == 1
    }

    /// A bisection respects the groupoid when each point maps inside its
    /// own block.
    pub fn respects(&self, s: &PartialBijection) -> bool {
        s.ground_size() == self.n && s.entries().all(|(x, y)| self.has_arrow(x, y))
    }

    /// Invariant subsets are unions of blocks.
    pub fn is_invariant(&self, set: &[usize]) -> bool {
        let marked: BTreeSet<usize> = set.iter().copied().collect();
        if marked.iter().any(|&x| x >= self.n) {
            return false;
        }
        self.blocks
            .iter()
            .all(|b| b.iter().all(|x| marked.contains(x)) || !b.iter().any(|x| marked.contains(x)))
    }

    /// The restriction to a subset, reindexed onto {0, .., k-1}. Returns the
    /// groupoid together with the list mapping new indices to old points.
    pub fn restrict(&self, set: &[usize]) -> Result<(FiniteGroupoid, Vec<usize>)> {
        let kept: BTreeSet<usize> = set.iter().copied().collect();
        if let Some(&x) = kept.iter().find(|&&x| x >= self.n) {
            return Err(Error::PointOutOfRange(x, self.n));
        }
        let old_of_new: Vec<usize> = kept.iter().copied().collect();
        let mut new_of_old = vec![usize::MAX; self.n];
        for (new, &old) in old_of_new.iter().enumerate() {
            new_of_old[old] = new;
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .filter(|&&x| kept.contains(&x))
                    .map(|&x| new_of_old[x])
                    .collect::<Vec<_>>()
            })
            .filter(|b| !b.is_empty())
            .collect();
        Ok((FiniteGroupoid::new(old_of_new.len(), blocks)?, old_of_new))
    }
}

fn factorial(n: usize) -> BigUint {
    let mut out = BigUint::one();
    for k in 2..=n {
        out *= BigUint::from(k);
    }
    out
}

/// Transpositions of consecutive points within each listed block, as total
/// bijections of the whole ground set.
fn block_transpositions(
    ground: GroundSet,
    blocks: impl IntoIterator<Item = Vec<usize>>,
) -> Vec<PartialBijection> {
    let mut gens = Vec::new();
    for b in blocks {
        for w in b.windows(2) {
            let pairs = ground.points().map(|x| {
                if x == w[0] {
                    (x, w[1])
                } else if x == w[1] {
                    (x, w[0])
                } else {
                    (x, x)
                }
            });
            gens.push(PartialBijection::new(ground, pairs).expect("transposition"));
        }
    }
    gens
}

/// The group of bijections moving every point within its block: a direct
/// product of symmetric groups.
#[derive(Clone, Debug)]
pub struct FullGroup {
    pub generators: Vec<PartialBijection>,
    pub order: BigUint,
}

pub fn full_group(g: &FiniteGroupoid) -> FullGroup {
    FullGroup {
        generators: block_transpositions(g.ground(), g.blocks().to_vec()),
        order: g.blocks().iter().map(|b| factorial(b.len())).product(),
    }
}

#[derive(Clone, Debug)]
pub struct RigidStabilizer {
    pub generators: Vec<PartialBijection>,
    pub order: BigUint,
    /// Cross-checked against the full group of the restricted groupoid.
    pub matches_restricted_full_group: bool,
}

/// The subgroup of the full group acting trivially outside `set`.
pub fn rigid_stabilizer(g: &FiniteGroupoid, set: &[usize]) -> Result<RigidStabilizer> {
    let kept: BTreeSet<usize> = set.iter().copied().collect();
    if let Some(&x) = kept.iter().find(|&&x| x >= g.points()) {
        return Err(Error::PointOutOfRange(x, g.points()));
    }
    let traces: Vec<Vec<usize>> = g
        .blocks()
        .iter()
        .map(|b| b.iter().copied().filter(|x| kept.contains(x)).collect())
        .collect();
    let order: BigUint = traces.iter().map(|t| factorial(t.len())).product();
    let generators = block_transpositions(g.ground(), traces);
    let (restricted, _) = g.restrict(set)?;
    let matches = full_group(&restricted).order == order;
    Ok(RigidStabilizer {
        generators,
        order,
        matches_restricted_full_group: matches,
    })
}

/// All partial injections of a block into itself, as entry lists.
fn block_partial_injections(block: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new()];
    for &x in block {
        let mut next = Vec::new();
        for partial in &out {
            next.push(partial.clone());
            for &y in block {
                if partial.iter().all(|&(_, t)| t != y) {
                    let mut ext = partial.clone();
                    ext.push((x, y));
                    next.push(ext);
                }
            }
        }
        out = next;
    }
    out
}

#[derive(Clone, Debug)]
pub struct GermReport {
    pub groupoid: FiniteGroupoid,
    /// Every bisection of the orbit relation splits into pieces, each an
    /// idempotent times a group element.
    pub piecewise_factorisable: bool,
    pub bisection_count: usize,
}

/// The germ groupoid of a finite action: points germ-equivalent exactly when
/// some group element carries one to the other, so the groupoid is the orbit
/// relation and isotropy collapses.
pub fn germ_groupoid(
    ground: GroundSet,
    generators: &[PartialBijection],
    cap: usize,
) -> Result<GermReport> {
    let n = ground.size;
    for g in generators {
        if g.ground_size() != n {
            return Err(Error::GroundSetMismatch(g.ground_size(), n));
        }
        if !g.is_total_bijection() {
            return Err(Error::NotBijective);
        }
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for g in generators {
        for (x, y) in g.entries() {
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            parent[rx] = ry;
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 0..n {
        let root = find(&mut parent, x);
        blocks.entry(root).or_default().push(x);
    }
    let groupoid = FiniteGroupoid::new(n, blocks.into_values().collect())?;

    let mut seed: Vec<PartialBijection> = generators.to_vec();
    seed.push(PartialBijection::identity(ground));
    let group = generate_monoid(&seed, cap)?;
    let mut germs = vec![false; n * n];
    for h in group.elements() {
        for (x, y) in h.entries() {
            germs[x * n + y] = true;
        }
    }

    let mut count = 1usize;
    for b in groupoid.blocks() {
        let per_block = block_partial_injections(b).len();
        count = count
            .checked_mul(per_block)
            .filter(|&c| c <= cap)
            .ok_or(Error::CapExceeded(cap))?;
    }
    let mut bisections: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for b in groupoid.blocks() {
        let choices = block_partial_injections(b);
        let mut next = Vec::with_capacity(bisections.len() * choices.len());
        for prefix in &bisections {
            for choice in &choices {
                let mut merged = prefix.clone();
                merged.extend_from_slice(choice);
                next.push(merged);
            }
        }
        bisections = next;
    }
    let factorisable = bisections
        .iter()
        .all(|pairs| pairs.iter().all(|&(x, y)| germs[x * n + y]));
    Ok(GermReport {
        groupoid,
        piecewise_factorisable: factorisable,
        bisection_count: bisections.len(),
    })
}

/// Strictly positive weights on the unit space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureOnUnits {
    weights: Vec<Rational>,
}

impl MeasureOnUnits {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.iter().any(|w| *w <= Rational::zero()) {
            return Err(Error::NonpositiveWeight);
        }
        Ok(MeasureOnUnits { weights })
    }

    pub fn uniform(n: usize) -> Self {
        let w = Rational::new(1.into(), (n.max(1)).into());
        MeasureOnUnits {
            weights: vec![w; n],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, x: usize) -> &Rational {
        &self.weights[x]
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn is_probability(&self) -> bool {
        self.total() == Rational::one()
    }

    /// Invariance under every bisection: constant on each block.
    pub fn is_invariant(&self, g: &FiniteGroupoid) -> bool {
        self.weights.len() == g.points()
            && g.blocks()
                .iter()
                .all(|b| b.windows(2).all(|w| self.weights[w[0]] == self.weights[w[1]]))
    }
}
