//! Finite partial bijections: the elements of the symmetric inverse monoid
//! I(X) on a ground set {0, .., n-1}.
//!
//! Composition is left-to-right throughout the crate: `compose(a, b)` applies
//! `a` first. Under this convention `compose(a, star(a))` is the identity on
//! dom(a) and `compose(star(a), a)` the identity on ran(a).

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

/// The ground set X = {0, .., size-1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundSet {
    pub size: usize,
}

impl GroundSet {
    pub fn new(size: usize) -> Self {
        GroundSet { size }
    }

    pub fn points(&self) -> impl Iterator<Item = usize> {
        0..self.size
    }
}

/// An injective partial map on a ground set. Entries are kept sorted by
/// source, so equality and ordering are canonical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialBijection {
    n: usize,
    entries: BTreeMap<usize, usize>,
}

impl fmt::Debug for PartialBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (s, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}->{t}")?;
        }
        write!(f, "]/{}", self.n)
    }
}

impl PartialBijection {
    pub fn new(ground: GroundSet, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = ground.size;
        let mut entries = BTreeMap::new();
        let mut targets_seen = vec![false; n];
        for (s, t) in pairs {
            if s >= n {
                return Err(Error::PointOutOfRange(s, n));
            }
            if t >= n {
                return Err(Error::PointOutOfRange(t, n));
            }
            if entries.insert(s, t).is_some() || targets_seen[t] {
                return Err(Error::NotInjective);
            }
            targets_seen[t] = true;
        }
        Ok(PartialBijection { n, entries })
    }

    /// The empty map: the zero of I(X).
    pub fn zero(ground: GroundSet) -> Self {
        PartialBijection {
            n: ground.size,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(ground: GroundSet) -> Self {
        PartialBijection {
            n: ground.size,
            entries: ground.points().map(|x| (x, x)).collect(),
        }
    }

    /// Identity restricted to a point set: an idempotent.
    pub fn idempotent(ground: GroundSet, points: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(ground, points.into_iter().map(|x| (x, x)))
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet::new(self.n)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.entries.get(&x).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().map(|(&s, &t)| (s, t))
    }

    pub fn dom(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn ran(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.entries.values().copied().collect();
        r.sort_unstable();
        r
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_idempotent(&self) -> bool {
        self.entries.iter().all(|(s, t)| s == t)
    }

    pub fn is_total_bijection(&self) -> bool {
        self.entries.len() == self.n
    }

    fn check_ground(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GroundSetMismatch(self.n, other.n));
        }
        Ok(())
    }
}

/// Left-to-right composition: x ↦ b(a(x)) where both sides are defined.
pub fn compose(a: &PartialBijection, b: &PartialBijection) -> Result<PartialBijection> {
    a.check_ground(b)?;
    let entries = a
        .entries
        .iter()
        .filter_map(|(&s, &t)| b.apply(t).map(|u| (s, u)))
        .collect();
    Ok(PartialBijection {
        n: a.n,
        entries,
    })
}

/// The inverse partial map.
pub fn star(a: &PartialBijection) -> PartialBijection {
    PartialBijection {
        n: a.n,
        entries: a.entries.iter().map(|(&s, &t)| (t, s)).collect(),
    }
}

/// Identity on dom(a): equals compose(a, star(a)).
pub fn dom_projection(a: &PartialBijection) -> PartialBijection {
    PartialBijection {
        n: a.n,
        entries: a.entries.keys().map(|&s| (s, s)).collect(),
    }
}

/// Identity on ran(a): equals compose(star(a), a).
pub fn ran_projection(a: &PartialBijection) -> PartialBijection {
    PartialBijection {
        n: a.n,
        entries: a.entries.values().map(|&t| (t, t)).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationFlags {
    pub leq: bool,
    pub compatible: bool,
    pub orthogonal: bool,
}

/// Natural order, compatibility and orthogonality of a pair.
///
/// compatible ⇔ a and b agree on their common domain and star(a), star(b)
/// agree on the common range; equivalently both compose(star(a), b) and
/// compose(a, star(b)) are idempotents. orthogonal ⇔ both those products are
/// zero ⇔ domains and ranges are disjoint.
pub fn relations(a: &PartialBijection, b: &PartialBijection) -> Result<RelationFlags> {
    a.check_ground(b)?;
    let leq = a.entries.iter().all(|(&s, &t)| b.apply(s) == Some(t));
    let mut agree = true;
    let mut dom_disjoint = true;
    for (&s, &t) in &a.entries {
        if let Some(u) = b.apply(s) {
            dom_disjoint = false;
            if u != t {
                agree = false;
            }
        }
    }
    let sa = star(a);
    let sb = star(b);
    let mut coagree = true;
    let mut ran_disjoint = true;
    for (&s, &t) in &sa.entries {
        if let Some(u) = sb.apply(s) {
            ran_disjoint = false;
            if u != t {
                coagree = false;
            }
        }
    }
    Ok(RelationFlags {
        leq,
        compatible: agree && coagree,
        orthogonal: dom_disjoint && ran_disjoint,
    })
}

/// Join of a pairwise compatible family: the union of graphs.
pub fn join(parts: &[PartialBijection]) -> Result<PartialBijection> {
    let Some(first) = parts.first() else {
        return Err(Error::Invalid("join of an empty family".into()));
    };
    for p in &parts[1..] {
        first.check_ground(p)?;
    }
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            if !relations(&parts[i], &parts[j])?.compatible {
                return Err(Error::IncompatiblePair(i, j));
            }
        }
    }
    let mut pairs = Vec::new();
    for p in parts {
        pairs.extend(p.entries());
    }
    pairs.sort_unstable();
    pairs.dedup();
    PartialBijection::new(first.ground(), pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pb(n: usize, pairs: &[(usize, usize)]) -> PartialBijection {
        PartialBijection::new(GroundSet::new(n), pairs.iter().copied()).unwrap()
    }

    #[test]
    fn compose_chains_and_annihilates() {
        let a = pb(3, &[(0, 1)]);
        let b = pb(3, &[(1, 2)]);
        assert_eq!(compose(&a, &b).unwrap(), pb(3, &[(0, 2)]));
        // s then s* is the identity on dom s
        assert_eq!(compose(&a, &star(&a)).unwrap(), pb(3, &[(0, 0)]));
        let c = pb(3, &[(2, 0)]);
        assert!(compose(&a, &c).unwrap().is_zero());
    }

    #[test]
    fn star_swaps_pairs() {
        let a = pb(3, &[(0, 1), (1, 2)]);
        assert_eq!(star(&a), pb(3, &[(1, 0), (2, 1)]));
        assert_eq!(star(&star(&a)), a);
        let z = PartialBijection::zero(GroundSet::new(3));
        assert_eq!(star(&z), z);
        let e = pb(3, &[(0, 0), (2, 2)]);
        assert_eq!(star(&e), e);
    }

    #[test]
    fn ss_star_s_recovers_s() {
        let a = pb(4, &[(0, 2), (1, 3), (2, 0)]);
        let lhs = compose(&compose(&a, &star(&a)).unwrap(), &a).unwrap();
        assert_eq!(lhs, a);
        let rhs = compose(&compose(&star(&a), &a).unwrap(), &star(&a)).unwrap();
        assert_eq!(rhs, star(&a));
    }

    #[test]
    fn relation_flags() {
        let e0 = pb(2, &[(0, 0)]);
        let id = pb(2, &[(0, 0), (1, 1)]);
        let f = relations(&e0, &id).unwrap();
        assert!(f.leq && f.compatible && !f.orthogonal);

        let g = relations(&e0, &pb(2, &[(0, 1)])).unwrap();
        assert!(!g.compatible && !g.leq);

        let h = relations(&pb(3, &[(0, 0)]), &pb(3, &[(1, 2)])).unwrap();
        assert!(h.orthogonal && h.compatible);
    }

    #[test]
    fn join_of_orthogonal_parts() {
        let a = pb(3, &[(0, 0)]);
        let b = pb(3, &[(1, 2)]);
        assert_eq!(join(&[a.clone(), b]).unwrap(), pb(3, &[(0, 0), (1, 2)]));
        assert_eq!(join(std::slice::from_ref(&a)).unwrap(), a);
        let bad = join(&[pb(3, &[(0, 0)]), pb(3, &[(0, 1)])]);
        assert_eq!(bad.unwrap_err(), Error::IncompatiblePair(0, 1));
    }

    #[test]
    fn join_is_least_upper_bound() {
        let parts = [pb(4, &[(0, 1)]), pb(4, &[(2, 2)]), pb(4, &[(3, 0)])];
        let j = join(&parts).unwrap();
        for p in &parts {
            assert!(relations(p, &j).unwrap().leq);
        }
        // any common upper bound dominates the join
        let ub = pb(4, &[(0, 1), (2, 2), (3, 0), (1, 3)]);
        for p in &parts {
            assert!(relations(p, &ub).unwrap().leq);
        }
        assert!(relations(&j, &ub).unwrap().leq);
    }

    #[test]
    fn projections_match_products() {
        let a = pb(5, &[(0, 3), (2, 1), (4, 0)]);
        assert_eq!(dom_projection(&a), compose(&a, &star(&a)).unwrap());
        assert_eq!(ran_projection(&a), compose(&star(&a), &a).unwrap());
    }

    #[test]
    fn ground_set_mismatch_detected() {
        let a = pb(2, &[(0, 1)]);
        let b = pb(3, &[(0, 1)]);
        assert!(matches!(
            compose(&a, &b),
            Err(Error::GroundSetMismatch(2, 3))
        ));
    }
}
