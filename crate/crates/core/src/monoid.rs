//! Closure of finite generator sets inside I(X), and Green's D / J relations
//! on the idempotents of the resulting monoid.

use crate::error::{Error, Result};
use crate::pbij::{
    compose, dom_projection, ran_projection, relations, star, GroundSet, PartialBijection,
};
use std::collections::{HashMap, HashSet};

/// A finite inverse monoid of partial bijections, closed under product and
/// star, with the zero adjoined. Element order is the breadth-first closure
/// order (word length, then lexicographic), so it is reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteInverseMonoid {
    ground: GroundSet,
    elements: Vec<PartialBijection>,
    index: HashMap<PartialBijection, usize>,
    generators: Vec<usize>,
}

impl FiniteInverseMonoid {
    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn elements(&self) -> &[PartialBijection] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn generators(&self) -> Vec<&PartialBijection> {
        self.generators.iter().map(|&i| &self.elements[i]).collect()
    }

    pub fn index_of(&self, s: &PartialBijection) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &PartialBijection) -> bool {
        self.index.contains_key(s)
    }

    /// Index-level product, defined whenever the monoid is closed.
    pub fn product(&self, i: usize, j: usize) -> Result<usize> {
        let p = compose(&self.elements[i], &self.elements[j])?;
        self.index_of(&p)
            .ok_or_else(|| Error::Invalid("monoid not closed under product".into()))
    }

    pub fn star_index(&self, i: usize) -> Result<usize> {
        self.index_of(&star(&self.elements[i]))
            .ok_or_else(|| Error::Invalid("monoid not closed under star".into()))
    }

    /// Full multiplication table; entry [i][j] is the index of elements[i]
    /// then elements[j].
    pub fn multiplication_table(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.len();
        let mut table = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(self.product(i, j)?);
            }
            table.push(row);
        }
        Ok(table)
    }

    pub fn idempotent_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.elements[i].is_idempotent())
            .collect()
    }

    /// The neutral element, if the monoid has one.
    pub fn identity_index(&self) -> Option<usize> {
        let id = PartialBijection::identity(self.ground);
        self.index_of(&id)
    }

    /// Units: elements u with u u* = u* u = identity, i.e. the total
    /// bijections contained in the monoid. Empty when there is no identity.
    pub fn unit_indices(&self) -> Vec<usize> {
        if self.identity_index().is_none() {
            return Vec::new();
        }
        (0..self.len())
            .filter(|&i| self.elements[i].is_total_bijection())
            .collect()
    }

    /// Exhaustive recheck of the closure and commuting-idempotent axioms.
    pub fn verify_closed(&self) -> Result<()> {
        for i in 0..self.len() {
            self.star_index(i)?;
            for j in 0..self.len() {
                self.product(i, j)?;
            }
        }
        let idem = self.idempotent_indices();
        for &i in &idem {
            for &j in &idem {
                let ef = compose(&self.elements[i], &self.elements[j])?;
                let fe = compose(&self.elements[j], &self.elements[i])?;
                if ef != fe {
                    return Err(Error::Invalid("idempotents do not commute".into()));
                }
            }
        }
        Ok(())
    }
}

/// Closure of the generators and their stars under product, with the zero
/// adjoined. Breadth-first by word length with lexicographic tie-break, so
/// two runs on the same input list elements identically.
pub fn generate_monoid(gens: &[PartialBijection], cap: usize) -> Result<FiniteInverseMonoid> {
    let Some(first) = gens.first() else {
        return Err(Error::Invalid("empty generator list".into()));
    };
    let ground = first.ground();
    for g in gens {
        if g.ground() != ground {
            return Err(Error::GroundSetMismatch(ground.size, g.ground_size()));
        }
    }

    let mut atoms: Vec<PartialBijection> = Vec::new();
    for g in gens {
        atoms.push(g.clone());
        atoms.push(star(g));
    }
    atoms.sort();
    atoms.dedup();

    let mut elements: Vec<PartialBijection> = Vec::new();
    let mut seen: HashSet<PartialBijection> = HashSet::new();
    let mut level: Vec<PartialBijection> = Vec::new();
    for a in &atoms {
        if seen.insert(a.clone()) {
            elements.push(a.clone());
            level.push(a.clone());
        }
    }
    while !level.is_empty() {
        let mut next: Vec<PartialBijection> = Vec::new();
        for w in &level {
            for a in &atoms {
                let p = compose(w, a)?;
                if !seen.contains(&p) {
                    next.push(p);
                }
            }
        }
        next.sort();
        next.dedup();
        for p in &next {
            seen.insert(p.clone());
            elements.push(p.clone());
        }
        if elements.len() > cap {
            return Err(Error::CapExceeded(cap));
        }
        level = next;
    }

    let zero = PartialBijection::zero(ground);
    if seen.insert(zero.clone()) {
        elements.push(zero);
    }

    let index = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    let generators = gens
        .iter()
        .map(|g| elements.iter().position(|e| e == g).unwrap())
        .collect();
    Ok(FiniteInverseMonoid {
        ground,
        elements,
        index,
        generators,
    })
}

/// Green's classification of the idempotents of a finite inverse monoid.
#[derive(Debug, Clone)]
pub struct GreenReport {
    /// Indices (into the monoid) of the idempotents, in element order.
    pub idempotents: Vec<usize>,
    /// D-classes as lists of positions into `idempotents`.
    pub d_classes: Vec<Vec<usize>>,
    /// leq_j[i][j] = true iff idempotents[i] ≤_J idempotents[j].
    pub leq_j: Vec<Vec<bool>>,
    /// Whether mutual ≤_J implies D on every idempotent pair.
    pub dj_equal: bool,
}

/// e D f iff some element of S has domain projection e and range projection
/// f; e ≤_J f iff e is D-equivalent to some idempotent below f.
pub fn green_classify(s: &FiniteInverseMonoid) -> Result<GreenReport> {
    let idem = s.idempotent_indices();
    let k = idem.len();
    let mut d = vec![vec![false; k]; k];
    let pos: HashMap<usize, usize> = idem.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    for el in s.elements() {
        let e = dom_projection(el);
        let f = ran_projection(el);
        let (ei, fi) = (s.index_of(&e).unwrap(), s.index_of(&f).unwrap());
        let (a, b) = (pos[&ei], pos[&fi]);
        d[a][b] = true;
        d[b][a] = true;
    }
    // D is generated by single witnesses; close transitively
    for m in 0..k {
        for a in 0..k {
            for b in 0..k {
                if d[a][m] && d[m][b] {
                    d[a][b] = true;
                }
            }
        }
    }

    let mut class_of = vec![usize::MAX; k];
    let mut d_classes: Vec<Vec<usize>> = Vec::new();
    for a in 0..k {
        if class_of[a] == usize::MAX {
            let members: Vec<usize> = (0..k).filter(|&b| d[a][b]).collect();
            for &m in &members {
                class_of[m] = d_classes.len();
            }
            d_classes.push(members);
        }
    }

    let mut leq_j = vec![vec![false; k]; k];
    for a in 0..k {
        for b in 0..k {
            // e ≤_J f iff ∃ idempotent e' ≤ f with e D e'
            leq_j[a][b] = (0..k).any(|c| {
                d[a][c]
                    && relations(&s.elements()[idem[c]], &s.elements()[idem[b]])
                        .map(|r| r.leq)
                        .unwrap_or(false)
            });
        }
    }

    let mut dj_equal = true;
    for a in 0..k {
        for b in 0..k {
            if leq_j[a][b] && leq_j[b][a] && !d[a][b] {
                dj_equal = false;
            }
        }
    }

    Ok(GreenReport {
        idempotents: idem,
        d_classes,
        leq_j,
        dj_equal,
    })
}

/// All total bijections of a ground set, useful for building I(n) instances.
pub fn all_permutations(ground: GroundSet) -> Vec<PartialBijection> {
    fn go(n: usize, prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for t in 0..n {
            if !used[t] {
                used[t] = true;
                prefix.push(t);
                go(n, prefix, used, out);
                prefix.pop();
                used[t] = false;
            }
        }
    }
    let n = ground.size;
    let mut images = Vec::new();
    go(n, &mut Vec::new(), &mut vec![false; n], &mut images);
    images
        .into_iter()
        .map(|img| {
            PartialBijection::new(ground, img.into_iter().enumerate()).unwrap()
        })
        .collect()
}

/// Generators whose closure is the full symmetric inverse monoid I(n).
pub fn symmetric_inverse_monoid_generators(ground: GroundSet) -> Vec<PartialBijection> {
    let mut gens = all_permutations(ground);
    if ground.size > 0 {
        // one corank-1 idempotent is enough alongside all permutations
        gens.push(
            PartialBijection::idempotent(ground, 0..ground.size - 1).unwrap(),
        );
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;

    /// |I(n)| = Σ_k C(n,k)² k!, the independent counting oracle.
    fn symmetric_inverse_monoid_order(n: u64) -> u64 {
        fn fact(m: u64) -> u64 {
            (1..=m).product::<u64>().max(1)
        }
        fn choose(n: u64, k: u64) -> u64 {
            fact(n) / (fact(k) * fact(n - k))
        }
        (0..=n).map(|k| choose(n, k) * choose(n, k) * fact(k)).sum()
    }

    fn full_i(n: usize) -> FiniteInverseMonoid {
        let gens = symmetric_inverse_monoid_generators(GroundSet::new(n));
        generate_monoid(&gens, 10_000).unwrap()
    }

    #[test]
    fn closure_counts_match_oracle() {
        assert_eq!(symmetric_inverse_monoid_order(1), 2);
        assert_eq!(symmetric_inverse_monoid_order(2), 7);
        assert_eq!(symmetric_inverse_monoid_order(3), 34);
        for n in 1..=3 {
            assert_eq!(full_i(n).len(), symmetric_inverse_monoid_order(n as u64) as usize);
        }
    }

    #[test]
    fn closure_of_single_idempotent() {
        let g = GroundSet::new(1);
        let e = PartialBijection::idempotent(g, [0]).unwrap();
        let m = generate_monoid(&[e], 100).unwrap();
        assert_eq!(m.len(), 2); // identity and zero
    }

    #[test]
    fn closure_of_single_arrow() {
        let g = GroundSet::new(2);
        let a = PartialBijection::new(g, [(0, 1)]).unwrap();
        let m = generate_monoid(&[a], 100).unwrap();
        assert_eq!(m.len(), 5); // [0->1],[1->0],[0->0],[1->1], zero
    }

    #[test]
    fn closure_is_verified_closed() {
        let m = full_i(3);
        m.verify_closed().unwrap();
    }

    #[test]
    fn enumeration_is_deterministic() {
        let gens = symmetric_inverse_monoid_generators(GroundSet::new(3));
        let a = generate_monoid(&gens, 10_000).unwrap();
        let b = generate_monoid(&gens, 10_000).unwrap();
        assert_eq!(a.elements(), b.elements());
    }

    #[test]
    fn cap_is_enforced() {
        let gens = symmetric_inverse_monoid_generators(GroundSet::new(3));
        assert!(matches!(
            generate_monoid(&gens, 10),
            Err(Error::CapExceeded(10))
        ));
    }

    #[test]
    fn green_classes_of_full_monoids() {
        // D-classes of idempotents in I(n) are the domain-cardinality levels
        let m3 = full_i(3);
        let rep = green_classify(&m3).unwrap();
        assert_eq!(rep.idempotents.len(), 8);
        assert_eq!(rep.d_classes.len(), 4);
        assert!(rep.dj_equal);
        for class in &rep.d_classes {
            let sizes: Vec<usize> = class
                .iter()
                .map(|&p| m3.elements()[rep.idempotents[p]].rank())
                .collect();
            assert!(sizes.windows(2).all(|w| w[0] == w[1]));
        }

        let m2 = full_i(2);
        let rep2 = green_classify(&m2).unwrap();
        assert_eq!(rep2.d_classes.len(), 3);
        assert!(rep2.dj_equal);
    }

    #[test]
    fn green_on_two_element_monoid() {
        let g = GroundSet::new(1);
        let e = PartialBijection::identity(g);
        let m = generate_monoid(&[e], 10).unwrap();
        let rep = green_classify(&m).unwrap();
        assert_eq!(rep.d_classes.len(), 2);
        assert!(rep.dj_equal);
    }

    #[test]
    fn unit_group_of_i3_is_s3() {
        let m = full_i(3);
        assert_eq!(m.unit_indices().len(), 6);
    }
}
