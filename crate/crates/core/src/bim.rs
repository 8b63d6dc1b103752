//! Boolean inverse monoid elements over either backend, with the backend
//! dispatch for composition, star, and joins, and the D-equivalence witness
//! search.

use crate::clopen::{Clopen, PrefixCode, Word};
use crate::error::{Error, Result};
use crate::monoid::FiniteInverseMonoid;
use crate::pbij::{self, PartialBijection};
use crate::prefix::{self, PrefixMap};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BimElement {
    FinPB(PartialBijection),
    Prefix(PrefixMap),
}

impl BimElement {
    pub fn is_zero(&self) -> bool {
        match self {
            BimElement::FinPB(p) => p.is_zero(),
            BimElement::Prefix(m) => m.is_zero(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        match self {
            BimElement::FinPB(p) => p.is_idempotent(),
            BimElement::Prefix(m) => m.is_idempotent(),
        }
    }

    pub fn dom_clopen(&self) -> Clopen {
        match self {
            BimElement::FinPB(p) => Clopen::fin(p.ground(), p.dom()).expect("points in range"),
            BimElement::Prefix(m) => Clopen::prefix(m.domain_code()),
        }
    }

    pub fn ran_clopen(&self) -> Clopen {
        match self {
            BimElement::FinPB(p) => Clopen::fin(p.ground(), p.ran()).expect("points in range"),
            BimElement::Prefix(m) => Clopen::prefix(m.range_code()),
        }
    }
}

impl Clopen {
    /// The idempotent element sitting over this clopen.
    pub fn idempotent_element(&self) -> BimElement {
        match self {
            Clopen::Fin { ground, points } => BimElement::FinPB(
                PartialBijection::idempotent(*ground, points.iter().copied())
                    .expect("points validated on construction"),
            ),
            Clopen::Prefix(code) => BimElement::Prefix(PrefixMap::idempotent(code)),
        }
    }
}

pub fn bim_compose(a: &BimElement, b: &BimElement) -> Result<BimElement> {
    match (a, b) {
        (BimElement::FinPB(x), BimElement::FinPB(y)) => {
            Ok(BimElement::FinPB(pbij::compose(x, y)?))
        }
        (BimElement::Prefix(x), BimElement::Prefix(y)) => {
            Ok(BimElement::Prefix(prefix::compose(x, y)?))
        }
        _ => Err(Error::BackendMismatch),
    }
}

pub fn bim_star(a: &BimElement) -> BimElement {
    match a {
        BimElement::FinPB(x) => BimElement::FinPB(pbij::star(x)),
        BimElement::Prefix(x) => BimElement::Prefix(prefix::star(x)),
    }
}

pub fn bim_join(parts: &[BimElement]) -> Result<BimElement> {
    let Some(first) = parts.first() else {
        return Err(Error::Invalid("join of an empty family".into()));
    };
    match first {
        BimElement::FinPB(_) => {
            let fins = parts
                .iter()
                .map(|p| match p {
                    BimElement::FinPB(x) => Ok(x.clone()),
                    _ => Err(Error::BackendMismatch),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(BimElement::FinPB(pbij::join(&fins)?))
        }
        BimElement::Prefix(_) => {
            let maps = parts
                .iter()
                .map(|p| match p {
                    BimElement::Prefix(x) => Ok(x.clone()),
                    _ => Err(Error::BackendMismatch),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(BimElement::Prefix(prefix::join(&maps)?))
        }
    }
}

#[derive(Clone, Debug)]
pub struct DWitnessOutcome {
    pub witness: Option<BimElement>,
    /// Whether a None answer rules the witness out rather than reporting a
    /// truncated search.
    pub exhaustive: bool,
}

/// Find s with s*s = e and ss* = f, meaning domain e and range f.
///
/// Prefix backend: constructive. Both codes are refined by leaf splitting
/// until their cardinalities match, then paired in lexicographic order; a
/// split always replaces the lexicographically least among the deepest
/// leaves. With arity n each split grows a code by n-1, so a witness exists
/// iff the cardinalities agree mod n-1 (always, for n = 2).
///
/// FinSubset backend: scans the supplied monoid, visiting at most `budget`
/// elements. The outcome is exhaustive when the budget covers the monoid.
pub fn d_witness(
    e: &Clopen,
    f: &Clopen,
    monoid: Option<&FiniteInverseMonoid>,
    budget: usize,
) -> Result<DWitnessOutcome> {
    match (e, f) {
        (Clopen::Prefix(ce), Clopen::Prefix(cf)) => {
            if ce.arity() != cf.arity() {
                return Err(Error::ArityMismatch(ce.arity(), cf.arity()));
            }
            Ok(prefix_d_witness(ce, cf))
        }
        (Clopen::Fin { .. }, Clopen::Fin { .. }) => {
            let m = monoid.ok_or_else(|| {
                Error::Invalid("finite-backend witness search needs a monoid".into())
            })?;
            fin_d_witness(e, f, m, budget)
        }
        _ => Err(Error::BackendMismatch),
    }
}

fn prefix_d_witness(e: &PrefixCode, f: &PrefixCode) -> DWitnessOutcome {
    if e.is_zero() || f.is_zero() {
        let witness = (e.is_zero() && f.is_zero())
            .then(|| BimElement::Prefix(PrefixMap::zero(e.arity())));
        return DWitnessOutcome {
            witness,
            exhaustive: true,
        };
    }
    let n = e.arity() as usize;
    let (small, large) = if e.len() <= f.len() { (e, f) } else { (f, e) };
    let gap = large.len() - small.len();
    if gap % (n - 1) != 0 {
        // each split adds n-1 leaves, so the cardinalities can never meet
        return DWitnessOutcome {
            witness: None,
            exhaustive: true,
        };
    }
    let mut leaves: Vec<Word> = small.words().to_vec();
    for _ in 0..gap / (n - 1) {
        let deepest = leaves.iter().map(Word::len).max().unwrap();
        let pos = leaves
            .iter()
            .enumerate()
            .filter(|(_, w)| w.len() == deepest)
            .map(|(i, _)| i)
            .min_by_key(|&i| leaves[i].clone())
            .unwrap();
        let leaf = leaves.remove(pos);
        for d in 0..e.arity() {
            leaves.push(leaf.child(d));
        }
    }
    leaves.sort();
    let (dom, ran): (Vec<Word>, Vec<Word>) = if e.len() <= f.len() {
        (leaves, large.words().to_vec())
    } else {
        (large.words().to_vec(), leaves)
    };
    let pairs = dom.into_iter().zip(ran).collect();
    let map = PrefixMap::new(e.arity(), pairs).expect("refined codes stay codes");
    debug_assert_eq!(map.domain_code(), *e);
    debug_assert_eq!(map.range_code(), *f);
    DWitnessOutcome {
        witness: Some(BimElement::Prefix(map)),
        exhaustive: true,
    }
}

fn fin_d_witness(
    e: &Clopen,
    f: &Clopen,
    monoid: &FiniteInverseMonoid,
    budget: usize,
) -> Result<DWitnessOutcome> {
    let (Clopen::Fin { ground, points: pe }, Clopen::Fin { ground: g2, points: pf }) = (e, f)
    else {
        return Err(Error::BackendMismatch);
    };
    if ground != g2 {
        return Err(Error::GroundSetMismatch(ground.size, g2.size));
    }
    let scanned = monoid.elements().iter().take(budget);
    let mut visited = 0;
    for s in scanned {
        visited += 1;
        if s.dom() == *pe && s.ran() == *pf {
            return Ok(DWitnessOutcome {
                witness: Some(BimElement::FinPB(s.clone())),
                exhaustive: true,
            });
        }
    }
    Ok(DWitnessOutcome {
        witness: None,
        exhaustive: visited >= monoid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{generate_monoid, symmetric_inverse_monoid_generators};
    use crate::pbij::GroundSet;

    fn pcode(words: &[&str]) -> PrefixCode {
        PrefixCode::parse(2, words).unwrap()
    }

    #[test]
    fn witness_unit_to_half() {
        let e = Clopen::prefix(PrefixCode::unit(2));
        let f = Clopen::prefix(pcode(&["0"]));
        let out = d_witness(&e, &f, None, 0).unwrap();
        let BimElement::Prefix(m) = out.witness.unwrap() else {
            panic!("prefix witness expected")
        };
        assert_eq!(m, PrefixMap::cuntz_generator(2, 0));
        assert!(out.exhaustive);
    }

    #[test]
    fn witness_between_equal_clopens_is_restricted_identity() {
        let e = Clopen::prefix(pcode(&["00", "1"]));
        let out = d_witness(&e, &e, None, 0).unwrap();
        let BimElement::Prefix(m) = out.witness.unwrap() else {
            panic!("prefix witness expected")
        };
        assert!(m.is_idempotent());
        assert_eq!(Clopen::prefix(m.domain_code()), e);
    }

    #[test]
    fn witness_needs_refinement_both_ways() {
        let small = Clopen::prefix(pcode(&["0"]));
        let large = Clopen::prefix(pcode(&["00", "01", "10"]));
        for (e, f) in [(&small, &large), (&large, &small)] {
            let out = d_witness(e, f, None, 0).unwrap();
            let w = out.witness.unwrap();
            assert_eq!(&w.dom_clopen(), e);
            assert_eq!(&w.ran_clopen(), f);
        }
    }

    #[test]
    fn fin_witness_found_and_cardinality_blocked() {
        let ground = GroundSet::new(3);
        let monoid =
            generate_monoid(&symmetric_inverse_monoid_generators(ground), 100).unwrap();
        let e = Clopen::fin(ground, vec![0]).unwrap();
        let f = Clopen::fin(ground, vec![2]).unwrap();
        let hit = d_witness(&e, &f, Some(&monoid), monoid.len()).unwrap();
        let w = hit.witness.unwrap();
        assert_eq!(w.dom_clopen(), e);
        assert_eq!(w.ran_clopen(), f);

        let f2 = Clopen::fin(ground, vec![1, 2]).unwrap();
        let miss = d_witness(&e, &f2, Some(&monoid), monoid.len()).unwrap();
        assert!(miss.witness.is_none());
        assert!(miss.exhaustive);
    }

    #[test]
    fn truncated_search_reports_nonexhaustive() {
        let ground = GroundSet::new(3);
        let monoid =
            generate_monoid(&symmetric_inverse_monoid_generators(ground), 100).unwrap();
        let e = Clopen::fin(ground, vec![0]).unwrap();
        let f = Clopen::fin(ground, vec![1, 2]).unwrap();
        let out = d_witness(&e, &f, Some(&monoid), 3).unwrap();
        assert!(out.witness.is_none());
        assert!(!out.exhaustive);
    }

    #[test]
    fn compose_star_join_dispatch() {
        let a1 = BimElement::Prefix(PrefixMap::cuntz_generator(2, 0));
        let a2 = BimElement::Prefix(PrefixMap::cuntz_generator(2, 1));
        assert!(bim_compose(&a1, &bim_star(&a1)).unwrap().is_idempotent());
        assert!(bim_compose(&a2, &bim_star(&a1)).unwrap().is_zero());
        let r1 = bim_compose(&bim_star(&a1), &a1).unwrap();
        let r2 = bim_compose(&bim_star(&a2), &a2).unwrap();
        let joined = bim_join(&[r1, r2]).unwrap();
        assert_eq!(
            joined,
            BimElement::Prefix(PrefixMap::identity(2))
        );

        let g = GroundSet::new(2);
        let fin = BimElement::FinPB(PartialBijection::identity(g));
        assert_eq!(
            bim_compose(&fin, &a1).unwrap_err(),
            Error::BackendMismatch
        );
        assert_eq!(
            bim_join(&[fin, a1]).unwrap_err(),
            Error::BackendMismatch
        );
    }

    #[test]
    fn zero_witness_cases() {
        let z = Clopen::prefix(PrefixCode::zero(2));
        let u = Clopen::prefix(PrefixCode::unit(2));
        let zz = d_witness(&z, &z, None, 0).unwrap();
        assert!(zz.witness.unwrap().is_zero());
        let zu = d_witness(&z, &u, None, 0).unwrap();
        assert!(zu.witness.is_none());
        assert!(zu.exhaustive);
    }

    #[test]
    fn ternary_parity_obstruction() {
        let e = Clopen::prefix(PrefixCode::parse(3, &[""]).unwrap());
        let f = Clopen::prefix(PrefixCode::parse(3, &["0", "1"]).unwrap());
        let out = d_witness(&e, &f, None, 0).unwrap();
        assert!(out.witness.is_none());
        assert!(out.exhaustive);
        let f3 = Clopen::prefix(PrefixCode::parse(3, &["0", "1", "20"]).unwrap());
        assert!(d_witness(&e, &f3, None, 0).unwrap().witness.is_some());
    }
}
