//! Tarski matrices: tuples certifying that a clopen carries several disjoint
//! copies of itself, the searches that produce them, and the matrix-level
//! check that such a tuple exhibits an infinite projection.

use crate::bim::{bim_compose, bim_star, d_witness, BimElement};
use crate::clopen::{Clopen, PrefixCode};
use crate::error::{Error, Result};
use crate::monoid::FiniteInverseMonoid;
use crate::{RatMatrix, Rational};
use num_traits::One;

/// A base clopen e together with entries a_1..a_k, each meant to map e onto
/// a piece of itself: source exactly e, ranges pairwise orthogonal inside e.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TarskiMatrix {
    base: Clopen,
    entries: Vec<BimElement>,
}

impl TarskiMatrix {
    /// Degree is the number of entries and must be at least 2.
    pub fn new(base: Clopen, entries: Vec<BimElement>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::DegreeTooSmall(entries.len()));
        }
        Ok(TarskiMatrix { base, entries })
    }

    pub fn base(&self) -> &Clopen {
        &self.base
    }

    pub fn entries(&self) -> &[BimElement] {
        &self.entries
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }
}

/// Per-axiom outcome of a Tarski matrix check.
#[derive(Clone, Debug)]
pub struct TarskiDiagnostics {
    pub base_nonzero: bool,
    /// Entry i composed with its star is the base idempotent.
    pub source_matches: Vec<bool>,
    /// Entry i's range sits inside the base.
    pub range_inside: Vec<bool>,
    /// Pairs (i, j) whose ranges overlap.
    pub overlapping_ranges: Vec<(usize, usize)>,
}

impl TarskiDiagnostics {
    pub fn passed(&self) -> bool {
        self.base_nonzero
            && self.source_matches.iter().all(|&b| b)
            && self.range_inside.iter().all(|&b| b)
            && self.overlapping_ranges.is_empty()
    }
}

fn uniform_backend(t: &TarskiMatrix) -> Result<()> {
    for entry in &t.entries {
        match (&t.base, entry) {
            (Clopen::Fin { ground, .. }, BimElement::FinPB(p)) => {
                if p.ground() != *ground {
                    return Err(Error::GroundSetMismatch(ground.size, p.ground().size));
                }
            }
            (Clopen::Prefix(code), BimElement::Prefix(m)) => {
                if m.arity() != code.arity() {
                    return Err(Error::ArityMismatch(code.arity(), m.arity()));
                }
            }
            _ => return Err(Error::BackendMismatch),
        }
    }
    Ok(())
}

pub fn tarski_diagnostics(t: &TarskiMatrix) -> Result<TarskiDiagnostics> {
    uniform_backend(t)?;
    let base_nonzero = !t.base.is_zero();
    let mut source_matches = Vec::with_capacity(t.degree());
    let mut range_inside = Vec::with_capacity(t.degree());
    let mut overlapping_ranges = Vec::new();
    let base_idem = t.base.idempotent_element();
    for entry in &t.entries {
        let dom_proj = bim_compose(entry, &bim_star(entry))?;
        source_matches.push(dom_proj == base_idem);
        range_inside.push(entry.ran_clopen().leq(&t.base)?);
    }
    for i in 0..t.degree() {
        for j in i + 1..t.degree() {
            let cross = bim_compose(&t.entries[i], &bim_star(&t.entries[j]))?;
            if !cross.is_zero() {
                overlapping_ranges.push((i, j));
            }
        }
    }
    Ok(TarskiDiagnostics {
        base_nonzero,
        source_matches,
        range_inside,
        overlapping_ranges,
    })
}

pub fn check_tarski(t: &TarskiMatrix) -> Result<bool> {
    Ok(tarski_diagnostics(t)?.passed())
}

#[derive(Clone, Debug)]
pub struct TarskiSearch {
    pub matrix: Option<TarskiMatrix>,
    /// Whether a None answer rules a matrix out rather than reporting a
    /// truncated search.
    pub exhaustive: bool,
}

/// Search for a degree-`degree` Tarski matrix over e.
///
/// Prefix backend: constructive and always successful. The base code is
/// refined until it has `degree` disjoint sub-blocks of the original leaf
/// count, and each block receives a copy of e by leaf pairing.
///
/// FinSubset backend: exhaustive scan of the supplied monoid, visiting at
/// most `budget` elements; the outcome is exhaustive when the budget covers
/// the monoid.
pub fn find_tarski(
    e: &Clopen,
    degree: usize,
    monoid: Option<&FiniteInverseMonoid>,
    budget: usize,
) -> Result<TarskiSearch> {
    if degree < 2 {
        return Err(Error::DegreeTooSmall(degree));
    }
    if e.is_zero() {
        return Err(Error::ZeroBase);
    }
    match e {
        Clopen::Prefix(code) => prefix_tarski(e, code, degree),
        Clopen::Fin { points, .. } => {
            let monoid = monoid.ok_or_else(|| {
                Error::Invalid("finite-backend search needs a monoid".into())
            })?;
            fin_tarski(e, points, degree, monoid, budget)
        }
    }
}

fn prefix_tarski(e: &Clopen, code: &PrefixCode, degree: usize) -> Result<TarskiSearch> {
    let n = code.arity() as usize;
    let leaf_count = code.len();
    // splitting to uniform depth keeps each block count congruent to the
    // original mod n-1, which is what the leaf pairing needs
    let mut extra = 0;
    while n.pow(extra) < degree {
        extra += 1;
    }
    let leaves = code.expand_to_depth(code.max_depth() + extra as usize);
    debug_assert!(leaves.len() >= degree * leaf_count);
    let mut entries = Vec::with_capacity(degree);
    for block in 0..degree {
        let words = leaves[block * leaf_count..(block + 1) * leaf_count].to_vec();
        let piece = Clopen::prefix(PrefixCode::new(code.arity(), words)?);
        let out = d_witness(e, &piece, None, 0)?;
        let witness = out
            .witness
            .expect("block leaf count matches the base mod n-1");
        entries.push(witness);
    }
    let matrix = TarskiMatrix::new(e.clone(), entries)?;
    debug_assert!(check_tarski(&matrix)?);
    Ok(TarskiSearch {
        matrix: Some(matrix),
        exhaustive: true,
    })
}

fn fin_tarski(
    e: &Clopen,
    points: &[usize],
    degree: usize,
    monoid: &FiniteInverseMonoid,
    budget: usize,
) -> Result<TarskiSearch> {
    let mut visited = 0;
    let mut candidates = Vec::new();
    for m in monoid.elements().iter().take(budget) {
        visited += 1;
        if m.dom() == points && m.ran().iter().all(|p| points.contains(p)) {
            candidates.push(m.clone());
        }
    }
    let exhaustive = visited >= monoid.len();
    let mut chosen: Vec<usize> = Vec::new();
    let found = pick_disjoint(&candidates, degree, 0, &mut chosen);
    let matrix = if found {
        let entries = chosen
            .iter()
            .map(|&i| BimElement::FinPB(candidates[i].clone()))
            .collect();
        let matrix = TarskiMatrix::new(e.clone(), entries)?;
        debug_assert!(check_tarski(&matrix)?);
        Some(matrix)
    } else {
        None
    };
    Ok(TarskiSearch { matrix, exhaustive })
}

fn pick_disjoint(
    candidates: &[crate::pbij::PartialBijection],
    need: usize,
    start: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if chosen.len() == need {
        return true;
    }
    for i in start..candidates.len() {
        let ran = candidates[i].ran();
        let disjoint = chosen
            .iter()
            .all(|&j| candidates[j].ran().iter().all(|p| !ran.contains(p)));
        if !disjoint {
            continue;
        }
        chosen.push(i);
        if pick_disjoint(candidates, need, i + 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[derive(Clone, Debug)]
pub struct GeneralParadoxSearch {
    pub search: TarskiSearch,
    /// Degree actually searched after folding the second parameter in.
    pub degree_used: usize,
    /// The fold is only valid under comparison hypotheses this routine does
    /// not verify itself.
    pub hypotheses_verified: bool,
}

/// (k, l)-paradoxicality for l > 1, folded into a single degree-ceil(k/l)
/// search. The fold presumes cardinality-like idempotent comparison; callers
/// get that caveat back in `hypotheses_verified`.
pub fn find_tarski_general(
    e: &Clopen,
    k: usize,
    l: usize,
    monoid: Option<&FiniteInverseMonoid>,
    budget: usize,
) -> Result<GeneralParadoxSearch> {
    if l == 0 {
        return Err(Error::Invalid("cover multiplicity must be positive".into()));
    }
    if k <= l {
        return Err(Error::Invalid("paradoxicality needs more pieces than covers".into()));
    }
    let degree_used = if l == 1 { k } else { k.div_ceil(l).max(2) };
    let search = find_tarski(e, degree_used, monoid, budget)?;
    Ok(GeneralParadoxSearch {
        search,
        degree_used,
        hypotheses_verified: l == 1,
    })
}

/// Evaluation of prefix maps on the tree of words of length at most `depth`.
///
/// A pair u -> v contributes the basis moves u·w -> v·w whenever both ends
/// fit the window, so star goes to transpose exactly. The window makes this
/// a compression rather than a homomorphism: products can lose boundary
/// entries, which is precisely the defect the infinite-projection check
/// quantifies by rank.
#[derive(Clone, Debug)]
pub struct TreeRep {
    arity: u8,
    depth: usize,
    basis: Vec<crate::clopen::Word>,
}

impl TreeRep {
    pub fn new(arity: u8, depth: usize) -> Self {
        let mut basis = Vec::new();
        for len in 0..=depth {
            basis.extend(crate::clopen::Word::empty().extensions(len, arity));
        }
        basis.sort();
        TreeRep { arity, depth, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[crate::clopen::Word] {
        &self.basis
    }

    fn index(&self, w: &crate::clopen::Word) -> usize {
        self.basis.binary_search(w).expect("word within depth")
    }

    /// Matrix of the element's action on the windowed basis; None when the
    /// element belongs to the finite backend.
    pub fn matrix(&self, element: &BimElement) -> Option<RatMatrix> {
        let BimElement::Prefix(map) = element else {
            return None;
        };
        if map.arity() != self.arity {
            return None;
        }
        let mut out = RatMatrix::zeros(self.dim(), self.dim());
        for (u, v) in map.pairs() {
            for x in &self.basis {
                let Some(w) = u.strip_prefix(x) else { continue };
                let y = v.concat(&w);
                if y.len() <= self.depth {
                    out[(self.index(&y), self.index(x))] = Rational::one();
                }
            }
        }
        Some(out)
    }
}

fn is_projection_matrix(m: &RatMatrix) -> bool {
    *m == m.transpose() && m.matmul(m) == *m
}

/// Verify that the tuple realizes an infinite projection in the given
/// finite-dimensional evaluation: the entry matrices M_i satisfy
/// M_i* M_j = δ_ij P for one common nonzero projection P below rep(e), their
/// ranges stay below rep(e), and the total range projection packs `degree`
/// orthogonal copies of P while staying strictly below the degree-fold
/// amplification of rep(e).
pub fn infinite_projection_check(
    t: &TarskiMatrix,
    rep: impl Fn(&BimElement) -> Option<RatMatrix>,
) -> Result<bool> {
    if !check_tarski(t)? {
        return Ok(false);
    }
    let e_mat = rep(&t.base.idempotent_element()).ok_or(Error::RepUndefined)?;
    let dim = e_mat.nrows();
    if e_mat.ncols() != dim {
        return Err(Error::DimensionMismatch(dim, e_mat.ncols(), dim, dim));
    }
    let mut mats = Vec::with_capacity(t.degree());
    for entry in &t.entries {
        let m = rep(entry).ok_or(Error::RepUndefined)?;
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols(), dim, dim));
        }
        mats.push(m);
    }
    if !is_projection_matrix(&e_mat) {
        return Ok(false);
    }
    let p = mats[0].transpose().matmul(&mats[0]);
    for (i, a) in mats.iter().enumerate() {
        for (j, b) in mats.iter().enumerate() {
            let prod = a.transpose().matmul(b);
            let expect = if i == j {
                p.clone()
            } else {
                RatMatrix::zeros(dim, dim)
            };
            if prod != expect {
                return Ok(false);
            }
        }
    }
    if p.is_zero() || !is_projection_matrix(&p) {
        return Ok(false);
    }
    if e_mat.matmul(&p) != p {
        return Ok(false);
    }
    let mut total_range = RatMatrix::zeros(dim, dim);
    for m in &mats {
        total_range = total_range.add(&m.matmul(&m.transpose()));
    }
    if e_mat.matmul(&total_range) != total_range {
        return Ok(false);
    }
    let k = t.degree();
    let rank_p = p.rank();
    let rank_total = total_range.rank();
    let rank_e = e_mat.rank();
    Ok(rank_total == k * rank_p && rank_total < k * rank_e)
}

/// A degree-2 tuple packaged as the two generators it induces, with the
/// covering condition made explicit.
#[derive(Clone, Debug)]
pub struct ParadoxicalPair {
    pub first: BimElement,
    pub second: BimElement,
    /// Whether the input ranges already covered the base. The returned pair
    /// always covers when the backend permits enlarging the second range.
    pub tight: bool,
}

/// Extract the two generators from a degree-2 Tarski matrix. When their
/// ranges fail to cover the base, the second is replaced by a witness onto
/// the whole complement of the first range.
pub fn p2_from_tarski(t: &TarskiMatrix) -> Result<ParadoxicalPair> {
    if t.degree() != 2 {
        return Err(Error::DegreeNotTwo(t.degree()));
    }
    if !check_tarski(t)? {
        return Err(Error::Invalid("tuple fails the Tarski axioms".into()));
    }
    let first = t.entries[0].clone();
    let second = t.entries[1].clone();
    let union = first.ran_clopen().join(&second.ran_clopen())?;
    if union == t.base {
        return Ok(ParadoxicalPair {
            first,
            second,
            tight: true,
        });
    }
    let gap = t.base.meet(&first.ran_clopen().complement())?;
    let widened = d_witness(&t.base, &gap, None, 0).map_err(|_| Error::Untightenable)?;
    let Some(second) = widened.witness else {
        return Err(Error::Untightenable);
    };
    debug_assert_eq!(
        first.ran_clopen().join(&second.ran_clopen())?,
        t.base,
        "widened range must complete the cover"
    );
    Ok(ParadoxicalPair {
        first,
        second,
        tight: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::Word;
    use crate::mean::{invariant_mean, MeanInstance, MeanVerdict};
    use crate::monoid::{generate_monoid, symmetric_inverse_monoid_generators};
    use crate::pbij::GroundSet;
    use crate::prefix::PrefixMap;

    fn gen(d: u8) -> BimElement {
        BimElement::Prefix(PrefixMap::cuntz_generator(2, d))
    }

    fn unit() -> Clopen {
        Clopen::prefix(PrefixCode::parse(2, &[""]).unwrap())
    }

    fn cyl(w: &str) -> Clopen {
        Clopen::prefix(PrefixCode::parse(2, &[w]).unwrap())
    }

    #[test]
    fn canonical_pair_is_a_tarski_matrix() {
        let t = TarskiMatrix::new(unit(), vec![gen(0), gen(1)]).unwrap();
        assert!(check_tarski(&t).unwrap());

        let repeated = TarskiMatrix::new(unit(), vec![gen(0), gen(0)]).unwrap();
        assert!(!check_tarski(&repeated).unwrap());

        let zero_base = TarskiMatrix::new(
            Clopen::prefix(PrefixCode::zero(2)),
            vec![gen(0), gen(1)],
        )
        .unwrap();
        assert!(!check_tarski(&zero_base).unwrap());
    }

    #[test]
    fn diagnostics_localize_the_failing_axiom() {
        let repeated = TarskiMatrix::new(unit(), vec![gen(0), gen(0)]).unwrap();
        let d = tarski_diagnostics(&repeated).unwrap();
        assert!(d.base_nonzero);
        assert_eq!(d.source_matches, vec![true, true]);
        assert_eq!(d.overlapping_ranges, vec![(0, 1)]);

        let off_base = TarskiMatrix::new(cyl("0"), vec![gen(0), gen(1)]).unwrap();
        let d = tarski_diagnostics(&off_base).unwrap();
        assert_eq!(d.source_matches, vec![false, false]);
    }

    #[test]
    fn degree_below_two_is_rejected() {
        assert!(TarskiMatrix::new(unit(), vec![gen(0)]).is_err());
        assert!(find_tarski(&unit(), 1, None, 0).is_err());
    }

    #[test]
    fn every_nonzero_cylinder_splits() {
        for base in [unit(), cyl("0"), cyl("10")] {
            let out = find_tarski(&base, 2, None, 0).unwrap();
            let matrix = out.matrix.expect("constructive split");
            assert!(out.exhaustive);
            assert!(check_tarski(&matrix).unwrap());
            assert_eq!(matrix.base(), &base);
        }
        let deep = find_tarski(&unit(), 5, None, 0).unwrap();
        assert!(check_tarski(&deep.matrix.unwrap()).unwrap());
    }

    #[test]
    fn finite_sets_are_never_paradoxical() {
        let ground = GroundSet::new(3);
        let monoid = generate_monoid(&symmetric_inverse_monoid_generators(ground), 64).unwrap();
        let full = Clopen::fin_unit(ground);
        let out = find_tarski(&full, 2, Some(&monoid), monoid.len()).unwrap();
        assert!(out.matrix.is_none());
        assert!(out.exhaustive);

        let single = Clopen::fin(ground, vec![0]).unwrap();
        let out = find_tarski(&single, 2, Some(&monoid), monoid.len()).unwrap();
        assert!(out.matrix.is_none());
        assert!(out.exhaustive);

        let truncated = find_tarski(&full, 2, Some(&monoid), 3).unwrap();
        assert!(!truncated.exhaustive);
    }

    #[test]
    fn feasible_mean_goes_with_exhaustive_refusal() {
        let ground = GroundSet::new(2);
        let gens = symmetric_inverse_monoid_generators(ground);
        let verdict = invariant_mean(&MeanInstance::fin(ground, gens.clone()), 1).unwrap();
        assert!(matches!(verdict, MeanVerdict::Feasible(_)));
        let monoid = generate_monoid(&gens, 16).unwrap();
        let out = find_tarski(&Clopen::fin_unit(ground), 2, Some(&monoid), monoid.len()).unwrap();
        assert!(out.matrix.is_none() && out.exhaustive);
    }

    #[test]
    fn general_search_folds_the_cover_count() {
        let direct = find_tarski_general(&unit(), 3, 1, None, 0).unwrap();
        assert!(direct.hypotheses_verified);
        assert_eq!(direct.degree_used, 3);
        assert_eq!(direct.search.matrix.unwrap().degree(), 3);

        let folded = find_tarski_general(&unit(), 4, 2, None, 0).unwrap();
        assert!(!folded.hypotheses_verified);
        assert_eq!(folded.degree_used, 2);
        assert!(find_tarski_general(&unit(), 2, 2, None, 0).is_err());
    }

    #[test]
    fn tree_rep_sends_star_to_transpose() {
        let rep = TreeRep::new(2, 3);
        assert_eq!(rep.dim(), 15);
        for m in [
            PrefixMap::cuntz_generator(2, 0),
            PrefixMap::new(2, vec![(Word::parse("0", 2).unwrap(), Word::parse("11", 2).unwrap())])
                .unwrap(),
        ] {
            let a = rep.matrix(&BimElement::Prefix(m.clone())).unwrap();
            let b = rep
                .matrix(&crate::bim::bim_star(&BimElement::Prefix(m)))
                .unwrap();
            assert_eq!(a.transpose(), b);
        }
    }

    #[test]
    fn canonical_pair_exhibits_an_infinite_projection() {
        let t = TarskiMatrix::new(unit(), vec![gen(0), gen(1)]).unwrap();
        for depth in 1..=4 {
            let rep = TreeRep::new(2, depth);
            assert!(infinite_projection_check(&t, |m| rep.matrix(m)).unwrap());
        }
    }

    #[test]
    fn cylinder_base_split_certifies_too() {
        let base = cyl("0");
        let t = find_tarski(&base, 2, None, 0).unwrap().matrix.unwrap();
        let rep = TreeRep::new(2, 3);
        assert!(infinite_projection_check(&t, |m| rep.matrix(m)).unwrap());
    }

    #[test]
    fn failing_tuple_or_missing_rep_do_not_certify() {
        let repeated = TarskiMatrix::new(unit(), vec![gen(0), gen(0)]).unwrap();
        let rep = TreeRep::new(2, 2);
        assert!(!infinite_projection_check(&repeated, |m| rep.matrix(m)).unwrap());

        let good = TarskiMatrix::new(unit(), vec![gen(0), gen(1)]).unwrap();
        assert!(infinite_projection_check(&good, |_| None).is_err());
    }

    #[test]
    fn tight_pairs_cover_the_base() {
        let canonical = TarskiMatrix::new(unit(), vec![gen(0), gen(1)]).unwrap();
        let pair = p2_from_tarski(&canonical).unwrap();
        assert!(pair.tight);

        let slack = TarskiMatrix::new(
            unit(),
            vec![
                gen(0),
                BimElement::Prefix(
                    PrefixMap::new(
                        2,
                        vec![(Word::empty(), Word::parse("10", 2).unwrap())],
                    )
                    .unwrap(),
                ),
            ],
        )
        .unwrap();
        let pair = p2_from_tarski(&slack).unwrap();
        assert!(!pair.tight);
        assert_eq!(pair.second.ran_clopen(), cyl("1"));
        assert_eq!(
            pair.first.ran_clopen().join(&pair.second.ran_clopen()).unwrap(),
            unit()
        );

        let wide = find_tarski(&unit(), 3, None, 0).unwrap().matrix.unwrap();
        assert!(p2_from_tarski(&wide).is_err());
    }
}
