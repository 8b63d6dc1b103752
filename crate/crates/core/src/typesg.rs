//! The type semigroup: formal sums of clopens compared up to matrix-witnessed
//! D-equivalence, with the almost-unperforation scan.
//!
//! Comparisons are complete for the two registered instance classes. Over a
//! finite ground set the ambient monoid is all partial bijections, where
//! equivalence is exactly equicardinality. Over the prefix backend every
//! nonzero clopen is equivalent to the unit and two units merge into one, so
//! all nonzero elements collapse.

use crate::bim::{bim_compose, bim_star, BimElement};
use crate::clopen::{Clopen, PrefixCode, Word};
use crate::error::{Error, Result};
use crate::pbij::{GroundSet, PartialBijection};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct TypeElement {
    summands: Vec<Clopen>,
}

impl TypeElement {
    /// Canonical form: zero summands dropped, rest sorted. All summands must
    /// share a backend (an empty sum is compatible with either).
    pub fn new(summands: Vec<Clopen>) -> Result<Self> {
        let mut kept: Vec<Clopen> = summands.into_iter().filter(|c| !c.is_zero()).collect();
        for pair in kept.windows(2) {
            match (&pair[0], &pair[1]) {
                (Clopen::Fin { ground: a, .. }, Clopen::Fin { ground: b, .. }) => {
                    if a != b {
                        return Err(Error::GroundSetMismatch(a.size, b.size));
                    }
                }
                (Clopen::Prefix(a), Clopen::Prefix(b)) => {
                    if a.arity() != b.arity() {
                        return Err(Error::ArityMismatch(a.arity(), b.arity()));
                    }
                }
                _ => return Err(Error::BackendMismatch),
            }
        }
        kept.sort();
        Ok(TypeElement { summands: kept })
    }

    pub fn zero() -> Self {
        TypeElement { summands: Vec::new() }
    }

    pub fn summands(&self) -> &[Clopen] {
        &self.summands
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    /// Total point count over the finite backend.
    pub fn cardinality(&self) -> Option<usize> {
        self.summands
            .iter()
            .map(|c| match c {
                Clopen::Fin { points, .. } => Some(points.len()),
                Clopen::Prefix(_) => None,
            })
            .sum()
    }
}

pub fn type_add(x: &TypeElement, y: &TypeElement) -> Result<TypeElement> {
    let mut all = x.summands.clone();
    all.extend(y.summands.iter().cloned());
    TypeElement::new(all)
}

pub fn type_scale(x: &TypeElement, k: usize) -> TypeElement {
    let mut summands = Vec::with_capacity(x.summands.len() * k);
    for _ in 0..k {
        summands.extend(x.summands.iter().cloned());
    }
    TypeElement { summands }
}

/// One block of a D-equivalence matrix: an element whose domain is a piece of
/// left summand `source_slot` and whose range is a piece of right summand
/// `target_slot`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WitnessBlock {
    pub element: BimElement,
    pub source_slot: usize,
    pub target_slot: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquivalenceWitness {
    pub blocks: Vec<WitnessBlock>,
}

#[derive(Clone, Debug)]
pub enum Comparison {
    Equal {
        forward: EquivalenceWitness,
        backward: EquivalenceWitness,
    },
    Leq {
        witness: EquivalenceWitness,
    },
    NotLeq {
        exhaustive: bool,
    },
    Unknown,
}

impl Comparison {
    pub fn leq_holds(&self) -> bool {
        matches!(self, Comparison::Equal { .. } | Comparison::Leq { .. })
    }
}

/// Do the given clopens partition `whole`: pairwise disjoint with join equal
/// to the whole.
fn is_partition(pieces: &[Clopen], whole: &Clopen) -> Result<bool> {
    for (i, a) in pieces.iter().enumerate() {
        for b in &pieces[i + 1..] {
            if !a.meet(b)?.is_zero() {
                return Ok(false);
            }
        }
    }
    let mut union = match whole {
        Clopen::Fin { ground, .. } => Clopen::fin(*ground, Vec::new())?,
        Clopen::Prefix(code) => Clopen::prefix(PrefixCode::zero(code.arity())),
    };
    for p in pieces {
        union = union.join(p)?;
    }
    Ok(union == *whole)
}

/// Check that the blocks implement x ~ y: sources partition every left
/// summand, targets partition every right summand.
pub fn verify_equal_witness(
    x: &TypeElement,
    y: &TypeElement,
    w: &EquivalenceWitness,
) -> Result<bool> {
    verify_side(x, w, Side::Source, true)
        .and_then(|ok| Ok(ok && verify_side(y, w, Side::Target, true)?))
}

/// Check that the blocks implement x <= y: sources partition every left
/// summand, targets are pairwise disjoint pieces inside their right summands.
pub fn verify_leq_witness(
    x: &TypeElement,
    y: &TypeElement,
    w: &EquivalenceWitness,
) -> Result<bool> {
    verify_side(x, w, Side::Source, true)
        .and_then(|ok| Ok(ok && verify_side(y, w, Side::Target, false)?))
}

enum Side {
    Source,
    Target,
}

fn verify_side(
    element: &TypeElement,
    w: &EquivalenceWitness,
    side: Side,
    exact: bool,
) -> Result<bool> {
    let slot_of = |b: &WitnessBlock| match side {
        Side::Source => b.source_slot,
        Side::Target => b.target_slot,
    };
    let piece_of = |b: &WitnessBlock| match side {
        Side::Source => b.element.dom_clopen(),
        Side::Target => b.element.ran_clopen(),
    };
    if w.blocks.iter().any(|b| slot_of(b) >= element.summands.len()) {
        return Ok(false);
    }
    for (slot, whole) in element.summands.iter().enumerate() {
        let pieces: Vec<Clopen> = w
            .blocks
            .iter()
            .filter(|b| slot_of(b) == slot)
            .map(&piece_of)
            .collect();
        if exact {
            if !is_partition(&pieces, whole)? {
                return Ok(false);
            }
        } else {
            for (i, a) in pieces.iter().enumerate() {
                if !a.leq(whole)? {
                    return Ok(false);
                }
                for b in &pieces[i + 1..] {
                    if !a.meet(b)?.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

pub fn witness_star(w: &EquivalenceWitness) -> EquivalenceWitness {
    EquivalenceWitness {
        blocks: w
            .blocks
            .iter()
            .map(|b| WitnessBlock {
                element: bim_star(&b.element),
                source_slot: b.target_slot,
                target_slot: b.source_slot,
            })
            .collect(),
    }
}

/// Chain two witnesses through their shared middle element: blocks compose
/// wherever u's target slot meets v's source slot, empty composites dropped.
pub fn witness_compose(u: &EquivalenceWitness, v: &EquivalenceWitness) -> Result<EquivalenceWitness> {
    let mut blocks = Vec::new();
    for a in &u.blocks {
        for b in &v.blocks {
            if a.target_slot != b.source_slot {
                continue;
            }
            let composite = bim_compose(&a.element, &b.element)?;
            if composite.is_zero() {
                continue;
            }
            blocks.push(WitnessBlock {
                element: composite,
                source_slot: a.source_slot,
                target_slot: b.target_slot,
            });
        }
    }
    Ok(EquivalenceWitness { blocks })
}

fn fin_points(x: &TypeElement) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (slot, c) in x.summands.iter().enumerate() {
        if let Clopen::Fin { points, .. } = c {
            out.extend(points.iter().map(|&p| (slot, p)));
        }
    }
    out
}

/// Pair left points with right points positionally and bundle the pairs into
/// one partial bijection per (source slot, target slot).
fn fin_blocks(
    ground: GroundSet,
    left: &[(usize, usize)],
    right: &[(usize, usize)],
) -> Result<Vec<WitnessBlock>> {
    let mut grouped: std::collections::BTreeMap<(usize, usize), Vec<(usize, usize)>> =
        std::collections::BTreeMap::new();
    for ((ls, lp), (rs, rp)) in left.iter().zip(right) {
        grouped.entry((*ls, *rs)).or_default().push((*lp, *rp));
    }
    grouped
        .into_iter()
        .map(|((source_slot, target_slot), pairs)| {
            Ok(WitnessBlock {
                element: BimElement::FinPB(PartialBijection::new(ground, pairs)?),
                source_slot,
                target_slot,
            })
        })
        .collect()
}

/// Cut the unit clopen into k nonzero pieces: 0, 10, 110, .., 1^(k-1).
fn unit_partition(arity: u8, k: usize) -> Vec<PrefixCode> {
    assert!(k >= 1);
    let mut out = Vec::with_capacity(k);
    let mut prefix = Word::empty();
    for i in 0..k {
        let piece = if i + 1 == k { prefix.clone() } else { prefix.child(0) };
        out.push(PrefixCode::new(arity, vec![piece]).expect("single word is a code"));
        prefix = prefix.child(1);
    }
    out
}

/// Witness collapsing a nonzero prefix TypeElement onto the single unit
/// clopen: summand i is carried onto the i-th piece of a unit partition.
fn prefix_collapse_witness(arity: u8, x: &TypeElement) -> Result<EquivalenceWitness> {
    let pieces = unit_partition(arity, x.summands.len());
    let mut blocks = Vec::new();
    for (slot, summand) in x.summands.iter().enumerate() {
        let Clopen::Prefix(code) = summand else {
            return Err(Error::BackendMismatch);
        };
        let target = Clopen::prefix(pieces[slot].clone());
        let out = crate::bim::d_witness(&Clopen::prefix(code.clone()), &target, None, 0)?;
        let element = out.witness.expect("nonzero prefix clopens are equivalent");
        blocks.push(WitnessBlock {
            element,
            source_slot: slot,
            target_slot: 0,
        });
    }
    Ok(EquivalenceWitness { blocks })
}

/// Decide x against y. `budget` caps the number of witness blocks a positive
/// verdict may use; a comparison needing more returns Unknown.
pub fn type_compare(x: &TypeElement, y: &TypeElement, budget: usize) -> Result<Comparison> {
    let backend_fin = |t: &TypeElement| {
        t.summands.first().map(|c| matches!(c, Clopen::Fin { .. }))
    };
    match (backend_fin(x), backend_fin(y)) {
        (Some(a), Some(b)) if a != b => return Err(Error::BackendMismatch),
        _ => {}
    }
    if x.is_zero() || y.is_zero() {
        return Ok(match (x.is_zero(), y.is_zero()) {
            (true, true) => Comparison::Equal {
                forward: EquivalenceWitness { blocks: Vec::new() },
                backward: EquivalenceWitness { blocks: Vec::new() },
            },
            (true, false) => Comparison::Leq {
                witness: EquivalenceWitness { blocks: Vec::new() },
            },
            (false, true) => Comparison::NotLeq { exhaustive: true },
            (false, false) => unreachable!(),
        });
    }
    match (&x.summands[0], &y.summands[0]) {
        (Clopen::Fin { ground, .. }, Clopen::Fin { .. }) => {
            let left = fin_points(x);
            let right = fin_points(y);
            if left.len() == right.len() {
                let forward_blocks = fin_blocks(*ground, &left, &right)?;
                if forward_blocks.len() > budget {
                    return Ok(Comparison::Unknown);
                }
                let forward = EquivalenceWitness { blocks: forward_blocks };
                let backward = witness_star(&forward);
                debug_assert!(verify_equal_witness(x, y, &forward)?);
                debug_assert!(verify_equal_witness(y, x, &backward)?);
                Ok(Comparison::Equal { forward, backward })
            } else if left.len() < right.len() {
                let blocks = fin_blocks(*ground, &left, &right[..left.len()])?;
                if blocks.len() > budget {
                    return Ok(Comparison::Unknown);
                }
                let witness = EquivalenceWitness { blocks };
                debug_assert!(verify_leq_witness(x, y, &witness)?);
                Ok(Comparison::Leq { witness })
            } else {
                // equicardinality decides equivalence here, so counting is final
                Ok(Comparison::NotLeq { exhaustive: true })
            }
        }
        (Clopen::Prefix(code), Clopen::Prefix(_)) => {
            let arity = code.arity();
            let up = prefix_collapse_witness(arity, x)?;
            let down = witness_star(&prefix_collapse_witness(arity, y)?);
            let forward = witness_compose(&up, &down)?;
            if forward.blocks.len() > budget {
                return Ok(Comparison::Unknown);
            }
            let backward = witness_star(&forward);
            debug_assert!(verify_equal_witness(x, y, &forward)?);
            debug_assert!(verify_equal_witness(y, x, &backward)?);
            Ok(Comparison::Equal { forward, backward })
        }
        _ => Err(Error::BackendMismatch),
    }
}

#[derive(Clone, Debug)]
pub enum TypeUniverse {
    /// All nonzero subsets of the ground set.
    Fin { ground: GroundSet },
    /// All nonzero clopens generated by words of at most the given depth.
    Prefix { arity: u8, depth: usize },
}

impl TypeUniverse {
    fn base_clopens(&self) -> Vec<Clopen> {
        match self {
            TypeUniverse::Fin { ground } => {
                let n = ground.size;
                (1..(1usize << n))
                    .map(|mask| {
                        let points = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                        Clopen::fin(*ground, points).expect("mask points in range")
                    })
                    .collect()
            }
            TypeUniverse::Prefix { arity, depth } => {
                let leaves = Word::empty().extensions(*depth, *arity);
                (1..(1usize << leaves.len()))
                    .map(|mask| {
                        let words = leaves
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, w)| w.clone())
                            .collect();
                        Clopen::prefix(PrefixCode::new(*arity, words).expect("leaf subset"))
                    })
                    .collect()
            }
        }
    }

    /// All TypeElements with between 1 and `size_bound` summands, summands
    /// drawn with repetition from the base clopens.
    fn elements(&self, size_bound: usize) -> Vec<TypeElement> {
        let base = self.base_clopens();
        let mut out = vec![TypeElement::zero()];
        let mut layer: Vec<Vec<Clopen>> = vec![Vec::new()];
        for _ in 0..size_bound {
            let mut next = Vec::new();
            for partial in &layer {
                let start = partial
                    .last()
                    .map(|c| base.iter().position(|b| b == c).unwrap())
                    .unwrap_or(0);
                for b in &base[start..] {
                    let mut with = partial.clone();
                    with.push(b.clone());
                    next.push(with);
                }
            }
            out.extend(
                next.iter()
                    .map(|s| TypeElement::new(s.clone()).expect("uniform backend")),
            );
            layer = next;
        }
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug)]
pub struct PerforationViolation {
    pub n: usize,
    pub x: TypeElement,
    pub y: TypeElement,
}

#[derive(Clone, Debug)]
pub struct PerforationReport {
    pub checked: usize,
    pub violations: Vec<PerforationViolation>,
}

/// Scan for failures of (n+1)x <= ny implying x <= y over all elements of
/// the universe with at most `size_bound` summands and all n <= n_max.
pub fn almost_unperforated(
    universe: &TypeUniverse,
    n_max: usize,
    size_bound: usize,
    budget: usize,
) -> Result<PerforationReport> {
    let elements = universe.elements(size_bound);
    let mut checked = 0;
    let mut violations = Vec::new();
    for x in &elements {
        for y in &elements {
            for n in 1..=n_max {
                checked += 1;
                let lhs = type_scale(x, n + 1);
                let rhs = type_scale(y, n);
                let premise = type_compare(&lhs, &rhs, budget)?.leq_holds();
                if premise && !type_compare(x, y, budget)?.leq_holds() {
                    violations.push(PerforationViolation {
                        n,
                        x: x.clone(),
                        y: y.clone(),
                    });
                }
            }
        }
    }
    Ok(PerforationReport { checked, violations })
}
