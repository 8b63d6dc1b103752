//! Invariant means on the idempotent algebra of a Boolean inverse monoid,
//! decided by an exact rational LP.
//!
//! Variables are atom weights (finite backend) or depth-D cylinder weights
//! (prefix backend, D = requested depth plus enough room for the generators'
//! images). Constraints equate the mass of domain and range of every
//! generator restricted to each depth-d cylinder, plus a normalisation row.
//! For the finite backend a verdict is exact; for the prefix backend only
//! Infeasible is a proof, a feasible system is reported up to the depth.

use crate::clopen::{PrefixCode, Word};
use crate::error::{Error, Result};
use crate::pbij::{GroundSet, PartialBijection};
use crate::prefix::PrefixMap;
use crate::scalar::ratio;
use crate::simplex::{self, LpOutcome};
use crate::Rational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub enum MeanInstance {
    Fin {
        ground: GroundSet,
        generators: Vec<PartialBijection>,
        /// Atoms carrying total mass 1; None means the whole ground set.
        normalization: Option<Vec<usize>>,
    },
    Prefix {
        arity: u8,
        generators: Vec<PrefixMap>,
        normalization: Option<PrefixCode>,
    },
}

impl MeanInstance {
    pub fn fin(ground: GroundSet, generators: Vec<PartialBijection>) -> Self {
        MeanInstance::Fin {
            ground,
            generators,
            normalization: None,
        }
    }

    pub fn prefix(arity: u8, generators: Vec<PrefixMap>) -> Self {
        MeanInstance::Prefix {
            arity,
            generators,
            normalization: None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Mean {
    Atomic {
        ground: GroundSet,
        weights: BTreeMap<usize, Rational>,
    },
    Cylinder {
        arity: u8,
        depth: usize,
        weights: BTreeMap<Word, Rational>,
    },
}

impl Mean {
    /// Mass of a clopen under this mean. Prefix codes deeper than the stored
    /// cylinder depth are rejected.
    pub fn measure_points(&self, points: &[usize]) -> Result<Rational> {
        let Mean::Atomic { weights, .. } = self else {
            return Err(Error::BackendMismatch);
        };
        Ok(points
            .iter()
            .map(|p| weights.get(p).cloned().unwrap_or_else(Rational::zero))
            .sum())
    }

    pub fn measure_code(&self, code: &PrefixCode) -> Result<Rational> {
        let Mean::Cylinder { arity, depth, weights } = self else {
            return Err(Error::BackendMismatch);
        };
        if code.max_depth() > *depth {
            return Err(Error::DepthTooSmall);
        }
        let mut total = Rational::zero();
        for w in code.words() {
            for ext in w.extensions(*depth, *arity) {
                total += weights.get(&ext).cloned().unwrap_or_else(Rational::zero);
            }
        }
        Ok(total)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConstraintLabel {
    /// mu{atom} = mu{g(atom)} for the finite backend.
    FinInvariance { generator: usize, atom: usize },
    /// mu(dom g|C_w) = mu(ran g|C_w) for the prefix backend.
    PrefixInvariance { generator: usize, cylinder: Word },
    Normalization,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CertificateRow {
    pub label: ConstraintLabel,
    pub weight: Rational,
}

/// Dual combination of constraint rows with sum_i w_i * row_i <= 0 on every
/// variable and right-hand sides combining to 1: a rational proof that no
/// nonnegative solution exists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MeanCertificate {
    pub rows: Vec<CertificateRow>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MeanVerdict {
    Feasible(Mean),
    FeasibleUpToDepth(Mean),
    Infeasible(MeanCertificate),
}

struct LpShape {
    labels: Vec<ConstraintLabel>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    vars: VarSpace,
}

enum VarSpace {
    Atoms(GroundSet),
    Words { arity: u8, depth: usize, words: Vec<Word> },
}

impl VarSpace {
    fn len(&self) -> usize {
        match self {
            VarSpace::Atoms(g) => g.size,
            VarSpace::Words { words, .. } => words.len(),
        }
    }

    fn mean_from(&self, x: Vec<Rational>) -> Mean {
        match self {
            VarSpace::Atoms(g) => Mean::Atomic {
                ground: *g,
                weights: (0..g.size).zip(x).collect(),
            },
            VarSpace::Words { arity, depth, words } => Mean::Cylinder {
                arity: *arity,
                depth: *depth,
                weights: words.iter().cloned().zip(x).collect(),
            },
        }
    }
}

/// The cylinder depth the variables live at: deep enough to express every
/// restricted domain and image of the generators, the normalisation clopen,
/// and the requested constraint depth itself.
pub fn variable_depth(generators: &[PrefixMap], normalization: Option<&PrefixCode>, depth: usize) -> usize {
    let mut d = depth;
    for g in generators {
        for (u, v) in g.pairs() {
            d = d.max(u.len()).max(v.len());
            if u.len() <= depth {
                d = d.max(v.len() + depth - u.len());
            }
        }
    }
    if let Some(code) = normalization {
        d = d.max(code.max_depth());
    }
    d
}

/// Domain and image pieces of g restricted to the cylinder of w, as word
/// lists (disjoint on each side).
fn restriction_pieces(g: &PrefixMap, w: &Word) -> (Vec<Word>, Vec<Word>) {
    let mut dom = Vec::new();
    let mut ran = Vec::new();
    for (u, v) in g.pairs() {
        if let Some(t) = u.strip_prefix(w) {
            dom.push(w.clone());
            ran.push(v.concat(&t));
        } else if w.is_prefix_of(u) && w != u {
            dom.push(u.clone());
            ran.push(v.clone());
        }
    }
    (dom, ran)
}

fn fin_row_coeffs(ground: GroundSet, generator: &PartialBijection, atom: usize) -> Result<Vec<Rational>> {
    let mut coeffs = vec![Rational::zero(); ground.size];
    let Some(image) = generator.apply(atom) else {
        return Err(Error::Invalid(format!("atom {atom} outside generator domain")));
    };
    coeffs[atom] += Rational::one();
    coeffs[image] -= Rational::one();
    Ok(coeffs)
}

fn prefix_row_coeffs(
    g: &PrefixMap,
    cylinder: &Word,
    words: &[Word],
    depth: usize,
    arity: u8,
) -> Vec<Rational> {
    let index: BTreeMap<&Word, usize> = words.iter().zip(0..).collect();
    let mut coeffs = vec![Rational::zero(); words.len()];
    let (dom, ran) = restriction_pieces(g, cylinder);
    for piece in &dom {
        for ext in piece.extensions(depth, arity) {
            coeffs[index[&ext]] += Rational::one();
        }
    }
    for piece in &ran {
        for ext in piece.extensions(depth, arity) {
            coeffs[index[&ext]] -= Rational::one();
        }
    }
    coeffs
}

fn build_lp(instance: &MeanInstance, depth: usize) -> Result<LpShape> {
    if depth < 1 {
        return Err(Error::DepthTooSmall);
    }
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    match instance {
        MeanInstance::Fin { ground, generators, normalization } => {
            for (k, g) in generators.iter().enumerate() {
                if g.ground_size() != ground.size {
                    return Err(Error::GroundSetMismatch(ground.size, g.ground_size()));
                }
                for (x, y) in g.entries() {
                    if x == y {
                        continue;
                    }
                    labels.push(ConstraintLabel::FinInvariance { generator: k, atom: x });
                    rows.push(fin_row_coeffs(*ground, g, x)?);
                    rhs.push(Rational::zero());
                }
            }
            let norm: Vec<usize> = match normalization {
                Some(points) => {
                    if let Some(&p) = points.iter().find(|&&p| p >= ground.size) {
                        return Err(Error::PointOutOfRange(p, ground.size));
                    }
                    points.clone()
                }
                None => (0..ground.size).collect(),
            };
            let mut row = vec![Rational::zero(); ground.size];
            for p in norm {
                row[p] = Rational::one();
            }
            labels.push(ConstraintLabel::Normalization);
            rows.push(row);
            rhs.push(Rational::one());
            Ok(LpShape { labels, rows, rhs, vars: VarSpace::Atoms(*ground) })
        }
        MeanInstance::Prefix { arity, generators, normalization } => {
            for g in generators {
                if g.arity() != *arity {
                    return Err(Error::ArityMismatch(*arity, g.arity()));
                }
            }
            let var_depth = variable_depth(generators, normalization.as_ref(), depth);
            let words = Word::empty().extensions(var_depth, *arity);
            for (k, g) in generators.iter().enumerate() {
                for w in Word::empty().extensions(depth, *arity) {
                    let coeffs = prefix_row_coeffs(g, &w, &words, var_depth, *arity);
                    if coeffs.iter().all(Rational::is_zero) {
                        continue;
                    }
                    labels.push(ConstraintLabel::PrefixInvariance { generator: k, cylinder: w });
                    rows.push(coeffs);
                    rhs.push(Rational::zero());
                }
            }
            let norm_words: Vec<Word> = match normalization {
                Some(code) => code.words().to_vec(),
                None => vec![Word::empty()],
            };
            let mut row = vec![Rational::zero(); words.len()];
            let index: BTreeMap<&Word, usize> = words.iter().zip(0..).collect();
            for w in &norm_words {
                for ext in w.extensions(var_depth, *arity) {
                    row[index[&ext]] = Rational::one();
                }
            }
            labels.push(ConstraintLabel::Normalization);
            rows.push(row);
            rhs.push(Rational::one());
            Ok(LpShape {
                labels,
                rows,
                rhs,
                vars: VarSpace::Words { arity: *arity, depth: var_depth, words },
            })
        }
    }
}

pub fn invariant_mean(instance: &MeanInstance, depth: usize) -> Result<MeanVerdict> {
    let shape = build_lp(instance, depth)?;
    match simplex::solve(&shape.rows, &shape.rhs, None) {
        LpOutcome::Feasible { x, .. } => {
            let mean = shape.vars.mean_from(x);
            Ok(match instance {
                MeanInstance::Fin { .. } => MeanVerdict::Feasible(mean),
                MeanInstance::Prefix { .. } => MeanVerdict::FeasibleUpToDepth(mean),
            })
        }
        LpOutcome::Infeasible { farkas } => {
            assert!(simplex::verify_farkas(&shape.rows, &shape.rhs, &farkas));
            let scale = {
                let mut total = Rational::zero();
                for (y, b) in farkas.iter().zip(&shape.rhs) {
                    total += y * b;
                }
                total
            };
            let rows = shape
                .labels
                .into_iter()
                .zip(farkas)
                .filter(|(_, y)| !y.is_zero())
                .map(|(label, y)| CertificateRow { label, weight: y / &scale })
                .collect();
            let cert = MeanCertificate { rows };
            assert!(verify_certificate(instance, depth, &cert)?);
            Ok(MeanVerdict::Infeasible(cert))
        }
        LpOutcome::Unbounded => unreachable!("feasibility problems have no objective"),
    }
}

/// Independent recheck of an infeasibility certificate: rebuild each row
/// from its label alone, recombine, and confirm the contradiction (every
/// variable's coefficient <= 0 while the right-hand sides sum to something
/// positive, so no nonnegative solution can exist).
pub fn verify_certificate(
    instance: &MeanInstance,
    depth: usize,
    cert: &MeanCertificate,
) -> Result<bool> {
    if cert.rows.is_empty() {
        return Ok(false);
    }
    let (nvars, words, var_depth, arity) = match instance {
        MeanInstance::Fin { ground, .. } => (ground.size, Vec::new(), 0, 0),
        MeanInstance::Prefix { arity, generators, normalization } => {
            let d = variable_depth(generators, normalization.as_ref(), depth);
            let words = Word::empty().extensions(d, *arity);
            (words.len(), words, d, *arity)
        }
    };
    let mut combined = vec![Rational::zero(); nvars];
    let mut rhs_total = Rational::zero();
    for row in &cert.rows {
        let coeffs = match (&row.label, instance) {
            (
                ConstraintLabel::FinInvariance { generator, atom },
                MeanInstance::Fin { ground, generators, .. },
            ) => {
                let Some(g) = generators.get(*generator) else {
                    return Ok(false);
                };
                match fin_row_coeffs(*ground, g, *atom) {
                    Ok(c) => c,
                    Err(_) => return Ok(false),
                }
            }
            (
                ConstraintLabel::PrefixInvariance { generator, cylinder },
                MeanInstance::Prefix { arity: a, generators, .. },
            ) => {
                let Some(g) = generators.get(*generator) else {
                    return Ok(false);
                };
                if cylinder.len() != depth {
                    return Ok(false);
                }
                prefix_row_coeffs(g, cylinder, &words, var_depth, *a)
            }
            (ConstraintLabel::Normalization, MeanInstance::Fin { ground, normalization, .. }) => {
                let mut row = vec![Rational::zero(); ground.size];
                let norm: Vec<usize> = match normalization {
                    Some(points) => points.clone(),
                    None => (0..ground.size).collect(),
                };
                for p in norm {
                    if p >= ground.size {
                        return Ok(false);
                    }
                    row[p] = Rational::one();
                }
                row
            }
            (ConstraintLabel::Normalization, MeanInstance::Prefix { normalization, .. }) => {
                let mut row = vec![Rational::zero(); nvars];
                let index: BTreeMap<&Word, usize> = words.iter().zip(0..).collect();
                let norm_words: Vec<Word> = match normalization {
                    Some(code) => code.words().to_vec(),
                    None => vec![Word::empty()],
                };
                for w in &norm_words {
                    for ext in w.extensions(var_depth, arity) {
                        row[index[&ext]] = Rational::one();
                    }
                }
                row
            }
            _ => return Ok(false),
        };
        for (acc, c) in combined.iter_mut().zip(&coeffs) {
            *acc += &row.weight * c;
        }
        if row.label == ConstraintLabel::Normalization {
            rhs_total += &row.weight;
        }
    }
    Ok(combined.iter().all(|c| *c <= Rational::zero()) && rhs_total > Rational::zero())
}

/// Exact recheck that a mean satisfies every generator's invariance, straight
/// from the generator action rather than the LP rows.
pub fn mean_is_invariant(instance: &MeanInstance, mean: &Mean) -> Result<bool> {
    match (instance, mean) {
        (MeanInstance::Fin { generators, .. }, Mean::Atomic { weights, .. }) => {
            for g in generators {
                for (x, y) in g.entries() {
                    let wx = weights.get(&x).cloned().unwrap_or_else(Rational::zero);
                    let wy = weights.get(&y).cloned().unwrap_or_else(Rational::zero);
                    if wx != wy {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        (MeanInstance::Prefix { generators, .. }, Mean::Cylinder { .. }) => {
            for g in generators {
                for (u, v) in g.pairs() {
                    let du = PrefixCode::new(g.arity(), vec![u.clone()])?;
                    let dv = PrefixCode::new(g.arity(), vec![v.clone()])?;
                    if mean.measure_code(&du)? != mean.measure_code(&dv)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        _ => Err(Error::BackendMismatch),
    }
}

/// Largest and smallest feasible weight of every variable; the mean is unique
/// iff they agree everywhere, in which case the point is returned.
pub fn unique_mean(instance: &MeanInstance, depth: usize) -> Result<Option<Mean>> {
    let shape = build_lp(instance, depth)?;
    let n = shape.vars.len();
    let mut point = Vec::with_capacity(n);
    for j in 0..n {
        let mut c = vec![Rational::zero(); n];
        c[j] = Rational::one();
        let hi = match simplex::solve(&shape.rows, &shape.rhs, Some(&c)) {
            LpOutcome::Feasible { objective, .. } => objective.unwrap(),
            _ => return Ok(None),
        };
        c[j] = -Rational::one();
        let lo = match simplex::solve(&shape.rows, &shape.rhs, Some(&c)) {
            LpOutcome::Feasible { objective, .. } => -objective.unwrap(),
            _ => return Ok(None),
        };
        if hi != lo {
            return Ok(None);
        }
        point.push(hi);
    }
    Ok(Some(shape.vars.mean_from(point)))
}

#[derive(Clone, Debug)]
pub enum FaithfulnessOutcome {
    /// Every atom can carry positive mass; the averaged optimiser does.
    Faithful(Mean),
    /// Some atom is forced to zero mass by invariance.
    DeadAtom { description: String },
    Infeasible(MeanCertificate),
}

pub fn faithful_mean(instance: &MeanInstance, depth: usize) -> Result<FaithfulnessOutcome> {
    let cert = match invariant_mean(instance, depth)? {
        MeanVerdict::Infeasible(c) => Some(c),
        _ => None,
    };
    if let Some(c) = cert {
        return Ok(FaithfulnessOutcome::Infeasible(c));
    }
    let shape = build_lp(instance, depth)?;
    let n = shape.vars.len();
    let mut average = vec![Rational::zero(); n];
    for j in 0..n {
        // Cap the target weight at 1 via a slack row so the objective stays
        // bounded even when the normalisation misses this variable's
        // equality class. The capped optimum is positive iff the true
        // supremum is.
        let mut rows: Vec<Vec<Rational>> = shape
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.push(Rational::zero());
                r
            })
            .collect();
        let mut cap = vec![Rational::zero(); n + 1];
        cap[j] = Rational::one();
        cap[n] = Rational::one();
        rows.push(cap);
        let mut rhs = shape.rhs.clone();
        rhs.push(Rational::one());
        let mut c = vec![Rational::zero(); n + 1];
        c[j] = Rational::one();
        let LpOutcome::Feasible { mut x, objective } = simplex::solve(&rows, &rhs, Some(&c))
        else {
            unreachable!("feasibility settled above and the objective is capped");
        };
        if objective.unwrap().is_zero() {
            let description = match &shape.vars {
                VarSpace::Atoms(_) => format!("atom {j}"),
                VarSpace::Words { words, .. } => format!("cylinder {}", words[j]),
            };
            return Ok(FaithfulnessOutcome::DeadAtom { description });
        }
        x.truncate(n);
        for (acc, v) in average.iter_mut().zip(x) {
            *acc += v;
        }
    }
    let count = ratio(n as i64, 1);
    for a in &mut average {
        *a /= &count;
    }
    Ok(FaithfulnessOutcome::Faithful(shape.vars.mean_from(average)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::symmetric_inverse_monoid_generators;
    use crate::prefix;

    fn p2_instance() -> MeanInstance {
        MeanInstance::prefix(
            2,
            vec![
                PrefixMap::cuntz_generator(2, 0),
                PrefixMap::cuntz_generator(2, 1),
            ],
        )
    }

    #[test]
    fn cuntz_monoid_has_no_mean_at_depth_one() {
        let verdict = invariant_mean(&p2_instance(), 1).unwrap();
        let MeanVerdict::Infeasible(cert) = verdict else {
            panic!("expected infeasibility, got {verdict:?}");
        };
        assert!(verify_certificate(&p2_instance(), 1, &cert).unwrap());
        // normalised certificate: right-hand sides recombine to exactly 1
        let rhs: Rational = cert
            .rows
            .iter()
            .filter(|r| r.label == ConstraintLabel::Normalization)
            .map(|r| r.weight.clone())
            .sum();
        assert_eq!(rhs, Rational::one());
    }

    #[test]
    fn tampered_certificate_rejected() {
        let MeanVerdict::Infeasible(mut cert) = invariant_mean(&p2_instance(), 1).unwrap() else {
            panic!("expected infeasibility");
        };
        cert.rows[0].weight += Rational::one();
        assert!(!verify_certificate(&p2_instance(), 1, &cert).unwrap());
    }

    #[test]
    fn full_monoid_on_three_points_has_unique_uniform_mean() {
        let ground = GroundSet::new(3);
        let instance = MeanInstance::fin(ground, symmetric_inverse_monoid_generators(ground));
        let verdict = invariant_mean(&instance, 1).unwrap();
        let MeanVerdict::Feasible(mean) = verdict else {
            panic!("finite instances always carry the counting mean");
        };
        assert!(mean_is_invariant(&instance, &mean).unwrap());
        assert_eq!(mean.measure_points(&[0, 1]).unwrap(), ratio(2, 3));

        let unique = unique_mean(&instance, 1).unwrap().expect("unique");
        assert_eq!(unique.measure_points(&[0]).unwrap(), ratio(1, 3));
        assert_eq!(unique.measure_points(&[0, 1, 2]).unwrap(), Rational::one());
    }

    #[test]
    fn one_point_monoid_mean_is_trivial() {
        let ground = GroundSet::new(1);
        let instance = MeanInstance::fin(ground, vec![PartialBijection::identity(ground)]);
        let MeanVerdict::Feasible(mean) = invariant_mean(&instance, 1).unwrap() else {
            panic!("expected feasible");
        };
        assert_eq!(mean.measure_points(&[0]).unwrap(), Rational::one());
    }

    #[test]
    fn swap_map_is_feasible_up_to_depth() {
        let swap = PrefixMap::new(
            2,
            vec![
                (Word::parse("0", 2).unwrap(), Word::parse("1", 2).unwrap()),
                (Word::parse("1", 2).unwrap(), Word::parse("0", 2).unwrap()),
            ],
        )
        .unwrap();
        let instance = MeanInstance::prefix(2, vec![swap]);
        for depth in 1..=3 {
            let MeanVerdict::FeasibleUpToDepth(mean) = invariant_mean(&instance, depth).unwrap()
            else {
                panic!("swap admits the uniform mean");
            };
            assert!(mean_is_invariant(&instance, &mean).unwrap());
        }
    }

    #[test]
    fn redundant_generators_leave_verdict_unchanged() {
        let base = p2_instance();
        let MeanInstance::Prefix { generators, .. } = &base else { unreachable!() };
        let extra = prefix::compose(&generators[0], &generators[1]).unwrap();
        let mut padded_gens = generators.clone();
        padded_gens.push(extra);
        let padded = MeanInstance::prefix(2, padded_gens);
        {
            let (inst, other) = (&base, &padded);
            let a = matches!(invariant_mean(inst, 2).unwrap(), MeanVerdict::Infeasible(_));
            let b = matches!(invariant_mean(other, 2).unwrap(), MeanVerdict::Infeasible(_));
            assert_eq!(a, b);
        }

        let ground = GroundSet::new(3);
        let gens = symmetric_inverse_monoid_generators(ground);
        let mut padded = gens.clone();
        padded.push(crate::pbij::compose(&gens[0], &gens[1]).unwrap());
        let v1 = invariant_mean(&MeanInstance::fin(ground, gens), 1).unwrap();
        let v2 = invariant_mean(&MeanInstance::fin(ground, padded), 1).unwrap();
        assert!(matches!(v1, MeanVerdict::Feasible(_)));
        assert!(matches!(v2, MeanVerdict::Feasible(_)));
    }

    #[test]
    fn depth_zero_rejected() {
        assert_eq!(
            invariant_mean(&p2_instance(), 0).unwrap_err(),
            Error::DepthTooSmall
        );
    }

    #[test]
    fn faithfulness_on_small_instances() {
        let ground = GroundSet::new(2);
        let free = MeanInstance::fin(ground, vec![PartialBijection::identity(ground)]);
        match faithful_mean(&free, 1).unwrap() {
            FaithfulnessOutcome::Faithful(mean) => {
                assert!(mean.measure_points(&[0]).unwrap() > Rational::zero());
                assert!(mean.measure_points(&[1]).unwrap() > Rational::zero());
            }
            other => panic!("expected faithful, got {other:?}"),
        }

        // normalisation misses atom 1, whose weight is then unbounded; the
        // capped search must still classify it as alive
        let unbounded = MeanInstance::Fin {
            ground,
            generators: vec![PartialBijection::identity(ground)],
            normalization: Some(vec![0]),
        };
        match faithful_mean(&unbounded, 1).unwrap() {
            FaithfulnessOutcome::Faithful(mean) => {
                assert_eq!(mean.measure_points(&[0]).unwrap(), Rational::one());
                assert!(mean.measure_points(&[1]).unwrap() > Rational::zero());
            }
            other => panic!("expected faithful, got {other:?}"),
        }
    }

    #[test]
    fn lone_isometry_starves_cylinders() {
        // a_1 alone forces mu(C_0) = mu(C_00), so mu(C_01) = 0
        let inst = MeanInstance::prefix(2, vec![PrefixMap::cuntz_generator(2, 0)]);
        assert!(matches!(
            invariant_mean(&inst, 1).unwrap(),
            MeanVerdict::FeasibleUpToDepth(_)
        ));
        match faithful_mean(&inst, 1).unwrap() {
            FaithfulnessOutcome::DeadAtom { description } => {
                assert_eq!(description, "cylinder 01");
            }
            other => panic!("expected a dead cylinder, got {other:?}"),
        }
    }
}
