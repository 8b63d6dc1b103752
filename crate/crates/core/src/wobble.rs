//! Bounded-displacement partial bijections on finite metric spaces, and
//! matching-backed certificates for whether a subset doubles into its
//! C-neighborhood.

use crate::error::{Error, Result};
use crate::matching::{deficiency_witness, maximum_matching, BipartiteGraph};
use crate::metric::FiniteMetricSpace;
use crate::pbij::PartialBijection;
use crate::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

/// A partial bijection whose every move stays within the stated bound.
#[derive(Clone, Debug)]
pub struct PartialTranslation {
    pb: PartialBijection,
    bound: Rational,
    tight_bound: Rational,
}

impl PartialTranslation {
    pub fn pb(&self) -> &PartialBijection {
        &self.pb
    }

    /// The bound the translation was validated against.
    pub fn bound(&self) -> &Rational {
        &self.bound
    }

    /// The largest displacement actually used.
    pub fn tight_bound(&self) -> &Rational {
        &self.tight_bound
    }
}

/// Validate the displacement bound and record the minimal one that works.
pub fn make_translation(
    pb: PartialBijection,
    space: &FiniteMetricSpace,
    bound: &Rational,
) -> Result<PartialTranslation> {
    if pb.ground_size() != space.len() {
        return Err(Error::GroundSetMismatch(pb.ground_size(), space.len()));
    }
    let threshold = space.threshold(bound)?;
    let mut max_disp = 0u64;
    for (x, y) in pb.entries() {
        let d = space.dist(x, y);
        if d > threshold {
            return Err(Error::DisplacementExceeded {
                point: x,
                bound: bound.to_string(),
            });
        }
        max_disp = max_disp.max(d);
    }
    let tight_bound = Rational::new(BigInt::from(max_disp), BigInt::from(space.scale()));
    Ok(PartialTranslation {
        pb,
        bound: bound.clone(),
        tight_bound,
    })
}

/// Units of the translation structure: total self-bijections within the
/// bound. Any shape mismatch simply fails membership.
pub fn wobbling_membership(
    pb: &PartialBijection,
    space: &FiniteMetricSpace,
    bound: &Rational,
) -> bool {
    if pb.ground_size() != space.len() || !pb.is_total_bijection() || bound.is_negative() {
        return false;
    }
    let threshold = match space.threshold(bound) {
        Ok(t) => t,
        Err(_) => return false,
    };
    pb.entries().into_iter().all(|(x, y)| space.dist(x, y) <= threshold)
}

/// Either a doubling of E into its C-neighborhood or a witness that none
/// exists.
#[derive(Clone, Debug)]
pub enum DoublingCertificate {
    Injection(DoublingInjection),
    HallViolator(HallViolator),
}

impl DoublingCertificate {
    pub fn doubled(&self) -> bool {
        matches!(self, DoublingCertificate::Injection(_))
    }
}

/// An injective placement of two copies of E: each assignment moves `point`
/// (copy 1 or 2) to `target` within the bound.
#[derive(Clone, Debug)]
pub struct DoublingInjection {
    pub assignments: Vec<(usize, u8, usize)>,
}

/// Doubled points whose joint neighborhood is too small to receive them.
#[derive(Clone, Debug)]
pub struct HallViolator {
    pub subset: Vec<(usize, u8)>,
    pub neighborhood: Vec<usize>,
}

struct DoublingProblem {
    right_points: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
}

/// One pass over X x E builds the neighborhood and the edge lists together.
fn doubling_problem(
    space: &FiniteMetricSpace,
    subset: &[usize],
    threshold: u64,
) -> DoublingProblem {
    let mut right_points = Vec::new();
    let mut per_source: Vec<Vec<usize>> = vec![Vec::new(); subset.len()];
    for y in 0..space.len() {
        let mut hit = false;
        for (i, &x) in subset.iter().enumerate() {
            if space.dist(x, y) <= threshold {
                if !hit {
                    right_points.push(y);
                    hit = true;
                }
                per_source[i].push(right_points.len() - 1);
            }
        }
    }
    let mut adjacency = per_source.clone();
    adjacency.extend(per_source);
    DoublingProblem {
        right_points,
        adjacency,
    }
}

/// Decide whether two copies of `subset` inject into its neighborhood with
/// moves within `bound`; the failure branch carries a deficiency set from
/// the matching's final alternating cut.
pub fn doubling_certificate(
    space: &FiniteMetricSpace,
    subset: &[usize],
    bound: &Rational,
) -> Result<DoublingCertificate> {
    if subset.is_empty() {
        return Err(Error::Invalid("empty subset".into()));
    }
    if let Some(&p) = subset.iter().find(|&&p| p >= space.len()) {
        return Err(Error::PointOutOfRange(p, space.len()));
    }
    let threshold = space.threshold(bound)?;
    let problem = doubling_problem(space, subset, threshold);
    let graph = BipartiteGraph::new(
        2 * subset.len(),
        problem.right_points.len(),
        problem.adjacency,
    );
    let matching = maximum_matching(&graph);
    let copy_of = |left: usize| {
        if left < subset.len() {
            (subset[left], 1u8)
        } else {
            (subset[left - subset.len()], 2u8)
        }
    };
    let certificate = if matching.is_perfect() {
        let assignments = matching
            .pairing
            .iter()
            .enumerate()
            .map(|(left, y)| {
                let (point, copy) = copy_of(left);
                (point, copy, problem.right_points[y.expect("perfect matching")])
            })
            .collect();
        DoublingCertificate::Injection(DoublingInjection { assignments })
    } else {
        let witness = deficiency_witness(&graph, &matching).expect("matching is not perfect");
        DoublingCertificate::HallViolator(HallViolator {
            subset: witness.left_set.iter().map(|&l| copy_of(l)).collect(),
            neighborhood: witness
                .neighborhood
                .iter()
                .map(|&y| problem.right_points[y])
                .collect(),
        })
    };
    debug_assert!(verify_doubling(space, subset, bound, &certificate)?);
    Ok(certificate)
}

/// Recheck a certificate against nothing but the metric: injections must be
/// injective, complete, and within the bound; violators must name a doubled
/// set whose true neighborhood is smaller.
pub fn verify_doubling(
    space: &FiniteMetricSpace,
    subset: &[usize],
    bound: &Rational,
    certificate: &DoublingCertificate,
) -> Result<bool> {
    let threshold = space.threshold(bound)?;
    match certificate {
        DoublingCertificate::Injection(inj) => {
            let mut expected: Vec<(usize, u8)> = Vec::new();
            for &x in subset {
                expected.push((x, 1));
                expected.push((x, 2));
            }
            let mut sources: Vec<(usize, u8)> =
                inj.assignments.iter().map(|&(x, c, _)| (x, c)).collect();
            sources.sort();
            expected.sort();
            if sources != expected {
                return Ok(false);
            }
            let mut targets: Vec<usize> = inj.assignments.iter().map(|&(_, _, y)| y).collect();
            targets.sort();
            if targets.windows(2).any(|w| w[0] == w[1]) {
                return Ok(false);
            }
            Ok(inj.assignments.iter().all(|&(x, _, y)| {
                y < space.len() && space.dist(x, y) <= threshold
            }))
        }
        DoublingCertificate::HallViolator(v) => {
            let mut named = v.subset.clone();
            named.sort();
            named.dedup();
            if named.len() != v.subset.len() {
                return Ok(false);
            }
            if v.subset.iter().any(|&(x, c)| !subset.contains(&x) || !(1..=2).contains(&c)) {
                return Ok(false);
            }
            let sources: Vec<usize> = v.subset.iter().map(|&(x, _)| x).collect();
            let actual = space.neighborhood(&sources, threshold);
            Ok(actual == v.neighborhood && actual.len() < v.subset.len())
        }
    }
}

/// Concentric test families for the growth scan.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BallFamily {
    /// Line segment; the subset is a centered interval of the given radius.
    Path,
    /// Square grid; the subset is a centered Manhattan diamond.
    Grid,
    /// Complete binary tree of depth = radius; the subset is the interior.
    Tree,
}

#[derive(Clone, Debug)]
pub struct ScanEntry {
    pub radius: usize,
    pub space_size: usize,
    pub subset_size: usize,
    pub neighborhood_size: usize,
    /// |N_C(E)| / |E|; doubling needs this to reach 2.
    pub ratio: Rational,
    pub certificate: DoublingCertificate,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub entries: Vec<ScanEntry>,
    pub first_success: Option<usize>,
    pub first_failure: Option<usize>,
}

impl ScanReport {
    /// Scope label carried into every serialized report.
    pub fn scope_note(&self) -> &'static str {
        "finite-scale doubling evidence; no asymptotic claim"
    }
}

fn family_instance(
    family: BallFamily,
    radius: usize,
    pad: usize,
) -> Result<(FiniteMetricSpace, Vec<usize>)> {
    match family {
        BallFamily::Path => {
            let space = FiniteMetricSpace::path(2 * (radius + pad) + 1)?;
            let center = radius + pad;
            let subset = (center - radius..=center + radius).collect();
            Ok((space, subset))
        }
        BallFamily::Grid => {
            let side = 2 * (radius + pad) + 1;
            let space = FiniteMetricSpace::grid(side)?;
            let center = radius + pad;
            let subset = (0..side * side)
                .filter(|p| {
                    let (r, c) = (p / side, p % side);
                    r.abs_diff(center) + c.abs_diff(center) <= radius
                })
                .collect();
            Ok((space, subset))
        }
        BallFamily::Tree => {
            if radius == 0 {
                return Err(Error::Invalid("tree family needs depth at least 1".into()));
            }
            let space = FiniteMetricSpace::tree(radius)?;
            let interior = (1usize << radius) - 1;
            Ok((space, (0..interior).collect()))
        }
    }
}

/// Run the doubling decision over a family of growing subsets. Spaces are
/// padded so every neighborhood is honest, never clipped at an edge.
pub fn supramenability_scan(
    family: BallFamily,
    radii: std::ops::RangeInclusive<usize>,
    bound: &Rational,
) -> Result<ScanReport> {
    if bound.is_negative() {
        return Err(Error::Invalid("negative bound".into()));
    }
    let pad = bound
        .ceil()
        .to_integer()
        .to_usize()
        .ok_or_else(|| Error::Invalid("bound overflows".into()))?;
    let mut entries = Vec::new();
    let mut first_success = None;
    let mut first_failure = None;
    for radius in radii {
        let (space, subset) = family_instance(family, radius, pad)?;
        let threshold = space.threshold(bound)?;
        let neighborhood_size = space.neighborhood(&subset, threshold).len();
        let certificate = doubling_certificate(&space, &subset, bound)?;
        if certificate.doubled() {
            first_success.get_or_insert(radius);
        } else {
            first_failure.get_or_insert(radius);
        }
        entries.push(ScanEntry {
            radius,
            space_size: space.len(),
            subset_size: subset.len(),
            neighborhood_size,
            ratio: Rational::new(
                BigInt::from(neighborhood_size),
                BigInt::from(subset.len()),
            ),
            certificate,
        });
    }
    Ok(ScanReport {
        entries,
        first_success,
        first_failure,
    })
}
