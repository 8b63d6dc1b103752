//! Finite-dimensional representations of inverse monoids and principal
//! groupoids: the left regular representation, restriction to the unit
//! group, unitary induction, the Koopman representation of a measured
//! groupoid, and exact identity checks in the image algebras.
//!
//! Matrices act on column vectors, so composing left to right in the monoid
//! reverses into operator order: rep(a then b) = rep(b) · rep(a).

use crate::error::{Error, Result};
use crate::grpd::{FiniteGroupoid, MeasureOnUnits};
use crate::monoid::FiniteInverseMonoid;
use crate::pbij::{compose, join, star, PartialBijection};
use crate::{FloatMatrix, RatMatrix, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::rc::Rc;

/// ran(t) ⊆ dom(s): composing t with s loses nothing.
fn range_inside_domain(t: &PartialBijection, s: &PartialBijection) -> bool {
    t.entries().all(|(_, y)| s.apply(y).is_some())
}

type Eval = Rc<dyn Fn(&PartialBijection) -> Option<RatMatrix>>;

/// A matrix representation over exact rationals, carrying the Gram matrix
/// of the inner product its adjoints refer to.
#[derive(Clone)]
pub struct MatrixRep {
    dim: usize,
    gram: RatMatrix,
    gram_inv: RatMatrix,
    eval: Eval,
}

impl std::fmt::Debug for MatrixRep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MatrixRep(dim {})", self.dim)
    }
}

impl MatrixRep {
    pub fn new(dim: usize, eval: impl Fn(&PartialBijection) -> Option<RatMatrix> + 'static) -> Self {
        MatrixRep {
            dim,
            gram: RatMatrix::identity(dim),
            gram_inv: RatMatrix::identity(dim),
            eval: Rc::new(eval),
        }
    }

    pub fn with_gram(
        dim: usize,
        gram: RatMatrix,
        eval: impl Fn(&PartialBijection) -> Option<RatMatrix> + 'static,
    ) -> Result<Self> {
        if gram.nrows() != dim || gram.ncols() != dim {
            return Err(Error::DimensionMismatch(gram.nrows(), gram.ncols(), dim, dim));
        }
        if gram != gram.transpose() {
            return Err(Error::Invalid("gram matrix not symmetric".into()));
        }
        let gram_inv = gram
            .inverse()
            .ok_or_else(|| Error::Invalid("gram matrix singular".into()))?;
        Ok(MatrixRep {
            dim,
            gram,
            gram_inv,
            eval: Rc::new(eval),
        })
    }

    pub fn from_table(
        dim: usize,
        gram: Option<RatMatrix>,
        table: Vec<(PartialBijection, RatMatrix)>,
    ) -> Result<Self> {
        let map: BTreeMap<PartialBijection, RatMatrix> = table.into_iter().collect();
        for m in map.values() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(m.nrows(), m.ncols(), dim, dim));
            }
        }
        let eval = move |s: &PartialBijection| map.get(s).cloned();
        match gram {
            Some(g) => Self::with_gram(dim, g, eval),
            None => Ok(Self::new(dim, eval)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn matrix(&self, s: &PartialBijection) -> Result<RatMatrix> {
        (self.eval)(s).ok_or(Error::RepUndefined)
    }

    pub fn defined_on(&self, s: &PartialBijection) -> bool {
        (self.eval)(s).is_some()
    }

    /// Adjoint for the carried inner product: G⁻¹ Mᵀ G.
    pub fn adjoint(&self, m: &RatMatrix) -> RatMatrix {
        self.gram_inv.matmul(&m.transpose()).matmul(&self.gram)
    }

    pub fn is_projection(&self, m: &RatMatrix) -> bool {
        m.matmul(m) == *m && self.adjoint(m) == *m
    }

    pub fn is_unitary(&self, m: &RatMatrix) -> bool {
        self.adjoint(m).matmul(m) == RatMatrix::identity(self.dim)
    }

    pub fn is_partial_isometry(&self, m: &RatMatrix) -> bool {
        self.is_projection(&self.adjoint(m).matmul(m))
    }

    /// Recheck multiplicativity, star-compatibility, idempotent images and
    /// unit images on every pair drawn from `elements`.
    pub fn verify_star_homomorphism(&self, elements: &[PartialBijection]) -> Result<bool> {
        for a in elements {
            let ma = self.matrix(a)?;
            if self.adjoint(&ma) != self.matrix(&star(a))? {
                return Ok(false);
            }
            if a.is_idempotent() && !self.is_projection(&ma) {
                return Ok(false);
            }
            if a.is_total_bijection() && !self.is_unitary(&ma) {
                return Ok(false);
            }
            for b in elements {
                let product = self.matrix(a)?.matmul(&self.matrix(b)?);
                if product != self.matrix(&compose(b, a)?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The unit group of a monoid: its total bijections.
pub fn unit_group(s: &FiniteInverseMonoid) -> Vec<PartialBijection> {
    s.unit_indices()
        .into_iter()
        .map(|i| s.elements()[i].clone())
        .collect()
}

fn permutation_parity(u: &PartialBijection) -> i64 {
    let mut seen = vec![false; u.ground_size()];
    let mut sign = 1i64;
    for start in 0..u.ground_size() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = u.apply(x).expect("total bijection");
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// The one-dimensional trivial representation of a list of units.
pub fn trivial_rep(units: &[PartialBijection]) -> Result<MatrixRep> {
    let table = units
        .iter()
        .map(|u| (u.clone(), RatMatrix::identity(1)))
        .collect();
    MatrixRep::from_table(1, None, table)
}

/// The sign character of a list of permutations.
pub fn sign_rep(units: &[PartialBijection]) -> Result<MatrixRep> {
    let mut table = Vec::new();
    for u in units {
        if !u.is_total_bijection() {
            return Err(Error::NotBijective);
        }
        let entry = Rational::from_integer(permutation_parity(u).into());
        table.push((u.clone(), RatMatrix::from_rows(vec![vec![entry]])));
    }
    MatrixRep::from_table(1, None, table)
}

/// The standard representation of permutations of n points on the sum-zero
/// subspace, in the basis e_i - e_{i+1}. Integral matrices, unitary for the
/// Gram matrix with 2 on the diagonal and -1 off it.
pub fn standard_rep(units: &[PartialBijection], n: usize) -> Result<MatrixRep> {
    if n < 2 {
        return Err(Error::Invalid("standard representation needs n >= 2".into()));
    }
    let dim = n - 1;
    // coordinates of e_a - e_b in the difference basis
    let difference = |a: usize, b: usize| {
        let mut v = vec![Rational::zero(); dim];
        if a < b {
            for slot in v.iter_mut().take(b).skip(a) {
                *slot = Rational::one();
            }
        } else {
            for slot in v.iter_mut().take(a).skip(b) {
                *slot = -Rational::one();
            }
        }
        v
    };
    let mut table = Vec::new();
    for u in units {
        if u.ground_size() != n || !u.is_total_bijection() {
            return Err(Error::NotBijective);
        }
        let mut m = RatMatrix::zeros(dim, dim);
        for j in 0..dim {
            let a = u.apply(j).expect("total");
            let b = u.apply(j + 1).expect("total");
            let col = difference(a, b);
            for (i, value) in col.into_iter().enumerate() {
                m[(i, j)] = value;
            }
        }
        table.push((u.clone(), m));
    }
    let gram = RatMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Rational::from_integer(2.into())
        } else if r.abs_diff(c) == 1 {
            -Rational::one()
        } else {
            Rational::zero()
        }
    });
    MatrixRep::from_table(dim, Some(gram), table)
}

/// The left regular representation on a basis indexed by the monoid itself:
/// s sends the basis vector at t to the one at t·s when composing loses
/// nothing of t, and to zero otherwise. The zero element keeps its own
/// basis vector and kills the rest.
pub fn left_regular_monoid(s: &FiniteInverseMonoid) -> MatrixRep {
    let elements: Vec<PartialBijection> = s.elements().to_vec();
    let index: BTreeMap<PartialBijection, usize> = elements
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let dim = elements.len();
    MatrixRep::new(dim, move |g| {
        index.get(g)?;
        let mut m = RatMatrix::zeros(dim, dim);
        for (col, t) in elements.iter().enumerate() {
            if range_inside_domain(t, g) {
                let product = compose(t, g).expect("same ground");
                let row = index[&product];
                m[(row, col)] = Rational::one();
            }
        }
        Some(m)
    })
}

#[derive(Clone, Debug)]
pub struct OrbitSummary {
    pub representative: PartialBijection,
    pub size: usize,
    /// Units fixing the representative under post-composition: those that
    /// fix its range pointwise.
    pub stabilizer_order: usize,
    pub domain: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct RestrictionReport {
    pub units: Vec<PartialBijection>,
    pub orbits: Vec<OrbitSummary>,
    /// Trace of the restricted left regular representation at each unit.
    pub restricted_character: Vec<Rational>,
    /// Sum over orbits of the abstract coset-action characters.
    pub quasi_regular_character: Vec<Rational>,
    pub characters_match: bool,
    pub permutation_isomorphic: bool,
}

/// Decompose the restriction of the left regular representation to the unit
/// group: the basis splits into orbits t ↦ t·u, and each orbit carries the
/// coset action of the stabilizer of its representative.
pub fn restriction_decomposition(s: &FiniteInverseMonoid) -> Result<RestrictionReport> {
    let units = unit_group(s);
    if units.is_empty() {
        return Err(Error::Invalid("monoid has no units".into()));
    }
    let elements = s.elements();
    let mut orbit_of = vec![usize::MAX; elements.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for (i, t) in elements.iter().enumerate() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut members = Vec::new();
        for u in &units {
            let moved = compose(t, u)?;
            let j = s.index_of(&moved).ok_or(Error::Invalid(
                "monoid not closed under its own units".into(),
            ))?;
            if orbit_of[j] == usize::MAX {
                orbit_of[j] = orbits.len();
                members.push(j);
            }
        }
        orbits.push(members);
    }

    let mut summaries = Vec::new();
    let mut quasi_regular = vec![Rational::zero(); units.len()];
    let mut isomorphic = true;
    for members in &orbits {
        let representative = members
            .iter()
            .map(|&j| elements[j].clone())
            .min()
            .expect("orbit nonempty");
        let stabilizer: Vec<&PartialBijection> = units
            .iter()
            .filter(|u| compose(&representative, u).expect("same ground") == representative)
            .collect();
        // cosets of the stabilizer, each the fiber of one orbit point
        let mut cosets: Vec<Vec<PartialBijection>> = Vec::new();
        let mut seen: BTreeMap<PartialBijection, usize> = BTreeMap::new();
        for v in &units {
            if seen.contains_key(v) {
                continue;
            }
            let mut coset: Vec<PartialBijection> = stabilizer
                .iter()
                .map(|h| compose(h, v).expect("same ground"))
                .collect();
            coset.sort();
            for member in &coset {
                seen.insert(member.clone(), cosets.len());
            }
            cosets.push(coset);
        }
        if cosets.len() != members.len() {
            isomorphic = false;
        }
        for (k, u) in units.iter().enumerate() {
            let fixed = cosets
                .iter()
                .filter(|coset| {
                    let moved = compose(&coset[0], u).expect("same ground");
                    seen[&moved] == seen[&coset[0]]
                })
                .count();
            quasi_regular[k] += Rational::from_integer(BigInt::from(fixed));
        }
        // the orbit map v·stab ↦ rep·v must intertwine the two actions
        for coset in &cosets {
            let image = compose(&representative, &coset[0])?;
            for u in &units {
                let moved_coset = seen[&compose(&coset[0], u)?];
                let moved_image = compose(&image, u)?;
                let expected = compose(&representative, &cosets[moved_coset][0])?;
                let same_orbit_point = {
                    let direct = moved_image.clone();
                    direct == expected
                };
                if !same_orbit_point {
                    isomorphic = false;
                }
            }
        }
        summaries.push(OrbitSummary {
            domain: representative.dom(),
            size: members.len(),
            stabilizer_order: stabilizer.len(),
            representative,
        });
    }

    let mut restricted = Vec::new();
    for u in &units {
        let fixed = elements
            .iter()
            .filter(|t| compose(t, u).expect("same ground") == **t)
            .count();
        restricted.push(Rational::from_integer(BigInt::from(fixed)));
    }
    let matches = restricted == quasi_regular;
    Ok(RestrictionReport {
        units,
        orbits: summaries,
        restricted_character: restricted,
        quasi_regular_character: quasi_regular,
        characters_match: matches,
        permutation_isomorphic: isomorphic,
    })
}

#[derive(Clone, Debug)]
pub struct InducedComponent {
    pub representative: PartialBijection,
    pub stabilizer_order: usize,
    /// Dimension of the subspace fixed by the stabilizer.
    pub fixed_dim: usize,
}

#[derive(Clone, Debug)]
pub struct InducedRep {
    pub rep: MatrixRep,
    pub dim: usize,
    pub components: Vec<InducedComponent>,
    /// Intertwiner-space dimension of the inducing representation inside
    /// the restriction of the induced one.
    pub multiplicity: usize,
}

/// Induce a unitary representation of the unit group up to the whole
/// monoid, on equivariant vectors over the orbits of pre-composition.
pub fn induce(s: &FiniteInverseMonoid, pi: &MatrixRep) -> Result<InducedRep> {
    let units = unit_group(s);
    if units.is_empty() {
        return Err(Error::Invalid("monoid has no units".into()));
    }
    for u in &units {
        let m = pi.matrix(u).map_err(|_| Error::NotUnitary)?;
        if !pi.is_unitary(&m) {
            return Err(Error::NotUnitary);
        }
        if pi.adjoint(&m) != pi.matrix(&star(u)).map_err(|_| Error::NotUnitary)? {
            return Err(Error::NotUnitary);
        }
        for v in &units {
            let product = pi.matrix(u)?.matmul(&pi.matrix(v)?);
            if product != pi.matrix(&compose(v, u)?)? {
                return Err(Error::NotUnitary);
            }
        }
    }
    let d = pi.dim();
    let elements = s.elements();

    // orbits of t ↦ u·t share their range; stabilizers fix the domain
    let mut orbit_of = vec![usize::MAX; elements.len()];
    let mut orbit_members: Vec<Vec<usize>> = Vec::new();
    for (i, t) in elements.iter().enumerate() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut members = Vec::new();
        for u in &units {
            let moved = compose(u, t)?;
            let j = s.index_of(&moved).ok_or(Error::Invalid(
                "monoid not closed under its own units".into(),
            ))?;
            if orbit_of[j] == usize::MAX {
                orbit_of[j] = orbit_members.len();
                members.push(j);
            }
        }
        orbit_members.push(members);
    }

    let mut reps: Vec<PartialBijection> = Vec::new();
    let mut bases: Vec<RatMatrix> = Vec::new();
    let mut offsets: Vec<usize> = Vec::new();
    let mut components = Vec::new();
    let mut total = 0usize;
    for members in &orbit_members {
        let representative = members
            .iter()
            .map(|&j| elements[j].clone())
            .min()
            .expect("orbit nonempty");
        let stabilizer: Vec<&PartialBijection> = units
            .iter()
            .filter(|u| compose(u, &representative).expect("same ground") == representative)
            .collect();
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for h in &stabilizer {
            let diff = pi.matrix(h)?.sub(&RatMatrix::identity(d));
            for r in 0..d {
                rows.push((0..d).map(|c| diff[(r, c)].clone()).collect());
            }
        }
        let constraint = if rows.is_empty() {
            RatMatrix::zeros(0, d)
        } else {
            RatMatrix::from_rows(rows)
        };
        let fixed = constraint.null_space();
        let fixed_dim = fixed.len();
        let mut basis = RatMatrix::zeros(d, fixed_dim);
        for (col, v) in fixed.iter().enumerate() {
            for (row, value) in v.iter().enumerate() {
                basis[(row, col)] = value.clone();
            }
        }
        offsets.push(total);
        total += fixed_dim;
        components.push(InducedComponent {
            representative: representative.clone(),
            stabilizer_order: stabilizer.len(),
            fixed_dim,
        });
        reps.push(representative);
        bases.push(basis);
    }

    // gram of the induced space: the inner product of each fixed subspace
    let gram_blocks: Vec<RatMatrix> = bases
        .iter()
        .map(|b| b.transpose().matmul(pi.gram()).matmul(b))
        .collect();
    let gram = RatMatrix::block_diag(&gram_blocks);

    struct Closure {
        index: BTreeMap<PartialBijection, usize>,
        units: Vec<PartialBijection>,
        orbit_of: Vec<usize>,
        reps: Vec<PartialBijection>,
        bases: Vec<RatMatrix>,
        offsets: Vec<usize>,
        pi: MatrixRep,
        dim: usize,
    }
    let closure = Closure {
        index: elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect(),
        units,
        orbit_of,
        reps,
        bases,
        offsets,
        pi: pi.clone(),
        dim: total,
    };
    let cl = Rc::new(closure);
    let eval = {
        let cl = Rc::clone(&cl);
        move |a: &PartialBijection| -> Option<RatMatrix> {
            cl.index.get(a)?;
            let mut m = RatMatrix::zeros(cl.dim, cl.dim);
            for (src, r) in cl.reps.iter().enumerate() {
                if !range_inside_domain(r, a) {
                    continue;
                }
                let moved = compose(r, a).ok()?;
                let tgt = cl.orbit_of[cl.index[&moved]];
                let r2 = &cl.reps[tgt];
                let u = cl
                    .units
                    .iter()
                    .find(|u| compose(u, r2).expect("same ground") == moved)?;
                let block = cl.pi.matrix(u).ok()?;
                // π(u) carries the source fixed space into the target one
                let image = block.matmul(&cl.bases[src]);
                let b2 = &cl.bases[tgt];
                let normal = b2.transpose().matmul(cl.pi.gram());
                let coords = normal
                    .matmul(b2)
                    .inverse()
                    .expect("independent basis")
                    .matmul(&normal.matmul(&image));
                debug_assert_eq!(b2.matmul(&coords), image);
                for rr in 0..coords.nrows() {
                    for cc in 0..coords.ncols() {
                        m[(cl.offsets[tgt] + rr, cl.offsets[src] + cc)] =
                            coords[(rr, cc)].clone();
                    }
                }
            }
            Some(m)
        }
    };
    let rep = MatrixRep::with_gram(total, gram, eval)?;

    // multiplicity of π inside the restriction, as an intertwiner rank
    let unknowns = total * d;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for u in &cl.units {
        let big = rep.matrix(u)?;
        let small = pi.matrix(u)?;
        for p in 0..total {
            for q in 0..d {
                let mut row = vec![Rational::zero(); unknowns];
                for j in 0..total {
                    row[j * d + q] += big[(p, j)].clone();
                }
                for k in 0..d {
                    row[p * d + k] -= small[(k, q)].clone();
                }
                rows.push(row);
            }
        }
    }
    let multiplicity = if unknowns == 0 {
        0
    } else {
        unknowns - RatMatrix::from_rows(rows).rank()
    };
    Ok(InducedRep {
        rep,
        dim: total,
        components,
        multiplicity,
    })
}

/// A square root of a nonnegative rational times a sign, kept canonical as
/// sign·√square so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SqrtScaled {
    sign: i8,
    square: Rational,
}

impl SqrtScaled {
    pub fn zero() -> Self {
        SqrtScaled {
            sign: 0,
            square: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        SqrtScaled {
            sign: 1,
            square: Rational::one(),
        }
    }

    /// √q for q ≥ 0.
    pub fn sqrt(q: Rational) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::Invalid("square root of a negative rational".into()));
        }
        Ok(SqrtScaled {
            sign: i8::from(!q.is_zero()),
            square: q,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_one(&self) -> bool {
        self.sign == 1 && self.square.is_one()
    }

    /// The squared value, signless.
    pub fn square(&self) -> &Rational {
        &self.square
    }

    pub fn mul(&self, other: &Self) -> Self {
        let sign = self.sign * other.sign;
        SqrtScaled {
            sign,
            square: if sign == 0 {
                Rational::zero()
            } else {
                &self.square * &other.square
            },
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let sign = match q.cmp(&Rational::zero()) {
            std::cmp::Ordering::Less => -self.sign,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => self.sign,
        };
        SqrtScaled {
            sign,
            square: if sign == 0 {
                Rational::zero()
            } else {
                &self.square * q * q
            },
        }
    }

    /// Addition stays exact only when the two radicands differ by a square
    /// rational factor.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let ratio = &self.square / &other.square;
        let num_root = ratio.numer().sqrt();
        let den_root = ratio.denom().sqrt();
        if &num_root * &num_root != *ratio.numer() || &den_root * &den_root != *ratio.denom() {
            return Err(Error::Invalid("sum of incommensurable square roots".into()));
        }
        let root = Rational::new(num_root, den_root);
        let combined = Rational::from_integer(self.sign.into()) * root
            + Rational::from_integer(other.sign.into());
        let sign = match combined.cmp(&Rational::zero()) {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        };
        Ok(SqrtScaled {
            sign,
            square: if sign == 0 {
                Rational::zero()
            } else {
                &combined * &combined * &other.square
            },
        })
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.square.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

/// A matrix with at most one entry per row and column, each a scaled square
/// root. Exactly the shape Koopman operators take.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedPartialPerm {
    n: usize,
    /// column → (row, value)
    entries: BTreeMap<usize, (usize, SqrtScaled)>,
}

impl WeightedPartialPerm {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> SqrtScaled {
        match self.entries.get(&col) {
            Some((r, v)) if *r == row => v.clone(),
            _ => SqrtScaled::zero(),
        }
    }

    /// Operator product self·other: other's transport feeds self's.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::GroundSetMismatch(self.n, other.n));
        }
        let mut entries = BTreeMap::new();
        for (&col, (mid, w1)) in &other.entries {
            if let Some((row, w2)) = self.entries.get(mid) {
                let w = w2.mul(w1);
                if !w.is_zero() {
                    entries.insert(col, (*row, w));
                }
            }
        }
        Ok(WeightedPartialPerm {
            n: self.n,
            entries,
        })
    }

    /// Adjoint for the inner product weighted by μ.
    pub fn adjoint(&self, mu: &MeasureOnUnits) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(&col, (row, w))| {
                let factor = mu.weight(*row) / mu.weight(col);
                (*row, (col, w.scale(&factor)))
            })
            .collect();
        WeightedPartialPerm {
            n: self.n,
            entries,
        }
    }

    pub fn is_projection(&self) -> bool {
        self.entries.iter().all(|(&c, (r, w))| c == *r && w.is_one())
    }

    pub fn is_permutation(&self) -> bool {
        self.entries.len() == self.n && self.entries.values().all(|(_, w)| w.is_one())
    }

    pub fn plus(&self, other: &Self) -> Result<WeightedSum> {
        if self.n != other.n {
            return Err(Error::GroundSetMismatch(self.n, other.n));
        }
        let mut entries: BTreeMap<(usize, usize), SqrtScaled> = BTreeMap::new();
        for (&col, (row, w)) in self.entries.iter().chain(other.entries.iter()) {
            let slot = entries.entry((*row, col)).or_insert_with(SqrtScaled::zero);
            *slot = slot.add(w)?;
        }
        entries.retain(|_, w| !w.is_zero());
        Ok(WeightedSum {
            n: self.n,
            entries,
        })
    }

    pub fn to_float(&self) -> FloatMatrix {
        let mut m = FloatMatrix::zeros(self.n, self.n);
        for (&col, (row, w)) in &self.entries {
            m[(*row, col)] = w.to_f64();
        }
        m
    }
}

/// A sum of weighted partial permutations, no longer one entry per line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSum {
    n: usize,
    entries: BTreeMap<(usize, usize), SqrtScaled>,
}

/// The Koopman representation of a measured groupoid: bisections act on
/// functions of the unit space with the square-root density correction.
#[derive(Clone, Debug)]
pub struct KoopmanRep {
    groupoid: FiniteGroupoid,
    mu: MeasureOnUnits,
}

pub fn koopman(groupoid: &FiniteGroupoid, mu: &MeasureOnUnits) -> Result<KoopmanRep> {
    if mu.len() != groupoid.points() {
        return Err(Error::GroundSetMismatch(mu.len(), groupoid.points()));
    }
    Ok(KoopmanRep {
        groupoid: groupoid.clone(),
        mu: mu.clone(),
    })
}

impl KoopmanRep {
    pub fn dim(&self) -> usize {
        self.groupoid.points()
    }

    pub fn measure(&self) -> &MeasureOnUnits {
        &self.mu
    }

    /// κ(s): the entry at (s(x), x) is √(μ(x)/μ(s(x))).
    pub fn matrix(&self, s: &PartialBijection) -> Result<WeightedPartialPerm> {
        if !self.groupoid.respects(s) {
            return Err(Error::RepUndefined);
        }
        let mut entries = BTreeMap::new();
        for (x, y) in s.entries() {
            let q = self.mu.weight(x) / self.mu.weight(y);
            entries.insert(x, (y, SqrtScaled::sqrt(q)?));
        }
        Ok(WeightedPartialPerm {
            n: self.groupoid.points(),
            entries,
        })
    }

    pub fn adjoint(&self, m: &WeightedPartialPerm) -> WeightedPartialPerm {
        m.adjoint(&self.mu)
    }

    /// κ(e∨f) + κ(e∧f) = κ(e) + κ(f) on idempotent bisections.
    pub fn tightness(&self, e: &PartialBijection, f: &PartialBijection) -> Result<bool> {
        if !e.is_idempotent() || !f.is_idempotent() {
            return Err(Error::Invalid("tightness needs idempotents".into()));
        }
        let meet = compose(e, f)?;
        let joined = join(&[e.clone(), f.clone()])?;
        let lhs = self.matrix(&joined)?.plus(&self.matrix(&meet)?)?;
        let rhs = self.matrix(e)?.plus(&self.matrix(f)?)?;
        Ok(lhs == rhs)
    }
}

/// The permutation action of block-respecting bisections on the point set.
pub fn groupoid_rep(groupoid: &FiniteGroupoid) -> MatrixRep {
    let g = groupoid.clone();
    let n = g.points();
    MatrixRep::new(n, move |s| {
        if !g.respects(s) {
            return None;
        }
        let mut m = RatMatrix::zeros(n, n);
        for (x, y) in s.entries() {
            m[(y, x)] = Rational::one();
        }
        Some(m)
    })
}

/// The regular representation on arrows: a bisection moves the target of
/// each arrow and leaves the source alone.
pub fn groupoid_regular_rep(groupoid: &FiniteGroupoid) -> MatrixRep {
    let g = groupoid.clone();
    let mut arrows = Vec::new();
    for b in g.blocks() {
        for &x in b {
            for &y in b {
                arrows.push((x, y));
            }
        }
    }
    arrows.sort_unstable();
    let index: BTreeMap<(usize, usize), usize> = arrows
        .iter()
        .copied()
        .enumerate()
        .map(|(i, a)| (a, i))
        .collect();
    let dim = arrows.len();
    MatrixRep::new(dim, move |s| {
        if !g.respects(s) {
            return None;
        }
        let mut m = RatMatrix::zeros(dim, dim);
        for (col, &(x, y)) in arrows.iter().enumerate() {
            if let Some(z) = s.apply(y) {
                m[(index[&(x, z)], col)] = Rational::one();
            }
        }
        Some(m)
    })
}

/// A finite rational combination of elements, compared formally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSum {
    terms: BTreeMap<PartialBijection, Rational>,
}

impl FormalSum {
    pub fn new(terms: impl IntoIterator<Item = (PartialBijection, Rational)>) -> Self {
        let mut map: BTreeMap<PartialBijection, Rational> = BTreeMap::new();
        for (g, c) in terms {
            *map.entry(g).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        FormalSum { terms: map }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PartialBijection, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// 1 - g1 - g2 + g1·g2 as a formal combination. Any representation with
/// both supports in complementary invariant sets must kill it.
pub fn kernel_element(g1: &PartialBijection, g2: &PartialBijection) -> Result<FormalSum> {
    let ground = g1.ground();
    let one = Rational::one();
    Ok(FormalSum::new([
        (PartialBijection::identity(ground), one.clone()),
        (g1.clone(), -one.clone()),
        (g2.clone(), -one.clone()),
        (compose(g1, g2)?, one),
    ]))
}

/// Verify 1 + π(g1)π(g2) = π(g1) + π(g2) in the point representation, after
/// checking the supports sit in disjoint invariant sets.
pub fn algkern_check(
    groupoid: &FiniteGroupoid,
    g1: &PartialBijection,
    g2: &PartialBijection,
) -> Result<bool> {
    for g in [g1, g2] {
        if g.ground_size() != groupoid.points() || !g.is_total_bijection() {
            return Err(Error::NotBijective);
        }
        if !groupoid.respects(g) {
            return Err(Error::RepUndefined);
        }
    }
    let closure = |g: &PartialBijection| -> Vec<usize> {
        let mut blocks: Vec<usize> = g
            .entries()
            .filter(|&(x, y)| x != y)
            .map(|(x, _)| groupoid.block_of(x).expect("in range"))
            .collect();
        blocks.sort_unstable();
        blocks.dedup();
        blocks
    };
    let b1 = closure(g1);
    let b2 = closure(g2);
    if b1.iter().any(|b| b2.contains(b)) {
        return Err(Error::BadSupports);
    }
    let rep = groupoid_rep(groupoid);
    let p1 = rep.matrix(g1)?;
    let p2 = rep.matrix(g2)?;
    let lhs = RatMatrix::identity(groupoid.points()).add(&p1.matmul(&p2));
    Ok(lhs == p1.add(&p2))
}

/// Anything that can evaluate a formal combination and report its operator
/// norm in floating point.
pub trait FormalNorm {
    fn formal_norm(&self, a: &FormalSum) -> Result<f64>;
}

impl FormalNorm for MatrixRep {
    fn formal_norm(&self, a: &FormalSum) -> Result<f64> {
        let mut acc = FloatMatrix::zeros(self.dim(), self.dim());
        for (g, c) in a.terms() {
            let m = self.matrix(g)?;
            let coeff = c.to_f64().ok_or_else(|| Error::Invalid("coefficient overflow".into()))?;
            acc = acc.add(&FloatMatrix::from_fn(self.dim(), self.dim(), |r, cc| {
                m[(r, cc)].to_f64().unwrap_or(f64::NAN) * coeff
            }));
        }
        Ok(acc.operator_norm())
    }
}

impl FormalNorm for KoopmanRep {
    fn formal_norm(&self, a: &FormalSum) -> Result<f64> {
        let n = self.dim();
        let mut acc = FloatMatrix::zeros(n, n);
        for (g, c) in a.terms() {
            let m = self.matrix(g)?.to_float();
            let coeff = c.to_f64().ok_or_else(|| Error::Invalid("coefficient overflow".into()))?;
            acc = acc.add(&m.scale(&coeff));
        }
        Ok(acc.operator_norm())
    }
}

/// Evaluate one combination in several representations.
pub fn norm_compare(reps: &[&dyn FormalNorm], a: &FormalSum) -> Result<Vec<f64>> {
    reps.iter().map(|r| r.formal_norm(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::{generate_monoid, symmetric_inverse_monoid_generators};
    use crate::pbij::GroundSet;
    use crate::scalar::ratio;

    fn symmetric_inverse_monoid(n: usize) -> FiniteInverseMonoid {
        let gens = symmetric_inverse_monoid_generators(GroundSet::new(n));
        generate_monoid(&gens, 100_000).unwrap()
    }

    fn perm(n: usize, images: &[usize]) -> PartialBijection {
        PartialBijection::new(
            GroundSet::new(n),
            images.iter().copied().enumerate(),
        )
        .unwrap()
    }

    #[test]
    fn regular_rep_fixes_the_zero_vector_and_kills_the_rest() {
        let ground = GroundSet::new(1);
        let s = generate_monoid(&[PartialBijection::identity(ground)], 10).unwrap();
        assert_eq!(s.len(), 2);
        let lambda = left_regular_monoid(&s);
        let zero = PartialBijection::zero(ground);
        let id = PartialBijection::identity(ground);
        assert_eq!(lambda.matrix(&id).unwrap(), RatMatrix::identity(2));
        let m = lambda.matrix(&zero).unwrap();
        let zi = s.index_of(&zero).unwrap();
        let ii = s.index_of(&id).unwrap();
        assert_eq!(m[(zi, zi)], ratio(1, 1));
        assert_eq!(m[(zi, ii)], ratio(0, 1));
        assert_eq!(m[(ii, ii)], ratio(0, 1));
    }

    #[test]
    fn regular_rep_is_a_star_homomorphism_on_i2() {
        let s = symmetric_inverse_monoid(2);
        assert_eq!(s.len(), 7);
        let lambda = left_regular_monoid(&s);
        assert!(lambda.verify_star_homomorphism(s.elements()).unwrap());
    }

    #[test]
    fn restriction_of_i3_decomposes_by_domains() {
        let s = symmetric_inverse_monoid(3);
        assert_eq!(s.len(), 34);
        let report = restriction_decomposition(&s).unwrap();
        assert_eq!(report.units.len(), 6);
        assert_eq!(report.orbits.len(), 8);
        let mut by_domain_size = [0usize; 4];
        for orbit in &report.orbits {
            by_domain_size[orbit.domain.len()] += 1;
        }
        assert_eq!(by_domain_size, [1, 3, 3, 1]);
        let mut stabilizers: Vec<usize> =
            report.orbits.iter().map(|o| o.stabilizer_order).collect();
        stabilizers.sort_unstable();
        assert_eq!(stabilizers, vec![1, 1, 1, 1, 2, 2, 2, 6]);
        assert!(report.characters_match);
        assert!(report.permutation_isomorphic);
        let identity_slot = report
            .units
            .iter()
            .position(|u| u.is_idempotent())
            .unwrap();
        assert_eq!(report.restricted_character[identity_slot], ratio(34, 1));
    }

    #[test]
    fn restriction_degenerate_cases() {
        let s = symmetric_inverse_monoid(1);
        let report = restriction_decomposition(&s).unwrap();
        assert_eq!(report.orbits.len(), 2);
        assert!(report
            .orbits
            .iter()
            .all(|o| o.size == 1 && o.stabilizer_order == 1));
        assert!(report.characters_match);

        // a group with the adjoined zero: one orbit for each
        let swap = perm(2, &[1, 0]);
        let group = generate_monoid(&[swap], 10).unwrap();
        let report = restriction_decomposition(&group).unwrap();
        assert_eq!(report.orbits.len(), 2);
        let mut sizes: Vec<usize> = report.orbits.iter().map(|o| o.size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2]);
        assert!(report.characters_match);
        assert!(report.permutation_isomorphic);
    }

    #[test]
    fn standard_rep_is_unitary_for_its_gram() {
        let s = symmetric_inverse_monoid(3);
        let units = unit_group(&s);
        assert_eq!(units.len(), 6);
        let pi = standard_rep(&units, 3).unwrap();
        assert_eq!(
            pi.gram(),
            &RatMatrix::from_rows(vec![
                vec![ratio(2, 1), ratio(-1, 1)],
                vec![ratio(-1, 1), ratio(2, 1)],
            ])
        );
        assert!(pi.verify_star_homomorphism(&units).unwrap());
        for u in &units {
            assert!(pi.is_unitary(&pi.matrix(u).unwrap()));
        }
    }

    #[test]
    fn induced_sign_rep_of_i2() {
        let s = symmetric_inverse_monoid(2);
        let units = unit_group(&s);
        let pi = sign_rep(&units).unwrap();
        let induced = induce(&s, &pi).unwrap();
        assert_eq!(induced.dim, 3);
        let dims: Vec<usize> = induced.components.iter().map(|c| c.fixed_dim).collect();
        assert_eq!(dims.iter().sum::<usize>(), 3);
        assert!(induced.components.iter().any(|c| c.fixed_dim == 0));
        assert_eq!(induced.multiplicity, 2);
        assert!(induced.rep.verify_star_homomorphism(s.elements()).unwrap());
        for t in s.elements() {
            assert!(induced.rep.is_partial_isometry(&induced.rep.matrix(t).unwrap()));
        }
    }

    #[test]
    fn inducing_the_trivial_rep_recovers_the_regular_one() {
        let ground = GroundSet::new(1);
        let s = generate_monoid(&[PartialBijection::identity(ground)], 10).unwrap();
        let units = unit_group(&s);
        assert_eq!(units.len(), 1);
        let pi = trivial_rep(&units).unwrap();
        let induced = induce(&s, &pi).unwrap();
        assert_eq!(induced.dim, 2);
        let lambda = left_regular_monoid(&s);
        for t in s.elements() {
            assert_eq!(induced.rep.matrix(t).unwrap(), lambda.matrix(t).unwrap());
        }
        assert_eq!(induced.multiplicity, 2);
    }

    #[test]
    fn induced_standard_rep_of_i3() {
        let s = symmetric_inverse_monoid(3);
        let units = unit_group(&s);
        let pi = standard_rep(&units, 3).unwrap();
        let induced = induce(&s, &pi).unwrap();
        assert_eq!(induced.dim, 11);
        let mut dims: Vec<usize> = induced.components.iter().map(|c| c.fixed_dim).collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![0, 1, 1, 1, 2, 2, 2, 2]);
        assert!(induced.multiplicity >= 1);
        let elements = s.elements();
        for (i, a) in elements.iter().enumerate().step_by(7) {
            for b in elements.iter().skip(i % 3).step_by(11) {
                let product = induced.rep.matrix(a).unwrap().matmul(&induced.rep.matrix(b).unwrap());
                assert_eq!(
                    product,
                    induced.rep.matrix(&compose(b, a).unwrap()).unwrap()
                );
            }
            assert!(induced.rep.is_partial_isometry(&induced.rep.matrix(a).unwrap()));
        }
    }

    #[test]
    fn rejects_a_non_unitary_inducing_rep() {
        let s = symmetric_inverse_monoid(2);
        let units = unit_group(&s);
        let table = units
            .iter()
            .map(|u| {
                (
                    u.clone(),
                    RatMatrix::from_rows(vec![vec![ratio(2, 1)]]),
                )
            })
            .collect();
        let bad = MatrixRep::from_table(1, None, table).unwrap();
        assert!(matches!(induce(&s, &bad), Err(Error::NotUnitary)));
    }

    #[test]
    fn koopman_weights_follow_the_measure() {
        let g = FiniteGroupoid::new(3, vec![vec![0, 1, 2]]).unwrap();
        let mu = MeasureOnUnits::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        let kappa = koopman(&g, &mu).unwrap();
        let s = PartialBijection::new(GroundSet::new(3), [(1, 0)]).unwrap();
        let m = kappa.matrix(&s).unwrap();
        assert_eq!(m.entry(0, 1).square(), &ratio(1, 2));
        assert!(m.entry(1, 0).is_zero());
        // κ(s)*κ(s) projects onto the domain coordinate
        let p = kappa.adjoint(&m).matmul(&m).unwrap();
        assert!(p.is_projection());
        assert!(p.entry(1, 1).is_one());
        assert!(p.entry(0, 0).is_zero());

        let uniform = koopman(&g, &MeasureOnUnits::uniform(3)).unwrap();
        let swap = perm(3, &[1, 0, 2]);
        assert!(uniform.matrix(&swap).unwrap().is_permutation());
    }

    #[test]
    fn koopman_is_multiplicative_and_star_compatible() {
        let g = FiniteGroupoid::new(3, vec![vec![0, 1, 2]]).unwrap();
        let mu = MeasureOnUnits::new(vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)]).unwrap();
        let kappa = koopman(&g, &mu).unwrap();
        let ground = GroundSet::new(3);
        let elements = [
            PartialBijection::new(ground, [(0, 1), (1, 2)]).unwrap(),
            PartialBijection::new(ground, [(2, 0)]).unwrap(),
            perm(3, &[2, 0, 1]),
            PartialBijection::idempotent(ground, [0, 2]).unwrap(),
        ];
        for a in &elements {
            assert_eq!(
                kappa.adjoint(&kappa.matrix(a).unwrap()),
                kappa.matrix(&star(a)).unwrap()
            );
            for b in &elements {
                let product = kappa.matrix(a).unwrap().matmul(&kappa.matrix(b).unwrap()).unwrap();
                assert_eq!(product, kappa.matrix(&compose(b, a).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn koopman_is_tight_on_idempotent_pairs() {
        let g = FiniteGroupoid::new(3, vec![vec![0, 1, 2]]).unwrap();
        let mu = MeasureOnUnits::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        let kappa = koopman(&g, &mu).unwrap();
        let ground = GroundSet::new(3);
        let e0 = PartialBijection::idempotent(ground, [0]).unwrap();
        let e1 = PartialBijection::idempotent(ground, [1]).unwrap();
        let overlap = PartialBijection::idempotent(ground, [0, 1]).unwrap();
        let other = PartialBijection::idempotent(ground, [1, 2]).unwrap();
        assert!(kappa.tightness(&e0, &e1).unwrap());
        assert!(kappa.tightness(&overlap, &other).unwrap());
        assert!(kappa.tightness(&e0, &e0).unwrap());
        let not_idem = PartialBijection::new(ground, [(0, 1)]).unwrap();
        assert!(kappa.tightness(&e0, &not_idem).is_err());
    }

    #[test]
    fn point_rep_kills_the_kernel_element_exactly() {
        let g = FiniteGroupoid::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let g1 = perm(4, &[1, 0, 2, 3]);
        let g2 = perm(4, &[0, 1, 3, 2]);
        assert!(algkern_check(&g, &g1, &g2).unwrap());
        // formally the four terms stay independent
        assert!(!kernel_element(&g1, &g2).unwrap().is_zero());
        // degenerate support is allowed
        let id = PartialBijection::identity(GroundSet::new(4));
        assert!(algkern_check(&g, &id, &g2).unwrap());
        // overlapping invariant closures are rejected
        let g3 = perm(4, &[1, 0, 3, 2]);
        assert!(matches!(
            algkern_check(&g, &g1, &g3),
            Err(Error::BadSupports)
        ));
    }

    #[test]
    fn kernel_fails_formally_but_holds_in_the_rep() {
        let g1 = perm(4, &[1, 0, 2, 3]);
        let g2 = perm(4, &[0, 1, 3, 2]);
        let a = kernel_element(&g1, &g2).unwrap();
        assert_eq!(a.len(), 4);
        let g = FiniteGroupoid::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let rep = groupoid_rep(&g);
        assert!(rep.formal_norm(&a).unwrap() < 1e-12);
    }

    #[test]
    fn koopman_norms_stay_below_regular_norms() {
        let g = FiniteGroupoid::new(6, vec![(0..6).collect()]).unwrap();
        let kappa = koopman(&g, &MeasureOnUnits::uniform(6)).unwrap();
        let lambda = groupoid_regular_rep(&g);
        assert_eq!(lambda.dim(), 36);
        let id = PartialBijection::identity(GroundSet::new(6));
        let one = FormalSum::new([(id.clone(), ratio(1, 1))]);
        let norms = norm_compare(&[&kappa, &lambda], &one).unwrap();
        assert!((norms[0] - 1.0).abs() < 1e-9);
        assert!((norms[1] - 1.0).abs() < 1e-9);

        let swap01 = perm(6, &[1, 0, 2, 3, 4, 5]);
        let cancel = FormalSum::new([
            (swap01.clone(), ratio(1, 1)),
            (swap01.clone(), ratio(-1, 1)),
        ]);
        assert!(cancel.is_zero());
        assert!(lambda.formal_norm(&cancel).unwrap() < 1e-12);

        let cycle = perm(6, &[1, 2, 3, 4, 5, 0]);
        let shift2 = perm(6, &[2, 3, 4, 5, 0, 1]);
        let combos = [
            FormalSum::new([
                (id.clone(), ratio(1, 1)),
                (swap01.clone(), ratio(1, 1)),
            ]),
            FormalSum::new([
                (id.clone(), ratio(1, 1)),
                (cycle.clone(), ratio(-1, 1)),
                (shift2.clone(), ratio(1, 1)),
            ]),
            FormalSum::new([
                (swap01, ratio(1, 1)),
                (cycle, ratio(1, 1)),
                (shift2, ratio(-1, 1)),
                (id, ratio(-1, 1)),
            ]),
        ];
        for a in &combos {
            let norms = norm_compare(&[&kappa, &lambda], a).unwrap();
            assert!(norms[0] <= norms[1] + 1e-9);
        }
    }

    #[test]
    fn sqrt_arithmetic_stays_canonical() {
        let half = SqrtScaled::sqrt(ratio(1, 2)).unwrap();
        assert_eq!(half.mul(&half).square(), &ratio(1, 4));
        let two = SqrtScaled::sqrt(ratio(2, 1)).unwrap();
        // √2·√(1/2) = 1
        assert!(two.mul(&half).is_one());
        let sum = SqrtScaled::one().add(&SqrtScaled::one()).unwrap();
        assert_eq!(sum.square(), &ratio(4, 1));
        // √2 + √8 = 3√2
        let eight = SqrtScaled::sqrt(ratio(8, 1)).unwrap();
        assert_eq!(two.add(&eight).unwrap().square(), &ratio(18, 1));
        assert!(two.add(&SqrtScaled::sqrt(ratio(3, 1)).unwrap()).is_err());
        let neg = SqrtScaled::one().scale(&ratio(-1, 1));
        assert!(SqrtScaled::one().add(&neg).unwrap().is_zero());
    }
}
