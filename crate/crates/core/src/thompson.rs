//! Unit-to-unit prefix bijections as a group, and the embedding that plants
//! that group inside the bijections of any tightly split base.

use crate::bim::{bim_compose, bim_join, bim_star, BimElement};
use crate::clopen::{Clopen, Word};
use crate::error::{Error, Result};
use crate::prefix::{self, PrefixMap};
use std::collections::BTreeSet;

/// A prefix map whose domain and range cylinders each cover the whole space.
/// The wrapped map is canonical, so equality is group-element equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct VElement {
    map: PrefixMap,
}

impl VElement {
    pub fn new(map: PrefixMap) -> Result<Self> {
        if !map.domain_code().is_unit() || !map.range_code().is_unit() {
            return Err(Error::IncompleteCode);
        }
        Ok(VElement { map })
    }

    pub fn identity(arity: u8) -> Self {
        VElement {
            map: PrefixMap::new(arity, vec![(Word::empty(), Word::empty())])
                .expect("identity pair is a valid map"),
        }
    }

    pub fn map(&self) -> &PrefixMap {
        &self.map
    }

    pub fn arity(&self) -> u8 {
        self.map.arity()
    }

    /// Pair count of the reduced form.
    pub fn leaf_count(&self) -> usize {
        self.map.pairs().len()
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_identity()
    }

    /// Left-to-right product: self, then other.
    pub fn multiply(&self, other: &VElement) -> Result<VElement> {
        VElement::new(prefix::compose(&self.map, &other.map)?)
    }

    pub fn invert(&self) -> VElement {
        VElement {
            map: prefix::star(&self.map),
        }
    }

    pub fn apply(&self, word: &Word) -> Result<Word> {
        self.map.apply(word)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VOpKind {
    Multiply,
    Invert,
    Identity,
}

/// Uniform entry point for the group operations, arity fixed up front.
pub fn v_op(kind: VOpKind, arity: u8, args: &[VElement]) -> Result<VElement> {
    let arg_count = match kind {
        VOpKind::Multiply => 2,
        VOpKind::Invert => 1,
        VOpKind::Identity => 0,
    };
    if args.len() != arg_count {
        return Err(Error::Invalid(format!(
            "operation takes {arg_count} arguments, got {}",
            args.len()
        )));
    }
    if let Some(bad) = args.iter().find(|g| g.arity() != arity) {
        return Err(Error::ArityMismatch(arity, bad.arity()));
    }
    Ok(match kind {
        VOpKind::Multiply => args[0].multiply(&args[1])?,
        VOpKind::Invert => args[0].invert(),
        VOpKind::Identity => VElement::identity(arity),
    })
}

/// All partitions of the space into at most `max_leaves` cylinders, as leaf
/// lists in canonical order.
fn complete_codes(arity: u8, max_leaves: usize) -> Vec<Vec<Word>> {
    let mut seen: BTreeSet<Vec<Word>> = BTreeSet::new();
    let mut frontier = vec![vec![Word::empty()]];
    seen.insert(frontier[0].clone());
    while let Some(code) = frontier.pop() {
        if code.len() + (arity as usize - 1) > max_leaves {
            continue;
        }
        for i in 0..code.len() {
            let mut split = code.clone();
            let leaf = split.remove(i);
            split.extend((0..arity).map(|d| leaf.child(d)));
            split.sort();
            if seen.insert(split.clone()) {
                frontier.push(split);
            }
        }
    }
    seen.into_iter().collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(remaining: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..remaining.len() {
            let x = remaining.remove(i);
            prefix.push(x);
            go(remaining, prefix, out);
            prefix.pop();
            remaining.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// Every group element whose reduced form uses at most `max_leaves` pairs,
/// in canonical order. Enumerates leaf partitions of matching size with all
/// bijections between them, then deduplicates by reduced form.
pub fn reduced_v_elements(arity: u8, max_leaves: usize) -> Vec<VElement> {
    let codes = complete_codes(arity, max_leaves);
    let mut out: BTreeSet<VElement> = BTreeSet::new();
    for dom in &codes {
        for ran in &codes {
            if dom.len() != ran.len() {
                continue;
            }
            for sigma in permutations(dom.len()) {
                let pairs = dom
                    .iter()
                    .cloned()
                    .zip(sigma.iter().map(|&i| ran[i].clone()))
                    .collect();
                let map = PrefixMap::new(arity, pairs).expect("partition pairs form a map");
                out.insert(VElement::new(map).expect("partitions cover the space"));
            }
        }
    }
    out.into_iter().collect()
}

/// A tight orthogonal pair over a base clopen, acting as a homomorphism from
/// the unit-bijection group onto bijections of the base.
#[derive(Clone, Debug)]
pub struct VEmbedding {
    first: BimElement,
    second: BimElement,
    base: Clopen,
}

/// Validate the pair and build the embedding: both elements carry the base
/// onto orthogonal pieces whose join gives the base back.
pub fn embed_v(s: &BimElement, t: &BimElement) -> Result<VEmbedding> {
    let base = s.dom_clopen();
    if base.is_zero() {
        return Err(Error::ZeroBase);
    }
    if t.dom_clopen() != base {
        return Err(Error::Invalid("pair sources differ".into()));
    }
    if !bim_compose(s, &bim_star(t))?.is_zero() {
        return Err(Error::NotOrthogonal);
    }
    let covered = s.ran_clopen().join(&t.ran_clopen())?;
    if covered != base {
        return Err(Error::NotTight);
    }
    Ok(VEmbedding {
        first: s.clone(),
        second: t.clone(),
        base,
    })
}

impl VEmbedding {
    pub fn base(&self) -> &Clopen {
        &self.base
    }

    pub fn pair(&self) -> (&BimElement, &BimElement) {
        (&self.first, &self.second)
    }

    /// Composite carrying the base onto the piece addressed by the word,
    /// innermost bit applied first.
    fn word_map(&self, word: &Word) -> Result<BimElement> {
        let mut acc = self.base.idempotent_element();
        for &bit in word.digits().iter().rev() {
            let step = if bit == 0 { &self.first } else { &self.second };
            acc = bim_compose(&acc, step)?;
        }
        Ok(acc)
    }

    /// Image of a group element: each cylinder pair (u -> v) becomes the
    /// partial bijection carrying the u-piece of the base onto the v-piece.
    pub fn image(&self, g: &VElement) -> Result<BimElement> {
        if g.arity() != 2 {
            return Err(Error::ArityMismatch(2, g.arity()));
        }
        let mut parts = Vec::with_capacity(g.leaf_count());
        for (u, v) in g.map().pairs() {
            if u.digits().iter().chain(v.digits()).any(|&b| b > 1) {
                return Err(Error::BadDigit(*u.digits().iter().find(|&&b| b > 1).unwrap_or(&0), 2));
            }
            let from = self.word_map(u)?;
            let to = self.word_map(v)?;
            parts.push(bim_compose(&bim_star(&from), &to)?);
        }
        bim_join(&parts)
    }
}

/// Outcome of checking an embedding against a finite sample: products must
/// be preserved and distinct elements must stay distinct.
#[derive(Clone, Debug)]
pub struct EmbeddingReport {
    pub homomorphism_ok: bool,
    pub injective_on_test_set: bool,
    /// Index pairs whose product was not preserved.
    pub failed_products: Vec<(usize, usize)>,
    /// Index pairs of distinct elements with equal images.
    pub coincident_images: Vec<(usize, usize)>,
}

pub fn verify_embedding(h: &VEmbedding, test_set: &[VElement]) -> Result<EmbeddingReport> {
    let images: Vec<BimElement> = test_set
        .iter()
        .map(|g| h.image(g))
        .collect::<Result<Vec<_>>>()?;
    let mut failed_products = Vec::new();
    for (i, g) in test_set.iter().enumerate() {
        for (j, k) in test_set.iter().enumerate() {
            let product_image = h.image(&g.multiply(k)?)?;
            let image_product = bim_compose(&images[i], &images[j])?;
            if product_image != image_product {
                failed_products.push((i, j));
            }
        }
    }
    let mut coincident_images = Vec::new();
    for i in 0..test_set.len() {
        for j in i + 1..test_set.len() {
            if test_set[i] != test_set[j] && images[i] == images[j] {
                coincident_images.push((i, j));
            }
        }
    }
    Ok(EmbeddingReport {
        homomorphism_ok: failed_products.is_empty(),
        injective_on_test_set: coincident_images.is_empty(),
        failed_products,
        coincident_images,
    })
}
