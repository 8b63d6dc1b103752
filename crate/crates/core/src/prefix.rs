//! Partial homeomorphisms of n-ary Cantor space given by prefix
//! substitutions: a finite list of pairs u -> v with the u forming a prefix
//! code, acting by u·w ↦ v·w. These are the elements of the Boolean inverse
//! monoids attached to the polycyclic generators, and the carrier for
//! tree-pair diagrams later on.
//!
//! Composition is read left to right: `compose(a, b)` applies a first.

use crate::clopen::{PrefixCode, Word};
use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

/// Canonical form: pairs sorted by domain word; every complete sibling
/// family (u0 -> v0, .., u(n-1) -> v(n-1)) is merged to u -> v. Zero is the
/// empty pair list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrefixMap {
    arity: u8,
    pairs: Vec<(Word, Word)>,
}

impl PrefixMap {
    pub fn new(arity: u8, pairs: Vec<(Word, Word)>) -> Result<Self> {
        if arity < 2 {
            return Err(Error::ZeroBase);
        }
        for (u, v) in &pairs {
            for w in [u, v] {
                if let Some(&d) = w.digits().iter().find(|&&d| d >= arity) {
                    return Err(Error::BadDigit(d, arity));
                }
            }
        }
        for (i, (u, _)) in pairs.iter().enumerate() {
            for (p, _) in &pairs[i + 1..] {
                if u.is_prefix_of(p) || p.is_prefix_of(u) {
                    return Err(Error::Invalid(format!(
                        "domain words {u} and {p} overlap"
                    )));
                }
            }
        }
        for (i, (_, v)) in pairs.iter().enumerate() {
            for (_, q) in &pairs[i + 1..] {
                if v.is_prefix_of(q) || q.is_prefix_of(v) {
                    return Err(Error::Invalid(format!(
                        "range words {v} and {q} overlap"
                    )));
                }
            }
        }
        Ok(Self::canonical(arity, pairs))
    }

    /// From the wire shape: raw word lists plus a pairing, dom[i] -> ran[perm[i]].
    /// The lists are taken in the order given; canonicalization happens after
    /// the pairing is fixed.
    pub fn from_words(arity: u8, dom: &[Word], ran: &[Word], perm: &[usize]) -> Result<Self> {
        if dom.len() != ran.len() || perm.len() != dom.len() {
            return Err(Error::Invalid(format!(
                "pairing shape: |dom|={} |ran|={} |perm|={}",
                dom.len(),
                ran.len(),
                perm.len()
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::Invalid("perm is not a permutation".into()));
            }
            seen[p] = true;
        }
        let pairs = dom
            .iter()
            .enumerate()
            .map(|(i, u)| (u.clone(), ran[perm[i]].clone()))
            .collect();
        Self::new(arity, pairs)
    }

    fn canonical(arity: u8, mut pairs: Vec<(Word, Word)>) -> Self {
        loop {
            pairs.sort();
            let mut merged = false;
            let mut out: Vec<(Word, Word)> = Vec::with_capacity(pairs.len());
            let mut i = 0;
            while i < pairs.len() {
                let (u, v) = &pairs[i];
                let family = u.parent().zip(v.parent()).and_then(|((pu, du), (pv, dv))| {
                    if du != 0 || dv != 0 || pairs.len() - i < arity as usize {
                        return None;
                    }
                    for d in 1..arity {
                        let (u2, v2) = &pairs[i + d as usize];
                        if *u2 != pu.child(d) || *v2 != pv.child(d) {
                            return None;
                        }
                    }
                    Some((pu, pv))
                });
                match family {
                    Some((pu, pv)) => {
                        out.push((pu, pv));
                        i += arity as usize;
                        merged = true;
                    }
                    None => {
                        out.push(pairs[i].clone());
                        i += 1;
                    }
                }
            }
            pairs = out;
            if !merged {
                break;
            }
        }
        PrefixMap { arity, pairs }
    }

    pub fn zero(arity: u8) -> Self {
        PrefixMap {
            arity,
            pairs: Vec::new(),
        }
    }

    pub fn identity(arity: u8) -> Self {
        PrefixMap {
            arity,
            pairs: vec![(Word::empty(), Word::empty())],
        }
    }

    /// Identity restricted to a clopen.
    pub fn idempotent(code: &PrefixCode) -> Self {
        PrefixMap {
            arity: code.arity(),
            pairs: code.words().iter().map(|w| (w.clone(), w.clone())).collect(),
        }
    }

    /// The polycyclic generator x ↦ d·x.
    pub fn cuntz_generator(arity: u8, d: u8) -> Self {
        assert!(d < arity);
        PrefixMap {
            arity,
            pairs: vec![(Word::empty(), Word::empty().child(d))],
        }
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn pairs(&self) -> &[(Word, Word)] {
        &self.pairs
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.len() == 1 && self.pairs[0].0.is_empty() && self.pairs[0].1.is_empty()
    }

    pub fn is_idempotent(&self) -> bool {
        self.pairs.iter().all(|(u, v)| u == v)
    }

    pub fn domain_code(&self) -> PrefixCode {
        PrefixCode::new(self.arity, self.pairs.iter().map(|(u, _)| u.clone()).collect())
            .expect("domain words form a code")
    }

    pub fn range_code(&self) -> PrefixCode {
        PrefixCode::new(self.arity, self.pairs.iter().map(|(_, v)| v.clone()).collect())
            .expect("range words form a code")
    }

    pub fn max_word_len(&self) -> usize {
        self.pairs
            .iter()
            .map(|(u, v)| u.len().max(v.len()))
            .max()
            .unwrap_or(0)
    }

    /// Evaluation oracle on finite words: u·t ↦ v·t for the unique pair with
    /// u a prefix of the input.
    pub fn apply(&self, word: &Word) -> Result<Word> {
        for (u, v) in &self.pairs {
            if let Some(t) = u.strip_prefix(word) {
                return Ok(v.concat(&t));
            }
        }
        Err(Error::WordOutsideDomain(word.to_string()))
    }
}

impl fmt::Debug for PrefixMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return write!(f, "0@{}", self.arity);
        }
        write!(f, "[")?;
        for (i, (u, v)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}->{v}")?;
        }
        write!(f, "]@{}", self.arity)
    }
}

fn check_arity(a: &PrefixMap, b: &PrefixMap) -> Result<()> {
    if a.arity != b.arity {
        return Err(Error::ArityMismatch(a.arity, b.arity));
    }
    Ok(())
}

/// a then b. A pair (u -> v) of a meets (p -> q) of b wherever the cylinders
/// v and p overlap; the overlap contributes (u·t -> q·s) with v·t = p·s the
/// longer of the two.
pub fn compose(a: &PrefixMap, b: &PrefixMap) -> Result<PrefixMap> {
    check_arity(a, b)?;
    let mut pairs = Vec::new();
    for (u, v) in &a.pairs {
        for (p, q) in &b.pairs {
            if let Some(t) = p.strip_prefix(v) {
                pairs.push((u.clone(), q.concat(&t)));
            } else if let Some(t) = v.strip_prefix(p) {
                if !t.is_empty() {
                    pairs.push((u.concat(&t), q.clone()));
                }
            }
        }
    }
    Ok(PrefixMap::canonical(a.arity, pairs))
}

pub fn star(a: &PrefixMap) -> PrefixMap {
    PrefixMap::canonical(
        a.arity,
        a.pairs.iter().map(|(u, v)| (v.clone(), u.clone())).collect(),
    )
}

pub fn dom_projection(a: &PrefixMap) -> PrefixMap {
    PrefixMap::idempotent(&a.domain_code())
}

pub fn ran_projection(a: &PrefixMap) -> PrefixMap {
    PrefixMap::idempotent(&a.range_code())
}

/// Join of pairwise compatible maps. Every pair is refined to a common
/// domain depth, then conflicts in either coordinate reject the join.
pub fn join(parts: &[PrefixMap]) -> Result<PrefixMap> {
    let Some(first) = parts.first() else {
        return Err(Error::Invalid("join of an empty family".into()));
    };
    let arity = first.arity;
    for p in parts {
        if p.arity != arity {
            return Err(Error::ArityMismatch(arity, p.arity));
        }
    }
    let depth = parts
        .iter()
        .flat_map(|p| p.pairs.iter().map(|(u, _)| u.len()))
        .max()
        .unwrap_or(0);
    let mut refined: BTreeSet<(Word, Word)> = BTreeSet::new();
    for p in parts {
        for (u, v) in &p.pairs {
            for ext in u.extensions(depth, arity) {
                let t = u.strip_prefix(&ext).unwrap();
                refined.insert((ext, v.concat(&t)));
            }
        }
    }
    let refined: Vec<(Word, Word)> = refined.into_iter().collect();
    for (i, (u, v)) in refined.iter().enumerate() {
        for (j, (p, q)) in refined.iter().enumerate().skip(i + 1) {
            let dom_clash = u == p;
            let ran_clash = v.is_prefix_of(q) || q.is_prefix_of(v);
            if dom_clash || ran_clash {
                return Err(Error::IncompatiblePair(i, j));
            }
        }
    }
    Ok(PrefixMap::canonical(arity, refined))
}

/// Semantic equality oracle: two maps agree iff they agree as word maps at
/// depth one past the deeper code.
pub fn agree_at_probe_depth(a: &PrefixMap, b: &PrefixMap) -> Result<bool> {
    check_arity(a, b)?;
    let depth = a.max_word_len().max(b.max_word_len()) + 1;
    for w in Word::empty().extensions(depth, a.arity) {
        let ia = a.apply(&w);
        let ib = b.apply(&w);
        match (ia, ib) {
            (Ok(x), Ok(y)) => {
                if x != y {
                    return Ok(false);
                }
            }
            (Err(_), Err(_)) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}
