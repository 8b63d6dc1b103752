//! Clopen subsets for the two Stone backends: finite power sets over a
//! ground set, and cylinder unions of the n-ary Cantor space encoded by
//! reduced prefix codes.
//!
//! A set of words denotes the union of their cylinders. The canonical form
//! drops words absorbed by a shorter one and merges every complete family of
//! siblings u0,..,u(n-1) into u, so equality of clopens is equality of the
//! stored word lists.

use crate::error::{Error, Result};
use crate::pbij::GroundSet;
use std::collections::BTreeSet;
use std::fmt;

/// Finite word over digits 0..arity. The arity lives on the containing code
/// or map, not on the word itself.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    digits: Vec<u8>,
}

impl Word {
    pub fn empty() -> Self {
        Word { digits: Vec::new() }
    }

    pub fn from_digits(digits: Vec<u8>, arity: u8) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d >= arity) {
            return Err(Error::BadDigit(d, arity));
        }
        Ok(Word { digits })
    }

    pub fn parse(text: &str, arity: u8) -> Result<Self> {
        // the empty word prints as ε, so both spellings must come back
        if text.is_empty() || text == "ε" {
            return Ok(Word::empty());
        }
        let mut digits = Vec::with_capacity(text.len());
        for ch in text.chars() {
            let d = ch
                .to_digit(10)
                .ok_or(Error::Invalid(format!("non-digit character {ch:?} in word")))?;
            if d >= arity as u32 {
                return Err(Error::BadDigit(d as u8, arity));
            }
            digits.push(d as u8);
        }
        Ok(Word { digits })
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn child(&self, d: u8) -> Word {
        let mut digits = self.digits.clone();
        digits.push(d);
        Word { digits }
    }

    pub fn concat(&self, tail: &Word) -> Word {
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&tail.digits);
        Word { digits }
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.digits.len() >= self.digits.len() && other.digits[..self.digits.len()] == self.digits
    }

    /// The suffix t with self·t = other, when self is a prefix of other.
    pub fn strip_prefix(&self, other: &Word) -> Option<Word> {
        if self.is_prefix_of(other) {
            Some(Word {
                digits: other.digits[self.digits.len()..].to_vec(),
            })
        } else {
            None
        }
    }

    pub fn parent(&self) -> Option<(Word, u8)> {
        let (&last, init) = self.digits.split_last()?;
        Some((
            Word {
                digits: init.to_vec(),
            },
            last,
        ))
    }

    /// All extensions of self with total length `len`, in lexicographic order.
    pub fn extensions(&self, len: usize, arity: u8) -> Vec<Word> {
        assert!(len >= self.len());
        let mut out = vec![self.clone()];
        for _ in self.len()..len {
            out = out
                .into_iter()
                .flat_map(|w| (0..arity).map(move |d| w.child(d)))
                .collect();
        }
        out
    }

    /// Plain digit string, empty for the empty word (used by serialization).
    pub fn digit_string(&self) -> String {
        self.digits.iter().map(|d| (b'0' + d) as char).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "{}", self.digit_string())
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Clopen subset of n-ary Cantor space in reduced canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrefixCode {
    arity: u8,
    words: Vec<Word>,
}

impl PrefixCode {
    pub fn new(arity: u8, words: Vec<Word>) -> Result<Self> {
        if arity < 2 {
            return Err(Error::ZeroBase);
        }
        for w in &words {
            if let Some(&d) = w.digits().iter().find(|&&d| d >= arity) {
                return Err(Error::BadDigit(d, arity));
            }
        }
        Ok(Self::canonical(arity, words.into_iter().collect()))
    }

    pub fn parse(arity: u8, words: &[&str]) -> Result<Self> {
        let parsed = words
            .iter()
            .map(|s| Word::parse(s, arity))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arity, parsed)
    }

    pub fn zero(arity: u8) -> Self {
        PrefixCode {
            arity,
            words: Vec::new(),
        }
    }

    pub fn unit(arity: u8) -> Self {
        PrefixCode {
            arity,
            words: vec![Word::empty()],
        }
    }

    fn canonical(arity: u8, words: BTreeSet<Word>) -> Self {
        // Absorption: a word with a proper prefix already present adds nothing.
        let mut kept: Vec<Word> = Vec::new();
        for w in &words {
            if !words
                .iter()
                .any(|p| p.len() < w.len() && p.is_prefix_of(w))
            {
                kept.push(w.clone());
            }
        }
        // Sibling merge, deepest first so merges can cascade upward.
        let mut set: BTreeSet<Word> = kept.into_iter().collect();
        loop {
            let mut merged = false;
            let mut by_depth: Vec<Word> = set.iter().cloned().collect();
            by_depth.sort_by_key(|w| std::cmp::Reverse(w.len()));
            for w in by_depth {
                if !set.contains(&w) {
                    continue;
                }
                let Some((parent, _)) = w.parent() else { continue };
                if (0..arity).all(|d| set.contains(&parent.child(d))) {
                    for d in 0..arity {
                        set.remove(&parent.child(d));
                    }
                    set.insert(parent);
                    merged = true;
                }
            }
            if !merged {
                break;
            }
        }
        PrefixCode {
            arity,
            words: set.into_iter().collect(),
        }
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.words.len() == 1 && self.words[0].is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        self.words.iter().any(|u| u.is_prefix_of(w))
    }

    /// The depth-d cylinders covering this clopen; requires d >= max_depth.
    pub fn expand_to_depth(&self, d: usize) -> Vec<Word> {
        assert!(d >= self.max_depth());
        let mut out = Vec::new();
        for w in &self.words {
            out.extend(w.extensions(d, self.arity));
        }
        out.sort();
        out
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch(self.arity, other.arity));
        }
        Ok(())
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let d = self.max_depth().max(other.max_depth());
        let a: BTreeSet<Word> = self.expand_to_depth(d).into_iter().collect();
        let b: BTreeSet<Word> = other.expand_to_depth(d).into_iter().collect();
        Ok(Self::canonical(self.arity, a.intersection(&b).cloned().collect()))
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut all: BTreeSet<Word> = self.words.iter().cloned().collect();
        all.extend(other.words.iter().cloned());
        Ok(Self::canonical(self.arity, all))
    }

    pub fn complement(&self) -> Self {
        let d = self.max_depth();
        let inside: BTreeSet<Word> = self.expand_to_depth(d).into_iter().collect();
        let outside: BTreeSet<Word> = Word::empty()
            .extensions(d, self.arity)
            .into_iter()
            .filter(|w| !inside.contains(w))
            .collect();
        Self::canonical(self.arity, outside)
    }

    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.check_arity(other)?;
        Ok(self.words.iter().all(|w| other.contains_word(w)))
    }
}

impl fmt::Debug for PrefixCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}@{}", self.arity)
    }
}

/// Idempotent of a Boolean inverse monoid, over either backend.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Clopen {
    Fin { ground: GroundSet, points: Vec<usize> },
    Prefix(PrefixCode),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoolOpKind {
    Meet,
    Join,
    Complement,
    Leq,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BoolOpResult {
    Set(Clopen),
    Truth(bool),
}

impl Clopen {
    pub fn fin(ground: GroundSet, mut points: Vec<usize>) -> Result<Self> {
        points.sort_unstable();
        points.dedup();
        if let Some(&p) = points.iter().find(|&&p| p >= ground.size) {
            return Err(Error::PointOutOfRange(p, ground.size));
        }
        Ok(Clopen::Fin { ground, points })
    }

    pub fn fin_unit(ground: GroundSet) -> Self {
        Clopen::Fin {
            points: (0..ground.size).collect(),
            ground,
        }
    }

    pub fn prefix(code: PrefixCode) -> Self {
        Clopen::Prefix(code)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Clopen::Fin { points, .. } => points.is_empty(),
            Clopen::Prefix(code) => code.is_zero(),
        }
    }

    pub fn is_unit(&self) -> bool {
        match self {
            Clopen::Fin { ground, points } => points.len() == ground.size,
            Clopen::Prefix(code) => code.is_unit(),
        }
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Clopen::Fin { ground, points }, Clopen::Fin { ground: g2, points: q }) => {
                if ground != g2 {
                    return Err(Error::GroundSetMismatch(ground.size, g2.size));
                }
                let keep: Vec<usize> = points.iter().copied().filter(|p| q.contains(p)).collect();
                Clopen::fin(*ground, keep)
            }
            (Clopen::Prefix(a), Clopen::Prefix(b)) => Ok(Clopen::Prefix(a.meet(b)?)),
            _ => Err(Error::BackendMismatch),
        }
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Clopen::Fin { ground, points }, Clopen::Fin { ground: g2, points: q }) => {
                if ground != g2 {
                    return Err(Error::GroundSetMismatch(ground.size, g2.size));
                }
                let mut all = points.clone();
                all.extend_from_slice(q);
                Clopen::fin(*ground, all)
            }
            (Clopen::Prefix(a), Clopen::Prefix(b)) => Ok(Clopen::Prefix(a.join(b)?)),
            _ => Err(Error::BackendMismatch),
        }
    }

    pub fn complement(&self) -> Self {
        match self {
            Clopen::Fin { ground, points } => Clopen::Fin {
                ground: *ground,
                points: (0..ground.size).filter(|p| !points.contains(p)).collect(),
            },
            Clopen::Prefix(code) => Clopen::Prefix(code.complement()),
        }
    }

    pub fn leq(&self, other: &Self) -> Result<bool> {
        match (self, other) {
            (Clopen::Fin { ground, points }, Clopen::Fin { ground: g2, points: q }) => {
                if ground != g2 {
                    return Err(Error::GroundSetMismatch(ground.size, g2.size));
                }
                Ok(points.iter().all(|p| q.contains(p)))
            }
            (Clopen::Prefix(a), Clopen::Prefix(b)) => a.leq(b),
            _ => Err(Error::BackendMismatch),
        }
    }
}

/// Dispatching wrapper over the four Boolean-algebra operations. Complement
/// ignores its second argument.
pub fn boolean_op(kind: BoolOpKind, e: &Clopen, f: &Clopen) -> Result<BoolOpResult> {
    Ok(match kind {
        BoolOpKind::Meet => BoolOpResult::Set(e.meet(f)?),
        BoolOpKind::Join => BoolOpResult::Set(e.join(f)?),
        BoolOpKind::Complement => BoolOpResult::Set(e.complement()),
        BoolOpKind::Leq => BoolOpResult::Truth(e.leq(f)?),
    })
}
