//! Finite words over a `d`-letter alphabet, the prefix order on the tree
//! `X^*`, antichains, and the cylinder-count invariant of clopen sets.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest alphabet supported by the digit-string word syntax.
pub const MAX_ALPHABET: usize = 10;

/// The alphabet `{0, 1, ..., d-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(d: usize) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&d) {
            return Err(Error::Alphabet(format!(
                "alphabet size must be between 2 and {MAX_ALPHABET}, got {d}"
            )));
        }
        Ok(Alphabet(d))
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0
    }

    pub fn letters(self) -> impl Iterator<Item = u8> + Clone {
        0..self.0 as u8
    }

    /// All words of length `n`, in lexicographic order.
    pub fn level(self, n: usize) -> impl Iterator<Item = Word> {
        let d = self.0;
        let count = d.pow(n as u32);
        (0..count).map(move |mut i| {
            let mut letters = vec![0u8; n];
            for slot in letters.iter_mut().rev() {
                *slot = (i % d) as u8;
                i /= d;
            }
            Word(letters)
        })
    }

    /// Number of words on level `n`, or `None` on overflow.
    pub fn level_size(self, n: usize) -> Option<usize> {
        self.0.checked_pow(u32::try_from(n).ok()?)
    }

    pub fn check(self, w: &Word) -> Result<()> {
        match w.0.iter().find(|&&x| x as usize >= self.0) {
            Some(&x) => Err(Error::Alphabet(format!(
                "letter {x} outside alphabet of size {}",
                self.0
            ))),
            None => Ok(()),
        }
    }
}

/// A finite word; the empty word is the root of the tree.
///
/// `Ord` is the lexicographic order in which a word precedes all of its
/// extensions.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl Into<Vec<u8>>) -> Self {
        Word(letters.into())
    }

    #[inline]
    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, x: u8) -> Word {
        let mut v = self.0.clone();
        v.push(x);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k.min(self.0.len())].to_vec())
    }

    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.prefix(self.0.len() - 1))
        }
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    /// `true` iff `self` is a beginning of `other` (including equality).
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// The rest of `other` after the prefix `self`.
    pub fn strip_from<'a>(&self, other: &'a Word) -> Option<&'a [u8]> {
        other.0.strip_prefix(self.0.as_slice())
    }

    pub fn push(&mut self, x: u8) {
        self.0.push(x);
    }

    pub fn extend_from_slice(&mut self, s: &[u8]) {
        self.0.extend_from_slice(s);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for &x in &self.0 {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Word::empty());
        }
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|x| x as u8)
                    .ok_or_else(|| Error::Parse(format!("invalid letter {c:?} in word {s:?}")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Outcome of comparing two words in the prefix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixOrder {
    Equal,
    /// The first word is a proper beginning of the second.
    Precedes,
    /// The second word is a proper beginning of the first.
    Follows,
    Incomparable,
}

impl PrefixOrder {
    /// `v ⪯ u`
    pub fn first_below(self) -> bool {
        matches!(self, PrefixOrder::Equal | PrefixOrder::Precedes)
    }

    /// `u ⪯ v`
    pub fn second_below(self) -> bool {
        matches!(self, PrefixOrder::Equal | PrefixOrder::Follows)
    }
}

pub fn prefix_compare(v: &Word, u: &Word) -> PrefixOrder {
    match (v.is_prefix_of(u), u.is_prefix_of(v)) {
        (true, true) => PrefixOrder::Equal,
        (true, false) => PrefixOrder::Precedes,
        (false, true) => PrefixOrder::Follows,
        (false, false) => PrefixOrder::Incomparable,
    }
}

pub fn lex_compare(v: &Word, u: &Word) -> Ordering {
    v.cmp(u)
}

fn pairwise_incomparable(words: &[Word]) -> bool {
    // In lex order a word is immediately followed by its extensions, so
    // checking neighbours suffices.
    let mut sorted: Vec<&Word> = words.iter().collect();
    sorted.sort();
    sorted
        .windows(2)
        .all(|w| prefix_compare(w[0], w[1]) == PrefixOrder::Incomparable)
}

/// `Σ d^{-|v|}` as the exact fraction `num / d^depth`.
fn measure(words: &[Word], d: usize) -> (BigUint, BigUint) {
    let depth = words.iter().map(Word::len).max().unwrap_or(0);
    let d = BigUint::from(d);
    let total = num_traits::pow(d.clone(), depth);
    let mut num = BigUint::zero();
    for w in words {
        num += num_traits::pow(d.clone(), depth - w.len());
    }
    (num, total)
}

/// Whether `words` is a complete antichain: pairwise incomparable, with
/// cylinders covering `X^ω`.
pub fn is_complete_antichain(words: &[Word], d: usize) -> bool {
    if words.is_empty() || !pairwise_incomparable(words) {
        return false;
    }
    if words
        .iter()
        .any(|w| w.letters().iter().any(|&x| x as usize >= d))
    {
        return false;
    }
    let (num, total) = measure(words, d);
    num == total
}

/// A finite set of pairwise incomparable words, stored in lex order.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Antichain(Vec<Word>);

impl Antichain {
    pub fn new(words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let set: BTreeSet<Word> = words.into_iter().collect();
        let words: Vec<Word> = set.into_iter().collect();
        if !pairwise_incomparable(&words) {
            return Err(Error::Antichain(format!(
                "words are not pairwise incomparable: {}",
                fmt_words(&words)
            )));
        }
        Ok(Antichain(words))
    }

    /// The complete antichain `{ε}`.
    pub fn root() -> Self {
        Antichain(vec![Word::empty()])
    }

    pub fn level(alphabet: Alphabet, n: usize) -> Self {
        Antichain(alphabet.level(n).collect())
    }

    pub fn words(&self) -> &[Word] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.0.binary_search(w).is_ok()
    }

    pub fn is_complete(&self, d: usize) -> bool {
        is_complete_antichain(&self.0, d)
    }

    pub fn depth(&self) -> usize {
        self.0.iter().map(Word::len).max().unwrap_or(0)
    }

    /// The unique word of the antichain that is a prefix of `w`, if any.
    pub fn prefix_of(&self, w: &Word) -> Option<&Word> {
        // The candidate is the lex-greatest element not exceeding `w`.
        let idx = match self.0.binary_search(w) {
            Ok(i) => return Some(&self.0[i]),
            Err(i) => i,
        };
        idx.checked_sub(1)
            .map(|i| &self.0[i])
            .filter(|v| v.is_prefix_of(w))
    }

    /// Replace `w` by its `d` children.
    pub fn split(&self, w: &Word, d: usize) -> Result<Self> {
        if !self.contains(w) {
            return Err(Error::Antichain(format!("{w} is not in the antichain")));
        }
        let mut words: Vec<Word> = self.0.iter().filter(|v| *v != w).cloned().collect();
        words.extend((0..d as u8).map(|x| w.child(x)));
        words.sort();
        Ok(Antichain(words))
    }

    /// Whether every word of `finer` has a prefix in `self`.
    pub fn is_refined_by(&self, finer: &Antichain) -> bool {
        finer.0.iter().all(|w| self.prefix_of(w).is_some())
    }

    /// The coarsest antichain describing the same clopen set: every full
    /// family of `d` siblings is merged into its parent, repeatedly.
    pub fn coarsest(&self, d: usize) -> Antichain {
        let mut set: BTreeSet<Word> = self.0.iter().cloned().collect();
        loop {
            let mut merged = None;
            for w in &set {
                if let Some(p) = w.parent() {
                    if w.last() == Some(0) && (0..d as u8).all(|x| set.contains(&p.child(x))) {
                        merged = Some(p);
                        break;
                    }
                }
            }
            match merged {
                Some(p) => {
                    for x in 0..d as u8 {
                        set.remove(&p.child(x));
                    }
                    set.insert(p);
                }
                None => break,
            }
        }
        Antichain(set.into_iter().collect())
    }

    /// The coarsest antichain whose cylinders cover the complement of this
    /// antichain's cylinders.
    pub fn complement(&self, d: usize) -> Antichain {
        fn walk(node: Word, words: &[Word], d: usize, out: &mut Vec<Word>) {
            let below: Vec<Word> = words
                .iter()
                .filter(|w| node.is_prefix_of(w) || w.is_prefix_of(&node))
                .cloned()
                .collect();
            if below.is_empty() {
                out.push(node);
                return;
            }
            if below.iter().any(|w| w.is_prefix_of(&node)) {
                return;
            }
            for x in 0..d as u8 {
                walk(node.child(x), &below, d, out);
            }
        }
        let mut out = Vec::new();
        walk(Word::empty(), &self.0, d, &mut out);
        out.sort();
        Antichain(out)
    }

    /// Split shortest-then-lex-first words until the antichain has `target`
    /// elements. `target - len` must be a non-negative multiple of `d - 1`.
    pub fn split_to_size(&self, target: usize, d: usize) -> Result<Antichain> {
        if target < self.len() || !(target - self.len()).is_multiple_of(d - 1) || self.is_empty() {
            return Err(Error::Antichain(format!(
                "cannot split {} cylinders into {target}",
                self.len()
            )));
        }
        let mut current = self.clone();
        while current.len() < target {
            let w = current
                .0
                .iter()
                .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
                .cloned()
                .expect("nonempty");
            current = current.split(&w, d)?;
        }
        Ok(current)
    }
}

impl fmt::Debug for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", fmt_words(&self.0))
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", fmt_words(&self.0))
    }
}

impl<'de> Deserialize<'de> for Antichain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let words = Vec::<Word>::deserialize(d)?;
        Antichain::new(words).map_err(serde::de::Error::custom)
    }
}

fn fmt_words(words: &[Word]) -> String {
    words
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// The coarsest complete antichain refining both inputs.
pub fn common_refinement(a1: &Antichain, a2: &Antichain) -> Antichain {
    // Comparable pairs contribute their longer word; for complete inputs
    // these are exactly the atoms of the common refinement.
    let mut out = BTreeSet::new();
    for v in a1.words() {
        for u in a2.words() {
            match prefix_compare(v, u) {
                PrefixOrder::Equal | PrefixOrder::Precedes => {
                    out.insert(u.clone());
                }
                PrefixOrder::Follows => {
                    out.insert(v.clone());
                }
                PrefixOrder::Incomparable => {}
            }
        }
    }
    Antichain(out.into_iter().collect())
}

/// `|A| mod (d-1)`: the class of the clopen set `⋃ vX^ω` that does not
/// depend on the chosen cylinder decomposition.
pub fn m_invariant(a: &Antichain, d: usize) -> usize {
    assert!(d >= 2, "alphabet must have at least two letters");
    a.len() % (d - 1)
}

/// Exact measure `Σ d^{-|v|}` as `(numerator, denominator)`.
pub fn cylinder_measure(a: &Antichain, d: usize) -> (BigUint, BigUint) {
    let (num, den) = measure(a.words(), d);
    if num.is_zero() {
        return (num, BigUint::one());
    }
    let g = num_integer::Integer::gcd(&num, &den);
    (num / &g, den / g)
}
