//! Self-similar groups: definitions, interned machine states and the word
//! problem.

pub mod def;
mod store;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Mutex, MutexGuard};

pub use def::{DisplayWord, GenWord, GroupDef, Letter, Rule};
pub use store::StateId;

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::words::Word;
use store::{FreshNode, Store, Target};

/// Default number of fresh machine states one operation may create.
pub const DEFAULT_DEPTH_LIMIT: usize = 10_000;

/// Default cap on the number of words in a level that may be enumerated.
pub const DEFAULT_LEVEL_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Triviality {
    Trivial,
    /// `witness` is a word moved by the element.
    Nontrivial {
        witness: Word,
    },
    Undecided,
}

impl Triviality {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Triviality::Trivial)
    }
}

impl fmt::Display for Triviality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Triviality::Trivial => f.write_str("trivial"),
            Triviality::Nontrivial { witness } => write!(f, "nontrivial (witness {witness})"),
            Triviality::Undecided => f.write_str("undecided"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equality {
    Equal,
    /// The two elements send `witness` to different words.
    Different {
        witness: Word,
    },
    Undecided,
}

impl Equality {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equality::Equal)
    }
}

impl fmt::Display for Equality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equality::Equal => f.write_str("equal"),
            Equality::Different { witness } => write!(f, "different (witness {witness})"),
            Equality::Undecided => f.write_str("undecided"),
        }
    }
}

/// Wreath decomposition of an interned state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineState {
    pub perm: Perm,
    pub sections: Vec<StateId>,
}

pub(crate) struct Inner {
    pub store: Store,
    letters: Option<Vec<StateId>>,
}

/// A group definition together with its state cache.
///
/// All queries take `&self`; the cache sits behind a mutex and only ever
/// grows, so results do not depend on the order in which queries ran.
pub struct Group {
    def: GroupDef,
    depth_limit: usize,
    level_limit: usize,
    inner: Mutex<Inner>,
}

impl Clone for Group {
    fn clone(&self) -> Self {
        let inner = self.lock();
        Group {
            def: self.def.clone(),
            depth_limit: self.depth_limit,
            level_limit: self.level_limit,
            inner: Mutex::new(Inner {
                store: inner.store.clone(),
                letters: inner.letters.clone(),
            }),
        }
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("names", &self.def.names())
            .field("degree", &self.def.degree())
            .finish_non_exhaustive()
    }
}

impl From<GroupDef> for Group {
    fn from(def: GroupDef) -> Self {
        Group::new(def)
    }
}

impl Group {
    pub fn new(def: GroupDef) -> Self {
        let store = Store::new(def.degree());
        Group {
            def,
            depth_limit: DEFAULT_DEPTH_LIMIT,
            level_limit: DEFAULT_LEVEL_LIMIT,
            inner: Mutex::new(Inner {
                store,
                letters: None,
            }),
        }
    }

    pub fn with_depth_limit(mut self, limit: usize) -> Self {
        self.depth_limit = limit.max(1);
        self
    }

    pub fn with_level_limit(mut self, limit: usize) -> Self {
        self.level_limit = limit;
        self
    }

    pub fn def(&self) -> &GroupDef {
        &self.def
    }

    pub fn degree(&self) -> usize {
        self.def.degree()
    }

    pub fn depth_limit(&self) -> usize {
        self.depth_limit
    }

    pub fn level_limit(&self) -> usize {
        self.level_limit
    }

    pub(crate) fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Number of states created so far.
    pub fn cached_states(&self) -> usize {
        self.lock().store.len()
    }

    pub(crate) fn letter_states(&self, inner: &mut Inner) -> Result<Vec<StateId>> {
        if let Some(l) = &inner.letters {
            return Ok(l.clone());
        }
        let states = build_letters(&mut inner.store, &self.def, self.depth_limit)?;
        inner.letters = Some(states.clone());
        Ok(states)
    }

    /// Canonical state of a word.
    pub fn intern(&self, g: &GenWord) -> Result<StateId> {
        self.intern_within(g, self.depth_limit)
    }

    pub fn intern_within(&self, g: &GenWord, limit: usize) -> Result<StateId> {
        let mut inner = self.lock();
        let letters = self.letter_states(&mut inner)?;
        let mut acc = StateId::IDENTITY;
        for l in g.letters() {
            acc = inner.store.mul(acc, letters[l.index()], limit)?;
        }
        Ok(acc)
    }

    /// Product `s·t` (apply `t` first).
    pub fn mul(&self, s: StateId, t: StateId) -> Result<StateId> {
        self.lock().store.mul(s, t, self.depth_limit)
    }

    pub fn inv(&self, s: StateId) -> Result<StateId> {
        self.lock().store.inv(s, self.depth_limit)
    }

    pub fn state(&self, s: StateId) -> MachineState {
        let inner = self.lock();
        MachineState {
            perm: inner.store.perm(s).clone(),
            sections: inner.store.sections(s).to_vec(),
        }
    }

    pub fn state_perm(&self, s: StateId) -> Perm {
        self.lock().store.perm(s).clone()
    }

    pub fn state_section(&self, s: StateId, x: u8) -> StateId {
        self.lock().store.section(s, x)
    }

    /// Shortest word seen so far that represents `s`.
    pub fn repr(&self, s: StateId) -> GenWord {
        self.lock().store.repr(s).clone()
    }

    /// Stored state with the given permutation and sections, if any.
    pub fn lookup(&self, perm: &Perm, sections: &[StateId]) -> Option<StateId> {
        self.lock().store.lookup(perm, sections)
    }

    /// Image of `v` under a state and the section reached.
    pub fn act_state(&self, s: StateId, v: &Word) -> (Word, StateId) {
        let inner = self.lock();
        act_in(&inner.store, s, v)
    }

    /// States reachable through sections, in breadth-first order.
    pub fn reach(&self, start: &[StateId]) -> Vec<StateId> {
        self.lock().store.reach_all(start.iter().copied())
    }

    /// Image of `v`, computed through interned states when possible.
    pub fn act(&self, g: &GenWord, v: &Word) -> Word {
        match self.intern(g) {
            Ok(s) => self.act_state(s, v).0,
            Err(_) => self.def.act_word(g, v),
        }
    }

    pub fn is_trivial(&self, g: &GenWord) -> Triviality {
        self.is_trivial_within(g, self.depth_limit)
    }

    /// Decides triviality by interning; if the state budget runs out, falls
    /// back to a bounded search for a moved word.
    pub fn is_trivial_within(&self, g: &GenWord, limit: usize) -> Triviality {
        if g.is_identity() {
            return Triviality::Trivial;
        }
        match self.intern_within(g, limit) {
            Ok(s) => self.triviality_of(s),
            Err(_) => match self.search_moved_word(g, limit) {
                Some(witness) => Triviality::Nontrivial { witness },
                None => Triviality::Undecided,
            },
        }
    }

    pub fn triviality_of(&self, s: StateId) -> Triviality {
        if s.is_identity() {
            Triviality::Trivial
        } else {
            Triviality::Nontrivial {
                witness: self.moved_word(s),
            }
        }
    }

    /// Shortlex-least word moved by a non-identity state.
    pub fn moved_word(&self, s: StateId) -> Word {
        let inner = self.lock();
        let store = &inner.store;
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([(s, Word::empty())]);
        seen.insert(s);
        while let Some((t, path)) = queue.pop_front() {
            let perm = store.perm(t);
            if let Some(x) = (0..perm.degree() as u8).find(|&x| perm.apply(x) != x) {
                return path.child(x);
            }
            for (x, &next) in store.sections(t).iter().enumerate() {
                if !next.is_identity() && seen.insert(next) {
                    queue.push_back((next, path.child(x as u8)));
                }
            }
        }
        unreachable!("non-identity state of a minimal automaton moves some word")
    }

    fn search_moved_word(&self, g: &GenWord, limit: usize) -> Option<Word> {
        let alphabet = self.def.alphabet();
        let mut explored = 0usize;
        for n in 1.. {
            let size = alphabet.level_size(n)?;
            if explored + size > limit.max(self.degree()) {
                return None;
            }
            explored += size;
            if let Some(v) = alphabet.level(n).find(|v| self.def.act_word(g, v) != *v) {
                return Some(v);
            }
        }
        None
    }

    pub fn are_equal(&self, g: &GenWord, h: &GenWord) -> Equality {
        self.are_equal_within(g, h, self.depth_limit)
    }

    pub fn are_equal_within(&self, g: &GenWord, h: &GenWord, limit: usize) -> Equality {
        match self.is_trivial_within(&h.inverse().mul(g), limit) {
            Triviality::Trivial => Equality::Equal,
            // h⁻¹g moves v exactly when g(v) ≠ h(v).
            Triviality::Nontrivial { witness } => Equality::Different { witness },
            Triviality::Undecided => Equality::Undecided,
        }
    }

    /// Size of `X^n`, or an error when it exceeds the level limit.
    pub fn check_level(&self, n: usize) -> Result<usize> {
        match self.def.alphabet().level_size(n) {
            Some(size) if size <= self.level_limit => Ok(size),
            _ => Err(Error::LevelTooLarge {
                level: n,
                limit: self.level_limit,
            }),
        }
    }

    /// Action on `X^n`: entry `i` is the index of the image of the `i`-th
    /// word in lex order.
    pub fn perm_on_level(&self, g: &GenWord, n: usize) -> Result<Vec<usize>> {
        let size = self.check_level(n)?;
        match self.intern(g) {
            Ok(s) => self.state_perm_on_level(s, n),
            Err(e) if e.is_budget() => {
                let d = self.degree();
                let images: Vec<usize> = self
                    .def
                    .alphabet()
                    .level(n)
                    .map(|v| word_index(&self.def.act_word(g, &v), d))
                    .collect();
                debug_assert_eq!(images.len(), size);
                Ok(images)
            }
            Err(e) => Err(e),
        }
    }

    pub fn state_perm_on_level(&self, s: StateId, n: usize) -> Result<Vec<usize>> {
        self.check_level(n)?;
        let inner = self.lock();
        let mut memo = HashMap::new();
        Ok(level_perm(&inner.store, s, n, self.degree(), &mut memo).to_vec())
    }
}

pub(crate) fn act_in(store: &Store, mut s: StateId, v: &Word) -> (Word, StateId) {
    let mut out = Vec::with_capacity(v.len());
    for &x in v.letters() {
        out.push(store.perm(s).apply(x));
        s = store.section(s, x);
    }
    (Word::from_letters(out), s)
}

/// Position of a word in the lex order of its level.
pub fn word_index(v: &Word, d: usize) -> usize {
    v.letters().iter().fold(0, |acc, &x| acc * d + x as usize)
}

fn level_perm(
    store: &Store,
    s: StateId,
    n: usize,
    d: usize,
    memo: &mut HashMap<(StateId, usize), std::rc::Rc<Vec<usize>>>,
) -> std::rc::Rc<Vec<usize>> {
    if let Some(p) = memo.get(&(s, n)) {
        return p.clone();
    }
    let result = if n == 0 {
        std::rc::Rc::new(vec![0])
    } else if s.is_identity() {
        std::rc::Rc::new((0..d.pow(n as u32)).collect())
    } else {
        let block = d.pow(n as u32 - 1);
        let mut out = vec![0; block * d];
        for x in 0..d {
            let y = store.perm(s).apply(x as u8) as usize;
            let below = level_perm(store, store.section(s, x as u8), n - 1, d, memo);
            for (i, &j) in below.iter().enumerate() {
                out[x * block + i] = y * block + j;
            }
        }
        std::rc::Rc::new(out)
    };
    memo.insert((s, n), result.clone());
    result
}

/// Interns the generators and their inverses together with every word
/// reachable from them through sections.
fn build_letters(store: &mut Store, def: &GroupDef, limit: usize) -> Result<Vec<StateId>> {
    let mut index: HashMap<GenWord, usize> = HashMap::new();
    let mut words: Vec<GenWord> = Vec::new();
    for l in def.letters() {
        let w = GenWord::letter(l);
        if !index.contains_key(&w) {
            index.insert(w.clone(), words.len());
            words.push(w);
        }
    }
    let mut fresh = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let (perm, sections) = def.wreath_decompose(&words[i]);
        let mut targets = Vec::with_capacity(sections.len());
        for s in sections {
            let t = if s.is_identity() {
                Target::Known(StateId::IDENTITY)
            } else if let Some(&j) = index.get(&s) {
                Target::Fresh(j)
            } else {
                if words.len() >= limit {
                    return Err(Error::Budget(limit));
                }
                index.insert(s.clone(), words.len());
                words.push(s);
                Target::Fresh(words.len() - 1)
            };
            targets.push(t);
        }
        fresh.push(FreshNode {
            perm,
            sections: targets,
            repr: words[i].clone(),
        });
        i += 1;
    }
    let ids = store.absorb(&fresh);
    Ok(def
        .letters()
        .map(|l| ids[index[&GenWord::letter(l)]])
        .collect())
}
