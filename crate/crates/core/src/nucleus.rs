//! Nucleus of a contracting group and the predicates built on it.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::ssgroup::{GenWord, Group, StateId};
use crate::words::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NucleusBudget {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for NucleusBudget {
    fn default() -> Self {
        NucleusBudget {
            max_states: 5000,
            max_depth: 64,
        }
    }
}

impl NucleusBudget {
    fn exceeded(&self) -> Error {
        Error::NotContractingWithin {
            max_states: self.max_states,
            max_depth: self.max_depth,
        }
    }
}

/// The nucleus as a finite automaton over local indices. Index 0 is the
/// identity; the rest are ordered by their shortlex-least representative.
#[derive(Debug, Clone)]
pub struct Nucleus {
    states: Vec<StateId>,
    reprs: Vec<GenWord>,
    perms: Vec<Perm>,
    sections: Vec<Vec<usize>>,
    inverses: Vec<usize>,
    index: HashMap<StateId, usize>,
    depth: usize,
}

/// Serializable form of a nucleus: representatives plus the stabilization
/// depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NucleusRecord {
    pub states: Vec<String>,
    pub stabilization_depth: usize,
}

impl Nucleus {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn state(&self, i: usize) -> StateId {
        self.states[i]
    }

    pub fn repr(&self, i: usize) -> &GenWord {
        &self.reprs[i]
    }

    pub fn reprs(&self) -> &[GenWord] {
        &self.reprs
    }

    pub fn perm(&self, i: usize) -> &Perm {
        &self.perms[i]
    }

    pub fn section(&self, i: usize, x: u8) -> usize {
        self.sections[i][x as usize]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverses[i]
    }

    pub fn index_of(&self, s: StateId) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.index.contains_key(&s)
    }

    /// Indices of the non-identity states.
    pub fn non_identity(&self) -> std::ops::Range<usize> {
        1..self.len()
    }

    /// Depth after which every section of a product of two nucleus states
    /// lies in the nucleus.
    pub fn stabilization_depth(&self) -> usize {
        self.depth
    }

    /// Image of `v` under state `i`.
    pub fn act(&self, i: usize, v: &Word) -> Word {
        let mut s = i;
        let mut out = Vec::with_capacity(v.len());
        for &x in v.letters() {
            out.push(self.perms[s].apply(x));
            s = self.sections[s][x as usize];
        }
        Word::from_letters(out)
    }

    pub fn to_record(&self, group: &Group) -> NucleusRecord {
        NucleusRecord {
            states: self
                .reprs
                .iter()
                .map(|r| r.display(group.def()).to_string())
                .collect(),
            stabilization_depth: self.depth,
        }
    }

    /// Rebuilds a nucleus from its representatives, checking that they are
    /// distinct and closed under sections and inverses.
    pub fn from_record(group: &Group, record: &NucleusRecord) -> Result<Nucleus> {
        let mut states = Vec::with_capacity(record.states.len());
        let mut reprs = Vec::with_capacity(record.states.len());
        for s in &record.states {
            let w = group.def().parse_word(s)?;
            states.push(group.intern(&w)?);
            reprs.push(w);
        }
        if states.first() != Some(&StateId::IDENTITY) {
            return Err(Error::Definition(
                "nucleus record must start with the identity".into(),
            ));
        }
        let distinct: HashSet<StateId> = states.iter().copied().collect();
        if distinct.len() != states.len() {
            return Err(Error::Definition("nucleus record repeats a state".into()));
        }
        build(group, states, reprs, record.stabilization_depth)
    }
}

fn build(
    group: &Group,
    states: Vec<StateId>,
    reprs: Vec<GenWord>,
    depth: usize,
) -> Result<Nucleus> {
    let index: HashMap<StateId, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let missing =
        || Error::Definition("state set is not closed under sections and inverses".into());
    let mut perms = Vec::with_capacity(states.len());
    let mut sections = Vec::with_capacity(states.len());
    let mut inverses = Vec::with_capacity(states.len());
    for &s in &states {
        let m = group.state(s);
        perms.push(m.perm);
        sections.push(
            m.sections
                .iter()
                .map(|t| index.get(t).copied().ok_or_else(missing))
                .collect::<Result<Vec<usize>>>()?,
        );
        let inv = group.inv(s)?;
        inverses.push(index.get(&inv).copied().ok_or_else(missing)?);
    }
    Ok(Nucleus {
        states,
        reprs,
        perms,
        sections,
        inverses,
        index,
        depth,
    })
}

/// Smallest section-closed set of states containing the given words and the
/// identity.
pub fn section_closure(group: &Group, words: &[GenWord]) -> Result<Vec<StateId>> {
    let mut start = vec![StateId::IDENTITY];
    for w in words {
        start.push(group.intern(w)?);
    }
    Ok(group.reach(&start))
}

/// States of a section-closed set that lie on a cycle or below one.
fn core(group: &Group, closure: &[StateId]) -> Vec<StateId> {
    let inner = group.lock();
    let local: HashMap<StateId, usize> = closure.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let succ: Vec<Vec<usize>> = closure
        .iter()
        .map(|&s| inner.store.sections(s).iter().map(|t| local[t]).collect())
        .collect();
    drop(inner);
    // Repeatedly strip states with no predecessors: what survives lies
    // below a cycle.
    let n = closure.len();
    let mut indegree = vec![0usize; n];
    for out in &succ {
        for &j in out {
            indegree[j] += 1;
        }
    }
    let mut removed = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    while let Some(i) = queue.pop_front() {
        removed[i] = true;
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                queue.push_back(j);
            }
        }
    }
    (0..n)
        .filter(|&i| !removed[i])
        .map(|i| closure[i])
        .collect()
}

/// Longest chain of sections of `s` that stays outside `set`.
fn escape_depth(
    group: &Group,
    s: StateId,
    set: &HashSet<StateId>,
    memo: &mut HashMap<StateId, usize>,
) -> usize {
    if set.contains(&s) {
        return 0;
    }
    if let Some(&d) = memo.get(&s) {
        return d;
    }
    let sections = group.state(s).sections;
    let depth = 1 + sections
        .into_iter()
        .map(|t| escape_depth(group, t, set, memo))
        .max()
        .unwrap_or(0);
    memo.insert(s, depth);
    depth
}

pub fn compute_nucleus(group: &Group) -> Result<Nucleus> {
    compute_nucleus_within(group, NucleusBudget::default())
}

/// Fixed-point computation: start from the cores of the generators and
/// their inverses, then adjoin the core of every pairwise product until
/// nothing new appears.
pub fn compute_nucleus_within(group: &Group, budget: NucleusBudget) -> Result<Nucleus> {
    let budget_err = |e: Error| if e.is_budget() { budget.exceeded() } else { e };
    let letters: Vec<GenWord> = group.def().letters().map(GenWord::letter).collect();
    let closure = section_closure(group, &letters).map_err(budget_err)?;
    let mut members: Vec<StateId> = vec![StateId::IDENTITY];
    let mut set: HashSet<StateId> = members.iter().copied().collect();
    for s in core(group, &closure) {
        if set.insert(s) {
            members.push(s);
        }
    }
    let mut i = 0;
    while i < members.len() {
        for j in 0..=i {
            for (g, h) in [(members[i], members[j]), (members[j], members[i])] {
                let p = group.mul(g, h).map_err(budget_err)?;
                if set.contains(&p) {
                    continue;
                }
                let closure = group.reach(&[p]);
                for s in core(group, &closure) {
                    if set.insert(s) {
                        members.push(s);
                    }
                }
                if members.len() > budget.max_states {
                    return Err(budget.exceeded());
                }
            }
        }
        i += 1;
    }
    let mut depth = 0;
    let mut memo = HashMap::new();
    for &g in &members {
        for &h in &members {
            let p = group.mul(g, h).map_err(budget_err)?;
            depth = depth.max(escape_depth(group, p, &set, &mut memo));
            if depth > budget.max_depth {
                return Err(budget.exceeded());
            }
        }
    }
    let reprs = shortlex_representatives(group, &set);
    let mut order: Vec<(GenWord, StateId)> = members
        .iter()
        .map(|s| (reprs.get(s).cloned().unwrap_or_else(|| group.repr(*s)), *s))
        .collect();
    order.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    let (reprs, states): (Vec<GenWord>, Vec<StateId>) = order.into_iter().unzip();
    build(group, states, reprs, depth)
}

/// Cap on the number of group elements visited while looking for
/// representatives.
const REPR_SEARCH_LIMIT: usize = 200_000;

/// Shortlex-least word for each target state, found by breadth-first search
/// of the Cayley graph.
fn shortlex_representatives(
    group: &Group,
    targets: &HashSet<StateId>,
) -> HashMap<StateId, GenWord> {
    let letters: Vec<_> = group.def().letters().collect();
    let letter_states: Vec<StateId> = match letters
        .iter()
        .map(|&l| group.intern(&GenWord::letter(l)))
        .collect::<Result<_>>()
    {
        Ok(s) => s,
        Err(_) => return HashMap::new(),
    };
    let mut found = HashMap::new();
    let mut seen = HashSet::from([StateId::IDENTITY]);
    let mut queue = VecDeque::from([(StateId::IDENTITY, GenWord::identity())]);
    if targets.contains(&StateId::IDENTITY) {
        found.insert(StateId::IDENTITY, GenWord::identity());
    }
    while let Some((s, w)) = queue.pop_front() {
        if found.len() == targets.len() || seen.len() > REPR_SEARCH_LIMIT {
            break;
        }
        for (&l, &ls) in letters.iter().zip(&letter_states) {
            if w.letters().last() == Some(&l.inv()) {
                continue;
            }
            let Ok(t) = group.mul(s, ls) else { continue };
            if seen.insert(t) {
                let word = w.mul(&GenWord::letter(l));
                if targets.contains(&t) {
                    found.insert(t, word.clone());
                }
                queue.push_back((t, word));
            }
        }
    }
    found
}

/// No non-identity state returns to itself along letters it fixes.
pub fn is_regular(nucleus: &Nucleus) -> bool {
    let n = nucleus.len();
    let d = nucleus.perms.first().map_or(0, Perm::degree);
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut mark = vec![0u8; n];
    for root in nucleus.non_identity() {
        if mark[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = 1;
        while let Some((g, x)) = stack.pop() {
            if x == d {
                mark[g] = 2;
                continue;
            }
            stack.push((g, x + 1));
            if nucleus.perms[g].apply(x as u8) != x as u8 {
                continue;
            }
            let h = nucleus.sections[g][x];
            if h == 0 {
                continue;
            }
            match mark[h] {
                1 => return false,
                0 => {
                    mark[h] = 1;
                    stack.push((h, 0));
                }
                _ => {}
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Searches the ball of the given radius for witnesses that the action on
/// `X·G` is transitive: elements moving `0` to every letter with trivial
/// section, and elements fixing `0` whose sections there are the
/// generators.
pub fn is_self_replicating(group: &Group, radius: usize) -> Verdict {
    let d = group.degree();
    let gens: Vec<StateId> = match (0..group.def().num_generators())
        .map(|g| group.intern(&GenWord::generator(g)))
        .collect::<Result<_>>()
    {
        Ok(s) => s,
        Err(_) => return Verdict::Unknown,
    };
    let mut moved = vec![false; d];
    let mut lifted: HashSet<StateId> = HashSet::new();
    let need: HashSet<StateId> = gens.iter().copied().filter(|s| !s.is_identity()).collect();
    let done = |moved: &[bool], lifted: &HashSet<StateId>| {
        moved.iter().all(|&m| m) && need.iter().all(|s| lifted.contains(s))
    };
    let letters: Vec<StateId> = match group
        .def()
        .letters()
        .map(|l| group.intern(&GenWord::letter(l)))
        .collect::<Result<_>>()
    {
        Ok(s) => s,
        Err(_) => return Verdict::Unknown,
    };
    let mut seen = HashSet::from([StateId::IDENTITY]);
    let mut frontier = vec![StateId::IDENTITY];
    for length in 0..=radius {
        for &s in &frontier {
            let m = group.state(s);
            let y = m.perm.apply(0) as usize;
            let sec = m.sections[0];
            if sec.is_identity() {
                moved[y] = true;
            }
            if y == 0 {
                lifted.insert(sec);
            }
        }
        if done(&moved, &lifted) {
            return Verdict::Yes;
        }
        if length == radius {
            break;
        }
        let mut next = Vec::new();
        for &s in &frontier {
            for &l in &letters {
                let Ok(t) = group.mul(s, l) else {
                    return Verdict::Unknown;
                };
                if seen.insert(t) {
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    Verdict::Unknown
}

/// Whether the generators act transitively on `X^n` (and hence on every
/// lower level).
pub fn is_level_transitive(group: &Group, n: usize) -> Result<bool> {
    let perms: Vec<Vec<usize>> = (0..group.def().num_generators())
        .map(|g| group.perm_on_level(&GenWord::generator(g), n))
        .collect::<Result<_>>()?;
    let size = group
        .def()
        .alphabet()
        .level_size(n)
        .expect("checked by perm_on_level");
    let mut seen = vec![false; size];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for p in &perms {
            let u = p[v];
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    Ok(count == size)
}

/// Ordered triples of nucleus indices whose product is trivial, the
/// identity included so that shorter relations appear padded.
pub fn length3_relations(group: &Group, nucleus: &Nucleus) -> Result<Vec<[usize; 3]>> {
    let mut out = Vec::new();
    for i in 0..nucleus.len() {
        for j in 0..nucleus.len() {
            let p = group.mul(nucleus.state(i), nucleus.state(j))?;
            let q = group.inv(p)?;
            if let Some(k) = nucleus.index_of(q) {
                out.push([i, j, k]);
            }
        }
    }
    Ok(out)
}
