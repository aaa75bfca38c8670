//! Interned machine states.
//!
//! Every element that has been looked at is represented by a state of one
//! shared automaton: a permutation of the letters plus one section state per
//! letter. The automaton is kept minimal, so two states are equal as tree
//! automorphisms exactly when they have the same id. New elements arrive as
//! small "fresh" automata whose transitions may point back into the store;
//! [`Store::absorb`] merges them in without breaking minimality.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::ssgroup::def::GenWord;

/// Handle of an interned machine state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub(crate) u32);

impl StateId {
    pub const IDENTITY: StateId = StateId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_identity(self) -> bool {
        self == StateId::IDENTITY
    }
}

/// Depth of the truncated-unfolding hash used to index states.
const HASH_DEPTH: usize = 16;

#[derive(Debug, Clone)]
struct Node {
    perm: Perm,
    sections: Box<[StateId]>,
    hash: [u64; HASH_DEPTH],
    repr: GenWord,
}

/// Transition target of a fresh node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Target {
    Known(StateId),
    Fresh(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct FreshNode {
    pub perm: Perm,
    pub sections: Vec<Target>,
    pub repr: GenWord,
}

fn hash_step(perm: &Perm, children: impl Iterator<Item = u64>) -> u64 {
    let mut h = DefaultHasher::new();
    perm.hash(&mut h);
    for c in children {
        c.hash(&mut h);
    }
    h.finish()
}

#[derive(Debug, Clone)]
pub(crate) struct Store {
    degree: usize,
    nodes: Vec<Node>,
    by_signature: HashMap<(Perm, Box<[StateId]>), StateId>,
    by_hash: HashMap<u64, Vec<StateId>>,
    products: HashMap<(StateId, StateId), StateId>,
    inverses: HashMap<StateId, StateId>,
}

impl Store {
    pub fn new(degree: usize) -> Self {
        let mut store = Store {
            degree,
            nodes: Vec::new(),
            by_signature: HashMap::new(),
            by_hash: HashMap::new(),
            products: HashMap::new(),
            inverses: HashMap::new(),
        };
        let perm = Perm::identity(degree);
        let sections: Box<[StateId]> = vec![StateId::IDENTITY; degree].into();
        let mut hash = [0u64; HASH_DEPTH];
        for k in 0..HASH_DEPTH {
            let prev = if k == 0 { None } else { Some(hash[k - 1]) };
            hash[k] = hash_step(&perm, (0..degree).filter_map(|_| prev));
        }
        store.insert(Node {
            perm,
            sections,
            hash,
            repr: GenWord::identity(),
        });
        store.inverses.insert(StateId::IDENTITY, StateId::IDENTITY);
        store
    }

    fn insert(&mut self, node: Node) -> StateId {
        let id = StateId(self.nodes.len() as u32);
        self.by_signature
            .insert((node.perm.clone(), node.sections.clone()), id);
        self.by_hash
            .entry(node.hash[HASH_DEPTH - 1])
            .or_default()
            .push(id);
        self.nodes.push(node);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn perm(&self, s: StateId) -> &Perm {
        &self.nodes[s.index()].perm
    }

    pub fn sections(&self, s: StateId) -> &[StateId] {
        &self.nodes[s.index()].sections
    }

    pub fn section(&self, s: StateId, x: u8) -> StateId {
        self.nodes[s.index()].sections[x as usize]
    }

    pub fn repr(&self, s: StateId) -> &GenWord {
        &self.nodes[s.index()].repr
    }

    /// Exact lookup of a state by its permutation and section states.
    pub fn lookup(&self, perm: &Perm, sections: &[StateId]) -> Option<StateId> {
        self.by_signature
            .get(&(perm.clone(), sections.to_vec().into_boxed_slice()))
            .copied()
    }

    fn offer_repr(&mut self, s: StateId, repr: &GenWord) {
        let node = &mut self.nodes[s.index()];
        if repr.len() < node.repr.len() {
            node.repr = repr.clone();
        }
    }

    /// Merge a fresh automaton into the store and return the state of every
    /// fresh node.
    pub fn absorb(&mut self, fresh: &[FreshNode]) -> Vec<StateId> {
        let n = fresh.len();
        let edges: Vec<Vec<Target>> = fresh.iter().map(|f| f.sections.clone()).collect();
        let mut resolved: Vec<Option<StateId>> = vec![None; n];
        for scc in tarjan(n, &edges) {
            let cyclic = scc.len() > 1 || edges[scc[0]].contains(&Target::Fresh(scc[0]));
            if !cyclic {
                let i = scc[0];
                let sections: Vec<StateId> = edges[i]
                    .iter()
                    .map(|t| resolve_target(t, &resolved))
                    .collect();
                let perm = &fresh[i].perm;
                let id = match self.lookup(perm, &sections) {
                    Some(id) => id,
                    None => {
                        let hash = self.hash_from_known(perm, &sections);
                        self.insert(Node {
                            perm: perm.clone(),
                            sections: sections.into(),
                            hash,
                            repr: fresh[i].repr.clone(),
                        })
                    }
                };
                resolved[i] = Some(id);
            } else {
                self.absorb_cycle(&scc, fresh, &mut resolved);
            }
        }
        let resolved: Vec<StateId> = resolved.into_iter().map(|s| s.expect("resolved")).collect();
        for (i, node) in fresh.iter().enumerate() {
            self.offer_repr(resolved[i], &node.repr);
        }
        resolved
    }

    /// Resolve one cyclic strongly connected component whose outgoing
    /// targets are already resolved.
    fn absorb_cycle(
        &mut self,
        scc: &[usize],
        fresh: &[FreshNode],
        resolved: &mut [Option<StateId>],
    ) {
        let quotient = Quotient::new(scc, fresh, resolved);
        let hashes = self.hash_quotient(&quotient);
        let candidates = self
            .by_hash
            .get(&hashes[0][HASH_DEPTH - 1])
            .cloned()
            .unwrap_or_default();
        let matched = candidates
            .into_iter()
            .find_map(|cand| self.bisimulate(&quotient, cand));
        let ids: Vec<StateId> = match matched {
            Some(ids) => ids,
            None => {
                let base = self.nodes.len() as u32;
                let ids: Vec<StateId> = (0..quotient.len())
                    .map(|c| StateId(base + c as u32))
                    .collect();
                for c in 0..quotient.len() {
                    let sections: Box<[StateId]> = quotient.targets[c]
                        .iter()
                        .map(|t| match *t {
                            Target::Known(s) => s,
                            Target::Fresh(j) => ids[j],
                        })
                        .collect();
                    self.insert(Node {
                        perm: quotient.perm[c].clone(),
                        sections,
                        hash: hashes[c],
                        repr: fresh[quotient.rep[c]].repr.clone(),
                    });
                }
                ids
            }
        };
        for (&i, &c) in scc.iter().zip(&quotient.class_of) {
            resolved[i] = Some(ids[c]);
        }
    }

    fn hash_from_known(&self, perm: &Perm, sections: &[StateId]) -> [u64; HASH_DEPTH] {
        let mut hash = [0u64; HASH_DEPTH];
        hash[0] = hash_step(perm, std::iter::empty());
        for (k, slot) in hash.iter_mut().enumerate().skip(1) {
            *slot = hash_step(
                perm,
                sections.iter().map(|s| self.nodes[s.index()].hash[k - 1]),
            );
        }
        hash
    }

    fn hash_quotient(&self, q: &Quotient) -> Vec<[u64; HASH_DEPTH]> {
        let mut hashes = vec![[0u64; HASH_DEPTH]; q.len()];
        for (h, perm) in hashes.iter_mut().zip(&q.perm) {
            h[0] = hash_step(perm, std::iter::empty());
        }
        for k in 1..HASH_DEPTH {
            for c in 0..q.len() {
                let children: Vec<u64> = q.targets[c]
                    .iter()
                    .map(|t| match *t {
                        Target::Known(s) => self.nodes[s.index()].hash[k - 1],
                        Target::Fresh(j) => hashes[j][k - 1],
                    })
                    .collect();
                hashes[c][k] = hash_step(&q.perm[c], children.into_iter());
            }
        }
        hashes
    }

    /// Match class 0 of the quotient against stored state `cand`; on success
    /// returns the stored state of every class.
    fn bisimulate(&self, q: &Quotient, cand: StateId) -> Option<Vec<StateId>> {
        let mut assigned: Vec<Option<StateId>> = vec![None; q.len()];
        let mut stack = vec![(0usize, cand)];
        while let Some((c, s)) = stack.pop() {
            if let Some(prev) = assigned[c] {
                if prev != s {
                    return None;
                }
                continue;
            }
            let node = &self.nodes[s.index()];
            if q.perm[c] != node.perm {
                return None;
            }
            assigned[c] = Some(s);
            for (x, t) in q.targets[c].iter().enumerate() {
                let want = node.sections[x];
                match *t {
                    Target::Known(k) if k != want => return None,
                    Target::Known(_) => {}
                    Target::Fresh(j) => stack.push((j, want)),
                }
            }
        }
        assigned.into_iter().collect()
    }

    /// Product state `s·t` (apply `t` first).
    pub fn mul(&mut self, s: StateId, t: StateId, limit: usize) -> Result<StateId> {
        if s.is_identity() {
            return Ok(t);
        }
        if t.is_identity() {
            return Ok(s);
        }
        if let Some(&p) = self.products.get(&(s, t)) {
            return Ok(p);
        }
        let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
        let mut pairs = vec![(s, t)];
        index.insert((s, t), 0);
        let mut fresh: Vec<FreshNode> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let pn = &self.nodes[p.index()];
            let qn = &self.nodes[q.index()];
            let perm = pn.perm.compose(&qn.perm);
            let mut sections = Vec::with_capacity(self.degree);
            for x in 0..self.degree {
                let p2 = pn.sections[qn.perm.apply(x as u8) as usize];
                let q2 = qn.sections[x];
                let target = if p2.is_identity() {
                    Target::Known(q2)
                } else if q2.is_identity() {
                    Target::Known(p2)
                } else if let Some(&known) = self.products.get(&(p2, q2)) {
                    Target::Known(known)
                } else if let Some(&j) = index.get(&(p2, q2)) {
                    Target::Fresh(j)
                } else {
                    if pairs.len() >= limit {
                        return Err(Error::Budget(limit));
                    }
                    index.insert((p2, q2), pairs.len());
                    pairs.push((p2, q2));
                    Target::Fresh(pairs.len() - 1)
                };
                sections.push(target);
            }
            let repr = pn.repr.mul(&qn.repr);
            fresh.push(FreshNode {
                perm,
                sections,
                repr,
            });
            i += 1;
        }
        let ids = self.absorb(&fresh);
        for (pair, id) in pairs.into_iter().zip(ids) {
            self.products.insert(pair, id);
        }
        Ok(self.products[&(s, t)])
    }

    pub fn inv(&mut self, s: StateId, limit: usize) -> Result<StateId> {
        if let Some(&i) = self.inverses.get(&s) {
            return Ok(i);
        }
        let mut index: HashMap<StateId, usize> = HashMap::new();
        let mut order = vec![s];
        index.insert(s, 0);
        let mut fresh = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let p = order[i];
            let node = &self.nodes[p.index()];
            let perm = node.perm.inverse();
            let mut sections = Vec::with_capacity(self.degree);
            for x in 0..self.degree as u8 {
                let sec = node.sections[perm.apply(x) as usize];
                let target = if let Some(&known) = self.inverses.get(&sec) {
                    Target::Known(known)
                } else if let Some(&j) = index.get(&sec) {
                    Target::Fresh(j)
                } else {
                    if order.len() >= limit {
                        return Err(Error::Budget(limit));
                    }
                    index.insert(sec, order.len());
                    order.push(sec);
                    Target::Fresh(order.len() - 1)
                };
                sections.push(target);
            }
            fresh.push(FreshNode {
                perm,
                sections,
                repr: node.repr.inverse(),
            });
            i += 1;
        }
        let ids = self.absorb(&fresh);
        for (p, id) in order.into_iter().zip(ids) {
            self.inverses.insert(p, id);
            self.inverses.insert(id, p);
        }
        Ok(self.inverses[&s])
    }

    /// States reachable through sections, in BFS order.
    pub fn reach_all(&self, start: impl IntoIterator<Item = StateId>) -> Vec<StateId> {
        let mut seen = std::collections::HashSet::new();
        let mut order = Vec::new();
        for s in start {
            if seen.insert(s) {
                order.push(s);
            }
        }
        let mut i = 0;
        while i < order.len() {
            for &t in self.sections(order[i]).iter() {
                if seen.insert(t) {
                    order.push(t);
                }
            }
            i += 1;
        }
        order
    }
}

fn resolve_target(t: &Target, resolved: &[Option<StateId>]) -> StateId {
    match *t {
        Target::Known(s) => s,
        Target::Fresh(j) => resolved[j].expect("targets of a sink-first SCC order are resolved"),
    }
}

/// Minimal quotient of one strongly connected component of fresh nodes.
/// Targets are either stored states or other classes of the quotient.
struct Quotient {
    class_of: Vec<usize>,
    rep: Vec<usize>,
    perm: Vec<Perm>,
    targets: Vec<Vec<Target>>,
}

impl Quotient {
    fn new(scc: &[usize], fresh: &[FreshNode], resolved: &[Option<StateId>]) -> Self {
        let local: HashMap<usize, usize> = scc.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let edges: Vec<Vec<Target>> = scc
            .iter()
            .map(|&i| {
                fresh[i]
                    .sections
                    .iter()
                    .map(|t| match *t {
                        Target::Fresh(j) => match local.get(&j) {
                            Some(&k) => Target::Fresh(k),
                            None => Target::Known(resolve_target(t, resolved)),
                        },
                        known => known,
                    })
                    .collect()
            })
            .collect();
        let mut class_of = vec![0usize; scc.len()];
        let mut count = renumber(&mut class_of, |k| fresh[scc[k]].perm.clone());
        loop {
            let snapshot = class_of.clone();
            let next = renumber(&mut class_of, |k| {
                let targets: Vec<Target> = edges[k]
                    .iter()
                    .map(|t| match *t {
                        Target::Fresh(j) => Target::Fresh(snapshot[j]),
                        known => known,
                    })
                    .collect();
                (snapshot[k], targets)
            });
            if next == count {
                break;
            }
            count = next;
        }
        let mut rep: Vec<Option<usize>> = vec![None; count];
        for (k, &c) in class_of.iter().enumerate() {
            let better = match rep[c] {
                None => true,
                Some(r) => fresh[scc[k]].repr.len() < fresh[scc[r]].repr.len(),
            };
            if better {
                rep[c] = Some(k);
            }
        }
        let rep: Vec<usize> = rep
            .into_iter()
            .map(|r| r.expect("nonempty class"))
            .collect();
        let perm = rep.iter().map(|&k| fresh[scc[k]].perm.clone()).collect();
        let targets = rep
            .iter()
            .map(|&k| {
                edges[k]
                    .iter()
                    .map(|t| match *t {
                        Target::Fresh(j) => Target::Fresh(class_of[j]),
                        known => known,
                    })
                    .collect()
            })
            .collect();
        Quotient {
            class_of,
            rep: rep.iter().map(|&k| scc[k]).collect(),
            perm,
            targets,
        }
    }

    fn len(&self) -> usize {
        self.perm.len()
    }
}

/// Assigns dense class numbers by first occurrence of each key; returns the
/// number of classes.
fn renumber<K: Eq + Hash>(class_of: &mut [usize], key: impl Fn(usize) -> K) -> usize {
    let mut ids: HashMap<K, usize> = HashMap::new();
    let keys: Vec<K> = (0..class_of.len()).map(&key).collect();
    for (i, k) in keys.into_iter().enumerate() {
        let next = ids.len();
        class_of[i] = *ids.entry(k).or_insert(next);
    }
    ids.len()
}

/// Tarjan's algorithm over fresh edges only; SCCs come out sinks first.
fn tarjan(n: usize, targets: &[Vec<Target>]) -> Vec<Vec<usize>> {
    struct Frame {
        node: usize,
        edge: usize,
    }
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call = vec![Frame {
            node: root,
            edge: 0,
        }];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(frame) = call.last_mut() {
            let v = frame.node;
            if frame.edge < targets[v].len() {
                let t = targets[v][frame.edge];
                frame.edge += 1;
                if let Target::Fresh(w) = t {
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push(Frame { node: w, edge: 0 });
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    low[parent.node] = low[parent.node].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut scc = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        scc.push(w);
                        if w == v {
                            break;
                        }
                    }
                    scc.sort_unstable();
                    out.push(scc);
                }
            }
        }
    }
    out
}
