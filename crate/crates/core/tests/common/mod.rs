//! Shared generators and word-level oracles for the integration tests.
//! The oracles use only `GroupDef::act_word` and `GroupDef::section`,
//! never the interned state machinery.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use vgroup::nucleus::compute_nucleus;
use vgroup::{catalogue, Antichain, GenWord, Group, GroupDef, Nucleus, Row, Table, Word};

pub const TERNARY_ODOMETER: &str = "alphabet: 3\nt = (0 1 2)(e, e, t)\n";
pub const HANOI: &str = "alphabet: 3\na = (1 2)(a, e, e)\nb = (0 2)(e, b, e)\nc = (0 1)(e, e, c)\n";

/// Contracting groups with their display names.
pub fn contracting_catalogue() -> Vec<(String, GroupDef)> {
    let mut out = vec![
        ("adding".to_string(), catalogue::adding_machine()),
        ("basilica".to_string(), catalogue::basilica()),
        ("grigorchuk".to_string(), catalogue::grigorchuk()),
    ];
    for v in catalogue::kneading_sequences(2) {
        out.push((format!("kneading:{v}"), catalogue::kneading(&v).unwrap()));
    }
    out
}

pub fn ternary_groups() -> Vec<(String, GroupDef)> {
    vec![
        (
            "ternary odometer".into(),
            GroupDef::parse(TERNARY_ODOMETER).unwrap(),
        ),
        ("hanoi".into(), GroupDef::parse(HANOI).unwrap()),
    ]
}

pub fn words_up_to(d: usize, n: usize) -> Vec<Word> {
    let alphabet = vgroup::Alphabet::new(d).unwrap();
    (0..=n)
        .flat_map(|k| alphabet.level(k).collect::<Vec<_>>())
        .collect()
}

pub fn level(d: usize, n: usize) -> Vec<Word> {
    vgroup::Alphabet::new(d).unwrap().level(n).collect()
}

/// Images of every word of level `n`.
pub fn fingerprint(def: &GroupDef, g: &GenWord, n: usize) -> Vec<Word> {
    level(def.degree(), n)
        .iter()
        .map(|v| def.act_word(g, v))
        .collect()
}

pub fn acts_trivially_on(def: &GroupDef, g: &GenWord, n: usize) -> bool {
    level(def.degree(), n)
        .iter()
        .all(|v| def.act_word(g, v) == *v)
}

/// Nucleus computed at word level with equality decided by the action on
/// `X^n`: the recurrent part of the section closure of the generators,
/// enlarged by pairwise products until it stops growing. Returns one
/// representative per element, shortest first.
pub fn oracle_nucleus(def: &GroupDef, n: usize, max_elements: usize) -> Option<Vec<GenWord>> {
    let d = def.degree();
    let mut reps: Vec<GenWord> = Vec::new();
    let mut index: HashMap<Vec<Word>, usize> = HashMap::new();
    let mut sections: Vec<Vec<usize>> = Vec::new();

    // Inserts g and everything reachable by sections; returns g's index.
    #[allow(clippy::too_many_arguments)]
    fn close(
        def: &GroupDef,
        n: usize,
        d: usize,
        g: GenWord,
        reps: &mut Vec<GenWord>,
        index: &mut HashMap<Vec<Word>, usize>,
        sections: &mut Vec<Vec<usize>>,
        max: usize,
    ) -> Option<usize> {
        let fp = fingerprint(def, &g, n);
        if let Some(&i) = index.get(&fp) {
            return Some(i);
        }
        if reps.len() >= max {
            return None;
        }
        let i = reps.len();
        index.insert(fp, i);
        reps.push(g.clone());
        sections.push(Vec::new());
        let mut out = Vec::with_capacity(d);
        for x in 0..d as u8 {
            let s = def.section(&g, &Word::from_letters([x]));
            out.push(close(def, n, d, s, reps, index, sections, max)?);
        }
        sections[i] = out;
        Some(i)
    }

    let recurrent = |sections: &Vec<Vec<usize>>, set: &BTreeSet<usize>| -> BTreeSet<usize> {
        // States of the closure of `set` that lie on or below a cycle.
        let mut reach: BTreeSet<usize> = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(i) = stack.pop() {
            for &j in &sections[i] {
                if reach.insert(j) {
                    stack.push(j);
                }
            }
        }
        let mut alive = reach.clone();
        loop {
            let mut indeg: BTreeMap<usize, usize> = alive.iter().map(|&i| (i, 0)).collect();
            for &i in &alive {
                for &j in &sections[i] {
                    *indeg.get_mut(&j).unwrap() += 1;
                }
            }
            let dead: Vec<usize> = indeg
                .iter()
                .filter(|(_, &k)| k == 0)
                .map(|(&i, _)| i)
                .collect();
            if dead.is_empty() {
                return alive;
            }
            for i in dead {
                alive.remove(&i);
            }
        }
    };

    let mut start = BTreeSet::new();
    start.insert(close(
        def,
        n,
        d,
        GenWord::identity(),
        &mut reps,
        &mut index,
        &mut sections,
        max_elements,
    )?);
    for l in def.letters() {
        start.insert(close(
            def,
            n,
            d,
            GenWord::letter(l),
            &mut reps,
            &mut index,
            &mut sections,
            max_elements,
        )?);
    }
    let mut current = recurrent(&sections, &start);
    loop {
        let mut next = current.clone();
        let members: Vec<usize> = current.iter().copied().collect();
        for &i in &members {
            for &j in &members {
                let p = reps[i].mul(&reps[j]);
                next.insert(close(
                    def,
                    n,
                    d,
                    p,
                    &mut reps,
                    &mut index,
                    &mut sections,
                    max_elements,
                )?);
            }
        }
        let next = recurrent(&sections, &next);
        if next == current {
            let mut out: Vec<GenWord> = current.into_iter().map(|i| reps[i].clone()).collect();
            out.sort_by_key(|w| (w.len(), w.clone()));
            return Some(out);
        }
        current = next;
    }
}

/// A complete antichain obtained from the root by `splits` splits of
/// random leaves shorter than `max_depth`.
pub fn random_antichain<R: Rng>(
    rng: &mut R,
    d: usize,
    max_depth: usize,
    splits: usize,
) -> Antichain {
    let mut leaves = vec![Word::empty()];
    for _ in 0..splits {
        let open: Vec<usize> = (0..leaves.len())
            .filter(|&i| leaves[i].len() < max_depth)
            .collect();
        let Some(&i) = open.choose(rng) else { break };
        let w = leaves.swap_remove(i);
        leaves.extend((0..d as u8).map(|x| w.child(x)));
    }
    Antichain::new(leaves).unwrap()
}

/// A random table whose domain and range have depth at most `max_depth`
/// and whose entries are drawn from `entries`.
pub fn random_table<R: Rng>(rng: &mut R, d: usize, max_depth: usize, entries: &[GenWord]) -> Table {
    let splits = rng.gen_range(0..=3);
    let dom = random_antichain(rng, d, max_depth, splits);
    let mut ran: Vec<Word> = random_antichain(rng, d, max_depth, splits).words().to_vec();
    // Both have the same size only when no split was blocked.
    while ran.len() != dom.len() {
        ran = random_antichain(rng, d, max_depth, splits).words().to_vec();
    }
    ran.shuffle(rng);
    let rows = dom
        .words()
        .iter()
        .zip(ran)
        .map(|(v, u)| Row::new(v.clone(), entries.choose(rng).unwrap().clone(), u))
        .collect();
    Table::new(d, rows).unwrap()
}

/// A random nonempty proper clopen set of depth at most `max_depth`, as
/// a subset of the leaves of a random complete antichain.
pub fn random_clopen<R: Rng>(rng: &mut R, d: usize, max_depth: usize) -> Antichain {
    loop {
        let splits = rng.gen_range(1..=4);
        let a = random_antichain(rng, d, max_depth, splits);
        let chosen: Vec<Word> = a
            .words()
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .cloned()
            .collect();
        if !chosen.is_empty() && chosen.len() < a.len() {
            return Antichain::new(chosen).unwrap();
        }
    }
}

pub struct Setup {
    pub name: String,
    pub group: Group,
    pub nucleus: Nucleus,
}

pub fn setups(defs: Vec<(String, GroupDef)>) -> Vec<Setup> {
    defs.into_iter()
        .map(|(name, def)| {
            let group = Group::new(def);
            let nucleus = compute_nucleus(&group).unwrap();
            Setup {
                name,
                group,
                nucleus,
            }
        })
        .collect()
}

/// A random post-critical portrait: `k` cycles of length at most 5,
/// preperiodic trees hanging off them, and a random set of critical values
/// mod 2 of valid size.
pub fn random_portrait<R: Rng>(rng: &mut R) -> vgroup::abelian::PostCriticalData {
    use vgroup::abelian::DegreeParity;
    let k = rng.gen_range(1..=4);
    let mut names: Vec<String> = Vec::new();
    let mut map: Vec<(String, String)> = Vec::new();
    for c in 0..k {
        let len = rng.gen_range(1..=5);
        let cycle: Vec<String> = (0..len).map(|i| format!("c{c}_{i}")).collect();
        for i in 0..len {
            map.push((cycle[i].clone(), cycle[(i + 1) % len].clone()));
        }
        names.extend(cycle);
    }
    for t in 0..rng.gen_range(0..=4) {
        let target = names[rng.gen_range(0..names.len())].clone();
        let name = format!("p{t}");
        map.push((name.clone(), target));
        names.push(name);
    }
    let parity = if rng.gen_bool(0.5) {
        DegreeParity::Even
    } else {
        DegreeParity::Odd
    };
    let mut cv: Vec<String> = names
        .iter()
        .filter(|_| rng.gen_bool(0.4))
        .cloned()
        .collect();
    if parity == DegreeParity::Odd && cv.len() % 2 == 1 {
        cv.pop();
    }
    let map_refs: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let cv_refs: Vec<&str> = cv.iter().map(String::as_str).collect();
    vgroup::abelian::PostCriticalData::new(parity, &map_refs, &cv_refs).unwrap()
}
