//! Finite-level pictures of the limit space: the nucleus automaton,
//! identifications of level-`n` words, and Schreier graphs.
//!
//! A word `x_n…x_1` of level `n` names a tile; two tiles are identified
//! when a non-identity nucleus state maps one onto the other. The shift
//! forgets the last letter.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::nucleus::Nucleus;
use crate::ssgroup::{word_index, GenWord, Group};
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MooreEdge {
    pub from: usize,
    pub input: u8,
    pub output: u8,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MooreDiagram {
    pub nodes: Vec<String>,
    pub edges: Vec<MooreEdge>,
}

pub fn moore_diagram(group: &Group, nucleus: &Nucleus) -> MooreDiagram {
    let def = group.def();
    let d = group.degree();
    let nodes = nucleus
        .reprs()
        .iter()
        .map(|w| w.display(def).to_string())
        .collect();
    let mut edges = Vec::with_capacity(nucleus.len() * d);
    for i in 0..nucleus.len() {
        for x in 0..d as u8 {
            edges.push(MooreEdge {
                from: i,
                input: x,
                output: nucleus.perm(i).apply(x),
                to: nucleus.section(i, x),
            });
        }
    }
    MooreDiagram { nodes, edges }
}

impl MooreDiagram {
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph moore {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{n}\"];");
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  n{} -> n{} [label=\"{}|{}\"];",
                e.from, e.to, e.input, e.output
            );
        }
        s.push_str("}\n");
        s
    }
}

/// Unordered pairs `{v, g(v)}` of distinct level-`n` words for non-identity
/// nucleus states `g`, as lex indices with the smaller first. The value
/// counts the states realizing the pair.
pub fn level_identifications(
    group: &Group,
    nucleus: &Nucleus,
    n: usize,
) -> Result<BTreeMap<(usize, usize), usize>> {
    group.check_level(n)?;
    let d = group.degree();
    let words: Vec<Word> = group.def().alphabet().level(n).collect();
    let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for g in nucleus.non_identity() {
        let mut seen = std::collections::BTreeSet::new();
        for (i, v) in words.iter().enumerate() {
            let j = word_index(&nucleus.act(g, v), d);
            if i != j && seen.insert((i.min(j), i.max(j))) {
                *pairs.entry((i.min(j), i.max(j))).or_default() += 1;
            }
        }
    }
    Ok(pairs)
}

/// The graph on level-`n` tiles with identification edges, its connected
/// components, and the shift between levels `n` and `n−1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelQuotient {
    pub level: usize,
    pub degree: usize,
    /// Tiles in lex order.
    pub tiles: Vec<Word>,
    /// Identification edges `(i, j, multiplicity)` with `i < j`.
    pub edges: Vec<(usize, usize, usize)>,
    /// Component of each tile, numbered by lex-least member.
    pub class_of: Vec<usize>,
    pub classes: usize,
    /// Image of each class under the shift, as a class of level `n−1`;
    /// empty at level 0.
    pub shift: Vec<usize>,
}

impl LevelQuotient {
    pub fn is_connected(&self) -> bool {
        self.classes == 1
    }

    fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.tiles.len()];
        for &(i, j, _) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// Whether the tiles form one cycle. Two tiles count as a cycle when
    /// they are joined by at least two identifications.
    pub fn is_cycle(&self) -> bool {
        let n = self.tiles.len();
        if !self.is_connected() || n < 2 {
            return false;
        }
        if n == 2 {
            return self.edges.len() == 1 && self.edges[0].2 >= 2;
        }
        self.edges.len() == n && self.degrees().iter().all(|&k| k == 2)
    }

    /// Whether the tiles form one path.
    pub fn is_path(&self) -> bool {
        let n = self.tiles.len();
        self.is_connected() && self.edges.len() + 1 == n && self.degrees().iter().all(|&k| k <= 2)
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("graph level{} {{\n", self.level);
        for (i, t) in self.tiles.iter().enumerate() {
            let _ = writeln!(s, "  t{i} [label=\"{t}\", class={}];", self.class_of[i]);
        }
        for &(i, j, m) in &self.edges {
            let _ = writeln!(s, "  t{i} -- t{j} [weight={m}];");
        }
        s.push_str("}\n");
        s
    }
}

fn components(size: usize, edges: &[(usize, usize, usize)]) -> (Vec<usize>, usize) {
    let mut parent: Vec<usize> = (0..size).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(i, j, _) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut label = vec![usize::MAX; size];
    let mut class_of = vec![0; size];
    let mut count = 0;
    for (v, class) in class_of.iter_mut().enumerate() {
        let r = find(&mut parent, v);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        *class = label[r];
    }
    (class_of, count)
}

pub fn quotient_graph(group: &Group, nucleus: &Nucleus, n: usize) -> Result<LevelQuotient> {
    let d = group.degree();
    let pairs = level_identifications(group, nucleus, n)?;
    let tiles: Vec<Word> = group.def().alphabet().level(n).collect();
    let edges: Vec<(usize, usize, usize)> =
        pairs.into_iter().map(|((i, j), m)| (i, j, m)).collect();
    let (class_of, classes) = components(tiles.len(), &edges);
    let shift = if n == 0 {
        Vec::new()
    } else {
        let below = level_identifications(group, nucleus, n - 1)?;
        let below: Vec<_> = below.into_iter().map(|((i, j), m)| (i, j, m)).collect();
        let (lower, _) = components(tiles.len() / d, &below);
        let mut shift = vec![usize::MAX; classes];
        for (i, &c) in class_of.iter().enumerate() {
            // Dropping the last letter divides the lex index by d.
            if shift[c] == usize::MAX {
                shift[c] = lower[i / d];
            }
        }
        shift
    };
    Ok(LevelQuotient {
        level: n,
        degree: d,
        tiles,
        edges,
        class_of,
        classes,
        shift,
    })
}

/// Whether identified tiles stay identified after the shift, checked
/// tile by tile rather than through the stored class map.
pub fn shift_is_well_defined(group: &Group, nucleus: &Nucleus, n: usize) -> Result<bool> {
    if n == 0 {
        return Ok(true);
    }
    let d = group.degree();
    let upper = quotient_graph(group, nucleus, n)?;
    let lower = quotient_graph(group, nucleus, n - 1)?;
    let mut image = vec![usize::MAX; upper.classes];
    for (i, &c) in upper.class_of.iter().enumerate() {
        let target = lower.class_of[i / d];
        if image[c] == usize::MAX {
            image[c] = target;
        } else if image[c] != target {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchreierGraph {
    pub level: usize,
    pub vertices: Vec<Word>,
    /// `(v, generator name, image)` for every vertex and generator.
    pub edges: Vec<(usize, String, usize)>,
    pub components: usize,
}

impl SchreierGraph {
    pub fn is_connected(&self) -> bool {
        self.components == 1
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("digraph schreier{} {{\n", self.level);
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"{v}\"];");
        }
        for (i, g, j) in &self.edges {
            let _ = writeln!(s, "  v{i} -> v{j} [label=\"{g}\"];");
        }
        s.push_str("}\n");
        s
    }
}

pub fn schreier_graph(group: &Group, n: usize) -> Result<SchreierGraph> {
    group.check_level(n)?;
    let def = group.def();
    let vertices: Vec<Word> = def.alphabet().level(n).collect();
    let mut edges = Vec::new();
    for (g, name) in def.names().iter().enumerate() {
        let perm = group.perm_on_level(&GenWord::generator(g), n)?;
        edges.extend(
            perm.into_iter()
                .enumerate()
                .map(|(v, u)| (v, name.clone(), u)),
        );
    }
    let plain: Vec<(usize, usize, usize)> = edges.iter().map(|(i, _, j)| (*i, *j, 1)).collect();
    let (_, components) = components(vertices.len(), &plain);
    Ok(SchreierGraph {
        level: n,
        vertices,
        edges,
        components,
    })
}
