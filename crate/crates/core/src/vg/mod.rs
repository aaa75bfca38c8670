//! Elements of the Röver–Nekrashevych group as tables: a bijection between
//! two complete antichains with a group element attached to every row.
//!
//! A row `(v, g, u)` sends `v·w` to `u·g(w)`. Splitting a row replaces it by
//! the rows `(v·x, g|_x, u·g(x))`, which describe the same map.

mod thompson;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use thompson::{
    same_orbit_clopen, table_sign, thompson_from_antichains, thompson_from_pairs, thompson_group,
};

use crate::error::{Error, Result};
use crate::nucleus::Nucleus;
use crate::ssgroup::{Equality, GenWord, Group, GroupDef, StateId};
use crate::words::{common_refinement, prefix_compare, Antichain, PrefixOrder, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub domain: Word,
    pub entry: GenWord,
    pub range: Word,
}

impl Row {
    pub fn new(domain: Word, entry: GenWord, range: Word) -> Self {
        Row {
            domain,
            entry,
            range,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    degree: usize,
    rows: Vec<Row>,
}

impl Table {
    /// Validates that domains and ranges form complete antichains; rows are
    /// stored sorted by domain.
    pub fn new(degree: usize, mut rows: Vec<Row>) -> Result<Table> {
        if rows.is_empty() {
            return Err(Error::Table("a table needs at least one row".into()));
        }
        for r in &rows {
            if r.domain
                .letters()
                .iter()
                .chain(r.range.letters())
                .any(|&x| x as usize >= degree)
            {
                return Err(Error::Table(format!(
                    "row {} → {} uses a letter outside the alphabet",
                    r.domain, r.range
                )));
            }
        }
        let domain = Antichain::new(rows.iter().map(|r| r.domain.clone()))
            .map_err(|e| Error::Table(format!("domain: {e}")))?;
        let range = Antichain::new(rows.iter().map(|r| r.range.clone()))
            .map_err(|e| Error::Table(format!("range: {e}")))?;
        if domain.len() != rows.len() || range.len() != rows.len() {
            return Err(Error::Table("repeated word in a column".into()));
        }
        if !domain.is_complete(degree) {
            return Err(Error::Table(format!(
                "domain {domain} is not a complete antichain"
            )));
        }
        if !range.is_complete(degree) {
            return Err(Error::Table(format!(
                "range {range} is not a complete antichain"
            )));
        }
        rows.sort_by(|a, b| a.domain.cmp(&b.domain));
        Ok(Table { degree, rows })
    }

    pub fn identity(degree: usize) -> Table {
        Table {
            degree,
            rows: vec![Row::new(Word::empty(), GenWord::identity(), Word::empty())],
        }
    }

    /// The one-row table of a group element.
    pub fn from_element(degree: usize, g: GenWord) -> Table {
        Table {
            degree,
            rows: vec![Row::new(Word::empty(), g, Word::empty())],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn domain(&self) -> Antichain {
        Antichain::new(self.rows.iter().map(|r| r.domain.clone())).expect("valid table")
    }

    pub fn range(&self) -> Antichain {
        Antichain::new(self.rows.iter().map(|r| r.range.clone())).expect("valid table")
    }

    fn from_sorted(degree: usize, mut rows: Vec<Row>) -> Table {
        rows.sort_by(|a, b| a.domain.cmp(&b.domain));
        Table { degree, rows }
    }

    /// Replace row `i` by its `d` split rows.
    pub fn split_row(&self, def: &GroupDef, i: usize) -> Result<Table> {
        if i >= self.rows.len() {
            return Err(Error::Table(format!("row index {i} out of range")));
        }
        let mut rows = self.rows.clone();
        let row = rows.remove(i);
        rows.extend(split(def, &row));
        Ok(Table::from_sorted(self.degree, rows))
    }

    /// Split rows until the domain is `target`.
    pub fn refine_domain(&self, def: &GroupDef, target: &Antichain) -> Result<Table> {
        if !self.domain().is_refined_by(target) || !target.is_complete(self.degree) {
            return Err(Error::Table(format!(
                "{target} does not refine the domain {}",
                self.domain()
            )));
        }
        let mut out = Vec::with_capacity(target.len());
        for row in &self.rows {
            refine_row(
                def,
                row.clone(),
                &|r: &Row| !target.contains(&r.domain),
                &mut out,
            );
        }
        Ok(Table::from_sorted(self.degree, out))
    }

    /// Split rows until the range is `target`.
    pub fn refine_range(&self, def: &GroupDef, target: &Antichain) -> Result<Table> {
        if !self.range().is_refined_by(target) || !target.is_complete(self.degree) {
            return Err(Error::Table(format!(
                "{target} does not refine the range {}",
                self.range()
            )));
        }
        let mut out = Vec::with_capacity(target.len());
        for row in &self.rows {
            refine_row(
                def,
                row.clone(),
                &|r: &Row| !target.contains(&r.range),
                &mut out,
            );
        }
        Ok(Table::from_sorted(self.degree, out))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, def: &GroupDef, other: &Table) -> Result<Table> {
        self.check_degree(other)?;
        let common = common_refinement(&other.range(), &self.domain());
        let right = other.refine_range(def, &common)?;
        let left = self.refine_domain(def, &common)?;
        let by_domain: HashMap<&Word, &Row> = left.rows.iter().map(|r| (&r.domain, r)).collect();
        let rows = right
            .rows
            .iter()
            .map(|r| {
                let l = by_domain[&r.range];
                Row::new(r.domain.clone(), l.entry.mul(&r.entry), l.range.clone())
            })
            .collect();
        Ok(Table::from_sorted(self.degree, rows))
    }

    pub fn inverse(&self) -> Table {
        let rows = self
            .rows
            .iter()
            .map(|r| Row::new(r.range.clone(), r.entry.inverse(), r.domain.clone()))
            .collect();
        Table::from_sorted(self.degree, rows)
    }

    /// Image of a finite word that extends some domain word.
    pub fn apply(&self, group: &Group, w: &Word) -> Option<Word> {
        let row = self.row_covering(w)?;
        let rest = Word::from_letters(&w.letters()[row.domain.len()..]);
        Some(row.range.concat(&group.act(&row.entry, &rest)))
    }

    fn row_covering(&self, w: &Word) -> Option<&Row> {
        let idx = match self.rows.binary_search_by(|r| r.domain.cmp(w)) {
            Ok(i) => return Some(&self.rows[i]),
            Err(i) => i,
        };
        idx.checked_sub(1)
            .map(|i| &self.rows[i])
            .filter(|r| r.domain.is_prefix_of(w))
    }

    /// Image of the clopen set described by `set` as an antichain.
    pub fn image_of(&self, group: &Group, set: &Antichain) -> Antichain {
        let mut out = Vec::new();
        for u in set.words() {
            match self.row_covering(u) {
                Some(row) => {
                    let rest = Word::from_letters(&u.letters()[row.domain.len()..]);
                    out.push(row.range.concat(&group.act(&row.entry, &rest)));
                }
                None => {
                    for row in self.rows.iter().filter(|r| u.is_prefix_of(&r.domain)) {
                        out.push(row.range.clone());
                    }
                }
            }
        }
        Antichain::new(out).expect("a table maps disjoint cylinders to disjoint cylinders")
    }

    fn check_degree(&self, other: &Table) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::Table(format!(
                "alphabet sizes differ: {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn to_json(&self, def: &GroupDef) -> TableJson {
        TableJson {
            domain: self.rows.iter().map(|r| r.domain.clone()).collect(),
            entries: self
                .rows
                .iter()
                .map(|r| r.entry.display(def).to_string())
                .collect(),
            range: self.rows.iter().map(|r| r.range.clone()).collect(),
        }
    }

    pub fn from_json(def: &GroupDef, json: &TableJson) -> Result<Table> {
        if json.domain.len() != json.entries.len() || json.range.len() != json.entries.len() {
            return Err(Error::Table("columns have different lengths".into()));
        }
        let rows = json
            .domain
            .iter()
            .zip(&json.entries)
            .zip(&json.range)
            .map(|((v, g), u)| Ok(Row::new(v.clone(), def.parse_word(g)?, u.clone())))
            .collect::<Result<Vec<Row>>>()?;
        Table::new(def.degree(), rows)
    }

    pub fn display<'a>(&'a self, def: &'a GroupDef) -> DisplayTable<'a> {
        DisplayTable { table: self, def }
    }
}

/// Column form used for serialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub domain: Vec<Word>,
    pub entries: Vec<String>,
    pub range: Vec<Word>,
}

pub struct DisplayTable<'a> {
    table: &'a Table,
    def: &'a GroupDef,
}

impl fmt::Display for DisplayTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<[String; 3]> = self
            .table
            .rows
            .iter()
            .map(|r| {
                [
                    r.domain.to_string(),
                    r.entry.display(self.def).to_string(),
                    r.range.to_string(),
                ]
            })
            .collect();
        for k in 0..3 {
            let width = cells.iter().map(|c| c[k].len()).max().unwrap_or(0);
            let line: Vec<String> = cells.iter().map(|c| format!("{:>width$}", c[k])).collect();
            writeln!(f, "{}", line.join("  "))?;
        }
        Ok(())
    }
}

fn split(def: &GroupDef, row: &Row) -> Vec<Row> {
    let (perm, sections) = def.wreath_decompose(&row.entry);
    sections
        .into_iter()
        .enumerate()
        .map(|(x, s)| {
            Row::new(
                row.domain.child(x as u8),
                s,
                row.range.child(perm.apply(x as u8)),
            )
        })
        .collect()
}

fn refine_row(def: &GroupDef, row: Row, needs_split: &dyn Fn(&Row) -> bool, out: &mut Vec<Row>) {
    if needs_split(&row) {
        for child in split(def, &row) {
            refine_row(def, child, needs_split, out);
        }
    } else {
        out.push(row);
    }
}

/// Refine both tables to a common domain and compare row by row.
pub fn tables_equal(group: &Group, t1: &Table, t2: &Table) -> Equality {
    let def = group.def();
    let common = common_refinement(&t1.domain(), &t2.domain());
    let (Ok(a), Ok(b)) = (
        t1.refine_domain(def, &common),
        t2.refine_domain(def, &common),
    ) else {
        return Equality::Undecided;
    };
    let mut undecided = false;
    for (r1, r2) in a.rows.iter().zip(&b.rows) {
        if r1.range != r2.range {
            return match separating_word(group, &a, &b, &r1.domain) {
                Some(witness) => Equality::Different { witness },
                None => Equality::Undecided,
            };
        }
        match group.are_equal(&r1.entry, &r2.entry) {
            Equality::Equal => {}
            Equality::Different { witness } => {
                return Equality::Different {
                    witness: r1.domain.concat(&witness),
                }
            }
            Equality::Undecided => undecided = true,
        }
    }
    if undecided {
        Equality::Undecided
    } else {
        Equality::Equal
    }
}

/// A word below `v` whose images under the two tables are incomparable.
fn separating_word(group: &Group, a: &Table, b: &Table, v: &Word) -> Option<Word> {
    let depth = a
        .rows
        .iter()
        .chain(&b.rows)
        .map(|r| r.range.len())
        .max()
        .unwrap_or(0)
        + 2;
    let alphabet = group.def().alphabet();
    for n in 0..=depth {
        for tail in alphabet.level(n) {
            let w = v.concat(&tail);
            let (Some(x), Some(y)) = (a.apply(group, &w), b.apply(group, &w)) else {
                continue;
            };
            if prefix_compare(&x, &y) == PrefixOrder::Incomparable {
                return Some(w);
            }
        }
    }
    None
}

/// States that merged rows and normalized entries may use, each with its
/// preferred word: nucleus states and products of two of them.
#[derive(Debug, Clone)]
pub struct EntryCandidates {
    reprs: HashMap<StateId, GenWord>,
}

impl EntryCandidates {
    pub fn from_nucleus(group: &Group, nucleus: &Nucleus) -> EntryCandidates {
        let mut reprs: HashMap<StateId, GenWord> = HashMap::new();
        for i in 0..nucleus.len() {
            reprs.insert(nucleus.state(i), nucleus.repr(i).clone());
        }
        for i in 0..nucleus.len() {
            for j in 0..nucleus.len() {
                let Ok(p) = group.mul(nucleus.state(i), nucleus.state(j)) else {
                    continue;
                };
                let word = nucleus.repr(i).mul(nucleus.repr(j));
                let better = match reprs.get(&p) {
                    None => true,
                    Some(old) => !nucleus.contains(p) && shortlex_less(&word, old),
                };
                if better {
                    reprs.insert(p, word);
                }
            }
        }
        EntryCandidates { reprs }
    }

    pub fn len(&self) -> usize {
        self.reprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reprs.is_empty()
    }

    pub fn word(&self, s: StateId) -> Option<&GenWord> {
        self.reprs.get(&s)
    }
}

fn shortlex_less(a: &GenWord, b: &GenWord) -> bool {
    (a.len(), a) < (b.len(), b)
}

/// Merge complete sibling families back into single rows wherever the
/// merged entry is a candidate state, and rewrite entries to candidate
/// words. Entries that cannot be interned within budget are left alone.
pub fn canonical_form(group: &Group, candidates: &EntryCandidates, t: &Table) -> Table {
    let d = t.degree;
    let mut rows: Vec<(Row, Option<StateId>)> = t
        .rows
        .iter()
        .map(|r| {
            let s = group.intern(&r.entry).ok();
            let entry = s
                .and_then(|s| candidates.word(s).cloned())
                .unwrap_or_else(|| r.entry.clone());
            (Row::new(r.domain.clone(), entry, r.range.clone()), s)
        })
        .collect();
    loop {
        let mut merged = false;
        let mut i = 0;
        while i + d <= rows.len() {
            if let Some(row) = try_merge(group, candidates, &rows[i..i + d], d) {
                rows.splice(i..i + d, std::iter::once(row));
                merged = true;
            }
            i += 1;
        }
        if !merged {
            break;
        }
    }
    Table::from_sorted(d, rows.into_iter().map(|(r, _)| r).collect())
}

fn try_merge(
    group: &Group,
    candidates: &EntryCandidates,
    family: &[(Row, Option<StateId>)],
    d: usize,
) -> Option<(Row, Option<StateId>)> {
    let parent = family[0].0.domain.parent()?;
    let range_parent = family[0].0.range.parent()?;
    let mut images = Vec::with_capacity(d);
    let mut sections = Vec::with_capacity(d);
    for (x, (row, state)) in family.iter().enumerate() {
        if row.domain != parent.child(x as u8) || row.range.parent().as_ref() != Some(&range_parent)
        {
            return None;
        }
        images.push(row.range.last()?);
        sections.push((*state)?);
    }
    let perm = crate::perm::Perm::from_images(images).ok()?;
    let merged = group.lookup(&perm, &sections)?;
    let word = candidates.word(merged)?;
    Some((Row::new(parent, word.clone(), range_parent), Some(merged)))
}
