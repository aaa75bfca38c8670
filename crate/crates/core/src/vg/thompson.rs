//! Tables with trivial entries: the Higman–Thompson group.

use crate::error::{Error, Result};
use crate::perm::parity_of;
use crate::ssgroup::{GenWord, Group, GroupDef};
use crate::vg::{Row, Table};
use crate::words::{m_invariant, Alphabet, Antichain, Word};

/// A group with no generators, for working with tables over `d` letters
/// whose entries are all trivial.
pub fn thompson_group(d: usize) -> Result<Group> {
    Ok(Group::new(GroupDef::new(
        Alphabet::new(d)?,
        Vec::new(),
        Vec::new(),
    )?))
}

/// Parity of the permutation that sorts the range column when the domain
/// column is in lex order; `true` means odd.
pub fn table_sign(t: &Table) -> Result<bool> {
    let d = t.degree();
    if d.is_multiple_of(2) {
        return Err(Error::EvenAlphabet(d));
    }
    if t.rows().iter().any(|r| !r.entry.is_identity()) {
        return Err(Error::Table(
            "sign needs a table with trivial entries".into(),
        ));
    }
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&i, &j| t.rows()[i].range.cmp(&t.rows()[j].range));
    let mut rank = vec![0usize; t.len()];
    for (r, i) in order.into_iter().enumerate() {
        rank[i] = r;
    }
    Ok(parity_of(rank))
}

/// A table with trivial entries sending each `v` to its partner `α(v)`.
/// If the two sides are incomplete, their complements are split (shortest
/// and lex-first words first) until the counts agree and then paired in
/// lex order.
pub fn thompson_from_pairs(d: usize, pairs: &[(Word, Word)]) -> Result<Table> {
    let a1 = Antichain::new(pairs.iter().map(|p| p.0.clone()))?;
    let a2 = Antichain::new(pairs.iter().map(|p| p.1.clone()))?;
    if a1.len() != pairs.len() || a2.len() != pairs.len() {
        return Err(Error::Antichain("the pairing is not a bijection".into()));
    }
    let mut rows: Vec<Row> = pairs
        .iter()
        .map(|(v, u)| Row::new(v.clone(), GenWord::identity(), u.clone()))
        .collect();
    match (a1.is_complete(d), a2.is_complete(d)) {
        (true, true) => {}
        (false, false) => {
            let c1 = a1.complement(d);
            let c2 = a2.complement(d);
            let target = c1.len().max(c2.len());
            let c1 = c1.split_to_size(target, d)?;
            let c2 = c2.split_to_size(target, d)?;
            rows.extend(
                c1.words()
                    .iter()
                    .zip(c2.words())
                    .map(|(v, u)| Row::new(v.clone(), GenWord::identity(), u.clone())),
            );
        }
        _ => {
            return Err(Error::Antichain(format!(
                "cannot extend a map between {a1} and {a2}: exactly one of them is complete"
            )))
        }
    }
    Table::new(d, rows)
}

/// Pairs the words of two antichains of equal size in lex order.
pub fn thompson_from_antichains(d: usize, a1: &Antichain, a2: &Antichain) -> Result<Table> {
    if a1.len() != a2.len() {
        return Err(Error::Antichain(format!(
            "antichains have different sizes {} and {}",
            a1.len(),
            a2.len()
        )));
    }
    let pairs: Vec<(Word, Word)> = a1
        .words()
        .iter()
        .cloned()
        .zip(a2.words().iter().cloned())
        .collect();
    thompson_from_pairs(d, &pairs)
}

/// Whether two nonempty proper clopen sets lie in one orbit of the
/// Higman–Thompson group, with a witness table mapping the first onto the
/// second when they do.
pub fn same_orbit_clopen(d: usize, u1: &Antichain, u2: &Antichain) -> Result<Option<Table>> {
    for u in [u1, u2] {
        if u.is_empty() || u.is_complete(d) {
            return Err(Error::Antichain(format!(
                "{u} is not a nonempty proper clopen set"
            )));
        }
    }
    if m_invariant(u1, d) != m_invariant(u2, d) {
        return Ok(None);
    }
    let target = u1.len().max(u2.len());
    let a1 = u1.split_to_size(target, d)?;
    let a2 = u2.split_to_size(target, d)?;
    thompson_from_antichains(d, &a1, &a2).map(Some)
}
