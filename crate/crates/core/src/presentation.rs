//! Relators of the finite presentation of the Röver–Nekrashevych group of a
//! contracting group, each stored as a word and as a concrete table.
//!
//! The Higman–Thompson part of the presentation is not reproduced: words
//! in its generators appear only as the auxiliary tables `A[x,y]`, `B[x]`,
//! `W[i]` and the level-two permutations `h`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nucleus::{compute_nucleus, length3_relations, Nucleus};
use crate::ssgroup::{Equality, Group, GroupDef};
use crate::vg::{tables_equal, thompson_from_pairs, Row, Table, TableJson};
use crate::words::{Antichain, Word};

/// The letter whose cylinder carries the embedded copies `L(g)`.
pub const BASE_LETTER: u8 = 0;

/// `B[x]`: sends `x1·w` to `x·w`; `B[x1]` is the identity.
pub fn choose_b(d: usize, x: u8) -> Result<Table> {
    if x == BASE_LETTER {
        return Ok(Table::identity(d));
    }
    thompson_from_pairs(
        d,
        &[(Word::from_letters([BASE_LETTER]), Word::from_letters([x]))],
    )
}

/// `A[x,y]`: sends `y·w` to `x·y·w`.
pub fn choose_a(d: usize, x: u8, y: u8) -> Result<Table> {
    thompson_from_pairs(d, &[(Word::from_letters([y]), Word::from_letters([x, y]))])
}

/// `L_v(t)`: acts as `t` inside the cylinder of `v` and trivially outside.
pub fn l_embed(v: &Word, t: &Table) -> Table {
    if v.is_empty() {
        return t.clone();
    }
    let mut rows: Vec<Row> = t
        .rows()
        .iter()
        .map(|r| Row::new(v.concat(&r.domain), r.entry.clone(), v.concat(&r.range)))
        .collect();
    let outside = Antichain::new([v.clone()])
        .expect("single word")
        .complement(t.degree());
    rows.extend(
        outside
            .words()
            .iter()
            .map(|u| Row::new(u.clone(), Default::default(), u.clone())),
    );
    Table::new(t.degree(), rows).expect("embedding preserves completeness")
}

/// Generators of the subgroup of the Higman–Thompson group fixing the
/// cylinder of the base letter: adjacent transpositions of the level-one
/// and level-two words outside it, and one exchange of cylinders of
/// different depths below the next letter.
pub fn stabilizer_generators(d: usize) -> Result<Vec<Table>> {
    let mut out = Vec::new();
    for level in 1..=2usize {
        let words: Vec<Word> = crate::words::Alphabet::new(d)?
            .level(level)
            .filter(|w| w.letters()[0] != BASE_LETTER)
            .collect();
        for pair in words.windows(2) {
            let mut pairs: Vec<(Word, Word)> =
                words.iter().map(|w| (w.clone(), w.clone())).collect();
            for p in pairs.iter_mut() {
                if p.0 == pair[0] {
                    p.1 = pair[1].clone();
                } else if p.0 == pair[1] {
                    p.1 = pair[0].clone();
                }
            }
            out.push(thompson_from_pairs(d, &pairs)?);
        }
    }
    let top = Word::from_letters([BASE_LETTER + 1]);
    let last = d as u8 - 1;
    let mut domain: Vec<Word> = (0..last).map(|x| top.child(x)).collect();
    domain.extend((0..d as u8).map(|x| top.child(last).child(x)));
    let mut range: Vec<Word> = (0..d as u8).map(|x| top.child(0).child(x)).collect();
    range.extend((1..d as u8).map(|x| top.child(x)));
    let pairs: Vec<(Word, Word)> = domain.into_iter().zip(range).collect();
    out.push(thompson_from_pairs(d, &pairs)?);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    C,
    N,
    S,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::C => "C",
            Family::N => "N",
            Family::S => "S",
        };
        f.write_str(s)
    }
}

/// A generator appearing in a relator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Token {
    /// `L(g)` for the nucleus state with this index.
    L {
        state: usize,
    },
    A {
        x: u8,
        y: u8,
    },
    B {
        x: u8,
    },
    /// The relator's own level-two permutation.
    H,
    W {
        index: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub token: Token,
    pub inverse: bool,
}

impl Factor {
    fn new(token: Token) -> Self {
        Factor {
            token,
            inverse: false,
        }
    }
}

fn invert(word: &[Factor]) -> Vec<Factor> {
    word.iter()
        .rev()
        .map(|f| Factor {
            token: f.token,
            inverse: !f.inverse,
        })
        .collect()
}

fn commutator(p: &[Factor], q: &[Factor]) -> Vec<Factor> {
    [p, q, &invert(p), &invert(q)].concat()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relator {
    pub family: Family,
    pub symbol: String,
    pub factors: Vec<Factor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<TableJson>,
    /// The product of the factors.
    pub table: TableJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedTable {
    pub name: String,
    pub table: TableJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationBundle {
    pub group: GroupDef,
    pub base_letter: u8,
    /// Nucleus representatives; index 0 is the identity.
    pub nucleus: Vec<String>,
    /// `L(g)` for every non-identity nucleus state.
    pub generators: Vec<NamedTable>,
    pub a: Vec<NamedTable>,
    pub b: Vec<NamedTable>,
    pub w: Vec<NamedTable>,
    pub relators: Vec<Relator>,
    /// Placeholder for the imported presentation of the Higman–Thompson
    /// group.
    pub thompson_presentation: String,
}

impl PresentationBundle {
    pub fn family(&self, f: Family) -> impl Iterator<Item = &Relator> {
        self.relators.iter().filter(move |r| r.family == f)
    }
}

/// Concrete tables for every token.
pub struct Evaluator<'a> {
    group: &'a Group,
    l: Vec<Table>,
    a: Vec<Table>,
    b: Vec<Table>,
    w: Vec<Table>,
}

impl<'a> Evaluator<'a> {
    pub fn new(group: &'a Group, nucleus: &Nucleus) -> Result<Self> {
        let d = group.degree();
        let base = Word::from_letters([BASE_LETTER]);
        let l = (0..nucleus.len())
            .map(|i| l_embed(&base, &Table::from_element(d, nucleus.repr(i).clone())))
            .collect();
        let mut a = Vec::with_capacity(d * d);
        for x in 0..d as u8 {
            for y in 0..d as u8 {
                a.push(choose_a(d, x, y)?);
            }
        }
        let b = (0..d as u8)
            .map(|x| choose_b(d, x))
            .collect::<Result<_>>()?;
        let w = stabilizer_generators(d)?;
        Ok(Evaluator { group, l, a, b, w })
    }

    fn from_bundle(group: &'a Group, bundle: &PresentationBundle) -> Result<Self> {
        let def = group.def();
        let parse = |v: &[NamedTable]| -> Result<Vec<Table>> {
            v.iter().map(|t| Table::from_json(def, &t.table)).collect()
        };
        let mut l = vec![Table::identity(group.degree())];
        l.extend(parse(&bundle.generators)?);
        Ok(Evaluator {
            group,
            l,
            a: parse(&bundle.a)?,
            b: parse(&bundle.b)?,
            w: parse(&bundle.w)?,
        })
    }

    fn token<'s>(&'s self, t: Token, h: Option<&'s Table>) -> Result<&'s Table> {
        let d = self.group.degree();
        let missing = || Error::Presentation(format!("unknown token {t:?}"));
        match t {
            Token::L { state } => self.l.get(state).ok_or_else(missing),
            Token::A { x, y } => self.a.get(x as usize * d + y as usize).ok_or_else(missing),
            Token::B { x } => self.b.get(x as usize).ok_or_else(missing),
            Token::H => h.ok_or_else(missing),
            Token::W { index } => self.w.get(index).ok_or_else(missing),
        }
    }

    /// Product of the factors, the rightmost acting first.
    pub fn evaluate(&self, factors: &[Factor], h: Option<&Table>) -> Result<Table> {
        let def = self.group.def();
        let mut acc = Table::identity(self.group.degree());
        for f in factors {
            let t = self.token(f.token, h)?;
            let t = if f.inverse { t.inverse() } else { t.clone() };
            acc = acc.compose(def, &t)?;
        }
        Ok(acc)
    }
}

fn l_token(state: usize) -> Vec<Factor> {
    if state == 0 {
        return Vec::new();
    }
    vec![Factor::new(Token::L { state })]
}

/// Word for `L̄_v(g)` with `v` of length one or two.
fn l_bar(v: &[u8], state: usize) -> Vec<Factor> {
    let inner = l_token(state);
    if inner.is_empty() {
        return inner;
    }
    let last = *v.last().expect("nonempty");
    let mut conj = Vec::new();
    if v.len() == 2 {
        conj.push(Factor::new(Token::A { x: v[0], y: last }));
    }
    if last != BASE_LETTER {
        conj.push(Factor::new(Token::B { x: last }));
    }
    [conj.clone(), inner, invert(&conj)].concat()
}

fn word_string(v: &[u8]) -> String {
    v.iter().map(|x| x.to_string()).collect()
}

/// Builds the three relator families.
pub fn emit_presentation(group: &Group) -> Result<PresentationBundle> {
    let nucleus = compute_nucleus(group)?;
    emit_with_nucleus(group, &nucleus)
}

pub fn emit_with_nucleus(group: &Group, nucleus: &Nucleus) -> Result<PresentationBundle> {
    let def = group.def();
    let d = group.degree();
    let eval = Evaluator::new(group, nucleus)?;
    let name = |i: usize| nucleus.repr(i).display(def).to_string();
    let mut relators = Vec::new();
    let mut push =
        |family: Family, symbol: String, factors: Vec<Factor>, h: Option<Table>| -> Result<()> {
            let table = eval.evaluate(&factors, h.as_ref())?;
            relators.push(Relator {
                family,
                symbol,
                factors,
                h: h.map(|t| t.to_json(def)),
                table: table.to_json(def),
            });
            Ok(())
        };
    let states: Vec<usize> = nucleus.non_identity().collect();

    // (C) commutation
    for x in 0..d as u8 {
        for y in (0..d as u8).filter(|&y| y != x) {
            for &g1 in &states {
                for &g2 in &states {
                    push(
                        Family::C,
                        format!("[L̄_{x}({}), L̄_{y}({})]", name(g1), name(g2)),
                        commutator(&l_bar(&[x], g1), &l_bar(&[y], g2)),
                        None,
                    )?;
                }
            }
        }
    }
    let level2: Vec<Vec<u8>> = (0..d as u8)
        .flat_map(|x| (0..d as u8).map(move |y| vec![x, y]))
        .collect();
    for v1 in &level2 {
        for v2 in level2.iter().filter(|v2| *v2 != v1) {
            for &g1 in &states {
                for &g2 in &states {
                    push(
                        Family::C,
                        format!(
                            "[L̄_{}({}), L̄_{}({})]",
                            word_string(v1),
                            name(g1),
                            word_string(v2),
                            name(g2)
                        ),
                        commutator(&l_bar(v1, g1), &l_bar(v2, g2)),
                        None,
                    )?;
                }
            }
        }
    }
    for &g in &states {
        for index in 0..eval.w.len() {
            push(
                Family::C,
                format!("[L({}), W{index}]", name(g)),
                commutator(&l_token(g), &[Factor::new(Token::W { index })]),
                None,
            )?;
        }
    }

    // (N) nucleus relations
    for [i, j, k] in length3_relations(group, nucleus)? {
        push(
            Family::N,
            format!("L({}) L({}) L({})", name(i), name(j), name(k)),
            [l_token(i), l_token(j), l_token(k)].concat(),
            None,
        )?;
    }

    // (S) splitting
    for i in 0..nucleus.len() {
        let mut tail = Vec::new();
        let mut parts = Vec::new();
        for y in 0..d as u8 {
            let s = nucleus.section(i, y);
            tail.extend(l_bar(&[BASE_LETTER, y], s));
            parts.push(format!("L̄_{}({})", word_string(&[BASE_LETTER, y]), name(s)));
        }
        let h = eval
            .evaluate(&l_token(i), None)?
            .compose(def, &eval.evaluate(&tail, None)?.inverse())?;
        let h = level_two_permutation(group, &h)?;
        let factors = [invert(&l_token(i)), vec![Factor::new(Token::H)], tail].concat();
        push(
            Family::S,
            format!("L({})⁻¹ h {}", name(i), parts.join(" ")),
            factors,
            Some(h),
        )?;
    }

    let named = |prefix: &str, tables: &[Table], labels: Vec<String>| -> Vec<NamedTable> {
        tables
            .iter()
            .zip(labels)
            .map(|(t, l)| NamedTable {
                name: format!("{prefix}{l}"),
                table: t.to_json(def),
            })
            .collect()
    };
    let a_labels = (0..d)
        .flat_map(|x| (0..d).map(move |y| format!("[{x},{y}]")))
        .collect();
    let b_labels = (0..d).map(|x| format!("[{x}]")).collect();
    let w_labels = (0..eval.w.len()).map(|i| format!("{i}")).collect();
    Ok(PresentationBundle {
        group: def.clone(),
        base_letter: BASE_LETTER,
        nucleus: (0..nucleus.len()).map(name).collect(),
        generators: states
            .iter()
            .map(|&i| NamedTable {
                name: format!("L({})", name(i)),
                table: eval.l[i].to_json(def),
            })
            .collect(),
        a: named("A", &eval.a, a_labels),
        b: named("B", &eval.b, b_labels),
        w: named("W", &eval.w, w_labels),
        relators,
        thompson_presentation:
            "imported finite presentation of the Higman–Thompson group (not materialized)".into(),
    })
}

/// Rewrites a table as a permutation of the second level with trivial
/// entries, failing if it is not one.
fn level_two_permutation(group: &Group, t: &Table) -> Result<Table> {
    let d = group.degree();
    let level = Antichain::level(group.def().alphabet(), 2);
    let refined = t.refine_domain(group.def(), &level).map_err(|_| {
        Error::Presentation("solved permutation is deeper than the second level".into())
    })?;
    let mut rows = Vec::with_capacity(refined.len());
    for r in refined.rows() {
        if r.range.len() != 2 || !group.is_trivial(&r.entry).is_trivial() {
            return Err(Error::Presentation(format!(
                "solved element is not a level-two permutation at {}",
                r.domain
            )));
        }
        rows.push(Row::new(
            r.domain.clone(),
            Default::default(),
            r.range.clone(),
        ));
    }
    Table::new(d, rows)
}

/// Whether the relator's word evaluates to the identity and agrees with
/// its stored table.
pub fn verify_relator(group: &Group, bundle: &PresentationBundle, r: &Relator) -> Result<Equality> {
    let eval = Evaluator::from_bundle(group, bundle)?;
    verify_with(group, &eval, r)
}

fn verify_with(group: &Group, eval: &Evaluator, r: &Relator) -> Result<Equality> {
    let def = group.def();
    let h = r.h.as_ref().map(|h| Table::from_json(def, h)).transpose()?;
    let product = eval.evaluate(&r.factors, h.as_ref())?;
    let stored = Table::from_json(def, &r.table)?;
    let id = Table::identity(group.degree());
    match tables_equal(group, &product, &stored) {
        Equality::Equal => Ok(tables_equal(group, &product, &id)),
        other => Ok(other),
    }
}

/// Outcome of verifying every relator of a bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub total: usize,
    pub verified: usize,
    pub failed: Vec<String>,
    pub undecided: Vec<String>,
}

pub fn verify_bundle(group: &Group, bundle: &PresentationBundle) -> Result<VerifyReport> {
    let eval = Evaluator::from_bundle(group, bundle)?;
    let mut report = VerifyReport {
        total: bundle.relators.len(),
        verified: 0,
        failed: Vec::new(),
        undecided: Vec::new(),
    };
    for r in &bundle.relators {
        match verify_with(group, &eval, r)? {
            Equality::Equal => report.verified += 1,
            Equality::Different { .. } => report.failed.push(r.symbol.clone()),
            Equality::Undecided => report.undecided.push(r.symbol.clone()),
        }
    }
    Ok(report)
}

/// A copy of an (N) relator with its first factor replaced by another
/// nucleus state; it should fail verification.
pub fn corrupt_relator(bundle: &PresentationBundle, group: &Group) -> Option<Relator> {
    let r = bundle.family(Family::N).find(|r| {
        matches!(
            r.factors.first(),
            Some(Factor {
                token: Token::L { .. },
                ..
            })
        )
    })?;
    let mut bad = r.clone();
    let Token::L { state } = bad.factors[0].token else {
        unreachable!()
    };
    let replacement = if state + 1 < bundle.nucleus.len() {
        state + 1
    } else {
        1
    };
    if replacement == state {
        return None;
    }
    bad.factors[0].token = Token::L { state: replacement };
    bad.symbol = format!("{} (corrupted)", r.symbol);
    let eval = Evaluator::from_bundle(group, bundle).ok()?;
    bad.table = eval.evaluate(&bad.factors, None).ok()?.to_json(group.def());
    Some(bad)
}
