//! Group definitions by wreath recursion and words over their generators.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::{parse_cycles, Perm};
use crate::words::{Alphabet, Word};

/// A generator or the inverse of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: u16,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter {
            generator: generator as u16,
            inverse,
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Dense index: `2·generator + inverse`.
    #[inline]
    pub fn index(self) -> usize {
        2 * self.generator as usize + self.inverse as usize
    }
}

/// A freely reduced word over generators and their inverses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenWord(Vec<Letter>);

impl GenWord {
    pub fn identity() -> Self {
        GenWord(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        GenWord(vec![l])
    }

    pub fn generator(index: usize) -> Self {
        GenWord(vec![Letter::new(index, false)])
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = GenWord::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inv()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &GenWord) -> GenWord {
        let mut out = self.clone();
        for &l in &other.0 {
            out.push(l);
        }
        out
    }

    pub fn inverse(&self) -> GenWord {
        GenWord(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn pow(&self, n: i64) -> GenWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = GenWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Exponent sum of every generator.
    pub fn abelianize(&self, generators: usize) -> Vec<i64> {
        let mut v = vec![0i64; generators];
        for l in &self.0 {
            v[l.generator as usize] += if l.inverse { -1 } else { 1 };
        }
        v
    }

    pub fn display<'a>(&'a self, def: &'a GroupDef) -> DisplayWord<'a> {
        DisplayWord { word: self, def }
    }
}

pub struct DisplayWord<'a> {
    word: &'a GenWord,
    def: &'a GroupDef,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return f.write_str("e");
        }
        for (i, l) in self.word.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&self.def.letter_name(*l))?;
        }
        Ok(())
    }
}

/// Permutation and sections of one generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub perm: Perm,
    pub sections: Vec<GenWord>,
}

/// A self-similar group given by its wreath recursion: every generator
/// carries a permutation of the letters and one section word per letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDef {
    alphabet: Alphabet,
    names: Vec<String>,
    rules: Vec<Rule>,
    /// Indexed by `Letter::index`; inverse rules are derived from the
    /// generator rules.
    letter_rules: Vec<Rule>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && name != "e"
}

impl GroupDef {
    pub fn new(alphabet: Alphabet, names: Vec<String>, rules: Vec<Rule>) -> Result<Self> {
        let d = alphabet.size();
        if names.len() != rules.len() {
            return Err(Error::Definition(
                "one rule per generator is required".into(),
            ));
        }
        if names.len() > u16::MAX as usize {
            return Err(Error::Definition("too many generators".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(Error::Definition(format!(
                    "invalid generator name {name:?}: use lowercase letters, digits and '_', not 'e'"
                )));
            }
            if names[..i].contains(name) {
                return Err(Error::Definition(format!(
                    "generator {name} declared twice"
                )));
            }
        }
        for (name, rule) in names.iter().zip(&rules) {
            if rule.perm.degree() != d {
                return Err(Error::Alphabet(format!(
                    "permutation of {name} acts on {} letters, alphabet has {d}",
                    rule.perm.degree()
                )));
            }
            if rule.sections.len() != d {
                return Err(Error::Alphabet(format!(
                    "{name} has {} sections, alphabet has {d}",
                    rule.sections.len()
                )));
            }
            for s in &rule.sections {
                if s.letters()
                    .iter()
                    .any(|l| l.generator as usize >= names.len())
                {
                    return Err(Error::Definition(format!(
                        "section of {name} uses an undeclared generator"
                    )));
                }
            }
        }
        let mut letter_rules = Vec::with_capacity(2 * rules.len());
        for rule in &rules {
            letter_rules.push(rule.clone());
            // g^{-1}: inverse permutation, section at x is (g|_{σ^{-1}(x)})^{-1}.
            let inv = rule.perm.inverse();
            let sections = (0..d as u8)
                .map(|x| rule.sections[inv.apply(x) as usize].inverse())
                .collect();
            letter_rules.push(Rule {
                perm: inv,
                sections,
            });
        }
        Ok(GroupDef {
            alphabet,
            names,
            rules,
            letter_rules,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.alphabet.size()
    }

    pub fn num_generators(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn generator(&self, name: &str) -> Option<GenWord> {
        self.generator_index(name).map(GenWord::generator)
    }

    /// All generators followed by their inverses, in `Letter::index` order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len()).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
    }

    pub fn letter_rule(&self, l: Letter) -> &Rule {
        &self.letter_rules[l.index()]
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let name = &self.names[l.generator as usize];
        if l.inverse {
            let mut chars = name.chars();
            let first = chars.next().expect("nonempty name").to_ascii_uppercase();
            std::iter::once(first).chain(chars).collect()
        } else {
            name.clone()
        }
    }

    /// Parses a word: whitespace-separated or concatenated generator names,
    /// uppercase initial for an inverse, `e` for the identity.
    pub fn parse_word(&self, s: &str) -> Result<GenWord> {
        let mut letters = Vec::new();
        for token in s.split(|c: char| c.is_whitespace() || c == '·' || c == '*') {
            if token.is_empty() || token == "e" || token == "1" {
                continue;
            }
            let chars: Vec<char> = token.chars().collect();
            let mut i = 0;
            while i < chars.len() {
                let inverse = chars[i].is_ascii_uppercase();
                let mut best: Option<(usize, usize)> = None;
                for (g, name) in self.names.iter().enumerate() {
                    let n: Vec<char> = name.chars().collect();
                    if i + n.len() > chars.len() {
                        continue;
                    }
                    let matches = chars[i].to_ascii_lowercase() == n[0]
                        && chars[i + 1..i + n.len()] == n[1..];
                    if matches && best.is_none_or(|(_, len)| n.len() > len) {
                        best = Some((g, n.len()));
                    }
                }
                match best {
                    Some((g, len)) => {
                        letters.push(Letter::new(g, inverse));
                        i += len;
                    }
                    None if chars[i] == 'e' => i += 1,
                    None => {
                        return Err(Error::Parse(format!(
                            "unknown generator at {:?} in word {s:?}",
                            chars[i..].iter().collect::<String>()
                        )))
                    }
                }
            }
        }
        Ok(GenWord::from_letters(letters))
    }

    /// Parses the text format:
    ///
    /// ```text
    /// alphabet: 2
    /// # comment
    /// a = (0 1)(e, a)
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut alphabet = None;
        let mut raw = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("alphabet:") {
                let d: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad alphabet size", lineno + 1)))?;
                alphabet = Some(Alphabet::new(d)?);
                continue;
            }
            let (name, body) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!(
                    "line {}: expected `name = (cycles)(sections)`",
                    lineno + 1
                ))
            })?;
            raw.push((lineno + 1, name.trim().to_string(), body.trim().to_string()));
        }
        let alphabet =
            alphabet.ok_or_else(|| Error::Parse("missing `alphabet: d` header".into()))?;
        let d = alphabet.size();
        let names: Vec<String> = raw.iter().map(|(_, n, _)| n.clone()).collect();
        // A temporary definition with identity rules lets section words be
        // parsed against the full list of names.
        let placeholder = Rule {
            perm: Perm::identity(d),
            sections: vec![GenWord::identity(); d],
        };
        let scratch = GroupDef::new(alphabet, names.clone(), vec![placeholder; names.len()])?;
        let mut rules = Vec::with_capacity(raw.len());
        for (lineno, name, body) in &raw {
            let open = body.rfind('(').ok_or_else(|| {
                Error::Parse(format!("line {lineno}: missing section tuple for {name}"))
            })?;
            let tuple = body[open..]
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| {
                    Error::Parse(format!("line {lineno}: malformed section tuple for {name}"))
                })?;
            let cycles = parse_cycles(&body[..open])
                .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
            let perm = Perm::from_cycles(d, &cycles)?;
            let parts: Vec<&str> = tuple.split(',').collect();
            if parts.len() != d {
                return Err(Error::Alphabet(format!(
                    "line {lineno}: {name} has {} sections, alphabet has {d}",
                    parts.len()
                )));
            }
            let sections = parts
                .iter()
                .map(|p| scratch.parse_word(p))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Definition(format!("line {lineno}: {e}")))?;
            rules.push(Rule { perm, sections });
        }
        GroupDef::new(alphabet, names, rules)
    }

    /// The text format accepted by [`GroupDef::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("alphabet: {}\n", self.degree());
        for (name, rule) in self.names.iter().zip(&self.rules) {
            let sections: Vec<String> = rule
                .sections
                .iter()
                .map(|s| s.display(self).to_string())
                .collect();
            out.push_str(&format!(
                "{name} = {}({})\n",
                rule.perm,
                sections.join(", ")
            ));
        }
        out
    }

    /// Permutation and sections of a word, folding the wreath-product
    /// multiplication rule over its letters.
    pub fn wreath_decompose(&self, g: &GenWord) -> (Perm, Vec<GenWord>) {
        let d = self.degree();
        let mut perm = Perm::identity(d);
        let mut sections = vec![GenWord::identity(); d];
        for &l in g.letters() {
            let rule = self.letter_rule(l);
            // (P·f)|_x = P|_{f(x)} · f|_x
            sections = (0..d as u8)
                .map(|x| sections[rule.perm.apply(x) as usize].mul(&rule.sections[x as usize]))
                .collect();
            perm = perm.compose(&rule.perm);
        }
        (perm, sections)
    }

    /// Image of the letter `x` and the section at `x`.
    pub fn step(&self, g: &GenWord, x: u8) -> (u8, GenWord) {
        let mut y = x;
        let mut section = GenWord::identity();
        // Letters act right to left; sections multiply on the left.
        for &l in g.letters().iter().rev() {
            let rule = self.letter_rule(l);
            section = rule.sections[y as usize].mul(&section);
            y = rule.perm.apply(y);
        }
        (y, section)
    }

    pub fn act_word(&self, g: &GenWord, v: &Word) -> Word {
        let mut current = g.clone();
        let mut out = Vec::with_capacity(v.len());
        for &x in v.letters() {
            let (y, next) = self.step(&current, x);
            out.push(y);
            current = next;
        }
        Word::from_letters(out)
    }

    pub fn section(&self, g: &GenWord, v: &Word) -> GenWord {
        let mut current = g.clone();
        for &x in v.letters() {
            current = self.step(&current, x).1;
        }
        current
    }

    /// Level-1 permutation of a word.
    pub fn perm_of(&self, g: &GenWord) -> Perm {
        let mut perm = Perm::identity(self.degree());
        for &l in g.letters() {
            perm = perm.compose(&self.letter_rule(l).perm);
        }
        perm
    }
}

#[derive(Serialize, Deserialize)]
struct GeneratorDto {
    name: String,
    perm: Perm,
    sections: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct GroupDefDto {
    alphabet: usize,
    generators: Vec<GeneratorDto>,
}

impl Serialize for GroupDef {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupDefDto {
            alphabet: self.degree(),
            generators: self
                .names
                .iter()
                .zip(&self.rules)
                .map(|(name, rule)| GeneratorDto {
                    name: name.clone(),
                    perm: rule.perm.clone(),
                    sections: rule
                        .sections
                        .iter()
                        .map(|w| w.display(self).to_string())
                        .collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupDef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let dto = GroupDefDto::deserialize(d)?;
        let alphabet = Alphabet::new(dto.alphabet).map_err(D::Error::custom)?;
        let names: Vec<String> = dto.generators.iter().map(|g| g.name.clone()).collect();
        let placeholder = Rule {
            perm: Perm::identity(dto.alphabet),
            sections: vec![GenWord::identity(); dto.alphabet],
        };
        let scratch = GroupDef::new(alphabet, names.clone(), vec![placeholder; names.len()])
            .map_err(D::Error::custom)?;
        let rules = dto
            .generators
            .iter()
            .map(|g| {
                Ok(Rule {
                    perm: g.perm.clone(),
                    sections: g
                        .sections
                        .iter()
                        .map(|s| scratch.parse_word(s))
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        GroupDef::new(alphabet, names, rules).map_err(D::Error::custom)
    }
}
