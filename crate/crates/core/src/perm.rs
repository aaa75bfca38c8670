//! Permutations of the letters `0..d`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A permutation stored as its image table: `x ↦ images[x]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Box<[u8]>);

impl Perm {
    pub fn identity(d: usize) -> Self {
        Perm((0..d as u8).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &y in &images {
            let y = y as usize;
            if y >= d || seen[y] {
                return Err(Error::Definition(format!(
                    "{images:?} is not a permutation"
                )));
            }
            seen[y] = true;
        }
        Ok(Perm(images.into_boxed_slice()))
    }

    /// Build from disjoint cycles over `0..d`.
    pub fn from_cycles(d: usize, cycles: &[Vec<u8>]) -> Result<Self> {
        let mut images: Vec<u8> = (0..d as u8).collect();
        let mut used = vec![false; d];
        for cycle in cycles {
            for &x in cycle {
                if x as usize >= d {
                    return Err(Error::Definition(format!(
                        "letter {x} outside alphabet of size {d}"
                    )));
                }
                if used[x as usize] {
                    return Err(Error::Definition(format!(
                        "letter {x} repeated in cycle notation"
                    )));
                }
                used[x as usize] = true;
            }
            for (i, &x) in cycle.iter().enumerate() {
                images[x as usize] = cycle[(i + 1) % cycle.len()];
            }
        }
        Perm::from_images(images)
    }

    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.0[x as usize]
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &y)| i == y as usize)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        Perm(inv.into_boxed_slice())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    /// `true` for odd permutations.
    pub fn is_odd(&self) -> bool {
        parity_of(self.0.iter().map(|&y| y as usize))
    }

    pub fn cycles(&self) -> Vec<Vec<u8>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u8);
                x = self.0[x] as usize;
            }
            out.push(cycle);
        }
        out
    }
}

/// Parity of a permutation of `0..n` given as its image sequence.
pub fn parity_of(images: impl IntoIterator<Item = usize>) -> bool {
    let images: Vec<usize> = images.into_iter().collect();
    let mut seen = vec![false; images.len()];
    let mut transpositions = 0usize;
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = images[x];
            len += 1;
        }
        transpositions += len - 1;
    }
    transpositions % 2 == 1
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{self}")
    }
}

/// Parses cycle notation such as `(0 1)(2 3)` or `()`; the degree must be
/// supplied separately, so this yields the raw cycles.
pub(crate) fn parse_cycles(s: &str) -> Result<Vec<Vec<u8>>> {
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("expected '(' in cycle notation {s:?}")))?;
        let end = body
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed cycle in {s:?}")))?;
        let cycle = body[..end]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u8>()
                    .map_err(|_| Error::Parse(format!("bad letter {t:?} in cycle notation")))
            })
            .collect::<Result<Vec<u8>>>()?;
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = body[end + 1..].trim_start();
    }
    Ok(cycles)
}

impl FromStr for Perm {
    type Err = Error;

    /// Parses an image list such as `[1, 0, 2]`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected image list, got {s:?}")))?;
        let images = inner
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::Parse(format!("bad image {t:?}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Perm::from_images(images)
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<u8>::deserialize(d)?;
        Perm::from_images(images).map_err(serde::de::Error::custom)
    }
}
