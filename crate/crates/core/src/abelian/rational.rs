//! Abelianization for post-critically finite hyperbolic rational maps,
//! computed from the combinatorics of the post-critical set.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{cokernel, AbelGroup, IntMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeParity {
    Even,
    Odd,
}

/// The map restricted to its post-critical set, with the points whose
/// full preimage has even size ("critical values mod 2").
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostCriticalData {
    pub degree_parity: DegreeParity,
    pub points: Vec<String>,
    pub map: BTreeMap<String, String>,
    #[serde(default)]
    pub preimages: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub cvmod2: Vec<String>,
}

fn portrait_err(msg: String) -> Error {
    Error::Portrait(msg)
}

impl PostCriticalData {
    /// Builds the data with preimages filled in from the map.
    pub fn new(
        degree_parity: DegreeParity,
        map: &[(&str, &str)],
        cvmod2: &[&str],
    ) -> Result<PostCriticalData> {
        let points: Vec<String> = map.iter().map(|(z, _)| z.to_string()).collect();
        let map: BTreeMap<String, String> = map
            .iter()
            .map(|(z, w)| (z.to_string(), w.to_string()))
            .collect();
        let mut preimages: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (y, z) in &map {
            preimages.entry(z.clone()).or_default().push(y.clone());
        }
        let data = PostCriticalData {
            degree_parity,
            points,
            map,
            preimages,
            cvmod2: cvmod2.iter().map(|s| s.to_string()).collect(),
        };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        let points: BTreeSet<&String> = self.points.iter().collect();
        if points.len() != self.points.len() {
            return Err(portrait_err("repeated point".into()));
        }
        if points.is_empty() {
            return Err(portrait_err("no points".into()));
        }
        for z in &self.points {
            match self.map.get(z) {
                None => return Err(portrait_err(format!("map is undefined at {z}"))),
                Some(w) if !points.contains(w) => {
                    return Err(portrait_err(format!(
                        "{z} maps to {w}, which is not a point"
                    )))
                }
                Some(_) => {}
            }
        }
        if let Some(z) = self.map.keys().find(|z| !points.contains(z)) {
            return Err(portrait_err(format!("map is defined at unknown point {z}")));
        }
        for (z, listed) in &self.preimages {
            if !points.contains(z) {
                return Err(portrait_err(format!(
                    "preimages listed for unknown point {z}"
                )));
            }
            let listed: BTreeSet<&String> = listed.iter().collect();
            let actual: BTreeSet<&String> = self
                .map
                .iter()
                .filter(|(_, w)| *w == z)
                .map(|(y, _)| y)
                .collect();
            if listed != actual {
                return Err(portrait_err(format!(
                    "preimages of {z} disagree with the map"
                )));
            }
        }
        let cv: BTreeSet<&String> = self.cvmod2.iter().collect();
        if cv.len() != self.cvmod2.len() {
            return Err(portrait_err("repeated critical value".into()));
        }
        if let Some(z) = cv.iter().find(|z| !points.contains(*z)) {
            return Err(portrait_err(format!("critical value {z} is not a point")));
        }
        if self.degree_parity == DegreeParity::Odd && cv.len() % 2 == 1 {
            return Err(portrait_err(
                "odd degree needs an even number of critical values mod 2".into(),
            ));
        }
        Ok(())
    }

    fn indexed(&self) -> (Vec<usize>, Vec<bool>) {
        let index: HashMap<&String, usize> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, z)| (z, i))
            .collect();
        let map = self.points.iter().map(|z| index[&self.map[z]]).collect();
        let cv: BTreeSet<&String> = self.cvmod2.iter().collect();
        let flags = self.points.iter().map(|z| cv.contains(z)).collect();
        (map, flags)
    }
}

/// Cokernel of `1 − σ` on `H_1` presented as `Z^P / (Σ a_z)`, with the
/// extra `Z/2` coordinate in odd degree.
pub fn rational_map_abelianization(data: &PostCriticalData) -> Result<AbelGroup> {
    data.validate()?;
    let (map, flags) = data.indexed();
    let n = map.len();
    let odd = data.degree_parity == DegreeParity::Odd;
    let cols = n + usize::from(odd);
    let mut rows = Vec::new();
    let mut total = vec![BigInt::zero(); cols];
    for c in total.iter_mut().take(n) {
        *c = BigInt::from(1);
    }
    rows.push(total);
    for z in 0..n {
        let mut row = vec![BigInt::zero(); cols];
        row[z] += 1;
        for (y, &fy) in map.iter().enumerate() {
            if fy == z {
                row[y] -= 1;
            }
        }
        if odd && flags[z] {
            row[n] = BigInt::from(-1);
        }
        rows.push(row);
    }
    if odd {
        let mut two = vec![BigInt::zero(); cols];
        two[n] = BigInt::from(2);
        rows.push(two);
    }
    Ok(cokernel(&IntMatrix::from_rows(cols, &rows)))
}

/// Cycle structure of the portrait: the cycles of the map on the points,
/// each listed backwards (`f(z_i) = z_{i−1}`), and for every point the
/// parity of the critical values mod 2 in its backward orbit through
/// non-cycle points.
struct Cycles {
    cycles: Vec<Vec<usize>>,
    on_cycle: Vec<bool>,
    tree_parity: Vec<bool>,
}

fn cycles(map: &[usize], flags: &[bool]) -> Cycles {
    let n = map.len();
    // A point is periodic iff it is reached after n steps from itself.
    let land = |mut z: usize| {
        for _ in 0..n {
            z = map[z];
        }
        z
    };
    let mut on_cycle = vec![false; n];
    let mut cycles = Vec::new();
    for z in 0..n {
        let p = land(z);
        if on_cycle[p] {
            continue;
        }
        let mut forward = vec![p];
        on_cycle[p] = true;
        let mut q = map[p];
        while q != p {
            on_cycle[q] = true;
            forward.push(q);
            q = map[q];
        }
        // Backwards from p: p, f⁻¹(p) on the cycle, ...
        let mut backward = vec![p];
        backward.extend(forward[1..].iter().rev());
        cycles.push(backward);
    }
    // Parity of critical values among y and its non-cycle preimages,
    // computed leaves first.
    let mut tree_parity = flags.to_vec();
    let mut pending: Vec<usize> = vec![0; n];
    for y in (0..n).filter(|&y| !on_cycle[y]) {
        pending[map[y]] += 1;
    }
    let mut ready: Vec<usize> = (0..n)
        .filter(|&y| !on_cycle[y] && pending[y] == 0)
        .collect();
    while let Some(y) = ready.pop() {
        let z = map[y];
        tree_parity[z] ^= tree_parity[y];
        pending[z] -= 1;
        if !on_cycle[z] && pending[z] == 0 {
            ready.push(z);
        }
    }
    Cycles {
        cycles,
        on_cycle,
        tree_parity,
    }
}

/// `(k, l, exception)`: the number of cycles, the gcd of their lengths,
/// and whether the odd-degree `Z/2` summand survives (every cycle attracts
/// an even number of critical values mod 2).
pub fn portrait_prediction(data: &PostCriticalData) -> Result<(usize, u64, bool)> {
    data.validate()?;
    let (map, flags) = data.indexed();
    let c = cycles(&map, &flags);
    let k = c.cycles.len();
    let l = c
        .cycles
        .iter()
        .fold(0u64, |g, cy| g.gcd(&(cy.len() as u64)));
    // Points attracted to a cycle are counted through the tree parities of
    // its members.
    let exception = data.degree_parity == DegreeParity::Odd
        && c.cycles
            .iter()
            .all(|cy| !cy.iter().fold(false, |acc, &z| acc ^ c.tree_parity[z]));
    Ok((k, l, exception))
}

/// Parity of the coefficient of the `Z/2` generator in the relation
/// `Σ a_z = 0` once every point is rewritten in the cycle basis. Only
/// meaningful when every cycle attracts an even number of critical values
/// mod 2 and all cycle lengths are even; otherwise it can be normalized
/// away.
pub fn summation_twist(data: &PostCriticalData) -> Result<bool> {
    data.validate()?;
    let (map, flags) = data.indexed();
    let c = cycles(&map, &flags);
    let mut twist = (0..map.len())
        .filter(|&y| !c.on_cycle[y])
        .fold(false, |acc, y| acc ^ c.tree_parity[y]);
    for cy in &c.cycles {
        let mut offset = false;
        for &z in cy {
            twist ^= offset;
            offset ^= c.tree_parity[z];
        }
    }
    Ok(twist)
}

/// The closed form corrected for the summation twist: when the odd-degree
/// exception holds, `l` is even and the twist is odd, the `Z/2` summand
/// and `Z/l` fuse into `Z/2l`.
pub fn refined_rational_formula(data: &PostCriticalData) -> Result<AbelGroup> {
    let (k, l, exception) = portrait_prediction(data)?;
    if exception && l % 2 == 0 && summation_twist(data)? {
        return Ok(AbelGroup::from_cyclic(k - 1, &[2 * l]));
    }
    Ok(predicted_rational_formula(k, l, exception))
}

/// `Z^{k−1} ⊕ Z/l`, with an extra `Z/2` when `odd_exception` holds.
pub fn predicted_rational_formula(k: usize, l: u64, odd_exception: bool) -> AbelGroup {
    let mut orders = vec![l];
    if odd_exception {
        orders.push(2);
    }
    AbelGroup::from_cyclic(k.saturating_sub(1), &orders)
}
