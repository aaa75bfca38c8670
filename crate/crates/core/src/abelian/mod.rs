//! Abelianization of the Röver–Nekrashevych group as the cokernel of
//! `1 − σ`, where `σ` sends an element to the sum of its first-level
//! sections.

mod rational;
mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use rational::{
    portrait_prediction, predicted_rational_formula, rational_map_abelianization,
    refined_rational_formula, summation_twist, DegreeParity, PostCriticalData,
};
pub use snf::{smith_normal_form, IntMatrix, Snf};

use crate::error::{Error, Result};
use crate::nucleus::{compute_nucleus, length3_relations, Nucleus};
use crate::ssgroup::Group;

/// A finitely generated abelian group `Z^r ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with
/// `d_1 | d_2 | … | d_k` and every `d_i ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelGroup {
    pub fn trivial() -> Self {
        AbelGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        AbelGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// `Z^rank ⊕ ⨁ Z/orders[i]`, normalized to invariant factors.
    pub fn from_cyclic(rank: usize, orders: &[u64]) -> Self {
        let mut m = IntMatrix::zeros(orders.len(), orders.len());
        for (i, &o) in orders.iter().enumerate() {
            m[(i, i)] = BigInt::from(o);
        }
        let mut g = cokernel(&m);
        g.free_rank += rank;
        g
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Number of elements, or `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for AbelGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("trivial group");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        f.write_str(&parts.join(" ⊕ "))
    }
}

/// The quotient of `Z^cols` by the row space of `m`.
pub fn cokernel(m: &IntMatrix) -> AbelGroup {
    let diag = smith_normal_form(m).diagonal();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    AbelGroup {
        free_rank: m.cols() - rank,
        torsion: diag
            .into_iter()
            .filter(|x| !x.is_zero() && !x.abs().is_one())
            .map(|x| x.abs())
            .collect(),
    }
}

/// Matrix of `σ` on the free abelian group over the generators: row `i`
/// is the sum of the abelianized sections of generator `i`.
pub fn sigma_matrix(group: &Group) -> IntMatrix {
    let def = group.def();
    let n = def.num_generators();
    let mut m = IntMatrix::zeros(n, n);
    for (i, rule) in def.rules().iter().enumerate() {
        for s in &rule.sections {
            for (j, c) in s.abelianize(n).into_iter().enumerate() {
                m[(i, j)] += c;
            }
        }
    }
    m
}

/// Parity of each generator's permutation of the letters; `true` is odd.
pub fn sign_vector(group: &Group) -> Result<Vec<bool>> {
    let d = group.degree();
    if d.is_multiple_of(2) {
        return Err(Error::EvenAlphabet(d));
    }
    Ok(group
        .def()
        .rules()
        .iter()
        .map(|r| r.perm.is_odd())
        .collect())
}

/// Rows of `1 − σ` (or `1 − σ₁` with the extra `Z/2` coordinate in the
/// last column) stacked over the relation rows.
fn transfer_presentation(
    sigma: &IntMatrix,
    signs: Option<&[bool]>,
    relations: &[Vec<i64>],
) -> IntMatrix {
    let n = sigma.rows();
    let cols = n + usize::from(signs.is_some());
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..n {
        let mut row: Vec<BigInt> = (0..cols)
            .map(|j| {
                if j < n {
                    -&sigma[(i, j)]
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        row[i] += 1;
        if let Some(signs) = signs {
            if signs[i] {
                row[n] = BigInt::from(-1);
            }
        }
        rows.push(row);
    }
    if signs.is_some() {
        let mut two = vec![BigInt::zero(); cols];
        two[n] = BigInt::from(2);
        rows.push(two);
    }
    for r in relations {
        let mut row: Vec<BigInt> = r.iter().map(|&c| BigInt::from(c)).collect();
        row.resize(cols, BigInt::zero());
        rows.push(row);
    }
    IntMatrix::from_rows(cols, &rows)
}

/// Abelianization over the generator basis, given the abelianized
/// relations of the group (one row per relation, one column per
/// generator).
pub fn vg_abelianization_with(group: &Group, relations: &[Vec<i64>]) -> Result<AbelGroup> {
    let n = group.def().num_generators();
    if let Some(r) = relations.iter().find(|r| r.len() != n) {
        return Err(Error::Definition(format!(
            "relation row has {} entries for {n} generators",
            r.len()
        )));
    }
    let sigma = sigma_matrix(group);
    let signs = (group.degree() % 2 == 1)
        .then(|| sign_vector(group))
        .transpose()?;
    Ok(cokernel(&transfer_presentation(
        &sigma,
        signs.as_deref(),
        relations,
    )))
}

/// Abelianization over the non-identity nucleus states, presented by the
/// length-three relations among them.
pub fn vg_abelianization_nucleus(group: &Group, nucleus: &Nucleus) -> Result<AbelGroup> {
    let n = nucleus.len() - 1;
    let coord = |i: usize| i.checked_sub(1);
    let mut sigma = IntMatrix::zeros(n, n);
    for i in nucleus.non_identity() {
        for x in 0..group.degree() as u8 {
            if let Some(j) = coord(nucleus.section(i, x)) {
                sigma[(i - 1, j)] += 1;
            }
        }
    }
    let relations: Vec<Vec<i64>> = length3_relations(group, nucleus)?
        .into_iter()
        .filter_map(|t| {
            let mut row = vec![0i64; n];
            for i in t {
                if let Some(j) = coord(i) {
                    row[j] += 1;
                }
            }
            row.iter().any(|&c| c != 0).then_some(row)
        })
        .collect();
    let signs: Option<Vec<bool>> = (group.degree() % 2 == 1).then(|| {
        nucleus
            .non_identity()
            .map(|i| nucleus.perm(i).is_odd())
            .collect()
    });
    Ok(cokernel(&transfer_presentation(
        &sigma,
        signs.as_deref(),
        &relations,
    )))
}

/// Default abelianization: computes the nucleus and uses its length-three
/// relations.
pub fn vg_abelianization(group: &Group) -> Result<AbelGroup> {
    let nucleus = compute_nucleus(group)?;
    vg_abelianization_nucleus(group, &nucleus)
}

/// Small integer entries of a matrix, for display.
pub fn to_i64_rows(m: &IntMatrix) -> Option<Vec<Vec<i64>>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(ToPrimitive::to_i64).collect())
        .collect()
}
