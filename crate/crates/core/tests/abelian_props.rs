mod common;

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vgroup::abelian::{
    cokernel, portrait_prediction, predicted_rational_formula, rational_map_abelianization,
    refined_rational_formula, smith_normal_form, summation_twist, IntMatrix,
};
use vgroup::{catalogue, GenWord, Group, Letter, Triviality};

fn matrix(rows: usize, cols: usize, entries: &[i64]) -> IntMatrix {
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|i| entries[i * cols..(i + 1) * cols].to_vec())
        .collect();
    IntMatrix::from_rows(cols, &data)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// gcd of all k×k minors.
fn determinantal_divisor(m: &IntMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rows in subsets(m.rows(), k) {
        for cols in subsets(m.cols(), k) {
            let sub: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| m[(i, j)].clone()).collect())
                .collect();
            g = g.gcd(&IntMatrix::from_rows(k, &sub).determinant());
        }
    }
    g
}

/// Order of `Z^n / rowspace` by enumerating the image of the rows in
/// `(Z/N)^n`, where `N·Z^n` lies in the row space.
fn brute_force_order(m: &IntMatrix, modulus: i64) -> Option<u64> {
    let n = m.cols();
    let space = (modulus as u64).checked_pow(n as u32)?;
    if space > 300_000 {
        return None;
    }
    let rows: Vec<Vec<i64>> = (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| x.mod_floor(&BigInt::from(modulus)).to_i64().unwrap())
                .collect()
        })
        .collect();
    let start = vec![0i64; n];
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for r in &rows {
            let w: Vec<i64> = v
                .iter()
                .zip(r)
                .map(|(a, b)| (a + b).rem_euclid(modulus))
                .collect();
            if seen.insert(w.clone()) {
                queue.push_back(w);
            }
        }
    }
    Some(space / seen.len() as u64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn smith_normal_form_is_correct(
        rows in 1usize..5,
        cols in 1usize..5,
        entries in prop::collection::vec(-3i64..=3, 16),
    ) {
        let m = matrix(rows, cols, &entries);
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert!(s.u.determinant().abs().is_one());
        prop_assert!(s.v.determinant().abs().is_one());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]) || w[0].is_zero() && w[1].is_zero());
        }
        for (i, x) in diag.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            prop_assert!(!x.is_negative());
            // Product of the first i+1 invariant factors is the (i+1)-th
            // determinantal divisor.
            let product: BigInt = diag[..=i].iter().product();
            prop_assert_eq!(product, determinantal_divisor(&m, i + 1));
        }
        let _ = diag;
    }

    #[test]
    fn cokernel_matches_enumeration(
        n in 1usize..4,
        extra in 0usize..2,
        entries in prop::collection::vec(-3i64..=3, 16),
    ) {
        let m = matrix(n + extra, n, &entries);
        let g = cokernel(&m);
        let full = determinantal_divisor(&m, n);
        if full.is_zero() {
            prop_assert!(g.free_rank > 0);
        } else {
            prop_assert_eq!(g.free_rank, 0);
            if let Some(order) = brute_force_order(&m, full.abs().to_i64().unwrap()) {
                prop_assert_eq!(g.order().unwrap(), BigInt::from(order));
            }
        }
    }

    #[test]
    fn rational_formula_on_random_portraits(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = common::random_portrait(&mut rng);
        let (k, l, exc) = portrait_prediction(&p).unwrap();
        let computed = rational_map_abelianization(&p).unwrap();
        prop_assert_eq!(&computed, &refined_rational_formula(&p).unwrap());
        // The uncorrected closed form agrees unless the twist fuses Z/2 into Z/l.
        let fused = exc && l % 2 == 0 && summation_twist(&p).unwrap();
        prop_assert_eq!(computed == predicted_rational_formula(k, l, exc), !fused);
    }
}

/// The abelianized sum of first-level sections of a trivial word lies in
/// the lattice of abelianized relations.
#[test]
fn transfer_is_well_defined() {
    let def = catalogue::grigorchuk();
    let group = Group::new(def.clone());
    let n = def.num_generators();
    let relators: Vec<GenWord> = ["a a", "b b", "c c", "d d", "b c d"]
        .iter()
        .map(|s| def.parse_word(s).unwrap())
        .collect();
    let lattice: Vec<Vec<i64>> = relators.iter().map(|r| r.abelianize(n)).collect();
    let base = cokernel(&IntMatrix::from_rows(n, &lattice));
    let letters: Vec<Letter> = def.letters().collect();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let mut r = GenWord::identity();
        for _ in 0..rng.gen_range(1..4) {
            let conj = GenWord::from_letters(
                (0..rng.gen_range(0..5)).map(|_| letters[rng.gen_range(0..letters.len())]),
            );
            let rel = &relators[rng.gen_range(0..relators.len())];
            r = r.mul(&conj.mul(rel).mul(&conj.inverse()));
        }
        assert_eq!(group.is_trivial(&r), Triviality::Trivial);
        let mut sigma = vec![0i64; n];
        for x in 0..2u8 {
            let s = def.section(&r, &vgroup::Word::from_letters([x]));
            for (c, v) in sigma.iter_mut().zip(s.abelianize(n)) {
                *c += v;
            }
        }
        let mut extended = lattice.clone();
        extended.push(sigma);
        assert_eq!(cokernel(&IntMatrix::from_rows(n, &extended)), base);
    }
}
