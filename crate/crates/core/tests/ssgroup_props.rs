mod common;

use common::{acts_trivially_on, contracting_catalogue, ternary_groups, words_up_to};
use proptest::prelude::*;
use vgroup::{Equality, GenWord, Group, GroupDef, Letter, Triviality, Word};

fn groups() -> Vec<GroupDef> {
    contracting_catalogue()
        .into_iter()
        .chain(ternary_groups())
        .map(|(_, d)| d)
        .collect()
}

fn word_from(def: &GroupDef, picks: &[usize]) -> GenWord {
    let letters: Vec<Letter> = def.letters().collect();
    GenWord::from_letters(picks.iter().map(|&i| letters[i % letters.len()]))
}

fn tree_word(d: usize, picks: &[u8]) -> Word {
    Word::from_letters(picks.iter().map(|&x| x % d as u8).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_is_a_homomorphism(
        gi in 0usize..64,
        g in prop::collection::vec(0usize..8, 0..6),
        h in prop::collection::vec(0usize..8, 0..6),
    ) {
        let defs = groups();
        let def = &defs[gi % defs.len()];
        let group = Group::new(def.clone());
        let (g, h) = (word_from(def, &g), word_from(def, &h));
        let gh = g.mul(&h);
        for v in words_up_to(def.degree(), 6) {
            let direct = def.act_word(&gh, &v);
            prop_assert_eq!(&direct, &def.act_word(&g, &def.act_word(&h, &v)));
            prop_assert_eq!(&direct, &group.act(&gh, &v));
        }
    }

    #[test]
    fn sections_form_a_cocycle(
        gi in 0usize..64,
        g in prop::collection::vec(0usize..8, 0..6),
        h in prop::collection::vec(0usize..8, 0..6),
        v in prop::collection::vec(0u8..3, 0..5),
    ) {
        let defs = groups();
        let def = &defs[gi % defs.len()];
        let group = Group::new(def.clone());
        let (g, h) = (word_from(def, &g), word_from(def, &h));
        let v = tree_word(def.degree(), &v);
        let lhs = def.section(&g.mul(&h), &v);
        let rhs = def.section(&g, &def.act_word(&h, &v)).mul(&def.section(&h, &v));
        prop_assert_eq!(group.are_equal(&lhs, &rhs), Equality::Equal);
    }

    #[test]
    fn decomposition_is_a_homomorphism(
        gi in 0usize..64,
        g in prop::collection::vec(0usize..8, 0..6),
        h in prop::collection::vec(0usize..8, 0..6),
    ) {
        let defs = groups();
        let def = &defs[gi % defs.len()];
        let group = Group::new(def.clone());
        let (g, h) = (word_from(def, &g), word_from(def, &h));
        let (pg, sg) = def.wreath_decompose(&g);
        let (ph, sh) = def.wreath_decompose(&h);
        let (pgh, sgh) = def.wreath_decompose(&g.mul(&h));
        prop_assert_eq!(pgh, pg.compose(&ph));
        for x in 0..def.degree() {
            let expect = sg[ph.apply(x as u8) as usize].mul(&sh[x]);
            prop_assert_eq!(group.are_equal(&sgh[x], &expect), Equality::Equal);
        }
    }
}

#[test]
fn word_problem_matches_brute_force_on_short_grigorchuk_words() {
    let def = vgroup::catalogue::grigorchuk();
    let group = Group::new(def.clone());
    let letters: Vec<Letter> = def.letters().collect();
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut checked = 0;
    for _ in 0..=4 {
        let mut next = Vec::new();
        for w in &frontier {
            let g = GenWord::from_letters(w.iter().copied());
            let brute = acts_trivially_on(&def, &g, 8);
            match group.is_trivial(&g) {
                Triviality::Trivial => assert!(brute, "{}", g.display(&def)),
                Triviality::Nontrivial { witness } => {
                    assert!(!brute, "{}", g.display(&def));
                    assert_ne!(def.act_word(&g, &witness), witness);
                }
                Triviality::Undecided => panic!("undecided on {}", g.display(&def)),
            }
            checked += 1;
            for &l in &letters {
                let mut longer = w.clone();
                longer.push(l);
                next.push(longer);
            }
        }
        frontier = next;
    }
    assert_eq!(checked, 1 + 8 + 64 + 512 + 4096);
}
