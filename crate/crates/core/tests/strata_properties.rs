//! Property tests over randomly sampled complexes: the simplicial face
//! identity, the stratum partial order, subface words, and stability of
//! validation under rebuild.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stratal::sampler::random_complex;
use stratal::strata::StratifiedComplex;

fn sampled(seed: u64) -> StratifiedComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_complex(&mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_specs_validate_again_after_a_rebuild(seed in any::<u64>()) {
        let c = sampled(seed);
        prop_assert!(StratifiedComplex::new(c.spec().clone()).is_ok());
    }

    #[test]
    fn face_maps_satisfy_the_simplicial_identity(seed in any::<u64>()) {
        let c = sampled(seed);
        for s in 0..c.strata().len() {
            if c.codim(s) < 3 {
                continue;
            }
            let faces = c.face_indices(s);
            for j in 1..faces.len() {
                for i in 0..j {
                    let first_j = c.face_indices(faces[j])[i];
                    let first_i = c.face_indices(faces[i])[j - 1];
                    prop_assert_eq!(first_j, first_i);
                }
            }
        }
    }

    #[test]
    fn face_counts_match_codimension(seed in any::<u64>()) {
        let c = sampled(seed);
        for s in 0..c.strata().len() {
            let expected = if c.codim(s) == 1 { 0 } else { c.codim(s) };
            prop_assert_eq!(c.face_indices(s).len(), expected);
            prop_assert_eq!(c.word(s).len(), c.codim(s));
        }
    }

    #[test]
    fn reachability_is_a_partial_order(seed in any::<u64>()) {
        let c = sampled(seed);
        let n = c.strata().len();
        for a in 0..n {
            prop_assert!(c.leq(a, a));
            for b in 0..n {
                if c.leq(a, b) && c.leq(b, a) {
                    prop_assert_eq!(a, b);
                }
                if c.leq(a, b) {
                    let wa: BTreeSet<usize> = c.word(a).iter().copied().collect();
                    let wb: BTreeSet<usize> = c.word(b).iter().copied().collect();
                    prop_assert!(wa.is_subset(&wb));
                }
                for d in 0..n {
                    if c.leq(a, b) && c.leq(b, d) {
                        prop_assert!(c.leq(a, d));
                    }
                }
            }
        }
    }

    #[test]
    fn subfaces_realize_every_subword(seed in any::<u64>()) {
        let c = sampled(seed);
        for s in 0..c.strata().len() {
            let word = c.word(s).to_vec();
            let k = word.len();
            for mask in 1u32..(1 << k) {
                let keep: BTreeSet<usize> = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| word[i])
                    .collect();
                let t = c.subface(s, &keep).expect("subword of a stratum exists");
                let found: BTreeSet<usize> = c.word(t).iter().copied().collect();
                prop_assert_eq!(&found, &keep);
                prop_assert!(c.leq(t, s));
            }
        }
    }

    #[test]
    fn faces_delete_exactly_one_letter(seed in any::<u64>()) {
        let c = sampled(seed);
        for s in 0..c.strata().len() {
            let word = c.word(s);
            for (j, &f) in c.face_indices(s).iter().enumerate() {
                let expected: Vec<usize> = word
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .map(|(_, &v)| v)
                    .collect();
                prop_assert_eq!(c.word(f), &expected[..]);
            }
        }
    }
}
