mod common;

use proptest::prelude::*;

use intile::automaton::{check_window_theorem_with, tiles_integers, BuildOptions, TilingAutomaton, WindowVerdict};
use intile::exec::Exec;
use intile::factorial::{decode, encode};
use intile::prototile::{Prototile, PrototileSet};
use intile::sofic::{count_periodic_with, determinize, determinize_with, drop_subscripts, DeterminizeOptions, PeriodicOptions};

const COLORS: [&str; 4] = ["a", "b", "c", "d"];

fn shape(max_span: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(any::<bool>(), (max_span - 1) as usize).prop_map(|bits| {
        let mut offs = vec![0];
        offs.extend(bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i as u64 + 1));
        offs
    })
}

fn prototile_set(max_tiles: usize, max_span: u64) -> impl Strategy<Value = PrototileSet> {
    prop::collection::vec(shape(max_span), 1..=max_tiles).prop_map(|shapes| {
        let tiles = shapes
            .iter()
            .zip(COLORS)
            .map(|(s, c)| Prototile::from_offsets(c, s.iter().copied()).unwrap())
            .collect();
        PrototileSet::new(tiles).unwrap()
    })
}

fn with_exec(exec: Exec) -> BuildOptions {
    BuildOptions {
        exec,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn periodic_tiling_is_exact_cover(ps in prototile_set(3, 6)) {
        let ta = TilingAutomaton::build(&ps).unwrap();
        match ta.find_periodic_tiling() {
            Some(t) => {
                prop_assert!(t.validate(&ps).is_ok());
                let colors = t.colors(&ps).unwrap();
                prop_assert!(ta.accepts_periodic(&colors));
                prop_assert!(tiles_integers(&ps).unwrap());
            }
            None => prop_assert!(ta.is_empty()),
        }
    }

    #[test]
    fn strategies_agree(ps in prototile_set(3, 6)) {
        let seq = TilingAutomaton::build_with(&ps, &with_exec(Exec::Sequential)).unwrap();
        let par = TilingAutomaton::build_with(&ps, &with_exec(Exec::Parallel)).unwrap();
        prop_assert_eq!(&seq, &par);
        let lp = drop_subscripts(&seq);
        let det = |exec| determinize_with(&lp, &DeterminizeOptions { exec, ..Default::default() }).unwrap();
        let dp = det(Exec::Sequential);
        prop_assert_eq!(&dp, &det(Exec::Parallel));
        for p in 1..=6 {
            let count = |exec| count_periodic_with(&dp, p, &PeriodicOptions { exec, ..Default::default() }).unwrap();
            prop_assert_eq!(count(Exec::Sequential), count(Exec::Parallel));
        }
    }

    #[test]
    fn entropy_grows_with_the_set(ps in prototile_set(2, 5), extra in shape(5)) {
        let mut tiles = ps.tiles().to_vec();
        tiles.push(Prototile::from_offsets("z", extra).unwrap());
        let bigger = PrototileSet::new(tiles).unwrap();
        let h = |s: &PrototileSet| determinize(&drop_subscripts(&TilingAutomaton::build(s).unwrap())).entropy();
        let (small, large) = (h(&ps), h(&bigger));
        prop_assert!(large >= small - 1e-9, "{small} > {large}");
        prop_assert!(large <= (bigger.len() as f64).ln() + 1e-9);
    }

    #[test]
    fn longest_window_decides_membership(ps in prototile_set(2, 4)) {
        let ta = TilingAutomaton::build(&ps).unwrap();
        let l = ps.longest_length() as usize;
        let check = check_window_theorem_with(&ta, l, 6, Exec::default());
        prop_assert_eq!(check.verdict, WindowVerdict::Holds);
    }

    #[test]
    fn periodic_counts_bounded_by_words(ps in prototile_set(3, 5), p in 1usize..8) {
        let dp = determinize(&drop_subscripts(&TilingAutomaton::build(&ps).unwrap()));
        let count = count_periodic_with(&dp, p, &PeriodicOptions::default()).unwrap();
        prop_assert!(count <= num_bigint::BigUint::from(ps.len()).pow(p as u32));
    }

    #[test]
    fn factorial_digits_match_direct_sum(n in 1usize..40, seed in prop::collection::vec(any::<u64>(), 40)) {
        let digits: Vec<u64> = (1..=n as u64).zip(&seed).map(|(k, s)| s % (k + 1)).collect();
        let value = decode(&digits).unwrap();
        prop_assert_eq!(&value, &common::factorial_sum(&digits));
        let back = encode(&value, n).unwrap();
        prop_assert_eq!(back.digits(), &digits[..]);
    }
}
