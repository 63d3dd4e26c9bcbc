use proptest::prelude::*;
use slepf::linkpat::{catalan, collapse_map, enumerate, merge_blocks, LinkPattern, ValencedLinkPattern};

fn pattern(max_links: usize) -> impl Strategy<Value = LinkPattern> {
    (1..=max_links).prop_flat_map(|n| {
        let all = enumerate(n).unwrap();
        (0..all.len()).prop_map(move |k| all[k].clone())
    })
}

/// A pattern together with a split of its points into consecutive blocks of
/// size 1 to 3.
fn blocked(max_links: usize) -> impl Strategy<Value = (LinkPattern, Vec<u32>)> {
    pattern(max_links).prop_flat_map(|a| {
        let n = a.n_points();
        (Just(a), proptest::collection::vec(1u32..=3, n))
    })
    .prop_map(|(a, raw)| {
        let mut sizes = Vec::new();
        let mut left = a.n_points() as u32;
        for s in raw {
            if left == 0 {
                break;
            }
            let s = s.min(left);
            sizes.push(s);
            left -= s;
        }
        (a, sizes)
    })
}

#[test]
fn catalan_counts_up_to_eight() {
    for n in 0..=8 {
        assert_eq!(enumerate(n).unwrap().len() as u64, catalan(n), "n = {n}");
    }
}

proptest! {
    #[test]
    fn remove_then_insert_is_identity(a in pattern(6), pick in any::<prop::sample::Index>()) {
        let adjacent: Vec<usize> = a.links().iter().filter(|(x, y)| y - x == 1).map(|&(x, _)| x).collect();
        let j = adjacent[pick.index(adjacent.len())];
        let back = a.remove_link(j).unwrap().insert_link(j).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn text_round_trip(a in pattern(7)) {
        let parsed: LinkPattern = a.to_string().parse().unwrap();
        prop_assert_eq!(parsed, a);
    }

    #[test]
    fn rotations_and_reflections_are_symmetries(a in pattern(6), k in 0usize..12) {
        let n = a.n_points();
        prop_assert_eq!(a.rotate(k).rotate(n - k % n), a.clone());
        prop_assert_eq!(a.reflect().reflect(), a.clone());
        prop_assert!(enumerate(a.n_links()).unwrap().contains(&a.rotate(k)));
    }

    #[test]
    fn collapse_of_merged_blocks_is_a_valid_pattern((a, sizes) in blocked(6)) {
        if let Ok(omega) = merge_blocks(&a, &sizes) {
            let c = collapse_map(&omega);
            prop_assert_eq!(c.n_points() as u32, sizes.iter().sum::<u32>());
            // Revalidate through the checked constructor.
            let again = LinkPattern::new(c.links().iter().copied());
            prop_assert!(again.is_ok());
            prop_assert_eq!(c, a);
        }
    }

    #[test]
    fn collapse_of_random_valenced_patterns(vals in proptest::collection::vec(1u32..=3, 2..=6), seed in any::<u64>()) {
        // Random valences over a random planar pattern of matching size;
        // merges that would put a link inside a block are skipped.
        let total: u32 = vals.iter().sum();
        prop_assume!(total % 2 == 0);
        let all = enumerate(total as usize / 2).unwrap();
        let a = &all[(seed % all.len() as u64) as usize];
        let merged: Result<ValencedLinkPattern, _> = merge_blocks(a, &vals);
        if let Ok(omega) = merged {
            let c = collapse_map(&omega);
            prop_assert!(LinkPattern::new(c.links().iter().copied()).is_ok());
        }
    }
}
