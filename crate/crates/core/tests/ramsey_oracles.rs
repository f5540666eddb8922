use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wlab::ramsey::{
    find_2mono, find_homogeneous, least_solver, max_homogeneous, maximum_solver, ramsey_oracle, rt24_via_two_rt22,
    Coloring,
};

// Colors used on the pairs of the vertex set `mask`, as a bit mask.
fn colors_on(c: &Coloring, mask: u32) -> u32 {
    let mut used = 0;
    for i in 0..c.vertices() {
        for j in i + 1..c.vertices() {
            if mask >> i & 1 == 1 && mask >> j & 1 == 1 {
                used |= 1 << c.pair(i, j);
            }
        }
    }
    used
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|&v| mask >> v & 1 == 1).collect()
}

// Largest homogeneous set size, by scanning every vertex subset.
fn naive_max(c: &Coloring) -> usize {
    (0u32..1 << c.vertices())
        .filter(|&s| colors_on(c, s).count_ones() <= 1)
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

// Whether some `m`-subset is homogeneous, by scanning every vertex subset.
fn naive_has(c: &Coloring, m: usize) -> bool {
    (0u32..1 << c.vertices()).any(|s| s.count_ones() as usize == m && colors_on(c, s).count_ones() <= 1)
}

fn every_coloring(vertices: usize, k: u32) -> impl Iterator<Item = Coloring> {
    let len = vertices * (vertices - 1) / 2;
    let total = u64::from(k).pow(len as u32);
    (0..total).map(move |mut index| {
        let mut table = vec![0; len];
        for slot in table.iter_mut().rev() {
            *slot = index % u64::from(k);
            index /= u64::from(k);
        }
        Coloring::new(2, vertices, k, table).unwrap()
    })
}

#[test]
fn triples_in_two_colorings_of_six_and_five_vertices() {
    let mut without = [0u64; 2];
    for (slot, vertices) in [5, 6].into_iter().enumerate() {
        for c in every_coloring(vertices, 2) {
            let found = find_homogeneous(&c, 3);
            assert_eq!(found.is_some(), naive_has(&c, 3));
            if let Some(h) = found {
                assert_eq!(h.len(), 3);
                assert!(c.is_homogeneous(&h.vertices, h.color));
            } else {
                without[slot] += 1;
            }
        }
    }
    assert_eq!(without, [12, 0]);
    let five = ramsey_oracle(5, 2, 3, 1).unwrap();
    assert_eq!((five.colorings, five.without_homogeneous), (1 << 10, 12));
    let cx = five.first_counterexample.unwrap();
    assert!(!naive_has(&cx, 3));
    let six = ramsey_oracle(6, 2, 3, 1).unwrap();
    assert_eq!((six.colorings, six.without_homogeneous, six.first_counterexample), (1 << 15, 0, None));
}

#[test]
fn oracle_report_does_not_depend_on_jobs() {
    assert_eq!(ramsey_oracle(5, 2, 3, 1).unwrap(), ramsey_oracle(5, 2, 3, 3).unwrap());
}

#[test]
fn maximum_matches_subset_scan_on_small_spaces() {
    for c in every_coloring(4, 3) {
        let h = max_homogeneous(&c);
        assert_eq!(h.len(), naive_max(&c));
        assert!(c.is_homogeneous(&h.vertices, h.color));
    }
}

#[test]
fn two_mono_sets_match_subset_scan() {
    for c in every_coloring(4, 4).step_by(7) {
        for s in 2..=4 {
            let expected = (0u32..16)
                .filter(|&m| m.count_ones() as usize == s && colors_on(&c, m).count_ones() <= 2)
                .map(members)
                .min();
            let found = find_2mono(&c, s);
            assert_eq!(found.as_ref().map(|(set, _)| set.clone()), expected);
            if let Some((set, (a0, a1))) = found {
                let mask = set.iter().fold(0u32, |m, &v| m | 1 << v);
                assert!(a0 < a1);
                assert_eq!(colors_on(&c, mask) & !(1 << a0 | 1 << a1), 0);
            }
        }
    }
}

proptest! {
    #[test]
    fn maximum_matches_subset_scan(seed in any::<u64>(), vertices in 2usize..11, k in 1u32..4) {
        let c = Coloring::random(2, vertices, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(max_homogeneous(&c).len(), naive_max(&c));
    }

    #[test]
    fn least_set_is_lexicographically_first(seed in any::<u64>(), vertices in 3usize..10, m in 2usize..5) {
        let c = Coloring::random(2, vertices, 2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let expected = (0u32..1 << vertices)
            .filter(|&s| s.count_ones() as usize == m && colors_on(&c, s).count_ones() <= 1)
            .map(members)
            .min();
        prop_assert_eq!(find_homogeneous(&c, m).map(|h| h.vertices), expected);
    }

    #[test]
    fn two_step_output_is_homogeneous(seed in any::<u64>(), vertices in 5usize..30) {
        let f = Coloring::random(2, vertices, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let solver = maximum_solver();
        let out = rt24_via_two_rt22(&f, &solver, 2).unwrap();
        prop_assert_eq!(solver.count(), 2);
        prop_assert!(f.is_homogeneous(&out.output.vertices, out.output.color));
        prop_assert!(out.output.len() >= 2);
    }

    #[test]
    fn two_step_with_least_solver(seed in any::<u64>()) {
        let f = Coloring::random(2, 12, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let solver = least_solver(2);
        let out = rt24_via_two_rt22(&f, &solver, 2).unwrap();
        prop_assert_eq!(solver.count(), 2);
        prop_assert!(f.is_homogeneous(&out.output.vertices, out.output.color));
    }
}
