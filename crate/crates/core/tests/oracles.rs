//! Independent oracles for the trickier derived results: brute-force
//! searches that double-check the fast paths.

use std::collections::BTreeSet;

use mtool_core::kelley::{kelley_bf, FamilySpec};
use mtool_core::measure::{element_count, iso_from_isometry};
use mtool_core::ranges::iso_from_ranges;
use mtool_core::rat::{rat, Rat};
use mtool_core::weights::{measure_from_weights, WeightFn, WeightKind};
use mtool_core::{BitPath, Clopen, FiniteMeasure};

/// All depth-3 measures whose weight tables take values in {1/4, 1/2, 3/4}
/// on the first two levels and 1/2 below: a small dyadic grid.
fn dyadic_grid() -> Vec<FiniteMeasure> {
    let choices = [rat(1, 4), rat(1, 2), rat(3, 4)];
    let mut out = Vec::new();
    for root in &choices {
        for left in &choices {
            for right in &choices {
                let mut table = std::collections::BTreeMap::new();
                table.insert(BitPath::root(), root.clone());
                table.insert(BitPath::parse("0").unwrap(), left.clone());
                table.insert(BitPath::parse("1").unwrap(), right.clone());
                let w = WeightFn::new(3, table, rat(1, 2), WeightKind::Strict).unwrap();
                out.push(measure_from_weights(&w));
            }
        }
    }
    out
}

fn range_set(m: &FiniteMeasure, depth: usize) -> BTreeSet<Rat> {
    let mut values = BTreeSet::new();
    for level in 1..=depth {
        let mut acc = Rat::from_integer(0.into());
        for i in 0..(1usize << level) - 1 {
            acc += m.cylinder_mass(&BitPath::from_lex_index(level, i)).unwrap();
            values.insert(acc.clone());
        }
    }
    values
}

/// Search over the dyadic grid: whenever ranges agree down to some level,
/// the witness must reach that level and preserve measures on every image.
#[test]
fn iso_from_ranges_agrees_with_grid_search() {
    let grid = dyadic_grid();
    let mut partial_pairs = 0;
    let mut full_pairs = 0;
    for m1 in &grid {
        for m2 in &grid {
            // Level-1 source values may match target values of any level.
            let l1_matchable = range_set(m1, 1)
                .iter()
                .all(|v| range_set(m2, 3).contains(v));
            let witness = match iso_from_ranges(m1, m2, 3) {
                Ok(w) => w,
                Err(mtool_core::Error::RangeMismatch(_)) => {
                    assert!(!l1_matchable, "mismatch reported although level 1 matches");
                    continue;
                }
                Err(e) => panic!("unexpected error {e}"),
            };
            assert!(witness.depth_reached() >= 1);
            assert!(l1_matchable, "witness built but level-1 values unmatched");
            if m1.atoms() == m2.atoms() {
                assert_eq!(witness.depth_reached(), 3, "identical atoms reach full depth");
                full_pairs += 1;
            } else if witness.depth_reached() > 1 {
                partial_pairs += 1;
            }
            for (s, image) in witness.table() {
                assert_eq!(
                    m2.eval(image).unwrap(),
                    m1.cylinder_mass(s).unwrap(),
                    "measure not preserved at {s}"
                );
            }
            // Injectivity on every completed level.
            let images: Vec<&Clopen> = witness.table().values().collect();
            for i in 0..images.len() {
                for j in i + 1..images.len() {
                    assert_ne!(images[i], images[j]);
                }
            }
        }
    }
    assert_eq!(full_pairs, grid.len());
    assert!(partial_pairs > 0, "grid contains genuinely partial pairs");
}

/// Equal range sets at the full truncation force equal atom vectors, which
/// is why deeper matches need deeper search levels.
#[test]
fn equal_full_range_sets_mean_equal_atoms_on_grid() {
    let grid = dyadic_grid();
    for m1 in &grid {
        for m2 in &grid {
            if range_set(m1, 3) == range_set(m2, 3) {
                assert_eq!(m1.atoms(), m2.atoms());
            }
        }
    }
}

/// Sequence-level brute force (the literal definition) agrees with the
/// multiset enumeration on tiny instances.
#[test]
fn kelley_bf_matches_sequence_enumeration() {
    fn k_n_sequences(sets: &[Clopen], n: usize) -> usize {
        let k = sets.len();
        let mut best = usize::MAX;
        let mut seq = vec![0usize; n];
        loop {
            // Largest subsequence with nonempty meet, by subset scan.
            let mut largest = 0;
            for mask in 1u32..(1 << n) {
                let mut meet = Clopen::unit();
                for (i, &s) in seq.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        meet = meet.meet(&sets[s]);
                    }
                }
                if !meet.is_empty() {
                    largest = largest.max(mask.count_ones() as usize);
                }
            }
            best = best.min(largest);
            // Next sequence in base-k counting order.
            let mut i = 0;
            loop {
                if i == n {
                    return best;
                }
                seq[i] += 1;
                if seq[i] < k {
                    break;
                }
                seq[i] = 0;
                i += 1;
            }
        }
    }

    let families: Vec<Vec<Clopen>> = vec![
        vec![
            Clopen::cylinder(BitPath::parse("0").unwrap()),
            Clopen::cylinder(BitPath::parse("1").unwrap()),
        ],
        vec![
            Clopen::cylinder(BitPath::parse("0").unwrap()),
            Clopen::cylinder(BitPath::parse("00").unwrap()),
        ],
        vec![
            Clopen::cylinder(BitPath::parse("00").unwrap()),
            Clopen::cylinder(BitPath::parse("01").unwrap()),
            Clopen::cylinder(BitPath::parse("10").unwrap()),
        ],
        vec![
            Clopen::from_paths([
                BitPath::parse("00").unwrap(),
                BitPath::parse("11").unwrap(),
            ]),
            Clopen::cylinder(BitPath::parse("0").unwrap()),
            Clopen::cylinder(BitPath::parse("10").unwrap()),
        ],
    ];
    for sets in families {
        let family = FamilySpec::from_sets(sets.clone(), 16).unwrap();
        let (table, _) = kelley_bf(&family, 4, 1 << 20).unwrap();
        for (n, k_n) in table {
            assert_eq!(k_n, k_n_sequences(&sets, n), "family {sets:?}, n = {n}");
        }
    }
}

/// Translation isometries repair to the inducing atom permutation.
#[test]
fn translation_isometries_repair_to_their_permutation() {
    let m = FiniteMeasure::new(2, vec![rat(1, 4), rat(1, 4), rat(3, 8), rat(1, 8)]).unwrap();
    // h swaps the two equal-mass atoms 0 and 1.
    let h: Vec<u64> = (0..element_count(2) as u64)
        .map(|mask| {
            let b0 = mask & 1;
            let b1 = (mask >> 1) & 1;
            (mask & !0b11) | (b0 << 1) | b1
        })
        .collect();
    for c in 0..element_count(2) as u64 {
        let f: Vec<u64> = (0..element_count(2) as u64)
            .map(|a| h[(a ^ c) as usize])
            .collect();
        let g = iso_from_isometry(&m, &m, &f).unwrap();
        assert_eq!(g, h, "translation part must cancel");
    }
}
