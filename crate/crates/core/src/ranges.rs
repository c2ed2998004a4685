//! Range codings of strictly positive measures: hat-set masses per level,
//! the intertwining order pattern, and the range-equality isomorphism
//! construction.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::clopen::Clopen;
use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::path::BitPath;
use crate::rat::Rat;

/// Mass of the union of lexicographically earlier same-length cylinders;
/// zero for the lex-first path of each level.
pub fn hat_measure(m: &FiniteMeasure, s: &BitPath) -> Result<Rat> {
    if s.len() > m.depth() {
        return Err(Error::DepthExceeded(format!(
            "node [{s}] deeper than measure depth {}",
            m.depth()
        )));
    }
    let mut total = Rat::zero();
    for i in 0..s.lex_index() {
        total += m.cylinder_mass(&BitPath::from_lex_index(s.len(), i))?;
    }
    Ok(total)
}

/// The range coding of a measure: all nonzero hat-set masses down to a
/// level, as a sorted set plus the per-level cumulative sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeCode {
    values: Vec<Rat>,
    per_level: Vec<Vec<Rat>>,
}

impl RangeCode {
    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// Proper cumulative sums of level `l + 1` (index `l` into the list),
    /// excluding the endpoints 0 and 1.
    pub fn per_level(&self) -> &[Vec<Rat>] {
        &self.per_level
    }
}

fn check_positive_to(m: &FiniteMeasure, depth: usize) -> Result<()> {
    for s in BitPath::level(depth) {
        if m.cylinder_mass(&s)?.is_zero() {
            return Err(Error::NotStrictlyPositive);
        }
    }
    Ok(())
}

/// Computes the range coding down to `depth` plus the intertwining verdict:
/// every level's cumulative sequence must interleave strictly between the
/// previous level's values and the endpoints 0 and 1.
pub fn range_code(m: &FiniteMeasure, depth: usize) -> Result<(RangeCode, bool)> {
    if depth > m.depth() {
        return Err(Error::DepthExceeded(format!(
            "range depth {depth} exceeds measure depth {}",
            m.depth()
        )));
    }
    check_positive_to(m, depth)?;
    let mut per_level = Vec::with_capacity(depth);
    for level in 1..=depth {
        let mut cumulative = Vec::with_capacity((1usize << level) - 1);
        let mut acc = Rat::zero();
        for i in 0..(1usize << level) - 1 {
            acc += m.cylinder_mass(&BitPath::from_lex_index(level, i))?;
            cumulative.push(acc.clone());
        }
        per_level.push(cumulative);
    }
    let mut values: Vec<Rat> = per_level.iter().flatten().cloned().collect();
    values.sort();
    values.dedup();
    let intertwining = check_intertwining(&per_level);
    Ok((RangeCode { values, per_level }, intertwining))
}

fn check_intertwining(per_level: &[Vec<Rat>]) -> bool {
    let bounded = |level: &[Rat], k: usize| -> Rat {
        // Convention: index 0 is the endpoint 0, index 2^l is the endpoint 1.
        if k == 0 {
            Rat::zero()
        } else if k == level.len() + 1 {
            Rat::one()
        } else {
            level[k - 1].clone()
        }
    };
    for l in 0..per_level.len() {
        let cur = &per_level[l];
        let cells = cur.len() + 1; // 2^(l+1)
        if l == 0 {
            if cur.len() != 1 || cur[0] <= Rat::zero() || cur[0] >= Rat::one() {
                return false;
            }
            continue;
        }
        let prev = &per_level[l - 1];
        for k in 0..cells / 2 {
            let lo = bounded(prev, k);
            let hi = bounded(prev, k + 1);
            let new = bounded(cur, 2 * k + 1);
            if !(lo < new && new < hi) {
                return false;
            }
            if k > 0 && bounded(cur, 2 * k) != lo {
                return false;
            }
        }
    }
    true
}

/// A stage-built metric-isomorphism witness: images of generating-tree
/// cylinders in the target algebra, down to the deepest fully matched level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoWitness {
    table: BTreeMap<BitPath, Clopen>,
    depth_reached: usize,
}

impl IsoWitness {
    pub fn table(&self) -> &BTreeMap<BitPath, Clopen> {
        &self.table
    }

    pub fn depth_reached(&self) -> usize {
        self.depth_reached
    }
}

/// Builds an isomorphism witness from equal range sets.
///
/// Each source hat-value is matched to the target initial segment with the
/// identical hat-mass (searching target levels up to `search_depth`); the
/// chain of matched segments is then converted to cylinder images by
/// successive differences. Matching proceeds level by level; the witness
/// stops at the deepest fully matched level. If even the first level cannot
/// be completed, the smallest unmatched source value is reported.
pub fn iso_from_ranges(
    m1: &FiniteMeasure,
    m2: &FiniteMeasure,
    search_depth: usize,
) -> Result<IsoWitness> {
    if search_depth > m1.depth() || search_depth > m2.depth() {
        return Err(Error::DepthExceeded(format!(
            "search depth {search_depth} exceeds a measure depth ({}, {})",
            m1.depth(),
            m2.depth()
        )));
    }
    check_positive_to(m1, search_depth)?;
    check_positive_to(m2, search_depth)?;

    // Target hat-values, shallowest representation first.
    let mut target: BTreeMap<Rat, (usize, usize)> = BTreeMap::new();
    for level in 1..=search_depth {
        let mut acc = Rat::zero();
        for i in 0..(1usize << level) - 1 {
            acc += m2.cylinder_mass(&BitPath::from_lex_index(level, i))?;
            target.entry(acc.clone()).or_insert((level, i + 1));
        }
    }
    let target_segment = |value: &Rat| -> Option<Clopen> {
        if value.is_zero() {
            return Some(Clopen::empty());
        }
        if value.is_one() {
            return Some(Clopen::unit());
        }
        let (level, count) = target.get(value)?;
        Some(Clopen::from_paths(
            (0..*count).map(|i| BitPath::from_lex_index(*level, i)),
        ))
    };

    // Per-source-level match check.
    let mut source_levels: Vec<Vec<Rat>> = Vec::new();
    for level in 1..=search_depth {
        let mut acc = Rat::zero();
        let mut vals = Vec::new();
        for i in 0..(1usize << level) - 1 {
            acc += m1.cylinder_mass(&BitPath::from_lex_index(level, i))?;
            vals.push(acc.clone());
        }
        source_levels.push(vals);
    }
    let mut depth_reached = 0;
    for (idx, vals) in source_levels.iter().enumerate() {
        if vals.iter().all(|v| target.contains_key(v)) {
            depth_reached = idx + 1;
        } else {
            break;
        }
    }
    if depth_reached == 0 && search_depth > 0 {
        let smallest = source_levels
            .iter()
            .flatten()
            .filter(|v| !target.contains_key(v))
            .min()
            .cloned()
            .expect("some value failed to match");
        return Err(Error::RangeMismatch(smallest));
    }

    // Successive differences of the matched initial-segment chain.
    let mut table = BTreeMap::new();
    for level in 1..=depth_reached {
        let vals = &source_levels[level - 1];
        let mut prev = Clopen::empty();
        for i in 0..1usize << level {
            let upper = match vals.get(i) {
                Some(v) => target_segment(v).expect("level fully matched"),
                None => Clopen::unit(),
            };
            let image = upper.difference(&prev);
            table.insert(BitPath::from_lex_index(level, i), image);
            prev = upper;
        }
    }
    Ok(IsoWitness {
        table,
        depth_reached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use crate::weights::{measure_from_weights, WeightFn, WeightKind};

    fn p(s: &str) -> BitPath {
        BitPath::parse(s).unwrap()
    }

    fn third_root() -> FiniteMeasure {
        let table = [(BitPath::root(), rat(1, 3))].into_iter().collect();
        measure_from_weights(&WeightFn::new(3, table, rat(1, 2), WeightKind::Strict).unwrap())
    }

    #[test]
    fn hat_measure_examples() {
        let leb = FiniteMeasure::lebesgue(3);
        assert_eq!(hat_measure(&leb, &p("1")).unwrap(), rat(1, 2));
        assert_eq!(hat_measure(&leb, &p("11")).unwrap(), rat(3, 4));
        assert_eq!(hat_measure(&leb, &p("000")).unwrap(), rat_int(0));
    }

    #[test]
    fn range_code_of_lebesgue_depth2() {
        let leb = FiniteMeasure::lebesgue(2);
        let (code, intertwining) = range_code(&leb, 2).unwrap();
        assert_eq!(code.values(), &[rat(1, 4), rat(1, 2), rat(3, 4)]);
        assert_eq!(code.per_level()[0], vec![rat(1, 2)]);
        assert_eq!(code.per_level()[1], vec![rat(1, 4), rat(1, 2), rat(3, 4)]);
        assert!(intertwining);
    }

    #[test]
    fn hat_measure_rejects_deep_nodes() {
        let leb = FiniteMeasure::lebesgue(2);
        assert!(matches!(
            hat_measure(&leb, &p("000")),
            Err(Error::DepthExceeded(_))
        ));
    }

    #[test]
    fn range_code_of_third_root_depth2() {
        let m = third_root();
        let (code, intertwining) = range_code(&m, 2).unwrap();
        assert_eq!(code.values(), &[rat(1, 6), rat(1, 3), rat(2, 3)]);
        assert!(intertwining);
    }

    #[test]
    fn range_code_requires_strict_positivity() {
        let m = FiniteMeasure::new(1, vec![rat_int(1), rat_int(0)]).unwrap();
        assert!(matches!(
            range_code(&m, 1),
            Err(Error::NotStrictlyPositive)
        ));
    }

    #[test]
    fn iso_from_ranges_identity() {
        let leb = FiniteMeasure::lebesgue(3);
        let w = iso_from_ranges(&leb, &leb, 3).unwrap();
        assert_eq!(w.depth_reached(), 3);
        for (s, image) in w.table() {
            assert_eq!(image, &Clopen::cylinder(s.clone()), "node {s}");
        }
    }

    #[test]
    fn iso_from_ranges_mismatch_reports_smallest_value() {
        let leb = FiniteMeasure::lebesgue(3);
        let m = third_root();
        match iso_from_ranges(&leb, &m, 2) {
            Err(Error::RangeMismatch(v)) => assert_eq!(v, rat(1, 4)),
            other => panic!("expected range mismatch, got {other:?}"),
        }
    }

    #[test]
    fn iso_witness_is_partial_when_deep_levels_diverge() {
        // Equal cumulative range sets through level 2, different depth-3
        // atom vectors: the witness reaches level 2 and stops.
        let m1 = FiniteMeasure::new(
            3,
            vec![
                rat(1, 16),
                rat(1, 16),
                rat(3, 16),
                rat(3, 16),
                rat(1, 8),
                rat(1, 8),
                rat(1, 8),
                rat(1, 8),
            ],
        )
        .unwrap();
        let m2 = FiniteMeasure::new(
            3,
            vec![
                rat(1, 32),
                rat(3, 32),
                rat(3, 16),
                rat(3, 16),
                rat(1, 8),
                rat(1, 8),
                rat(1, 8),
                rat(1, 8),
            ],
        )
        .unwrap();
        let w = iso_from_ranges(&m1, &m2, 3).unwrap();
        assert_eq!(w.depth_reached(), 2);
        for (s, image) in w.table() {
            assert_eq!(
                m2.eval(image).unwrap(),
                m1.cylinder_mass(s).unwrap(),
                "node {s}"
            );
        }
        // Images are pairwise distinct.
        let images: Vec<&Clopen> = w.table().values().collect();
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                assert_ne!(images[i], images[j]);
            }
        }
    }
}
