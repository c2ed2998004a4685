//! Kelley intersection numbers of finite clopen families: brute-force
//! sequence enumeration and the exact LP with an optimal-measure witness.

use num_traits::{One, Zero};

use crate::clopen::Clopen;
use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::path::BitPath;
use crate::rat::Rat;
use crate::simplex::solve_max;

/// A nonempty family of nonempty clopen sets over a common truncation depth.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    sets: Vec<Clopen>,
    depth: usize,
}

impl FamilySpec {
    pub fn new(sets: Vec<Clopen>, depth: usize, max_depth: usize) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Validation("family must be nonempty".into()));
        }
        if sets.iter().any(Clopen::is_empty) {
            return Err(Error::Validation(
                "family members must be nonempty".into(),
            ));
        }
        if depth > max_depth {
            return Err(Error::DepthExceeded(format!(
                "family depth {depth} exceeds limit {max_depth}"
            )));
        }
        if let Some(deep) = sets.iter().map(Clopen::max_depth).max() {
            if deep > depth {
                return Err(Error::DepthExceeded(format!(
                    "family member uses depth {deep} > family depth {depth}"
                )));
            }
        }
        Ok(FamilySpec { sets, depth })
    }

    /// Family depth defaults to the deepest cylinder in use.
    pub fn from_sets(sets: Vec<Clopen>, max_depth: usize) -> Result<Self> {
        let depth = sets.iter().map(Clopen::max_depth).max().unwrap_or(0);
        FamilySpec::new(sets, depth, max_depth)
    }

    pub fn sets(&self) -> &[Clopen] {
        &self.sets
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// For each depth-D atom, the bitmask of family members containing it.
    fn atom_membership(&self) -> Vec<u64> {
        let n_atoms = 1usize << self.depth;
        let mut masks = vec![0u64; n_atoms];
        for (i, set) in self.sets.iter().enumerate() {
            for (a, mask) in masks.iter_mut().enumerate() {
                if set.contains_cylinder(&BitPath::from_lex_index(self.depth, a)) {
                    *mask |= 1 << i;
                }
            }
        }
        masks
    }
}

/// Combined result of the two Kelley computations.
#[derive(Debug, Clone)]
pub struct KelleyResult {
    pub lp_value: Rat,
    pub witness: FiniteMeasure,
    pub kn_table: Vec<(usize, usize)>,
    pub bf_upper_bound: Rat,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Brute-force `k_n` table: the minimum over all length-n families (with
/// repetition) of the largest subfamily with nonempty meet.
///
/// Because `k_n` depends only on multiplicities, the enumeration runs over
/// multisets; a subfamily has nonempty meet exactly when some atom lies in
/// every chosen set, so the largest one is found by an atom scan.
pub fn kelley_bf(
    family: &FamilySpec,
    nmax: usize,
    budget: u128,
) -> Result<(Vec<(usize, usize)>, Rat)> {
    if nmax < 1 {
        return Err(Error::Validation("nmax must be at least 1".into()));
    }
    let k = family.sets.len();
    let need: u128 = (1..=nmax)
        .map(|n| binomial((n + k - 1) as u128, n as u128))
        .sum();
    if need > budget {
        return Err(Error::BudgetExceeded { need, budget });
    }
    let membership = family.atom_membership();
    let mut table = Vec::with_capacity(nmax);
    let mut bound: Option<Rat> = None;
    for n in 1..=nmax {
        let mut k_n = usize::MAX;
        let mut counts = vec![0usize; k];
        enumerate_multisets(n, 0, &mut counts, &mut |counts| {
            let best = membership
                .iter()
                .map(|&mask| {
                    (0..k)
                        .filter(|&i| (mask >> i) & 1 == 1)
                        .map(|i| counts[i])
                        .sum::<usize>()
                })
                .max()
                .unwrap_or(0);
            k_n = k_n.min(best);
        });
        table.push((n, k_n));
        let ratio = Rat::new(k_n.into(), n.into());
        bound = Some(match bound {
            None => ratio,
            Some(b) => b.min(ratio),
        });
    }
    Ok((table, bound.expect("nmax >= 1")))
}

fn enumerate_multisets(
    remaining: usize,
    index: usize,
    counts: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if index + 1 == counts.len() {
        counts[index] = remaining;
        visit(counts);
        counts[index] = 0;
        return;
    }
    for take in 0..=remaining {
        counts[index] = take;
        enumerate_multisets(remaining - take, index + 1, counts, visit);
    }
    counts[index] = 0;
}

/// Exact LP value of the intersection number and an optimal measure.
///
/// Solves `max t` over probability measures on the depth-D atoms subject to
/// `mu(c) >= t` for every family member. Internally this runs the packing
/// form `max sum z_c` over `sum_{c : a in c} z_c <= 1` per atom, whose
/// optimum `v` satisfies `t* = 1/v`; the dual prices scale to the witness
/// measure. Always feasible and bounded.
pub fn kelley_lp(family: &FamilySpec) -> (Rat, FiniteMeasure) {
    let membership = family.atom_membership();
    let n_sets = family.sets.len();
    let n_atoms = membership.len();
    let c = vec![Rat::one(); n_sets];
    let a: Vec<Vec<Rat>> = (0..n_atoms)
        .map(|at| {
            (0..n_sets)
                .map(|i| {
                    if (membership[at] >> i) & 1 == 1 {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                })
                .collect()
        })
        .collect();
    let b = vec![Rat::one(); n_atoms];
    let sol = solve_max(&c, &a, &b);
    debug_assert!(sol.value >= Rat::one());
    let t_star = Rat::one() / &sol.value;
    let atoms: Vec<Rat> = sol.y.iter().map(|y| y / &sol.value).collect();
    let witness =
        FiniteMeasure::new(family.depth, atoms).expect("dual prices scale to a measure");
    (t_star, witness)
}

/// Runs both routes and packages the combined result.
pub fn kelley_both(family: &FamilySpec, nmax: usize, budget: u128) -> Result<KelleyResult> {
    let (lp_value, witness) = kelley_lp(family);
    let (kn_table, bf_upper_bound) = kelley_bf(family, nmax, budget)?;
    Ok(KelleyResult {
        lp_value,
        witness,
        kn_table,
        bf_upper_bound,
    })
}

/// Ceiling of `n/2` as a rational-free helper for tests.
pub fn half_ceil(n: usize) -> usize {
    n.div_ceil(2)
}
