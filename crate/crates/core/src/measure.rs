//! Finite measured algebras: depth-D truncations with exact atom masses.

use num_traits::{One, Zero};

use crate::clopen::Clopen;
use crate::error::{Error, Result};
use crate::path::BitPath;
use crate::rat::{fmt_rat, Rat};

/// A measure on the depth-`depth` subalgebra, given by its `2^depth` atom
/// masses in lexicographic order. Atoms are nonnegative and sum to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMeasure {
    depth: usize,
    atoms: Vec<Rat>,
}

impl FiniteMeasure {
    pub fn new(depth: usize, atoms: Vec<Rat>) -> Result<Self> {
        if atoms.len() != 1usize << depth {
            return Err(Error::Validation(format!(
                "expected {} atoms at depth {depth}, got {}",
                1usize << depth,
                atoms.len()
            )));
        }
        if atoms.iter().any(|a| a < &Rat::zero()) {
            return Err(Error::Validation("negative atom mass".into()));
        }
        let total: Rat = atoms.iter().sum();
        if !total.is_one() {
            return Err(Error::Validation(format!(
                "atom masses sum to {}, not 1",
                fmt_rat(&total)
            )));
        }
        Ok(FiniteMeasure { depth, atoms })
    }

    /// Fair splitting: every depth-D atom gets mass `2^-D`.
    pub fn lebesgue(depth: usize) -> Self {
        let mass = Rat::new(1.into(), num_bigint::BigInt::one() << depth);
        FiniteMeasure {
            depth,
            atoms: vec![mass; 1 << depth],
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn atoms(&self) -> &[Rat] {
        &self.atoms
    }

    pub fn strictly_positive(&self) -> bool {
        self.atoms.iter().all(|a| a > &Rat::zero())
    }

    /// Mass of the cylinder at `path`; errors if the path is too deep.
    pub fn cylinder_mass(&self, path: &BitPath) -> Result<Rat> {
        if path.len() > self.depth {
            return Err(Error::DepthExceeded(format!(
                "cylinder [{path}] deeper than measure depth {}",
                self.depth
            )));
        }
        let width = 1usize << (self.depth - path.len());
        let start = path.lex_index() * width;
        Ok(self.atoms[start..start + width].iter().sum())
    }

    /// Exact measure of a clopen set by finite additivity.
    pub fn eval(&self, c: &Clopen) -> Result<Rat> {
        let mut total = Rat::zero();
        for cyl in c.cylinders() {
            total += self.cylinder_mass(cyl)?;
        }
        Ok(total)
    }

    /// The Fréchet–Nikodym distance `mu(a symdiff b)`.
    pub fn fn_dist(&self, a: &Clopen, b: &Clopen) -> Result<Rat> {
        self.eval(&a.symdiff(b))
    }

    /// Null atoms at truncation depth.
    pub fn null_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.is_zero()).count()
    }
}

fn check_same_depth(m1: &FiniteMeasure, m2: &FiniteMeasure) -> Result<()> {
    if m1.depth != m2.depth {
        return Err(Error::DepthMismatch {
            left: m1.depth,
            right: m2.depth,
        });
    }
    Ok(())
}

/// Metric-isomorphism test for finite measured algebras.
///
/// Two truncations are metrically isomorphic exactly when their atom-mass
/// multisets coincide; on success the witness is a mass-preserving atom
/// bijection (atom `i` of `m1` maps to atom `witness[i]` of `m2`).
pub fn metric_iso_finite(m1: &FiniteMeasure, m2: &FiniteMeasure) -> Result<Option<Vec<usize>>> {
    check_same_depth(m1, m2)?;
    let mut left: Vec<usize> = (0..m1.atoms.len()).collect();
    let mut right: Vec<usize> = (0..m2.atoms.len()).collect();
    left.sort_by(|&a, &b| m1.atoms[a].cmp(&m1.atoms[b]).then(a.cmp(&b)));
    right.sort_by(|&a, &b| m2.atoms[a].cmp(&m2.atoms[b]).then(a.cmp(&b)));
    if left.iter().zip(&right).any(|(&i, &j)| m1.atoms[i] != m2.atoms[j]) {
        return Ok(None);
    }
    let mut witness = vec![0usize; m1.atoms.len()];
    for (&i, &j) in left.iter().zip(&right) {
        witness[i] = j;
    }
    Ok(Some(witness))
}

/// Algebra elements of a depth-D truncation as atom bitmasks.
///
/// Restricted to `2^depth <= 62` atoms, far beyond what the exhaustive
/// operations below can enumerate anyway.
pub fn element_count(depth: usize) -> usize {
    1usize << (1usize << depth)
}

pub fn mask_measure(m: &FiniteMeasure, mask: u64) -> Rat {
    let mut total = Rat::zero();
    for (i, atom) in m.atoms.iter().enumerate() {
        if (mask >> i) & 1 == 1 {
            total += atom;
        }
    }
    total
}

pub fn clopen_to_mask(depth: usize, c: &Clopen) -> Result<u64> {
    let mut mask = 0u64;
    for cyl in c.cylinders() {
        if cyl.len() > depth {
            return Err(Error::DepthExceeded(format!(
                "cylinder [{cyl}] deeper than depth {depth}"
            )));
        }
        let width = 1usize << (depth - cyl.len());
        let start = cyl.lex_index() * width;
        for i in start..start + width {
            mask |= 1u64 << i;
        }
    }
    Ok(mask)
}

pub fn mask_to_clopen(depth: usize, mask: u64) -> Clopen {
    Clopen::from_paths(
        (0..1usize << depth)
            .filter(|i| (mask >> i) & 1 == 1)
            .map(|i| BitPath::from_lex_index(depth, i)),
    )
}

/// Repairs an isometry into a metric isomorphism via `g(a) = f(a) xor f(0)`.
///
/// `f` is a table over all `2^(2^D)` elements (as atom bitmasks). The
/// isometry precondition is checked exhaustively over all pairs; the output
/// `g` is then verified to be a bijective homomorphism preserving measure.
pub fn iso_from_isometry(m1: &FiniteMeasure, m2: &FiniteMeasure, f: &[u64]) -> Result<Vec<u64>> {
    check_same_depth(m1, m2)?;
    let n_atoms = 1usize << m1.depth;
    let n_el = element_count(m1.depth);
    let full: u64 = if n_atoms == 64 { !0 } else { (1u64 << n_atoms) - 1 };
    if f.len() != n_el {
        return Err(Error::NotAnIsometry(format!(
            "table has {} entries, expected {n_el}",
            f.len()
        )));
    }
    let mut seen = vec![false; n_el];
    for &img in f {
        if img > full || seen[img as usize] {
            return Err(Error::NotAnIsometry("table is not a bijection".into()));
        }
        seen[img as usize] = true;
    }
    // Exhaustive isometry check: d2(f a, f b) = d1(a, b) for all pairs.
    let d1: Vec<Rat> = (0..n_el).map(|a| mask_measure(m1, a as u64)).collect();
    let d2: Vec<Rat> = (0..n_el).map(|a| mask_measure(m2, a as u64)).collect();
    for a in 0..n_el {
        for b in a + 1..n_el {
            let lhs = &d2[(f[a] ^ f[b]) as usize];
            let rhs = &d1[a ^ b];
            if lhs != rhs {
                return Err(Error::NotAnIsometry(format!(
                    "distance not preserved on pair ({a}, {b})"
                )));
            }
        }
    }
    let base = f[0];
    let g: Vec<u64> = f.iter().map(|&img| img ^ base).collect();
    // Verification of the repaired map.
    for a in 0..n_el {
        if d2[g[a] as usize] != d1[a] {
            return Err(Error::NotAnIsometry("repair lost measure".into()));
        }
        if g[a ^ full as usize] != g[a] ^ full {
            return Err(Error::NotAnIsometry("repair broke complements".into()));
        }
        for b in 0..n_el {
            if g[a | b] != g[a] | g[b] {
                return Err(Error::NotAnIsometry("repair broke joins".into()));
            }
        }
    }
    Ok(g)
}

/// Finite density defects of a candidate family.
///
/// `symmetric` is `max_a min_{d in cand} mu(a xor d)`; `uniform` is
/// `max_a min_{d in cand, d <= a} mu(a \ d)`, with the inner minimum over an
/// empty set read as `mu(a)`. Both scans are exhaustive over all algebra
/// elements of the truncation.
pub fn density_defects(m: &FiniteMeasure, candidates: &[Clopen]) -> Result<(Rat, Rat)> {
    let n_atoms = 1usize << m.depth;
    if n_atoms > 20 {
        return Err(Error::BudgetExceeded {
            need: 1u128 << n_atoms,
            budget: 1 << 20,
        });
    }
    let masks: Vec<u64> = candidates
        .iter()
        .map(|c| clopen_to_mask(m.depth, c))
        .collect::<Result<_>>()?;
    let mass: Vec<Rat> = (0..1usize << n_atoms)
        .map(|el| mask_measure(m, el as u64))
        .collect();
    let mut sym = Rat::zero();
    let mut uni = Rat::zero();
    for a in 0..(1u64 << n_atoms) {
        let best_sym = masks
            .iter()
            .map(|&d| mass[(a ^ d) as usize].clone())
            .min()
            .unwrap_or_else(|| mass[a as usize].clone());
        let best_uni = masks
            .iter()
            .filter(|&&d| d & !a == 0)
            .map(|&d| mass[(a & !d) as usize].clone())
            .min()
            .unwrap_or_else(|| mass[a as usize].clone());
        sym = sym.max(best_sym);
        uni = uni.max(best_uni);
    }
    Ok((sym, uni))
}
