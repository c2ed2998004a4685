//! Weight-function codings of measures and the tree-automorphism,
//! absolute-continuity and ideal-transfer equivalence relations.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::clopen::Clopen;
use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::path::BitPath;
use crate::rat::{fmt_rat, rat, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Values in the open interval (0, 1); codes a strictly positive measure.
    Strict,
    /// Values in [0, 1]; codes a measure that may vanish on nodes. Zero mass
    /// propagates to the whole subtree under the product formula, which is
    /// the measure-side closure condition of the M space.
    M,
}

/// A function from tree nodes (paths of length `< depth`) to rationals,
/// coding a measure by the product formula: descending by bit 0 at node `s`
/// multiplies the mass by `f(s)`, descending by bit 1 by `1 - f(s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFn {
    depth: usize,
    table: BTreeMap<BitPath, Rat>,
    default: Rat,
    kind: WeightKind,
}

impl WeightFn {
    pub fn new(
        depth: usize,
        table: BTreeMap<BitPath, Rat>,
        default: Rat,
        kind: WeightKind,
    ) -> Result<Self> {
        for (path, value) in table.iter() {
            if path.len() >= depth {
                return Err(Error::Validation(format!(
                    "weight node [{path}] at or beyond depth {depth}"
                )));
            }
            check_weight_value(value, kind)?;
        }
        check_weight_value(&default, kind)?;
        Ok(WeightFn {
            depth,
            table,
            default,
            kind,
        })
    }

    /// The constant-1/2 weight function (fair splitting).
    pub fn lebesgue(depth: usize) -> Self {
        WeightFn {
            depth,
            table: BTreeMap::new(),
            default: rat(1, 2),
            kind: WeightKind::Strict,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn default_value(&self) -> &Rat {
        &self.default
    }

    pub fn table(&self) -> &BTreeMap<BitPath, Rat> {
        &self.table
    }

    /// Weight at a node with `|s| < depth`.
    pub fn value(&self, s: &BitPath) -> &Rat {
        self.table.get(s).unwrap_or(&self.default)
    }

    /// Same table and default, re-rooted at another truncation depth.
    /// Table entries at or beyond the new depth are dropped.
    pub fn with_depth(&self, depth: usize) -> Self {
        let table = self
            .table
            .iter()
            .filter(|(p, _)| p.len() < depth)
            .map(|(p, v)| (p.clone(), v.clone()))
            .collect();
        WeightFn {
            depth,
            table,
            default: self.default.clone(),
            kind: self.kind,
        }
    }

    /// Mass of the node cylinder `[s]` under the product formula.
    pub fn node_mass(&self, s: &BitPath) -> Rat {
        let mut mass = Rat::one();
        for i in 0..s.len() {
            let prefix = s.prefix(i);
            let w = self.value(&prefix);
            if s.bit(i) {
                mass *= Rat::one() - w;
            } else {
                mass *= w.clone();
            }
        }
        mass
    }
}

fn check_weight_value(value: &Rat, kind: WeightKind) -> Result<()> {
    let ok = match kind {
        WeightKind::Strict => value > &Rat::zero() && value < &Rat::one(),
        WeightKind::M => value >= &Rat::zero() && value <= &Rat::one(),
    };
    if !ok {
        let range = match kind {
            WeightKind::Strict => "(0,1)",
            WeightKind::M => "[0,1]",
        };
        return Err(Error::Validation(format!(
            "weight {} outside {range}",
            fmt_rat(value)
        )));
    }
    Ok(())
}

/// Expands a weight function into the depth-D finite measure it codes.
///
/// Atom masses follow the product formula exactly and telescope to total
/// mass one; the result is strictly positive iff the kind is strict.
pub fn measure_from_weights(w: &WeightFn) -> FiniteMeasure {
    let mut masses = vec![Rat::one()];
    for level in 0..w.depth() {
        let mut next = Vec::with_capacity(masses.len() * 2);
        for (idx, mass) in masses.iter().enumerate() {
            let node = BitPath::from_lex_index(level, idx);
            let f = w.value(&node);
            next.push(mass * f);
            next.push(mass * (Rat::one() - f));
        }
        masses = next;
    }
    FiniteMeasure::new(w.depth(), masses).expect("product formula conserves mass")
}

fn check_same_weight_depth(f: &WeightFn, g: &WeightFn) -> Result<()> {
    if f.depth() != g.depth() {
        return Err(Error::DepthMismatch {
            left: f.depth(),
            right: g.depth(),
        });
    }
    Ok(())
}

/// Canonical form of the weighted subtree at `node`: the weight together
/// with the unordered pair of child forms.
fn canon(w: &WeightFn, node: &BitPath) -> String {
    let value = fmt_rat(w.value(node));
    if node.len() + 1 == w.depth() {
        return format!("({value})");
    }
    let mut c0 = canon(w, &node.child(false));
    let mut c1 = canon(w, &node.child(true));
    if c1 < c0 {
        std::mem::swap(&mut c0, &mut c1);
    }
    format!("({value}:{c0}{c1})")
}

/// Tree-automorphism equivalence: is there an automorphism `phi` of the
/// truncated dyadic tree with `f(s) = g(phi(s))` everywhere?
///
/// On success the witness is the sorted set of source nodes at which `phi`
/// swaps the two children; straight matches are preferred when both orders
/// work, so identical inputs yield the empty witness.
pub fn equiv_c(f: &WeightFn, g: &WeightFn) -> Result<Option<Vec<BitPath>>> {
    check_same_weight_depth(f, g)?;
    if f.depth() == 0 {
        return Ok(Some(Vec::new()));
    }
    if canon(f, &BitPath::root()) != canon(g, &BitPath::root()) {
        return Ok(None);
    }
    let mut swaps = Vec::new();
    collect_swaps(f, g, &BitPath::root(), &BitPath::root(), &mut swaps);
    swaps.sort();
    Ok(Some(swaps))
}

fn collect_swaps(f: &WeightFn, g: &WeightFn, u: &BitPath, v: &BitPath, swaps: &mut Vec<BitPath>) {
    if u.len() + 1 >= f.depth() {
        return;
    }
    let a0 = canon(f, &u.child(false));
    let a1 = canon(f, &u.child(true));
    let b0 = canon(g, &v.child(false));
    let b1 = canon(g, &v.child(true));
    if a0 == b0 && a1 == b1 {
        collect_swaps(f, g, &u.child(false), &v.child(false), swaps);
        collect_swaps(f, g, &u.child(true), &v.child(true), swaps);
    } else {
        debug_assert!(a0 == b1 && a1 == b0);
        swaps.push(u.clone());
        collect_swaps(f, g, &u.child(false), &v.child(true), swaps);
        collect_swaps(f, g, &u.child(true), &v.child(false), swaps);
    }
}

/// Exhaustive oracle for `equiv_c`: tries every swap pattern over the
/// meaningful interior nodes. Exponential; test-scale depths only.
pub fn equiv_c_bruteforce(f: &WeightFn, g: &WeightFn) -> Result<bool> {
    check_same_weight_depth(f, g)?;
    let depth = f.depth();
    if depth <= 1 {
        return Ok(depth == 0 || f.value(&BitPath::root()) == g.value(&BitPath::root()));
    }
    // Swap decisions matter at nodes of length <= depth - 2.
    let nodes: Vec<BitPath> = (0..=depth.saturating_sub(2))
        .flat_map(BitPath::level)
        .collect();
    let n = nodes.len();
    'patterns: for pattern in 0u64..(1u64 << n) {
        let swap_at = |s: &BitPath| -> bool {
            nodes
                .iter()
                .position(|m| m == s)
                .map(|i| (pattern >> i) & 1 == 1)
                .unwrap_or(false)
        };
        // phi maps a source node to a target node by rewriting bits top-down.
        for level in 0..depth {
            for s in BitPath::level(level) {
                let mut image = BitPath::root();
                for i in 0..s.len() {
                    let bit = s.bit(i) ^ swap_at(&s.prefix(i));
                    image = image.child(bit);
                }
                if f.value(&s) != g.value(&image) {
                    continue 'patterns;
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// Mutual absolute continuity at truncation: the induced measures vanish on
/// exactly the same tree nodes.
pub fn equiv_m(f: &WeightFn, g: &WeightFn) -> Result<bool> {
    check_same_weight_depth(f, g)?;
    for level in 0..=f.depth() {
        for s in BitPath::level(level) {
            if f.node_mass(&s).is_zero() != g.node_mass(&s).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Transfer equivalence at truncation depth: some atom permutation of `g`'s
/// induced measure has the same null-atom set as `f`'s, which at a fixed
/// finite depth is exactly equality of null-atom counts.
pub fn equiv_z_depth(f: &WeightFn, g: &WeightFn) -> Result<bool> {
    check_same_weight_depth(f, g)?;
    let mf = measure_from_weights(f);
    let mg = measure_from_weights(g);
    Ok(mf.null_atom_count() == mg.null_atom_count())
}

/// A proper ideal on the truncated algebra, given by generating cylinders:
/// a node belongs to the ideal iff its cylinder lies below the join of the
/// generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealSpec {
    depth: usize,
    generators: Vec<BitPath>,
}

impl IdealSpec {
    pub fn new(depth: usize, generators: Vec<BitPath>) -> Result<Self> {
        for g in &generators {
            if g.len() > depth {
                return Err(Error::Validation(format!(
                    "generator [{g}] deeper than depth {depth}"
                )));
            }
        }
        let spec = IdealSpec { depth, generators };
        if spec.join().is_unit() {
            return Err(Error::ImproperIdeal);
        }
        Ok(spec)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn generators(&self) -> &[BitPath] {
        &self.generators
    }

    pub fn join(&self) -> Clopen {
        Clopen::from_paths(self.generators.iter().cloned())
    }

    pub fn contains(&self, node: &BitPath) -> bool {
        self.join().contains_cylinder(node)
    }

    /// Image ideal under the tree automorphism given by a swap set.
    pub fn map_through(&self, swaps: &[BitPath]) -> Result<IdealSpec> {
        let gens = self
            .generators
            .iter()
            .map(|g| apply_automorphism(swaps, g))
            .collect();
        IdealSpec::new(self.depth, gens)
    }
}

/// Applies the automorphism determined by a swap set to one path. Swap
/// decisions are indexed by source nodes, matching the `equiv_c` witness.
pub fn apply_automorphism(swaps: &[BitPath], path: &BitPath) -> BitPath {
    let mut image = BitPath::root();
    for i in 0..path.len() {
        let bit = path.bit(i) ^ swaps.contains(&path.prefix(i));
        image = image.child(bit);
    }
    image
}

/// Encodes a proper ideal as an M-kind weight function.
///
/// Walking the tree from the root: a null node passes zero to both
/// children; when exactly one child belongs to the ideal it gets mass zero
/// and its sibling inherits the full parent mass; otherwise the mass splits
/// fairly.
pub fn encode_ideal(ideal: &IdealSpec) -> Result<WeightFn> {
    let join = ideal.join();
    if join.is_unit() {
        return Err(Error::ImproperIdeal);
    }
    let mut table = BTreeMap::new();
    for level in 0..ideal.depth() {
        for s in BitPath::level(level) {
            let zero_in = join.contains_cylinder(&s.child(false));
            let one_in = join.contains_cylinder(&s.child(true));
            let w = match (zero_in, one_in) {
                (true, true) => Rat::zero(), // node itself is null
                (true, false) => Rat::zero(),
                (false, true) => Rat::one(),
                (false, false) => continue, // fair default
            };
            table.insert(s, w);
        }
    }
    WeightFn::new(ideal.depth(), table, rat(1, 2), WeightKind::M)
}
