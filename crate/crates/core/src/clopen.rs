//! Clopen subsets of Cantor space in canonical antichain form.

use std::fmt;

use crate::error::Result;
use crate::path::BitPath;

/// A clopen set as a finite union of cylinders.
///
/// Canonical form: the cylinder paths are an antichain (no path a prefix of
/// another), never contain both children of a node (siblings are merged to
/// the parent), and are sorted by (length, lex). Equality of canonical forms
/// is equality of sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clopen {
    cylinders: Vec<BitPath>,
}

/// Binary decision tree over cylinder structure; collapsed on construction.
enum CylTree {
    Leaf(bool),
    Split(Box<CylTree>, Box<CylTree>),
}

impl CylTree {
    fn split(zero: CylTree, one: CylTree) -> CylTree {
        if let (CylTree::Leaf(a), CylTree::Leaf(b)) = (&zero, &one) {
            if a == b {
                return CylTree::Leaf(*a);
            }
        }
        CylTree::Split(Box::new(zero), Box::new(one))
    }

    fn from_paths(paths: &[&BitPath], offset: usize) -> CylTree {
        if paths.is_empty() {
            return CylTree::Leaf(false);
        }
        if paths.iter().any(|p| p.len() == offset) {
            return CylTree::Leaf(true);
        }
        let zeros: Vec<&BitPath> = paths.iter().copied().filter(|p| !p.bit(offset)).collect();
        let ones: Vec<&BitPath> = paths.iter().copied().filter(|p| p.bit(offset)).collect();
        CylTree::split(
            CylTree::from_paths(&zeros, offset + 1),
            CylTree::from_paths(&ones, offset + 1),
        )
    }

    fn collect(&self, at: &BitPath, out: &mut Vec<BitPath>) {
        match self {
            CylTree::Leaf(true) => out.push(at.clone()),
            CylTree::Leaf(false) => {}
            CylTree::Split(zero, one) => {
                zero.collect(&at.child(false), out);
                one.collect(&at.child(true), out);
            }
        }
    }

    fn apply(op: fn(bool, bool) -> bool, a: &CylTree, b: &CylTree) -> CylTree {
        match (a, b) {
            (CylTree::Leaf(x), CylTree::Leaf(y)) => CylTree::Leaf(op(*x, *y)),
            _ => {
                let (a0, a1) = a.children();
                let (b0, b1) = b.children();
                CylTree::split(CylTree::apply(op, a0, b0), CylTree::apply(op, a1, b1))
            }
        }
    }

    /// Children view, expanding a leaf into two equal leaves.
    fn children(&self) -> (&CylTree, &CylTree) {
        static TRUE_LEAF: CylTree = CylTree::Leaf(true);
        static FALSE_LEAF: CylTree = CylTree::Leaf(false);
        match self {
            CylTree::Split(zero, one) => (zero, one),
            CylTree::Leaf(true) => (&TRUE_LEAF, &TRUE_LEAF),
            CylTree::Leaf(false) => (&FALSE_LEAF, &FALSE_LEAF),
        }
    }

    fn negate(&self) -> CylTree {
        match self {
            CylTree::Leaf(b) => CylTree::Leaf(!b),
            CylTree::Split(zero, one) => CylTree::split(zero.negate(), one.negate()),
        }
    }
}

impl Clopen {
    pub fn empty() -> Self {
        Clopen { cylinders: Vec::new() }
    }

    pub fn unit() -> Self {
        Clopen {
            cylinders: vec![BitPath::root()],
        }
    }

    pub fn cylinder(path: BitPath) -> Self {
        Clopen { cylinders: vec![path] }
    }

    /// Builds the canonical form of an arbitrary union of cylinders.
    pub fn from_paths<I: IntoIterator<Item = BitPath>>(paths: I) -> Self {
        let owned: Vec<BitPath> = paths.into_iter().collect();
        let refs: Vec<&BitPath> = owned.iter().collect();
        let tree = CylTree::from_paths(&refs, 0);
        Self::from_tree(&tree)
    }

    fn from_tree(tree: &CylTree) -> Self {
        let mut out = Vec::new();
        tree.collect(&BitPath::root(), &mut out);
        out.sort();
        Clopen { cylinders: out }
    }

    fn to_tree(&self) -> CylTree {
        let refs: Vec<&BitPath> = self.cylinders.iter().collect();
        CylTree::from_paths(&refs, 0)
    }

    pub fn cylinders(&self) -> &[BitPath] {
        &self.cylinders
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.cylinders.len() == 1 && self.cylinders[0].is_empty()
    }

    /// Length of the deepest cylinder.
    pub fn max_depth(&self) -> usize {
        self.cylinders.iter().map(|p| p.len()).max().unwrap_or(0)
    }

    pub fn join(&self, other: &Clopen) -> Clopen {
        Clopen::from_tree(&CylTree::apply(|a, b| a | b, &self.to_tree(), &other.to_tree()))
    }

    pub fn meet(&self, other: &Clopen) -> Clopen {
        Clopen::from_tree(&CylTree::apply(|a, b| a & b, &self.to_tree(), &other.to_tree()))
    }

    pub fn complement(&self) -> Clopen {
        Clopen::from_tree(&self.to_tree().negate())
    }

    pub fn symdiff(&self, other: &Clopen) -> Clopen {
        Clopen::from_tree(&CylTree::apply(|a, b| a ^ b, &self.to_tree(), &other.to_tree()))
    }

    pub fn difference(&self, other: &Clopen) -> Clopen {
        Clopen::from_tree(&CylTree::apply(|a, b| a & !b, &self.to_tree(), &other.to_tree()))
    }

    pub fn leq(&self, other: &Clopen) -> bool {
        self.difference(other).is_empty()
    }

    /// Does the set contain the whole cylinder at `path`?
    pub fn contains_cylinder(&self, path: &BitPath) -> bool {
        self.cylinders.iter().any(|c| c.is_prefix_of(path))
    }

    /// Does the set meet the cylinder at `path`?
    pub fn meets_cylinder(&self, path: &BitPath) -> bool {
        self.cylinders
            .iter()
            .any(|c| c.is_prefix_of(path) || path.is_prefix_of(c))
    }
}

/// Boolean operation selector for the CLI surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClopenOp {
    Join,
    Meet,
    Complement,
    Symdiff,
}

/// Dispatches one of the four Boolean operations; `b` is ignored by
/// complement.
pub fn clopen_ops(a: &Clopen, b: &Clopen, op: ClopenOp) -> Result<Clopen> {
    Ok(match op {
        ClopenOp::Join => a.join(b),
        ClopenOp::Meet => a.meet(b),
        ClopenOp::Complement => a.complement(),
        ClopenOp::Symdiff => a.symdiff(b),
    })
}

impl fmt::Display for Clopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cylinders.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.cylinders.iter().map(|p| format!("[{p}]")).collect();
        write!(f, "{}", parts.join("+"))
    }
}
