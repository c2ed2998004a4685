//! Rooted unordered trees with AHU canonical forms, and the coding of
//! weight functions into finitely branching trees.

use std::fmt;

use crate::error::{Error, Result};
use crate::path::BitPath;
use crate::rat::{binary_expansion, Rat};
use crate::weights::WeightFn;

/// A rooted tree of unlabeled nodes.
#[derive(Debug, Clone, Default)]
pub struct Tree {
    children: Vec<Tree>,
}

impl Tree {
    pub fn leaf() -> Tree {
        Tree { children: Vec::new() }
    }

    pub fn node(children: Vec<Tree>) -> Tree {
        Tree { children }
    }

    pub fn push(&mut self, child: Tree) {
        self.children.push(child);
    }

    /// AHU canonical string: children's canonical strings sorted and
    /// concatenated inside one pair of parentheses. Equal strings
    /// characterize isomorphism of rooted unordered trees.
    pub fn ahu(&self) -> String {
        let mut parts: Vec<String> = self.children.iter().map(Tree::ahu).collect();
        parts.sort();
        format!("({})", parts.concat())
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }
}

/// A tree in canonical form; two codes are equal iff the trees are
/// isomorphic as rooted unordered trees.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeCode {
    canonical: String,
}

impl TreeCode {
    pub fn of(tree: &Tree) -> TreeCode {
        TreeCode {
            canonical: tree.ahu(),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.canonical
    }
}

impl fmt::Display for TreeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

/// Codes a weight function into a finitely branching tree.
///
/// The base tree is the dyadic tree down to the truncation depth. Every
/// base node carries a tag gadget of three leaves, which keeps base nodes
/// recognizable after truncation (a spine vertex never has three leaf
/// children); every weighted base node additionally carries a spine of
/// `real_bits` vertices with a terminal leaf on vertex `m` iff bit `m` of
/// the binary expansion of its weight is 1. Deepest-level base nodes carry
/// no weight, hence only the tag gadget.
pub fn psi_encode(w: &WeightFn, real_bits: usize) -> Result<TreeCode> {
    if real_bits == 0 {
        return Err(Error::Validation("real_bits must be at least 1".into()));
    }
    let root = build_base(w, &BitPath::root(), real_bits)?;
    Ok(TreeCode::of(&root))
}

fn tag_gadget() -> [Tree; 3] {
    [Tree::leaf(), Tree::leaf(), Tree::leaf()]
}

fn build_base(w: &WeightFn, node: &BitPath, real_bits: usize) -> Result<Tree> {
    let mut t = Tree::default();
    for leaf in tag_gadget() {
        t.push(leaf);
    }
    if node.len() < w.depth() {
        t.push(value_spine(w.value(node), real_bits)?);
        t.push(build_base(w, &node.child(false), real_bits)?);
        t.push(build_base(w, &node.child(true), real_bits)?);
    }
    Ok(t)
}

/// A chain of `real_bits` vertices; vertex `m` (1-based) carries a terminal
/// leaf iff the `m`-th expansion bit of `value` is 1.
fn value_spine(value: &Rat, real_bits: usize) -> Result<Tree> {
    let (prefix, period) = binary_expansion(value)?;
    let bit = |m: usize| -> bool {
        if m < prefix.len() {
            prefix[m]
        } else if period.is_empty() {
            false
        } else {
            period[(m - prefix.len()) % period.len()]
        }
    };
    let mut below: Option<Tree> = None;
    for m in (1..=real_bits).rev() {
        let mut vertex = Tree::default();
        if let Some(next) = below.take() {
            vertex.push(next);
        }
        if bit(m - 1) {
            vertex.push(Tree::leaf());
        }
        below = Some(vertex);
    }
    Ok(below.expect("real_bits >= 1"))
}
