//! Finite binary paths: nodes of the dyadic generating tree.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Depth limit applied when no override is configured.
pub const DEFAULT_MAX_DEPTH: usize = 16;

/// A finite word over `{0, 1}`; the empty path is the root (unit cylinder).
///
/// Paths order by length first, then lexicographically, which is the
/// canonical enumeration order of the generating tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitPath {
    bits: Vec<bool>,
}

impl BitPath {
    pub fn root() -> Self {
        BitPath { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitPath { bits }
    }

    /// Parses a word of `0`/`1` characters; `-` and `""` denote the root.
    pub fn parse(text: &str) -> Result<Self> {
        if text == "-" || text.is_empty() {
            return Ok(Self::root());
        }
        let mut bits = Vec::with_capacity(text.len());
        for (i, c) in text.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::Validation(format!(
                        "path must be over {{0,1}}: bad character `{c}` at position {}",
                        i + 1
                    )))
                }
            }
        }
        Ok(BitPath { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn child(&self, bit: bool) -> BitPath {
        let mut bits = self.bits.clone();
        bits.push(bit);
        BitPath { bits }
    }

    pub fn parent(&self) -> Option<BitPath> {
        if self.bits.is_empty() {
            return None;
        }
        let mut bits = self.bits.clone();
        bits.pop();
        Some(BitPath { bits })
    }

    pub fn prefix(&self, len: usize) -> BitPath {
        BitPath {
            bits: self.bits[..len].to_vec(),
        }
    }

    pub fn concat(&self, other: &BitPath) -> BitPath {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitPath { bits }
    }

    pub fn is_prefix_of(&self, other: &BitPath) -> bool {
        other.bits.len() >= self.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }

    /// Index of this path among all same-length paths in lexicographic order.
    pub fn lex_index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// The `index`-th path of length `len` in lexicographic order.
    pub fn from_lex_index(len: usize, index: usize) -> BitPath {
        let bits = (0..len)
            .rev()
            .map(|i| (index >> i) & 1 == 1)
            .collect();
        BitPath { bits }
    }

    /// All `2^len` paths of the given length, lexicographically.
    pub fn level(len: usize) -> impl Iterator<Item = BitPath> {
        (0..1usize << len).map(move |i| BitPath::from_lex_index(len, i))
    }

    pub fn check_depth(&self, max_depth: usize) -> Result<()> {
        if self.len() > max_depth {
            return Err(Error::DepthExceeded(format!(
                "path [{self}] has length {} > {max_depth}",
                self.len()
            )));
        }
        Ok(())
    }
}

impl Ord for BitPath {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits
            .len()
            .cmp(&other.bits.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitPath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}
