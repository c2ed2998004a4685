//! Deterministic generators for randomized test corpora.
//!
//! Tests that sweep "random" instances derive them from a seeded generator
//! so every run sees the same corpus.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::clopen::Clopen;
use crate::measure::FiniteMeasure;
use crate::path::BitPath;
use crate::rat::{rat, Rat};
use crate::spine::{Selector, SpineMeasure};
use crate::weights::{IdealSpec, WeightFn, WeightKind};

/// SplitMix64; enough quality for test corpora, fully deterministic.
pub struct Gen(u64);

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// A rational strictly inside (0, 1) with denominator at most `max_den`.
    pub fn unit_rat(&mut self, max_den: u64) -> Rat {
        let den = 2 + self.below(max_den.saturating_sub(1).max(1));
        let num = 1 + self.below(den - 1);
        rat(num as i64, den as i64)
    }

    pub fn bits(&mut self, len: usize) -> Vec<bool> {
        (0..len).map(|_| self.bool()).collect()
    }

    pub fn path(&mut self, len: usize) -> BitPath {
        BitPath::from_bits(self.bits(len))
    }

    /// A strict weight function with about half the nodes tabulated.
    pub fn weight_fn(&mut self, depth: usize, max_den: u64) -> WeightFn {
        let mut table = BTreeMap::new();
        for level in 0..depth {
            for node in BitPath::level(level) {
                if self.bool() {
                    table.insert(node, self.unit_rat(max_den));
                }
            }
        }
        let default = self.unit_rat(max_den);
        WeightFn::new(depth, table, default, WeightKind::Strict).expect("values in (0,1)")
    }

    /// A weight function with all values dyadic over `2^bits`, so that any
    /// two distinct values differ within `bits` expansion bits.
    pub fn dyadic_weight_fn(&mut self, depth: usize, bits: usize) -> WeightFn {
        let den = 1u64 << bits;
        let mut table = BTreeMap::new();
        for level in 0..depth {
            for node in BitPath::level(level) {
                let num = 1 + self.below(den - 1);
                table.insert(node, rat(num as i64, den as i64));
            }
        }
        let num = 1 + self.below(den - 1);
        WeightFn::new(depth, table, rat(num as i64, den as i64), WeightKind::Strict)
            .expect("values in (0,1)")
    }

    /// A nonempty clopen set of depth at most `depth`.
    pub fn clopen(&mut self, depth: usize) -> Clopen {
        loop {
            let mut paths = Vec::new();
            for i in 0..1usize << depth {
                if self.bool() {
                    paths.push(BitPath::from_lex_index(depth, i));
                }
            }
            let c = Clopen::from_paths(paths);
            if !c.is_empty() {
                return c;
            }
        }
    }

    /// A strictly positive finite measure from integer weights.
    pub fn finite_measure(&mut self, depth: usize) -> FiniteMeasure {
        let n = 1usize << depth;
        let weights: Vec<u64> = (0..n).map(|_| 1 + self.below(64)).collect();
        let total: u64 = weights.iter().sum();
        let atoms = weights
            .iter()
            .map(|&w| rat(w as i64, total as i64))
            .collect();
        FiniteMeasure::new(depth, atoms).expect("normalized weights")
    }

    /// An eventually periodic selector with the given shape bounds.
    pub fn selector(&mut self, max_prefix: usize, max_period: usize) -> Selector {
        let prefix_len = self.below(max_prefix as u64 + 1) as usize;
        let prefix = self.bits(prefix_len);
        let period_len = 1 + self.below(max_period as u64) as usize;
        let period = self.bits(period_len);
        Selector::new(prefix, period).expect("period nonempty")
    }

    /// A good spine measure (tail limit zero) with a short random spine.
    pub fn good_spine(&mut self, max_den: u64) -> SpineMeasure {
        let head_len = self.below(3) as usize;
        let head = self.path(head_len);
        let period_len = 1 + self.below(2) as usize;
        let period = self.path(period_len);
        // ratio in (0,1); coefficient 1 keeps m_0 = 1 with no explicit part.
        let ratio = self.unit_rat(max_den);
        SpineMeasure::new(head, period, Vec::new(), Rat::zero(), rat(1, 1), ratio)
            .expect("good geometric spine")
    }

    /// A proper ideal with a few random generators.
    pub fn ideal(&mut self, depth: usize) -> IdealSpec {
        loop {
            let count = self.below(3) as usize + 1;
            let gens: Vec<BitPath> = (0..count)
                .map(|_| {
                    let len = 1 + self.below(depth as u64) as usize;
                    self.path(len)
                })
                .collect();
            if let Ok(spec) = IdealSpec::new(depth, gens) {
                return spec;
            }
        }
    }

    /// A random swap set over interior nodes of the depth-`depth` tree.
    pub fn swap_set(&mut self, depth: usize) -> Vec<BitPath> {
        let mut swaps = Vec::new();
        for level in 0..depth.saturating_sub(1) {
            for node in BitPath::level(level) {
                if self.bool() {
                    swaps.push(node);
                }
            }
        }
        swaps
    }
}
