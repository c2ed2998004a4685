//! Finitely describable infinite measures: geometric cylinder masses along
//! one spine, fair splitting elsewhere, and the eventually periodic
//! selectors used to form countable joins over spine partitions.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::path::BitPath;
use crate::rat::{fmt_rat, rat_pow, Rat};

/// A measure on the whole Cantor algebra, determined by closed-form masses
/// `m_n = mu([spine|n])` along one infinite spine (`head` followed by
/// `period` repeated) with fair splitting at every off-spine node.
///
/// Explicit masses cover `n < explicit.len()`; beyond that
/// `m_n = limit + coef * ratio^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpineMeasure {
    head: BitPath,
    period: BitPath,
    explicit: Vec<Rat>,
    limit: Rat,
    coef: Rat,
    ratio: Rat,
}

impl SpineMeasure {
    pub fn new(
        head: BitPath,
        period: BitPath,
        explicit: Vec<Rat>,
        limit: Rat,
        coef: Rat,
        ratio: Rat,
    ) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Validation("spine period must be nonempty".into()));
        }
        if ratio <= Rat::zero() || ratio >= Rat::one() {
            return Err(Error::Validation(format!(
                "ratio {} not in (0,1)",
                fmt_rat(&ratio)
            )));
        }
        if limit.is_negative() {
            return Err(Error::Validation("tail limit must be >= 0".into()));
        }
        if coef <= Rat::zero() {
            return Err(Error::Validation(
                "tail coefficient must be > 0 (masses strictly decrease)".into(),
            ));
        }
        if &limit + &coef > Rat::one() {
            return Err(Error::Validation("limit + coef exceeds 1".into()));
        }
        let mu = SpineMeasure {
            head,
            period,
            explicit,
            limit,
            coef,
            ratio,
        };
        if mu.spine_cyl(0) != Rat::one() {
            return Err(Error::Validation(format!(
                "m_0 = {}, expected 1",
                fmt_rat(&mu.spine_cyl(0))
            )));
        }
        // Strict decrease across the explicit region and the junction; the
        // closed-form tail decreases because coef > 0 and ratio < 1.
        for n in 0..=mu.explicit.len() {
            let cur = mu.spine_cyl(n);
            let next = mu.spine_cyl(n + 1);
            if next <= Rat::zero() || next >= cur {
                return Err(Error::Validation(format!(
                    "spine masses must strictly decrease: m_{n} = {}, m_{} = {}",
                    fmt_rat(&cur),
                    n + 1,
                    fmt_rat(&next)
                )));
            }
        }
        Ok(mu)
    }

    /// The Lebesgue measure presented as a spine measure along `0^omega`.
    pub fn lebesgue() -> Self {
        SpineMeasure::new(
            BitPath::root(),
            BitPath::parse("0").unwrap(),
            Vec::new(),
            Rat::zero(),
            Rat::one(),
            crate::rat::rat(1, 2),
        )
        .unwrap()
    }

    /// The non-good example: piece masses `2^-(n+2)`, masses
    /// `m_n = 1/2 + 2^-(n+1)`.
    pub fn nu_example() -> Self {
        SpineMeasure::new(
            BitPath::root(),
            BitPath::parse("0").unwrap(),
            Vec::new(),
            crate::rat::rat(1, 2),
            crate::rat::rat(1, 2),
            crate::rat::rat(1, 2),
        )
        .unwrap()
    }

    pub fn head(&self) -> &BitPath {
        &self.head
    }

    pub fn period(&self) -> &BitPath {
        &self.period
    }

    pub fn explicit(&self) -> &[Rat] {
        &self.explicit
    }

    pub fn tail(&self) -> (&Rat, &Rat, &Rat, usize) {
        (&self.limit, &self.coef, &self.ratio, self.explicit.len())
    }

    /// The limit of the spine masses; zero exactly for good spines.
    pub fn tail_limit(&self) -> &Rat {
        &self.limit
    }

    pub fn spine_bit(&self, n: usize) -> bool {
        if n < self.head.len() {
            self.head.bit(n)
        } else {
            self.period.bit((n - self.head.len()) % self.period.len())
        }
    }

    pub fn spine_prefix(&self, n: usize) -> BitPath {
        BitPath::from_bits((0..n).map(|i| self.spine_bit(i)).collect())
    }

    /// Is `path` an initial segment of the spine?
    pub fn on_spine(&self, path: &BitPath) -> bool {
        (0..path.len()).all(|i| path.bit(i) == self.spine_bit(i))
    }

    /// `m_n`: the mass of the spine cylinder of length `n`.
    pub fn spine_cyl(&self, n: usize) -> Rat {
        if n < self.explicit.len() {
            self.explicit[n].clone()
        } else {
            &self.limit + &self.coef * rat_pow(&self.ratio, n)
        }
    }

    /// Mass of the `n`-th spine-partition piece, `m_n - m_{n+1}`.
    pub fn piece_measure(&self, n: usize) -> Rat {
        self.spine_cyl(n) - self.spine_cyl(n + 1)
    }

    /// The `n`-th spine-partition piece: the off-spine child of the length-n
    /// spine cylinder.
    pub fn piece_cylinder(&self, n: usize) -> BitPath {
        self.spine_prefix(n).child(!self.spine_bit(n))
    }

    /// Exact mass of an arbitrary cylinder.
    pub fn cylinder_mass(&self, path: &BitPath) -> Rat {
        if self.on_spine(path) {
            return self.spine_cyl(path.len());
        }
        // Follow the spine to the departure point.
        let mut k = 0;
        while path.bit(k) == self.spine_bit(k) {
            k += 1;
        }
        // The cylinder sits inside piece k; splitting is fair below it.
        let fair_steps = path.len() - k - 1;
        self.piece_measure(k) * crate::rat::dyadic(fair_steps)
    }

    /// Truncation to a finite measured algebra at `depth`.
    pub fn truncate(&self, depth: usize) -> crate::measure::FiniteMeasure {
        let atoms = BitPath::level(depth).map(|p| self.cylinder_mass(&p)).collect();
        crate::measure::FiniteMeasure::new(depth, atoms).expect("spine masses are additive")
    }
}

/// The canonical partition of unity into the spine pieces of a measure.
#[derive(Debug, Clone)]
pub struct SpinePartition {
    measure: SpineMeasure,
}

impl SpinePartition {
    pub fn of(measure: &SpineMeasure) -> Self {
        SpinePartition {
            measure: measure.clone(),
        }
    }

    pub fn piece(&self, n: usize) -> BitPath {
        self.measure.piece_cylinder(n)
    }

    pub fn piece_measure(&self, n: usize) -> Rat {
        self.measure.piece_measure(n)
    }
}

/// Total mass of the spine partition, `sum_n mu(a_n) = 1 - limit` in closed
/// form; the partition is good exactly when the total is 1.
pub fn partition_total(mu: &SpineMeasure, _p: &SpinePartition) -> (Rat, bool) {
    let total = Rat::one() - mu.tail_limit();
    let good = mu.tail_limit().is_zero();
    (total, good)
}

/// An eventually periodic subset of the naturals: `prefix` bits for
/// `n < prefix.len()`, then `period` applied cyclically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Selector {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

/// Classification of a normalized selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorClass {
    Finite,
    Cofinite,
    Mixed,
}

impl Selector {
    pub fn new(prefix: Vec<bool>, period: Vec<bool>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Validation("selector period must be nonempty".into()));
        }
        let mut s = Selector { prefix, period };
        s.normalize();
        Ok(s)
    }

    pub fn all() -> Self {
        Selector {
            prefix: Vec::new(),
            period: vec![true],
        }
    }

    pub fn none() -> Self {
        Selector {
            prefix: Vec::new(),
            period: vec![false],
        }
    }

    /// The set `{n : bits[n]}` for `n < bits.len()`, empty beyond.
    pub fn finite(bits: Vec<bool>) -> Self {
        Selector::new(bits, vec![false]).expect("period nonempty")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.strip_prefix("sel ").unwrap_or(text).trim();
        let (pre, per) = text.split_once(':').ok_or_else(|| {
            Error::Validation(format!("selector `{text}` must be <prefix>:<period>"))
        })?;
        let parse_bits = |part: &str| -> Result<Vec<bool>> {
            if part == "-" || part.is_empty() {
                return Ok(Vec::new());
            }
            part.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::Validation(format!(
                        "selector bits must be 0/1, got `{c}`"
                    ))),
                })
                .collect()
        };
        Selector::new(parse_bits(pre)?, parse_bits(per)?)
    }

    fn normalize(&mut self) {
        // Primitive period.
        'outer: for d in 1..self.period.len() {
            if !self.period.len().is_multiple_of(d) {
                continue;
            }
            for i in d..self.period.len() {
                if self.period[i] != self.period[i % d] {
                    continue 'outer;
                }
            }
            self.period.truncate(d);
            break;
        }
        // Shortest prefix: absorb trailing prefix bits into the rotation.
        while let Some(&last) = self.prefix.last() {
            if last == *self.period.last().unwrap() {
                self.prefix.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
    }

    pub fn contains(&self, n: usize) -> bool {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.period[(n - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn classify(&self) -> SelectorClass {
        let ones = self.period.iter().filter(|&&b| b).count();
        if ones == 0 {
            SelectorClass::Finite
        } else if ones == self.period.len() {
            SelectorClass::Cofinite
        } else {
            SelectorClass::Mixed
        }
    }

    pub fn complement(&self) -> Selector {
        let mut s = Selector {
            prefix: self.prefix.iter().map(|b| !b).collect(),
            period: self.period.iter().map(|b| !b).collect(),
        };
        s.normalize();
        s
    }

    /// Drops the first `k` indices: `shift(k).contains(n) = contains(n+k)`.
    pub fn shift(&self, k: usize) -> Selector {
        let mut s = if k <= self.prefix.len() {
            Selector {
                prefix: self.prefix[k..].to_vec(),
                period: self.period.clone(),
            }
        } else {
            let r = (k - self.prefix.len()) % self.period.len();
            let mut period = self.period.clone();
            period.rotate_left(r);
            Selector {
                prefix: Vec::new(),
                period,
            }
        };
        s.normalize();
        s
    }

    /// Re-indexes by `k`: `prepend_zeros(k).contains(n + k) = contains(n)`,
    /// with the first `k` indices unselected.
    pub fn prepend_zeros(&self, k: usize) -> Selector {
        let mut prefix = vec![false; k];
        prefix.extend_from_slice(&self.prefix);
        let mut s = Selector {
            prefix,
            period: self.period.clone(),
        };
        s.normalize();
        s
    }

    /// Forces all indices below `k` out of the set.
    pub fn clear_below(&self, k: usize) -> Selector {
        self.shift(k).prepend_zeros(k)
    }

    /// Pointwise conjunction, exact on the common eventual period.
    pub fn and(&self, other: &Selector) -> Selector {
        let pre = self.prefix.len().max(other.prefix.len());
        let lcm = num_integer::lcm(self.period.len(), other.period.len());
        let prefix = (0..pre).map(|n| self.contains(n) && other.contains(n)).collect();
        let period = (pre..pre + lcm)
            .map(|n| self.contains(n) && other.contains(n))
            .collect();
        let mut s = Selector { prefix, period };
        s.normalize();
        s
    }

    pub fn is_empty(&self) -> bool {
        self.classify() == SelectorClass::Finite && self.prefix.iter().all(|&b| !b)
    }

    /// Selected indices among `0..limit`.
    pub fn indices_below(&self, limit: usize) -> Vec<usize> {
        (0..limit).filter(|&n| self.contains(n)).collect()
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prefix.is_empty() {
            write!(f, "-:")?;
        } else {
            for &b in &self.prefix {
                write!(f, "{}", b as u8)?;
            }
            write!(f, ":")?;
        }
        for &b in &self.period {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

/// Exact sum of `sum_{n in sel} weights(n)` where `weights(n)` is given in
/// closed geometric form `c * r^n` for `n >= start`, with arbitrary exact
/// values before `start` supplied by `head_weight`.
fn selector_geometric_sum(
    sel: &Selector,
    start: usize,
    c: &Rat,
    r: &Rat,
    head_weight: impl Fn(usize) -> Rat,
) -> Rat {
    let pre = sel.prefix().len().max(start);
    let mut total = Rat::zero();
    for n in 0..pre {
        if sel.contains(n) {
            total += if n >= start {
                c * rat_pow(r, n)
            } else {
                head_weight(n)
            };
        }
    }
    // Beyond `pre` the selector is purely periodic and the weights purely
    // geometric: sum residue classes in closed form.
    let q = sel.period().len();
    let geo = Rat::one() - rat_pow(r, q);
    for j in 0..q {
        if sel.contains(pre + j) {
            total += c * rat_pow(r, pre + j) / &geo;
        }
    }
    total
}

/// Exact sum of the selected spine-piece masses `sum_{n in sel} mu(a_n)`.
pub fn selected_piece_sum(mu: &SpineMeasure, sel: &Selector) -> Rat {
    let start = mu.explicit().len();
    // For n >= start: piece(n) = coef * (1 - ratio) * ratio^n.
    let c = mu.tail().1 * (Rat::one() - mu.tail().2);
    let r = mu.tail().2.clone();
    selector_geometric_sum(sel, start, &c, &r, |n| mu.piece_measure(n))
}

/// Exact sum `sum_{n in sel} total * 2^-(n+1)` of fair-partition pieces.
pub fn selected_fair_sum(total: &Rat, sel: &Selector) -> Rat {
    let c = total / crate::rat::rat(2, 1);
    let r = crate::rat::rat(1, 2);
    selector_geometric_sum(sel, 0, &c, &r, |_| unreachable!())
}

/// Inner and outer measure of the selector join over the spine partition,
/// plus Jordan membership (`inner == outer`).
///
/// Finite and cofinite selectors collapse to clopen elements, where inner
/// and outer agree with the clopen mass; otherwise the inner measure is the
/// selected piece series and the outer measure is one minus the complement
/// series.
pub fn inner_outer(mu: &SpineMeasure, p: &SpinePartition, sel: &Selector) -> (Rat, Rat, bool) {
    let _ = p;
    match sel.classify() {
        SelectorClass::Finite => {
            let v: Rat = sel
                .indices_below(sel.prefix().len())
                .iter()
                .map(|&n| mu.piece_measure(n))
                .sum();
            (v.clone(), v, true)
        }
        SelectorClass::Cofinite => {
            // Complement of the omitted finite piece join: a clopen element
            // whose mass includes the spine tail.
            let comp = sel.complement();
            let omitted: Rat = comp
                .indices_below(comp.prefix().len())
                .iter()
                .map(|&n| mu.piece_measure(n))
                .sum();
            let v = Rat::one() - omitted;
            (v.clone(), v, true)
        }
        SelectorClass::Mixed => {
            let inner = selected_piece_sum(mu, sel);
            let outer = Rat::one() - selected_piece_sum(mu, &sel.complement());
            let member = inner == outer;
            (inner, outer, member)
        }
    }
}
