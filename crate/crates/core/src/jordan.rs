//! Jordan-extension machinery over spine measures: block-represented
//! Jordan elements, the exact carve construction, the stage-wise
//! isomorphism table, and small partitions.

use std::fmt;

use num_traits::{One, Zero};

use crate::clopen::Clopen;
use crate::error::{Error, Result};
use crate::interval::RatInterval;
use crate::path::BitPath;
use crate::rat::{binary_expansion, dyadic, fmt_rat, Rat};
use crate::spine::{selected_fair_sum, selected_piece_sum, Selector, SelectorClass, SpineMeasure};

/// One block of a Jordan element: an eventually periodic selection of
/// pieces of the canonical good partition inside a cylinder.
///
/// The canonical partition of an on-spine cylinder consists of the ambient
/// spine pieces below it; inside any other cylinder it descends the all-0
/// path, emitting the 1-side at each step. A selector that is all ones
/// denotes the whole (clopen) cylinder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    cylinder: BitPath,
    selector: Selector,
}

impl Block {
    pub fn new(cylinder: BitPath, selector: Selector) -> Self {
        Block { cylinder, selector }
    }

    pub fn clopen(cylinder: BitPath) -> Self {
        Block {
            cylinder,
            selector: Selector::all(),
        }
    }

    pub fn cylinder(&self) -> &BitPath {
        &self.cylinder
    }

    pub fn selector(&self) -> &Selector {
        &self.selector
    }
}

/// Local view of the canonical partition inside a cylinder.
struct Pieces<'a> {
    mu: &'a SpineMeasure,
    base: BitPath,
    on_spine: bool,
}

impl<'a> Pieces<'a> {
    fn of(mu: &'a SpineMeasure, base: &BitPath) -> Pieces<'a> {
        Pieces {
            mu,
            base: base.clone(),
            on_spine: mu.on_spine(base),
        }
    }

    /// Cylinder of the n-th piece.
    fn piece_path(&self, n: usize) -> BitPath {
        if self.on_spine {
            self.mu.piece_cylinder(self.base.len() + n)
        } else {
            let mut p = self.base.clone();
            for _ in 0..n {
                p = p.child(false);
            }
            p.child(true)
        }
    }

    fn piece_mass(&self, n: usize) -> Rat {
        if self.on_spine {
            self.mu.piece_measure(self.base.len() + n)
        } else {
            self.mu.cylinder_mass(&self.base) * dyadic(n + 1)
        }
    }

    /// The cylinder left after the first `n` pieces are removed.
    fn residual_path(&self, n: usize) -> BitPath {
        if self.on_spine {
            self.mu.spine_prefix(self.base.len() + n)
        } else {
            let mut p = self.base.clone();
            for _ in 0..n {
                p = p.child(false);
            }
            p
        }
    }

    /// Total mass of the selected pieces (exact closed form).
    fn selected_sum(&self, selector: &Selector) -> Rat {
        if self.on_spine {
            let absolute = selector.prepend_zeros(self.base.len());
            selected_piece_sum(self.mu, &absolute)
        } else {
            selected_fair_sum(&self.mu.cylinder_mass(&self.base), selector)
        }
    }

    /// Charge that no piece series can reach: positive only below on-spine
    /// cylinders of a non-good measure.
    fn charge(&self) -> Rat {
        if self.on_spine {
            self.mu.tail_limit().clone()
        } else {
            Rat::zero()
        }
    }
}

/// Exact mass of a block. Cofinite selectors (including all-ones) denote
/// clopen values, whose mass includes any spine charge; mixed selectors
/// denote genuine series.
pub fn block_measure(mu: &SpineMeasure, block: &Block) -> Rat {
    let pieces = Pieces::of(mu, &block.cylinder);
    match block.selector.classify() {
        SelectorClass::Finite => block
            .selector
            .indices_below(block.selector.prefix().len())
            .into_iter()
            .map(|n| pieces.piece_mass(n))
            .sum(),
        SelectorClass::Cofinite => {
            let comp = block.selector.complement();
            let omitted: Rat = comp
                .indices_below(comp.prefix().len())
                .into_iter()
                .map(|n| pieces.piece_mass(n))
                .sum();
            mu.cylinder_mass(&block.cylinder) - omitted
        }
        SelectorClass::Mixed => pieces.selected_sum(&block.selector),
    }
}

/// Certified enclosure of a block's mass from partial sums: the first
/// `terms` pieces summed exactly, plus the residual cylinder as an upper
/// tail bound.
pub fn block_measure_interval(mu: &SpineMeasure, block: &Block, terms: usize) -> RatInterval {
    let pieces = Pieces::of(mu, &block.cylinder);
    if block.selector.classify() == SelectorClass::Cofinite {
        return RatInterval::point(block_measure(mu, block));
    }
    let mut partial = Rat::zero();
    for n in 0..terms {
        if block.selector.contains(n) {
            partial += pieces.piece_mass(n);
        }
    }
    let tail_bound = mu.cylinder_mass(&pieces.residual_path(terms)) - pieces.charge();
    RatInterval::new(partial.clone(), partial + tail_bound).expect("tail bound is nonnegative")
}

/// A finite union of blocks with an exact closed-form measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JordanElement {
    blocks: Vec<Block>,
    measure: Rat,
}

impl JordanElement {
    /// Normalizes, validates and measures a block list.
    ///
    /// Finite and cofinite selectors collapse eagerly to clopen blocks; a
    /// mixed selector over an on-spine cylinder requires the ambient spine
    /// partition to be good (zero tail limit), since otherwise the join is
    /// not a Jordan element.
    pub fn new(mu: &SpineMeasure, blocks: Vec<Block>) -> Result<Self> {
        let mut normal: Vec<Block> = Vec::new();
        for b in blocks {
            normalize_block(mu, b, &mut normal)?;
        }
        normal.sort_by(|x, y| x.cylinder.cmp(&y.cylinder));
        for i in 0..normal.len() {
            for j in i + 1..normal.len() {
                if block_meet(mu, &normal[i], &normal[j]).is_some() {
                    return Err(Error::Validation(format!(
                        "blocks overlap: [{}] and [{}]",
                        normal[i].cylinder, normal[j].cylinder
                    )));
                }
            }
        }
        let measure = normal.iter().map(|b| block_measure(mu, b)).sum();
        Ok(JordanElement {
            blocks: normal,
            measure,
        })
    }

    pub fn unit(mu: &SpineMeasure) -> Self {
        JordanElement::new(mu, vec![Block::clopen(BitPath::root())]).expect("unit is valid")
    }

    pub fn empty() -> Self {
        JordanElement {
            blocks: Vec::new(),
            measure: Rat::zero(),
        }
    }

    pub fn from_clopen(mu: &SpineMeasure, c: &Clopen) -> Self {
        JordanElement::new(mu, c.cylinders().iter().cloned().map(Block::clopen).collect())
            .expect("antichain cylinders are disjoint")
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn measure(&self) -> &Rat {
        &self.measure
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

fn normalize_block(mu: &SpineMeasure, b: Block, out: &mut Vec<Block>) -> Result<()> {
    let pieces = Pieces::of(mu, &b.cylinder);
    match b.selector.classify() {
        SelectorClass::Finite => {
            for n in b.selector.indices_below(b.selector.prefix().len()) {
                out.push(Block::clopen(pieces.piece_path(n)));
            }
        }
        SelectorClass::Cofinite => {
            let comp = b.selector.complement();
            let omitted = comp.indices_below(comp.prefix().len());
            match omitted.last() {
                None => out.push(Block::clopen(b.cylinder)),
                Some(&max_omitted) => {
                    for n in 0..=max_omitted {
                        if !omitted.contains(&n) {
                            out.push(Block::clopen(pieces.piece_path(n)));
                        }
                    }
                    out.push(Block::clopen(pieces.residual_path(max_omitted + 1)));
                }
            }
        }
        SelectorClass::Mixed => {
            if pieces.on_spine && !mu.tail_limit().is_zero() {
                return Err(Error::Validation(format!(
                    "mixed selector over the non-good spine partition at [{}]",
                    b.cylinder
                )));
            }
            out.push(b);
        }
    }
    Ok(())
}

/// Intersection of two blocks, `None` when disjoint.
fn block_meet(mu: &SpineMeasure, b1: &Block, b2: &Block) -> Option<Block> {
    if b1.cylinder == b2.cylinder {
        let sel = b1.selector.and(&b2.selector);
        return nonempty(Block::new(b1.cylinder.clone(), sel));
    }
    let (outer, inner) = if b1.cylinder.is_prefix_of(&b2.cylinder) {
        (b1, b2)
    } else if b2.cylinder.is_prefix_of(&b1.cylinder) {
        (b2, b1)
    } else {
        return None;
    };
    let pieces = Pieces::of(mu, &outer.cylinder);
    // Walk the inner cylinder along the outer canonical partition: it either
    // stays on the residual path (piece index grows) or enters a piece.
    let extra = inner.cylinder.len() - outer.cylinder.len();
    for step in 0..extra {
        let expected = pieces.residual_path(step + 1);
        let actual = inner.cylinder.prefix(outer.cylinder.len() + step + 1);
        if actual != expected {
            // Entered piece `step` of the outer partition.
            debug_assert!(pieces.piece_path(step).is_prefix_of(&inner.cylinder));
            return if outer.selector.contains(step) {
                nonempty(inner.clone())
            } else {
                None
            };
        }
    }
    // Inner cylinder is a residual of the outer partition: restrict the
    // outer selector to the surviving pieces.
    let sel = outer.selector.shift(extra).and(&inner.selector);
    nonempty(Block::new(inner.cylinder.clone(), sel))
}

fn nonempty(b: Block) -> Option<Block> {
    if b.selector.is_empty() {
        None
    } else {
        Some(b)
    }
}

/// Meet of two Jordan elements (blockwise).
pub fn jordan_meet(mu: &SpineMeasure, x: &JordanElement, y: &JordanElement) -> JordanElement {
    let mut blocks = Vec::new();
    for b1 in x.blocks() {
        for b2 in y.blocks() {
            if let Some(b) = block_meet(mu, b1, b2) {
                blocks.push(b);
            }
        }
    }
    JordanElement::new(mu, blocks).expect("meets of disjoint families stay disjoint")
}

/// Meet with a clopen set.
pub fn meet_clopen(mu: &SpineMeasure, x: &JordanElement, c: &Clopen) -> JordanElement {
    jordan_meet(mu, x, &JordanElement::from_clopen(mu, c))
}

/// Difference `x \ c` for clopen `c`.
pub fn diff_clopen(mu: &SpineMeasure, x: &JordanElement, c: &Clopen) -> JordanElement {
    meet_clopen(mu, x, &c.complement())
}

/// Union of disjoint Jordan elements.
pub fn jordan_join(mu: &SpineMeasure, x: &JordanElement, y: &JordanElement) -> JordanElement {
    let blocks = x.blocks().iter().chain(y.blocks()).cloned().collect();
    JordanElement::new(mu, blocks).expect("join of disjoint elements")
}

/// Is `x` below the clopen set `d`? Sound for block forms because all
/// pieces carry positive mass.
pub fn jordan_below_clopen(mu: &SpineMeasure, x: &JordanElement, d: &Clopen) -> bool {
    meet_clopen(mu, x, d).measure() == x.measure()
}

/// Carves an exact sub-element of measure `eps` out of a cylinder,
/// returning the carved part and the exact remainder within the cylinder.
///
/// Within a fair cylinder the carve is a single selector block given by the
/// binary expansion of `eps / mass`; the same holds along a good spine with
/// ratio 1/2. Otherwise spine pieces are consumed greedily with the residue
/// carved inside one fair piece; for non-good spines an on-spine clopen is
/// taken first when the request exceeds the tail charge, and requests
/// falling inside the unreachable charge gap report `NotRepresentable`.
pub fn carve_cylinder(
    mu: &SpineMeasure,
    cyl: &BitPath,
    eps: &Rat,
) -> Result<(Vec<Block>, Vec<Block>)> {
    let total = mu.cylinder_mass(cyl);
    if eps <= &Rat::zero() || eps >= &total {
        return Err(Error::OutOfRange(format!(
            "carve measure {} not inside (0, {})",
            fmt_rat(eps),
            fmt_rat(&total)
        )));
    }
    let on_spine = mu.on_spine(cyl);
    let dyadic_pieces = !on_spine
        || (mu.tail_limit().is_zero()
            && *mu.tail().2 == crate::rat::rat(1, 2)
            && mu.explicit().is_empty());
    if dyadic_pieces {
        // Selector carve: piece n has mass total * 2^-(n+1).
        let (prefix, period) = binary_expansion(&(eps / &total))?;
        let sel = Selector::new(prefix, if period.is_empty() { vec![false] } else { period })?;
        let rest = sel.complement();
        return Ok((
            vec![Block::new(cyl.clone(), sel)],
            vec![Block::new(cyl.clone(), rest)],
        ));
    }
    let charge = mu.tail_limit().clone();
    let fair_total = &total - &charge;
    if !charge.is_zero() && eps >= &fair_total && eps <= &charge {
        return Err(Error::NotRepresentable(format!(
            "{} lies in the charge gap [{}, {}] below [{}]",
            fmt_rat(eps),
            fmt_rat(&fair_total),
            fmt_rat(&charge),
            cyl
        )));
    }
    let k = cyl.len();
    let mut taken: Vec<Block> = Vec::new();
    let mut rest: Vec<Block> = Vec::new();
    let mut remaining = eps.clone();
    if !charge.is_zero() && eps > &charge {
        // Take a whole deep spine cylinder first, then fill from the fair
        // pieces above it.
        let mut deep = k + 1;
        while mu.spine_cyl(deep) > *eps {
            deep += 1;
        }
        taken.push(Block::clopen(mu.spine_prefix(deep)));
        remaining = eps - mu.spine_cyl(deep);
        for j in k..deep {
            consume_piece(mu, j, &mut remaining, &mut taken, &mut rest)?;
        }
        debug_assert!(remaining.is_zero());
        return Ok((taken, rest));
    }
    // Greedy along the spine; terminates because the remainder stays below
    // the current spine mass, whose fair content eventually drops under it.
    let mut n = k;
    loop {
        if remaining.is_zero() {
            rest.push(Block::clopen(mu.spine_prefix(n)));
            return Ok((taken, rest));
        }
        let piece = mu.piece_measure(n);
        if remaining < piece {
            let piece_cyl = mu.piece_cylinder(n);
            let (sub_taken, sub_rest) = carve_cylinder(mu, &piece_cyl, &remaining)?;
            taken.extend(sub_taken);
            rest.extend(sub_rest);
            rest.push(Block::clopen(mu.spine_prefix(n + 1)));
            return Ok((taken, rest));
        }
        taken.push(Block::clopen(mu.piece_cylinder(n)));
        remaining -= piece;
        n += 1;
    }
}

fn consume_piece(
    mu: &SpineMeasure,
    index: usize,
    remaining: &mut Rat,
    taken: &mut Vec<Block>,
    rest: &mut Vec<Block>,
) -> Result<()> {
    let piece = mu.piece_measure(index);
    let piece_cyl = mu.piece_cylinder(index);
    if remaining.is_zero() {
        rest.push(Block::clopen(piece_cyl));
    } else if *remaining >= piece {
        taken.push(Block::clopen(piece_cyl));
        *remaining -= piece;
    } else {
        let (sub_taken, sub_rest) = carve_cylinder(mu, &piece_cyl, remaining)?;
        taken.extend(sub_taken);
        rest.extend(sub_rest);
        *remaining = Rat::zero();
    }
    Ok(())
}

/// Carves an exact sub-element of measure `eps` out of a Jordan element,
/// returning the carved part and the remainder.
pub fn carve_element(
    mu: &SpineMeasure,
    x: &JordanElement,
    eps: &Rat,
) -> Result<(JordanElement, JordanElement)> {
    if eps <= &Rat::zero() || eps >= x.measure() {
        return Err(Error::OutOfRange(format!(
            "carve measure {} not inside (0, {})",
            fmt_rat(eps),
            fmt_rat(x.measure())
        )));
    }
    let charge = mu.tail_limit();
    // Charged clopen blocks (on-spine cylinders of a non-good measure) go
    // last; when the request exceeds the charge they go first instead.
    let is_charged = |b: &Block| -> bool {
        !charge.is_zero()
            && mu.on_spine(&b.cylinder)
            && b.selector.classify() == SelectorClass::Cofinite
    };
    let charge_first = !charge.is_zero() && eps > charge;
    let mut order: Vec<&Block> = x.blocks().iter().collect();
    order.sort_by_key(|b| {
        let charged = is_charged(b);
        (
            if charge_first { !charged } else { charged },
            b.cylinder.clone(),
        )
    });
    let mut taken: Vec<Block> = Vec::new();
    let mut rest: Vec<Block> = Vec::new();
    let mut remaining = eps.clone();
    for block in order {
        if remaining.is_zero() {
            rest.push(block.clone());
            continue;
        }
        let m = block_measure(mu, block);
        if remaining >= m {
            taken.push(block.clone());
            remaining -= m;
            continue;
        }
        let (sub_taken, sub_rest) = carve_block(mu, block, &remaining)?;
        taken.extend(sub_taken);
        rest.extend(sub_rest);
        remaining = Rat::zero();
    }
    debug_assert!(remaining.is_zero(), "carve did not land exactly");
    Ok((JordanElement::new(mu, taken)?, JordanElement::new(mu, rest)?))
}

/// Carves `0 < eps < measure(block)` out of one block.
fn carve_block(mu: &SpineMeasure, block: &Block, eps: &Rat) -> Result<(Vec<Block>, Vec<Block>)> {
    match block.selector.classify() {
        SelectorClass::Cofinite => carve_cylinder(mu, &block.cylinder, eps),
        _ => {
            // Greedy over the selected pieces of the block.
            let pieces = Pieces::of(mu, &block.cylinder);
            let mut taken = Vec::new();
            let mut rest = Vec::new();
            let mut remaining = eps.clone();
            let mut n = 0;
            loop {
                if !block.selector.contains(n) {
                    n += 1;
                    continue;
                }
                let piece = pieces.piece_mass(n);
                if remaining.is_zero() {
                    rest.push(Block::new(
                        block.cylinder.clone(),
                        block.selector.clear_below(n),
                    ));
                    return Ok((taken, rest));
                }
                if remaining < piece {
                    let piece_cyl = pieces.piece_path(n);
                    let (sub_taken, sub_rest) = carve_cylinder(mu, &piece_cyl, &remaining)?;
                    taken.extend(sub_taken);
                    rest.extend(sub_rest);
                    rest.push(Block::new(
                        block.cylinder.clone(),
                        block.selector.clear_below(n + 1),
                    ));
                    return Ok((taken, rest));
                }
                taken.push(Block::clopen(pieces.piece_path(n)));
                remaining -= piece;
                n += 1;
            }
        }
    }
}

/// Splits a Jordan element into `2^k` cells of equal dyadic measure, by
/// recursive halving; cell order matches the lexicographic order of the
/// label extensions (bit 0 first half, bit 1 second half).
pub fn split_dyadic(mu: &SpineMeasure, x: &JordanElement, k: usize) -> Result<Vec<JordanElement>> {
    if k == 0 {
        return Ok(vec![x.clone()]);
    }
    let half = x.measure() / crate::rat::rat_int(2);
    let (first, second) = carve_element(mu, x, &half)?;
    let mut out = split_dyadic(mu, &first, k - 1)?;
    out.extend(split_dyadic(mu, &second, k - 1)?);
    Ok(out)
}

/// Splits `join(y, rest)` to depth `k` such that the all-zero extension
/// cell is exactly `y` (requires `measure(y) = (measure(y)+measure(rest)) / 2^k`).
fn split_containing(
    mu: &SpineMeasure,
    y: &JordanElement,
    rest: &JordanElement,
    k: usize,
) -> Result<Vec<JordanElement>> {
    if k == 0 {
        debug_assert!(rest.is_empty());
        return Ok(vec![y.clone()]);
    }
    let total = y.measure() + rest.measure();
    let half = total / crate::rat::rat_int(2);
    let fill = &half - y.measure();
    let (zero_extra, one_half) = if fill.is_zero() {
        (JordanElement::empty(), rest.clone())
    } else {
        carve_element(mu, rest, &fill)?
    };
    let mut out = split_containing(mu, y, &zero_extra, k - 1)?;
    out.extend(split_dyadic(mu, &one_half, k - 1)?);
    Ok(out)
}

/// One completed level of the stage-wise construction.
#[derive(Debug, Clone)]
pub struct Stage {
    pub level: usize,
    pub cells: Vec<JordanElement>,
    pub consumed_targets: usize,
}

/// The stage-wise Jordan isomorphism table: at each stage a map from the
/// full dyadic level to Jordan elements of exact dyadic mass.
#[derive(Debug, Clone)]
pub struct IsoTable {
    pub stages: Vec<Stage>,
}

impl IsoTable {
    pub fn last(&self) -> &Stage {
        self.stages.last().expect("stage zero always present")
    }
}

/// The canonical enumeration of nonunit generating cylinders:
/// `[0], [1], [00], [01], ...`.
pub fn canonical_cylinder_targets(count: usize) -> Vec<Clopen> {
    let mut out = Vec::with_capacity(count);
    let mut level = 1;
    'outer: loop {
        for p in BitPath::level(level) {
            if out.len() == count {
                break 'outer;
            }
            out.push(Clopen::cylinder(p));
        }
        level += 1;
    }
    out
}

/// Runs the stage-wise construction: at each stage the lexicographically
/// least cell meeting the next target donates a dyadic-mass carve, and
/// every cell splits down to the new level with exact dyadic masses,
/// refining the previous level.
pub fn build_jordan_iso(
    mu: &SpineMeasure,
    targets: &[Clopen],
    stages: usize,
    block_budget: usize,
) -> Result<IsoTable> {
    if targets.is_empty() {
        return Err(Error::Validation("target list must be nonempty".into()));
    }
    if targets.len() < stages {
        return Err(Error::Validation(format!(
            "{stages} stages requested but only {} targets given",
            targets.len()
        )));
    }
    if targets.iter().any(Clopen::is_empty) {
        return Err(Error::Validation("targets must be nonzero".into()));
    }
    let mut table = IsoTable {
        stages: vec![Stage {
            level: 0,
            cells: vec![JordanElement::unit(mu)],
            consumed_targets: 0,
        }],
    };
    for (stage_idx, target) in targets.iter().enumerate().take(stages) {
        let current = table.last();
        let level = current.level;
        let donor = current
            .cells
            .iter()
            .position(|cell| !meet_clopen(mu, cell, target).is_empty())
            .expect("cells join to the unit, so some cell meets the target");
        let region = meet_clopen(mu, &current.cells[donor], target);
        let mut new_level = level + 1;
        while dyadic(new_level) >= *region.measure() {
            new_level += 1;
        }
        let carve_mass = dyadic(new_level);
        let (carved, region_rest) = carve_element(mu, &region, &carve_mass)?;
        let donor_rest = jordan_join(
            mu,
            &region_rest,
            &diff_clopen(mu, &current.cells[donor], target),
        );
        let mut cells = Vec::with_capacity(1 << new_level);
        for (idx, cell) in current.cells.iter().enumerate() {
            if idx == donor {
                cells.extend(split_containing(mu, &carved, &donor_rest, new_level - level)?);
            } else {
                cells.extend(split_dyadic(mu, cell, new_level - level)?);
            }
        }
        let blocks: usize = cells.iter().map(|c| c.blocks().len()).sum();
        if blocks > block_budget {
            return Err(Error::StageBudgetExceeded(blocks));
        }
        table.stages.push(Stage {
            level: new_level,
            cells,
            consumed_targets: stage_idx + 1,
        });
    }
    Ok(table)
}

/// Verifies the four invariants of an iso table; returns the first failure.
///
/// (i) every level-l cell has measure exactly `2^-l`; (ii) cells are
/// pairwise disjoint and certify join 1 (masses sum to one and every
/// cylinder at `density_depth` meets some cell); (iii) each level refines
/// the previous one; (iv) every consumed target contains some cell.
pub fn check_iso_table(
    mu: &SpineMeasure,
    table: &IsoTable,
    targets: &[Clopen],
    density_depth: usize,
) -> std::result::Result<(), String> {
    for (t, stage) in table.stages.iter().enumerate() {
        let level = stage.level;
        if stage.cells.len() != 1 << level {
            return Err(format!("stage {t}: wrong cell count"));
        }
        let want = dyadic(level);
        for (i, cell) in stage.cells.iter().enumerate() {
            if cell.measure() != &want {
                return Err(format!(
                    "stage {t}: cell {i} has measure {}, want {}",
                    fmt_rat(cell.measure()),
                    fmt_rat(&want)
                ));
            }
        }
        let total: Rat = stage.cells.iter().map(|c| c.measure().clone()).sum();
        if !total.is_one() {
            return Err(format!("stage {t}: masses sum to {}", fmt_rat(&total)));
        }
        for i in 0..stage.cells.len() {
            for j in i + 1..stage.cells.len() {
                if !jordan_meet(mu, &stage.cells[i], &stage.cells[j]).is_empty() {
                    return Err(format!("stage {t}: cells {i} and {j} overlap"));
                }
            }
        }
        for cyl in BitPath::level(density_depth) {
            let c = Clopen::cylinder(cyl.clone());
            if !stage
                .cells
                .iter()
                .any(|cell| !meet_clopen(mu, cell, &c).is_empty())
            {
                return Err(format!("stage {t}: no cell meets [{cyl}]"));
            }
        }
        if t > 0 {
            let prev = &table.stages[t - 1];
            let shift = level - prev.level;
            for (i, cell) in stage.cells.iter().enumerate() {
                let parent = &prev.cells[i >> shift];
                if jordan_meet(mu, cell, parent).measure() != cell.measure() {
                    return Err(format!("stage {t}: cell {i} not below its parent"));
                }
            }
        }
        for target in &targets[..stage.consumed_targets] {
            if !stage
                .cells
                .iter()
                .any(|cell| jordan_below_clopen(mu, cell, target))
            {
                return Err(format!("stage {t}: no cell below consumed target {target}"));
            }
        }
    }
    Ok(())
}

/// Result of the fat-Cantor small-partition schema.
#[derive(Debug, Clone)]
pub struct SmallPartition {
    pub pieces: Vec<BitPath>,
    pub total_bound: Rat,
    pub pairwise_disjoint: bool,
    pub interior_covered: bool,
}

impl SmallPartition {
    pub fn certificate_passes(&self) -> bool {
        self.pairwise_disjoint && self.interior_covered
    }
}

/// Builds a partition start whose emitted masses, plus the closed-form
/// bound on all later stages, stay below `eps`.
///
/// Stage `j` walks every untouched depth-`j` region and descends (off the
/// spine, then fairly) to a cylinder of mass at most `eps * 2^-(2j+2)`.
/// The certificate checks the pieces are pairwise disjoint and that every
/// depth-`cert_depth` cylinder meets their union.
pub fn small_partition(mu: &SpineMeasure, eps: &Rat, cert_depth: usize) -> Result<SmallPartition> {
    if eps <= &Rat::zero() {
        return Err(Error::OutOfRange(format!(
            "epsilon {} must be positive",
            fmt_rat(eps)
        )));
    }
    if eps > &Rat::one() {
        return Ok(SmallPartition {
            pieces: vec![BitPath::root()],
            total_bound: Rat::one(),
            pairwise_disjoint: true,
            interior_covered: true,
        });
    }
    let mut pieces: Vec<BitPath> = Vec::new();
    for j in 0..=cert_depth {
        let threshold = eps * dyadic(2 * j + 2);
        for region in BitPath::level(j) {
            let touched = pieces
                .iter()
                .any(|p| p.is_prefix_of(&region) || region.is_prefix_of(p));
            if touched {
                continue;
            }
            let mut cur = region;
            while mu.cylinder_mass(&cur) > threshold {
                let next_bit = if mu.on_spine(&cur) {
                    !mu.spine_bit(cur.len())
                } else {
                    false
                };
                cur = cur.child(next_bit);
            }
            pieces.push(cur);
        }
    }
    let emitted: Rat = pieces.iter().map(|p| mu.cylinder_mass(p)).sum();
    let total_bound = emitted + eps * dyadic(cert_depth + 2);
    let pairwise_disjoint = (0..pieces.len()).all(|i| {
        (i + 1..pieces.len())
            .all(|j| !pieces[i].is_prefix_of(&pieces[j]) && !pieces[j].is_prefix_of(&pieces[i]))
    });
    let interior_covered = BitPath::level(cert_depth).all(|cyl| {
        pieces
            .iter()
            .any(|p| p.is_prefix_of(&cyl) || cyl.is_prefix_of(p))
    });
    Ok(SmallPartition {
        pieces,
        total_bound,
        pairwise_disjoint,
        interior_covered,
    })
}

impl fmt::Display for JordanElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            writeln!(f, "block [{}] sel {}", b.cylinder, b.selector)?;
        }
        write!(f, "measure {}", fmt_rat(&self.measure))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn p(s: &str) -> BitPath {
        BitPath::parse(s).unwrap()
    }

    #[test]
    fn carve_half_of_lebesgue_unit_is_first_piece() {
        let mu = SpineMeasure::lebesgue();
        let (taken, rest) = carve_cylinder(&mu, &BitPath::root(), &rat(1, 2)).unwrap();
        let el = JordanElement::new(&mu, taken).unwrap();
        assert_eq!(el.measure(), &rat(1, 2));
        // The expansion selector "1" collapses to the single piece [1].
        assert_eq!(el.blocks().len(), 1);
        assert_eq!(el.blocks()[0].cylinder(), &p("1"));
        assert_eq!(el.blocks()[0].selector(), &Selector::all());
        let rest_el = JordanElement::new(&mu, rest).unwrap();
        assert_eq!(rest_el.measure(), &rat(1, 2));
    }

    #[test]
    fn carve_third_of_lebesgue_unit_is_01_periodic() {
        let mu = SpineMeasure::lebesgue();
        let (taken, rest) = carve_cylinder(&mu, &BitPath::root(), &rat(1, 3)).unwrap();
        assert_eq!(taken.len(), 1);
        let b = &taken[0];
        assert_eq!(b.cylinder(), &BitPath::root());
        assert!(b.selector().prefix().is_empty());
        assert_eq!(b.selector().period(), &[false, true]);
        assert_eq!(block_measure(&mu, b), rat(1, 3));
        let rest_el = JordanElement::new(&mu, rest).unwrap();
        assert_eq!(rest_el.measure(), &rat(2, 3));
    }

    #[test]
    fn carve_rejects_boundary_values() {
        let mu = SpineMeasure::lebesgue();
        let x = JordanElement::unit(&mu);
        assert!(matches!(
            carve_element(&mu, &x, &rat_int(1)),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            carve_element(&mu, &x, &rat_int(0)),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn carve_below_cylinder_stays_below() {
        let mu = SpineMeasure::lebesgue();
        let cyl = p("01");
        let (taken, _) = carve_cylinder(&mu, &cyl, &rat(1, 7)).unwrap();
        let el = JordanElement::new(&mu, taken).unwrap();
        assert_eq!(el.measure(), &rat(1, 7));
        assert!(jordan_below_clopen(&mu, &el, &Clopen::cylinder(cyl)));
    }

    #[test]
    fn carve_interval_brackets_measure() {
        let mu = SpineMeasure::lebesgue();
        let (taken, _) = carve_cylinder(&mu, &BitPath::root(), &rat(2, 7)).unwrap();
        for b in &taken {
            let exact = block_measure(&mu, b);
            let mut terms = 8;
            loop {
                let iv = block_measure_interval(&mu, b, terms);
                assert!(iv.contains(&exact));
                if iv.width() < dyadic(64) {
                    break;
                }
                terms += 16;
            }
        }
    }

    #[test]
    fn nu_charge_gap_is_not_representable() {
        let nu = SpineMeasure::nu_example();
        // The gap below the unit is exactly {1/2}.
        assert!(matches!(
            carve_cylinder(&nu, &BitPath::root(), &rat(1, 2)),
            Err(Error::NotRepresentable(_))
        ));
        // Below [0] (= spine|1, mass 3/4) the gap is [1/4, 1/2].
        assert!(matches!(
            carve_cylinder(&nu, &p("0"), &rat(1, 3)),
            Err(Error::NotRepresentable(_))
        ));
    }

    #[test]
    fn nu_carves_outside_the_gap() {
        let nu = SpineMeasure::nu_example();
        // Small request: fair side only.
        let (taken, rest) = carve_cylinder(&nu, &BitPath::root(), &rat(1, 5)).unwrap();
        let el = JordanElement::new(&nu, taken).unwrap();
        assert_eq!(el.measure(), &rat(1, 5));
        let rest_el = JordanElement::new(&nu, rest).unwrap();
        assert_eq!(rest_el.measure(), &rat(4, 5));
        // Large request: includes a deep spine cylinder.
        let (taken, rest) = carve_cylinder(&nu, &BitPath::root(), &rat(4, 5)).unwrap();
        let el = JordanElement::new(&nu, taken).unwrap();
        assert_eq!(el.measure(), &rat(4, 5));
        let rest_el = JordanElement::new(&nu, rest).unwrap();
        assert_eq!(rest_el.measure(), &rat(1, 5));
    }

    #[test]
    fn split_dyadic_partitions_measure() {
        let mu = SpineMeasure::lebesgue();
        let cells = split_dyadic(&mu, &JordanElement::unit(&mu), 3).unwrap();
        assert_eq!(cells.len(), 8);
        for c in &cells {
            assert_eq!(c.measure(), &rat(1, 8));
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                assert!(jordan_meet(&mu, &cells[i], &cells[j]).is_empty());
            }
        }
    }

    #[test]
    fn build_iso_stage_zero() {
        let mu = SpineMeasure::lebesgue();
        let table = build_jordan_iso(&mu, &canonical_cylinder_targets(1), 0, 1 << 20).unwrap();
        assert_eq!(table.stages.len(), 1);
        assert_eq!(table.last().cells[0].measure(), &rat_int(1));
    }

    #[test]
    fn build_iso_one_stage_hits_target() {
        let mu = SpineMeasure::lebesgue();
        let targets = vec![Clopen::cylinder(p("0"))];
        let table = build_jordan_iso(&mu, &targets, 1, 1 << 20).unwrap();
        check_iso_table(&mu, &table, &targets, 3).unwrap();
        let stage = table.last();
        assert!(stage
            .cells
            .iter()
            .any(|cell| jordan_below_clopen(&mu, cell, &targets[0])));
    }

    #[test]
    fn build_iso_eight_stages_over_lebesgue() {
        let mu = SpineMeasure::lebesgue();
        let targets = canonical_cylinder_targets(8);
        let table = build_jordan_iso(&mu, &targets, 8, 1 << 20).unwrap();
        check_iso_table(&mu, &table, &targets, 4).unwrap();
    }

    #[test]
    fn build_iso_fails_on_charged_spine() {
        // The non-good spine has no Jordan element of mass 1/2, so the very
        // first dyadic split cannot exist.
        let nu = SpineMeasure::nu_example();
        let targets = canonical_cylinder_targets(8);
        assert!(matches!(
            build_jordan_iso(&nu, &targets, 8, 1 << 20),
            Err(Error::NotRepresentable(_))
        ));
    }

    #[test]
    fn build_iso_respects_block_budget() {
        let mu = SpineMeasure::lebesgue();
        let targets = canonical_cylinder_targets(8);
        assert!(matches!(
            build_jordan_iso(&mu, &targets, 8, 4),
            Err(Error::StageBudgetExceeded(_))
        ));
    }

    #[test]
    fn small_partition_lebesgue() {
        let mu = SpineMeasure::lebesgue();
        let sp = small_partition(&mu, &rat(1, 4), 4).unwrap();
        assert!(sp.total_bound < rat(1, 4));
        assert!(sp.certificate_passes());
    }

    #[test]
    fn small_partition_nu() {
        let nu = SpineMeasure::nu_example();
        let sp = small_partition(&nu, &rat(1, 10), 4).unwrap();
        assert!(sp.total_bound < rat(1, 10));
        assert!(sp.certificate_passes());
    }

    #[test]
    fn small_partition_large_epsilon_is_unit() {
        let mu = SpineMeasure::lebesgue();
        let sp = small_partition(&mu, &rat(3, 2), 4).unwrap();
        assert_eq!(sp.pieces, vec![BitPath::root()]);
        assert_eq!(sp.total_bound, rat_int(1));
        assert!(sp.certificate_passes());
    }

    #[test]
    fn jordan_element_rejects_mixed_on_charged_spine() {
        let nu = SpineMeasure::nu_example();
        let evens = Selector::new(vec![], vec![true, false]).unwrap();
        assert!(JordanElement::new(&nu, vec![Block::new(BitPath::root(), evens)]).is_err());
    }

    #[test]
    fn meet_and_diff_with_clopen() {
        let mu = SpineMeasure::lebesgue();
        let x = JordanElement::unit(&mu);
        let c = Clopen::cylinder(p("01"));
        let meet = meet_clopen(&mu, &x, &c);
        assert_eq!(meet.measure(), &rat(1, 4));
        let diff = diff_clopen(&mu, &x, &c);
        assert_eq!(diff.measure(), &rat(3, 4));
        assert!(jordan_meet(&mu, &meet, &diff).is_empty());
    }
}
