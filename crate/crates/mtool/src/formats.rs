//! Line-oriented plain-text formats for the workbench objects, with
//! renderers that round-trip through the parsers.

use std::collections::BTreeMap;

use mtool_core::rat::{fmt_rat, parse_rat};
use mtool_core::spine::SpineMeasure;
use mtool_core::weights::{IdealSpec, WeightFn, WeightKind};
use mtool_core::{BitPath, FiniteMeasure, Rat};

use crate::ParseError;

/// Any object the tool can read from a file.
#[derive(Debug, Clone)]
pub enum InputObject {
    Weight(WeightFn),
    Ideal(IdealSpec),
    Measure(FiniteMeasure),
    Spine(SpineMeasure),
}

impl InputObject {
    pub fn kind_name(&self) -> &'static str {
        match self {
            InputObject::Weight(_) => "weight",
            InputObject::Ideal(_) => "ideal",
            InputObject::Measure(_) => "measure",
            InputObject::Spine(_) => "spine",
        }
    }
}

/// Errors of the tool layer: parse errors carry a position and map to exit
/// code 2; validation failures bubble up from the core types as exit 3.
#[derive(Debug, Clone, thiserror::Error)]
pub enum ToolError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Core(#[from] mtool_core::Error),
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>, &'a str)>,
    cursor: usize,
}

impl<'a> Lines<'a> {
    fn of(text: &'a str) -> Lines<'a> {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, raw)| (i + 1, raw.split_whitespace().collect(), raw))
            .filter(|(_, tokens, _): &(usize, Vec<&str>, &str)| !tokens.is_empty())
            .collect();
        Lines { items, cursor: 0 }
    }

    fn next(&mut self) -> Option<(usize, &[&'a str], &'a str)> {
        let item = self.items.get(self.cursor)?;
        self.cursor += 1;
        Some((item.0, &item.1, item.2))
    }
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col,
        msg: msg.into(),
    }
}

/// Column (1-based) where the n-th whitespace token starts.
fn token_col(raw: &str, index: usize) -> usize {
    let mut seen = 0;
    let mut in_token = false;
    for (i, c) in raw.char_indices() {
        if c.is_whitespace() {
            in_token = false;
        } else if !in_token {
            if seen == index {
                return i + 1;
            }
            seen += 1;
            in_token = true;
        }
    }
    raw.len() + 1
}

/// Parses any known object kind; the `kind` directive must come first.
pub fn parse_object(text: &str, max_depth: usize) -> Result<InputObject, ToolError> {
    let mut lines = Lines::of(text);
    let (line_no, tokens, raw) = match lines.next() {
        Some(x) => x,
        None => return Err(err(1, 1, "empty input").into()),
    };
    if tokens[0] != "kind" || tokens.len() != 2 {
        return Err(err(line_no, 1, "first directive must be `kind <name>`").into());
    }
    match tokens[1] {
        "weight" => parse_weight_body(lines, WeightKind::Strict, max_depth),
        "M" => parse_weight_body(lines, WeightKind::M, max_depth),
        "ideal" => parse_ideal_body(lines, max_depth),
        "measure" => parse_measure_body(lines, max_depth),
        "spine" => parse_spine_body(lines, max_depth),
        other => {
            Err(err(line_no, token_col(raw, 1), format!("unknown kind `{other}`")).into())
        }
    }
}

fn plain_message(e: mtool_core::Error) -> String {
    match e {
        mtool_core::Error::Validation(msg) => msg,
        other => other.to_string(),
    }
}

fn parse_path_token(line: usize, raw: &str, index: usize, token: &str) -> Result<BitPath, ParseError> {
    BitPath::parse(token).map_err(|e| err(line, token_col(raw, index), plain_message(e)))
}

fn parse_rat_token(line: usize, raw: &str, index: usize, token: &str) -> Result<Rat, ParseError> {
    parse_rat(token).map_err(|e| err(line, token_col(raw, index), plain_message(e)))
}

fn parse_usize_token(line: usize, raw: &str, index: usize, token: &str) -> Result<usize, ParseError> {
    token
        .parse()
        .map_err(|_| err(line, token_col(raw, index), format!("bad integer `{token}`")))
}

fn check_depth_directive(
    depth: Option<usize>,
    line: usize,
) -> Result<usize, ParseError> {
    depth.ok_or_else(|| err(line, 1, "missing `depth` directive"))
}

fn parse_weight_body(
    mut lines: Lines<'_>,
    kind: WeightKind,
    max_depth: usize,
) -> Result<InputObject, ToolError> {
    let mut depth: Option<usize> = None;
    let mut default: Option<Rat> = None;
    let mut table: BTreeMap<BitPath, Rat> = BTreeMap::new();
    let mut last_line = 1;
    while let Some((line, tokens, raw)) = lines.next() {
        last_line = line;
        match tokens[0] {
            "depth" if tokens.len() == 2 && depth.is_none() => {
                let d = parse_usize_token(line, raw, 1, tokens[1])?;
                if d > max_depth {
                    return Err(mtool_core::Error::DepthExceeded(format!(
                        "depth {d} exceeds limit {max_depth}"
                    ))
                    .into());
                }
                depth = Some(d);
            }
            "default" if tokens.len() == 2 && default.is_none() => {
                default = Some(parse_rat_token(line, raw, 1, tokens[1])?);
            }
            "w" if tokens.len() == 3 => {
                let path = parse_path_token(line, raw, 1, tokens[1])?;
                let value = parse_rat_token(line, raw, 2, tokens[2])?;
                if table.insert(path, value).is_some() {
                    return Err(err(line, token_col(raw, 1), "repeated weight node").into());
                }
            }
            other => {
                return Err(err(
                    line,
                    1,
                    format!("unknown or malformed directive `{other}`"),
                )
                .into())
            }
        }
    }
    let depth = check_depth_directive(depth, last_line)?;
    let default = default.ok_or_else(|| err(last_line, 1, "missing `default` directive"))?;
    Ok(InputObject::Weight(WeightFn::new(
        depth, table, default, kind,
    )?))
}

fn parse_ideal_body(mut lines: Lines<'_>, max_depth: usize) -> Result<InputObject, ToolError> {
    let mut depth: Option<usize> = None;
    let mut gens: Vec<BitPath> = Vec::new();
    let mut last_line = 1;
    while let Some((line, tokens, raw)) = lines.next() {
        last_line = line;
        match tokens[0] {
            "depth" if tokens.len() == 2 && depth.is_none() => {
                let d = parse_usize_token(line, raw, 1, tokens[1])?;
                if d > max_depth {
                    return Err(mtool_core::Error::DepthExceeded(format!(
                        "depth {d} exceeds limit {max_depth}"
                    ))
                    .into());
                }
                depth = Some(d);
            }
            "gen" if tokens.len() == 2 => {
                gens.push(parse_path_token(line, raw, 1, tokens[1])?);
            }
            other => {
                return Err(err(
                    line,
                    1,
                    format!("unknown or malformed directive `{other}`"),
                )
                .into())
            }
        }
    }
    let depth = check_depth_directive(depth, last_line)?;
    Ok(InputObject::Ideal(IdealSpec::new(depth, gens)?))
}

fn parse_measure_body(mut lines: Lines<'_>, max_depth: usize) -> Result<InputObject, ToolError> {
    let mut depth: Option<usize> = None;
    let mut atoms: Option<Vec<Rat>> = None;
    let mut last_line = 1;
    while let Some((line, tokens, raw)) = lines.next() {
        last_line = line;
        match tokens[0] {
            "depth" if tokens.len() == 2 && depth.is_none() => {
                let d = parse_usize_token(line, raw, 1, tokens[1])?;
                if d > max_depth {
                    return Err(mtool_core::Error::DepthExceeded(format!(
                        "depth {d} exceeds limit {max_depth}"
                    ))
                    .into());
                }
                depth = Some(d);
            }
            "atoms" if atoms.is_none() && tokens.len() > 1 => {
                let mut v = Vec::with_capacity(tokens.len() - 1);
                for (i, tok) in tokens.iter().enumerate().skip(1) {
                    v.push(parse_rat_token(line, raw, i, tok)?);
                }
                atoms = Some(v);
            }
            other => {
                return Err(err(
                    line,
                    1,
                    format!("unknown or malformed directive `{other}`"),
                )
                .into())
            }
        }
    }
    let depth = check_depth_directive(depth, last_line)?;
    let atoms = atoms.ok_or_else(|| err(last_line, 1, "missing `atoms` directive"))?;
    Ok(InputObject::Measure(FiniteMeasure::new(depth, atoms)?))
}

fn parse_spine_body(mut lines: Lines<'_>, max_depth: usize) -> Result<InputObject, ToolError> {
    let mut head: Option<BitPath> = None;
    let mut period: Option<BitPath> = None;
    let mut cyls: BTreeMap<usize, Rat> = BTreeMap::new();
    let mut tail: Option<(Rat, Rat, Rat, usize)> = None;
    let mut last_line = 1;
    while let Some((line, tokens, raw)) = lines.next() {
        last_line = line;
        match tokens[0] {
            "spine-head" if tokens.len() == 2 && head.is_none() => {
                head = Some(parse_path_token(line, raw, 1, tokens[1])?);
            }
            "spine-period" if tokens.len() == 2 && period.is_none() => {
                period = Some(parse_path_token(line, raw, 1, tokens[1])?);
            }
            "cyl" if tokens.len() == 3 => {
                let n = parse_usize_token(line, raw, 1, tokens[1])?;
                let v = parse_rat_token(line, raw, 2, tokens[2])?;
                if cyls.insert(n, v).is_some() {
                    return Err(err(line, token_col(raw, 1), "repeated cyl index").into());
                }
            }
            "tail"
                if tokens.len() == 9
                    && tokens[1] == "limit"
                    && tokens[3] == "coef"
                    && tokens[5] == "ratio"
                    && tokens[7] == "from"
                    && tail.is_none() =>
            {
                let limit = parse_rat_token(line, raw, 2, tokens[2])?;
                let coef = parse_rat_token(line, raw, 4, tokens[4])?;
                let ratio = parse_rat_token(line, raw, 6, tokens[6])?;
                let from = parse_usize_token(line, raw, 8, tokens[8])?;
                tail = Some((limit, coef, ratio, from));
            }
            other => {
                return Err(err(
                    line,
                    1,
                    format!("unknown or malformed directive `{other}`"),
                )
                .into())
            }
        }
    }
    let _ = max_depth;
    let head = head.ok_or_else(|| err(last_line, 1, "missing `spine-head` directive"))?;
    let period = period.ok_or_else(|| err(last_line, 1, "missing `spine-period` directive"))?;
    let (limit, coef, ratio, from) =
        tail.ok_or_else(|| err(last_line, 1, "missing `tail` directive"))?;
    // Explicit masses must cover 0..from exactly; entries at or beyond
    // `from` must agree with the closed form.
    let mut explicit = Vec::with_capacity(from);
    for n in 0..from {
        match cyls.remove(&n) {
            Some(v) => explicit.push(v),
            None => {
                return Err(mtool_core::Error::Validation(format!(
                    "missing `cyl {n}` before tail start {from}"
                ))
                .into())
            }
        }
    }
    let spine = SpineMeasure::new(head, period, explicit, limit, coef, ratio)?;
    for (n, v) in cyls {
        let expected = spine.spine_cyl(n);
        if v != expected {
            return Err(mtool_core::Error::Validation(format!(
                "cyl {n} = {} disagrees with tail formula value {}",
                fmt_rat(&v),
                fmt_rat(&expected)
            ))
            .into());
        }
    }
    Ok(InputObject::Spine(spine))
}

fn path_or_dash(p: &BitPath) -> String {
    if p.is_empty() {
        "-".into()
    } else {
        p.to_string()
    }
}

pub fn render_weight(w: &WeightFn) -> String {
    let mut out = String::new();
    out.push_str(match w.kind() {
        WeightKind::Strict => "kind weight\n",
        WeightKind::M => "kind M\n",
    });
    out.push_str(&format!("depth {}\n", w.depth()));
    out.push_str(&format!("default {}\n", fmt_rat(w.default_value())));
    for (path, value) in w.table() {
        out.push_str(&format!("w {} {}\n", path_or_dash(path), fmt_rat(value)));
    }
    out
}

pub fn render_ideal(i: &IdealSpec) -> String {
    let mut out = format!("kind ideal\ndepth {}\n", i.depth());
    for g in i.generators() {
        out.push_str(&format!("gen {}\n", path_or_dash(g)));
    }
    out
}

pub fn render_measure(m: &FiniteMeasure) -> String {
    let atoms: Vec<String> = m.atoms().iter().map(fmt_rat).collect();
    format!("kind measure\ndepth {}\natoms {}\n", m.depth(), atoms.join(" "))
}

pub fn render_spine(s: &SpineMeasure) -> String {
    let mut out = format!(
        "kind spine\nspine-head {}\nspine-period {}\n",
        path_or_dash(s.head()),
        s.period()
    );
    for (n, v) in s.explicit().iter().enumerate() {
        out.push_str(&format!("cyl {n} {}\n", fmt_rat(v)));
    }
    let (limit, coef, ratio, from) = s.tail();
    out.push_str(&format!(
        "tail limit {} coef {} ratio {} from {from}\n",
        fmt_rat(limit),
        fmt_rat(coef),
        fmt_rat(ratio)
    ));
    out
}

pub fn render_object(obj: &InputObject) -> String {
    match obj {
        InputObject::Weight(w) => render_weight(w),
        InputObject::Ideal(i) => render_ideal(i),
        InputObject::Measure(m) => render_measure(m),
        InputObject::Spine(s) => render_spine(s),
    }
}
