use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mtool_core::jordan::{
    build_jordan_iso, carve_cylinder, check_iso_table, small_partition, JordanElement,
};
use mtool_core::ranges::{iso_from_ranges, range_code};
use mtool_core::rat::{fmt_rat, parse_rat};
use mtool_core::spine::{inner_outer, Selector, SpineMeasure, SpinePartition};
use mtool_core::treecode::psi_encode;
use mtool_core::weights::{
    encode_ideal, equiv_c, equiv_m, equiv_z_depth, measure_from_weights, IdealSpec, WeightFn,
};
use mtool_core::{
    density_defects, kelley::kelley_bf, kelley::kelley_both, kelley::kelley_lp,
    kelley::FamilySpec, metric_iso_finite, BitPath, Error, FiniteMeasure, DEFAULT_MAX_DEPTH,
};

use mtool::expr::{parse_clopen, parse_clopen_list};
use mtool::formats::{parse_object, render_weight, InputObject, ToolError};
use mtool::report::{exit_code_for, Report, EXIT_USAGE};

/// Exact-arithmetic workbench for finitely additive measures on the
/// Cantor algebra.
#[derive(Parser)]
#[command(name = "mtool", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rel {
    C,
    M,
    Z,
    Iso,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KelleyMode {
    Bf,
    Lp,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the measure of a clopen expression.
    Eval {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(short, long)]
        expr: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Frechet-Nikodym distance between two clopen expressions.
    Dist {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(short, long)]
        a: String,
        #[arg(short, long)]
        b: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Equivalence relations on coded measures.
    Equiv {
        #[arg(long, value_enum)]
        rel: Rel,
        #[arg(short, long)]
        f: PathBuf,
        #[arg(short, long)]
        g: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Range coding and the intertwining verdict.
    Range {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Builds an isomorphism witness from equal range values.
    IsoFromRanges {
        #[arg(short, long)]
        f: PathBuf,
        #[arg(short, long)]
        g: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Encodes a proper ideal as an M-kind weight function.
    EncodeIdeal {
        #[arg(short, long)]
        ideal: PathBuf,
    },
    /// Codes a weight function into a finitely branching tree.
    Psi {
        #[arg(short, long)]
        f: PathBuf,
        #[arg(long, default_value_t = 8)]
        bits: usize,
    },
    /// Kelley intersection number by enumeration and exact LP.
    Kelley {
        #[arg(long)]
        sets: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: KelleyMode,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Jordan-extension computations over spine measures.
    Jordan {
        #[command(subcommand)]
        sub: JordanCmd,
    },
    /// Finite symmetric and uniform density defects.
    Defects {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(long)]
        candidates: String,
        #[arg(long)]
        depth: Option<usize>,
    },
}

#[derive(Subcommand)]
enum JordanCmd {
    /// Inner/outer measure and Jordan membership of a selector join.
    Member {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        sel: String,
    },
    /// Carve a Jordan element of exact prescribed measure below a cylinder.
    Carve {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(long)]
        cyl: String,
        #[arg(long)]
        eps: String,
    },
    /// Run the stage-wise isomorphism construction.
    Iso {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(long)]
        targets: String,
        #[arg(long)]
        stages: usize,
        #[arg(long, default_value_t = 1 << 20)]
        budget: usize,
    },
    /// Build a small partition with a fat-Cantor certificate.
    Smallpart {
        #[arg(short, long)]
        measure: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 4)]
        cert_depth: usize,
    },
}

fn max_depth_limit() -> usize {
    std::env::var("MTOOL_MAX_DEPTH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_DEPTH)
}

fn read_file(path: &PathBuf) -> Result<String, ToolError> {
    std::fs::read_to_string(path).map_err(|e| {
        ToolError::Core(Error::Validation(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })
}

fn load_object(path: &PathBuf, max_depth: usize) -> Result<InputObject, ToolError> {
    parse_object(&read_file(path)?, max_depth)
}

/// A weight or measure file as a finite measure, with optional re-depth.
fn load_finite(
    path: &PathBuf,
    depth: Option<usize>,
    max_depth: usize,
) -> Result<FiniteMeasure, ToolError> {
    if let Some(d) = depth {
        if d > max_depth {
            return Err(ToolError::Core(Error::DepthExceeded(format!(
                "depth {d} exceeds limit {max_depth}"
            ))));
        }
    }
    match load_object(path, max_depth)? {
        InputObject::Weight(w) => {
            let w = match depth {
                Some(d) if d != w.depth() => w.with_depth(d),
                _ => w,
            };
            Ok(measure_from_weights(&w))
        }
        InputObject::Measure(m) => match depth {
            Some(d) if d != m.depth() => Err(ToolError::Core(Error::DepthMismatch {
                left: d,
                right: m.depth(),
            })),
            _ => Ok(m),
        },
        other => Err(ToolError::Core(Error::Validation(format!(
            "{} is a {} file, expected weight or measure",
            path.display(),
            other.kind_name()
        )))),
    }
}

fn load_weight(path: &PathBuf, max_depth: usize) -> Result<WeightFn, ToolError> {
    match load_object(path, max_depth)? {
        InputObject::Weight(w) => Ok(w),
        other => Err(ToolError::Core(Error::Validation(format!(
            "{} is a {} file, expected a weight function",
            path.display(),
            other.kind_name()
        )))),
    }
}

fn load_ideal(path: &PathBuf, max_depth: usize) -> Result<IdealSpec, ToolError> {
    match load_object(path, max_depth)? {
        InputObject::Ideal(i) => Ok(i),
        other => Err(ToolError::Core(Error::Validation(format!(
            "{} is a {} file, expected an ideal",
            path.display(),
            other.kind_name()
        )))),
    }
}

fn load_spine(path: &PathBuf, max_depth: usize) -> Result<SpineMeasure, ToolError> {
    match load_object(path, max_depth)? {
        InputObject::Spine(s) => Ok(s),
        other => Err(ToolError::Core(Error::Validation(format!(
            "{} is a {} file, expected a spine measure",
            path.display(),
            other.kind_name()
        )))),
    }
}

fn run(cli: Cli) -> Result<String, ToolError> {
    let limit = max_depth_limit();
    match cli.command {
        Command::Eval {
            measure,
            expr,
            depth,
        } => {
            let m = load_finite(&measure, depth, limit)?;
            let c = parse_clopen(&expr, limit)?;
            Ok(fmt_rat(&m.eval(&c)?))
        }
        Command::Dist {
            measure,
            a,
            b,
            depth,
        } => {
            let m = load_finite(&measure, depth, limit)?;
            let ca = parse_clopen(&a, limit)?;
            let cb = parse_clopen(&b, limit)?;
            Ok(fmt_rat(&m.fn_dist(&ca, &cb)?))
        }
        Command::Equiv { rel, f, g, depth } => match rel {
            Rel::Iso => {
                let m1 = load_finite(&f, depth, limit)?;
                let m2 = load_finite(&g, depth, limit)?;
                match metric_iso_finite(&m1, &m2)? {
                    Some(witness) => {
                        let pairs: Vec<String> = witness.iter().map(|j| j.to_string()).collect();
                        eprintln!("atom map: {}", pairs.join(" "));
                        Ok("true".into())
                    }
                    None => Ok("false".into()),
                }
            }
            Rel::C => {
                let (wf, wg) = (load_weight(&f, limit)?, load_weight(&g, limit)?);
                match equiv_c(&wf, &wg)? {
                    Some(swaps) => {
                        let words: Vec<String> = swaps
                            .iter()
                            .map(|s| if s.is_empty() { "-".into() } else { s.to_string() })
                            .collect();
                        eprintln!("swap set: {}", words.join(" "));
                        Ok("true".into())
                    }
                    None => Ok("false".into()),
                }
            }
            Rel::M => {
                let (wf, wg) = (load_weight(&f, limit)?, load_weight(&g, limit)?);
                Ok(equiv_m(&wf, &wg)?.to_string())
            }
            Rel::Z => {
                let (wf, wg) = (load_weight(&f, limit)?, load_weight(&g, limit)?);
                Ok(equiv_z_depth(&wf, &wg)?.to_string())
            }
        },
        Command::Range { measure, depth } => {
            let m = load_finite(&measure, None, limit)?;
            let (code, intertwining) = range_code(&m, depth)?;
            let mut out = String::new();
            for v in code.values() {
                out.push_str(&format!("value {}\n", fmt_rat(v)));
            }
            out.push_str(&format!("intertwining {intertwining}"));
            Ok(out)
        }
        Command::IsoFromRanges { f, g, depth } => {
            let m1 = load_finite(&f, None, limit)?;
            let m2 = load_finite(&g, None, limit)?;
            match iso_from_ranges(&m1, &m2, depth) {
                Ok(witness) => {
                    let mut out = format!("depth-reached {}\n", witness.depth_reached());
                    for (s, image) in witness.table() {
                        out.push_str(&format!("map [{s}] -> {image}\n"));
                    }
                    Ok(out.trim_end().into())
                }
                Err(Error::RangeMismatch(v)) => Ok(format!("range-mismatch {}", fmt_rat(&v))),
                Err(e) => Err(e.into()),
            }
        }
        Command::EncodeIdeal { ideal } => {
            let spec = load_ideal(&ideal, limit)?;
            Ok(render_weight(&encode_ideal(&spec)?))
        }
        Command::Psi { f, bits } => {
            let w = load_weight(&f, limit)?;
            Ok(psi_encode(&w, bits)?.to_string())
        }
        Command::Kelley {
            sets,
            mode,
            nmax,
            budget,
        } => {
            let family = FamilySpec::from_sets(parse_clopen_list(&sets, limit)?, limit)?;
            let budget = budget.unwrap_or(1 << 20);
            let mut out = String::new();
            match mode {
                KelleyMode::Lp => {
                    let (value, witness) = kelley_lp(&family);
                    push_lp(&mut out, &value, &witness);
                }
                KelleyMode::Bf => {
                    let (table, bound) = kelley_bf(&family, nmax, budget)?;
                    push_bf(&mut out, &table, &bound);
                }
                KelleyMode::Both => {
                    let result = kelley_both(&family, nmax, budget)?;
                    push_lp(&mut out, &result.lp_value, &result.witness);
                    push_bf(&mut out, &result.kn_table, &result.bf_upper_bound);
                }
            }
            Ok(out.trim_end().into())
        }
        Command::Jordan { sub } => run_jordan(sub, limit),
        Command::Defects {
            measure,
            candidates,
            depth,
        } => {
            let m = load_finite(&measure, depth, limit)?;
            let cands = parse_clopen_list(&candidates, limit)?;
            let (sym, uni) = density_defects(&m, &cands)?;
            Ok(format!(
                "symmetric {}\nuniform {}",
                fmt_rat(&sym),
                fmt_rat(&uni)
            ))
        }
    }
}

fn push_lp(out: &mut String, value: &mtool_core::Rat, witness: &FiniteMeasure) {
    out.push_str(&format!("lp {}\n", fmt_rat(value)));
    let atoms: Vec<String> = witness.atoms().iter().map(fmt_rat).collect();
    out.push_str(&format!("witness {}\n", atoms.join(" ")));
}

fn push_bf(out: &mut String, table: &[(usize, usize)], bound: &mtool_core::Rat) {
    for (n, k_n) in table {
        out.push_str(&format!("k {n} {k_n}\n"));
    }
    out.push_str(&format!("bound {}\n", fmt_rat(bound)));
}

fn run_jordan(cmd: JordanCmd, limit: usize) -> Result<String, ToolError> {
    match cmd {
        JordanCmd::Member { measure, sel } => {
            let mu = load_spine(&measure, limit)?;
            let selector = Selector::parse(&sel)?;
            let part = SpinePartition::of(&mu);
            let (inner, outer, member) = inner_outer(&mu, &part, &selector);
            Ok(format!(
                "inner {}\nouter {}\nmember {member}",
                fmt_rat(&inner),
                fmt_rat(&outer)
            ))
        }
        JordanCmd::Carve { measure, cyl, eps } => {
            let mu = load_spine(&measure, limit)?;
            let path = BitPath::parse(cyl.trim_start_matches('[').trim_end_matches(']'))?;
            path.check_depth(limit)?;
            let eps = parse_rat(&eps)?;
            let (taken, _rest) = carve_cylinder(&mu, &path, &eps)?;
            let element = JordanElement::new(&mu, taken)?;
            Ok(element.to_string())
        }
        JordanCmd::Iso {
            measure,
            targets,
            stages,
            budget,
        } => {
            let mu = load_spine(&measure, limit)?;
            let target_sets = parse_clopen_list(&targets, limit)?;
            let table = build_jordan_iso(&mu, &target_sets, stages, budget)?;
            let mut out = String::new();
            for (i, stage) in table.stages.iter().enumerate() {
                let blocks: usize = stage.cells.iter().map(|c| c.blocks().len()).sum();
                out.push_str(&format!(
                    "stage {i} level {} cells {} blocks {blocks}\n",
                    stage.level,
                    stage.cells.len()
                ));
            }
            match check_iso_table(&mu, &table, &target_sets, 4) {
                Ok(()) => out.push_str("invariants ok"),
                Err(msg) => out.push_str(&format!("invariants FAILED: {msg}")),
            }
            Ok(out)
        }
        JordanCmd::Smallpart {
            measure,
            eps,
            cert_depth,
        } => {
            let mu = load_spine(&measure, limit)?;
            if cert_depth > limit {
                return Err(ToolError::Core(Error::DepthExceeded(format!(
                    "cert depth {cert_depth} exceeds limit {limit}"
                ))));
            }
            let eps = parse_rat(&eps)?;
            let sp = small_partition(&mu, &eps, cert_depth)?;
            let mut out = String::new();
            for p in &sp.pieces {
                out.push_str(&format!("piece [{p}]\n"));
            }
            out.push_str(&format!("total-bound {}\n", fmt_rat(&sp.total_bound)));
            out.push_str(&format!(
                "certificate {}",
                if sp.certificate_passes() { "pass" } else { "fail" }
            ));
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; help and version are not errors.
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let echo = argv.join(" ");
    match run(cli) {
        Ok(payload) => ExitCode::from(Report::ok(echo, payload).emit() as u8),
        Err(e) => {
            eprintln!("# {echo}");
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
