//! End-to-end tests of the command-line surface: payloads, exit codes, and
//! byte-stable output.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mtool"))
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

struct Fixtures {
    dir: std::path::PathBuf,
}

impl Fixtures {
    fn new(tag: &str) -> Fixtures {
        let dir = std::env::temp_dir().join(format!("mtool-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Fixtures { dir }
    }

    fn file(&self, name: &str, content: &str) -> String {
        write(&self.dir, name, content)
    }
}

const LEB_WT: &str = "kind weight\ndepth 2\ndefault 1/2\n";
const MU_FM: &str = "kind measure\ndepth 2\natoms 1/4 1/4 3/8 1/8\n";
const NU_FM: &str = "kind measure\ndepth 2\natoms 3/8 1/8 1/8 3/8\n";
const LEB_SPINE: &str = "kind spine\nspine-head -\nspine-period 0\ntail limit 0 coef 1 ratio 1/2 from 0\n";
const NU_SPINE: &str = "kind spine\nspine-head -\nspine-period 0\ntail limit 1/2 coef 1/2 ratio 1/2 from 0\n";

#[test]
fn eval_reports_exact_mass() {
    let fx = Fixtures::new("eval");
    let leb = fx.file("leb.wt", LEB_WT);
    let out = bin().args(["eval", "-m", &leb, "-e", "[0]+[11]"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "3/4\n");
}

#[test]
fn dist_uses_symmetric_difference() {
    let fx = Fixtures::new("dist");
    let mu = fx.file("mu.fm", MU_FM);
    let out = bin()
        .args(["dist", "-m", &mu, "-a", "[00]", "-b", "[10]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "5/8\n");
}

#[test]
fn equiv_iso_on_the_four_atom_pair_is_false_with_exit_zero() {
    let fx = Fixtures::new("iso");
    let mu = fx.file("mu.fm", MU_FM);
    let nu = fx.file("nu.fm", NU_FM);
    let out = bin()
        .args(["equiv", "--rel", "iso", "-f", &mu, "-g", &nu])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "boolean false is not an error");
    assert_eq!(stdout(&out), "false\n");
}

#[test]
fn equiv_c_writes_witness_to_stderr() {
    let fx = Fixtures::new("equivc");
    let f = fx.file("f.wt", "kind weight\ndepth 3\ndefault 1/2\nw 0 1/3\n");
    let g = fx.file("g.wt", "kind weight\ndepth 3\ndefault 1/2\nw 1 1/3\n");
    let out = bin()
        .args(["equiv", "--rel", "c", "-f", &f, "-g", &g])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "true\n");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("swap set: -"), "stderr was: {err}");
}

#[test]
fn kelley_both_prints_lp_table_and_bound() {
    let out = bin()
        .args(["kelley", "--sets", "[0],[1]", "--mode", "both"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lp 1/2"));
    assert_eq!(lines.next(), Some("witness 1/2 1/2"));
    assert!(text.contains("\nk 2 1\n"));
    assert!(text.trim_end().ends_with("bound 1/2"));
}

#[test]
fn kelley_budget_exceeded_exits_4() {
    let out = bin()
        .args(["kelley", "--sets", "[0],[1]", "--mode", "bf", "--nmax", "6", "--budget", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn carve_third_prints_block_form() {
    let fx = Fixtures::new("carve");
    let spine = fx.file("leb.spine", LEB_SPINE);
    let out = bin()
        .args(["jordan", "carve", "-m", &spine, "--cyl", "[]", "--eps", "1/3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "block [] sel -:01\nmeasure 1/3\n");
}

#[test]
fn carve_out_of_range_exits_3() {
    let fx = Fixtures::new("carve3");
    let spine = fx.file("leb.spine", LEB_SPINE);
    let out = bin()
        .args(["jordan", "carve", "-m", &spine, "--cyl", "[]", "--eps", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn member_reports_inner_outer_verdict() {
    let fx = Fixtures::new("member");
    let spine = fx.file("nu.spine", NU_SPINE);
    let out = bin()
        .args(["jordan", "member", "-m", &spine, "--sel", "-:10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "inner 1/3\nouter 5/6\nmember false\n");
}

#[test]
fn jordan_iso_over_good_spine_passes_invariants() {
    let fx = Fixtures::new("jiso");
    let spine = fx.file("leb.spine", LEB_SPINE);
    let out = bin()
        .args([
            "jordan", "iso", "-m", &spine, "--targets", "[0],[1],[00],[01]", "--stages", "4",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).trim_end().ends_with("invariants ok"));
}

#[test]
fn jordan_iso_over_charged_spine_exits_3() {
    let fx = Fixtures::new("jisonu");
    let spine = fx.file("nu.spine", NU_SPINE);
    let out = bin()
        .args(["jordan", "iso", "-m", &spine, "--targets", "[0],[1]", "--stages", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn smallpart_certificate_passes() {
    let fx = Fixtures::new("smallpart");
    let spine = fx.file("nu.spine", NU_SPINE);
    let out = bin()
        .args(["jordan", "smallpart", "-m", &spine, "--eps", "1/10", "--cert-depth", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("total-bound "));
    assert!(text.trim_end().ends_with("certificate pass"));
}

#[test]
fn range_lists_values_and_verdict() {
    let fx = Fixtures::new("range");
    let leb = fx.file("leb.wt", LEB_WT);
    let out = bin().args(["range", "-m", &leb, "--depth", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "value 1/4\nvalue 1/2\nvalue 3/4\nintertwining true\n"
    );
}

#[test]
fn iso_from_ranges_mismatch_is_a_verdict_not_an_error() {
    let fx = Fixtures::new("ifr");
    let leb = fx.file("leb.wt", "kind weight\ndepth 2\ndefault 1/2\n");
    let third = fx.file("third.wt", "kind weight\ndepth 2\ndefault 1/2\nw - 1/3\n");
    let out = bin()
        .args(["iso-from-ranges", "-f", &leb, "-g", &third, "--depth", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "range-mismatch 1/4\n");
}

#[test]
fn encode_ideal_output_reparses() {
    let fx = Fixtures::new("encode");
    let ideal = fx.file("i.ideal", "kind ideal\ndepth 3\ngen 01\n");
    let out = bin().args(["encode-ideal", "-i", &ideal]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("kind M\n"));
    let again = fx.file("encoded.wt", &text);
    let masses = bin()
        .args(["eval", "-m", &again, "-e", "[01]"])
        .output()
        .unwrap();
    assert_eq!(stdout(&masses), "0\n");
    let sibling = bin()
        .args(["eval", "-m", &again, "-e", "[00]"])
        .output()
        .unwrap();
    assert_eq!(stdout(&sibling), "1/2\n");
}

#[test]
fn psi_output_is_byte_stable() {
    let fx = Fixtures::new("psi");
    let f = fx.file("f.wt", "kind weight\ndepth 2\ndefault 1/2\nw - 1/3\n");
    let a = bin().args(["psi", "-f", &f, "--bits", "6"]).output().unwrap();
    let b = bin().args(["psi", "-f", &f, "--bits", "6"]).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with('('));
}

#[test]
fn defects_reports_both_numbers() {
    let fx = Fixtures::new("defects");
    let leb = fx.file("leb.wt", LEB_WT);
    let out = bin()
        .args(["defects", "-m", &leb, "--candidates", "{},[]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "symmetric 1/2\nuniform 3/4\n");
}

#[test]
fn parse_error_exits_2_with_line_number() {
    let fx = Fixtures::new("parse2");
    let bad = fx.file("bad.ideal", "kind ideal\ndepth 3\ngen 2\n");
    let out = bin().args(["encode-ideal", "-i", &bad]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr was: {err}");
}

#[test]
fn validation_error_exits_3() {
    let fx = Fixtures::new("val3");
    let bad = fx.file(
        "bad.spine",
        "kind spine\nspine-head -\nspine-period 0\ncyl 1 2/3\ntail limit 1/2 coef 1/2 ratio 1/2 from 0\n",
    );
    let out = bin()
        .args(["jordan", "smallpart", "-m", &bad, "--eps", "1/4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_error_exits_2() {
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn max_depth_env_limits_expressions() {
    let fx = Fixtures::new("envdepth");
    let leb = fx.file("leb.wt", LEB_WT);
    let out = bin()
        .env("MTOOL_MAX_DEPTH", "4")
        .args(["eval", "-m", &leb, "-e", "[00000]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let fx = Fixtures::new("stable");
    let spine = fx.file("leb.spine", LEB_SPINE);
    let run = || {
        stdout(
            &bin()
                .args(["jordan", "smallpart", "-m", &spine, "--eps", "1/4", "--cert-depth", "3"])
                .output()
                .unwrap(),
        )
    };
    assert_eq!(run(), run());
}

#[test]
fn equiv_iso_with_depth_flag_on_weight_files() {
    // The four-atom pair presented as weight tables.
    let fx = Fixtures::new("isowt");
    let mu = fx.file(
        "mu.wt",
        "kind weight\ndepth 2\ndefault 1/2\nw - 1/2\nw 0 1/2\nw 1 3/4\n",
    );
    let nu = fx.file(
        "nu.wt",
        "kind weight\ndepth 2\ndefault 1/2\nw - 1/2\nw 0 3/4\nw 1 1/4\n",
    );
    let out = bin()
        .args(["equiv", "--rel", "iso", "--depth", "2", "-f", &mu, "-g", &nu])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "false\n");
}

#[test]
fn equiv_m_and_z_relations_end_to_end() {
    let fx = Fixtures::new("equivmz");
    // Both vanish exactly below [0].
    let f = fx.file("f.wt", "kind M\ndepth 3\ndefault 1/2\nw - 0\nw 1 1/3\n");
    let g = fx.file("g.wt", "kind M\ndepth 3\ndefault 1/2\nw - 0\nw 1 2/5\n");
    // Vanishes below [1] instead.
    let h = fx.file("h.wt", "kind M\ndepth 3\ndefault 1/2\nw - 1\n");
    let m_same = bin().args(["equiv", "--rel", "m", "-f", &f, "-g", &g]).output().unwrap();
    assert_eq!(m_same.status.code(), Some(0));
    assert_eq!(stdout(&m_same), "true\n");
    let m_diff = bin().args(["equiv", "--rel", "m", "-f", &f, "-g", &h]).output().unwrap();
    assert_eq!(stdout(&m_diff), "false\n");
    // The mirror-image null structure is z-equivalent.
    let z = bin().args(["equiv", "--rel", "z", "-f", &f, "-g", &h]).output().unwrap();
    assert_eq!(z.status.code(), Some(0));
    assert_eq!(stdout(&z), "true\n");
}

#[test]
fn range_of_a_vanishing_measure_exits_3() {
    let fx = Fixtures::new("rangez");
    let m = fx.file("z.wt", "kind M\ndepth 2\ndefault 1/2\nw - 0\n");
    let out = bin().args(["range", "-m", &m, "--depth", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn jordan_iso_budget_exceeded_exits_4() {
    let fx = Fixtures::new("jbudget");
    let spine = fx.file("leb.spine", LEB_SPINE);
    let out = bin()
        .args([
            "jordan", "iso", "-m", &spine, "--targets", "[0],[1],[00]", "--stages", "3",
            "--budget", "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
