use std::path::{Path, PathBuf};
use std::process::Command;

use clap::Parser;
use pctlwb::formula::parse_formula;
use pctlwb::geometry::GadgetConstants;
use pctlwb::machines::parse_machine;
use pctlwb::markov::parse_chain;
use pctlwb::rational::rat;
use pctlwb::reduction::{compile, compile_parts, stats, Fragment, ReductionConfig, Variant};
use pctlwb_cli::{execute, geometry_with, Cli, CliError, GeometryArgs, Outcome, RunManifest};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Result<Outcome, CliError> {
    let cli = Cli::try_parse_from(std::iter::once("pctlwb").chain(args.iter().copied())).expect("flags parse");
    execute(&cli)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pctlwb")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn one_state_chain_always_a() {
    let (chain, formula) = (fixture("one.chain"), fixture("always_a.pctl"));
    let out = run(&["check", "--chain", path(&chain), "--formula", path(&formula), "--probs"]).unwrap();
    assert_eq!(out.code, 0);
    assert!(out.report.starts_with("s: true\n"), "{}", out.report);
    assert_eq!(out.manifest.verdicts["s"], "true");
    assert_eq!(out.manifest.inputs.len(), 2);
}

#[test]
fn check_input_errors_exit_2() {
    let (bad, formula, good) = (fixture("bad.chain"), fixture("always_a.pctl"), fixture("one.chain"));
    let (code, err) = exit_code(&["check", "--chain", path(&bad), "--formula", path(&formula)]);
    assert_eq!(code, 2, "{err}");
    let (code, err) = exit_code(&["check", "--chain", path(&good), "--formula", path(&formula), "--state", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown state nope"));
}

#[test]
fn reduce_writes_a_parsable_formula() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("m0.pctl");
    let m0 = fixture("m0.cm");
    let out =
        run(&["reduce", "--machine", path(&m0), "--fragment", "fg", "--variant", "finite", "-o", path(&out_path)])
            .unwrap();
    assert_eq!(out.code, 0);
    out.persist().unwrap();
    let text = std::fs::read_to_string(&out_path).unwrap();
    let machine = parse_machine(&std::fs::read_to_string(&m0).unwrap()).unwrap();
    let expected = compile(&machine, &ReductionConfig::new(Fragment::FGOnly, Variant::FiniteSat)).unwrap();
    assert_eq!(parse_formula(&text).unwrap(), expected);

    let manifest: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m0.pctl.manifest")).unwrap()).unwrap();
    assert_eq!(manifest.atoms.len(), 38 + 36 * 2);
    assert_eq!(manifest.fragment.as_deref(), Some("FGOnly"));
    assert_eq!(manifest.variant.as_deref(), Some("finite"));
    assert_eq!(manifest.constants["lambda"], "14/225");
    assert_eq!(manifest.outputs.len(), 1);
}

/// The F/G fragment rewrites Struct and the `U=1` propagation inside Step;
/// Init and Sync are shared verbatim.
#[test]
fn fragments_differ_in_structure_and_propagation() {
    let machine = parse_machine(&std::fs::read_to_string(fixture("m0.cm")).unwrap()).unwrap();
    let u = compile_parts(&machine, &ReductionConfig::new(Fragment::WithUntil, Variant::FiniteSat)).unwrap();
    let fg = compile_parts(&machine, &ReductionConfig::new(Fragment::FGOnly, Variant::FiniteSat)).unwrap();
    let names: Vec<&str> = u.parts.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, fg.parts.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>());
    for ((name, a), (_, b)) in u.parts.iter().zip(&fg.parts) {
        let same = name.starts_with("init") || name == "sync";
        assert_eq!(a == b, same, "{name}");
        assert_eq!(stats(b).proper_untils, 0, "{name}");
        if name.starts_with("sim") {
            assert!(stats(a).proper_untils > 0, "{name}");
        }
    }
}

#[test]
fn recurrent_needs_tau() {
    let m0 = fixture("m0.cm");
    let err = run(&["reduce", "--machine", path(&m0), "--variant", "recurrent", "-o", "/dev/null"]).unwrap_err();
    assert_eq!(err.code(), 2);
    let err = run(&["reduce", "--machine", path(&m0), "--variant", "recurrent", "--tau", "7", "-o", "/dev/null"])
        .unwrap_err();
    assert_eq!(err.code(), 2);
}

#[test]
fn witness_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("w.chain");
    let (m0, up) = (fixture("m0.cm"), fixture("inc_forever.cm"));
    let (code, err) = exit_code(&["witness", "--machine", path(&m0), "-o", path(&out_path)]);
    assert_eq!(code, 0, "{err}");
    let chain = parse_chain(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(chain.len(), 1686);
    let manifest: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("w.chain.manifest")).unwrap()).unwrap();
    assert_eq!(manifest.states.len(), 1686);
    assert_eq!(manifest.states[0], "[0, {r1_0_1,r2_0_1}, 0, 0]");

    let (code, err) = exit_code(&["witness", "--machine", path(&up), "--max-steps", "200", "-o", path(&out_path)]);
    assert_eq!(code, 3);
    assert!(err.contains("no repeated configuration within 200 steps"), "{err}");
    let (code, err) = exit_code(&["witness", "--machine", path(&m0), "--state-cap", "1", "-o", path(&out_path)]);
    assert_eq!(code, 3);
    assert!(err.contains("more than 1 states"), "{err}");
}

#[test]
fn verify_m0_is_sat() {
    let m0 = fixture("m0.cm");
    let out = run(&["verify", "--machine", path(&m0)]).unwrap();
    assert_eq!(out.code, 0, "{}", out.report);
    assert_eq!(out.manifest.verdicts["init"], "SAT");
    for part in ["struct1", "init1", "sim1", "struct2", "init2", "sim2", "sync"] {
        assert_eq!(out.manifest.verdicts[part], "true", "{part}");
    }
}

#[test]
fn verify_reports_the_failing_probability() {
    let m0 = fixture("m0.cm");
    let out = run(&["verify", "--machine", path(&m0), "--zero-mode", "printed"]).unwrap();
    assert_eq!(out.code, 4);
    assert_eq!(out.manifest.verdicts["init"], "UNSAT");
    assert_eq!(out.manifest.verdicts["sim1"], "false");
    assert!(out.report.contains("probability 143/144 but required =11/12"), "{}", out.report);
    assert!(out.manifest.notes.iter().any(|n| n == "sim1 fails: probability 143/144 required =11/12"));
}

#[test]
fn verify_on_an_inc_machine_is_unsat() {
    let m = fixture("inc_dec.cm");
    let out = run(&["verify", "--machine", path(&m)]).unwrap();
    assert_eq!(out.code, 4);
    assert_eq!(out.manifest.verdicts["init"], "UNSAT");
    assert_eq!(out.manifest.verdicts["init1"], "true");
    assert_eq!(out.manifest.verdicts["sync"], "true");
    // Lambda sees no E branch on a single-R state, so G(R or E) is 0.
    assert!(out.report.contains("probability 1/1 but required =211/225"), "{}", out.report);
    // The increment's λ family also collects the next step's R states.
    assert!(out.report.contains("probability 36917/39600 but required =211/225"), "{}", out.report);
}

#[test]
fn verify_rejects_irrational_constants_first() {
    let m0 = fixture("m0.cm");
    let err = run(&["verify", "--machine", path(&m0), "--lambda", "14/255"]).unwrap_err();
    assert_eq!(err.code(), 2);
    assert!(err.to_string().contains("irrational endpoints"), "{err}");
}

#[test]
fn geometry_defaults_pass_and_emit_points() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("points");
    let out = run(&["geometry", "--samples", "200", "--depth", "12", "--emit-points", path(&pts)]).unwrap();
    assert_eq!(out.code, 0, "{}", out.report);
    let (_, text) = &out.files[0];
    let rows = text.lines().filter(|l| !l.starts_with("edge")).count();
    assert_eq!(rows, 13);
    assert_eq!(text.lines().next(), Some("0 1/12 1/15"));
    assert_eq!(out.manifest.seed, pctlwb::geometry::lemmas::DEFAULT_SEED);
}

#[test]
fn tampered_inc_is_caught() {
    let mut c = GadgetConstants::default();
    c.lambda += rat(1, 1000);
    let args = GeometryArgs { samples: 200, seed: 7, emit_points: None, depth: 8 };
    let out = geometry_with(&args, &c).unwrap();
    assert_eq!(out.code, 4);
    assert_eq!(out.manifest.verdicts["inc-stays-in-strip"], "false", "{}", out.report);
    assert!(out.report.contains("counterexample inc-stays-in-strip"));
}

#[test]
fn minsky_compile_triples_instructions() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("one.cm");
    let out = run(&["minsky-compile", "--program", path(&fixture("one.minsky")), "-o", path(&out_path)]).unwrap();
    let (_, text) = &out.files[0];
    let machine = parse_machine(text).unwrap();
    assert_eq!(machine.m(), 3);
    machine.validate().unwrap();
    assert!(out.manifest.notes.contains(&"recurrence labels {1,2}".to_string()));
}

#[test]
fn manifests_are_reproducible() {
    let m0 = fixture("m0.cm");
    let a = run(&["reduce", "--machine", path(&m0), "-o", "/dev/null"]).unwrap();
    let b = run(&["reduce", "--machine", path(&m0), "-o", "/dev/null"]).unwrap();
    assert_eq!(a.manifest.without_timings(), b.manifest.without_timings());
    let g1 = run(&["geometry", "--samples", "50", "--seed", "3", "--depth", "4"]).unwrap();
    let g2 = run(&["geometry", "--samples", "50", "--seed", "3", "--depth", "4"]).unwrap();
    assert_eq!(g1.manifest.without_timings().to_json(), g2.manifest.without_timings().to_json());
    assert_eq!(g1.report, g2.report);
}
