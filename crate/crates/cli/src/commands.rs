//! One function per subcommand. Each returns an [`Outcome`] and performs no IO
//! beyond reading its inputs.

use std::fmt::Write;
use std::time::Instant;

use pctlwb::checker::{explain, Checker};
use pctlwb::formula::{parse_formula, print_formula, StateFormula, StateKind};
use pctlwb::geometry::lemmas::{limit_proxy, run_suite, vertex_suite};
use pctlwb::geometry::{GadgetConstants, Geometry};
use pctlwb::machines::{
    minsky_to_counter, parse_machine, parse_minsky, print_machine, recurrence_labels, run_deterministic, CounterMachine,
};
use pctlwb::markov::parse_chain;
use pctlwb::rational::{fmt_compact, fmt_fraction, parse_rat};
use pctlwb::reduction::{audit_provenance, compile_parts, stats, universe, CopyBuilder, Fragment, ReductionConfig};
use pctlwb::witness::{build_witness, lint_witness, WitnessConfig, WitnessReport};

use crate::{
    manifest_path, read_input, CheckArgs, CliError, ConstantOpts, FormulaOpts, GeometryArgs, MinskyArgs, Outcome,
    ReduceArgs, RunManifest, VariantArg, VerifyArgs, WitnessArgs, WitnessOpts,
};

fn constants(opts: &ConstantOpts) -> Result<GadgetConstants, CliError> {
    let d = GadgetConstants::default();
    match &opts.lambda {
        None => Ok(d),
        Some(text) => {
            let lambda = parse_rat(text).map_err(|e| CliError::Input(format!("--lambda: {e}")))?;
            Ok(GadgetConstants::new(lambda, d.z, d.delta, d.rho)?)
        }
    }
}

fn reduction_config(opts: &FormulaOpts, consts: &GadgetConstants) -> Result<ReductionConfig, CliError> {
    let mut cfg = ReductionConfig::new(opts.fragment.into(), opts.variant()?);
    cfg.constants = consts.clone();
    cfg.zero_mode = opts.zero_mode.into();
    Ok(cfg)
}

fn describe(m: &mut RunManifest, opts: &FormulaOpts) {
    m.fragment = Some(format!("{:?}", Fragment::from(opts.fragment)));
    m.variant = Some(match opts.variant {
        VariantArg::Finite => "finite".to_string(),
        VariantArg::Recurrent => {
            let tau: Vec<String> = opts.tau.iter().map(|l| l.to_string()).collect();
            format!("recurrent {{{}}}", tau.join(","))
        }
    });
    m.notes.push(format!("zero mode {:?}", opts.zero_mode));
}

fn two_counter(text: &str) -> Result<CounterMachine, CliError> {
    let m = parse_machine(text)?;
    if m.d != 2 {
        return Err(CliError::Input(format!("the reduction needs a two-counter machine, got {} counters", m.d)));
    }
    Ok(m)
}

fn build(m: &CounterMachine, opts: &WitnessOpts, consts: &GadgetConstants) -> Result<WitnessReport, CliError> {
    if !m.is_deterministic() {
        return Err(CliError::Input("witness construction needs a deterministic machine".into()));
    }
    let lasso = run_deterministic(m, opts.max_steps)?;
    let cfg = WitnessConfig { constants: consts.clone(), r_mode: opts.r_mode.into(), state_cap: opts.state_cap };
    Ok(build_witness(m, &lasso, &cfg)?)
}

/// `P` operators reachable from the root through boolean connectives only.
fn top_level_probs(phi: &StateFormula, out: &mut Vec<StateFormula>) {
    match phi.kind() {
        StateKind::Prob(..) => {
            if !out.contains(phi) {
                out.push(phi.clone());
            }
        }
        StateKind::Not(a) => top_level_probs(a, out),
        StateKind::And(a, b) => {
            top_level_probs(a, out);
            top_level_probs(b, out);
        }
        StateKind::True | StateKind::Atom(_) => {}
    }
}

pub(crate) fn check(a: &CheckArgs) -> Result<Outcome, CliError> {
    let mut man = RunManifest::new("check", 0);
    let chain = parse_chain(&read_input(&a.chain, &mut man)?)?;
    let phi = parse_formula(&read_input(&a.formula, &mut man)?)?;
    let states: Vec<usize> = match &a.state {
        Some(name) => vec![chain.id_of(name).ok_or_else(|| CliError::Input(format!("unknown state {name}")))?],
        None => (0..chain.len()).collect(),
    };
    let t = Instant::now();
    let mut ch = Checker::new(&chain);
    let sat = ch.sat(&phi)?.clone();
    man.time("check", t);
    let mut report = String::new();
    for &s in &states {
        let v = sat.contains(s);
        let _ = writeln!(report, "{}: {v}", chain.names[s]);
        man.verdict(chain.names[s].clone(), v);
    }
    if a.probs {
        let mut probs = Vec::new();
        top_level_probs(&phi, &mut probs);
        for p in probs {
            let StateKind::Prob(path, _, _) = p.kind() else { unreachable!() };
            let v = ch.path_probs(path)?;
            let _ = writeln!(report, "{}:", print_formula(&p));
            for &s in &states {
                let _ = writeln!(report, "  {}: {}", chain.names[s], fmt_compact(&v[s]));
            }
        }
    }
    let mut out = Outcome::new(report, man);
    if let Some(path) = &a.out {
        let text = out.report.clone();
        out.emit(path, text);
        out.manifest_path = Some(manifest_path(path));
    }
    Ok(out)
}

pub(crate) fn reduce(a: &ReduceArgs) -> Result<Outcome, CliError> {
    let mut man = RunManifest::new("reduce", 0);
    let machine = two_counter(&read_input(&a.machine, &mut man)?)?;
    let consts = constants(&a.constants)?;
    let cfg = reduction_config(&a.formula, &consts)?;
    man.constants(&consts);
    describe(&mut man, &a.formula);
    let t = Instant::now();
    let compiled = compile_parts(&machine, &cfg)?;
    man.time("compile", t);
    let foreign = audit_provenance(&machine, &cfg)?;
    let st = stats(&compiled.formula);
    man.atoms = universe(machine.m()).iter().map(|p| p.to_string()).collect();
    man.verdict("atoms", st.atoms);
    man.verdict("universe", man.atoms.len());
    man.verdict("state_nodes", st.state_nodes);
    man.verdict("prob_nodes", st.prob_nodes);
    man.verdict("proper_untils", st.proper_untils);
    man.verdict("tree_size", st.tree_size);
    man.verdict("depth", st.depth);
    man.verdict("provenance", if foreign.is_empty() { "clean".to_string() } else { foreign.join("; ") });
    let mut report = format!(
        "{} instructions, {} atoms, {} distinct subformulae, tree size {}, depth {}\n",
        machine.m(),
        st.atoms,
        st.state_nodes,
        st.tree_size,
        st.depth
    );
    for (name, part) in &compiled.parts {
        let ps = stats(part);
        let _ = writeln!(report, "  {name}: {} subformulae, {} P nodes", ps.state_nodes, ps.prob_nodes);
    }
    let mut out = Outcome::new(report, man);
    out.emit(&a.out, print_formula(&compiled.formula) + "\n");
    out.manifest_path = Some(manifest_path(&a.out));
    if !foreign.is_empty() {
        out.code = 4;
        out.report.push_str(&format!("copy-local formulae mention foreign atoms: {}\n", foreign.join("; ")));
    }
    Ok(out)
}

pub(crate) fn witness(a: &WitnessArgs) -> Result<Outcome, CliError> {
    let mut man = RunManifest::new("witness", 0);
    let machine = two_counter(&read_input(&a.machine, &mut man)?)?;
    let consts = constants(&a.constants)?;
    man.constants(&consts);
    man.notes.push(format!("r mode {:?}", a.witness.r_mode));
    let t = Instant::now();
    let rep = build(&machine, &a.witness, &consts)?;
    man.time("build", t);
    let lint = lint_witness(&rep);
    let mut report = format!(
        "{} states, {} transitions, init {}\n",
        rep.chain.len(),
        rep.chain.transitions(),
        rep.chain.names[rep.init]
    );
    for d in &rep.diagnostics {
        let _ = writeln!(report, "diagnostic: {d}");
        man.notes.push(d.to_string());
    }
    let mut ok = true;
    for item in &lint {
        ok &= item.passed;
        let _ = writeln!(report, "lint {}: {} {}", item.name, if item.passed { "pass" } else { "FAIL" }, item.detail);
        man.verdict(format!("lint {}", item.name), item.passed);
    }
    man.verdict("states", rep.chain.len());
    man.verdict("transitions", rep.chain.transitions());
    man.states = rep.states.iter().map(|s| s.to_string()).collect();
    let mut out = Outcome::new(report, man);
    out.emit(&a.out, pctlwb::markov::print_chain(&rep.chain));
    out.manifest_path = Some(manifest_path(&a.out));
    if !ok {
        out.code = 4;
    }
    Ok(out)
}

pub(crate) fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let mut man = RunManifest::new("verify", 0);
    let machine = two_counter(&read_input(&a.machine, &mut man)?)?;
    let consts = constants(&a.constants)?;
    let cfg = reduction_config(&a.formula, &consts)?;
    cfg.validate(machine.m())?;
    man.constants(&consts);
    describe(&mut man, &a.formula);
    man.notes.push(format!("r mode {:?}", a.witness.r_mode));

    let t = Instant::now();
    let compiled = compile_parts(&machine, &cfg)?;
    man.time("compile", t);
    let t = Instant::now();
    let rep = build(&machine, &a.witness, &consts)?;
    man.time("witness", t);
    let st = stats(&compiled.formula);
    let mut report = format!(
        "formula: {} distinct subformulae, {} P nodes, tree size {}\nchain: {} states, {} transitions\n",
        st.state_nodes,
        st.prob_nodes,
        st.tree_size,
        rep.chain.len(),
        rep.chain.transitions()
    );
    for d in &rep.diagnostics {
        let _ = writeln!(report, "diagnostic: {d}");
        man.notes.push(d.to_string());
    }

    let t = Instant::now();
    let mut ch = Checker::new(&rep.chain).parallel(!a.sequential);
    let mut all = true;
    for (name, part) in &compiled.parts {
        let holds = ch.holds(part, rep.init)?;
        all &= holds;
        man.verdict(name.clone(), holds);
        let _ = writeln!(report, "{name}: {}", if holds { "holds" } else { "FAILS" });
        if !holds {
            if let Some(e) = explain(&mut ch, part, rep.init)? {
                let text = e.to_string();
                for line in text.lines() {
                    let _ = writeln!(report, "  {line}");
                }
                if let Some((p, cmp, r)) = &e.probability {
                    man.notes.push(format!(
                        "{name} fails: probability {} required {}{}",
                        fmt_fraction(p),
                        cmp.symbol(),
                        fmt_fraction(r)
                    ));
                }
            }
        }
    }
    let whole = ch.holds(&compiled.formula, rep.init)?;
    if whole != all {
        return Err(CliError::Internal("the conjunction disagrees with its conjuncts".into()));
    }

    if Fragment::from(a.formula.fragment) == Fragment::FGOnly {
        for k in 1..=2u8 {
            let b = CopyBuilder::new(machine.m(), k, &cfg)?;
            let full = ch.sat(&b.build_struct_for(Fragment::WithUntil)?)?.clone();
            let bar = ch.sat(&b.build_struct_for(Fragment::FGOnly)?)?.clone();
            let escapes = bar.difference(&full).count();
            let _ = writeln!(
                report,
                "copy {k}: struct-bar at {} states, struct at {}, struct-bar without struct at {escapes}",
                bar.count_ones(..),
                full.count_ones(..)
            );
            man.verdict(format!("struct-bar implies struct {k}"), escapes == 0);
            man.verdict(format!("struct-bar states {k}"), bar.count_ones(..));
            all &= escapes == 0;
        }
    }
    man.time("check", t);
    let verdict = if whole { "SAT" } else { "UNSAT" };
    man.verdict("init", verdict);
    let _ = writeln!(report, "verdict at init {}: {verdict}", rep.chain.names[rep.init]);
    let mut out = Outcome::new(report, man);
    if let Some(path) = &a.out {
        let text = out.report.clone();
        out.emit(path, text);
        out.manifest_path = Some(manifest_path(path));
    }
    if !all {
        out.code = 4;
    }
    Ok(out)
}

pub fn run_geometry(a: &GeometryArgs) -> Result<Outcome, CliError> {
    geometry_with(a, &GadgetConstants::default())
}

/// `geometry` with explicit constants, which need not be consistent.
pub fn geometry_with(a: &GeometryArgs, consts: &GadgetConstants) -> Result<Outcome, CliError> {
    let mut man = RunManifest::new("geometry", a.seed);
    man.constants(consts);
    let mut report = String::new();
    let mut failures = 0;

    let t = Instant::now();
    let suite = run_suite(consts, a.samples, a.seed)?;
    man.time("suite", t);
    for (check, n) in &suite.checked {
        let bad = suite.failures(check);
        failures += bad;
        let _ = writeln!(report, "{check}: {n} checked, {bad} counterexamples");
        man.verdict(*check, bad == 0);
    }
    for c in suite.counterexamples.iter().take(5) {
        let _ = writeln!(report, "  counterexample {c}");
    }

    let g = Geometry::new(consts.clone());
    let t = Instant::now();
    match vertex_suite(&g, a.samples, a.seed) {
        Ok(vertex) => {
            failures += vertex.len();
            let _ = writeln!(report, "vertex-carrier: {} trials, {} counterexamples", a.samples, vertex.len());
            for c in vertex.iter().take(5) {
                let _ = writeln!(report, "  counterexample {c}");
            }
            man.verdict("vertex-carrier", vertex.is_empty());
        }
        Err(e) => {
            failures += 1;
            let _ = writeln!(report, "vertex-carrier: error {e}");
            man.verdict("vertex-carrier", false);
        }
    }
    man.time("vertex", t);

    let t = Instant::now();
    match limit_proxy(&g, a.depth) {
        Ok(limit) => {
            let _ = writeln!(
                report,
                "limit at depth {}: decreasing {}, gap {} ({})",
                limit.depth,
                limit.strictly_decreasing,
                fmt_compact(&limit.gap),
                if limit.passed() { "below 1e-6" } else { "FAIL" }
            );
            man.verdict("limit", limit.passed());
            if !limit.passed() {
                failures += 1;
            }
        }
        Err(e) => {
            failures += 1;
            let _ = writeln!(report, "limit: error {e}");
            man.verdict("limit", false);
        }
    }
    man.time("limit", t);

    let mut out = Outcome::new(report, man);
    if let Some(path) = &a.emit_points {
        out.emit(path, g.points_file(a.depth)?);
        out.manifest_path = Some(manifest_path(path));
    }
    if failures > 0 {
        out.code = 4;
    }
    Ok(out)
}

pub(crate) fn minsky_compile(a: &MinskyArgs) -> Result<Outcome, CliError> {
    let mut man = RunManifest::new("minsky-compile", 0);
    let program = parse_minsky(&read_input(&a.program, &mut man)?)?;
    if program.d != 2 {
        return Err(CliError::Input(format!("expected a two-counter program, got {} counters", program.d)));
    }
    let machine = minsky_to_counter(&program)?;
    let tau: Vec<String> = recurrence_labels(&program).iter().map(|l| l.to_string()).collect();
    man.notes.push(format!("recurrence labels {{{}}}", tau.join(",")));
    man.verdict("minsky instructions", program.m());
    man.verdict("instructions", machine.m());
    let report = format!(
        "{} Minsky instructions -> {} counter-machine instructions; recurrence labels {{{}}}\n",
        program.m(),
        machine.m(),
        tau.join(",")
    );
    let mut out = Outcome::new(report, man);
    out.emit(&a.out, print_machine(&machine));
    out.manifest_path = Some(manifest_path(&a.out));
    Ok(out)
}
