//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Set `MPS_BLESS=1` to rewrite the golden files under `tests/golden`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use mmlk::arena::{AgentId, ExplicitArena, StateId};
use mmlk::cost::{check_axioms, Cost, CostModel, Depth, QueryCount, Weighted};
use mmlk::fuzz::{check_instance, random_instances, Bounds, CheckOptions, Instance, Property};
use mmlk::oracle::{min_cost, naive_model_check};
use mmlk::proof::{check_proof, extract, proof_cost, Polarity, ProofTree, Violation};
use mmlk::{engine::SelectionRule, mps_solve};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const CASES: usize = 1000;
const ENUMERATION_BOUND: usize = 12;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn criterion(property: Property) -> usize {
    match property {
        Property::Verdict | Property::Engine => 1,
        Property::Minimality => 2,
        Property::CostIdentity => 3,
        Property::ProofValidity => 4,
        Property::Admissibility | Property::EnumeratedAdmissibility | Property::EnumerationAgreement => 5,
        Property::Monotonicity | Property::LowerBound | Property::SolvingCharacterization | Property::DescentSafety => {
            6
        }
        Property::IterationBound | Property::QueryLocality => 7,
    }
}

/// Everything criteria 1 to 7 need from one pass over the random corpus.
#[derive(Default)]
struct Corpus {
    instances: usize,
    verdict_mismatches: usize,
    cost_mismatches: usize,
    identity_mismatches: usize,
    rejected_proofs: usize,
    drop_mutations: usize,
    flip_mutations: usize,
    mutation_errors: Vec<String>,
    enumerated: usize,
    snapshot_instances: usize,
    /// First failure reported by the property checker, per criterion.
    failures: BTreeMap<usize, (usize, String)>,
    seconds: f64,
}

fn corpus() -> Corpus {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let options = CheckOptions {
        snapshots: true,
        enumeration_bound: Some(ENUMERATION_BOUND),
        selection: SelectionRule::MinimalDisproof,
    };
    let mut c = Corpus::default();
    for _ in 0..CASES {
        for inst in random_instances(&mut rng, &Bounds::default()) {
            c.instances += 1;
            direct_checks(&inst, &mut c);
            match check_instance(&inst, &options) {
                Ok(stats) => {
                    c.snapshot_instances += usize::from(stats.snapshots > 0);
                    c.enumerated += usize::from(stats.enumerated.is_some());
                }
                Err(failure) => {
                    let entry =
                        c.failures.entry(criterion(failure.property)).or_insert((0, format!("{failure}\n{inst}")));
                    entry.0 += 1;
                }
            }
        }
    }
    c.seconds = started.elapsed().as_secs_f64();
    c
}

/// Criteria 1 to 4 computed here from the public API, independently of the
/// property checker.
fn direct_checks(inst: &Instance, c: &mut Corpus) {
    let arena = &inst.arena;
    let holds = naive_model_check(arena, &inst.state, &inst.formula).expect("known state");
    let result = mps_solve(arena, inst.state.clone(), inst.formula.clone(), &inst.model).expect("search succeeds");
    if (result.verdict == Polarity::Proof) != holds {
        c.verdict_mismatches += 1;
        return;
    }
    let Ok(proof) = extract(&inst.model, &result.tree) else {
        c.rejected_proofs += 1;
        return;
    };
    let k = proof_cost(&inst.model, &proof);
    let truth = min_cost(arena, &inst.state, &inst.formula, &inst.model).expect("known state");
    let expected = if holds { truth.min_proof_cost } else { truth.min_disproof_cost };
    c.cost_mismatches += usize::from(k != expected);
    c.identity_mismatches += usize::from(k != result.cost() || !k.is_finite());
    if check_proof(arena, &proof).is_err() {
        c.rejected_proofs += 1;
        return;
    }
    mutate(arena, &proof, c);
}

fn paths<S>(tree: &ProofTree<S>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (i, child) in tree.children.iter().enumerate() {
        prefix.push(i);
        paths(child, prefix, out);
        prefix.pop();
    }
}

/// Drops one child of every proved box and flips the label behind every
/// atom leaf, and checks that each mutant is rejected for the right reason.
fn mutate(arena: &ExplicitArena, proof: &ProofTree<StateId>, c: &mut Corpus) {
    let mut all = Vec::new();
    paths(proof, &mut Vec::new(), &mut all);
    for path in all {
        let node = proof.at(&path).unwrap();
        match &node.formula {
            mmlk::Formula::Box(..) if node.polarity == Polarity::Proof && !node.children.is_empty() => {
                for drop in 0..node.children.len() {
                    let mut mutant = proof.clone();
                    let dropped = mutant.at_mut(&path).unwrap().children.remove(drop);
                    c.drop_mutations += 1;
                    match check_proof(arena, &mutant) {
                        Err(e)
                            if e.path == path
                                && e.violation == Violation::MissingSuccessor(dropped.state.to_string()) => {}
                        other => c.mutation_errors.push(format!("dropping {path:?}/{drop}: {other:?}")),
                    }
                }
            }
            mmlk::Formula::Atom(p) => {
                let flipped = flip_label(arena, &node.state, p.as_str());
                let expected = match node.polarity {
                    Polarity::Proof => Violation::AtomNotInLabels,
                    Polarity::Disproof => Violation::AtomInLabels,
                };
                c.flip_mutations += 1;
                match check_proof(&flipped, proof) {
                    Err(e) if e.violation == expected && e.state == node.state.to_string() => {}
                    other => c.mutation_errors.push(format!("flipping {p} at {}: {other:?}", node.state)),
                }
            }
            _ => {}
        }
    }
}

/// Copy of `arena` with `atom` toggled in the labels of `state`.
fn flip_label(arena: &ExplicitArena, state: &StateId, atom: &str) -> ExplicitArena {
    let mut doc: serde_json::Value = serde_json::from_str(&arena.to_text()).unwrap();
    for s in doc["states"].as_array_mut().unwrap() {
        if s["id"] == state.as_str() {
            let labels = s["labels"].as_array_mut().unwrap();
            match labels.iter().position(|l| l == atom) {
                Some(i) => {
                    labels.remove(i);
                }
                None => labels.push(atom.into()),
            }
        }
    }
    ExplicitArena::load(&doc.to_string()).unwrap()
}

/// Hand-built mutants around fixture A1. `[a]p` does not hold at q0, so the
/// proved box is checked against a copy of A1 where q2 also carries `p`.
fn a1_mutations() -> Result<(), String> {
    let arena = mmlk::fixtures::a1();
    let q = |s: &str| arena.state(s).unwrap();
    let p = mmlk::Formula::atom("p");
    let box_p = mmlk::Formula::boxed("a", p.clone());
    let both = ExplicitArena::load(
        &mmlk::fixtures::A1.replace(r#""id": "q2", "labels": []"#, r#""id": "q2", "labels": ["p"]"#),
    )
    .unwrap();
    let full = ProofTree {
        state: q("q0"),
        formula: box_p.clone(),
        polarity: Polarity::Proof,
        children: vec![
            ProofTree::leaf(q("q1"), p.clone(), Polarity::Proof),
            ProofTree::leaf(q("q2"), p.clone(), Polarity::Proof),
        ],
    };
    check_proof(&both, &full).map_err(|e| format!("full box proof rejected: {e}"))?;
    let mut missing = full.clone();
    missing.children.pop();
    match check_proof(&both, &missing) {
        Err(e) if e.violation.to_string() == "missing successor q2" => {}
        other => return Err(format!("dropped q2 child: {other:?}")),
    }
    match check_proof(&arena, &full) {
        Err(e) if e.violation == Violation::AtomNotInLabels && e.path == [1] => {}
        other => return Err(format!("flipped p at q2: {other:?}")),
    }
    let disproof = mps_solve(&arena, q("q0"), box_p, &QueryCount).unwrap();
    let tree = extract(&QueryCount, &disproof.tree).unwrap();
    check_proof(&arena, &tree).map_err(|e| format!("extracted disproof rejected: {e}"))?;
    Ok(())
}

/// Criterion 8: random multisets over {0, 0.5, 1, 2, inf} of up to six
/// elements, for every builtin model.
fn axioms() -> (Outcome, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let values = [0.0, 0.5, 1.0, 2.0, f64::INFINITY].map(|v| Cost::new(v).unwrap());
    let agents = [AgentId::new("a"), AgentId::new("b")];
    let mut checked = 0;
    for round in 0..12_000 {
        let weighted = Weighted::new()
            .with_box_cost("a", *values[..4].choose(&mut rng).unwrap())
            .with_box_cost("b", *values[..4].choose(&mut rng).unwrap());
        let models: [&dyn CostModel; 4] = [&Depth, &QueryCount, &Weighted::new(), &weighted];
        let len = rng.gen_range(0..=6);
        let base: Vec<Cost> = (0..len).map(|_| *values.choose(&mut rng).unwrap()).collect();
        let x = *values.choose(&mut rng).unwrap();
        let y = *values.choose(&mut rng).unwrap();
        for model in models {
            if let Err(e) = check_axioms(model, &agents, &base, x, y) {
                return (Outcome::new(false, format!("round {round}: {e}")), checked);
            }
        }
        checked += 1;
    }
    (Outcome::new(checked >= 10_000, format!("{checked} multisets x 4 models, 0 violations")), checked)
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mps")
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// stdout, structured export, dot export
type CliOutput = (Vec<u8>, Vec<u8>, Vec<u8>);

/// Runs `mps check` once per export format.
fn cli_run(cost: &str, formula: &str, scratch: &Path) -> Result<CliOutput, String> {
    let arena = manifest_dir().join("tests/fixtures/a1.json");
    let mut exports = Vec::new();
    let mut report = None;
    for format in ["structured", "dot"] {
        let target = scratch.join(format!("proof.{format}"));
        let _ = fs::remove_file(&target);
        let output = Command::new(bin())
            .args([
                "check",
                "--state",
                "q0",
                "--verify",
                "--oracle",
                "--formula",
                formula,
                "--cost",
                cost,
                "--format",
                format,
            ])
            .arg("--arena")
            .arg(&arena)
            .arg("--export-proof")
            .arg(&target)
            .output()
            .map_err(|e| e.to_string())?;
        if !matches!(output.status.code(), Some(0 | 1)) {
            return Err(format!("exit {:?}: {}", output.status.code(), String::from_utf8_lossy(&output.stderr)));
        }
        match &report {
            None => report = Some(output.stdout),
            Some(first) if *first != output.stdout => return Err("report differs between formats".into()),
            Some(_) => {}
        }
        exports.push(fs::read(&target).map_err(|e| e.to_string())?);
    }
    let dot = exports.pop().unwrap();
    let structured = exports.pop().unwrap();
    Ok((report.unwrap(), structured, dot))
}

/// Criterion 9: repeated CLI runs are byte-identical and match the goldens.
fn determinism() -> Outcome {
    let bless = std::env::var_os("MPS_BLESS").is_some();
    let golden = manifest_dir().join("tests/golden");
    let scratch = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    fs::create_dir_all(&scratch).unwrap();
    let weights = manifest_dir().join("tests/fixtures/a1_weights.json");
    let costs = [
        ("depth", "depth".to_string()),
        ("query_count", "query_count".to_string()),
        ("weighted", format!("weighted:{}", weights.display())),
    ];
    let formulas = [("box_p", "[a]p"), ("diamond_p", "<a>p"), ("mixed", "<a>p & [a](p | !p)")];
    let mut compared = 0;
    for (model, cost) in &costs {
        for (tag, formula) in formulas {
            let first = match cli_run(cost, formula, &scratch) {
                Ok(r) => r,
                Err(e) => return Outcome::new(false, format!("{model} {formula}: {e}")),
            };
            for _ in 0..2 {
                match cli_run(cost, formula, &scratch) {
                    Ok(again) if again == first => {}
                    Ok(_) => return Outcome::new(false, format!("{model} {formula}: output changed between runs")),
                    Err(e) => return Outcome::new(false, format!("{model} {formula}: {e}")),
                }
            }
            for (ext, bytes) in [("report", &first.0), ("json", &first.1), ("dot", &first.2)] {
                let path = golden.join(format!("a1_{model}_{tag}.{ext}"));
                if bless {
                    fs::write(&path, bytes).unwrap();
                }
                match fs::read(&path) {
                    Ok(expected) if expected == *bytes => compared += 1,
                    Ok(_) => return Outcome::new(false, format!("{} differs from the current output", path.display())),
                    Err(e) => return Outcome::new(false, format!("{}: {e}", path.display())),
                }
            }
        }
    }
    Outcome::new(true, format!("3 runs each, {compared} golden files identical"))
}

/// A search that descends into the first unsolved child must be caught.
fn negative_control() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let options = CheckOptions { selection: SelectionRule::FirstUnsolved, ..CheckOptions::default() };
    for case in 0..CASES {
        for inst in random_instances(&mut rng, &Bounds::default()) {
            if let Err(failure) = check_instance(&inst, &options) {
                return Outcome::new(true, format!("case {case}: {}", failure.property));
            }
        }
    }
    Outcome::new(false, "corrupted selection went unnoticed")
}

fn count_line(c: &Corpus, number: usize, extra: bool, detail: String) -> Outcome {
    match c.failures.get(&number) {
        Some((n, first)) => Outcome::new(false, format!("{n} failing instances, first:\n{first}")),
        None => Outcome::new(extra, detail),
    }
}

fn main() -> ExitCode {
    let c = corpus();
    let a1 = a1_mutations();
    let mut lines: Vec<(usize, &str, Outcome)> = Vec::new();

    let verdict_ok = c.verdict_mismatches == 0 && c.seconds < 60.0;
    lines.push((
        1,
        "oracle verdict equivalence",
        count_line(
            &c,
            1,
            verdict_ok,
            format!("{} instances, {} mismatches, {:.2}s", c.instances, c.verdict_mismatches, c.seconds),
        ),
    ));
    lines.push((
        2,
        "minimality",
        count_line(&c, 2, c.cost_mismatches == 0, format!("{} mismatches", c.cost_mismatches)),
    ));
    lines.push((
        3,
        "cost identity",
        count_line(&c, 3, c.identity_mismatches == 0, format!("{} mismatches", c.identity_mismatches)),
    ));
    let validity_ok =
        c.rejected_proofs == 0 && c.mutation_errors.is_empty() && c.drop_mutations > 0 && c.flip_mutations > 0;
    let validity = match (&a1, c.mutation_errors.first()) {
        (Err(e), _) => Outcome::new(false, format!("fixture A1: {e}")),
        (_, Some(e)) => Outcome::new(false, format!("{} wrong mutation verdicts, first: {e}", c.mutation_errors.len())),
        _ => count_line(
            &c,
            4,
            validity_ok,
            format!(
                "{} rejected, {} dropped-child and {} flipped-atom mutants caught",
                c.rejected_proofs, c.drop_mutations, c.flip_mutations
            ),
        ),
    };
    lines.push((4, "proof validity", validity));
    lines.push((
        5,
        "admissibility",
        count_line(
            &c,
            5,
            c.enumerated >= 100,
            format!("{} instances, {} with untruncated enumeration", c.instances, c.enumerated),
        ),
    ));
    lines.push((
        6,
        "monotonicity and lower bound",
        count_line(&c, 6, c.snapshot_instances >= 100, format!("{} instances with snapshots", c.snapshot_instances)),
    ));
    lines.push((7, "termination and locality", count_line(&c, 7, true, format!("{} instances", c.instances))));
    lines.push((8, "aggregator axioms", axioms().0));
    lines.push((9, "end-to-end determinism", determinism()));

    let mut failed = false;
    for (number, name, outcome) in &lines {
        failed |= !outcome.pass;
        println!("criterion {number} {}: {name}: {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
    }
    let control = negative_control();
    failed |= !control.pass;
    println!(
        "negative control {}: corrupted selection detected: {}",
        if control.pass { "PASS" } else { "FAIL" },
        control.detail
    );
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
