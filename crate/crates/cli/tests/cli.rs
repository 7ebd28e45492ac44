use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn kleisli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kleisli")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn validate_exit_codes() {
    let ok = kleisli(&["validate", &fixture("employee.schema"), &fixture("employee.inst")]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    let bad = kleisli(&["validate", &fixture("employee.schema"), &fixture("broken/employee_mutated.inst")]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("path equivalence Employee.manager.worksIn = Employee.worksIn fails at Employee row 101"));
    let missing = kleisli(&["validate", &fixture("employee.schema"), "no/such/file.inst"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn eval_paths() {
    let run = |schema: &str, inst: &str, path: &str, id: &str| {
        let o = kleisli(&["eval", &fixture(schema), &fixture(inst), "--path", path, "--id", id]);
        (code(&o), stdout(&o))
    };
    assert_eq!(run("employee.schema", "employee.inst", "Employee.manager.worksIn", "101"), (0, "q10\n".into()));
    assert_eq!(run("loop.schema", "loop_atomic.inst", "s", "A"), (0, "A\n".into()));
    assert_eq!(run("loop.schema", "markov.inst", "s.f.f", "3"), (0, "14/25 1 + 7/20 2 + 9/100 3\n".into()));
    assert_eq!(run("loop.schema", "markov.inst", "s.f", "9").0, 1);
    assert_eq!(run("loop.schema", "markov.inst", "s.g", "1").0, 1);
}

#[test]
fn morphism_checks() {
    let basic = kleisli(&[
        "check-morphism",
        &fixture("loop.schema"),
        &fixture("loop_atomic.inst"),
        &fixture("loop_atomic.inst"),
        &fixture("loop_collapse.morph"),
    ]);
    assert_eq!(code(&basic), 0, "{}", stdout(&basic));
    let lax = kleisli(&[
        "check-morphism",
        &fixture("loop.schema"),
        &fixture("graph.inst"),
        &fixture("supergraph.inst"),
        &fixture("graph_lax.morph"),
    ]);
    assert_eq!(code(&lax), 0, "{}", stdout(&lax));
}

#[test]
fn transform_to_powerset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("support.inst");
    let o = kleisli(&[
        "transform",
        &fixture("loop.schema"),
        &fixture("markov.inst"),
        "--via",
        "support",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("monad powerset"));
    assert!(text.contains("4 | {1, 2, 4}"));
    let v = kleisli(&["validate", &fixture("loop.schema"), out.to_str().unwrap()]);
    assert_eq!(code(&v), 0);
    let wrong = kleisli(&["transform", &fixture("loop.schema"), &fixture("markov.inst"), "--via", "forget-order"]);
    assert_eq!(code(&wrong), 1);
    let unknown = kleisli(&["transform", &fixture("loop.schema"), &fixture("markov.inst"), "--via", "nope"]);
    assert_eq!(code(&unknown), 2);
}

#[test]
fn retune_from_a_map_file() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("swap.map");
    std::fs::write(&map, "# swap the letters\nfrom {0,1}\nto {0,1}\n0 -> 1\n1 -> 0\n").unwrap();
    let via = format!("inp-retune:{}", map.display());
    let o = kleisli(&["transform", &fixture("loop.schema"), &fixture("fsa.inst"), "--via", &via]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("s0 | 0: s1; 1: s0"));
}

#[test]
fn invert_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, schema) = (dir.path().join("inv.inst"), dir.path().join("inv.schema"));
    let o = kleisli(&[
        "invert",
        &fixture("worksin.schema"),
        &fixture("worksin_atomic.inst"),
        "-o",
        inst.to_str().unwrap(),
        "--schema-out",
        schema.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&inst).unwrap();
    assert!(text.contains("EECS | {Bob, Deb}"));
    assert!(text.contains("Music | {}"));
    assert_eq!(code(&kleisli(&["validate", schema.to_str().unwrap(), inst.to_str().unwrap()])), 0);
}

#[test]
fn machines_run() {
    let turing = kleisli(&[
        "run",
        "turing",
        &fixture("loop.schema"),
        &fixture("turing.inst"),
        "--tape",
        "000000",
        "--max-steps",
        "100",
    ]);
    assert_eq!(stdout(&turing), "halted after 5 steps: ones {-1, 0} head -1\n");
    let fsa = kleisli(&["run", "fsa", &fixture("loop.schema"), &fixture("fsa.inst"), "--id", "s0", "--word", "1,1,1"]);
    assert_eq!(stdout(&fsa), "s1\n");
    let recur = kleisli(&["run", "recur", &fixture("loop.schema"), &fixture("factorial.inst"), "--id", "1_5"]);
    assert_eq!(stdout(&recur), "returned !120 after 6 steps\n");
    let extended = kleisli(&["run", "recur", "--extend", "7", "--id", "1_7"]);
    assert_eq!(stdout(&extended), "returned !5040 after 8 steps\n");
    let markov = kleisli(&["run", "markov", &fixture("loop.schema"), &fixture("markov.inst")]);
    assert_eq!(stdout(&markov), "state | 1 2 3 4\n1 | 1/2 1/2 0 0\n2 | 0 1 0 0\n3 | 7/10 0 3/10 0\n4 | 2/5 3/10 0 3/10\n");
    let iterate = kleisli(&["run", "iterate", &fixture("loop.schema"), &fixture("loop_atomic.inst"), "--id", "A", "--steps", "2"]);
    assert_eq!(stdout(&iterate), "C\n");
    let timeout = kleisli(&[
        "run",
        "turing",
        &fixture("loop.schema"),
        &fixture("turing.inst"),
        "--max-steps",
        "2",
    ]);
    assert_eq!(code(&timeout), 1);
}

#[test]
fn exports() {
    let o = kleisli(&["export", &fixture("loop.schema"), &fixture("graph.inst"), "--format", "dot"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("  \"b\" -> \"c\";\n  \"b\" -> \"c\";\n"));
    let s = kleisli(&["schema-of", &fixture("loop.schema"), &fixture("schemas_listexc.inst")]);
    assert!(stdout(&s).contains("attr Person_c3 : Person -> Int"));
}

#[test]
fn law_harness_is_deterministic() {
    let a = kleisli(&["laws", "--monad", "dist", "--seed", "42", "--cases", "500"]);
    assert_eq!(code(&a), 0);
    let b = kleisli(&["laws", "--monad", "dist", "--seed", "42", "--cases", "500"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&kleisli(&["laws", "--morphism", "support", "--cases", "100"])), 0);
    assert_eq!(code(&kleisli(&["laws", "--morphism", "first-or-null", "--cases", "100"])), 1);
    assert_eq!(code(&kleisli(&["laws", "--morphism", "mutant-last-or-null", "--cases", "100"])), 1);
    assert_eq!(code(&kleisli(&["laws", "--tape-eval", "--cases", "100"])), 0);
    assert_eq!(code(&kleisli(&["laws", "--monad", "bogus"])), 2);
    assert_eq!(code(&kleisli(&["laws"])), 2);
}
