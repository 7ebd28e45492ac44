"""Smoke test for the kleisli_db extension module.

Build it first:

    cargo build -p kleisli-py --release --features extension-module
    python3 python/smoke_test.py
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def load_module():
    try:
        import kleisli_db

        return kleisli_db
    except ImportError:
        pass
    for profile in ("release", "debug"):
        built = ROOT / "target" / profile / "libkleisli_db.so"
        if built.exists():
            target = pathlib.Path(tempfile.mkdtemp()) / "kleisli_db.so"
            shutil.copy(built, target)
            spec = importlib.util.spec_from_file_location("kleisli_db", target)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("kleisli_db not built; see the module docstring")


def read(name):
    return (FIXTURES / name).read_text()


def main():
    kdb = load_module()
    loop = kdb.Schema(read("loop.schema"))
    employee = kdb.Schema(read("employee.schema"))

    emp = kdb.Instance(employee, read("employee.inst"))
    assert emp.is_valid()
    assert emp.eval("Employee.manager.worksIn", "101") == "q10"

    broken = kdb.Instance(employee, read("broken/employee_mutated.inst"))
    assert not broken.is_valid()
    assert any("Employee row 101" in v for v in broken.violations())
    try:
        kdb.Instance(employee, "instance e over Employee\nmonad atomic\n\ntable Employee\nid | manager\n1 | 2\n")
        raise AssertionError("dangling reference accepted")
    except ValueError:
        pass

    markov = kdb.Instance(loop, read("markov.inst"))
    assert markov.eval("s.f.f", "3") == "14/25 1 + 7/20 2 + 9/100 3"
    states, matrix = markov.markov_matrix()
    assert states == ["1", "2", "3", "4"] and matrix[2] == ["7/10", "0", "3/10", "0"]
    support = markov.transform("support")
    assert support.tag.kind == "powerset" and support.is_valid()

    turing = kdb.Instance(loop, read("turing.inst")).run_turing(tape="000000", max_steps=100)
    assert (turing.kind, turing.steps, turing.ones, turing.head) == ("halted", 5, [-1, 0], -1)
    fact = kdb.factorial_instance(7).run_recursive("1_7")
    assert (fact.kind, fact.label) == ("returned", "5040")
    assert kdb.Instance(loop, read("fsa.inst")).run_fsa("s0", ["1", "1", "1"]) == "s1"
    assert kdb.Instance(loop, read("graph.inst")).export_dot().startswith('digraph "graph" {')

    dist = kdb.MonadTag("dist")
    assert dist.values_eq("1/2 a + 1/2 b", "1/2 b + 1/2 a")
    passed, _ = dist.check_laws(cases=50, seed=7)
    assert passed
    assert kdb.morphism_laws("support", cases=50)[0]
    assert not kdb.morphism_laws("mutant-last-or-null", cases=50)[0]
    assert kdb.tape_eval_witness(cases=50)[0]

    atomic = kdb.Instance(loop, read("loop_atomic.inst"))
    ok, _ = kdb.check_morphism(atomic, atomic, read("loop_collapse.morph"))
    assert ok
    print("smoke test passed")


if __name__ == "__main__":
    main()
