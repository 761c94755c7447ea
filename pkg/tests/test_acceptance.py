"""End-to-end acceptance checks, one test per criterion.

Each test prints a PASS/FAIL line; the lines are repeated in the terminal
summary (see conftest.py) so they show without -s.
"""
import subprocess
import sys
import time
from pathlib import Path

import pytest

from latvoa.verify import report_status, run_scenario

RESULTS: list[str] = []
N = 17
TESTS = Path(__file__).parent


def record(label: str, ok: bool, started: float, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] {label} ({time.perf_counter() - started:.1f}s){' ' + detail if detail else ''}"
    RESULTS.append(line)
    print(line)
    return ok


def failing(report: dict) -> list[str]:
    return [f"{c['label']}: {c['status']} {c['witness']}" for c in report["checks"]
            if c["status"] not in ("pass", "skipped")]


def scenario_criterion(label: str, name: str, truncation: int = N, level: str = "quick",
                       require: str | None = None):
    t = time.perf_counter()
    rep = run_scenario(name, truncation=truncation, level=level)
    ok = report_status(rep) == "pass"
    if require is not None:
        ok = ok and any(c["label"] == require and c["status"] == "pass" for c in rep["checks"])
    record(label, ok, t, "; ".join(failing(rep)))
    assert ok, failing(rep)


def test_criterion_01_weight4_products():
    scenario_criterion("criterion 1: J_3 J and E_3 E", "j3j", truncation=8)


def test_criterion_02_k_invariants_weight4():
    scenario_criterion("criterion 2: K-invariants at weight 4, sigma eigenvectors", "lemma-3.1", truncation=8)


def test_criterion_03_u9():
    scenario_criterion("criterion 3: u9 explicit form and primarity", "u9", truncation=9)


def test_criterion_04_u16():
    scenario_criterion("criterion 4: weight-16 split and u16", "u16")


def test_criterion_05a_multiplicities():
    scenario_criterion("criterion 5a: a3 = 1, a4 = 1", "decompose")


@pytest.mark.slow
def test_criterion_05b_no_weight25_primary():
    scenario_criterion("criterion 5b: a5 = 0 at N = 26", "decompose", truncation=26, level="full",
                       require="a5 = 0 (no primary of weight 25)")


def test_criterion_06_characters():
    scenario_criterion("criterion 6: trace averages and Virasoro characters", "characters")


def test_criterion_07_fusion():
    scenario_criterion("criterion 7: fusion confinement of u9 products", "fusion-spot")


def test_criterion_08_generation():
    scenario_criterion("criterion 8: closure of u9 matches V^A4 through 14", "generation", truncation=14)


PROPERTY_SUITES = [
    "test_scalars.py::test_field_axioms",
    "test_scalars.py::test_inverse_property",
    "test_fock.py::test_form_adjoint_laws",
    "test_fock.py::test_form_symmetric",
    "test_symmetry.py::test_automorphism_property",
    "test_symmetry.py::test_group_orders",
    "test_symmetry.py::test_orders_on_graded_pieces",
    "test_vertex.py::test_virasoro_brackets",
    "test_vertex.py::test_commutator_formula",
    "test_symmetry.py::test_reynolds_idempotent",
    "test_virasoro.py::test_projection_completeness",
]


def test_criterion_09_property_suites():
    t = time.perf_counter()
    ids = [str(TESTS / s) for s in PROPERTY_SUITES]
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *ids],
                          capture_output=True, text=True, cwd=TESTS.parent)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    ok = record("criterion 9: property suites", proc.returncode == 0, t, tail)
    assert ok, proc.stdout[-3000:]


def test_criterion_10_form_identities():
    scenario_criterion("criterion 10: invariant form identities for u9, u16", "form-identities")
