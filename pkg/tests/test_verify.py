import pytest

from latvoa.verify import SCENARIOS, UnknownScenarioError, report_status, run_all, run_scenario


def test_catalog():
    assert set(SCENARIOS) == {"j3j", "lemma-3.1", "u9", "u16", "decompose", "characters",
                              "fusion-spot", "generation", "form-identities"}
    for sc in SCENARIOS.values():
        assert sc.anchor and sc.description


def test_unknown_scenario():
    with pytest.raises(UnknownScenarioError):
        run_scenario("nope")


def test_insufficient_truncation():
    r = run_scenario("u16", truncation=10)
    assert report_status(r) == "insufficient-truncation"
    assert "17" in r["checks"][0]["witness"]


def test_report_shape():
    r = run_scenario("j3j", truncation=8)
    assert set(r) >= {"scenario", "anchor", "checks", "elapsed_ms"}
    assert report_status(r) == "pass"
    assert all(c["status"] == "pass" for c in r["checks"])


def test_run_all_low_truncation():
    out = run_all("quick", truncation=9)
    assert out["ok"]
    statuses = {r["scenario"]: report_status(r) for r in out["reports"]}
    assert statuses["u9"] == "pass"
    assert statuses["decompose"] == "insufficient-truncation"
