import json
from pathlib import Path

import pytest

from ellis_lab.suite import (
    MUTATIONS,
    ConfigError,
    MalformedCertificate,
    SuiteConfig,
    dumps,
    local_battery,
    mutate,
    run_suite,
    verify,
    verify_cases,
)

SUITES = Path(__file__).resolve().parent.parent / "suites"


@pytest.fixture(scope="module")
def smoke():
    return run_suite(SuiteConfig.from_file(SUITES / "smoke.json"))


def test_smoke_suite_passes_and_verifies(smoke):
    assert smoke.ok and smoke.data["summary"] == {"pass": 8, "fail": 0, "inconclusive": 0}
    assert verify(smoke.data)


def test_report_round_trips_through_bytes(smoke):
    assert json.loads(smoke.dumps()) == smoke.data
    assert "timing" not in smoke.data and "timing" in smoke.to_json(timings=True)


def test_same_seed_same_bytes_other_seed_differs(smoke):
    again = run_suite(SuiteConfig.from_file(SUITES / "smoke.json"))
    assert again.dumps() == smoke.dumps()
    other = run_suite(SuiteConfig.from_file(SUITES / "smoke.json", seed=8))
    assert other.dumps() != smoke.dumps()


def test_parallel_run_matches_serial(smoke):
    assert run_suite(SuiteConfig.from_file(SUITES / "smoke.json"), jobs=2).dumps() == smoke.dumps()


@pytest.mark.parametrize("name", sorted(MUTATIONS))
def test_every_mutation_is_rejected(smoke, name):
    bad = mutate(smoke.data, name)
    assert bad != smoke.data
    assert not verify(bad)


def test_mutation_leaves_original_alone(smoke):
    before = dumps(smoke.data)
    mutate(smoke.data, "wreath_table_rows")
    assert dumps(smoke.data) == before


def test_empty_config_gives_empty_pass_report():
    r = run_suite(SuiteConfig.from_json({"seed": 3, "cases": []}))
    assert r.ok and r.data["cases"] == [] and verify(r.data)


def test_broken_tree_fails_with_violation_detail():
    cfg = SuiteConfig.from_json(
        {"seed": 1, "cases": [{"name": "bad", "op": "tree.validate", "inputs": {"tree": "inputs/broken_tree.json"}}]},
        SUITES,
    )
    r = run_suite(cfg)
    case = r.data["cases"][0]
    assert not r.ok and case["verdict"] == "fail"
    assert any("not disjoint" in v for v in case["certificate"]["violations"])
    # a failing case with an honest certificate still verifies
    assert verify(r.data)


@pytest.mark.parametrize("data", [
    [],
    {"seed": -1},
    {"seed": 2**64},
    {"cases": [{"name": "a"}]},
    {"cases": [{"op": "no.such.op"}]},
    {"cases": [{"op": "arcs.ro_algebra", "params": {"denominator": 0}}]},
    {"cases": [{"op": "tree.validate", "inputs": {"tree": "inputs/missing.json"}}]},
    {"cases": [{"name": "a", "op": "zset.a0_evidence"}, {"name": "a", "op": "zset.a0_evidence"}]},
])
def test_bad_configs_raise(data):
    with pytest.raises(ConfigError):
        SuiteConfig.from_json(data, SUITES)


def test_unparsable_input_raises(tmp_path):
    (tmp_path / "t.json").write_text("{not json")
    with pytest.raises(ConfigError):
        SuiteConfig.from_json({"cases": [{"op": "tree.validate", "inputs": {"tree": "t.json"}}]}, tmp_path)


def test_malformed_reports_raise(smoke):
    with pytest.raises(MalformedCertificate):
        verify_cases({"cases": []})
    broken = json.loads(smoke.dumps())
    del broken["cases"][1]["certificate"]["rows"]
    with pytest.raises(MalformedCertificate):
        verify(broken)


def test_tampered_summary_is_rejected(smoke):
    bad = json.loads(smoke.dumps())
    bad["summary"]["pass"] -= 1
    assert not verify(bad)


def test_local_battery_sizes_and_distinctness():
    us = local_battery(64, 3, 500, 0)
    assert len(us) == len(set(us)) == 500
    assert sum(len(u) == 1 for u in us) == 129
    assert all(1 <= len(u) <= 3 and all(-64 <= x <= 64 for x in u) for u in us)
