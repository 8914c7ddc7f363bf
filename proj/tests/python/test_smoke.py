import json

import pytest

import jetcheck


def test_check_ids_include_every_module():
    ids = jetcheck.check_ids()
    for name in ("zc_main", "prop1", "theorem1", "appendixA"):
        assert name in ids


def test_explain_has_claim_and_inputs():
    d = jetcheck.explain("prop1")
    assert d["id"] == "prop1"
    assert d["claim"] and d["strategy"] and d["inputs"]


def test_unknown_check_rejected():
    with pytest.raises(ValueError):
        jetcheck.run(["no_such_check"])
    with pytest.raises(ValueError):
        jetcheck.explain("no_such_check")


def test_small_order_cap_rejected():
    with pytest.raises(ValueError):
        jetcheck.run(["zc_main"], max_order=4)


def test_run_reports_schema_fields():
    (r,) = jetcheck.run(["zc_main"])
    for key in ("id", "status", "decided_by", "residual_summary", "time_ms", "citation"):
        assert key in r
    assert r["status"] == "pass"
    assert r["residual_summary"] == []


def test_same_seed_same_report():
    a = jetcheck.run_json(["appendixA", "prop2"], 7)
    b = jetcheck.run_json(["appendixA", "prop2"], 7)
    assert a == b
    assert [r["id"] for r in json.loads(a)] == ["appendixA", "prop2"]


def test_raw_status_without_errata():
    (r,) = jetcheck.run(["theorem1"], errata=False)
    assert r["status"] == "fail"
    (r,) = jetcheck.run(["theorem1"])
    assert r["status"] == "erratum"


def test_kernel_operations():
    assert jetcheck.total_derivative("u^2", "x", ["u"]) == jetcheck.expand("2*u*u_x", "x", ["u"])
    assert jetcheck.is_total_derivative("u*u_x", "x", ["u"])
    assert not jetcheck.is_total_derivative("u*v_x", "x", ["u", "v"])
    assert jetcheck.euler("u_x^2", "x", ["u"], "u") == jetcheck.expand("-2*u_xx", "x", ["u"])


def test_catalog_index_is_large():
    assert len(jetcheck.catalog_index()) >= 40
