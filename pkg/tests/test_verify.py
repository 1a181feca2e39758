import json
import random
from fractions import Fraction

import pytest

from hypdecomp.decomp import REGISTRY
from hypdecomp.hyperfun import EvalPoint
from hypdecomp.verify import (
    TrialConfig,
    euler_pochhammer_mismatches,
    random_params,
    random_polynomial,
    resolve_ids,
    run_suite,
    sample_points,
    verify_exact,
    verify_numeric,
)

F = Fraction


def _flat(params):
    for v in params.values():
        yield from (v if isinstance(v, tuple) else (v,))


def test_random_params_deterministic_and_non_integer():
    for trial in range(40):
        p1 = random_params("HA.series", 42, trial)
        assert p1 == random_params("HA.series", 42, trial)
        for v in _flat(p1[0]):
            assert v.denominator in (2, 3, 5, 7)
            assert -9 <= v.numerator <= 9
            assert (1 - v).denominator != 1


def test_random_params_cover_negative_three_halves():
    hits = {random_params("Eta5.op", seed, 0)[0]["a"] for seed in range(400)}
    assert F(-3, 2) in hits


def test_random_params_fill_vector_slots_to_shape():
    for trial in range(4):
        params, shape = random_params("HA.op", 3, trial)
        assert len(params["b"]) == len(params["c"]) == shape[0]


def test_sample_points_are_small():
    pts = sample_points("H2.op", (1, 1), 42, 0, 5)
    assert len(pts) == 5
    assert all(abs(c) <= 0.2 for p in pts for c in p.coords)
    assert pts == sample_points("H2.op", (1, 1), 42, 0, 5)


def test_verify_exact_equal_and_degree_zero():
    params, _ = random_params("Eta4.op", 42, 0)
    assert verify_exact("Eta4.op", params, 10).ok
    for rid in REGISTRY:
        params, shape = random_params(rid, 9, 1)
        assert verify_exact(rid, params, 0, shape).ok, rid


def test_verify_exact_negative_control_localizes():
    params = dict(a=F(1, 2), d=F(3, 2), b=F(1, 3))
    res = verify_exact("Eta5.series.inv", params, 6, errata=())
    assert res.status == "mismatch"
    assert res.mismatches[0][0] == (1, 0)
    assert res.discrepancy > 0


def test_verify_exact_skips_on_pole():
    # d = -1 puts a pole in (d)_m
    res = verify_exact("Eta3.op", dict(a=F(1, 2), b=F(1, 3), d=F(-1)), 4)
    assert res.status == "skipped" and "pole" in res.reason


def test_verify_numeric_instances():
    params = dict(a=F(1, 2), b=F(-1, 3), c=F(2, 5), d=F(3, 7), e=F(5, 3))
    assert verify_numeric("H2.op", params, [EvalPoint((0.05,), (0.1,))], 1e-10).ok
    for rid in REGISTRY:
        params, shape = random_params(rid, 4, 0)
        origin = EvalPoint((0.0,) * shape[0], (0.0,) * shape[1])
        res = verify_numeric(rid, params, [origin], 1e-14, shape)
        assert res.ok and res.discrepancy == 0, rid
    fa3 = dict(a=F(1, 3), b=(F(2, 5), F(-3, 7), F(1, 2)), c=(F(7, 2), F(5, 3), F(-1, 3)))
    assert verify_numeric("FA.lemma1", fa3, [EvalPoint((0.1, 0.1, -0.1))], 1e-8, (3, 0)).ok


def test_verify_numeric_out_of_domain_is_skipped():
    params = dict(a=F(1, 2), b=F(-1, 3), c=F(2, 5), d=F(3, 7), e=F(5, 3))
    res = verify_numeric("H2.op", params, [EvalPoint((0.9,), (0.9,))], 1e-10)
    assert res.status == "skipped"


def test_trial_config_validation():
    for bad in (dict(degree=0), dict(trials=0), dict(tolerance=0.0), dict(mode="fast")):
        with pytest.raises(ValueError):
            TrialConfig(**bad)
    cfg = TrialConfig(degree=12, degree_multi=8)
    assert cfg.degree_for((1, 1)) == 12 and cfg.degree_for((2, 1)) == 8


def test_resolve_ids():
    assert resolve_ids(["nope.*"]) == []
    assert resolve_ids(["Eta5.*"]) == sorted(i for i in REGISTRY if i.startswith("Eta5."))
    assert resolve_ids(None) == sorted(REGISTRY)


def test_empty_filter_gives_empty_report():
    rep = run_suite(TrialConfig(ids=()))
    assert rep.identities == [] and rep.passed


def test_report_schema_and_determinism():
    cfg = TrialConfig(degree=6, trials=2, ids=("Eta5.*", "HA.op"))
    a, b = run_suite(cfg), run_suite(cfg)
    assert a.body_json() == b.body_json()
    doc = json.loads(a.to_json())
    assert {"seed", "mode", "degree"} <= set(doc["suite"])
    for entry in doc["identities"]:
        assert {"id", "trials", "skipped", "maxDiscrepancy", "pass", "errata"} <= set(entry)
        assert entry["pass"] and entry["maxDiscrepancy"] == "0"
    inv = next(e for e in doc["identities"] if e["id"] == "Eta5.series.inv")
    assert inv["errata"] == ["eta5-lead-arity"]


def test_numeric_mode_report():
    rep = run_suite(TrialConfig(degree=4, trials=1, mode="both", ids=("Eta3.series",)))
    entry = rep.identities[0]
    assert entry["pass"] and entry["numericMaxDiscrepancy"] <= 1e-10


def test_full_suite_degree_ten_passes_without_skips():
    rep = run_suite(TrialConfig(degree=10, trials=5))
    assert rep.passed
    assert all(e["skipped"] == 0 for e in rep.identities)


def test_euler_operators_on_random_polynomials():
    rng = random.Random(42)
    for arity in ((1, 0), (0, 2), (2, 1), (3, 2)):
        f = random_polynomial(rng, arity, 5)
        for k in range(7):
            assert euler_pochhammer_mismatches(f, k) == []
