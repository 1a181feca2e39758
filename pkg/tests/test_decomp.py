from fractions import Fraction

import mpmath
import pytest

from hypdecomp.decomp import (
    HA_INV_ERRATUM_KEYS,
    OPERATOR_FORM,
    SERIES_FORM,
    UnknownIdentity,
    build_lhs,
    build_lhs_numeric,
    build_rhs,
    build_rhs_numeric,
    build_rhs_operator,
    build_rhs_series,
    get_identity,
    ha_limit_value,
    fa_pair_closed_form,
    list_identities,
)
from hypdecomp.hyperfun import EvalPoint, FunctionSpec, eval_numeric, truncate
from hypdecomp.tps import compare_series, negate_y, retruncate
from hypdecomp.verify import random_params

F = Fraction
P = FunctionSpec.make

TWO_VAR = ("H2", "Eta2", "Eta3", "Eta4", "Eta5", "Eta11")


def test_registry_census():
    ids = [r.id for r in list_identities()]
    assert len(ids) == len(set(ids)) == 31
    ops = [i for i in ids if i.split(".")[0] in TWO_VAR and ".op" in i]
    series = [i for i in ids if i.split(".")[0] in TWO_VAR and ".series" in i]
    assert len(ops) == 12 and len(series) == 12
    assert {"FA.op", "FB.op", "FA.lemma1", "HA.op", "HA.op.inv", "HA.series", "HA.series.inv"} <= set(ids)
    assert get_identity("HA.series").rhs_kind == SERIES_FORM
    assert get_identity("H2.op").rhs_kind == OPERATOR_FORM
    with pytest.raises(UnknownIdentity):
        get_identity("nope")


def test_eta3_operator_rhs_is_the_function():
    params = dict(a=F(2, 3), b=F(-1, 5), d=F(7, 2))
    rhs = build_rhs_operator("Eta3.op", params, 10)
    assert compare_series(rhs, truncate(P("humbert-eta3", **params), 10)).equal


def test_h2_operator_low_coefficient():
    a, b, c, d, e = F(1, 3), F(2, 5), F(-3, 7), F(5, 2), F(4, 3)
    rhs = build_rhs_operator("H2.op", dict(a=a, b=b, c=c, d=d, e=e), 4)
    assert rhs[(1, 1)] == b * c * d / e


def test_fa_operator_two_variables():
    params = dict(a=F(1, 2), b=(F(1, 3), F(-2, 5)), c=(F(3, 7), F(5, 3)))
    rhs = build_rhs_operator("FA.op", params, 8, shape=(2, 0))
    assert compare_series(rhs, truncate(P("lauricella-fa", **params), 8)).equal


def test_series_builder_rejects_operator_ids():
    with pytest.raises(ValueError):
        build_rhs_series("H2.op", dict(a=1, b=1, c=1, d=1, e=1), 2)
    with pytest.raises(ValueError):
        build_rhs_operator("H2.series", dict(a=1, b=1, c=1, d=1, e=1), 2)


def test_eta3_series_rhs_is_the_function():
    params = dict(a=F(-5, 3), b=F(1, 7), d=F(9, 2))
    rhs = build_rhs_series("Eta3.series", params, 12)
    assert compare_series(rhs, truncate(P("humbert-eta3", **params), 12)).equal


def test_eta5_series_reduces_to_kummer_on_the_x_axis():
    a, d = F(3, 5), F(-7, 3)
    rhs = build_rhs_series("Eta5.series", dict(a=a, d=d), 10)
    kummer = truncate(P("genpfq", a=(a,), b=(d,)), 10)
    for i in range(11):
        assert rhs[(i, 0)] == kummer[(i,)]
    x = 0.3
    with mpmath.workdps(30):
        ref = float(mpmath.hyp1f1(float(a), float(d), x))
    assert build_rhs_numeric("Eta5.series", dict(a=a, d=d), [x, 0.0]) == pytest.approx(ref, rel=1e-13)


def test_h2_series_numeric_instance():
    params = dict(a=F(1, 2), b=F(-1, 3), c=F(2, 5), d=F(3, 7), e=F(5, 3))
    got = build_rhs_numeric("H2.series", params, [0.1, 0.1])
    ref = eval_numeric(P("horn-h2", **params), [0.1, 0.1]).value
    assert abs(got - ref) <= 1e-10 * max(1, abs(ref))


def test_fa_pair_closed_form_matches_triangular_sum():
    params = dict(a=F(1, 3), b=(F(2, 5), F(-3, 7)), c=(F(7, 2), F(5, 3)))
    general = build_rhs("FA.lemma1", params, 8, shape=(2, 0))
    assert compare_series(general, fa_pair_closed_form(params, 8)).equal


def test_fa_triangular_sum_three_variables_numeric():
    params = dict(a=F(1, 3), b=(F(2, 5), F(-3, 7), F(1, 2)), c=(F(7, 2), F(5, 3), F(-1, 3)))
    pt = [0.1, -0.1, 0.1]
    lhs = build_lhs_numeric("FA.lemma1", params, pt, shape=(3, 0))
    rhs = build_rhs_numeric("FA.lemma1", params, pt, shape=(3, 0))
    assert abs(lhs - rhs) <= 1e-8 * max(1, abs(lhs))


def _ha_params(a, b, c):
    return dict(a=a, b=(b,), c=(c,))


@pytest.mark.parametrize("kind", ["op", "series"])
def test_ha_one_one_coincides_with_eta3(kind):
    a, b, c = F(2, 7), F(-4, 3), F(5, 2)
    ha = build_rhs(f"HA.{kind}", _ha_params(a, b, c), 8, shape=(1, 1))
    eta3 = build_rhs(f"Eta3.{kind}", dict(a=a, b=b, d=c), 8)
    assert compare_series(ha, eta3).equal


@pytest.mark.parametrize("kind", ["op.inv", "series.inv"])
def test_ha_inverse_one_one_matches_eta3_inverse_at_minus_y(kind):
    a, b, c = F(2, 7), F(-4, 3), F(5, 2)
    for side in (build_lhs, build_rhs):
        ha = side(f"HA.{kind}", _ha_params(a, b, c), 8, shape=(1, 1))
        eta3 = side(f"Eta3.{kind}", dict(a=a, b=b, d=c), 8)
        assert not compare_series(ha, eta3).equal
        assert compare_series(ha, negate_y(eta3)).equal


def test_eta5_inverse_needs_its_lead_correction():
    params = dict(a=F(1, 2), d=F(3, 2), b=F(1, 3))
    fixed = compare_series(build_lhs("Eta5.series.inv", params, 6), build_rhs("Eta5.series.inv", params, 6))
    assert fixed.equal
    printed = compare_series(
        build_lhs("Eta5.series.inv", params, 6, errata=()), build_rhs("Eta5.series.inv", params, 6, errata=())
    )
    assert not printed.equal
    # the stray (b)_m shows up at the first x power
    assert printed.mismatches[0] == ((1, 0), F(1, 3), F(1, 9))


def _subsets(keys):
    keys = sorted(keys)
    for mask in range(1 << len(keys)):
        yield frozenset(k for t, k in enumerate(keys) if mask >> t & 1)


@pytest.mark.parametrize("shape", [(2, 1), (2, 2)])
def test_ha_inverse_needs_every_correction(shape):
    params, _ = random_params("HA.series.inv", 7, 0)
    m = shape[0]
    params = dict(a=params["a"], b=(F(1, 3), F(-2, 5))[:m], c=(F(5, 2), F(7, 3))[:m])
    for subset in _subsets(HA_INV_ERRATUM_KEYS):
        rep = compare_series(
            build_lhs("HA.series.inv", params, 5, shape=shape, errata=subset),
            build_rhs("HA.series.inv", params, 5, shape=shape, errata=subset),
        )
        assert rep.equal == (subset == HA_INV_ERRATUM_KEYS), sorted(subset)


def test_ha_limit_of_erdelyi():
    params = _ha_params(F(1, 2), F(1, 3), F(5, 2))
    pt = EvalPoint((0.1,), (0.2,))
    limit = ha_limit_value(params, (1, 1), pt, 1e-3)
    direct = build_lhs_numeric("HA.series", params, pt, shape=(1, 1))
    assert abs(limit - direct) <= 1e-2 * abs(direct)


def test_degree_zero_sides_are_one():
    for rec in list_identities():
        params, shape = random_params(rec.id, 1, 0)
        lhs = build_lhs(rec.id, params, 0, shape=shape)
        rhs = build_rhs(rec.id, params, 0, shape=shape)
        origin = (0,) * sum(shape)
        assert lhs[origin] == rhs[origin] == 1, rec.id


def test_truncation_degree_is_consistent():
    params = dict(a=F(1, 2), b=F(-1, 3), c=F(2, 5), d=F(3, 7), e=F(5, 3))
    hi = build_rhs("H2.series", params, 9)
    lo = build_rhs("H2.series", params, 6)
    assert compare_series(retruncate(hi, 6), lo).equal
