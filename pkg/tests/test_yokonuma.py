import json

import pytest

from heckelab import yokonuma
from heckelab.scalars import Cyclo
from heckelab.yokonuma import (
    build_model, iso_check, parabolic_projection_check, structure_constants_json, twisted_conjugation_check,
    yokonuma_relations,
)

from conftest import get_ctx


@pytest.fixture(scope="module", params=[2, 3])
def model(request):
    return build_model(request.param)


def test_group_order_and_cells(model):
    q = model.q
    assert len(model.elements) == (q * q - 1) * (q * q - q)
    assert len(model.nu) == 2 * (q - 1) ** 2
    assert model.bruhat_cells() == 2


def test_q3_sizes():
    model = build_model(3)
    assert len(model.elements) == 48 and len(model.nu) == 8
    assert len(model.cosets[0]) == 16


def test_non_prime_and_oversized_rejected():
    with pytest.raises(ValueError, match="only prime fields"):
        build_model(4)
    with pytest.raises(ValueError, match="element bound"):
        build_model(7, element_bound=100)


def test_s_dot_is_monomial(model):
    a, b, c, d = model.s_dot
    assert a == d == 0 and b and c


def test_convolution_routes_agree(model):
    n = len(model.nu)
    for i in range(n):
        for j in range(n):
            assert model.convolve(model.k(i), model.k(j)) == model.convolve_direct(model.k(i), model.k(j))


def test_relations(model):
    res = yokonuma_relations(model)
    assert all(res.values()), res


def test_iso(model):
    res = iso_check(model, get_ctx("GL2", model.q - 1))
    assert res["dim_equal"] and res["ok"], res["mismatches"]


def test_iso_rejects_wrong_context():
    with pytest.raises(ValueError):
        iso_check(build_model(3), get_ctx("GL2", 1))


def test_cocycle_is_needed():
    model = build_model(3)
    model.cocycle = lambda w, lam: Cyclo.rational(1, model.conductor)
    assert not iso_check(model)["ok"]


def test_twisted_conjugation_outer():
    model = build_model(3)
    res = twisted_conjugation_check(model, ctx=get_ctx("GL2", 2, "flip"))
    assert res["ok"] and res["uD_matches_datum"], res["failures"]
    assert res["uD"] == {"0,0": [0, 0], "0,1": [1, 0], "1,0": [0, 1], "1,1": [1, 1]}


def test_twisted_conjugation_torus_element():
    model = build_model(3)
    assert twisted_conjugation_check(model, d=((1, 0, 0, 2), 0))["ok"]
    assert twisted_conjugation_check(model, d=((1, 0, 0, 1), 0))["ok"]


@pytest.mark.parametrize("J", [(), (0,)])
def test_parabolic_projection(model, J):
    res = parabolic_projection_check(model, J)
    assert res["ok"], res["failures"]
    assert res["n_parabolics"] == (1 if J else model.q + 1)


class _Everywhere:
    def __eq__(self, other):
        return True

    __hash__ = object.__hash__


def test_projection_with_unconditional_pr_fails(monkeypatch):
    """pr_Q returning f(x) in both branches breaks the J = () identity."""
    real = yokonuma._parabolics

    def everywhere(model, J):
        Qs, key_of = real(model, J)
        return Qs, {x: _Everywhere() for x in key_of}

    monkeypatch.setattr(yokonuma, "_parabolics", everywhere)
    assert not parabolic_projection_check(build_model(3), ())["ok"]


def test_structure_constants_json():
    data = json.loads(structure_constants_json(build_model(3)))
    assert data["q"] == 3 and len(data["basis"]) == 8
    assert data["products"]["s*t(0,0)*s*t(0,0)"] == {"s*t(0,0)": 1, "s*t(1,1)": 1, "t(1,1)": 3}


def test_twisted_datum_comparison_catches_wrong_automorphism():
    res = twisted_conjugation_check(build_model(3), ctx=get_ctx("GL2", 2))
    assert res["identity"] and not res["uD_matches_datum"] and not res["ok"]
