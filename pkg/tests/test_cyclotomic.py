import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from boundedrank.cyclotomic import (CycloElement, cyclo_val, eps, eps_ratio, lift, phi_at_zeta, phi_poly,
                                    zeta)
from boundedrank.padic import PadicNumber
from oracles import eps_oracle, min_poly_eps, zeta_power_oracle

LEVELS = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2)]


def test_phi_poly_examples():
    assert phi_poly(3, 1) == (3, 3, 1)
    assert phi_poly(5, 1) == (5, 10, 10, 5, 1)
    c = phi_poly(3, 2)
    assert len(c) == 7 and c[-1] == 1 and c[0] == 3
    assert all(x % 3 == 0 for x in c[:-1])


@pytest.mark.parametrize("p,n", LEVELS + [(7, 1), (3, 4)])
def test_phi_poly_matches_quotient_oracle(p, n):
    assert [Fraction(x) for x in phi_poly(p, n)] == min_poly_eps(p, n)


def test_phi_poly_rejects_level_zero():
    with pytest.raises(ValueError):
        phi_poly(3, 0)


def test_cyclo_val_examples():
    assert cyclo_val(eps(3, 1)) == Fraction(1, 2)
    assert cyclo_val(eps(3, 2)) == Fraction(1, 6)
    for p, n in LEVELS:
        assert cyclo_val(CycloElement.from_int(p, n, p)) == 1


@pytest.mark.parametrize("p,n", LEVELS)
def test_eps_is_uniformizer(p, n):
    assert cyclo_val(eps(p, n)) == Fraction(1, p ** (n - 1) * (p - 1))


def test_phi_at_zeta_examples():
    x = phi_at_zeta(3, 1, 2)
    assert cyclo_val(x) == Fraction(1, 3)
    assert x == eps(3, 2, 1) / eps(3, 2)
    assert phi_at_zeta(3, 2, 2).is_exact_zero
    assert phi_at_zeta(3, 2, 1) == 3


@pytest.mark.parametrize("p,n", [(3, 2), (3, 3), (3, 4), (5, 2), (5, 3)])
def test_phi_at_zeta_equals_eps_quotients(p, n):
    for k in range(1, n):
        assert phi_at_zeta(p, k, n) == eps_ratio(p, n, n - k)
        assert cyclo_val(phi_at_zeta(p, k, n)) == Fraction(1, p ** (n - k))


def test_eps_ratio_times_denominator():
    for m in range(0, 3):
        assert eps_ratio(3, 3, m) * eps(3, 3, m + 1) == eps(3, 3, m)


def test_norm_of_eps_is_p_up_to_sign():
    for p in (3, 5, 7):
        z = zeta(p, 1)
        prod = CycloElement.from_int(p, 1, 1)
        for a in range(1, p):
            prod = prod * (z ** a - 1)
        assert prod == p or prod == -p


def _rand_elem(draw, p, n, bound=10 ** 6):
    d = p ** (n - 1) * (p - 1)
    return [draw(st.integers(-bound, bound)) for _ in range(d)]


@given(st.data())
def test_multiplication_matches_oracle(data):
    p, n = data.draw(st.sampled_from(LEVELS))
    a, b = _rand_elem(data.draw, p, n), _rand_elem(data.draw, p, n)
    x = CycloElement.from_eps_coefficients(p, n, a)
    y = CycloElement.from_eps_coefficients(p, n, b)
    ref = eps_oracle(p, n, a) * eps_oracle(p, n, b)
    assert all(c.denominator == 1 for c in ref.c)
    assert CycloElement.from_eps_coefficients(p, n, [int(c) for c in ref.c]) == x * y
    assert cyclo_val(x * y) == ref.valuation()


@given(st.data())
def test_valuation_matches_oracle(data):
    p, n = data.draw(st.sampled_from(LEVELS))
    a = _rand_elem(data.draw, p, n, 50)
    x = CycloElement.from_eps_coefficients(p, n, a)
    ref = eps_oracle(p, n, a)
    if ref.is_zero():
        assert x.is_exact_zero
    else:
        assert cyclo_val(x) == ref.valuation()


@given(st.data())
def test_valuation_multiplicative(data):
    p, n = data.draw(st.sampled_from(LEVELS))
    x = CycloElement.from_eps_coefficients(p, n, _rand_elem(data.draw, p, n))
    y = CycloElement.from_eps_coefficients(p, n, _rand_elem(data.draw, p, n))
    vx, vy = cyclo_val(x), cyclo_val(y)
    if vx.determined and vy.determined:
        assert cyclo_val(x * y) == vx.value + vy.value


@given(st.data())
def test_lift_preserves_valuation(data):
    p, n = data.draw(st.sampled_from([(3, 1), (3, 2), (5, 1)]))
    x = CycloElement.from_eps_coefficients(p, n, _rand_elem(data.draw, p, n, 1000))
    up = lift(x, n + 1)
    assert up.n == n + 1
    assert cyclo_val(up) == cyclo_val(x)


def test_lift_sends_zeta_to_power():
    z = zeta(3, 1).lift(3)
    assert z == zeta(3, 3) ** 9


def test_level_mixing_is_rejected():
    with pytest.raises(ValueError, match="lift explicitly"):
        eps(3, 1) + eps(3, 2)


def test_zeta_power_matches_oracle():
    for e in range(1, 10):
        ours = zeta(3, 2) ** e
        ref = zeta_power_oracle(3, 2, e)
        assert CycloElement.from_eps_coefficients(3, 2, [int(c) for c in ref.c]) == ours


@given(st.data())
def test_division_round_trip(data):
    p, n = data.draw(st.sampled_from(LEVELS))
    x = CycloElement.from_eps_coefficients(p, n, _rand_elem(data.draw, p, n), prec=30)
    y = CycloElement.from_eps_coefficients(p, n, _rand_elem(data.draw, p, n))
    if y.is_exact_zero or not cyclo_val(x).determined:
        return
    q = x / y
    assert cyclo_val(q) == cyclo_val(x).value - cyclo_val(y).value
    assert (q * y - x).valuation().value >= 10


def test_precision_tracking():
    x = CycloElement.from_padic(PadicNumber.from_int(3, 9, 2), 1)
    assert not cyclo_val(x).exact
    y = CycloElement.from_eps_coefficients(3, 2, [0, 1], prec=5)
    assert cyclo_val(y) == Fraction(1, 6)


@pytest.mark.parametrize("elem", [eps(3, 2), CycloElement.from_eps_coefficients(5, 1, [3, 0, 25, 7], prec=12),
                                  CycloElement.zero(3, 2), phi_at_zeta(3, 1, 3)])
def test_json_round_trip(elem):
    doc = elem.to_json()
    back = CycloElement.from_json(json.loads(json.dumps(doc)))
    assert back.to_json() == doc
    assert back == elem


def test_eps_coefficients_view():
    x = CycloElement.from_eps_coefficients(3, 1, [6, 1])
    c = x.eps_coefficients()
    assert c[0].val() == 1 and c[1].val() == 0
