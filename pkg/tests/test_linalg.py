from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from boundedrank.cyclotomic import CycloElement, eps
from boundedrank.linalg import bareiss_det, laplace_det, matmul, padic_det, padic_inverse
from boundedrank.padic import NonUnitError, PadicNumber, padic
from oracles import leibniz_det, padic_int_det


def pmat(p, m, prec=30):
    return [[padic(p, x, prec) for x in row] for row in m]


@given(st.data())
def test_bareiss_matches_leibniz_over_zp(data):
    p = data.draw(st.sampled_from([3, 5]))
    k = data.draw(st.integers(1, 4))
    m = [[data.draw(st.integers(-30, 30)) for _ in range(k)] for _ in range(k)]
    one = PadicNumber.from_int(p, 1, 40)
    ours = bareiss_det(pmat(p, m, 40), one)
    ref = padic_int_det(m)
    assert ours == padic(p, ref, 40) or ref == 0 and ours.is_zero()


@given(st.data())
def test_bareiss_matches_leibniz_over_cyclotomic(data):
    p, n = data.draw(st.sampled_from([(3, 1), (3, 2), (5, 1)]))
    k = data.draw(st.integers(1, 3))
    d = p ** (n - 1) * (p - 1)
    m = [[CycloElement.from_eps_coefficients(p, n, [data.draw(st.integers(-20, 20)) for _ in range(d)])
          for _ in range(k)] for _ in range(k)]
    one = CycloElement.from_int(p, n, 1)
    ref = leibniz_det(m, CycloElement.zero(p, n), one)
    assert bareiss_det(m, one) == ref


def test_bareiss_with_zero_column_falls_back():
    e = eps(3, 2)
    z = CycloElement.zero(3, 2)
    one = CycloElement.from_int(3, 2, 1)
    m = [[e, z, one], [one, z, e], [e * e, one, z]]
    assert bareiss_det(m, one) == leibniz_det(m, z, one)


def test_padic_det_and_inverse():
    m = pmat(3, [[2, 1], [1, 1]])
    assert padic_det(m) == 1
    inv = padic_inverse(m)
    prod = matmul(m, inv, PadicNumber.zero(3, 30))
    assert all(prod[i][j] == (1 if i == j else 0) for i in range(2) for j in range(2))


def test_padic_inverse_rejects_non_unit_det():
    with pytest.raises(NonUnitError):
        padic_inverse(pmat(3, [[3, 0], [0, 1]]))


def test_laplace_small():
    one = PadicNumber.from_int(5, 1)
    assert laplace_det(pmat(5, [[1, 2, 3], [4, 5, 6], [7, 8, 10]]), one) == -3
