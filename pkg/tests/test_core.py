import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weingarten import (
    Branch,
    DegenerateParams,
    DomainError,
    Kind,
    Phi,
    WeingartenParams,
    classify_at,
    classify_global,
    discriminant,
    eval_phi,
)
from weingarten.errors import BadInput

finite = st.floats(-10, 10, allow_nan=False)
nonzero = finite.filter(lambda x: abs(x) > 1e-3)


@pytest.mark.parametrize("phi, nu, expected", [
    (Phi.constant(3.0), 1.0, 3.0),
    (Phi.identity(), 0.5, 0.5),
    (Phi.polynomial([1.0, -2.0]), 1.0, -1.0),
])
def test_eval_phi(phi, nu, expected):
    assert eval_phi(phi, nu) == expected


@pytest.mark.parametrize("nu", [1.0000001, -1.5, math.nan])
def test_eval_phi_outside_domain(nu):
    with pytest.raises(DomainError):
        eval_phi(Phi.identity(), nu)


def test_phi_vectorized():
    nu = np.linspace(-1, 1, 5)
    np.testing.assert_array_equal(Phi.polynomial([0.0, 0.0, 1.0])(nu), nu ** 2)
    assert Phi.constant(2.0)(nu).shape == nu.shape


@pytest.mark.parametrize("text", ["const:3", "identity", "poly:1,-2,0.5", "const:-0.1"])
def test_parse_round_trip(text):
    phi = Phi.parse(text)
    again = Phi.parse(str(phi))
    nu = np.linspace(-1, 1, 7)
    np.testing.assert_array_equal(phi(nu), again(nu))


@pytest.mark.parametrize("text", ["", "const:", "poly:", "poly:1,x", "sin", "const:nan"])
def test_parse_rejects(text):
    with pytest.raises(BadInput):
        Phi.parse(text)


def test_callable_phi_is_lipschitz_only():
    phi = Phi.from_callable(lambda nu: np.abs(nu) - 0.5)
    assert phi.lipschitz_only
    assert eval_phi(phi, -1.0) == 0.5


def test_params_validation():
    with pytest.raises(DegenerateParams):
        WeingartenParams(0.0, 0.0)
    with pytest.raises(BadInput):
        WeingartenParams(math.inf, 1.0)


@pytest.mark.parametrize("a, b, phi, nu, expected", [
    (1.0, -1.0, Phi.constant(1.0), 0.3, 0.0),
    (1.0, 0.0, Phi.identity(), -0.7, 1.0),
    (1.0, -1.0, Phi.constant(2.0), 1.0, -1.0),
])
def test_discriminant(a, b, phi, nu, expected):
    assert discriminant(WeingartenParams(a, b), phi, nu) == expected


@pytest.mark.parametrize("b, c, kind, d", [
    (1.0, 3.0, Kind.ELLIPTIC, 4.0),
    (-1.0, 1.0, Kind.PARABOLIC, 0.0),
    (-1.0, 2.0, Kind.HYPERBOLIC, -1.0),
])
def test_classify_at(b, c, kind, d):
    cls = classify_at(WeingartenParams(1.0, b), Phi.constant(c), 1.0)
    assert cls.kind is kind
    assert cls.discriminant == d


def test_classify_global_examples():
    g = classify_global(WeingartenParams(1.0, 0.0), Phi.identity())
    assert g.kind is Kind.ELLIPTIC and g.d_min == g.d_max == 1.0
    assert classify_global(WeingartenParams(1.0, -1.0), Phi.constant(1.0)).kind is Kind.PARABOLIC
    g = classify_global(WeingartenParams(1.0, -2.0), Phi.identity())
    assert g.kind is Kind.MIXED
    assert g.d_min == pytest.approx(-1.0) and g.d_max == pytest.approx(3.0)


@settings(max_examples=200, deadline=None)
@given(a=finite, b=finite, c=finite, nu=st.floats(-1, 1))
def test_sign_trichotomy(a, b, c, nu):
    if a == 0 and b == 0:
        return
    params = WeingartenParams(a, b)
    phi = Phi.polynomial([c, 1.0])
    cls = classify_at(params, phi, nu)
    d = a * a + b * (c + nu)
    band = 1e-12 * max(a * a, abs(b * (c + nu)))
    expected = Kind.ELLIPTIC if d > band else Kind.HYPERBOLIC if d < -band else Kind.PARABOLIC
    assert cls.kind is expected


@settings(max_examples=100, deadline=None)
@given(a=nonzero, b=finite, c1=finite, c2=finite, nu=st.floats(-1, 1))
def test_discriminant_affine_in_phi(a, b, c1, c2, nu):
    params = WeingartenParams(a, b)
    p1, p2 = Phi.polynomial([c1, c2]), Phi.polynomial([c2, c1])
    both = Phi.polynomial([c1 + c2, c1 + c2])
    lhs = discriminant(params, both, nu) - a * a
    rhs = (discriminant(params, p1, nu) - a * a) + (discriminant(params, p2, nu) - a * a)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9 * (1 + a * a))


@settings(max_examples=100, deadline=None)
@given(b=nonzero, c=nonzero.filter(lambda x: x != 0), n=st.integers(2, 301))
def test_parabolic_constant_detected_globally(b, c, n):
    if b * c >= 0:
        c = -c
    a = math.sqrt(-b * c)
    assert classify_global(WeingartenParams(a, b), Phi.constant(c), n).kind is Kind.PARABOLIC


def test_branch_coerce():
    assert Branch.coerce("Plus") is Branch.PLUS
    assert Branch.MINUS.sign == -1
    with pytest.raises(BadInput):
        Branch.coerce("up")
