import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from intpoints import lattice_modular as lm
from intpoints.arith import valuation
from intpoints.curve_models import ShortCurve
from intpoints.errors import SingularCurve, ValidationError
from intpoints.heights import (
    INFINITY,
    B2,
    calibrate_offset,
    canonical_height_decomposed,
    canonical_height_doubling,
    finite_local_heights,
    group_add,
    lambda_infty,
    local_height_at,
    local_height_closed_form,
    multiply,
    point,
    torsion_order,
)

# curves with a known point of infinite order
GENERATED = [
    (ShortCurve(0, -2), (3, 5)),
    (ShortCurve(-1, 1), (1, 1)),
    (ShortCurve(0, 17), (-2, 3)),
    (ShortCurve(-7, 10), (1, 2)),
]


@given(st.sampled_from(GENERATED), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
@settings(max_examples=100, deadline=None)
def test_group_law_associative_commutative(cg, a, b, c):
    E, g = cg
    G = point(E, *g)
    P, Q, R = multiply(E, G, a), multiply(E, G, b), multiply(E, G, c)
    assert group_add(E, P, Q) == group_add(E, Q, P)
    assert group_add(E, group_add(E, P, Q), R) == group_add(E, P, group_add(E, Q, R))
    S = group_add(E, P, Q)
    assert S.on(E)
    assert S == multiply(E, G, a + b)


def test_point_validation():
    E = ShortCurve(0, -2)
    with pytest.raises(ValidationError):
        point(E, 3, 4)
    assert group_add(E, INFINITY, point(E, 3, 5)) == point(E, 3, 5)


def test_known_height_value():
    # half of the published canonical height 1.3495768357 of (3, 5) on y^2 = x^3 - 2
    E = ShortCurve(0, -2)
    br = canonical_height_decomposed(E, point(E, 3, 5))
    assert br.total == pytest.approx(0.674788418, abs=1e-8)
    assert br.residual <= 1e-5


@pytest.mark.parametrize("E,g", GENERATED)
def test_doubling_quadratic(E, g):
    P = point(E, *g)
    h1 = canonical_height_doubling(E, P)
    h2 = canonical_height_doubling(E, multiply(E, P, 2))
    assert abs(h2 - 4 * h1) <= 1e-5
    assert h1 > 0


@pytest.mark.parametrize("A,B,xy,order", [(0, 1, (2, 3), 6), (0, 1, (-1, 0), 2), (0, 1, (0, 1), 3), (-4, 4, (2, 2), 0)])
def test_torsion_has_zero_height(A, B, xy, order):
    E = ShortCurve(A, B)
    P = point(E, *xy)
    assert torsion_order(E, P) == order
    h = canonical_height_doubling(E, P)
    if order:
        assert h == 0.0
        assert abs(canonical_height_decomposed(E, P, with_oracle=False).total) <= 1e-8
    else:
        assert h > 0


def test_decomposition_vs_oracle_on_corpus(corpus_points):
    worst = 0.0
    for E, P in corpus_points:
        br = canonical_height_decomposed(E, P)
        assert br.oracle >= 0
        # local bound on each finite part and on their sum
        for p, lam in br.finite_parts:
            assert lam <= valuation(E.disc, p) / 12 * math.log(p) + 1e-12
        assert sum(v for _, v in br.finite_parts) <= br.tate_bound + 1e-9
        worst = max(worst, br.residual)
    assert worst <= 1e-5


def test_closed_form_matches_recursion_for_large_primes(corpus_points):
    seen = 0
    for E, P in corpus_points:
        for p, _ in finite_local_heights(E, P):
            if p < 5:
                continue
            vA = valuation(E.A, p) if E.A else math.inf
            vB = valuation(E.B, p) if E.B else math.inf
            if vA >= 4 and vB >= 6:
                continue
            assert local_height_at(E, P, p) == pytest.approx(local_height_closed_form(E, P, p), abs=1e-12)
            seen += 1
    assert seen > 20


@given(st.floats(0, 1))
def test_b2_range(u):
    v = B2(u)
    assert -1 / 12 - 1e-15 <= v <= 1 / 6 + 1e-15


@given(st.floats(-0.49, 0.5), st.floats(-0.49, 0.5))
@settings(max_examples=50, deadline=None)
def test_lambda_inf_even(u1, u2):
    tau = lm.TauPoint.on_arc("C1", 1.3)
    fp = lm.FundamentalPoint(u1, u2, tau.value)
    if abs(fp.u) < 1e-6:
        return
    assert lambda_infty(tau, fp) == pytest.approx(lambda_infty(tau, fp.negated()), abs=1e-9)


def test_calibration_offset_is_zero(corpus_points):
    cal = calibrate_offset(corpus_points[:30])
    assert abs(cal.mean) <= 1e-5 and cal.stdev <= 1e-4


def test_singular_and_nonintegral_rejected():
    with pytest.raises(SingularCurve):
        canonical_height_decomposed(ShortCurve(-3, 2), point(ShortCurve(-3, 2), 1, 0))
    E = ShortCurve(0, -2)
    Q = multiply(E, point(E, 3, 5), 2)
    assert Q.x == Fraction(129, 100)
    with pytest.raises(ValidationError):
        finite_local_heights(E, Q)
