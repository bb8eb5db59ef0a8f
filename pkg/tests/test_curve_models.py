from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_points
from intpoints.curve_models import (
    AffineChange,
    BoxSpec,
    LongCurve,
    ShortCurve,
    box_from_json,
    box_to_json,
    curve_from_json,
    curve_to_json,
    heath_brown_case,
    invariants_of,
    to_short_form,
    translate_box_to_origin,
)
from intpoints.errors import UnsupportedForm, ValidationError

small = st.integers(-30, 30)


def test_disc_and_j_known_curve():
    inv = invariants_of(ShortCurve(-1, 1))
    assert inv.disc == -16 * (4 * -1 + 27)
    assert inv.j == Fraction(-1728 * (-4) ** 3, inv.disc)
    assert inv.c4 == Fraction(1, 27)


def test_singular_curve_has_no_j():
    inv = invariants_of(ShortCurve(-3, 2))
    assert inv.disc == 0 and inv.singular


@given(small, small)
def test_j_is_exact(A, B):
    E = ShortCurve(A, B)
    inv = invariants_of(E)
    if inv.disc == 0:
        assert inv.j is None
    else:
        assert inv.j * inv.disc == -1728 * (4 * A) ** 3
        assert (inv.c4 < 0) == (A > 0)


def test_long_disc_matches_short():
    assert LongCurve(0, 0, 0, 5, 7).disc == ShortCurve(5, 7).disc


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
@settings(max_examples=60, deadline=None)
def test_short_form_round_trip(a2, a3, a4, a6):
    lc = LongCurve(0, a2, a3, a4, a6)
    if lc.disc == 0:
        return
    short, change = to_short_form(lc)
    assert short.disc != 0
    inv = change.inverse()
    for x, y in brute_points(lc, BoxSpec.square(40)):
        X, Y = change.apply(x, y)
        assert X.denominator == 1 and Y.denominator == 1
        assert short.contains(X, Y)
        assert inv.apply(X, Y) == (x, y)


def test_a1_rejected():
    with pytest.raises(UnsupportedForm):
        to_short_form(LongCurve(1, 0, 0, 0, 1))


def test_affine_change_validation_and_algebra():
    with pytest.raises(ValidationError):
        AffineChange(0, 1, 1, 0)
    f = AffineChange(2, 3, 5, -1)
    g = AffineChange(Fraction(1, 3), 7, -2, 4)
    h = AffineChange(4, 0, 1, 1)
    assert f.then(f.inverse()).is_identity
    assert f.then(g).then(h) == f.then(g.then(h))


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-40, 40), st.integers(-40, 40),
       st.integers(1, 12), st.integers(1, 12))
@settings(max_examples=60, deadline=None)
def test_translation_preserves_count(A, B, x0, y0, wx, wy):
    E = ShortCurve(A, B)
    if E.disc == 0:
        return
    box = BoxSpec(x0, x0 + wx, y0, y0 + wy)
    moved, square, change = translate_box_to_origin(E, box)
    cx, cy = box.centre
    shifted = box.shifted(-cx, -cy)
    assert square.x_lo <= shifted.x_lo and shifted.x_hi <= square.x_hi
    assert square.y_lo <= shifted.y_lo and shifted.y_hi <= square.y_hi
    before = brute_points(E, box)
    after = brute_points(moved, shifted)
    assert len(before) == len(after)
    assert sorted(tuple(int(c) for c in change.apply(x, y)) for x, y in before) == after


@given(st.integers(1, 10**40), st.integers(0, 10**40), st.integers(2, 6))
def test_heath_brown_monotone(norm, extra, N):
    lo = heath_brown_case(norm, N)
    hi = heath_brown_case(norm + extra, N)
    if lo.case == "count<=d^2":
        assert hi.case == "count<=d^2"


def test_heath_brown_threshold():
    assert heath_brown_case(2**30, 2).case == "norm-bounded"
    rep = heath_brown_case(2**30 + 1, 2)
    assert rep.case == "count<=d^2" and rep.count_bound == 9 and rep.exponent == 30


def test_box_validation_and_json():
    with pytest.raises(ValidationError):
        BoxSpec(2, 1, 0, 0)
    b = BoxSpec(-3, 4, 5, 9)
    assert box_from_json(box_to_json(b)) == b
    assert box_from_json("[-3, 4, 5, 9]") == b
    assert b.centre == (0, 7) and b.side == 7


def test_curve_json_round_trip():
    for c in (ShortCurve(-2, 10**30), LongCurve(0, 1, 2, 3, 4)):
        assert curve_from_json(curve_to_json(c)) == c
    with pytest.raises(ValidationError):
        curve_from_json('{"form": "long", "a": [1, 2]}')
    with pytest.raises(ValidationError):
        curve_from_json("{not json")
