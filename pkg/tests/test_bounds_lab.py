import math

import pytest
from hypothesis import given, strategies as st

from intpoints import bounds_lab as bl
from intpoints.curve_models import BoxSpec, ShortCurve
from intpoints.heights import CALIBRATION_CURVES
from intpoints.point_enum import enumerate_box

SMALL = bl.GridConfig(tau_per_arc=30, u_per_locus=40, im_max=6.0)


@pytest.fixture(scope="module")
def small_reports():
    return bl.run_all(SMALL)


def _strip(d):
    return {k: v for k, v in d.items() if k != "seconds"}


def test_printed_relations():
    assert bl._printed("x", 1.0005, 1.0, "==")["ok"]
    assert not bl._printed("x", 1.002, 1.0, "==")["ok"]
    assert bl._printed("x", 1.0009, 1.0, "<=")["ok"]
    assert not bl._printed("x", 0.998, 1.0, ">=")["ok"]


@given(st.floats(-100, 100), st.floats(-100, 100), st.sampled_from(["upper", "lower"]))
def test_passed_iff_within_threshold(worst, thr, direction):
    rep = bl._finish(bl.VerificationReport("X", 1, worst, thr, False, direction=direction), 0.0)
    expected = worst <= thr if direction == "upper" else worst >= thr
    assert rep.passed == expected


def test_every_check_respects_the_pass_invariant(small_reports):
    ids = [r.check_id for r in small_reports]
    assert ids == list(bl.CHECKS)
    for r in small_reports:
        assert r.passed == (r.margin >= 0)
        assert r.samples > 0


def test_checks_are_deterministic():
    a = bl.check_L6(SMALL).to_json()
    b = bl.check_L6(SMALL).to_json()
    assert _strip(a) == _strip(b)


def test_absolute_checks_have_no_empirical_constant():
    for cid in ("L4", "COR1", "L5", "JW"):
        assert bl.run_check(cid, **({} if cid == "L5" else {"grid": SMALL})).empirical_constant is None


@pytest.mark.parametrize("cid", ["L3", "L6", "L8"])
def test_empirical_constants_are_stable(cid):
    rep = bl.run_check(cid)
    assert rep.passed and rep.stable, rep.stability


def test_p1_constant_below_cap():
    rep = bl.check_P1()
    assert rep.passed and rep.empirical_constant <= 5.0
    # regression pin from the first oracle run on the calibration corpus
    assert rep.empirical_constant == pytest.approx(-0.175, abs=0.01)


@pytest.mark.xfail(strict=True, reason="P1 is a max over sparse extreme points; even/odd halves of the "
                   "corpus differ by far more than 10% (ledgered)")
def test_p1_half_sample_stability():
    assert bl.check_P1().stable


def test_l7_gap_condition():
    rep = bl.check_L7(SMALL)
    assert rep.passed
    D = rep.empirical_constant
    for b in (D, D + 0.5, D + 3):
        tau = bl.lm.TauPoint.on_arc("C1", b)
        assert abs(bl.lm.j_of_tau(tau)) > 0.5 / abs(tau.q)


def test_unknown_check():
    with pytest.raises(ValueError):
        bl.run_check("nope")


def test_power_experiment():
    t = bl.exponent_experiment(("power", 3), [10**3, 10**6])
    assert [r.max_count for r in t.rows] == [21, 201]
    assert t.slope == pytest.approx(1 / 3, abs=0.01)


def test_elliptic_experiment_small_family():
    t = bl.exponent_experiment(bl.box_family(5), [100, 1000, 10000])
    assert t.rows[-1].max_count >= t.rows[0].max_count
    assert t.slope < 1 / 3


def test_shallow_slope_b_cap():
    branch, cap = bl.lemma13_b_cap(10**6, 0, 1.0)
    assert branch == "A>=0" and cap == pytest.approx(1.5995e10, rel=1e-4)
    assert bl.lemma13_b_cap(-10, 1, 1.0)[0] == "A<0,27B^2<4C^3"


def test_shallow_slope_inequality_on_corpus_with_box_size():
    sample = []
    for A, B in CALIBRATION_CURVES:
        E = ShortCurve(A, B)
        sample.append((E, enumerate_box(E, BoxSpec.square(10**4)).points))
    rep = bl.verify_lemma13(sample, N=10**4)
    assert rep.samples > 0 and rep.passed and rep.constants_ok
    assert rep.worst_case <= 0


def test_shallow_slope_small_box_is_reported_not_hidden():
    # sizing N to the point itself is the unfair reading; the report just says so
    E = ShortCurve(0, 17)
    pts = enumerate_box(E, BoxSpec.square(100)).points
    rep = bl.verify_lemma13([(E, [(x, y) for x, y in pts if abs(x) > 1], 10)])
    assert rep.passed == (rep.worst_case <= 0)
    assert math.isfinite(rep.worst_case)
