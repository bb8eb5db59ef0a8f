import math
import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import brute_mod_p, brute_points, brute_square_x
from intpoints.arith import primes_in
from intpoints.curve_models import BoxSpec, LongCurve, ShortCurve
from intpoints.errors import BadReduction, BoxTooLarge, DegenerateSieve, ValidationError
from intpoints.point_enum import (
    CountReport,
    ExponentProfile,
    SieveSetup,
    arbitrary_box_pipeline,
    branch_exponents,
    count_power_curve,
    enumerate_box,
    ev_bound_for_box,
    gradient_decomposition,
    large_sieve_bound,
    large_sieve_sqrt_specialisation,
    main_theorem_pipeline,
    sieve_certificate,
    square_x_count,
    xresidues_mod_p,
)

coef = st.integers(-60, 60)


def _nonsingular(A, B):
    return 4 * A**3 + 27 * B**2 != 0


# --- enumeration -------------------------------------------------------------


@given(coef, coef, st.integers(-50, 50), st.integers(0, 60), st.integers(-200, 200), st.integers(0, 300))
@settings(max_examples=150, deadline=None)
def test_enumerate_matches_brute(A, B, x0, wx, y0, wy):
    E = ShortCurve(A, B)
    box = BoxSpec(x0, x0 + wx, y0, y0 + wy)
    assert enumerate_box(E, box).points == brute_points(E, box)


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-20, 20), st.integers(-20, 20))
@settings(max_examples=100, deadline=None)
def test_enumerate_long_matches_brute(a2, a3, a4, a6):
    lc = LongCurve(0, a2, a3, a4, a6)
    box = BoxSpec(-80, 80, -700, 700)
    assert enumerate_box(lc, box).points == brute_points(lc, box)


@given(coef, coef, st.integers(1, 3000))
@settings(max_examples=80, deadline=None)
def test_enumerate_symmetric_in_y(A, B, N):
    pts = set(enumerate_box(ShortCurve(A, B), BoxSpec.square(N)).points)
    assert all((x, -y) in pts for x, y in pts)


def test_enumerate_big_values_exact():
    # f(x) reaches ~1e21 > 2^62 here, which forces the exact big-integer path
    for A, B in ((-(10**14), 0), (-(10**14), 10**14 + 1), (7 * 10**13, -3)):
        E = ShortCurve(A, B)
        box = BoxSpec(10**7 - 1000, 10**7 + 1000, -(10**7), 10**7)
        pts = enumerate_box(E, box).points
        assert pts == brute_points(E, box)
    assert (10**7, 0) in enumerate_box(ShortCurve(-(10**14), 0), box).points


def test_enumerate_known_curves():
    pts = enumerate_box(ShortCurve(0, 1), BoxSpec.square(1000)).points
    assert pts == [(-1, 0), (0, -1), (0, 1), (2, -3), (2, 3)]
    pts = enumerate_box(ShortCurve(0, 17), BoxSpec.square(10**6)).points
    # the 16 integral points of y^2 = x^3 + 17
    assert len(pts) == 16 and (5234, 378661) in pts


def test_box_guard():
    with pytest.raises(BoxTooLarge):
        enumerate_box(ShortCurve(0, 1), BoxSpec.square(10**8))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_power_curve_closed_form(d):
    for N in (10, 999, 10**4):
        brute = sum(1 for x in range(-N, N + 1) if abs(x**d) <= N)
        assert count_power_curve(d, N) == brute == 2 * math.floor(N ** (1 / d) + 1e-9) + 1


def test_count_report_invariant():
    with pytest.raises(AssertionError):
        CountReport(points=[(0, 1), (0, -1)], upper_bound=1.0)
    with pytest.raises(ValueError):
        ExponentProfile(eta_role="height")


# --- residues and the sieve -------------------------------------------------


@given(coef, coef, st.sampled_from(primes_in(5, 400)))
@settings(max_examples=120, deadline=None)
def test_residues_match_brute_and_hasse(A, B, p):
    E = ShortCurve(A, B)
    assume(E.disc % p != 0)
    st_ = xresidues_mod_p(E, p)
    pts, xs = brute_mod_p(A, B, p)
    assert (st_.point_count, st_.x_count) == (pts, xs)
    assert abs(pts - p - 1) <= 2 * math.sqrt(p)
    if p > 42:
        assert xs <= 0.75 * p


def test_bad_reduction_rejected():
    with pytest.raises(BadReduction):
        xresidues_mod_p(ShortCurve(0, 1), 3)
    E = ShortCurve(-1, 1)  # disc = -368 = -2^4 * 23
    with pytest.raises(BadReduction):
        xresidues_mod_p(E, 23)


def test_large_sieve_validation():
    with pytest.raises(DegenerateSieve):
        large_sieve_bound(SieveSetup((47,), 1.0, 50, 100))
    with pytest.raises(DegenerateSieve):
        large_sieve_bound(SieveSetup((), 0.5, 50, 100))
    with pytest.raises(ValidationError):
        SieveSetup((53,), 0.5, 50, 100)
    assert large_sieve_bound(SieveSetup((47, 53), 0.5, 60, 400)) == pytest.approx(0.5 * 4000 / (0.5 * 2))


def test_sqrt_specialisation():
    b = large_sieve_sqrt_specialisation(10**6)
    assert b.primes == 154 and b.premise_holds
    assert b.premise_rhs == pytest.approx(1000 / math.log(10**6))
    assert b.bound == pytest.approx(6 * 1000 * math.log(10**6))
    assert b.direct <= b.bound


@given(st.integers(-10**5, 10**5), st.integers(-10**5, 10**5), st.integers(-10**5, 10**5), st.integers(2500, 8000), st.booleans())
@settings(max_examples=40, deadline=None)
def test_sieve_is_sound(A, B, a, length, exact):
    assume(_nonsingular(A, B))
    E = ShortCurve(A, B)
    cert = sieve_certificate(E, (a, a + length), exact)
    assert cert.bound >= brute_square_x(A, B, a, a + length)
    assert cert.bound <= length + 1
    if cert.setup is not None:
        assert all(p <= cert.setup.X and E.disc % p for p in cert.setup.prime_set)


def test_sieve_short_interval_is_trivial():
    cert = sieve_certificate(ShortCurve(1, 1), (0, 100))
    assert cert.trivial and cert.bound == 101


def test_square_x_count_matches_brute():
    rng = random.Random(7)
    for _ in range(20):
        A, B = rng.randint(-500, 500), rng.randint(-500, 500)
        a = rng.randint(-300, 300)
        assert square_x_count(ShortCurve(A, B), (a, a + 2000)) == brute_square_x(A, B, a, a + 2000)


# --- gradient decomposition and EV -----------------------------------------


@given(st.integers(-10**9, 10**9), st.integers(100, 10**6), st.floats(0.001, 0.1), st.floats(0.0, 1.0))
@settings(max_examples=150, deadline=None)
def test_gradient_decomposition_covers(A, N, eps, mfrac):
    M = max(1, int(mfrac * N))
    dec = gradient_decomposition(ShortCurve(A, 1), N, eps, M)
    assert dec.covers()
    T = N ** (4 / 3 + eps)
    for lo, hi in dec.steep_arcs:
        # |3x^2 + A| >= T at both ends of each steep arc (it is monotone between)
        for x in (lo, hi):
            assert abs(3 * x * x + A) >= T * (1 - 1e-9)
    if dec.hypotheses_met:
        assert all(length <= dec.length_cap + 1e-9 for _, _, length in dec.flat_intervals)


def test_gradient_worked_example():
    dec = gradient_decomposition(ShortCurve(-3 * 10**8, 1), 1000, 0.01, 10)
    assert dec.flat_intervals == []
    assert dec.covers() and dec.hypotheses_met
    assert dec.length_cap == pytest.approx(4 / math.sqrt(3) * 1000 ** (2 / 3 - 0.01))
    centres = sorted((lo + hi) / 2 for lo, hi, _ in dec.flat_windows)
    assert centres[0] == pytest.approx(-10**4, abs=1) and centres[1] == pytest.approx(10**4, abs=1)
    assert all(length < dec.length_cap for _, _, length in dec.flat_windows)


def test_ev_bound_example():
    ev = ev_bound_for_box(LongCurve(0, 2, 0, 0, 0), 10, 0.0)
    assert ev.norm == 200 and ev.coefficients == (1, 1, 200, 0, 0)
    assert ev.bound == pytest.approx(10 ** (2 / 3) * 200 ** (-1 / 9) + 1)


def test_branch_exponents_balance_at_nine_halves():
    a, b = branch_exponents(0.01, 4.5)
    assert a == pytest.approx(b)
    for k in (3.0, 4.0, 5.0, 8.0):
        assert max(branch_exponents(0.01, k)) >= a - 1e-15


# --- pipelines ---------------------------------------------------------------


def _check_pipeline_report(rep, exact):
    assert rep.count == exact
    if rep.upper_bound is not None:
        assert rep.upper_bound >= exact
    for d in rep.details:
        if "certified_bound" in d and "exact_count" in d:
            assert d["certified_bound"] >= d["exact_count"]
        if "formula_bound" in d and "exact_count" in d and d["formula_bound"] < d["exact_count"]:
            # branch (ii) keeps a sound certified bound; its formula value has its own flag
            assert d["constant_dependent"] or d.get("formula_constant_dependent")


@given(st.integers(-3, 3), st.integers(-200, 200), st.integers(-3000, 3000), st.integers(10, 400))
@settings(max_examples=40, deadline=None)
def test_main_pipeline_sound(a2, a4, a6, N):
    lc = LongCurve(0, a2, 0, a4, a6)
    assume(lc.disc != 0)
    rep = main_theorem_pipeline(lc, N)
    _check_pipeline_report(rep, len(brute_points(lc, BoxSpec.square(N))))


def test_main_pipeline_branches():
    assert main_theorem_pipeline(ShortCurve(0, 1), 1000).branch == "iii:residual-hv"
    rep = main_theorem_pipeline(LongCurve(0, 10**6, 0, 0, 1), 100)
    assert rep.branch == "i:large-C-ev" and "constant-dependent" in rep.flags
    rep = main_theorem_pipeline(ShortCurve(-(10**9), 7), 1000)
    assert rep.branch == "ii:large-sieve" and rep.upper_bound >= rep.count
    with pytest.raises(ValidationError):
        main_theorem_pipeline(ShortCurve(0, 1), 5)
    with pytest.raises(ValidationError):
        main_theorem_pipeline(ShortCurve(0, 1), 100, k=2)


@given(st.integers(1, 50), st.integers(-50, 50), st.integers(-300, 300), st.integers(-300, 300), st.integers(4, 60))
@settings(max_examples=40, deadline=None)
def test_arbitrary_box_pipeline_sound(A, B, x0, y0, side):
    E = ShortCurve(A, B)
    assume(E.disc != 0)
    box = BoxSpec(x0, x0 + side, y0, y0 + side)
    rep = arbitrary_box_pipeline(E, box)
    _check_pipeline_report(rep, len(brute_points(E, box)))


def test_far_centre_box():
    rep = arbitrary_box_pipeline(ShortCurve(1, 1), BoxSpec(10**4 - 5, 10**4 + 5, -5, 5))
    assert rep.branch == "far-centre-ev"
    assert rep.count == 0 and "constant-dependent" in rep.flags


def test_shallow_slope_detail_on_positive_A():
    rep = arbitrary_box_pipeline(ShortCurve(3, 0), BoxSpec(-2, 40, -1, 41))
    lemma = next(d for d in rep.details if d["branch"] == "shallow-slope")
    assert any(p["x"] == 1 for p in lemma["points"]) is False  # |x| <= 1 excluded
    assert rep.upper_bound >= rep.count
