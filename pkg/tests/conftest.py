"""Shared oracles and the acceptance summary hook.

The brute-force oracles here deliberately avoid the package's own scanning
code: they loop over integers and use gmpy2.is_square directly.
"""

from __future__ import annotations

import gmpy2
import pytest

ACCEPTANCE_LINES: list[str] = []


def brute_points(curve, box):
    """All integral (x, y) in ``box`` on a short or long curve, by a plain x-loop."""
    a1 = getattr(curve, "a1", 0)
    a3 = getattr(curve, "a3", 0)
    out = []
    for x in range(box.x_lo, box.x_hi + 1):
        if hasattr(curve, "a2"):
            rhs = x**3 + curve.a2 * x * x + curve.a4 * x + curve.a6
        else:
            rhs = x**3 + curve.A * x + curve.B
        # y^2 + (a1 x + a3) y - rhs = 0
        b = a1 * x + a3
        disc = b * b + 4 * rhs
        if disc < 0 or not gmpy2.is_square(disc):
            continue
        s = int(gmpy2.isqrt(disc))
        for num in {-b + s, -b - s}:
            if num % 2 == 0 and box.y_lo <= num // 2 <= box.y_hi:
                out.append((x, num // 2))
    return sorted(out)


def brute_square_x(A: int, B: int, a: int, b: int) -> int:
    n = 0
    for x in range(a, b + 1):
        r = x**3 + A * x + B
        if r >= 0 and gmpy2.is_square(r):
            n += 1
    return n


def brute_mod_p(A: int, B: int, p: int) -> tuple[int, int]:
    """(#E(F_p) including infinity, #distinct x with a point), via Euler's criterion."""
    pts, xs = 1, 0
    for x in range(p):
        r = (x * x * x + A * x + B) % p
        if r == 0:
            pts += 1
            xs += 1
        elif pow(r, (p - 1) // 2, p) == 1:
            pts += 2
            xs += 1
    return pts, xs


def record_acceptance(criterion: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def corpus_points():
    """(curve, point) for every integral point with y >= 0 in [-1e4, 1e4]^2 on the calibration corpus."""
    from intpoints.curve_models import BoxSpec, ShortCurve
    from intpoints.heights import CALIBRATION_CURVES, point

    out = []
    box = BoxSpec.square(10**4)
    for A, B in CALIBRATION_CURVES:
        E = ShortCurve(A, B)
        for x, y in brute_points(E, box):
            if y >= 0:
                out.append((E, point(E, x, y)))
    return out
