"""Weierstrass models, invariants, exact coordinate changes, norm thresholds.

Two model types are used throughout:

``ShortCurve``  y^2 = x^3 + A x + B
``LongCurve``   y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6

All coefficients are Python ints (arbitrary precision) and every change of
variables is carried as an exact ``AffineChange`` over the rationals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import UnsupportedForm, ValidationError


@dataclass(frozen=True)
class ShortCurve:
    A: int
    B: int

    def __post_init__(self):
        object.__setattr__(self, "A", int(self.A))
        object.__setattr__(self, "B", int(self.B))

    @property
    def disc(self) -> int:
        return -16 * (4 * self.A**3 + 27 * self.B**2)

    @property
    def is_singular(self) -> bool:
        return self.disc == 0

    def rhs(self, x):
        return x**3 + self.A * x + self.B

    def contains(self, x, y) -> bool:
        return y * y == self.rhs(x)

    def to_long(self) -> "LongCurve":
        return LongCurve(0, 0, 0, self.A, self.B)

    def coefficients(self) -> tuple[int, ...]:
        # y^2 - x^3 - A x - B
        return (1, 1, self.A, self.B)

    def __str__(self):
        return f"y^2 = x^3 + ({self.A})x + ({self.B})"


@dataclass(frozen=True)
class LongCurve:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, int(getattr(self, name)))

    @property
    def b_invariants(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def disc(self) -> int:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def is_short(self) -> bool:
        return self.a1 == 0 and self.a2 == 0 and self.a3 == 0

    def cubic(self, x):
        return x**3 + self.a2 * x * x + self.a4 * x + self.a6

    def y_discriminant(self, x):
        """(2y + a1 x + a3)^2 as a function of x."""
        return (self.a1 * x + self.a3) ** 2 + 4 * self.cubic(x)

    def contains(self, x, y) -> bool:
        return y * y + self.a1 * x * y + self.a3 * y == self.cubic(x)

    def coefficients(self) -> tuple[int, ...]:
        return (1, self.a1, self.a3, 1, self.a2, self.a4, self.a6)

    def __str__(self):
        return (
            f"y^2 + ({self.a1})xy + ({self.a3})y = "
            f"x^3 + ({self.a2})x^2 + ({self.a4})x + ({self.a6})"
        )


Curve = Union[ShortCurve, LongCurve]


@dataclass(frozen=True)
class Invariants:
    disc: int
    c4: Fraction
    j: Optional[Fraction]

    @property
    def singular(self) -> bool:
        return self.j is None


def invariants_of(curve: ShortCurve) -> Invariants:
    """Discriminant, c4 = -A/27 and j = -1728 (4A)^3 / disc, all exact.

    ``j`` is ``None`` for singular curves.
    """
    disc = curve.disc
    c4 = Fraction(-curve.A, 27)
    j = None if disc == 0 else Fraction(-1728 * (4 * curve.A) ** 3, disc)
    return Invariants(disc=disc, c4=c4, j=j)


@dataclass(frozen=True)
class BoxSpec:
    x_lo: int
    x_hi: int
    y_lo: int
    y_hi: int

    def __post_init__(self):
        for name in ("x_lo", "x_hi", "y_lo", "y_hi"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            raise ValidationError(f"inverted box {self}")

    @classmethod
    def square(cls, N: int, centre: tuple[int, int] = (0, 0)) -> "BoxSpec":
        x0, y0 = centre
        return cls(x0 - N, x0 + N, y0 - N, y0 + N)

    @property
    def widths(self) -> tuple[int, int]:
        return self.x_hi - self.x_lo, self.y_hi - self.y_lo

    @property
    def side(self) -> int:
        return max(self.widths)

    @property
    def centre(self) -> tuple[int, int]:
        return (self.x_lo + self.x_hi) // 2, (self.y_lo + self.y_hi) // 2

    @property
    def half_side(self) -> int:
        """Smallest h with the box inside [-h, h]^2 around its centre."""
        x0, y0 = self.centre
        return max(x0 - self.x_lo, self.x_hi - x0, y0 - self.y_lo, self.y_hi - y0)

    def contains(self, x: int, y: int) -> bool:
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi

    def shifted(self, dx: int, dy: int) -> "BoxSpec":
        return BoxSpec(self.x_lo + dx, self.x_hi + dx, self.y_lo + dy, self.y_hi + dy)


@dataclass(frozen=True)
class AffineChange:
    """X = x_scale * x + x_shift, Y = y_scale * y + y_shift."""

    x_scale: Fraction = Fraction(1)
    x_shift: Fraction = Fraction(0)
    y_scale: Fraction = Fraction(1)
    y_shift: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("x_scale", "x_shift", "y_scale", "y_shift"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.x_scale == 0 or self.y_scale == 0:
            raise ValidationError("affine change needs nonzero scales")

    def apply(self, x, y) -> tuple[Fraction, Fraction]:
        return (self.x_scale * x + self.x_shift, self.y_scale * y + self.y_shift)

    def inverse(self) -> "AffineChange":
        return AffineChange(
            1 / self.x_scale,
            -self.x_shift / self.x_scale,
            1 / self.y_scale,
            -self.y_shift / self.y_scale,
        )

    def then(self, other: "AffineChange") -> "AffineChange":
        """Apply ``self`` first, then ``other``."""
        return AffineChange(
            other.x_scale * self.x_scale,
            other.x_scale * self.x_shift + other.x_shift,
            other.y_scale * self.y_scale,
            other.y_scale * self.y_shift + other.y_shift,
        )

    @property
    def is_identity(self) -> bool:
        return self == AffineChange()


def _monic_to_short(C: int, D: int, F: int) -> tuple[ShortCurve, AffineChange]:
    # y^2 = x^3 + C x^2 + D x + F under X = 9x + 3C, Y = 27y
    A = 81 * D - 27 * C * C
    B = 54 * C**3 - 243 * C * D + 729 * F
    return ShortCurve(A, B), AffineChange(9, 3 * C, 27, 0)


def to_short_form(curve: Curve) -> tuple[ShortCurve, AffineChange]:
    """Exact integral change to y^2 = x^3 + Ax + B.

    Already-short input gets the identity; y^2 = cubic uses X = 9x + 3C,
    Y = 27y; a nonzero a3 is absorbed first via x' = 4x, y' = 8y + 4a3.
    """
    if isinstance(curve, ShortCurve):
        return curve, AffineChange()
    if curve.a1 != 0:
        raise UnsupportedForm("a1 != 0: the box distortion defeats the method")
    if curve.is_short:
        return ShortCurve(curve.a4, curve.a6), AffineChange()
    if curve.a3 == 0:
        return _monic_to_short(curve.a2, curve.a4, curve.a6)
    a2, a3, a4, a6 = curve.a2, curve.a3, curve.a4, curve.a6
    first = AffineChange(4, 0, 8, 4 * a3)
    short, second = _monic_to_short(4 * a2, 16 * a4, 64 * a6 + 16 * a3 * a3)
    return short, first.then(second)


def translate_box_to_origin(
    curve: Curve, box: BoxSpec
) -> tuple[LongCurve, BoxSpec, AffineChange]:
    """Recentre ``box`` at the origin via X = x - x0, Y = y - y0.

    The centre is the floor of the midpoint. The returned box is the smallest
    origin-centred square containing the shifted box (odd widths widen by one).
    """
    lc = curve.to_long() if isinstance(curve, ShortCurve) else curve
    if lc.a1 != 0:
        raise UnsupportedForm("a1 != 0")
    x0, y0 = box.centre
    a2, a3, a4 = lc.a2, lc.a3, lc.a4
    moved = LongCurve(
        0,
        3 * x0 + a2,
        2 * y0 + a3,
        3 * x0 * x0 + 2 * a2 * x0 + a4,
        lc.cubic(x0) - y0 * y0 - a3 * y0,
    )
    h = box.half_side
    return moved, BoxSpec(-h, h, -h, h), AffineChange(1, -x0, 1, -y0)


def coefficient_norm(obj) -> int:
    """Max modulus of the coefficients of the defining polynomial."""
    if isinstance(obj, (ShortCurve, LongCurve)):
        coeffs = obj.coefficients()
    else:
        coeffs = tuple(obj)
    return max(abs(int(c)) for c in coeffs)


@dataclass(frozen=True)
class HeathBrownReport:
    d: int
    N: int
    norm: int
    exponent: int
    case: str  # "count<=d^2" or "norm-bounded"
    log_ratio: float  # log(||F|| / N^exponent)
    disc_exponent: Optional[int]  # 180 for cubics: |disc| << ||E||^6 << N^180

    @property
    def count_bound(self) -> Optional[int]:
        return self.d**2 if self.case == "count<=d^2" else None


def heath_brown_case(curve_or_norm, N: int, d: int = 3) -> HeathBrownReport:
    """Which disjunct of the norm/count dichotomy applies (implied constant 1)."""
    if d < 1 or N < 1:
        raise ValidationError("need d >= 1 and N >= 1")
    norm = (
        int(curve_or_norm)
        if isinstance(curve_or_norm, int)
        else coefficient_norm(curve_or_norm)
    )
    e = d * (d + 1) * (d + 2) // 2
    case = "count<=d^2" if norm > N**e else "norm-bounded"
    log_ratio = math.log(norm) - e * math.log(N) if norm > 0 else -math.inf
    return HeathBrownReport(
        d=d,
        N=N,
        norm=norm,
        exponent=e,
        case=case,
        log_ratio=log_ratio,
        disc_exponent=6 * e if d == 3 else None,
    )


# --- JSON I/O --------------------------------------------------------------


def curve_from_json(data) -> Curve:
    """Parse {"form":"short","A":..,"B":..} or {"form":"long","a":[a1,a2,a3,a4,a6]}."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad curve JSON: {exc}") from exc
    try:
        form = data["form"]
        if form == "short":
            return ShortCurve(int(str(data["A"])), int(str(data["B"])))
        if form == "long":
            a = [int(str(c)) for c in data["a"]]
            if len(a) != 5:
                raise ValidationError("long form needs 5 coefficients")
            return LongCurve(*a)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad curve spec: {data!r}") from exc
    raise ValidationError(f"unknown curve form {form!r}")


def curve_to_json(curve: Curve) -> dict:
    if isinstance(curve, ShortCurve):
        return {"form": "short", "A": str(curve.A), "B": str(curve.B)}
    return {
        "form": "long",
        "a": [str(c) for c in (curve.a1, curve.a2, curve.a3, curve.a4, curve.a6)],
    }


def box_from_json(data) -> BoxSpec:
    """Accept {"x":[lo,hi],"y":[lo,hi]} or a flat [xlo,xhi,ylo,yhi]."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad box JSON: {exc}") from exc
    try:
        if isinstance(data, dict):
            (xl, xh), (yl, yh) = data["x"], data["y"]
        else:
            xl, xh, yl, yh = data
        return BoxSpec(int(xl), int(xh), int(yl), int(yh))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad box spec: {data!r}") from exc


def box_to_json(box: BoxSpec) -> dict:
    return {"x": [box.x_lo, box.x_hi], "y": [box.y_lo, box.y_hi]}
