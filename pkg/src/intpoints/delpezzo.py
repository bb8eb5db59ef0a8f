"""Degree-1 del Pezzo surfaces y^2 = x^3 + F4(u, v) x + F6(u, v).

Integral points are counted fibre by fibre over (u, v) in [-N, N]^2 with
|x| <= N^2 and |y| <= N^3. Binary forms are stored as coefficient lists
c0..cd with F(u, v) = sum c_i u^(d-i) v^i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import gmpy2
import numpy as np

from .curve_models import BoxSpec, ShortCurve
from .errors import BoxTooLarge, ValidationError
from .point_enum import BOX_GUARD, enumerate_box

N_MAX = 30


def eval_form(coeffs: Sequence[int], u: int, v: int) -> int:
    d = len(coeffs) - 1
    return sum(c * u ** (d - i) * v**i for i, c in enumerate(coeffs))


def _form_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@dataclass(frozen=True)
class DP1Surface:
    F4: tuple
    F6: tuple

    def __post_init__(self):
        f4, f6 = tuple(int(c) for c in self.F4), tuple(int(c) for c in self.F6)
        if len(f4) != 5 or len(f6) != 7:
            raise ValidationError("F4 needs 5 coefficients and F6 needs 7")
        object.__setattr__(self, "F4", f4)
        object.__setattr__(self, "F6", f6)

    def disc_form(self) -> list[int]:
        """Coefficients of the degree-12 form 4 F4^3 + 27 F6^2."""
        cube = _form_mul(_form_mul(self.F4, self.F4), self.F4)
        sq = _form_mul(self.F6, self.F6)
        return [4 * a + 27 * b for a, b in zip(cube, sq)]

    @property
    def degenerate(self) -> bool:
        """Every fibre is singular: 4 F4^3 + 27 F6^2 vanishes identically."""
        return not any(self.disc_form())

    def to_json(self) -> dict:
        return {"F4": list(self.F4), "F6": list(self.F6)}

    @classmethod
    def from_json(cls, obj: dict) -> "DP1Surface":
        try:
            return cls(tuple(int(c) for c in obj["F4"]), tuple(int(c) for c in obj["F6"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad surface spec: {exc}") from None


@dataclass(frozen=True)
class SingularFiber:
    u: int
    v: int
    A: int
    B: int

    @property
    def disc(self) -> int:
        return -16 * (4 * self.A**3 + 27 * self.B**2)


def specialize(surface: DP1Surface, u: int, v: int) -> Union[ShortCurve, SingularFiber]:
    A, B = eval_form(surface.F4, u, v), eval_form(surface.F6, u, v)
    if 4 * A**3 + 27 * B**2 == 0:
        return SingularFiber(u, v, A, B)
    return ShortCurve(A, B)


def _scan_singular(A: int, B: int, X: int, Y: int) -> int:
    """Points with |x| <= X, |y| <= Y on y^2 = x^3 + A x + B, by exact square tests."""
    n = 0
    for x in range(-X, X + 1):
        r = x**3 + A * x + B
        if r < 0 or not gmpy2.is_square(r):
            continue
        s = int(gmpy2.isqrt(r))
        if s <= Y:
            n += 1 if s == 0 else 2
    return n


@dataclass
class DPCountReport:
    N: int
    total: int
    per_fiber: dict
    singular_fibers: list
    disc_zero_count: int
    distinct_curves: int = 0
    flags: list = field(default_factory=list)
    reference: dict = field(default_factory=dict)

    def __post_init__(self):
        s = sum(self.per_fiber.values()) + sum(f["count"] for f in self.singular_fibers)
        if s != self.total:
            raise AssertionError(f"fibre sums {s} != total {self.total}")

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "total": self.total,
            "per_fiber": [[u, v, c] for (u, v), c in sorted(self.per_fiber.items())],
            "singular_fibers": self.singular_fibers,
            "disc_zero_count": self.disc_zero_count,
            "distinct_curves": self.distinct_curves,
            "flags": self.flags,
            "reference": self.reference,
        }


def count_S_N(surface: DP1Surface, N: int, eps: float = 0.01) -> DPCountReport:
    if N < 0:
        raise ValidationError("N must be >= 0")
    if N > N_MAX:
        raise BoxTooLarge(f"N={N} above the desk-scale limit {N_MAX}")
    X, Y = N * N, N**3
    if 2 * Y > BOX_GUARD:
        raise BoxTooLarge("fibre box exceeds the enumeration guard")
    box = BoxSpec(-X, X, -Y, Y)
    cache: dict[tuple[int, int], int] = {}
    per_fiber: dict[tuple[int, int], int] = {}
    singular = []
    for u in range(-N, N + 1):
        for v in range(-N, N + 1):
            fib = specialize(surface, u, v)
            if isinstance(fib, SingularFiber):
                key = (fib.A, fib.B)
                if key not in cache:
                    cache[key] = _scan_singular(fib.A, fib.B, X, Y)
                singular.append({"u": u, "v": v, "A": fib.A, "B": fib.B, "count": cache[key]})
                continue
            key = (fib.A, fib.B)
            if key not in cache:
                cache[key] = len(enumerate_box(fib, box).points)
            per_fiber[(u, v)] = cache[key]
    total = sum(per_fiber.values()) + sum(f["count"] for f in singular)
    flags = []
    if surface.degenerate:
        flags.append("degenerate surface")
    ref = {
        "disc_zero_reference": float(max(N, 1)) ** (1 / 12 + eps),
        "slope_reference": 3.0,
    }
    return DPCountReport(N, total, per_fiber, singular, len(singular), len(cache), flags, ref)


def brute_S_N(surface: DP1Surface, N: int) -> int:
    """Direct count over all (x, y, u, v); only for tiny N."""
    if N > 4:
        raise BoxTooLarge("the 4-variable recount is for N <= 4")
    X, Y = N * N, N**3
    n = 0
    for u in range(-N, N + 1):
        for v in range(-N, N + 1):
            A, B = eval_form(surface.F4, u, v), eval_form(surface.F6, u, v)
            for x in range(-X, X + 1):
                r = x**3 + A * x + B
                for y in range(-Y, Y + 1):
                    if y * y == r:
                        n += 1
    return n


@dataclass
class DPExponentTable:
    rows: list
    total_slope: float
    fiber_slope: float
    references: dict
    flags: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "total_slope": self.total_slope,
            "fiber_slope": self.fiber_slope,
            "references": self.references,
            "flags": self.flags,
        }


def _slope(Ns, vals) -> float:
    x = np.log(np.asarray(Ns, dtype=float))
    y = np.log(np.maximum(np.asarray(vals, dtype=float), 1.0))
    return float(np.polyfit(x, y, 1)[0]) if len(Ns) > 1 else float("nan")


def dp_exponent_experiment(surface: DP1Surface, N_list: Sequence[int]) -> DPExponentTable:
    Ns = sorted(int(n) for n in N_list)
    if Ns and Ns[-1] > N_MAX:
        raise BoxTooLarge(f"max N above {N_MAX}")
    if any(n < 1 for n in Ns):
        raise ValidationError("N values must be >= 1")
    rows = []
    flags = []
    for N in Ns:
        rep = count_S_N(surface, N)
        # the per-fibre reference applies to nonsingular fibres only
        fiber_max = max(rep.per_fiber.values(), default=0)
        singular_max = max((f["count"] for f in rep.singular_fibers), default=0)
        rows.append({"N": N, "total": rep.total, "fiber_max": fiber_max, "singular_max": singular_max,
                     "disc_zero": rep.disc_zero_count})
        flags.extend(rep.flags)
    ts = _slope(Ns, [r["total"] for r in rows])
    fs = _slope(Ns, [r["fiber_max"] for r in rows])
    refs = {"total": 3.0, "total_alternate": 2.0, "fiber": 1.0, "pairs": 2.0}
    if not math.isnan(ts) and fs > ts - 2 + 0.3:
        flags.append("fiber slope above total slope - 2 + 0.3")
    return DPExponentTable(rows, ts, fs, refs, sorted(set(flags)))
