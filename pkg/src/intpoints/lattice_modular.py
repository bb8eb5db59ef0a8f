"""Lattice and modular numerics on the real-j set of tau.

The lattice is Lambda_tau = Z + Z tau. tau always lives on one of three arcs:

C1  tau = i b,          b >= 1          j >= 1728
C2  tau = e^{i theta},  pi/3 <= theta < pi/2   0 <= j < 1728
C3  tau = 1/2 + i b,    b > sqrt(3)/2   j < 0

so |q| <= exp(-pi sqrt 3) and every q-series below converges fast. Everything
runs in complex double precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import zeta

from .errors import BracketFailure, DomainError, NoRoot, NonConvergence

TWO_PI = 2.0 * math.pi
SQRT3_2 = math.sqrt(3.0) / 2.0
RHO = cmath.exp(1j * math.pi / 3)
REGIONS = ("C1", "C2", "C3")


@dataclass(frozen=True)
class SeriesControl:
    term_tolerance: float = 1e-18
    max_terms: int = 100_000

    def __post_init__(self):
        if not self.term_tolerance > 0:
            raise ValueError("term_tolerance must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be positive")


DEFAULT_CTL = SeriesControl()


@dataclass(frozen=True)
class TauPoint:
    value: complex
    region: str
    q: complex = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = complex(self.value)
        object.__setattr__(self, "value", v)
        if self.region not in REGIONS:
            raise ValueError(f"unknown region {self.region!r}")
        tol = 1e-12
        if self.region == "C1":
            ok = abs(v.real) <= tol and v.imag >= 1 - tol
        elif self.region == "C2":
            th = cmath.phase(v)
            ok = abs(abs(v) - 1) <= tol and math.pi / 3 - tol <= th < math.pi / 2 + tol
        else:
            ok = abs(v.real - 0.5) <= tol and v.imag > SQRT3_2 - tol
        if not ok:
            raise ValueError(f"tau={v} is not on arc {self.region}")
        object.__setattr__(self, "q", cmath.exp(TWO_PI * 1j * v))

    @classmethod
    def on_arc(cls, region: str, param: float) -> "TauPoint":
        """C1/C3: param = Im tau; C2: param = theta."""
        if region == "C1":
            return cls(complex(0.0, param), "C1")
        if region == "C2":
            return cls(cmath.exp(1j * param), "C2")
        return cls(complex(0.5, param), "C3")

    @property
    def imag(self) -> float:
        return self.value.imag


I_TAU = TauPoint(1j, "C1")
RHO_TAU = TauPoint(RHO, "C2")


@dataclass(frozen=True)
class FundamentalPoint:
    """u = u1 + u2 tau with u1, u2 in (-1/2, 1/2]."""

    u1: float
    u2: float
    tau: complex
    t: complex = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for c in (self.u1, self.u2):
            if not (-0.5 - 1e-12 < c <= 0.5 + 1e-12):
                raise ValueError(f"({self.u1}, {self.u2}) outside the parallelogram")
        object.__setattr__(self, "t", cmath.exp(TWO_PI * 1j * self.u))

    @property
    def u(self) -> complex:
        return self.u1 + self.u2 * self.tau

    @classmethod
    def from_complex(cls, u: complex, tau: complex) -> "FundamentalPoint":
        u1, u2 = reduce_to_parallelogram(u, tau)
        return cls(u1, u2, tau)

    def negated(self) -> "FundamentalPoint":
        return FundamentalPoint.from_complex(-self.u, self.tau)


def _half_open(c: float) -> float:
    # representative of c mod 1 in (-1/2, 1/2]
    return c - math.ceil(c - 0.5)


def reduce_to_parallelogram(u: complex, tau: complex) -> tuple[float, float]:
    u2 = u.imag / tau.imag
    u1 = u.real - u2 * tau.real
    return _half_open(u1), _half_open(u2)


# --- Eisenstein series -----------------------------------------------------


@lru_cache(maxsize=512)
def _zeta2(k2: int) -> float:
    return float(zeta(k2, 1))


def _check_k2(k2: int):
    if k2 < 4 or k2 % 2:
        raise ValueError(f"weight must be even and >= 4, got {k2}")


def eisenstein_G(k2: int, tau: TauPoint, ctl: SeriesControl = DEFAULT_CTL) -> complex:
    """Sum over nonzero lattice vectors of omega^-k2, via the q-expansion

    G_k2 = 2 zeta(k2) + 2 (2 pi i)^k2 / (k2-1)! * sum_r r^(k2-1) q^r / (1 - q^r).

    Terms are assembled in log space so high weights neither overflow nor
    underflow.
    """
    return eisenstein_G_at(k2, tau.value, ctl)


def eisenstein_G_at(k2: int, tau: complex, ctl: SeriesControl = DEFAULT_CTL) -> complex:
    """eisenstein_G for any tau in the upper half plane (no arc check)."""
    _check_k2(k2)
    tau = complex(tau)
    b = tau.imag
    if not b > 0:
        raise DomainError("tau must lie in the upper half plane")
    re = tau.real
    lead = k2 * math.log(TWO_PI) - math.lgamma(k2)
    sign = -1.0 if (k2 // 2) % 2 else 1.0
    peak = (k2 - 1) / (TWO_PI * b)
    log_tol = math.log(ctl.term_tolerance)
    total = 0j
    for r in range(1, ctl.max_terms + 1):
        logmag = lead + (k2 - 1) * math.log(r) - TWO_PI * b * r
        qr = cmath.exp(TWO_PI * 1j * r * tau)
        total += math.exp(logmag) * cmath.exp(TWO_PI * 1j * r * re) / (1 - qr)
        if r > peak and logmag < log_tol - 1:
            return 2 * _zeta2(k2) + 2 * sign * total
    raise NonConvergence(f"G_{k2} did not converge in {ctl.max_terms} terms")


def lattice_sum_G(k2: int, tau: complex, R: int) -> tuple[complex, float]:
    """Direct sum of omega^-k2 over |m|, |n| <= R, with a tail bound.

    Independent of the q-expansion; used as a cross-check. The tail bound
    counts 8r lattice vectors on the square shell of radius r, each of modulus
    at least r * Im(tau)/|tau|-ish; we use the cruder min(1, Im tau) * r.
    """
    _check_k2(k2)
    tau = complex(tau)
    m = np.arange(-R, R + 1, dtype=np.float64)
    total = 0j
    for n in range(-R, R + 1):
        w = m + n * tau
        if n == 0:
            w = w[m != 0]
        total += np.sum(w ** (-k2))
    s = min(1.0, tau.imag)
    # sum_{r > R} 8 r (s r)^-k2 <= 8 s^-k2 R^(2-k2) / (k2-2)
    tail = 8.0 * s ** (-k2) * R ** (2.0 - k2) / (k2 - 2)
    return complex(total), tail


def c1_majorant(b: float) -> float:
    """sum over nonzero omega in Z + ibZ of |omega|^-4, by row closed forms.

    Row n sums to pi coth(x) / (2c^3) + pi^2 / (2 c^2 sinh^2 x) with c = nb,
    x = pi c. Once x > 40 the hyperbolic corrections are below 1e-34 and the
    remaining rows sum to pi / (2 b^3) * zeta(3, n).
    """
    total = 2 * _zeta2(4)
    n = 1
    while True:
        c = n * b
        x = math.pi * c
        if x > 40:
            return total + 2 * math.pi / (2 * b**3) * float(zeta(3, n))
        total += 2 * (math.pi / (2 * c**3) / math.tanh(x) + math.pi**2 / (2 * c**2 * math.sinh(x) ** 2))
        n += 1


def weierstrass_coeffs(tau: TauPoint, ctl: SeriesControl = DEFAULT_CTL) -> tuple[complex, complex]:
    """(a, b) for E_tau : y^2 = x^3 + a x + b with x = wp, y = wp'/2."""
    return -15 * eisenstein_G(4, tau, ctl), -35 * eisenstein_G(6, tau, ctl)


def g2_g3(tau: TauPoint, ctl: SeriesControl = DEFAULT_CTL) -> tuple[complex, complex]:
    return 60 * eisenstein_G(4, tau, ctl), 140 * eisenstein_G(6, tau, ctl)


# --- Weierstrass p ---------------------------------------------------------


@lru_cache(maxsize=256)
def _laurent_coeffs(tau: TauPoint, kmax: int, tol: float, max_terms: int) -> np.ndarray:
    ctl = SeriesControl(tol, max_terms)
    return np.array(
        [(2 * k + 1) * eisenstein_G(2 * k + 2, tau, ctl) for k in range(1, kmax + 1)],
        dtype=complex,
    )


def _laurent_terms(r: float, tol: float) -> int:
    # tail of sum (2k+1) 80 r^(2k) beyond K is below 80 (2K+3) r^(2K+2) / (1-r^2)^2
    K = 1
    while 80 * (2 * K + 3) * r ** (2 * K + 2) / (1 - r * r) ** 2 >= tol:
        K += 1
    return K


def wp(tau: TauPoint, z: complex, ctl: SeriesControl = DEFAULT_CTL) -> tuple[complex, complex]:
    """(wp(z), wp'(z)) from the Laurent series at the origin, valid for 0 < |z| <= 1/2."""
    z = complex(z)
    r = abs(z)
    if r == 0:
        raise DomainError("wp has a pole at z = 0")
    if r > 0.5 + 1e-12:
        raise DomainError("Laurent evaluation needs |z| <= 1/2; use wp_qseries")
    K = _laurent_terms(r, ctl.term_tolerance)
    if K > ctl.max_terms:
        raise NonConvergence("Laurent series too long")
    coeffs = _laurent_coeffs(tau, K, ctl.term_tolerance, ctl.max_terms)
    z2 = z * z
    p = 1 / z2
    dp = -2 / (z2 * z)
    zk = 1 + 0j  # z^(2k-2)
    for k in range(1, K + 1):
        dp += coeffs[k - 1] * 2 * k * zk * z
        zk *= z2
        p += coeffs[k - 1] * zk
    return complex(p), complex(dp)


def _qseries_terms(tau: TauPoint, ctl: SeriesControl) -> int:
    lq = math.log(abs(tau.q))
    n = int(math.ceil(math.log(ctl.term_tolerance) / lq)) + 2
    if n > ctl.max_terms:
        raise NonConvergence("q-series too long")
    return max(n, 2)


def wp_qseries(tau: TauPoint, u: complex, ctl: SeriesControl = DEFAULT_CTL) -> tuple[complex, complex]:
    """(wp(u), wp'(u)) for any u not in the lattice, via the q-series in t = e^(2 pi i u).

    u is first moved into the fundamental parallelogram; the leading terms are
    written with sin(pi u) so that small u loses no precision.
    """
    u1, u2 = reduce_to_parallelogram(complex(u), tau.value)
    u = u1 + u2 * tau.value
    if abs(u) < 1e-300:
        raise DomainError("wp has a pole at lattice points")
    s = cmath.sin(math.pi * u)
    c = cmath.cos(math.pi * u)
    p = (math.pi / s) ** 2 - math.pi**2 / 3
    dp = -2 * math.pi**3 * c / s**3
    t = cmath.exp(TWO_PI * 1j * u)
    q = tau.q
    acc = 0j
    dacc = 0j
    qn = 1 + 0j
    for _ in range(_qseries_terms(tau, ctl)):
        qn *= q
        w = qn * t
        v = qn / t
        acc += w / (1 - w) ** 2 + v / (1 - v) ** 2 - 2 * qn / (1 - qn) ** 2
        dacc += w * (1 + w) / (1 - w) ** 3 - v * (1 + v) / (1 - v) ** 3
    p += -4 * math.pi**2 * acc
    dp += (TWO_PI * 1j) ** 3 * dacc
    return complex(p), complex(dp)


# --- discriminant and j ----------------------------------------------------


def delta_tau(tau: TauPoint, ctl: SeriesControl = DEFAULT_CTL) -> complex:
    """(2 pi)^12 q prod (1 - q^n)^24."""
    q = tau.q
    prod = 1 + 0j
    qn = 1 + 0j
    for _ in range(_qseries_terms(tau, ctl)):
        qn *= q
        prod *= (1 - qn) ** 24
    return TWO_PI**12 * q * prod


def log_abs_delta(tau: TauPoint, ctl: SeriesControl = DEFAULT_CTL) -> float:
    return math.log(abs(delta_tau(tau, ctl)))


def delta_eisenstein(tau: TauPoint, ctl: SeriesControl = DEFAULT_CTL) -> complex:
    g2, g3 = g2_g3(tau, ctl)
    return g2**3 - 27 * g3**2


def delta_eisenstein_qexp(tau: TauPoint, ctl: SeriesControl = DEFAULT_CTL) -> complex:
    """g2^3 - 27 g3^2 with the cancellation done in exact integers.

    g2 = (4 pi^4 / 3) E4 and g3 = (8 pi^6 / 27) E6, so g2^3 - 27 g3^2 equals
    (2 pi)^12 / 1728 * (E4^3 - E6^2). The divisor-sum coefficients of
    E4^3 - E6^2 are formed exactly before q is substituted, which avoids the
    loss of log10(|j| / 1728) digits suffered by delta_eisenstein.
    """
    n = _qseries_terms(tau, ctl) + 1
    e4 = [1] + [240 * sum(d**3 for d in range(1, k + 1) if k % d == 0) for k in range(1, n)]
    e6 = [1] + [-504 * sum(d**5 for d in range(1, k + 1) if k % d == 0) for k in range(1, n)]
    diff = [a - b for a, b in zip(_series_mul(_series_mul(e4, e4, n), e4, n), _series_mul(e6, e6, n))]
    q = tau.q
    acc = 0j
    for c in reversed(diff):
        acc = acc * q + c
    return TWO_PI**12 / 1728 * acc


def j_of_tau(tau: TauPoint, ctl: SeriesControl = DEFAULT_CTL) -> complex:
    g2 = 60 * eisenstein_G(4, tau, ctl)
    return 1728 * g2**3 / delta_tau(tau, ctl)


def _series_mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * n
    for i, ai in enumerate(a[:n]):
        if ai:
            for k, bk in enumerate(b[: n - i]):
                out[i + k] += ai * bk
    return out


def j_qexp_coeffs(n_max: int, ctl: Optional[SeriesControl] = None) -> list[int]:
    """Exact c(0..n_max) with j = 1/q + sum c(n) q^n, from E4^3 / (q prod (1-q^n)^24)."""
    if n_max < 0 or n_max > 64:
        raise ValueError("n_max must lie in [0, 64]")
    L = n_max + 2  # j has a q^-1 term, so one extra coefficient
    e4 = [1] + [240 * sum(d**3 for d in range(1, n + 1) if n % d == 0) for n in range(1, L)]
    e4_cubed = _series_mul(_series_mul(e4, e4, L), e4, L)
    eta24 = [1] + [0] * (L - 1)  # prod (1 - q^n)^24
    for n in range(1, L):
        factor = [0] * L
        factor[0] = 1
        factor[n] = -1
        for _ in range(24):
            eta24 = _series_mul(eta24, factor, L)
    # power-series division; eta24 has unit constant term
    quot = [0] * L
    for i in range(L):
        acc = e4_cubed[i] - sum(quot[k] * eta24[i - k] for k in range(i))
        quot[i] = acc
    # quot = q * j, so quot[0] = 1 is the 1/q term
    return quot[1 : n_max + 2]


def petersson_ratio(n: int, c_n: int) -> float:
    return c_n * math.sqrt(2) * n**0.75 / math.exp(4 * math.pi * math.sqrt(n))


# --- tau association --------------------------------------------------------


def _j_real(region: str, param: float, ctl: SeriesControl) -> float:
    return j_of_tau(TauPoint.on_arc(region, param), ctl).real


@dataclass(frozen=True)
class TauFit:
    tau: TauPoint
    residual: float
    iterations: int


def associate_tau(
    j_real: float,
    ctl: SeriesControl = DEFAULT_CTL,
    tol_abs: float = 1e-9,
    tol_rel: float = 1e-12,
    with_residual: bool = False,
):
    """The unique tau on the real-j arcs with j(tau) = j_real, by bisection.

    j is increasing in b on C1, increasing in theta backwards on C2 and
    decreasing in b on C3. Every midpoint is checked to lie between the
    bracket values; a violation means j is not monotone there and raises.
    """
    j_real = float(j_real)
    if not math.isfinite(j_real):
        raise ValueError("j must be finite")
    if j_real == 1728.0:
        fit = TauFit(I_TAU, 0.0, 0)
        return fit if with_residual else fit.tau
    if j_real == 0.0:
        fit = TauFit(RHO_TAU, 0.0, 0)
        return fit if with_residual else fit.tau
    cap = max(10.0, math.log(2 * abs(j_real)) / TWO_PI + 2)
    if j_real > 1728:
        region, lo, hi = "C1", 1.0, cap
    elif j_real > 0:
        region, lo, hi = "C2", math.pi / 3, math.pi / 2
    else:
        region, lo, hi = "C3", SQRT3_2, cap
    if region == "C2":
        f_lo, f_hi = 0.0, 1728.0
    else:
        f_lo, f_hi = _j_real(region, lo, ctl), _j_real(region, hi, ctl)
    if not (min(f_lo, f_hi) <= j_real <= max(f_lo, f_hi)):
        raise BracketFailure(f"j={j_real} not bracketed on {region} within Im tau <= {cap:.3g}")
    it = 0
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or it > 200:
            break
        f_mid = _j_real(region, mid, ctl)
        if not (min(f_lo, f_hi) - 1e-6 * (1 + abs(f_mid)) <= f_mid <= max(f_lo, f_hi) + 1e-6 * (1 + abs(f_mid))):
            raise BracketFailure(f"j not monotone on {region} near parameter {mid}")
        if (f_mid - j_real) * (f_lo - j_real) > 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        it += 1
    best, f_best = (lo, f_lo) if abs(f_lo - j_real) <= abs(f_hi - j_real) else (hi, f_hi)
    if region == "C2" and best >= math.pi / 2:
        best = math.nextafter(math.pi / 2, 0)
    tau = TauPoint.on_arc(region, best)
    resid = abs(j_of_tau(tau, ctl).real - j_real)
    # the forward map is only as good as double precision allows: d j / d param ~ 2 pi j
    floor = 64 * 2.2e-16 * max(1.0, abs(j_real)) * (1 + TWO_PI * max(1.0, tau.imag))
    if resid > max(tol_abs, tol_rel * abs(j_real), floor):
        raise BracketFailure(f"bisection stalled with residual {resid:.3g}")
    fit = TauFit(tau, resid, it)
    return fit if with_residual else fit.tau


def embedding_scale(disc_E: int, tau: TauPoint, ctl: SeriesControl = DEFAULT_CTL) -> float:
    """|w^2| = |disc_E|^(1/6) |Delta(tau)|^(-1/6)."""
    from .arith import log_abs

    if disc_E == 0:
        raise DomainError("singular curve")
    return math.exp((log_abs(disc_E) - log_abs_delta(tau, ctl)) / 6)


def scaling_w2(A: int, B: int, tau: TauPoint, ctl: SeriesControl = DEFAULT_CTL) -> list[complex]:
    """Candidates for w^2 with A = a w^4, B = b w^6, (a, b) the coefficients of E_tau.

    Unique unless A*B = 0, where the extra automorphisms leave two (B = 0)
    or three (A = 0) equally valid choices.
    """
    a, b = weierstrass_coeffs(tau, ctl)
    A, B = float(A), float(B)
    if A == 0 and B == 0:
        raise DomainError("singular curve")
    if B == 0:
        r = cmath.sqrt(A / a)
        return [r, -r]
    z = cmath.exp(TWO_PI * 1j / 3)
    if A == 0:
        r = complex(B / b) ** (1 / 3)
        return [r, r * z, r * z * z]
    if 4 * abs(A) ** 3 >= 27 * B * B:
        r = cmath.sqrt(A / a)
        target = B / b
        return [min((r, -r), key=lambda w: abs(w**3 - target))]
    r = complex(B / b) ** (1 / 3)
    target = A / a
    return [min((r, r * z, r * z * z), key=lambda w: abs(w * w - target))]


# --- real locus and inversion ----------------------------------------------


@dataclass(frozen=True)
class LocusPath:
    """u(s) = start + s * direction for s in [0, 1/2] (s = 0 excluded when start = 0)."""

    start: complex
    direction: complex
    twisted: bool

    def at(self, s):
        return self.start + s * self.direction

    @property
    def through_origin(self) -> bool:
        return self.start == 0


def real_locus(tau: TauPoint, twisted: bool = False) -> list[LocusPath]:
    """Paths in the parallelogram whose image under wp is real (up to the w^2 factor)."""
    t = tau.value
    if tau.region == "C1":
        # at tau = i (j = 1728, B = 0) the square lattice also carries the
        # diagonal loci, used when w^2 is imaginary (A > 0)
        extra = abs(t - 1j) < 1e-12
        if twisted:
            paths = [LocusPath(0j, t, True), LocusPath(0.5 + 0j, t, True)]
            return paths + ([LocusPath(0j, t - 1, True)] if extra else [])
        paths = [LocusPath(0j, 1 + 0j, False), LocusPath(t / 2, 1 + 0j, False)]
        return paths + ([LocusPath(0j, 1 + t, False)] if extra else [])
    if tau.region == "C3":
        if twisted:
            return [LocusPath(0j, 2 * t - 1, True)]
        return [LocusPath(0j, 1 + 0j, False)]
    if twisted:
        return [LocusPath(0j, t - 1, True)]
    return [LocusPath(0j, 1 + t, False)]


_S_GRID = np.unique(
    np.concatenate([np.logspace(-9, -2, 36), np.linspace(0.0, 0.5, 201)[1:]])
)


def _x_on_path(path: LocusPath, w2: complex, tau: TauPoint, s: float, ctl) -> complex:
    return w2 * wp_qseries(tau, path.at(s), ctl)[0]


def point_to_u(
    curve,
    tau: TauPoint,
    x_coord: float,
    ctl: SeriesControl = DEFAULT_CTL,
    tol: float = 1e-10,
) -> FundamentalPoint:
    """u on the real locus with w^2 wp(u) = x_coord, normalised to u2 in [0, 1/2].

    Every candidate w^2 and both real-locus families are scanned; a path is
    used only if w^2 wp is numerically real along it. On such a path the
    x-coordinate is monotone in s, so one bracket suffices.
    """
    x = float(x_coord)
    scale = max(1.0, abs(x))
    best = None
    for w2 in scaling_w2(curve.A, curve.B, tau, ctl):
        for twisted in (False, True):
            for path in real_locus(tau, twisted):
                grid = _S_GRID if path.through_origin else np.concatenate([[0.0], _S_GRID])
                vals = np.array([_x_on_path(path, w2, tau, s, ctl) for s in grid])
                mags = np.maximum(1.0, np.abs(vals))
                if np.max(np.abs(vals.imag) / mags) > 1e-7:
                    continue
                f = vals.real - x
                # grid hit (covers 2-torsion endpoints where f touches zero)
                k = int(np.argmin(np.abs(f)))
                if abs(f[k]) <= tol * scale:
                    cand = (abs(f[k]), path, w2, float(grid[k]))
                    if best is None or cand[0] < best[0]:
                        best = cand
                    continue
                idx = np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)
                if idx.size == 0:
                    continue
                i = int(idx[0])

                def g(s, path=path, w2=w2):
                    return _x_on_path(path, w2, tau, s, ctl).real - x

                s = brentq(g, grid[i], grid[i + 1], xtol=1e-300, rtol=1e-15, maxiter=200)
                # Newton polish along the path
                for _ in range(3):
                    p, dp = wp_qseries(tau, path.at(s), ctl)
                    deriv = (w2 * dp * path.direction).real
                    if deriv == 0:
                        break
                    step = ((w2 * p).real - x) / deriv
                    if not math.isfinite(step) or abs(step) > 1e-6 * max(s, 1e-12):
                        break
                    s -= step
                err = abs(g(s))
                cand = (err, path, w2, s)
                if best is None or cand[0] < best[0]:
                    best = cand
    if best is None or best[0] > max(1e-6, tol) * scale:
        raise NoRoot(f"x = {x} is not on the real locus")
    _, path, _, s = best
    fp = FundamentalPoint.from_complex(path.at(s), tau.value)
    if fp.u2 < 0 or (fp.u2 == 0 and fp.u1 < 0):
        fp = fp.negated()
    return fp


def w2_for_point(curve, tau: TauPoint, fp: FundamentalPoint, x_coord: float, ctl=DEFAULT_CTL) -> complex:
    """The candidate w^2 which maps u to x_coord (relevant only when A*B = 0)."""
    p = wp_qseries(tau, fp.u, ctl)[0]
    return min(scaling_w2(curve.A, curve.B, tau, ctl), key=lambda w2: abs(w2 * p - x_coord))
