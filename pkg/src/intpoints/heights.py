"""Group law, canonical heights and their local decomposition.

Normalisation: h_hat(P) = 1/2 lim 4^-n log max(|num x(2^n P)|, |den x(2^n P)|),
and the local heights are the model-independent ones

    lambda_p(P) = (1/2 max(0, -v_p(x)) + v_p(Delta)/12) log p      for P in E0(Q_p)
    lambda_inf  = -1/2 B2(u2) log|q| - log|1 - t| - sum log|(1 - q^n t)(1 - q^n / t)|

so that h_hat = lambda_inf + sum_p lambda_p with no extra log|Delta| term.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2

from . import lattice_modular as lm
from .arith import log_abs, prime_factors, valuation
from .curve_models import ShortCurve
from .errors import DomainError, PrecisionOverflow, SingularCurve, ValidationError

# measured by calibrate_offset() on CALIBRATION_CURVES; see tests
NORMALIZATION_OFFSET = 0.0
DIGIT_BUDGET = 50_000_000


@dataclass(frozen=True)
class RationalPoint:
    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValidationError("point needs both coordinates or neither")
        if self.x is not None:
            object.__setattr__(self, "x", Fraction(self.x))
            object.__setattr__(self, "y", Fraction(self.y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    @property
    def is_integral(self) -> bool:
        return not self.is_infinity and self.x.denominator == 1 and self.y.denominator == 1

    def on(self, curve: ShortCurve) -> bool:
        return self.is_infinity or curve.contains(self.x, self.y)

    def __neg__(self):
        return self if self.is_infinity else RationalPoint(self.x, -self.y)

    def __str__(self):
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


INFINITY = RationalPoint()


def point(curve: ShortCurve, x, y) -> RationalPoint:
    P = RationalPoint(x, y)
    if not P.on(curve):
        raise ValidationError(f"{P} is not on {curve}")
    return P


def group_add(curve: ShortCurve, P: RationalPoint, Q: RationalPoint) -> RationalPoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if P.y + Q.y == 0:
            return INFINITY
        lam = (3 * P.x * P.x + curve.A) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - P.x - Q.x
    return RationalPoint(x3, lam * (P.x - x3) - P.y)


def multiply(curve: ShortCurve, P: RationalPoint, n: int) -> RationalPoint:
    if n < 0:
        return multiply(curve, -P, -n)
    R, S = INFINITY, P
    while n:
        if n & 1:
            R = group_add(curve, R, S)
        S = group_add(curve, S, S)
        n >>= 1
    return R


def torsion_order(curve: ShortCurve, P: RationalPoint) -> int:
    """Order of P if it is at most 12 (Mazur), else 0."""
    R = P
    for n in range(1, 13):
        if R.is_infinity:
            return n
        R = group_add(curve, R, P)
    return 0 if not R.is_infinity else 13


# --- doubling oracle -------------------------------------------------------


def _naive_log(X, Z) -> float:
    return log_abs(max(abs(X), abs(Z)))


def naive_height_gap(curve: ShortCurve) -> float:
    """Bound B with |h_hat - h_x/2| <= B on all of E(Q).

    Silverman's explicit difference bound, taking the larger of its two sides.
    """
    j_num = -1728 * (4 * curve.A) ** 3
    j = Fraction(j_num, curve.disc)
    hj = log_abs(max(abs(j.numerator), j.denominator))
    return hj / 8 + log_abs(curve.disc) / 12 + 1.07


def canonical_height_doubling(
    curve: ShortCurve,
    P: RationalPoint,
    n_max: Optional[int] = None,
    tol: float = 1e-6,
    digit_budget: int = DIGIT_BUDGET,
    history: Optional[list] = None,
) -> float:
    """1/2 lim 4^-n h_x(2^n P) by exact x-only projective doubling.

    The number of doublings is fixed in advance so that the a priori error
    naive_height_gap / 4^n is below tol; successive differences are not a safe
    stopping rule because the estimates plateau for several steps.

    Common factors of the new (X : Z) can only come from primes dividing
    2 * 3 * (4A^3 + 27B^2) (resultant of the doubling polynomials), so only
    those are stripped instead of taking a full gcd.
    """
    if P.is_infinity or P.y == 0:
        return 0.0
    if n_max is None:
        n_max = max(3, math.ceil(math.log(naive_height_gap(curve) / tol, 4)))
    A, B = gmpy2.mpz(curve.A), gmpy2.mpz(curve.B)
    X, Z = gmpy2.mpz(P.x.numerator), gmpy2.mpz(P.x.denominator)
    bad = [gmpy2.mpz(p) for p in sorted(set(prime_factors(4 * curve.A**3 + 27 * curve.B**2) + [2, 3]))]
    bits_budget = int(digit_budget * 3.33)
    seen = {(int(X), int(Z))}
    est = 0.5 * _naive_log(X, Z)
    for n in range(1, n_max + 1):
        X2 = X * X
        Z2 = Z * Z
        Z3 = Z2 * Z
        Xn = (X2 - A * Z2) ** 2 - 8 * B * X * Z3
        Zn = 4 * Z * (X2 * X + A * X * Z2 + B * Z3)
        if Zn == 0:
            return 0.0
        if Xn == 0:
            Zn = gmpy2.mpz(1)
        else:
            for p in bad:
                if Xn % p == 0 and Zn % p == 0:
                    Xn, e1 = gmpy2.remove(Xn, p)
                    Zn, e2 = gmpy2.remove(Zn, p)
                    e = min(e1, e2)
                    Xn *= p ** (e1 - e)
                    Zn *= p ** (e2 - e)
        if Zn < 0:
            Xn, Zn = -Xn, -Zn
        X, Z = Xn, Zn
        if max(X.bit_length(), Z.bit_length()) > bits_budget:
            raise PrecisionOverflow(f"height iteration exceeded {digit_budget} digits at n={n}")
        if n <= 8:
            key = (int(X), int(Z))
            if key in seen:
                return 0.0
            seen.add(key)
        est = 0.5 * _naive_log(X, Z) / 4**n
        if history is not None:
            history.append(est)
    return est


# --- archimedean part ------------------------------------------------------


def B2(x: float) -> float:
    return x * x - x + 1.0 / 6.0


def lambda_infty(tau: lm.TauPoint, u: lm.FundamentalPoint, ctl: lm.SeriesControl = lm.DEFAULT_CTL) -> float:
    if abs(u.u) < 1e-8:
        raise DomainError("lambda_inf diverges at the lattice point")
    if u.u2 < 0:
        u = u.negated()
    uc = u.u
    q = tau.q
    # log|1 - t| = log|2 sin(pi u)| - pi Im u, exact for small u
    log_one_minus_t = math.log(abs(2 * lm.cmath.sin(math.pi * uc))) - math.pi * uc.imag
    t = u.t
    acc = 0.0
    qn = 1 + 0j
    for _ in range(lm._qseries_terms(tau, ctl)):
        qn *= q
        acc += math.log(abs((1 - qn * t) * (1 - qn / t)))
    return -0.5 * B2(u.u2) * math.log(abs(q)) - log_one_minus_t - acc


# --- finite parts ----------------------------------------------------------


def _psi3(A, B, x):
    return 3 * x**4 + 6 * A * x * x + 12 * B * x - A * A


def _in_E0(A: int, x: int, p: int) -> bool:
    # integral x; singular point of the reduction has 2y = 3x^2 + A = 0 mod p
    return (3 * x * x + A) % p != 0


def _orbit_exact(curve: ShortCurve, P: RationalPoint, p: int, N: int) -> Optional[float]:
    """Local height in units of log p for torsion P, via the finite doubling orbit."""
    orbit = [P]
    while True:
        Q = orbit[-1]
        if Q.is_infinity:
            break
        if Q.y == 0:
            break
        R = group_add(curve, Q, Q)
        if R in orbit:
            orbit.append(R)
            break
        orbit.append(R)
    A, B = curve.A, curve.B

    def step(Q):
        # lambda(2Q) = 4 lambda(Q) + d
        return Fraction(valuation((4 * Q.y * Q.y).numerator, p) - valuation((4 * Q.y * Q.y).denominator, p), 2) - Fraction(N, 4)

    last = orbit[-1]
    if last.is_infinity:
        raise AssertionError("unreachable: 2Q = O implies y(Q) = 0")
    if last.y == 0 and last not in orbit[:-1]:
        ps3 = _psi3(A, B, last.x)
        lam = (Fraction(2 * N, 3) - (valuation(ps3.numerator, p) - valuation(ps3.denominator, p))) / 8
        k = len(orbit) - 1
    else:
        i = orbit.index(last)
        j = len(orbit) - 1
        s = sum(4 ** (j - 1 - k) * step(orbit[k]) for k in range(i, j))
        lam = -s / (4 ** (j - i) - 1)
        k = i
    for m in range(k - 1, -1, -1):
        lam = (lam - step(orbit[m])) / 4
    return float(lam)


def _padic_units(curve: ShortCurve, x0: int, p: int, N: int, R: int, K: int) -> Optional[float]:
    """Recursion lambda(2Q) = 4 lambda(Q) + v(psi)/2 - N/4 with x tracked mod p^R.

    Returns the local height in units of log p, or None if precision ran out.
    """
    A, B = curve.A, curve.B
    d_sum = 0.0
    scale = 1.0  # 4^-i
    x = x0
    mod = p**R
    for _ in range(K):
        if _in_E0(A, x, p):
            return d_sum + scale * (N / 12.0)
        f = (x * x * x + A * x + B) % mod
        psi = (4 * f) % mod
        if psi == 0:
            return None
        k = valuation(psi, p)
        phi = ((x * x - A) ** 2 - 8 * B * x) % mod
        kphi = valuation(phi, p) if phi else R
        # lambda(Q_i) = (lambda(Q_{i+1}) - d_i) / 4
        d = k / 2.0 - N / 4.0
        d_sum -= scale * d / 4.0
        scale /= 4.0
        if kphi < k:
            # 2Q lies in the formal group: v(x(2Q)) = kphi - k < 0
            return d_sum + scale * (0.5 * (k - kphi) + N / 12.0)
        R -= k
        if R <= 1:
            return None
        mod = p**R
        unit = psi // p**k
        x = (phi // p**k) * pow(unit, -1, mod) % mod
    # odd component order: never lands in E0; the remainder is below 4^-K N
    return d_sum + scale * (N / 12.0)


def local_height_at(curve: ShortCurve, P: RationalPoint, p: int, steps: int = 30) -> float:
    """lambda_p(P) / log p for integral P, general (possibly non-minimal) model."""
    N = valuation(curve.disc, p)
    x = int(P.x)
    if _in_E0(curve.A, x, p):
        return N / 12.0
    if torsion_order(curve, P):
        return _orbit_exact(curve, P, p, N)
    R = 4 * (N + 4) * steps
    for _ in range(8):
        val = _padic_units(curve, x % p**R, p, N, R, steps)
        if val is not None:
            return val
        R *= 2
    raise PrecisionOverflow(f"p-adic precision exhausted at p={p}")


def local_height_closed_form(curve: ShortCurve, P: RationalPoint, p: int) -> float:
    """Textbook case analysis (minimal model at p >= 5 only), units of log p."""
    A, B = curve.A, curve.B
    vA = valuation(A, p) if A else math.inf
    vB = valuation(B, p) if B else math.inf
    if p < 5 or (vA >= 4 and vB >= 6):
        raise ValueError("closed form needs p >= 5 and a model minimal at p")
    N = valuation(curve.disc, p)
    x, y = int(P.x), int(P.y)
    a = valuation(3 * x * x + A, p) if 3 * x * x + A else 10**9
    b = valuation(2 * y, p) if y else 10**9
    if a <= 0 or b <= 0:
        L = 0.0
    elif A % p != 0:
        M = min(b, N / 2)
        L = M * (M - N) / N
    else:
        c = valuation(_psi3(A, B, x), p)
        L = -2 * b / 3 if c >= 3 * b else -c / 4
    return L / 2 + N / 12


def finite_local_heights(curve: ShortCurve, P: RationalPoint) -> list[tuple[int, float]]:
    """(p, lambda_p) for every prime p dividing the discriminant."""
    if curve.disc == 0:
        raise SingularCurve(str(curve))
    if not P.is_integral:
        raise ValidationError("finite local heights need an integral point")
    return [
        (p, local_height_at(curve, P, p) * math.log(p)) for p in prime_factors(curve.disc)
    ]


# --- assembly --------------------------------------------------------------


@dataclass
class HeightBreakdown:
    lambda_inf: float
    finite_parts: list
    tate_bound: float
    total: float
    oracle: Optional[float]
    normalization_offset: float
    tau: Optional[complex] = None
    u: Optional[tuple] = None
    extras: dict = field(default_factory=dict)

    @property
    def corrected_total(self) -> float:
        return self.total + self.normalization_offset * self.log_disc

    @property
    def log_disc(self) -> float:
        return 12 * self.tate_bound

    @property
    def residual(self) -> Optional[float]:
        return None if self.oracle is None else abs(self.corrected_total - self.oracle)

    def to_json(self) -> dict:
        return {
            "lambda_inf": self.lambda_inf,
            "finite_parts": [[p, v] for p, v in self.finite_parts],
            "tate_bound": self.tate_bound,
            "total": self.total,
            "oracle": self.oracle,
            "normalization_offset": self.normalization_offset,
            "residual": self.residual,
            "tau": None if self.tau is None else [self.tau.real, self.tau.imag],
            "u": None if self.u is None else list(self.u),
        }


def archimedean_height(curve: ShortCurve, P: RationalPoint, ctl=lm.DEFAULT_CTL):
    inv_j = Fraction(-1728 * (4 * curve.A) ** 3, curve.disc)
    tau = lm.associate_tau(float(inv_j), ctl)
    u = lm.point_to_u(curve, tau, float(P.x), ctl)
    return lambda_infty(tau, u, ctl), tau, u


def canonical_height_decomposed(
    curve: ShortCurve,
    P: RationalPoint,
    ctl: lm.SeriesControl = lm.DEFAULT_CTL,
    with_oracle: bool = True,
    offset: float = NORMALIZATION_OFFSET,
    oracle_tol: float = 1e-6,
) -> HeightBreakdown:
    if curve.disc == 0:
        raise SingularCurve(str(curve))
    tate = log_abs(curve.disc) / 12
    if P.is_infinity:
        return HeightBreakdown(0.0, [], tate, 0.0, 0.0 if with_oracle else None, offset)
    if not P.on(curve):
        raise ValidationError(f"{P} is not on the curve")
    finite = finite_local_heights(curve, P)
    lam, tau, u = archimedean_height(curve, P, ctl)
    total = lam + sum(v for _, v in finite)
    oracle = canonical_height_doubling(curve, P, tol=oracle_tol) if with_oracle else None
    return HeightBreakdown(lam, finite, tate, total, oracle, offset, tau.value, (u.u1, u.u2))


# --- calibration -----------------------------------------------------------

CALIBRATION_CURVES = [
    (0, 1), (0, -2), (-2, 1), (1, 1), (-1, 1), (0, 17), (-7, 10), (2, 3),
    (-4, 4), (3, -1), (-11, 14), (5, 7), (0, -26), (-13, 21), (1, -1),
    (-3, 6), (4, 9), (-24, 48), (17, -4), (-36, 45),
]


@dataclass
class Calibration:
    offsets: list
    mean: float
    stdev: float
    samples: int


def calibrate_offset(points: Sequence[tuple[ShortCurve, RationalPoint]], ctl=lm.DEFAULT_CTL) -> Calibration:
    """Mean and spread of (oracle - total)/log|Delta| over non-torsion points."""
    offs = []
    for curve, P in points:
        br = canonical_height_decomposed(curve, P, ctl, offset=0.0)
        if br.oracle is None or br.oracle < 1e-9:
            continue
        offs.append((br.oracle - br.total) / br.log_disc)
    if not offs:
        raise ValueError("no non-torsion calibration points")
    sd = statistics.pstdev(offs) if len(offs) > 1 else 0.0
    return Calibration(offs, statistics.fmean(offs), sd, len(offs))
