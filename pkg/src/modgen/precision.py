"""Arbitrary-precision real arithmetic and the special functions the kernels need.

Scalars are gmpy2.mpfr values (MPFR: correctly rounded, deterministic).  All
operations take an explicit PrecisionContext; nothing in this module touches
global state except through ``ctx.activate()``, which scopes the thread-local
gmpy2 context.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

from .errors import ConvergenceError, DomainError, SpectralBandError

Scalar = mpfr

_LOG10_2 = math.log10(2.0)
_LOG2_10 = math.log2(10.0)


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in decimal digits, plus guard digits for cancellation headroom."""

    digits: int
    guard_digits: int = 10

    def __post_init__(self):
        if self.digits < 30:
            raise DomainError(f"digits must be >= 30, got {self.digits}")
        if self.guard_digits < 0:
            raise DomainError("guard_digits must be >= 0")

    @property
    def bits(self) -> int:
        return int(math.ceil((self.digits + self.guard_digits) * _LOG2_10)) + 8

    @contextmanager
    def activate(self, extra_digits: int = 0):
        """Scope the thread-local gmpy2 context to this precision (plus optional extra digits)."""
        bits = self.bits
        if extra_digits:
            bits += int(math.ceil(extra_digits * _LOG2_10))
        old = gmpy2.get_context()
        gmpy2.set_context(gmpy2.context(precision=bits))
        try:
            yield
        finally:
            gmpy2.set_context(old)

    def mpf(self, x) -> Scalar:
        """Convert int / str / float / mpfr to a scalar at this context's precision."""
        with self.activate():
            return mpfr(x)

    def pi(self) -> Scalar:
        return _const_pi(self.bits)

    def gamma_quarter(self) -> Scalar:
        return _const_gamma_quarter(self.bits)

    def eps(self) -> Scalar:
        """10^(-digits): the tolerance unit used by deflation and validity gates."""
        with self.activate():
            return mpfr(10) ** (-self.digits)


@lru_cache(maxsize=None)
def _const_pi(bits: int) -> Scalar:
    with gmpy2.context(precision=bits):
        return gmpy2.const_pi()


@lru_cache(maxsize=None)
def _const_gamma_quarter(bits: int) -> Scalar:
    with gmpy2.context(precision=bits):
        return gmpy2.gamma(mpfr(1) / 4)


def to_decimal(x: Scalar, ndigits: int) -> str:
    """Decimal string with ndigits significant digits (d.ddd...e<exp> form)."""
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "-inf" if x < 0 else "inf"
    if x == 0:
        return "0"
    mant, exp, _ = x.digits(10, ndigits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    return f"{sign}{mant[0]}.{mant[1:]}e{exp - 1}"


def roundtrip_digits(bits: int) -> int:
    """Decimal digits sufficient for an exact binary round trip at the given precision."""
    return int(math.ceil(bits * _LOG10_2)) + 2


def sci_str(x, sig: int = 3) -> str:
    """Short scientific string safe for magnitudes far below float range.

    Accepts an mpfr or a decimal string in d.ddd...e<exp> form.
    """
    s = x if isinstance(x, str) else to_decimal(x, max(sig, 1))
    if "e" not in s:
        return s
    mant, _, exp = s.partition("e")
    keep = sig + (2 if mant.startswith("-") else 1)  # digits plus sign and point
    return f"{mant[:keep + 1]}e{exp}"


def arcoth(x: Scalar, ctx: PrecisionContext) -> Scalar:
    """Inverse hyperbolic cotangent, 0.5*log((x+1)/(x-1)); defined for |x| > 1 only."""
    with ctx.activate():
        x = mpfr(x)
        if not gmpy2.is_finite(x) or abs(x) <= 1:
            raise SpectralBandError(x)
        # evaluate on |x| so the odd symmetry holds exactly
        ax = abs(x)
        val = gmpy2.log((ax + 1) / (ax - 1)) / 2
        return -val if x < 0 else val


def erf(x: Scalar, ctx: PrecisionContext) -> Scalar:
    with ctx.activate():
        return gmpy2.erf(mpfr(x))


def bessel_K_quarter(z: Scalar, ctx: PrecisionContext) -> Scalar:
    """Modified Bessel function K of order 1/4 via the reflection formula.

    K_nu = pi/(2 sin(nu pi)) * (I_{-nu} - I_nu) with the ascending series for
    I_{+-1/4}.  The two I terms grow like e^z while the difference decays like
    e^{-z}, so the evaluation runs with ~0.87*z extra guard digits.
    """
    zf = float(z)
    if not zf > 0:
        raise DomainError(f"bessel_K_quarter requires z > 0, got {z}")
    guard = int(math.ceil(0.87 * zf)) + 12
    with ctx.activate(extra_digits=guard):
        z = mpfr(z)
        quarter = mpfr(1) / 4
        i_pos = _bessel_i_series(quarter, z, ctx.digits + guard)
        i_neg = _bessel_i_series(-quarter, z, ctx.digits + guard)
        # pi / (2 sin(pi/4)) = pi / sqrt(2)
        k = gmpy2.const_pi() / gmpy2.sqrt(mpfr(2)) * (i_neg - i_pos)
    with ctx.activate():
        return mpfr(k)


def _bessel_i_series(nu: Scalar, z: Scalar, target_digits: int):
    """Ascending series I_nu(z) = (z/2)^nu sum_k (z^2/4)^k / (k! Gamma(k+nu+1))."""
    q = z * z / 4
    cutoff = mpfr(10) ** (-(target_digits + 5))
    gam = gmpy2.gamma(nu + 1)    # Gamma(k + nu + 1), advanced by recurrence
    p = mpfr(1)                  # q^k / k!
    total = mpfr(0)
    kmin = int(math.sqrt(float(q))) + 2
    for k in range(100000):
        term = p / gam
        total += term
        if k >= kmin and term < cutoff * total:
            break
        gam *= k + nu + 1
        p = p * q / (k + 1)
    else:
        raise ConvergenceError("Bessel I series did not converge")
    return (z / 2) ** nu * total


def bessel_half_integer(ell: int, z: Scalar, ctx: PrecisionContext):
    """(I_{ell+1/2}(z), K_{ell+1/2}(z)) from their elementary closed forms; ell in {0, 1}."""
    if ell not in (0, 1):
        raise DomainError(f"bessel_half_integer supports ell in {{0, 1}}, got {ell}")
    with ctx.activate():
        z = mpfr(z)
        if not (gmpy2.is_finite(z) and z > 0):
            raise DomainError(f"bessel_half_integer requires z > 0, got {z}")
        pi = gmpy2.const_pi()
        front_i = gmpy2.sqrt(2 / (pi * z))
        front_k = gmpy2.sqrt(pi / (2 * z))
        if ell == 0:
            i_val = front_i * gmpy2.sinh(z)
            k_val = front_k * gmpy2.exp(-z)
        else:
            i_val = front_i * (gmpy2.cosh(z) - gmpy2.sinh(z) / z)
            k_val = front_k * gmpy2.exp(-z) * (1 + 1 / z)
        return i_val, k_val


def gauss_legendre(k: int, ctx: PrecisionContext):
    """Nodes and weights of the k-point Gauss-Legendre rule on [-1, 1].

    Newton iteration on the Legendre recurrence; nodes exactly symmetric about 0
    (one half computed, the other mirrored).
    """
    if k < 1:
        raise DomainError(f"gauss_legendre requires k >= 1, got {k}")
    return _gauss_legendre_cached(k, ctx.digits, ctx.guard_digits)


@lru_cache(maxsize=64)
def _gauss_legendre_cached(k: int, digits: int, guard_digits: int):
    ctx = PrecisionContext(digits, guard_digits)
    with ctx.activate(extra_digits=10):
        tol = mpfr(10) ** (-(digits + 5))
        half: list[tuple[Scalar, Scalar]] = []
        for i in range(1, k // 2 + 1):
            x = mpfr(math.cos(math.pi * (i - 0.25) / (k + 0.5)))
            for _ in range(200):
                p, dp = _legendre_pair(k, x)
                dx = p / dp
                x -= dx
                if abs(dx) < tol:
                    break
            else:
                raise ConvergenceError("Gauss-Legendre Newton iteration stalled")
            p, dp = _legendre_pair(k, x)
            w = 2 / ((1 - x * x) * dp * dp)
            half.append((x, w))
        nodes: list[Scalar] = []
        weights: list[Scalar] = []
        for x, w in half:           # half[-1] is the node closest to 0
            nodes.append(-x)
            weights.append(w)
        if k % 2 == 1:
            x0 = mpfr(0)
            _, dp = _legendre_pair(k, x0)
            nodes.append(x0)
            weights.append(2 / (dp * dp))
        for x, w in reversed(half):
            nodes.append(x)
            weights.append(w)
    with ctx.activate():
        nodes = tuple(mpfr(x) for x in nodes)
        weights = tuple(mpfr(w) for w in weights)
    return nodes, weights


def _legendre_pair(k: int, x: Scalar):
    """(P_k(x), P_k'(x)) by the three-term recurrence."""
    p_prev = mpfr(1)
    p = x
    for j in range(1, k):
        p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
    if k == 0:
        return mpfr(1), mpfr(0)
    dp = k * (x * p - p_prev) / (x * x - 1)
    return p, dp
