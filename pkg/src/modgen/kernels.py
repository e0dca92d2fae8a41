"""Assembly of the discretized inverse-power kernel matrices.

2D scenarios discretize the inverse quarter power of the Helmholtz operator,
whose convolution kernel is an order-1/4 modified Bessel function; matrix
entries reduce to second differences of a single antiderivative F.  The 4D
scenario discretizes the radial Green's function at fixed angular momentum,
whose half-integer Bessel factors have elementary antiderivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .errors import ConvergenceError, DomainError
from .grids import BoxBasis, LEBESGUE, RADIAL_R2
from .linalg import SymMatrix
from .precision import PrecisionContext, Scalar, bessel_K_quarter, gauss_legendre


@dataclass(frozen=True)
class KernelSpec:
    scenario: str
    mass: Scalar
    ell: int = 0
    quad_order: int = 64

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        if self.quad_order < 16:
            raise DomainError(f"quad_order must be >= 16, got {self.quad_order}")


def kernel_f_2d(m: Scalar, y: Scalar, ctx: PrecisionContext) -> Scalar:
    """Convolution kernel of the inverse quarter power in 2D.

    f(y) = (sqrt(pi) Gamma(1/4))^-1 (2m/y)^(1/4) K_{1/4}(m y); integrable
    ~ (2 pi y)^(-1/2) as y -> 0.
    """
    with ctx.activate():
        y = mpfr(y)
        m = mpfr(m)
        if not y > 0:
            raise DomainError(f"kernel argument must be positive, got {y}")
        k = bessel_K_quarter(m * y, ctx)
        pi = gmpy2.const_pi()
        return gmpy2.rootn(2 * m / y, 4) * k / (gmpy2.sqrt(pi) * ctx.gamma_quarter())


def antiderivative_f(m: Scalar, x: Scalar, ctx: PrecisionContext) -> Scalar:
    """F(x) = x * int_0^x f - int_0^x y f(y) dy, by its power series.

    Term-by-term integration of the kernel's Bessel series gives
      F(x) = sqrt(pi)/Gamma(1/4) * [ S1(x) x^(3/2) - sqrt(m/2) S2(x) x^2 ],
      S1 = sum_k (m^2 x^2 / 4)^k / ( (2k+1/2)(2k+3/2) k! Gamma(k+3/4) ),
      S2 = sum_k (m^2 x^2 / 4)^k / ( (2k+1)(2k+2)   k! Gamma(k+5/4) ),
    entire in x.  The two branches cancel to ~0.44*m*x digits at large
    argument (same mechanism as in K_{1/4}), hence the guard digits.
    """
    xf = float(x)
    if xf < 0:
        raise DomainError(f"antiderivative argument must be >= 0, got {x}")
    if xf == 0 and x == 0:
        return ctx.mpf(0)
    guard = int(math.ceil(0.44 * float(m) * xf)) + 16
    with ctx.activate(extra_digits=guard):
        x = mpfr(x)
        m = mpfr(m)
        q = (m * x / 2) ** 2
        cutoff = mpfr(10) ** (-(ctx.digits + guard + 5))
        half = mpfr(1) / 2
        g34 = gmpy2.gamma(mpfr(3) / 4)
        g54 = gmpy2.gamma(mpfr(5) / 4)
        p = mpfr(1)                  # q^k / k!
        s1 = mpfr(0)
        s2 = mpfr(0)
        kmin = int(math.sqrt(float(q))) + 2
        for k in range(100000):
            t1 = p / ((2 * k + half) * (2 * k + 1 + half) * g34)
            t2 = p / ((2 * k + 1) * (2 * k + 2) * g54)
            s1 += t1
            s2 += t2
            if k >= kmin and t1 + t2 < cutoff * (s1 + s2):
                break
            g34 *= k + mpfr(3) / 4
            g54 *= k + mpfr(5) / 4
            p = p * q / (k + 1)
        else:
            raise ConvergenceError("antiderivative series did not converge")
        pi = gmpy2.const_pi()
        val = (gmpy2.sqrt(pi) / gmpy2.gamma(mpfr(1) / 4)
               * (s1 * x * gmpy2.sqrt(x) - gmpy2.sqrt(m / 2) * s2 * x * x))
    with ctx.activate():
        return mpfr(val)


def antiderivative_f_quadrature(m: Scalar, x: Scalar, ctx: PrecisionContext,
                                quad_order: int = 64, max_refine: int = 12) -> Scalar:
    """F(x) by panel Gauss-Legendre quadrature after the substitution y = u^2.

    The substitution removes the y^(-1/2) kernel singularity (both transformed
    integrands are entire), and panels are halved until two refinements agree
    to 10^(10-digits) relative.  Slower than the series; kept as the
    independent second route.
    """
    with ctx.activate():
        x = mpfr(x)
        m = mpfr(m)
        if x < 0:
            raise DomainError(f"antiderivative argument must be >= 0, got {x}")
        if x == 0:
            return mpfr(0)
        root = gmpy2.sqrt(x)
        tol = mpfr(10) ** (10 - ctx.digits)

        def refine(val_fn):
            prev = None
            err = None
            for level in range(max_refine):
                panels = 1 << level
                total = mpfr(0)
                for j in range(panels):
                    lo = root * j / panels
                    hi = root * (j + 1) / panels
                    total += val_fn(lo, hi)
                if prev is not None:
                    err = abs(total - prev)
                    if err <= tol * (abs(total) + tol):
                        return total
                prev = total
            raise ConvergenceError("quadrature refinement stalled", residual=err)

        nodes, weights = gauss_legendre(quad_order, ctx)

        def panel(lo, hi, weight_power):
            mid = (lo + hi) / 2
            scale = (hi - lo) / 2
            acc = mpfr(0)
            for t, w in zip(nodes, weights):
                u = mid + scale * t
                y = u * u
                acc += w * (2 * u ** weight_power * kernel_f_2d(m, y, ctx))
            return acc * scale

        g1 = refine(lambda lo, hi: panel(lo, hi, 1))
        g2 = refine(lambda lo, hi: panel(lo, hi, 3))
        return x * g1 - g2


def assemble_Am14_2d(basis: BoxBasis, m: Scalar, ctx: PrecisionContext) -> SymMatrix:
    """Matrix of the inverse quarter power in the 2D box basis.

    Diagonal entries are 2 n_i^2 F(w_i); off-diagonal entries the four-point
    second difference n_i n_j (F(b_j-a_i) - F(b_j-b_i) - F(a_j-a_i) + F(a_j-b_i)).
    F values are cached per distinct breakpoint difference.
    """
    if basis.grid.measure != LEBESGUE:
        raise DomainError("2D assembly requires the Lebesgue measure")
    n = basis.n
    p = basis.grid.breakpoints
    norms = basis.norms
    with ctx.activate():
        m = mpfr(m)
        cache: dict = {}

        def F(x):
            v = cache.get(x)
            if v is None:
                v = antiderivative_f(m, x, ctx)
                cache[x] = v
            return v

        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = 2 * norms[i] * norms[i] * F(p[i + 1] - p[i])
            for j in range(i + 1, n):
                val = norms[i] * norms[j] * (F(p[j + 1] - p[i]) - F(p[j + 1] - p[i + 1])
                                             - F(p[j] - p[i]) + F(p[j] - p[i + 1]))
                rows[i][j] = val
                rows[j][i] = val
    return SymMatrix(rows, ctx.digits)


def _radial_parts(ell: int, m: Scalar):
    """Integrand factors and antiderivatives for the radial Green's function.

    Returns (f_i, f_k, anti_i, anti_k) where f_i(r) = r^(3/2) I_{ell+1/2}(m r),
    f_k likewise with K, and anti_* are their elementary antiderivatives.
    Evaluate under an active gmpy2 context.
    """
    pi = gmpy2.const_pi()
    ci = gmpy2.sqrt(2 / (pi * m))
    ck = gmpy2.sqrt(pi / (2 * m))
    m2 = m * m
    if ell == 0:
        def f_i(r):
            return ci * r * gmpy2.sinh(m * r)

        def f_k(r):
            return ck * r * gmpy2.exp(-m * r)

        def anti_i(r):
            return ci * (r * gmpy2.cosh(m * r) / m - gmpy2.sinh(m * r) / m2)

        def anti_k(r):
            return -ck * gmpy2.exp(-m * r) * (r / m + 1 / m2)
    elif ell == 1:
        def f_i(r):
            return ci * (r * gmpy2.cosh(m * r) - gmpy2.sinh(m * r) / m)

        def f_k(r):
            return ck * gmpy2.exp(-m * r) * (r + 1 / m)

        def anti_i(r):
            return ci * (r * gmpy2.sinh(m * r) / m - 2 * gmpy2.cosh(m * r) / m2)

        def anti_k(r):
            return -ck * gmpy2.exp(-m * r) * (r / m + 2 / m2)
    else:
        raise DomainError(f"angular momentum {ell} not supported (only 0 and 1)")
    return f_i, f_k, anti_i, anti_k


def greens_kernel_4d(ell: int, m: Scalar, r: Scalar, s: Scalar,
                     ctx: PrecisionContext) -> Scalar:
    """Radial Green's function of the massive operator at angular momentum ell.

    G(r, s) = (r s)^(-1/2) I_{ell+1/2}(m r_<) K_{ell+1/2}(m r_>): symmetric,
    continuous across r = s.
    """
    with ctx.activate():
        r = mpfr(r)
        s = mpfr(s)
        m = mpfr(m)
        if not (r > 0 and s > 0):
            raise DomainError("greens_kernel_4d requires r, s > 0")
        f_i, f_k, _, _ = _radial_parts(ell, m)
        lo, hi = (r, s) if r <= s else (s, r)
        # f_i/f_k carry the r^(3/2) moment factor, so G = f_i(lo) f_k(hi) / (r s)^2
        rs = r * s
        return f_i(lo) * f_k(hi) / (rs * rs)


def assemble_Ainv_4d(basis: BoxBasis, ell: int, m: Scalar,
                     ctx: PrecisionContext, quad_order: int = 64,
                     max_refine: int = 10) -> SymMatrix:
    """Matrix of the radial inverse operator in the r^2 dr box basis.

    Off-diagonal entries factor into products of 1D Bessel moments with
    elementary antiderivatives.  Diagonal entries split the box along r = s
    (the kernel is continuous but not smooth there) and integrate the smooth
    triangle by Gauss-Legendre panels with refinement control.
    """
    if basis.grid.measure != RADIAL_R2:
        raise DomainError("4D assembly requires the radial measure")
    n = basis.n
    p = basis.grid.breakpoints
    norms = basis.norms
    with ctx.activate(extra_digits=20):
        m = mpfr(m)
        f_i, f_k, anti_i, anti_k = _radial_parts(ell, m)
        mom_i = [anti_i(p[i + 1]) - anti_i(p[i]) for i in range(n)]
        mom_k = [anti_k(p[i + 1]) - anti_k(p[i]) for i in range(n)]
        nodes, weights = gauss_legendre(quad_order, ctx)
        tol = mpfr(10) ** (-(ctx.digits - 8))

        def diag_integral(a, b):
            # 2 * int_a^b f_k(r) (anti_i(r) - anti_i(a)) dr over refined panels
            base = anti_i(a)
            prev = None
            err = None
            for level in range(max_refine):
                panels = 1 << level
                total = mpfr(0)
                for j in range(panels):
                    lo = a + (b - a) * j / panels
                    hi = a + (b - a) * (j + 1) / panels
                    mid = (lo + hi) / 2
                    scale = (hi - lo) / 2
                    acc = mpfr(0)
                    for t, w in zip(nodes, weights):
                        r = mid + scale * t
                        acc += w * (f_k(r) * (anti_i(r) - base))
                    total += acc * scale
                if prev is not None:
                    err = abs(total - prev)
                    if err <= tol * (abs(total) + tol):
                        return 2 * total
                prev = total
            raise ConvergenceError("diagonal box refinement stalled", residual=err)

        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = norms[i] * norms[i] * diag_integral(p[i], p[i + 1])
            for j in range(i + 1, n):
                val = norms[i] * norms[j] * mom_i[i] * mom_k[j]
                rows[i][j] = val
                rows[j][i] = val
    with ctx.activate():
        rows = [[mpfr(v) for v in row] for row in rows]
    return SymMatrix(rows, ctx.digits)
