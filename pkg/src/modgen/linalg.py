"""Dense symmetric linear algebra over arbitrary-precision scalars.

Matrices are small (n <= a few hundred) but every entry is an mpfr, so the
hot loops below are written for low Python overhead (local bindings, row-major
access) rather than elegance.  Everything is sequential and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .errors import ConvergenceError, DomainError
from .precision import PrecisionContext, Scalar


class SymMatrix:
    """Dense symmetric matrix; entries above and below the diagonal are aliased."""

    __slots__ = ("rows", "dim", "digits")

    def __init__(self, rows, digits: int, symmetrize: bool = False):
        n = len(rows)
        for r in rows:
            if len(r) != n:
                raise DomainError("SymMatrix requires square input")
        if symmetrize:
            rows = [list(r) for r in rows]
            # arithmetic must run at the matrix's own precision, not whatever
            # gmpy2 context happens to be active at the call site
            with PrecisionContext(digits).activate():
                for i in range(n):
                    for j in range(i):
                        v = (rows[i][j] + rows[j][i]) / 2
                        rows[i][j] = v
                        rows[j][i] = v
        else:
            for i in range(n):
                for j in range(i):
                    if rows[i][j] != rows[j][i]:
                        raise DomainError(f"input not symmetric at ({i},{j})")
                    rows[j][i] = rows[i][j]
        self.rows = rows
        self.dim = n
        self.digits = digits

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def copy_rows(self):
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class EigenDecomp:
    """Spectral factorization M = Q diag(lam) Q^T with lam ascending."""

    q: list            # row-major orthogonal matrix; columns are eigenvectors
    lam: list          # ascending eigenvalues
    digits: int

    @property
    def dim(self):
        return len(self.lam)


def sym_eigen(m: SymMatrix, ctx: PrecisionContext, max_sweeps: int = 80) -> EigenDecomp:
    """Full eigendecomposition: Householder tridiagonalization + implicit-shift QL.

    Wilkinson shifts; an off-diagonal entry deflates when it drops below
    10^-digits * (|d_i| + |d_{i+1}|).  Eigenvalues are returned ascending with
    ties broken by original position, eigenvectors permuted alongside.
    """
    n = m.dim
    with ctx.activate():
        a = m.copy_rows()
        d, e, q = _tridiagonalize(a)
        _ql_implicit(d, e, q, ctx.digits, max_sweeps)
        order = sorted(range(n), key=lambda i: (d[i], i))
        lam = [d[i] for i in order]
        qs = [[row[i] for i in order] for row in q]
    return EigenDecomp(q=qs, lam=lam, digits=ctx.digits)


def _tridiagonalize(a):
    """Reduce symmetric a (list of row lists, modified in place) to tridiagonal form.

    Returns (d, e, q) with d the diagonal, e[i] the (i, i+1) entry, and q the
    accumulated orthogonal transform (a = q T q^T).
    """
    n = len(a)
    zero = mpfr(0)
    one = mpfr(1)
    q = [[one if i == j else zero for j in range(n)] for i in range(n)]
    if n == 1:
        return [a[0][0]], [], q
    reflectors = []
    for k in range(n - 2):
        # Householder vector for column k below the diagonal
        s2 = zero
        for i in range(k + 1, n):
            aik = a[i][k]
            s2 += aik * aik
        if s2 == 0:
            continue
        s = gmpy2.sqrt(s2)
        x0 = a[k + 1][k]
        if x0 < 0:
            s = -s
        v0 = x0 + s
        v = [v0] + [a[i][k] for i in range(k + 2, n)]
        beta = 1 / (s * v0)
        # p = beta * A22 v ; w = p - (beta/2)(v.p) v ; A22 -= v w^T + w v^T
        mdim = n - k - 1
        p = []
        for i in range(mdim):
            ai = a[k + 1 + i]
            acc = zero
            for j in range(mdim):
                acc += ai[k + 1 + j] * v[j]
            p.append(beta * acc)
        vp = zero
        for i in range(mdim):
            vp += v[i] * p[i]
        gamma = beta * vp / 2
        w = [p[i] - gamma * v[i] for i in range(mdim)]
        for i in range(mdim):
            ai = a[k + 1 + i]
            vi = v[i]
            wi = w[i]
            for j in range(i + 1):
                val = ai[k + 1 + j] - vi * w[j] - wi * v[j]
                ai[k + 1 + j] = val
                a[k + 1 + j][k + 1 + i] = val
        a[k + 1][k] = -s
        a[k][k + 1] = -s
        for i in range(k + 2, n):
            a[i][k] = zero
            a[k][i] = zero
        reflectors.append((k, v, beta))
    # accumulate q = H_0 H_1 ... (right-multiplication in forward order)
    for k, v, beta in reflectors:
        for row in q:
            acc = zero
            for j, vj in enumerate(v):
                acc += row[k + 1 + j] * vj
            t = beta * acc
            for j, vj in enumerate(v):
                row[k + 1 + j] -= t * vj
    d = [a[i][i] for i in range(n)]
    e = [a[i][i + 1] for i in range(n - 1)]
    return d, e, q


def _ql_implicit(d, e, q, digits: int, max_sweeps: int):
    """Implicit-shift QL on the tridiagonal (d, e), rotations accumulated into q."""
    n = len(d)
    if n == 1:
        return
    zero = mpfr(0)
    one = mpfr(1)
    tol = mpfr(10) ** (-digits)
    e = list(e) + [zero]
    for l in range(n):
        sweeps = 0
        while True:
            mi = l
            while mi < n - 1:
                dd = abs(d[mi]) + abs(d[mi + 1])
                if abs(e[mi]) <= tol * dd:
                    break
                mi += 1
            if mi == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise ConvergenceError(
                    f"QL sweeps exceeded {max_sweeps} for eigenvalue {l}",
                    residual=abs(e[l]))
            # Wilkinson shift from the leading 2x2
            g = (d[l + 1] - d[l]) / (2 * e[l])
            r = gmpy2.sqrt(g * g + 1)
            g = d[mi] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = one
            c = one
            p = zero
            for i in range(mi - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = gmpy2.sqrt(f * f + g * g)
                e[i + 1] = r
                if r == 0:
                    d[i + 1] -= p
                    e[mi] = zero
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for row in q:
                    f = row[i + 1]
                    row[i + 1] = s * row[i] + c * f
                    row[i] = c * row[i] - s * f
            else:
                d[l] -= p
                e[l] = g
                e[mi] = zero


def spectral_apply(e: EigenDecomp, phi, ctx: PrecisionContext) -> SymMatrix:
    """Q diag(phi(lam)) Q^T, symmetrized by construction (lower triangle computed once)."""
    n = e.dim
    with ctx.activate():
        vals = []
        for idx, lam in enumerate(e.lam):
            try:
                vals.append(phi(lam))
            except DomainError as err:
                raise DomainError(
                    f"spectral function undefined at eigenvalue {idx} = {lam}: {err}") from err
        q = e.q
        scaled = [[qi * v for qi, v in zip(row, vals)] for row in q]
        zero = mpfr(0)
        out = [[zero] * n for _ in range(n)]
        for i in range(n):
            srow = scaled[i]
            orow = out[i]
            for j in range(i + 1):
                qj = q[j]
                acc = zero
                for k in range(n):
                    acc += srow[k] * qj[k]
                orow[j] = acc
                out[j][i] = acc
    return SymMatrix(out, ctx.digits)


def mat_mul(a, b, ctx: PrecisionContext):
    """Plain dense product; accepts SymMatrix or row lists, returns row lists."""
    ar = a.rows if isinstance(a, SymMatrix) else a
    br = b.rows if isinstance(b, SymMatrix) else b
    n = len(ar)
    inner = len(br)
    if any(len(r) != inner for r in ar):
        raise DomainError("mat_mul dimension mismatch")
    ncol = len(br[0])
    with ctx.activate():
        zero = mpfr(0)
        out = []
        for i in range(n):
            ai = ar[i]
            acc = [zero] * ncol
            for k in range(inner):
                aik = ai[k]
                if aik == 0:
                    continue
                bk = br[k]
                acc = [u + aik * v for u, v in zip(acc, bk)]
            out.append(acc)
        return out


def mat_mul_masked(a, b, mask, ctx: PrecisionContext):
    """a @ diag(mask) @ b with a boolean mask: contributions only from masked inner indices."""
    ar = a.rows if isinstance(a, SymMatrix) else a
    br = b.rows if isinstance(b, SymMatrix) else b
    n = len(ar)
    idx = [k for k, keep in enumerate(mask) if keep]
    if len(mask) != len(br):
        raise DomainError("mask length mismatch")
    ncol = len(br[0])
    with ctx.activate():
        zero = mpfr(0)
        out = []
        for i in range(n):
            ai = ar[i]
            acc = [zero] * ncol
            for k in idx:
                aik = ai[k]
                if aik == 0:
                    continue
                bk = br[k]
                acc = [u + aik * v for u, v in zip(acc, bk)]
            out.append(acc)
        return out


def mat_vec(a, x, ctx: PrecisionContext):
    ar = a.rows if isinstance(a, SymMatrix) else a
    if any(len(r) != len(x) for r in ar):
        raise DomainError("mat_vec dimension mismatch")
    with ctx.activate():
        zero = mpfr(0)
        out = []
        for row in ar:
            acc = zero
            for u, v in zip(row, x):
                acc += u * v
            out.append(acc)
        return out


def dot(x, y, ctx: PrecisionContext):
    if len(x) != len(y):
        raise DomainError("dot dimension mismatch")
    with ctx.activate():
        acc = mpfr(0)
        for u, v in zip(x, y):
            acc += u * v
        return acc


def identity_rows(n: int):
    zero = mpfr(0)
    one = mpfr(1)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def residual_max_abs(a, b, ctx: PrecisionContext | None = None) -> Scalar:
    """max |a_ij - b_ij| over all entries."""
    ar = a.rows if isinstance(a, SymMatrix) else a
    br = b.rows if isinstance(b, SymMatrix) else b
    if len(ar) != len(br):
        raise DomainError("residual dimension mismatch")
    if ctx is None:
        ctx = PrecisionContext(max(getattr(a, "digits", 30), 30))
    with ctx.activate():
        best = mpfr(0)
        for ra, rb in zip(ar, br):
            if len(ra) != len(rb):
                raise DomainError("residual dimension mismatch")
            for u, v in zip(ra, rb):
                dv = abs(u - v)
                if dv > best:
                    best = dv
        return best


def max_abs(a) -> Scalar:
    ar = a.rows if isinstance(a, SymMatrix) else a
    best = mpfr(0)
    for row in ar:
        for v in row:
            av = abs(v)
            if av > best:
                best = av
    return best


def asymmetry(rows) -> Scalar:
    """max |a_ij - a_ji|: how far a raw product is from exact symmetry.

    Caller must hold an activated context (the subtraction rounds).
    """
    best = mpfr(0)
    for i in range(len(rows)):
        for j in range(i):
            dv = abs(rows[i][j] - rows[j][i])
            if dv > best:
                best = dv
    return best


def trace(a, ctx: PrecisionContext) -> Scalar:
    ar = a.rows if isinstance(a, SymMatrix) else a
    with ctx.activate():
        acc = mpfr(0)
        for i in range(len(ar)):
            acc += ar[i][i]
        return acc
