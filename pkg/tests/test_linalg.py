"""Eigendecomposition and spectral calculus against independent mpmath oracles."""

import random

import gmpy2
import mpmath as mp
import pytest

from modgen import DomainError, PrecisionContext, SymMatrix, spectral_apply, sym_eigen
from modgen.linalg import (dot, identity_rows, mat_mul, max_abs,
                           residual_max_abs, trace)
from conftest import rel_close

CTX = PrecisionContext(80)


def random_symmetric(n, seed, scale=1.0):
    rng = random.Random(seed)
    with CTX.activate():
        rows = [[gmpy2.mpfr(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1):
                v = gmpy2.mpfr(rng.uniform(-scale, scale))
                rows[i][j] = v
                rows[j][i] = v
    return SymMatrix(rows, CTX.digits)


def random_spd(n, seed):
    rng = random.Random(seed)
    with CTX.activate():
        raw = [[gmpy2.mpfr(rng.uniform(-1, 1)) for _ in range(n)] for _ in range(n)]
        rows = [[gmpy2.mpfr(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1):
                acc = gmpy2.mpfr(1 if i == j else 0)  # + I keeps it well conditioned
                for k in range(n):
                    acc += raw[k][i] * raw[k][j]
                rows[i][j] = acc
                rows[j][i] = acc
    return SymMatrix(rows, CTX.digits)


def test_diagonal_matrix():
    with CTX.activate():
        m = SymMatrix([[gmpy2.mpfr(2), gmpy2.mpfr(0)],
                       [gmpy2.mpfr(0), gmpy2.mpfr(3)]], CTX.digits)
    e = sym_eigen(m, CTX)
    assert [float(x) for x in e.lam] == [2.0, 3.0]
    with CTX.activate():
        assert abs(abs(e.q[0][0]) - 1) < gmpy2.mpfr(10) ** -70
        assert abs(e.q[1][0]) < gmpy2.mpfr(10) ** -70


def test_classic_2x2():
    with CTX.activate():
        m = SymMatrix([[gmpy2.mpfr(2), gmpy2.mpfr(1)],
                       [gmpy2.mpfr(1), gmpy2.mpfr(2)]], CTX.digits)
    e = sym_eigen(m, CTX)
    assert rel_close(e.lam[0], CTX.mpf(1), gmpy2.mpfr(10) ** -70, CTX)
    assert rel_close(e.lam[1], CTX.mpf(3), gmpy2.mpfr(10) ** -70, CTX)
    with CTX.activate():
        inv_sqrt2 = 1 / gmpy2.sqrt(gmpy2.mpfr(2))
        # eigenvector for lambda=1 is (1,-1)/sqrt(2) up to sign
        assert abs(abs(e.q[0][0]) - inv_sqrt2) < gmpy2.mpfr(10) ** -70
        assert e.q[0][0] == -e.q[1][0]
        assert e.q[0][1] == e.q[1][1]


def test_random_8x8_residuals():
    m = random_symmetric(8, seed=13)
    e = sym_eigen(m, CTX)
    gate = CTX.mpf(10) ** (10 - CTX.digits)
    rec = spectral_apply(e, lambda lam: lam, CTX)
    with CTX.activate():
        scale = max(max_abs(m), gmpy2.mpfr(1))
        assert residual_max_abs(rec, m, CTX) < gate * scale
        qt = [list(col) for col in zip(*e.q)]
        assert residual_max_abs(mat_mul(qt, e.q, CTX), identity_rows(8), CTX) < gate


def test_eigenvalues_ascending_and_deterministic():
    m = random_symmetric(10, seed=99)
    e1 = sym_eigen(m, CTX)
    e2 = sym_eigen(m, CTX)
    assert all(a <= b for a, b in zip(e1.lam, e1.lam[1:]))
    assert all(a == b for a, b in zip(e1.lam, e2.lam))
    assert all(ra == rb for ra, rb in zip(e1.q, e2.q))


def test_3x3_characteristic_polynomial_oracle():
    m = random_symmetric(3, seed=5)
    e = sym_eigen(m, CTX)
    mp.mp.dps = 100
    a = [[mp.mpf(str(m.rows[i][j])) for j in range(3)] for i in range(3)]
    # char poly: -x^3 + tr x^2 - c1 x + det
    tr = a[0][0] + a[1][1] + a[2][2]
    c1 = (a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2]
          - a[0][2] * a[2][0] + a[1][1] * a[2][2] - a[1][2] * a[2][1])
    det = (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
           - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
           + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    roots = mp.polyroots([-1, tr, -c1, det])
    roots = sorted(float(mp.re(x)) for x in roots)
    for lam, ref in zip(e.lam, roots):
        assert abs(float(lam) - ref) < 1e-12 * max(1.0, abs(ref))


def test_trace_invariance_property():
    for n, seed in ((4, 1), (9, 2), (16, 3)):
        m = random_symmetric(n, seed=seed)
        e = sym_eigen(m, CTX)
        with CTX.activate():
            lam_sum = gmpy2.mpfr(0)
            for lam in e.lam:
                lam_sum += lam
            bound = gmpy2.mpfr(10) ** (8 - CTX.digits) * n * max(max_abs(m), gmpy2.mpfr(1))
            assert abs(lam_sum - trace(m, CTX)) < bound


def test_spectral_apply_identity_and_inverse():
    m = random_spd(6, seed=21)
    e = sym_eigen(m, CTX)
    gate = CTX.mpf(10) ** (10 - CTX.digits)
    with CTX.activate():
        scale = max_abs(m)
    rec = spectral_apply(e, lambda lam: lam, CTX)
    assert residual_max_abs(rec, m, CTX) < gate * scale
    inv = spectral_apply(e, lambda lam: 1 / lam, CTX)
    prod = mat_mul(m, inv, CTX)
    assert residual_max_abs(prod, identity_rows(6), CTX) < gate * scale


def test_spectral_apply_diagonal_case():
    with CTX.activate():
        m = SymMatrix([[gmpy2.mpfr(2), gmpy2.mpfr(0)],
                       [gmpy2.mpfr(0), gmpy2.mpfr(4)]], CTX.digits)
    e = sym_eigen(m, CTX)
    inv = spectral_apply(e, lambda lam: 1 / lam, CTX)
    assert rel_close(inv.rows[0][0], CTX.mpf("0.5"), CTX.mpf(10) ** -70, CTX)
    assert rel_close(inv.rows[1][1], CTX.mpf("0.25"), CTX.mpf(10) ** -70, CTX)


def test_spectral_apply_quarter_power_composition():
    m = random_spd(6, seed=42)
    e = sym_eigen(m, CTX)
    quarter = spectral_apply(e, lambda lam: gmpy2.rootn(lam, 4), CTX)
    e_quarter = sym_eigen(quarter, CTX)
    twice = spectral_apply(e_quarter, lambda lam: lam * lam, CTX)
    half = spectral_apply(e, lambda lam: gmpy2.sqrt(lam), CTX)
    with CTX.activate():
        scale = max(max_abs(half), gmpy2.mpfr(1))
    assert residual_max_abs(twice, half, CTX) < CTX.mpf(10) ** (10 - CTX.digits) * scale


def test_spectral_apply_domain_error_reports_eigenvalue():
    m = random_symmetric(4, seed=8)   # indefinite: some eigenvalue < 0

    def phi(lam):
        if lam < 0:
            raise DomainError("negative input")
        return lam

    with pytest.raises(DomainError, match="eigenvalue 0"):
        spectral_apply(sym_eigen(m, CTX), phi, CTX)


def test_mat_mul_identity_and_residual():
    m = random_symmetric(5, seed=77)
    prod = mat_mul(identity_rows(5), m, CTX)
    assert residual_max_abs(prod, m, CTX) == 0
    assert residual_max_abs(m, m, CTX) == 0
    with pytest.raises(DomainError):
        mat_mul(m, identity_rows(4), CTX)


def test_symmetry_enforced_on_construction():
    with CTX.activate():
        bad = [[gmpy2.mpfr(1), gmpy2.mpfr(2)], [gmpy2.mpfr(3), gmpy2.mpfr(4)]]
    with pytest.raises(DomainError):
        SymMatrix(bad, CTX.digits)
    fixed = SymMatrix(bad, CTX.digits, symmetrize=True)
    assert fixed.rows[0][1] == fixed.rows[1][0]
    assert rel_close(fixed.rows[0][1], CTX.mpf("2.5"), CTX.mpf(10) ** -70, CTX)


def test_tiny_dimensions():
    with CTX.activate():
        one = SymMatrix([[gmpy2.mpfr("2.5")]], CTX.digits)
    e = sym_eigen(one, CTX)
    assert float(e.lam[0]) == 2.5
    assert float(e.q[0][0]) == 1.0
    two = random_symmetric(2, seed=4)
    e2 = sym_eigen(two, CTX)
    rec = spectral_apply(e2, lambda lam: lam, CTX)
    assert residual_max_abs(rec, two, CTX) < CTX.mpf(10) ** (10 - CTX.digits)


def test_eigen_handles_repeated_eigenvalues():
    # identity block plus an isolated eigenvalue: degenerate subspace
    with CTX.activate():
        rows = [[gmpy2.mpfr(1 if i == j else 0) for j in range(4)] for i in range(4)]
        rows[3][3] = gmpy2.mpfr(5)
    m = SymMatrix(rows, CTX.digits)
    e = sym_eigen(m, CTX)
    assert [float(x) for x in e.lam] == [1.0, 1.0, 1.0, 5.0]
    qt = [list(col) for col in zip(*e.q)]
    assert residual_max_abs(mat_mul(qt, e.q, CTX), identity_rows(4), CTX) \
        < CTX.mpf(10) ** (10 - CTX.digits)


def test_dot_dimension_check():
    with CTX.activate():
        x = [gmpy2.mpfr(1), gmpy2.mpfr(2)]
    assert float(dot(x, x, CTX)) == 5.0
    with pytest.raises(DomainError):
        dot(x, x + x, CTX)
