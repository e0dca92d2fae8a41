"""From a discretized inverse-power kernel to the generator blocks.

Pipeline: one eigendecomposition of the kernel matrix gives the quarter-power
pair (exact mutual inverses by construction); the coupling matrix is built
from the pair and the region projector; its spectrum must avoid [-1, 1]
entirely (the validity gate that forces extended precision); arcoth through
the spectral calculus then yields the two generator blocks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

log = logging.getLogger("modgen")

from .errors import AssemblyError, DomainError, SpectralMarginError
from .linalg import (EigenDecomp, SymMatrix, asymmetry, identity_rows, mat_mul,
                     mat_mul_masked, mat_vec, residual_max_abs,
                     spectral_apply, sym_eigen)
from .precision import PrecisionContext, Scalar, arcoth


@dataclass(frozen=True)
class Diagnostics:
    spectral_margin: Scalar    # min |eigenvalue of coupling| - 1
    inverse_residual: Scalar   # max-abs of a4 @ a4inv - I
    symmetry_residual: Scalar  # asymmetry of the raw coupling matrix


@dataclass(frozen=True)
class ModularResult:
    a4: SymMatrix         # discretized positive quarter power
    a4inv: SymMatrix      # discretized inverse quarter power
    kernel_eigen: EigenDecomp
    b_eigen: EigenDecomp  # spectral factorization of the coupling matrix
    m_minus: SymMatrix
    m_plus: SymMatrix
    diagnostics: Diagnostics


def quarter_powers(kernel_matrix: SymMatrix, scenario_kind: str,
                   ctx: PrecisionContext):
    """Quarter-power pair from one shared eigendecomposition.

    scenario_kind 'd2': the input already is the inverse quarter power, so
    a4 = spectral inverse.  'd4': the input is the full inverse, so the pair
    is its +-1/4 spectral powers.  Sharing the decomposition makes the two
    outputs exact mutual inverses up to rounding.
    """
    if scenario_kind not in ("d2", "d4"):
        raise DomainError(f"scenario_kind must be 'd2' or 'd4', got {scenario_kind!r}")
    eig = sym_eigen(kernel_matrix, ctx)
    if eig.lam[0] <= 0:
        raise AssemblyError(
            f"kernel matrix is not positive definite (min eigenvalue {eig.lam[0]}); "
            "increase quad_order or digits")
    if scenario_kind == "d2":
        a4inv = kernel_matrix
        a4 = spectral_apply(eig, lambda lam: 1 / lam, ctx)
    else:
        a4inv = spectral_apply(eig, lambda lam: gmpy2.rootn(lam, 4), ctx)
        a4 = spectral_apply(eig, lambda lam: 1 / gmpy2.rootn(lam, 4), ctx)
    return a4, a4inv, eig


def coupling_operator(a4: SymMatrix, a4inv: SymMatrix, inside,
                      ctx: PrecisionContext):
    """a4 chi a4inv + a4inv chi a4 - 1 with chi the diagonal region projector.

    The two summands are exact transposes of each other, so the sum is
    symmetric up to rounding skew; the skew is measured and removed.
    Returns (coupling SymMatrix, raw asymmetry).
    """
    if a4.dim != a4inv.dim or a4.dim != len(inside):
        raise DomainError("coupling_operator dimension mismatch")
    n = a4.dim
    with ctx.activate():
        p1 = mat_mul_masked(a4, a4inv, inside, ctx)
        p2 = mat_mul_masked(a4inv, a4, inside, ctx)
        raw = [[p1[i][j] + p2[i][j] for j in range(n)] for i in range(n)]
        for i in range(n):
            raw[i][i] -= 1
        skew = asymmetry(raw)
    return SymMatrix(raw, ctx.digits, symmetrize=True), skew


def spectral_margin(eig: EigenDecomp) -> Scalar:
    """min |eigenvalue| - 1 of the coupling matrix; must be positive for a valid run."""
    margin = None
    violating = 0
    with PrecisionContext(eig.digits).activate():
        for lam in eig.lam:
            gap = abs(lam) - 1
            if gap <= 0:
                violating += 1
            if margin is None or gap < margin:
                margin = gap
    if margin is None:
        raise DomainError("empty spectrum")
    if margin <= 0:
        raise SpectralMarginError(margin, violating)
    return margin


def generator_blocks(b_eigen: EigenDecomp, a4: SymMatrix, a4inv: SymMatrix,
                     ctx: PrecisionContext):
    """The two generator blocks 2 a4^{+-1} arcoth(coupling) a4^{+-1}, symmetrized."""
    core = spectral_apply(b_eigen, lambda lam: arcoth(lam, ctx), ctx)
    with ctx.activate():
        m_minus = mat_mul(a4inv, mat_mul(core, a4inv, ctx), ctx)
        m_plus = mat_mul(a4, mat_mul(core, a4, ctx), ctx)
        two = mpfr(2)
        m_minus = [[two * v for v in row] for row in m_minus]
        m_plus = [[two * v for v in row] for row in m_plus]
    return (SymMatrix(m_minus, ctx.digits, symmetrize=True),
            SymMatrix(m_plus, ctx.digits, symmetrize=True))


def build_modular_result(kernel_matrix: SymMatrix, scenario_kind: str,
                         inside, ctx: PrecisionContext) -> ModularResult:
    """Run the whole matrix pipeline and enforce the validity gates."""
    a4, a4inv, kernel_eig = quarter_powers(kernel_matrix, scenario_kind, ctx)
    inv_residual = residual_max_abs(mat_mul(a4, a4inv, ctx), identity_rows(a4.dim), ctx)
    gate = ctx.mpf(10) ** (-(ctx.digits // 2))
    if not inv_residual < gate:
        raise AssemblyError(
            f"quarter powers are not mutual inverses to tolerance: residual "
            f"{inv_residual} >= {gate}")
    coupling, skew = coupling_operator(a4, a4inv, inside, ctx)
    b_eig = sym_eigen(coupling, ctx)
    margin = spectral_margin(b_eig)   # raises when <= 0
    _warn_if_spectrum_asymmetric(b_eig, ctx)
    m_minus, m_plus = generator_blocks(b_eig, a4, a4inv, ctx)
    return ModularResult(
        a4=a4, a4inv=a4inv, kernel_eigen=kernel_eig, b_eigen=b_eig,
        m_minus=m_minus, m_plus=m_plus,
        diagnostics=Diagnostics(spectral_margin=margin,
                                inverse_residual=inv_residual,
                                symmetry_residual=skew))


def _warn_if_spectrum_asymmetric(b_eig: EigenDecomp, ctx: PrecisionContext):
    """With a balanced projector the coupling spectrum pairs under sign flip;
    a violation is not fatal (only observed empirically) but worth a warning."""
    with ctx.activate():
        tol = mpfr(10) ** (-(ctx.digits // 4))
        lam = b_eig.lam
        worst = mpfr(0)
        for lo, hi in zip(lam, reversed(lam)):
            gap = abs(lo + hi)
            if gap > worst:
                worst = gap
        if worst > tol:
            log.warning("coupling spectrum not sign-symmetric: max |l + l'| = %s "
                        "(tolerance %s)", worst, tol)


def relative_entropy(result: ModularResult, inside, f_plus, f_minus,
                     ctx: PrecisionContext) -> Scalar:
    """Quadratic form <f+, chi m_plus f+> + <f-, chi m_minus f->.

    In the orthonormal box basis the dual pairings collapse to plain
    coefficient dot products; chi masks the region cells.
    """
    n = result.m_minus.dim
    if len(f_plus) != n or len(f_minus) != n or len(inside) != n:
        raise DomainError("relative_entropy dimension mismatch")
    with ctx.activate():
        acc = mpfr(0)
        for mat, vec in ((result.m_plus, f_plus), (result.m_minus, f_minus)):
            image = mat_vec(mat, vec, ctx)
            for keep, fi, gi in zip(inside, vec, image):
                if keep:
                    acc += fi * gi
        return acc
