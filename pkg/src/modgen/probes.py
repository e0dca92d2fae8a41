"""Smearing test functions, overlaps, analytic references and relative errors.

Discretized generator kernels only converge weakly, so the scientific readout
is always a quadratic form against localized probes: Gaussians on the line,
log-Gaussians (exactly normalized in the r^2 dr measure) on the half-line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError
from .grids import BoxBasis, LEBESGUE, RADIAL_R2
from .linalg import SymMatrix, mat_vec
from .precision import PrecisionContext, Scalar

GAUSSIAN = "gaussian"
LOGGAUSSIAN = "loggaussian"

REFERENCE_KINDS = ("wedge", "qd2", "pl2", "qd4")

# which probe family and reference curves belong to each scenario
SCENARIO_PROBES = {
    "wedge2d": (GAUSSIAN, ("wedge",)),
    "cone2d": (GAUSSIAN, ("qd2", "pl2")),
    "cone4d": (LOGGAUSSIAN, ("qd4",)),
}


@dataclass(frozen=True)
class ProbeSet:
    kind: str
    sigma: Scalar
    positions: tuple

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, LOGGAUSSIAN):
            raise DomainError(f"unknown probe kind {self.kind!r}")
        if not self.sigma > 0:
            raise DomainError("probe width must be positive")
        if self.kind == LOGGAUSSIAN and any(mu <= 0 for mu in self.positions):
            raise DomainError("log-Gaussian probes need positive positions")


def default_probes(scenario: str, ctx: PrecisionContext) -> ProbeSet:
    """Paper-scale probe sets: 41 positions on [-2, 2] for the line scenarios,
    0.05..1.20 on the half-line; widths 6/32, 6/64, 6/128 respectively."""
    with ctx.activate():
        if scenario == "wedge2d":
            sigma = mpfr(6) / 32
            pos = tuple(mpfr(-2) + mpfr(i) / 10 for i in range(41))
            return ProbeSet(GAUSSIAN, sigma, pos)
        if scenario == "cone2d":
            sigma = mpfr(6) / 64
            pos = tuple(mpfr(-2) + mpfr(i) / 10 for i in range(41))
            return ProbeSet(GAUSSIAN, sigma, pos)
        if scenario == "cone4d":
            sigma = mpfr(6) / 128
            pos = tuple(mpfr(i) / 20 for i in range(1, 25))
            return ProbeSet(LOGGAUSSIAN, sigma, pos)
    raise DomainError(f"unknown scenario {scenario!r}")


def overlaps(basis: BoxBasis, probe: ProbeSet, index: int,
             ctx: PrecisionContext):
    """Coefficient vector of one probe in the box basis (erf closed forms per cell)."""
    kind = probe.kind
    measure = basis.grid.measure
    if (kind, measure) not in ((GAUSSIAN, LEBESGUE), (LOGGAUSSIAN, RADIAL_R2)):
        raise DomainError(f"probe kind {kind} incompatible with measure {measure}")
    with ctx.activate():
        mu = mpfr(probe.positions[index])
        sigma = mpfr(probe.sigma)
        p = basis.grid.breakpoints
        pi = gmpy2.const_pi()
        out = []
        if kind == GAUSSIAN:
            # int of the unit Gaussian over a cell: sigma sqrt(pi/2) erf-difference
            front = gmpy2.rootn(pi * sigma * sigma, 4) ** -1 * sigma * gmpy2.sqrt(pi / 2)
            s2 = sigma * gmpy2.sqrt(mpfr(2))
            edges = [gmpy2.erf((x - mu) / s2) for x in p]
            for k, nk in enumerate(basis.norms):
                out.append(nk * front * (edges[k + 1] - edges[k]))
        else:
            # r^2-weighted overlap via t = log(alpha r / mu): Gaussian times e^{3t/2}
            alpha2 = 1 + (sigma / mu) ** 2
            logalpha = gmpy2.log(alpha2) / 2
            front = ((2 * pi * logalpha) ** (mpfr(-1) / 4)
                     * gmpy2.exp((gmpy2.log(mu) - logalpha) * mpfr(3) / 2)
                     * gmpy2.exp(9 * logalpha / 4)
                     * gmpy2.sqrt(pi * logalpha))
            scale = 2 * gmpy2.sqrt(logalpha)
            shift = 3 * logalpha
            edges = [gmpy2.erf((gmpy2.log(x) + logalpha - gmpy2.log(mu) - shift) / scale)
                     for x in p]
            for k, nk in enumerate(basis.norms):
                out.append(nk * front * (edges[k + 1] - edges[k]))
        return out


def smear_diagonal(matrix: SymMatrix, h, ctx: PrecisionContext) -> Scalar:
    """Quadratic form h^T M h."""
    if matrix.dim != len(h):
        raise DomainError("smear_diagonal dimension mismatch")
    with ctx.activate():
        image = mat_vec(matrix, h, ctx)
        acc = mpfr(0)
        for u, v in zip(h, image):
            acc += u * v
        return acc


def smear_pair(matrix: SymMatrix, h1, h2, ctx: PrecisionContext) -> Scalar:
    """Bilinear form h1^T M h2 (the off-diagonal smearing diagnostic)."""
    if matrix.dim != len(h1) or matrix.dim != len(h2):
        raise DomainError("smear_pair dimension mismatch")
    with ctx.activate():
        image = mat_vec(matrix, h2, ctx)
        acc = mpfr(0)
        for u, v in zip(h1, image):
            acc += u * v
        return acc


def reference(kind: str, mu: Scalar, sigma: Scalar, ctx: PrecisionContext) -> Scalar:
    """Smeared analytic reference curves.

    wedge: 2 pi mu (exact boost multiplier).
    qd2:   pi (1 - sigma^2/2 - mu^2)  (massless quadratic multiplier).
    pl2:   2 pi (1 - mu erf(mu/sigma)) - 2 sigma sqrt(pi) exp(-mu^2/sigma^2)
           (double-wedge piecewise-linear bound).
    qd4:   pi (1 - mu^2); the log-Gaussian family is built so its r^2 second
           moment is exactly mu^2, which collapses the radial smearing of the
           massless multiplier to this closed form.
    """
    if kind not in REFERENCE_KINDS:
        raise DomainError(f"unknown reference kind {kind!r}")
    with ctx.activate():
        mu = mpfr(mu)
        sigma = mpfr(sigma)
        if not sigma > 0:
            raise DomainError("sigma must be positive")
        pi = gmpy2.const_pi()
        if kind == "wedge":
            return 2 * pi * mu
        if kind == "qd2":
            return pi * (1 - sigma * sigma / 2 - mu * mu)
        if kind == "pl2":
            return (2 * pi * (1 - mu * gmpy2.erf(mu / sigma))
                    - 2 * sigma * gmpy2.sqrt(pi) * gmpy2.exp(-(mu / sigma) ** 2))
        return pi * (1 - mu * mu)


def relative_error(value: Scalar, ref: Scalar, ctx: PrecisionContext) -> Scalar:
    """|1 - value/ref|; undefined at a zero reference."""
    with ctx.activate():
        ref = mpfr(ref)
        if ref == 0:
            raise DomainError("relative error undefined for a zero reference")
        return abs(1 - mpfr(value) / ref)


@dataclass(frozen=True)
class SmearRow:
    mu: Scalar
    value: Scalar
    references: dict
    rel_errors: dict    # may miss a key only where the reference is exactly 0


@dataclass(frozen=True)
class SmearReport:
    rows: list
    metadata: dict = field(default_factory=dict)

    @property
    def reference_names(self):
        names = []
        for row in self.rows:
            for name in row.references:
                if name not in names:
                    names.append(name)
        return names


def smear_report(basis: BoxBasis, matrix: SymMatrix, probe: ProbeSet,
                 ref_kinds, ctx: PrecisionContext, metadata=None) -> SmearReport:
    """One row per probe: smeared value, every scenario reference, relative errors."""
    rows = []
    for i in range(len(probe.positions)):
        h = overlaps(basis, probe, i, ctx)
        value = smear_diagonal(matrix, h, ctx)
        refs = {}
        errs = {}
        for kind in ref_kinds:
            r = reference(kind, probe.positions[i], probe.sigma, ctx)
            refs[kind] = r
            if r != 0:
                errs[kind] = relative_error(value, r, ctx)
        rows.append(SmearRow(mu=probe.positions[i], value=value,
                             references=refs, rel_errors=errs))
    return SmearReport(rows=rows, metadata=dict(metadata or {}))
