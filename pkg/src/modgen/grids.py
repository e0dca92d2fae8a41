"""Discretization grids and normalized box bases.

Three scenarios share one grid recipe: cells are uniform across the local
region, and (for the cone scenarios) the outer cell widths grow in an
arithmetic progression w_k = h_in + k*d chosen so the cells exactly fill
[region edge, cutoff].  Region boundaries always coincide with breakpoints,
so the region projector is exactly diagonal in the box basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .errors import ConfigError
from .precision import PrecisionContext, Scalar

LEBESGUE = "lebesgue"
RADIAL_R2 = "radial_r2"

SCENARIOS = ("wedge2d", "cone2d", "cone4d")


@dataclass(frozen=True)
class Grid:
    breakpoints: tuple    # strictly increasing
    measure: str          # LEBESGUE or RADIAL_R2
    inside: tuple         # per-cell: cell fully inside the local region

    @property
    def n(self) -> int:
        return len(self.inside)

    def widths(self, ctx: PrecisionContext):
        with ctx.activate():
            p = self.breakpoints
            return [p[i + 1] - p[i] for i in range(self.n)]


@dataclass(frozen=True)
class BoxBasis:
    grid: Grid
    norms: tuple

    @property
    def n(self) -> int:
        return self.grid.n


def _taper_widths(k: int, h_in: Scalar, span: Scalar, first_outer_equal: bool):
    """k outer widths h_in + j*d (j = 1..k, or 0..k-1) summing exactly to span."""
    if first_outer_equal:
        # sum = k h + d k(k-1)/2
        denom = k * (k - 1) // 2
        if denom == 0:
            if abs(span - k * h_in) > abs(span) * mpfr(10) ** -20:
                raise ConfigError("single outer cell cannot match the span")
            return [span]
        d = (span - k * h_in) / denom
        offsets = range(k)
    else:
        # sum = k h + d k(k+1)/2
        d = (span - k * h_in) * 2 / (k * (k + 1))
        offsets = range(1, k + 1)
    if d < 0:
        # a few ulps of negativity are grid-arithmetic noise, not a config problem
        if d > -abs(h_in) * mpfr(10) ** -20:
            d = mpfr(0)
        else:
            raise ConfigError(
                f"cutoff too small for the inner spacing: taper increment d = {d} < 0")
    return [h_in + j * d for j in offsets]


def build_grid(scenario: str, n: int, b, ctx: PrecisionContext,
               first_outer_equal: bool = False) -> Grid:
    """Breakpoints, measure and inside flags for one scenario.

    wedge2d: n uniform cells on [-b, b], region [0, b].
    cone2d:  n/2 uniform cells on [-1, 1] (the region), n/4 tapered cells on
             each of [-b, -1] and [1, b].
    cone4d:  n/2 uniform cells on [0, 1] (the region), n/2 tapered on [1, b],
             radial measure r^2 dr.
    """
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    if n % 2 or n < 8:
        raise ConfigError(f"n must be even and >= 8, got {n}")
    if scenario == "cone2d" and n % 4:
        raise ConfigError(f"cone2d requires n divisible by 4, got {n}")
    with ctx.activate():
        b = mpfr(b)
        if not b > 0:
            raise ConfigError(f"cutoff b must be positive, got {b}")
        if scenario == "wedge2d":
            # anchor at the region boundary: pts[n/2] = 0 exactly, cutoffs = +-(n/2)h
            h = 2 * b / n
            pts = [(i - n // 2) * h for i in range(n + 1)]
            inside = tuple(i >= n // 2 for i in range(n))
            grid = Grid(tuple(pts), LEBESGUE, inside)
        elif scenario == "cone2d":
            if b < 1:
                raise ConfigError("cone2d requires b >= 1")
            half = n // 2
            quarter = n // 4
            h = mpfr(2) / half
            right = [mpfr(1)]
            for w in _taper_widths(quarter, h, b - 1, first_outer_equal):
                right.append(right[-1] + w)
            right[-1] = b
            left = [-x for x in reversed(right)]
            mid = [-1 + i * h for i in range(1, half)]
            pts = left + mid + right
            inside = tuple(quarter <= i < quarter + half for i in range(n))
            grid = Grid(tuple(pts), LEBESGUE, inside)
        else:
            if b < 1:
                raise ConfigError("cone4d requires b >= 1")
            half = n // 2
            h = mpfr(1) / half
            pts = [i * h for i in range(half)] + [mpfr(1)]
            for w in _taper_widths(half, h, b - 1, first_outer_equal):
                pts.append(pts[-1] + w)
            pts[-1] = b
            inside = tuple(i < half for i in range(n))
            grid = Grid(tuple(pts), RADIAL_R2, inside)
    _check_grid(grid)
    return grid


def _check_grid(grid: Grid):
    p = grid.breakpoints
    for i in range(len(p) - 1):
        if not p[i] < p[i + 1]:
            raise ConfigError(f"breakpoints not strictly increasing at {i}")
    n_inside = sum(1 for f in grid.inside if f)
    if 2 * n_inside != grid.n:
        raise ConfigError("inside/outside cell counts are unbalanced")


def normalize(grid: Grid, ctx: PrecisionContext) -> BoxBasis:
    """Normalization factors making each box function a unit vector in the grid's measure."""
    with ctx.activate():
        p = grid.breakpoints
        norms = []
        for i in range(grid.n):
            a, b = p[i], p[i + 1]
            if grid.measure == LEBESGUE:
                norms.append(1 / gmpy2.sqrt(b - a))
            else:
                norms.append(gmpy2.sqrt(3 / (b * b * b - a * a * a)))
        return BoxBasis(grid=grid, norms=tuple(norms))


def chi_diagonal(grid: Grid):
    """Inside flags as the diagonal of the region projector (0/1 matrix)."""
    return list(grid.inside)
