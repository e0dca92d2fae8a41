"""Grid construction, taper widths, normalization and projector flags."""

import gmpy2
import pytest
from hypothesis import given, settings, strategies as st

from modgen import ConfigError, PrecisionContext, build_grid, chi_diagonal, normalize
from conftest import rel_close

CTX = PrecisionContext(60)
TOL = gmpy2.mpfr(10) ** -50


def test_wedge_uniform_breakpoints():
    grid = build_grid("wedge2d", 8, "1", CTX)
    expected = ["-1", "-0.75", "-0.5", "-0.25", "0", "0.25", "0.5", "0.75", "1"]
    for p, e in zip(grid.breakpoints, expected):
        assert p == CTX.mpf(e)
    assert list(grid.inside) == [False] * 4 + [True] * 4


def test_cone2d_b2_uniform():
    # at cutoff 2 the taper increment vanishes: all cells share width 0.5
    grid = build_grid("cone2d", 8, "2", CTX)
    with CTX.activate():
        for w in grid.widths(CTX):
            assert rel_close(w, CTX.mpf("0.5"), TOL, CTX)
    assert list(grid.inside) == [False, False, True, True, True, True, False, False]


def test_cone2d_b4_taper_widths():
    # K=2 outer cells per side: solve 2h + 3d = 3 with h = 0.5 -> widths 7/6, 11/6
    grid = build_grid("cone2d", 8, "4", CTX)
    w = grid.widths(CTX)
    with CTX.activate():
        assert rel_close(w[1], CTX.mpf(7) / 6, TOL, CTX)   # inner taper cell (left side)
        assert rel_close(w[0], CTX.mpf(11) / 6, TOL, CTX)  # outermost left cell
        assert rel_close(w[6], CTX.mpf(7) / 6, TOL, CTX)
        assert rel_close(w[7], CTX.mpf(11) / 6, TOL, CTX)
        assert rel_close(w[0] + w[1], CTX.mpf(3), TOL, CTX)
    assert chi_diagonal(grid) == [False, False, True, True, True, True, False, False]


def test_cone2d_first_outer_equal_variant():
    grid = build_grid("cone2d", 8, "4", CTX, first_outer_equal=True)
    w = grid.widths(CTX)
    with CTX.activate():
        # widths h + k d for k = 0, 1: first outer cell equals the inner spacing h
        assert rel_close(w[6], CTX.mpf("0.5"), TOL, CTX)
        assert rel_close(w[7], CTX.mpf("2.5"), TOL, CTX)


def test_cone2d_too_small_cutoff():
    with pytest.raises(ConfigError):
        build_grid("cone2d", 8, "1.5", CTX)


def test_cone4d_structure():
    grid = build_grid("cone4d", 8, "4", CTX)
    assert grid.measure == "radial_r2"
    assert grid.breakpoints[0] == 0
    assert grid.breakpoints[4] == 1
    assert grid.breakpoints[-1] == CTX.mpf(4)
    assert list(grid.inside) == [True] * 4 + [False] * 4
    with CTX.activate():
        w = grid.widths(CTX)
        assert all(wi == CTX.mpf("0.25") for wi in w[:4])
        # outer widths form an increasing progression summing to b - 1
        assert w[4] < w[5] < w[6] < w[7]
        assert rel_close(w[4] + w[5] + w[6] + w[7], CTX.mpf(3), TOL, CTX)


def test_parameter_validation():
    with pytest.raises(ConfigError):
        build_grid("wedge2d", 7, "1", CTX)       # odd n
    with pytest.raises(ConfigError):
        build_grid("wedge2d", 4, "1", CTX)       # n < 8
    with pytest.raises(ConfigError):
        build_grid("cone2d", 10, "2", CTX)       # not divisible by 4
    with pytest.raises(ConfigError):
        build_grid("wedge2d", 8, "0", CTX)       # b <= 0
    with pytest.raises(ConfigError):
        build_grid("nope", 8, "1", CTX)


def test_normalize_lebesgue():
    grid = build_grid("wedge2d", 8, "1", CTX)
    basis = normalize(grid, CTX)
    with CTX.activate():
        # cell [0, 0.25]: width^(-1/2) = 2
        assert rel_close(basis.norms[4], CTX.mpf(2), TOL, CTX)


def test_normalize_radial():
    grid = build_grid("cone4d", 8, "2", CTX)
    basis = normalize(grid, CTX)
    with CTX.activate():
        # radial cell [0, h]: sqrt(3) h^(-3/2)
        h = CTX.mpf("0.25")
        ref = gmpy2.sqrt(CTX.mpf(3)) * h ** CTX.mpf("-1.5")
        assert rel_close(basis.norms[0], ref, TOL, CTX)
        # radial cell [1, 2] appears for b = 2 (uniform outside): sqrt(3/7)
        idx = next(i for i, p in enumerate(grid.breakpoints) if p == 1)
        assert grid.breakpoints[idx + 1] == CTX.mpf("1.25")


def test_radial_norm_formula_cell_1_2():
    # direct check of the closed form on the cell [1, 2]
    from modgen.grids import Grid, RADIAL_R2, normalize as norm_fn
    with CTX.activate():
        grid = Grid((CTX.mpf(1), CTX.mpf(2)), RADIAL_R2, (True,))
    # bypass balance validation: single-cell grid built directly
    basis = norm_fn(grid, CTX)
    with CTX.activate():
        assert rel_close(basis.norms[0], gmpy2.sqrt(CTX.mpf(3) / 7), TOL, CTX)


def test_box_orthonormality():
    # <e_i, e_j> = delta_ij under the scenario measure, by direct integration
    for scenario in ("wedge2d", "cone4d"):
        grid = build_grid(scenario, 8, "3", CTX)
        basis = normalize(grid, CTX)
        p = grid.breakpoints
        with CTX.activate():
            for i in range(8):
                a, b = p[i], p[i + 1]
                if grid.measure == "lebesgue":
                    quad = b - a
                else:
                    quad = (b ** 3 - a ** 3) / 3
                assert rel_close(basis.norms[i] ** 2 * quad, CTX.mpf(1), TOL, CTX)


@settings(max_examples=60, deadline=None)
@given(scenario=st.sampled_from(["wedge2d", "cone2d", "cone4d"]),
       n=st.integers(min_value=2, max_value=16).map(lambda k: 4 * k),
       b_num=st.integers(min_value=20, max_value=80))
def test_grid_invariants_property(scenario, n, b_num):
    b = f"{b_num / 10}"
    if scenario != "wedge2d" and b_num < 20:
        b = "2"
    grid = build_grid(scenario, n, b, CTX)
    p = grid.breakpoints
    assert all(x < y for x, y in zip(p, p[1:]))
    inside = chi_diagonal(grid)
    assert sum(inside) == n // 2
    # region boundaries are breakpoints
    with CTX.activate():
        if scenario == "wedge2d":
            assert any(x == 0 for x in p)
        else:
            assert any(x == 1 for x in p)
        # total outer length per side is exactly b - 1 (to rounding)
        if scenario == "cone4d":
            outer = [p[i + 1] - p[i] for i in range(n) if not inside[i]]
            total = CTX.mpf(0)
            for w in outer:
                total += w
            assert rel_close(total, CTX.mpf(b) - 1, TOL, CTX)
