import gmpy2
import pytest

from modgen import PrecisionContext


@pytest.fixture
def ctx120():
    return PrecisionContext(120)


@pytest.fixture
def ctx60():
    return PrecisionContext(60)


def rel_close(value, expected, rel_tol, ctx):
    """|value - expected| <= rel_tol * |expected| at the context precision."""
    with ctx.activate():
        v = gmpy2.mpfr(value)
        e = gmpy2.mpfr(expected)
        if e == 0:
            return abs(v) <= gmpy2.mpfr(rel_tol)
        return abs(v - e) <= gmpy2.mpfr(rel_tol) * abs(e)
