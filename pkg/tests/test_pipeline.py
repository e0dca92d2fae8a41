"""Run orchestration: config round trip, cache reuse, byte determinism, file formats."""

import os

import gmpy2
import pytest

from modgen import (ConfigError, PrecisionContext, RunConfig, SpectralMarginError,
                    cache_key, parse_config, resolve, run_scenario,
                    serialize_config, sweep)
from modgen.pipeline import emitted_artifacts, probe_set
from modgen.reports import (matrix_to_modmat, modmat_to_matrix, report_to_csv,
                            kernel_to_csv)
from modgen.linalg import SymMatrix

FAST = dict(scenario="wedge2d", n=8, b="2", digits=40, probes="0.25,0.5",
            quad_order=64)


def fast_config(**kw):
    merged = {**FAST, **kw}
    return RunConfig(**merged)


def test_resolve_defaults():
    cfg = resolve(RunConfig(scenario="wedge2d"))
    assert cfg.n == 256 and cfg.digits == 450 and cfg.sigma == "0.1875"
    assert cfg.probes == "-2:2:41"
    cfg4 = resolve(RunConfig(scenario="cone4d"))
    assert cfg4.digits == 640 and cfg4.sigma == "0.046875"
    with pytest.raises(ConfigError):
        resolve(RunConfig(scenario="wedge2d", ell=1))


def test_config_round_trip():
    cfg = resolve(fast_config())
    assert parse_config(serialize_config(cfg)) == cfg
    text = "scenario = cone2d\nn = 16\nb = 4\nmass = 0.5\ndigits = 60\n"
    cfg2 = parse_config(text)
    assert cfg2.scenario == "cone2d" and cfg2.n == 16 and cfg2.mass == "0.5"
    assert parse_config(serialize_config(cfg2)) == cfg2


def test_config_parse_errors():
    with pytest.raises(ConfigError):
        parse_config("scenario = wedge2d\nwhat = 1\n")
    with pytest.raises(ConfigError):
        parse_config("scenario wedge2d\n")
    with pytest.raises(ConfigError):
        parse_config("n = 16\n")   # no scenario anywhere


def test_cache_key_canonicalizes_decimal_strings():
    a = cache_key(fast_config(b="2", mass="1"))
    b = cache_key(fast_config(b="2.0", mass="1.000"))
    assert a == b
    assert cache_key(fast_config(mass="1.5")) != a
    # sigma and probes do not enter the matrix cache key
    assert cache_key(fast_config(probes="0.5")) == a


def test_run_and_cache_reuse(tmp_path):
    cfg = fast_config()
    out1 = run_scenario(cfg, cache_dir=str(tmp_path))
    assert not out1.cache_hit
    assert out1.diagnostics.spectral_margin > 0
    out2 = run_scenario(cfg, cache_dir=str(tmp_path))
    assert out2.cache_hit
    for r1, r2 in zip(out1.report.rows, out2.report.rows):
        assert r1.value == r2.value and str(r1.value) == str(r2.value)


def test_cached_files_equal_fresh_recompute(tmp_path):
    cfg = fast_config()
    run_scenario(cfg, cache_dir=str(tmp_path / "a"))
    run_scenario(cfg, cache_dir=str(tmp_path / "b"))
    key = cache_key(cfg)
    for name in ("m_minus", "m_plus", "a4", "a4inv"):
        fa = tmp_path / "a" / key / f"{name}.modmat"
        fb = tmp_path / "b" / key / f"{name}.modmat"
        assert fa.read_bytes() == fb.read_bytes()


def test_report_bytes_deterministic(tmp_path):
    cfg = fast_config()
    texts = []
    for sub in ("x", "y"):
        out = run_scenario(cfg, cache_dir=str(tmp_path / sub))
        arts = emitted_artifacts(out, ["report_csv", "kernel_csv", "matrices"],
                                 cache_dir=str(tmp_path / sub))
        texts.append(arts)
    assert texts[0]["report.csv"] == texts[1]["report.csv"]
    assert texts[0]["kernel.csv"] == texts[1]["kernel.csv"]
    assert texts[0]["m_minus.modmat"] == texts[1]["m_minus.modmat"]


def test_report_csv_schema(tmp_path):
    out = run_scenario(fast_config(probes="-0.5,0,0.5"), cache_dir=str(tmp_path))
    csv = report_to_csv(out.report)
    lines = [l for l in csv.splitlines() if not l.startswith("#")]
    assert lines[0] == "mu,value,ref_wedge,err_wedge"
    assert len(lines) == 4
    # the mu = 0 row has an empty error cell (zero reference)
    zero_row = lines[2].split(",")
    assert zero_row[2] == "0"
    assert zero_row[3] == ""
    # metadata preserved
    assert "# scenario = wedge2d" in csv


def test_kernel_csv_schema(tmp_path):
    out = run_scenario(fast_config(), cache_dir=str(tmp_path))
    csv = emitted_artifacts(out, ["kernel_csv"])["kernel.csv"]
    lines = [l for l in csv.splitlines() if not l.startswith("#")]
    assert lines[0] == "i,j,x_i,y_j,value"
    assert len(lines) == 1 + 8 * 8


def test_modmat_round_trip_is_exact(tmp_path):
    out = run_scenario(fast_config(), cache_dir=str(tmp_path))
    ctx = PrecisionContext(40)
    m = out.matrices["m_minus"]
    text = matrix_to_modmat(m, ctx, "f" * 64)
    back = modmat_to_matrix(text, ctx)
    for r1, r2 in zip(m.rows, back.rows):
        for u, v in zip(r1, r2):
            assert u == v
    with pytest.raises(ConfigError):
        modmat_to_matrix(text, PrecisionContext(60))
    with pytest.raises(ConfigError):
        modmat_to_matrix("nope", ctx)


def test_probe_range_spec():
    ctx = PrecisionContext(40)
    cfg = fast_config(probes="-1:1:5")
    ps = probe_set(resolve(cfg), ctx)
    assert [float(x) for x in ps.positions] == [-1.0, -0.5, 0.0, 0.5, 1.0]
    with pytest.raises(ConfigError):
        probe_set(resolve(fast_config(probes="1:2")), ctx)
    with pytest.raises(ConfigError):
        probe_set(resolve(fast_config(probes="")), ctx)


def test_probe_coverage_check(tmp_path):
    with pytest.raises(ConfigError, match="outside the grid"):
        run_scenario(fast_config(probes="3.5"), cache_dir=str(tmp_path))


def test_stage_attached_to_errors(tmp_path):
    cfg = fast_config(n=32, b="4", digits=30)   # margin ~1e-43 unresolvable at 30
    with pytest.raises(SpectralMarginError) as err:
        run_scenario(cfg, cache_dir=str(tmp_path))
    assert getattr(err.value, "stage") == "modular pipeline"


def test_retry_precision_doubles_digits(tmp_path):
    cfg = fast_config(n=32, b="4", digits=30)
    out = run_scenario(cfg, cache_dir=str(tmp_path), retry_precision=True)
    assert out.config.digits == 60
    assert out.diagnostics.spectral_margin > 0


def test_corrupted_cache_is_reported(tmp_path):
    cfg = fast_config()
    out = run_scenario(cfg, cache_dir=str(tmp_path))
    victim = tmp_path / out.cache_key / "m_minus.modmat"
    text = victim.read_text().splitlines()
    victim.write_text("\n".join(text[:3]) + "\n")
    with pytest.raises(ConfigError) as err:
        run_scenario(cfg, cache_dir=str(tmp_path))
    assert getattr(err.value, "stage") == "cache load"


def test_sweep_cartesian(tmp_path):
    outs = sweep(fast_config(), masses=["0.5", "1"], cache_dir=str(tmp_path))
    assert [o.config.mass for o in outs] == ["0.5", "1"]
    outs4 = sweep(RunConfig(scenario="cone4d", n=8, b="2", digits=60,
                            probes="0.5", quad_order=64),
                  masses=["1"], ells=[0, 1], cache_dir=str(tmp_path))
    assert [(o.config.mass, o.config.ell) for o in outs4] == [("1", 0), ("1", 1)]


@pytest.mark.slow
def test_4d_small_mass_approaches_massless_multiplier():
    # strongest whole-pipeline cross-check: at m = 0.1 the smeared radial
    # diagonal lands on the massless multiplier reference (the 3D massless
    # limit is regular, unlike 2D).  Measured at n=64: r=0.3 within 1.3%,
    # r=0.8 within 3.9% (0.7% at n=128, boundary cell effects shrink with n).
    cache = os.environ.get("MODGEN_CACHE_DIR")
    out = run_scenario(RunConfig(scenario="cone4d", n=64, b="4", mass="0.1",
                                 ell=0, digits=200, probes="0.3,0.8"),
                       cache_dir=cache)
    row_03, row_08 = out.report.rows
    assert abs(float(row_03.value) / float(row_03.references["qd4"]) - 1) < 0.03
    assert abs(float(row_08.value) / float(row_08.references["qd4"]) - 1) < 0.06
