"""Scenario orchestration: config resolution, caching, and the run pipeline.

A run is: grid -> basis -> kernel matrix -> quarter powers -> coupling ->
spectrum gate -> generator blocks -> smeared report.  The expensive matrix
stage is cached under a content hash of the parameters that determine it;
after computing, matrices are written to the cache and immediately reloaded,
so fresh and cached runs continue from bit-identical state and all emitted
files are byte-stable.
"""

from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, replace, asdict

from gmpy2 import mpfr

from . import grids, kernels, modular, probes as probes_mod, reports
from .errors import ConfigError, ModGenError, SpectralMarginError
from .modular import Diagnostics
from .precision import PrecisionContext, to_decimal, roundtrip_digits

ENV_CACHE_DIR = "MODGEN_CACHE_DIR"

_SCENARIO_KIND = {"wedge2d": "d2", "cone2d": "d2", "cone4d": "d4"}
_DEFAULT_DIGITS = {"wedge2d": 450, "cone2d": 450, "cone4d": 640}
_DEFAULT_SIGMA = {"wedge2d": "0.1875", "cone2d": "0.09375", "cone4d": "0.046875"}
_DEFAULT_PROBES = {"wedge2d": "-2:2:41", "cone2d": "-2:2:41", "cone4d": "0.05:1.2:24"}

_MATRIX_FILES = ("m_minus", "m_plus", "a4", "a4inv")
EMIT_CHOICES = ("report_csv", "kernel_csv", "matrices")

_CONFIG_FIELDS = ("scenario", "n", "b", "mass", "ell", "digits", "sigma",
                  "probes", "quad_order")


@dataclass(frozen=True)
class RunConfig:
    """One scenario run.  Arbitrary-precision parameters are decimal strings."""

    scenario: str
    n: int = 256
    b: str = "4"
    mass: str = "1"
    ell: int = 0
    digits: int | None = None     # paper defaults: 450 (2D), 640 (4D)
    sigma: str | None = None
    probes: str | None = None     # "lo:hi:count" or comma-separated positions
    quad_order: int = 64


def resolve(config: RunConfig) -> RunConfig:
    """Fill scenario-dependent defaults; a resolved config round-trips exactly."""
    if config.scenario not in _SCENARIO_KIND:
        raise ConfigError(f"unknown scenario {config.scenario!r}")
    if config.scenario != "cone4d" and config.ell != 0:
        raise ConfigError("ell is only meaningful for cone4d")
    return replace(
        config,
        digits=config.digits if config.digits is not None else _DEFAULT_DIGITS[config.scenario],
        sigma=config.sigma if config.sigma is not None else _DEFAULT_SIGMA[config.scenario],
        probes=config.probes if config.probes is not None else _DEFAULT_PROBES[config.scenario],
    )


def serialize_config(config: RunConfig) -> str:
    config = resolve(config)
    data = asdict(config)
    return "".join(f"{k} = {data[k]}\n" for k in _CONFIG_FIELDS)


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Flat `key = value` lines; unknown keys rejected, later keys win."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in ("n", "ell", "digits", "quad_order"):
            values[key] = int(val)
        else:
            values[key] = val
    if "scenario" not in values and base is None:
        raise ConfigError("config must name a scenario")
    merged = replace(base, **values) if base is not None else RunConfig(**values)
    return resolve(merged)


def context_for(config: RunConfig) -> PrecisionContext:
    return PrecisionContext(resolve(config).digits)


def cache_key(config: RunConfig) -> str:
    """Content hash over exactly the parameters that determine the matrices."""
    config = resolve(config)
    ctx = PrecisionContext(config.digits)
    nd = roundtrip_digits(ctx.bits)
    canon = (f"scenario={config.scenario};n={config.n};"
             f"b={to_decimal(ctx.mpf(config.b), nd)};"
             f"mass={to_decimal(ctx.mpf(config.mass), nd)};"
             f"ell={config.ell};digits={config.digits};quad_order={config.quad_order}")
    return reports.sha256_text(canon)


def default_cache_dir() -> str:
    return os.environ.get(ENV_CACHE_DIR) or os.path.join(
        os.path.expanduser("~"), ".cache", "modgen")


def probe_set(config: RunConfig, ctx: PrecisionContext) -> probes_mod.ProbeSet:
    config = resolve(config)
    kind, _ = probes_mod.SCENARIO_PROBES[config.scenario]
    with ctx.activate():
        sigma = mpfr(config.sigma)
        spec = config.probes
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ConfigError(f"bad probe range {spec!r} (want lo:hi:count)")
            lo = mpfr(parts[0])
            hi = mpfr(parts[1])
            count = int(parts[2])
            if count < 1:
                raise ConfigError("probe count must be >= 1")
            if count == 1:
                pos = (lo,)
            else:
                pos = tuple(lo + (hi - lo) * i / (count - 1) for i in range(count))
        else:
            pos = tuple(mpfr(tok.strip()) for tok in spec.split(",") if tok.strip())
            if not pos:
                raise ConfigError("empty probe list")
    return probes_mod.ProbeSet(kind=kind, sigma=sigma, positions=pos)


@dataclass(frozen=True)
class RunOutcome:
    config: RunConfig            # resolved, with the digits actually used
    report: probes_mod.SmearReport
    diagnostics: Diagnostics
    matrices: dict               # name -> SymMatrix for m_minus, m_plus, a4, a4inv
    basis: grids.BoxBasis
    cache_key: str
    cache_hit: bool


@contextmanager
def _stage(name: str):
    try:
        yield
    except ModGenError as err:
        if not getattr(err, "stage", None):
            err.stage = name
        raise


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(path)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cache_paths(cdir: str):
    paths = {name: os.path.join(cdir, f"{name}.modmat") for name in _MATRIX_FILES}
    paths["diagnostics"] = os.path.join(cdir, "diagnostics.txt")
    paths["meta"] = os.path.join(cdir, "meta.txt")
    return paths


def _compute_and_store(config: RunConfig, ctx: PrecisionContext, cdir: str, key: str):
    with _stage("grid"):
        grid = grids.build_grid(config.scenario, config.n, config.b, ctx)
        basis = grids.normalize(grid, ctx)
        inside = grids.chi_diagonal(grid)
    with _stage("kernel assembly"):
        spec = kernels.KernelSpec(scenario=config.scenario, mass=ctx.mpf(config.mass),
                                  ell=config.ell, quad_order=config.quad_order)
        if spec.scenario == "cone4d":
            kernel = kernels.assemble_Ainv_4d(basis, spec.ell, spec.mass, ctx,
                                              quad_order=spec.quad_order)
        else:
            kernel = kernels.assemble_Am14_2d(basis, spec.mass, ctx)
    with _stage("modular pipeline"):
        result = modular.build_modular_result(
            kernel, _SCENARIO_KIND[config.scenario], inside, ctx)
    os.makedirs(cdir, exist_ok=True)
    paths = _cache_paths(cdir)
    nd = roundtrip_digits(ctx.bits)
    diag_text = "".join(
        f"{name} = {to_decimal(getattr(result.diagnostics, name), nd)}\n"
        for name in ("spectral_margin", "inverse_residual", "symmetry_residual"))
    mats = {"m_minus": result.m_minus, "m_plus": result.m_plus,
            "a4": result.a4, "a4inv": result.a4inv}
    for name in _MATRIX_FILES:
        _atomic_write(paths[name], reports.matrix_to_modmat(mats[name], ctx, key))
    _atomic_write(paths["diagnostics"], diag_text)
    _atomic_write(paths["meta"], serialize_config(config))


def _load_cached(ctx: PrecisionContext, cdir: str):
    paths = _cache_paths(cdir)
    matrices = {}
    for name in _MATRIX_FILES:
        with open(paths[name]) as fh:
            matrices[name] = reports.modmat_to_matrix(fh.read(), ctx)
    diag = {}
    with ctx.activate():
        with open(paths["diagnostics"]) as fh:
            for line in fh:
                key, _, val = line.partition("=")
                diag[key.strip()] = mpfr(val.strip())
    return matrices, Diagnostics(**diag)


def _cache_complete(cdir: str) -> bool:
    paths = _cache_paths(cdir)
    return all(os.path.exists(paths[name])
               for name in (*_MATRIX_FILES, "diagnostics"))


def run_scenario(config: RunConfig, cache_dir: str | None = None,
                 retry_precision: bool = False) -> RunOutcome:
    """Execute one scenario run, reusing cached matrices when available.

    On a spectral-margin failure (eigenvalues of the coupling inside [-1, 1])
    retries exactly once at doubled digits when retry_precision is set.
    """
    config = resolve(config)
    try:
        return _run_once(config, cache_dir)
    except SpectralMarginError:
        if not retry_precision:
            raise
        return _run_once(replace(config, digits=2 * config.digits), cache_dir)


def _run_once(config: RunConfig, cache_dir: str | None) -> RunOutcome:
    cache_dir = cache_dir or default_cache_dir()
    ctx = PrecisionContext(config.digits)
    key = cache_key(config)
    cdir = os.path.join(cache_dir, key)
    cache_hit = _cache_complete(cdir)
    if not cache_hit:
        _compute_and_store(config, ctx, cdir, key)
    with _stage("cache load"):
        matrices, diagnostics = _load_cached(ctx, cdir)
        if matrices["m_minus"].dim != config.n:
            raise ConfigError(
                f"cache entry {key} has dim {matrices['m_minus'].dim}, expected {config.n}")
    with _stage("grid"):
        grid = grids.build_grid(config.scenario, config.n, config.b, ctx)
        basis = grids.normalize(grid, ctx)
    with _stage("smearing"):
        pset = probe_set(config, ctx)
        lo, hi = grid.breakpoints[0], grid.breakpoints[-1]
        for mu in pset.positions:
            if not lo <= mu <= hi:
                raise ConfigError(f"probe position {mu} outside the grid [{lo}, {hi}]")
        _, ref_kinds = probes_mod.SCENARIO_PROBES[config.scenario]
        metadata = {k: getattr(config, k) for k in _CONFIG_FIELDS}
        report = probes_mod.smear_report(basis, matrices["m_minus"], pset,
                                         ref_kinds, ctx, metadata)
    return RunOutcome(config=config, report=report, diagnostics=diagnostics,
                      matrices=matrices, basis=basis, cache_key=key,
                      cache_hit=cache_hit)


def sweep(config: RunConfig, masses, ells=None, cache_dir: str | None = None,
          retry_precision: bool = False):
    """Cartesian product over masses (and ells for cone4d)."""
    config = resolve(config)
    if ells is None or config.scenario != "cone4d":
        ells = [config.ell]
    outcomes = []
    for mass in masses:
        for ell in ells:
            outcomes.append(run_scenario(replace(config, mass=str(mass), ell=int(ell)),
                                         cache_dir=cache_dir,
                                         retry_precision=retry_precision))
    return outcomes


def emitted_artifacts(outcome: RunOutcome, emit, cache_dir: str | None = None) -> dict:
    """name -> file text for the requested emit flags."""
    for flag in emit:
        if flag not in EMIT_CHOICES:
            raise ConfigError(f"unknown emit flag {flag!r}")
    artifacts = {}
    if "report_csv" in emit:
        artifacts["report.csv"] = reports.report_to_csv(outcome.report)
    if "kernel_csv" in emit:
        metadata = {k: getattr(outcome.config, k) for k in _CONFIG_FIELDS}
        artifacts["kernel.csv"] = reports.kernel_to_csv(
            outcome.matrices["m_minus"], outcome.basis.grid.breakpoints, metadata)
    if "matrices" in emit:
        cache_dir = cache_dir or default_cache_dir()
        paths = _cache_paths(os.path.join(cache_dir, outcome.cache_key))
        for name in _MATRIX_FILES:
            with open(paths[name]) as fh:
                artifacts[f"{name}.modmat"] = fh.read()
    return artifacts
