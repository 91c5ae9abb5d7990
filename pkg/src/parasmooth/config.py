"""Experiment configuration: one canonical YAML format, fully validated.

A config is a mapping with blocks ``problem``, ``solver``, ``norms``,
``checks`` and ``output`` plus a ``seed``.  Parsing fills every default
explicitly, so the resolved copy written next to the results is complete
and reproducible: the SHA-256 of its canonical dump is the config hash
recorded in the report, and resolved configs round-trip through
serialisation bit-identically.

Unknown keys, unknown stock component names, and out-of-range values are
rejected with the dotted path of the offending field.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import yaml

from .errors import ParseError, ValidationError
from .evolve import Method
from .grid import GridSpec, ScalarField
from .problems import (
    DiffusionField,
    ProblemSpec,
    RoughDataSpec,
    diagonal,
    isotropic,
    manufactured_steady,
    rough_data_sampler,
    sine_1d,
    sine_rank1_2d,
)

SCHEMA_VERSION = 1

DIFFUSION_KINDS = ("isotropic", "diagonal", "sine_1d", "sine_rank1_2d")
FORCING_KINDS = ("zero", "constant", "modes", "manufactured")
INITIAL_KINDS = ("zero", "constant", "modes", "rough")
CHECK_KINDS = (
    "heat_oracle",
    "galerkin_oracle",
    "rate_fit",
    "smoothing_bound",
    "gronwall",
    "dissipation",
    "monotone_norms",
    "uniqueness",
    "continuity",
    "weak_residual",
    "mass_balance",
    "spectral_decay",
)
METHODS = tuple(m.value for m in Method)
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class GridConfig:
    n: int
    points: int
    length: float


@dataclass(frozen=True)
class ScheduleConfig:
    count: int
    spacing: str
    start: float
    stop: float

    def times(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(np.log10(self.start), np.log10(self.stop), self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SolverConfig:
    method: str
    safety: float
    max_step: Optional[float]
    schedule: ScheduleConfig


@dataclass(frozen=True)
class OutputConfig:
    directory: str
    formats: Tuple[str, ...]
    figures: bool


@dataclass(frozen=True)
class ExperimentConfig:
    schema_version: int
    name: str
    seed: int
    grid: GridConfig
    diffusion: dict
    forcing: dict
    initial: dict
    horizon: float
    solver: SolverConfig
    norms_max_order: int
    checks: Tuple[dict, ...]
    output: OutputConfig

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "name": self.name,
            "seed": self.seed,
            "problem": {
                "grid": {"n": self.grid.n, "points": self.grid.points, "length": self.grid.length},
                "diffusion": dict(self.diffusion),
                "forcing": dict(self.forcing),
                "initial": dict(self.initial),
                "horizon": self.horizon,
            },
            "solver": {
                "method": self.solver.method,
                "safety": self.solver.safety,
                "max_step": self.solver.max_step,
                "samples": {
                    "count": self.solver.schedule.count,
                    "spacing": self.solver.schedule.spacing,
                    "start": self.solver.schedule.start,
                    "stop": self.solver.schedule.stop,
                },
            },
            "norms": {"max_order": self.norms_max_order},
            "checks": [dict(c) for c in self.checks],
            "output": {
                "directory": self.output.directory,
                "formats": list(self.output.formats),
                "figures": self.output.figures,
            },
        }


def canonical_dump(resolved: dict) -> str:
    return yaml.safe_dump(resolved, sort_keys=True, default_flow_style=False)


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_dump(config.to_dict()).encode()).hexdigest()


class _Block:
    """Mapping view that rejects unknown keys and tracks its dotted path."""

    def __init__(self, data, path):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ValidationError(path, f"expected a mapping, got {type(data).__name__}")
        self.data = data
        self.path = path
        self.seen = set()

    def get(self, key, default=None, required=False):
        self.seen.add(key)
        if key not in self.data:
            if required:
                raise ValidationError(f"{self.path}.{key}", "required field is missing")
            return default
        return self.data[key]

    def block(self, key, required=False) -> "_Block":
        return _Block(self.get(key, {}, required=required), f"{self.path}.{key}")

    def finish(self):
        unknown = set(self.data) - self.seen
        if unknown:
            name = sorted(unknown)[0]
            raise ValidationError(f"{self.path}.{name}", "unknown field")


def _number(block, key, default=None, required=False, minimum=None, maximum=None, strict_min=None):
    value = block.get(key, default, required=required)
    path = f"{block.path}.{key}"
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(path, f"expected a number, got {value!r}")
    value = float(value)
    if strict_min is not None and not value > strict_min:
        raise ValidationError(path, f"must be > {strict_min}, got {value}")
    if minimum is not None and value < minimum:
        raise ValidationError(path, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ValidationError(path, f"must be <= {maximum}, got {value}")
    return value


def _integer(block, key, default=None, required=False, minimum=None, maximum=None):
    value = block.get(key, default, required=required)
    path = f"{block.path}.{key}"
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ValidationError(path, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ValidationError(path, f"must be <= {maximum}, got {value}")
    return value


def _choice(block, key, choices, default=None, required=False):
    value = block.get(key, default, required=required)
    if value not in choices:
        raise ValidationError(f"{block.path}.{key}", f"must be one of {list(choices)}, got {value!r}")
    return value


def _mode_list(block, key, n, required=False):
    raw = block.get(key, [], required=required)
    path = f"{block.path}.{key}"
    if not isinstance(raw, list) or not raw:
        raise ValidationError(path, "expected a non-empty list of mode entries")
    out = []
    for i, entry in enumerate(raw):
        sub = _Block(entry, f"{path}[{i}]")
        freq = sub.get("freq", required=True)
        if not isinstance(freq, list) or len(freq) != n or not all(isinstance(c, int) for c in freq):
            raise ValidationError(f"{path}[{i}].freq", f"expected a list of {n} integers")
        amplitude = _number(sub, "amplitude", default=1.0)
        phase = _choice(sub, "phase", ("cos", "sin"), default="cos")
        sub.finish()
        out.append({"freq": list(freq), "amplitude": amplitude, "phase": phase})
    return out


def _validate_diffusion(block: _Block, n: int) -> dict:
    kind = block.get("kind", "isotropic")
    if kind not in DIFFUSION_KINDS:
        raise ValidationError(f"{block.path}.kind", f"unknown diffusion {kind!r}; stock kinds: {list(DIFFUSION_KINDS)}")
    out = {"kind": kind}
    if kind == "isotropic":
        out["scale"] = _number(block, "scale", default=1.0, strict_min=0.0)
    elif kind == "diagonal":
        values = block.get("values", required=True)
        if not isinstance(values, list) or len(values) != n:
            raise ValidationError(f"{block.path}.values", f"expected {n} positive diagonal values")
        for v in values:
            if not isinstance(v, (int, float)) or not v > 0:
                raise ValidationError(f"{block.path}.values", "diagonal values must be positive numbers")
        out["values"] = [float(v) for v in values]
    elif kind == "sine_1d":
        if n != 1:
            raise ValidationError(f"{block.path}.kind", "sine_1d requires a one-dimensional grid")
        base = _number(block, "base", default=1.5)
        amplitude = _number(block, "amplitude", default=1.0)
        if not base - abs(amplitude) > 0:
            raise ValidationError(f"{block.path}.base", "base - |amplitude| must be positive for ellipticity")
        out["base"], out["amplitude"] = base, amplitude
    else:  # sine_rank1_2d
        if n != 2:
            raise ValidationError(f"{block.path}.kind", "sine_rank1_2d requires a two-dimensional grid")
        base = _number(block, "base", default=1.5)
        amplitude = _number(block, "amplitude", default=0.5)
        rank1 = _number(block, "rank1", default=0.5, minimum=0.0)
        if not base - abs(amplitude) > 0:
            raise ValidationError(f"{block.path}.base", "base - |amplitude| must be positive for ellipticity")
        out["base"], out["amplitude"], out["rank1"] = base, amplitude, rank1
    block.finish()
    return out


def _validate_field(block: _Block, n: int, kinds, role: str, diffusion: dict) -> dict:
    default_kind = "zero"
    kind = block.get("kind", default_kind)
    if kind not in kinds:
        raise ValidationError(f"{block.path}.kind", f"unknown {role} {kind!r}; stock kinds: {list(kinds)}")
    out = {"kind": kind}
    if kind == "zero":
        pass
    elif kind == "constant":
        out["value"] = _number(block, "value", default=1.0)
    elif kind == "modes":
        out["modes"] = _mode_list(block, "modes", n, required=True)
    elif kind == "rough":
        decay = _number(block, "decay", required=True, strict_min=0.0)
        if decay <= n / 2.0:
            raise ValidationError(f"{block.path}.decay", f"DecayTooSmall: need decay > n/2 = {n / 2.0}, got {decay}")
        out["decay"] = decay
        out["amplitude"] = _number(block, "amplitude", default=1.0)
        out["mean"] = _number(block, "mean", default=0.0)
    elif kind == "manufactured":
        target = block.block("target", required=True)
        out["target"] = {"modes": _mode_list(target, "modes", n, required=True)}
        target.finish()
    block.finish()
    return out


_CHECK_FIELDS = {
    "heat_oracle": {"rtol": 1e-8},
    "galerkin_oracle": {"modes": [9, 17, 33], "tol": 1e-6, "monotone": True},
    "rate_fit": {"order": None, "window": None, "expected_slope": None, "slope_tol": 0.12, "min_r2": 0.98},
    "smoothing_bound": {"order": None},
    "gronwall": {"order": 3, "max_c": 5.0},
    "dissipation": {"max_c": None},
    "monotone_norms": {"max_order": 4, "rtol": 1e-12},
    "uniqueness": {"freq": None, "amplitude": 1e-3, "expect": "nonincreasing", "rtol": 1e-8},
    "continuity": {"t": None, "shifts": None, "ratio_tol": 0.1},
    "weak_residual": {"test_modes": 9, "max_normalized": 1e-6, "shuffle": False, "min_normalized": 0.1},
    "mass_balance": {"tol_factor": 1e-10},
    "spectral_decay": {},
}


def _validate_check(entry, index, n, max_order) -> dict:
    block = _Block(entry, f"checks[{index}]")
    kind = block.get("kind", required=True)
    if kind not in CHECK_KINDS:
        raise ValidationError(f"{block.path}.kind", f"unknown check {kind!r}; kinds: {list(CHECK_KINDS)}")
    out = {"kind": kind}
    fields = _CHECK_FIELDS[kind]
    if kind == "rate_fit":
        out["order"] = _integer(block, "order", required=True, minimum=0, maximum=max_order)
        window = block.get("window", required=True)
        if not isinstance(window, list) or len(window) != 2 or not window[0] < window[1]:
            raise ValidationError(f"{block.path}.window", "expected [lo, hi] with lo < hi")
        out["window"] = [float(window[0]), float(window[1])]
        expected = block.get("expected_slope", None)
        out["expected_slope"] = None if expected is None else float(expected)
        out["slope_tol"] = _number(block, "slope_tol", default=fields["slope_tol"], strict_min=0.0)
        out["min_r2"] = _number(block, "min_r2", default=fields["min_r2"], minimum=0.0, maximum=1.0)
    elif kind == "smoothing_bound":
        out["order"] = _integer(block, "order", required=True, minimum=1, maximum=max_order)
    elif kind == "heat_oracle":
        out["rtol"] = _number(block, "rtol", default=fields["rtol"], strict_min=0.0)
    elif kind == "galerkin_oracle":
        modes = block.get("modes", fields["modes"])
        if not isinstance(modes, list) or not modes or not all(isinstance(m, int) and m >= 1 for m in modes):
            raise ValidationError(f"{block.path}.modes", "expected a list of positive integers")
        if sorted(modes) != modes:
            raise ValidationError(f"{block.path}.modes", "mode counts must be increasing")
        out["modes"] = list(modes)
        out["tol"] = _number(block, "tol", default=fields["tol"], strict_min=0.0)
        raw = block.get("monotone", fields["monotone"])
        if not isinstance(raw, bool):
            raise ValidationError(f"{block.path}.monotone", "expected true/false")
        out["monotone"] = raw
    elif kind == "gronwall":
        out["order"] = _integer(block, "order", default=min(fields["order"], max_order), minimum=1, maximum=max_order)
        out["max_c"] = _number(block, "max_c", default=fields["max_c"], strict_min=0.0)
    elif kind == "dissipation":
        raw = block.get("max_c", None)
        out["max_c"] = None if raw is None else float(raw)
    elif kind == "monotone_norms":
        out["max_order"] = _integer(block, "max_order", default=min(fields["max_order"], max_order), minimum=0, maximum=max_order)
        out["rtol"] = _number(block, "rtol", default=fields["rtol"], minimum=0.0)
    elif kind == "uniqueness":
        freq = block.get("freq", required=True)
        if not isinstance(freq, list) or len(freq) != n or not all(isinstance(c, int) for c in freq):
            raise ValidationError(f"{block.path}.freq", f"expected a list of {n} integers")
        out["freq"] = list(freq)
        out["amplitude"] = _number(block, "amplitude", default=fields["amplitude"], strict_min=0.0)
        out["expect"] = _choice(block, "expect", ("exact_decay", "nonincreasing"), default=fields["expect"])
        out["rtol"] = _number(block, "rtol", default=fields["rtol"], strict_min=0.0)
    elif kind == "continuity":
        out["t"] = _number(block, "t", required=True, strict_min=0.0)
        shifts = block.get("shifts", required=True)
        if not isinstance(shifts, list) or len(shifts) < 2 or not all(isinstance(s, (int, float)) and s > 0 for s in shifts):
            raise ValidationError(f"{block.path}.shifts", "expected a list of at least 2 positive shifts")
        out["shifts"] = [float(s) for s in shifts]
        out["ratio_tol"] = _number(block, "ratio_tol", default=fields["ratio_tol"], strict_min=0.0)
    elif kind == "weak_residual":
        out["test_modes"] = _integer(block, "test_modes", default=fields["test_modes"], minimum=1)
        out["max_normalized"] = _number(block, "max_normalized", default=fields["max_normalized"], strict_min=0.0)
        raw = block.get("shuffle", fields["shuffle"])
        if not isinstance(raw, bool):
            raise ValidationError(f"{block.path}.shuffle", "expected true/false")
        out["shuffle"] = raw
        out["min_normalized"] = _number(block, "min_normalized", default=fields["min_normalized"], strict_min=0.0)
    elif kind == "mass_balance":
        out["tol_factor"] = _number(block, "tol_factor", default=fields["tol_factor"], strict_min=0.0)
    elif kind == "spectral_decay":
        pass
    block.finish()
    return out


def from_dict(data: dict) -> ExperimentConfig:
    """Validate a plain mapping and fill every default explicitly."""
    root = _Block(data, "config")
    schema = _integer(root, "schema_version", default=SCHEMA_VERSION, minimum=1, maximum=SCHEMA_VERSION)
    name = root.get("name", "experiment")
    if not isinstance(name, str) or not name:
        raise ValidationError("config.name", "expected a non-empty string")
    seed = _integer(root, "seed", default=0, minimum=0)

    problem = root.block("problem", required=True)
    gridb = problem.block("grid", required=True)
    n = _integer(gridb, "n", required=True, minimum=1, maximum=3)
    points = _integer(gridb, "points", required=True, minimum=8)
    if points % 2:
        raise ValidationError("config.problem.grid.points", f"must be even, got {points}")
    length = _number(gridb, "length", default=float(2.0 * np.pi), strict_min=0.0)
    gridb.finish()
    grid_cfg = GridConfig(n=n, points=points, length=length)

    diffusion = _validate_diffusion(problem.block("diffusion"), n)
    forcing = _validate_field(problem.block("forcing"), n, FORCING_KINDS, "forcing", diffusion)
    initial = _validate_field(problem.block("initial"), n, INITIAL_KINDS, "initial data", diffusion)
    horizon = _number(problem, "horizon", default=1.0)
    if not horizon > 0:
        raise ValidationError("config.problem.horizon", f"must be positive, got {horizon}")
    problem.finish()

    solver = root.block("solver")
    method = _choice(solver, "method", METHODS, default=Method.SPLIT_EXPONENTIAL.value)
    if method == Method.EXACT_EXPONENTIAL.value:
        isotropic_diag = diffusion["kind"] == "diagonal" and len(set(diffusion["values"])) == 1
        if diffusion["kind"] != "isotropic" and not isotropic_diag:
            raise ValidationError(
                "config.solver.method",
                "exact_exponential needs constant isotropic diffusion (kind isotropic, or diagonal with equal values)",
            )
    safety = _number(solver, "safety", default=0.5, strict_min=0.0, maximum=1.0)
    max_step_raw = solver.get("max_step", None)
    max_step = None if max_step_raw is None else float(max_step_raw)
    if max_step is not None and not max_step > 0:
        raise ValidationError("config.solver.max_step", "must be positive when given")
    samples = solver.block("samples")
    count = _integer(samples, "count", default=16, minimum=1)
    spacing = _choice(samples, "spacing", ("log", "linear"), default="log")
    start = _number(samples, "start", default=horizon / 100.0, strict_min=0.0)
    stop = _number(samples, "stop", default=horizon, strict_min=0.0)
    samples.finish()
    if not start < stop:
        raise ValidationError("config.solver.samples.start", f"start {start} must be below stop {stop}")
    if stop > horizon * (1 + 1e-12):
        raise ValidationError("config.solver.samples.stop", f"stop {stop} exceeds the horizon {horizon}")
    solver.finish()
    solver_cfg = SolverConfig(
        method=method, safety=safety, max_step=max_step,
        schedule=ScheduleConfig(count=count, spacing=spacing, start=start, stop=stop),
    )

    norms = root.block("norms")
    max_order = _integer(norms, "max_order", default=3, minimum=1, maximum=8)
    norms.finish()

    raw_checks = root.get("checks", [{"kind": "mass_balance"}])
    if not isinstance(raw_checks, list):
        raise ValidationError("config.checks", "expected a list of checks")
    checks = tuple(_validate_check(entry, i, n, max_order) for i, entry in enumerate(raw_checks))

    output = root.block("output")
    directory = output.get("directory", name)
    if not isinstance(directory, str) or not directory:
        raise ValidationError("config.output.directory", "expected a non-empty string")
    formats_raw = output.get("formats", ["csv"])
    if not isinstance(formats_raw, list) or not formats_raw:
        raise ValidationError("config.output.formats", f"expected a non-empty list drawn from {list(FORMATS)}")
    for fmt in formats_raw:
        if fmt not in FORMATS:
            raise ValidationError("config.output.formats", f"unknown format {fmt!r}; choose from {list(FORMATS)}")
    figures = output.get("figures", True)
    if not isinstance(figures, bool):
        raise ValidationError("config.output.figures", "expected true/false")
    output.finish()
    root.finish()

    return ExperimentConfig(
        schema_version=schema,
        name=name,
        seed=seed,
        grid=grid_cfg,
        diffusion=diffusion,
        forcing=forcing,
        initial=initial,
        horizon=horizon,
        solver=solver_cfg,
        norms_max_order=max_order,
        checks=checks,
        output=OutputConfig(directory=directory, formats=tuple(formats_raw), figures=figures),
    )


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate config text in the canonical YAML format."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ParseError(str(exc), line=mark.line + 1, column=mark.column + 1) from exc
        raise ParseError(str(exc)) from exc
    if data is None:
        raise ParseError("config text is empty")
    if not isinstance(data, dict):
        raise ParseError(f"top level must be a mapping, got {type(data).__name__}")
    return from_dict(data)


def _modes_field(grid: GridSpec, modes) -> ScalarField:
    coords = grid.coords()
    scale = 2.0 * np.pi / grid.length
    values = np.zeros(grid.shape)
    for entry in modes:
        phase = np.zeros(grid.shape)
        for axis, component in enumerate(entry["freq"]):
            phase = phase + scale * component * coords[axis]
        wave = np.cos(phase) if entry["phase"] == "cos" else np.sin(phase)
        values += entry["amplitude"] * wave
    return ScalarField.from_values(grid, values)


def _build_field(grid: GridSpec, spec: dict, seed: int, diffusion: DiffusionField) -> ScalarField:
    kind = spec["kind"]
    if kind == "zero":
        return ScalarField.zeros(grid)
    if kind == "constant":
        return ScalarField.from_values(grid, np.full(grid.shape, spec["value"]))
    if kind == "modes":
        return _modes_field(grid, spec["modes"])
    if kind == "rough":
        rough = RoughDataSpec(decay=spec["decay"], seed=seed, amplitude=spec["amplitude"], mean=spec["mean"])
        return rough_data_sampler(rough, grid)
    if kind == "manufactured":
        target = _modes_field(grid, spec["target"]["modes"])
        return manufactured_steady(diffusion, target)
    raise ValidationError("field.kind", f"unhandled kind {kind!r}")


def build_grid(config: ExperimentConfig) -> GridSpec:
    return GridSpec(n=config.grid.n, points=config.grid.points, length=config.grid.length)


def build_diffusion(config: ExperimentConfig, grid: GridSpec) -> DiffusionField:
    spec = config.diffusion
    kind = spec["kind"]
    if kind == "isotropic":
        return isotropic(grid, scale=spec["scale"])
    if kind == "diagonal":
        return diagonal(grid, spec["values"])
    if kind == "sine_1d":
        return sine_1d(grid, base=spec["base"], amplitude=spec["amplitude"])
    return sine_rank1_2d(grid, base=spec["base"], amplitude=spec["amplitude"], rank1=spec["rank1"])


def build_problem(config: ExperimentConfig) -> ProblemSpec:
    grid = build_grid(config)
    diffusion = build_diffusion(config, grid)
    forcing = _build_field(grid, config.forcing, config.seed, diffusion)
    initial = _build_field(grid, config.initial, config.seed, diffusion)
    roughness = None
    if config.initial["kind"] == "rough":
        roughness = RoughDataSpec(
            decay=config.initial["decay"],
            seed=config.seed,
            amplitude=config.initial["amplitude"],
            mean=config.initial["mean"],
        )
    return ProblemSpec(
        grid=grid,
        diffusion=diffusion,
        forcing=forcing,
        initial=initial,
        horizon=config.horizon,
        label=config.name,
        roughness=roughness,
    )
