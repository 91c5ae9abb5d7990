"""Experiment runner: builds, solves, checks, and persists one experiment.

Outputs land in one directory per run:

* ``series.csv`` (and/or ``series.json``): the sampled series with fixed
  column order  t, norm_0..norm_m, M1, Mm;
* ``report.json``: per-check verdicts with fitted constants, the config
  hash, the file manifest, and step statistics;
* ``config.resolved.yaml``: the fully defaulted config whose SHA-256 is
  the hash in the report;
* ``figures/*.png`` when figures are enabled.

File writes are atomic (write to a temporary name, then rename), and rows
are formatted with shortest round-trip representations, so rerunning an
identical config and seed reproduces the delimited outputs byte for byte.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from . import figures, monitor
from .config import ExperimentConfig, build_problem, canonical_dump, config_hash
from .errors import ParasmoothError
from .evolve import Method, Trajectory, mass_balance, solve
from .galerkin import assemble_system, heat_exact, project, solve_dense
from .grid import ScalarField, sobolev_norm
from .monitor import NormSeries, energy_series, norm_series
from .problems import truncated_seminorm_sum

DEFAULT_OUTPUT_ROOT_VAR = "PARASMOOTH_OUT_ROOT"


@dataclass(frozen=True)
class CheckResult:
    kind: str
    passed: bool
    params: dict
    observed: dict


@dataclass(frozen=True)
class RunReport:
    name: str
    config_hash: str
    passed: bool
    verdicts: Tuple[CheckResult, ...]
    files: Tuple[str, ...]
    wall_seconds: float
    integrator: dict
    output_dir: str
    notes: dict

    @property
    def requested_checks(self) -> int:
        return len(self.verdicts)


def _atomic_write(path: Path, data: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data)
    os.replace(tmp, path)


def _fmt(x: float) -> str:
    return repr(float(x))


def _series_rows(series: NormSeries, energy) -> Tuple[list, list]:
    header = ["t"] + [f"norm_{k}" for k in range(series.max_order + 1)] + ["M1", "Mm"]
    rows = []
    for j, t in enumerate(series.times):
        row = [t] + [series.norms[k, j] for k in range(series.max_order + 1)]
        row += [energy.m1[j], energy.m_weighted[j]]
        rows.append(row)
    return header, rows


def write_series_csv(path: Path, series: NormSeries, energy):
    header, rows = _series_rows(series, energy)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_series_json(path: Path, series: NormSeries, energy):
    header, rows = _series_rows(series, energy)
    payload = {"columns": header, "rows": [[float(v) for v in row] for row in rows]}
    _atomic_write(path, json.dumps(payload, indent=2) + "\n")


def _sanitise(value):
    if isinstance(value, dict):
        return {k: _sanitise(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitise(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_sanitise(v) for v in value.tolist()]
    return value


# ---------------------------------------------------------------------------
# check handlers


def _check_heat_oracle(params, ctx) -> CheckResult:
    worst = 0.0
    for t, state in zip(ctx["trajectory"].sample_times, ctx["trajectory"].states):
        reference = heat_exact(ctx["problem"], t)
        scale = math.sqrt(sobolev_norm(reference, 0))
        err = math.sqrt(sobolev_norm(state - reference, 0)) / max(scale, 1e-300)
        worst = max(worst, err)
    return CheckResult("heat_oracle", worst <= params["rtol"], params, {"max_rel_error": worst})


def _check_galerkin_oracle(params, ctx) -> CheckResult:
    trajectory = ctx["trajectory"]
    gaps = []
    for m in params["modes"]:
        system = assemble_system(ctx["problem"], m)
        dense = solve_dense(system, trajectory.sample_times)
        worst = 0.0
        for row, state in zip(dense, trajectory.states):
            worst = max(worst, float(np.linalg.norm(project(system.basis, state) - row)))
        gaps.append(worst)
    passed = gaps[-1] <= params["tol"]
    if params["monotone"]:
        for a, b in zip(gaps, gaps[1:]):
            if b > a * (1 + 1e-9) + 1e-14:
                passed = False
    return CheckResult("galerkin_oracle", passed, params, {"gaps": gaps})


def _check_rate_fit(params, ctx) -> CheckResult:
    fit = monitor.rate_fit(ctx["series"], params["order"], tuple(params["window"]), predicted=params["expected_slope"])
    passed = fit.r2 >= params["min_r2"]
    if params["expected_slope"] is not None:
        passed = passed and abs(fit.slope - params["expected_slope"]) <= params["slope_tol"]
    observed = {"slope": fit.slope, "r2": fit.r2, "intercept": fit.intercept, "samples": fit.samples}
    return CheckResult("rate_fit", passed, params, observed)


def _check_smoothing_bound(params, ctx) -> CheckResult:
    bound = monitor.check_smoothing_bound(ctx["series"], params["order"])
    observed = {"fitted_ct": bound.fitted_ct, "sup_time": bound.sup_time, "basis": "grid estimate"}
    return CheckResult("smoothing_bound", bound.passed, params, observed)


def _check_gronwall(params, ctx) -> CheckResult:
    series = ctx["series"]
    energy = energy_series(series, params["order"])
    b1 = series.u0_l2_sq + series.f_hk_sq[1]
    bm = series.u0_l2_sq + series.f_hk_sq[params["order"]]
    c_m1 = monitor.check_gronwall(energy, b1, which="m1")
    c_mw = monitor.check_gronwall(energy, bm, which="weighted")
    passed = max(c_m1, c_mw) <= params["max_c"]
    return CheckResult("gronwall", passed, params, {"c_m1": c_m1, "c_weighted": c_mw})


def _check_dissipation(params, ctx) -> CheckResult:
    report = monitor.check_dissipation(ctx["series"], ctx["trajectory"])
    passed = True
    if params["max_c"] is not None:
        passed = max(report.feasible_c) <= params["max_c"]
    observed = {
        "orders": list(report.orders),
        "feasible_c": list(report.feasible_c),
        "max_defect": report.max_defect,
        "basis": "grid estimate",
    }
    return CheckResult("dissipation", passed, params, observed)


def _check_monotone_norms(params, ctx) -> CheckResult:
    series = ctx["series"]
    top = min(params["max_order"], series.max_order)
    rtol = params["rtol"]
    worst_ratio = 0.0
    passed = True
    for k in range(top + 1):
        row = series.norms[k]
        for a, b in zip(row, row[1:]):
            if b > a * (1 + rtol):
                passed = False
            if a > 0:
                worst_ratio = max(worst_ratio, float(b / a))
    return CheckResult("monotone_norms", passed, params, {"max_order": top, "worst_ratio": worst_ratio})


def _check_uniqueness(params, ctx) -> CheckResult:
    config = ctx["config"]
    problem = ctx["problem"]
    grid = problem.grid
    scale = 2.0 * np.pi / grid.length
    coords = grid.coords()
    phase = np.zeros(grid.shape)
    for axis, component in enumerate(params["freq"]):
        phase = phase + scale * component * coords[axis]
    bump = ScalarField.from_values(grid, params["amplitude"] * np.sin(phase))
    perturbed = problem.initial + bump
    report = monitor.check_uniqueness_stability(
        problem,
        perturbed,
        ctx["trajectory"].sample_times,
        method=Method(config.solver.method),
        safety=config.solver.safety,
    )
    observed = {"defects": list(report.defects), "initial_defect": report.initial_defect}
    if params["expect"] == "nonincreasing":
        passed = report.contractive
    else:
        c = problem.diffusion.constant_isotropic_scale()
        if c is None:
            return CheckResult("uniqueness", False, params, {"error": "exact_decay needs constant isotropic diffusion"})
        k2 = sum((component * scale) ** 2 for component in params["freq"])
        worst = 0.0
        for t, defect in zip(report.times, report.defects):
            want = report.initial_defect * math.exp(-c * k2 * t)
            worst = max(worst, abs(defect - want) / max(want, 1e-300))
        observed["max_rel_error"] = worst
        passed = worst <= params["rtol"] and report.contractive
    return CheckResult("uniqueness", passed, params, observed)


def _check_continuity(params, ctx) -> CheckResult:
    config = ctx["config"]
    report = monitor.check_continuity(
        ctx["problem"],
        params["t"],
        params["shifts"],
        method=Method(config.solver.method),
        safety=config.solver.safety,
    )
    tol = params["ratio_tol"]
    ratios = list(report.l2_ratios) + list(report.h1_ratios)
    passed = all(abs(r - 0.5) <= tol for r in ratios)
    observed = {
        "l2_ratios": list(report.l2_ratios),
        "h1_ratios": list(report.h1_ratios),
        "l2_defects": list(report.l2_defects),
        "h1_defects": list(report.h1_defects),
    }
    return CheckResult("continuity", passed, params, observed)


def _check_weak_residual(params, ctx) -> CheckResult:
    trajectory = ctx["trajectory"]
    if params["shuffle"]:
        states = list(trajectory.states)
        shift = max(1, len(states) // 3)
        states = states[shift:] + states[:shift]
        trajectory = Trajectory(
            problem=trajectory.problem,
            sample_times=trajectory.sample_times,
            states=tuple(states),
            stats=trajectory.stats,
        )
    residual = monitor.residual_weak_form(trajectory, params["test_modes"])
    if params["shuffle"]:
        passed = residual >= params["min_normalized"]
    else:
        passed = residual <= params["max_normalized"]
    return CheckResult("weak_residual", passed, params, {"max_normalized_residual": residual})


def _check_mass_balance(params, ctx) -> CheckResult:
    problem = ctx["problem"]
    defect = mass_balance(ctx["trajectory"])
    scale = math.sqrt(sobolev_norm(problem.initial, 0)) + problem.horizon * math.sqrt(sobolev_norm(problem.forcing, 0))
    bound = params["tol_factor"] * max(scale, 1e-300)
    return CheckResult("mass_balance", defect <= bound, params, {"max_defect": defect, "bound": bound})


def _check_spectral_decay(params, ctx) -> CheckResult:
    trajectory = ctx["trajectory"]
    first = monitor.spectral_decay_profile(trajectory.states[0])
    last = monitor.spectral_decay_profile(trajectory.states[-1])
    ok, crossover = monitor.profile_dominates(first, last)
    return CheckResult("spectral_decay", ok, params, {"crossover_shell": crossover})


_HANDLERS = {
    "heat_oracle": _check_heat_oracle,
    "galerkin_oracle": _check_galerkin_oracle,
    "rate_fit": _check_rate_fit,
    "smoothing_bound": _check_smoothing_bound,
    "gronwall": _check_gronwall,
    "dissipation": _check_dissipation,
    "monotone_norms": _check_monotone_norms,
    "uniqueness": _check_uniqueness,
    "continuity": _check_continuity,
    "weak_residual": _check_weak_residual,
    "mass_balance": _check_mass_balance,
    "spectral_decay": _check_spectral_decay,
}


def output_root(override: Optional[str] = None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get(DEFAULT_OUTPUT_ROOT_VAR)
    return Path(env) if env else Path("parasmooth-out")


def _roughness_note(config: ExperimentConfig, problem) -> Optional[dict]:
    if problem.roughness is None:
        return None
    fine = problem.grid
    from .grid import GridSpec

    coarse = GridSpec(n=fine.n, points=fine.points // 2, length=fine.length)
    spec = problem.roughness
    sums = {g.points: truncated_seminorm_sum(spec, g, 1) for g in (coarse, fine)}
    ratio = sums[fine.points] / sums[coarse.points]
    return {
        "statement": (
            "initial data is a trigonometric polynomial at this resolution; roughness is "
            "certified by growth of the truncated first-order seminorm sum under refinement"
        ),
        "first_order_sums": {str(k): v for k, v in sums.items()},
        "ratio_per_doubling": ratio,
        "divergent": bool(ratio > 1.2),
    }


def run_experiment(
    config: ExperimentConfig,
    out_root: Optional[str] = None,
    check_filter: Optional[Tuple[str, ...]] = None,
) -> RunReport:
    """Build, solve, check, and persist one experiment.

    ``check_filter`` restricts execution to the named check kinds (used by
    the rate-only and oracle-only entry points); the report still records
    the requested-vs-executed counts.
    """
    start = time.perf_counter()
    out_dir = output_root(out_root) / config.output.directory
    out_dir.mkdir(parents=True, exist_ok=True)

    problem = build_problem(config)
    times = config.solver.schedule.times()
    trajectory = solve(
        problem,
        times,
        method=Method(config.solver.method),
        safety=config.solver.safety,
        max_step=config.solver.max_step,
    )
    series = norm_series(trajectory, config.norms_max_order)
    energy = energy_series(series)

    ctx = {"config": config, "problem": problem, "trajectory": trajectory, "series": series, "energy": energy}
    checks = config.checks
    if check_filter is not None:
        checks = tuple(c for c in checks if c["kind"] in check_filter)
    verdicts = []
    fits = []
    for entry in checks:
        params = {k: v for k, v in entry.items() if k != "kind"}
        try:
            result = _HANDLERS[entry["kind"]](params, ctx)
        except ParasmoothError as exc:
            # a failing check must not silence the rest of the report
            result = CheckResult(entry["kind"], False, params, {"error": f"{type(exc).__name__}: {exc}"})
        verdicts.append(result)
        if entry["kind"] == "rate_fit" and "slope" in result.observed:
            fits.append(
                monitor.RateFit(
                    order=params["order"],
                    window=tuple(params["window"]),
                    slope=result.observed["slope"],
                    intercept=result.observed["intercept"],
                    r2=result.observed["r2"],
                    predicted=params["expected_slope"],
                    samples=result.observed["samples"],
                )
            )

    files = []
    if "csv" in config.output.formats:
        write_series_csv(out_dir / "series.csv", series, energy)
        files.append("series.csv")
    if "json" in config.output.formats:
        write_series_json(out_dir / "series.json", series, energy)
        files.append("series.json")

    if config.output.figures:
        fig_dir = out_dir / "figures"
        fig_dir.mkdir(exist_ok=True)
        figures.render_norm_series(series, fits, fig_dir / "norms.png")
        figures.render_energy(energy, fig_dir / "energy.png")
        profiles = [
            (trajectory.sample_times[0], monitor.spectral_decay_profile(trajectory.states[0])),
            (trajectory.sample_times[-1], monitor.spectral_decay_profile(trajectory.states[-1])),
        ]
        figures.render_spectrum(profiles, fig_dir / "spectrum.png")
        files += ["figures/norms.png", "figures/energy.png", "figures/spectrum.png"]

    resolved = canonical_dump(config.to_dict())
    _atomic_write(out_dir / "config.resolved.yaml", resolved)
    files.append("config.resolved.yaml")

    notes = {}
    rough = _roughness_note(config, problem)
    if rough is not None:
        notes["roughness"] = rough
    if any(v.kind == "galerkin_oracle" for v in verdicts):
        notes["dense_basis"] = "real trigonometric orthonormal family: constant plus cosine/sine pairs"

    wall = time.perf_counter() - start
    report = RunReport(
        name=config.name,
        config_hash=config_hash(config),
        passed=all(v.passed for v in verdicts),
        verdicts=tuple(verdicts),
        files=tuple(files + ["report.json"]),
        wall_seconds=wall,
        integrator={
            "method": trajectory.stats.method.value,
            "steps": trajectory.stats.steps,
            "max_step": trajectory.stats.max_step,
            "splitting_theta": trajectory.stats.splitting_theta,
            "safety": trajectory.stats.safety,
        },
        output_dir=str(out_dir),
        notes=notes,
    )
    payload = {
        "schema_version": 1,
        "name": report.name,
        "config_hash": report.config_hash,
        "seed": config.seed,
        "passed": report.passed,
        "checks": [
            {"kind": v.kind, "passed": v.passed, "params": _sanitise(v.params), "observed": _sanitise(v.observed)}
            for v in report.verdicts
        ],
        "requested_checks": len(checks),
        "executed_checks": len(report.verdicts),
        "files": list(report.files),
        "timing": {"wall_seconds": report.wall_seconds},
        "integrator": _sanitise(report.integrator),
        "notes": _sanitise(report.notes),
    }
    _atomic_write(out_dir / "report.json", json.dumps(payload, indent=2) + "\n")
    return report
