"""Bundled verification suites.

Each criterion below is a self-contained verdict: it builds its configs,
runs them through the standard runner, applies any cross-run comparisons
(refinement stability, oracle slope agreement, byte-identical reruns), and
returns a one-line summary.  The four suites group the criteria:

* ``oracle``    - closed-form and dense-basis solver equivalence (1, 2)
* ``smoothing`` - blow-up-rate ladder and energy boundedness (3, 4)
* ``galerkin``  - decay inequalities, stability, time continuity (5, 6, 7)
* ``weakform``  - integrated-equation residuals, conservation, determinism
                  (8, 9, 10)
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .config import ExperimentConfig, from_dict
from .errors import UnknownSuite
from .runner import RunReport, run_experiment

ROUGH_SEED = 20


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    summary: str
    details: dict
    seconds: float


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    results: Tuple[CriterionResult, ...]
    wall_seconds: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


def _verdict(report: RunReport, kind: str, **match):
    for v in report.verdicts:
        if v.kind != kind:
            continue
        if all(v.params.get(key) == value for key, value in match.items()):
            return v
    raise KeyError(f"no {kind} verdict matching {match} in run {report.name}")


def _smooth_modes():
    return [
        {"freq": [1], "amplitude": 1.0, "phase": "sin"},
        {"freq": [3], "amplitude": 0.5, "phase": "cos"},
        {"freq": [7], "amplitude": 0.25, "phase": "sin"},
    ]


def _heat_config(name: str, method: str, rtol: float) -> ExperimentConfig:
    return from_dict(
        {
            "name": name,
            "seed": 1,
            "problem": {
                "grid": {"n": 1, "points": 64},
                "diffusion": {"kind": "isotropic", "scale": 1.0},
                "forcing": {"kind": "zero"},
                "initial": {"kind": "modes", "modes": _smooth_modes()},
                "horizon": 1.0,
            },
            "solver": {"method": method, "samples": {"count": 12, "spacing": "log", "start": 0.01, "stop": 1.0}},
            "norms": {"max_order": 4},
            "checks": [
                {"kind": "heat_oracle", "rtol": rtol},
                {"kind": "monotone_norms", "max_order": 4},
                {"kind": "mass_balance"},
                {"kind": "spectral_decay"},
            ],
            "output": {"directory": name},
        }
    )


def criterion_1(out_root) -> CriterionResult:
    start = time.perf_counter()
    split = run_experiment(_heat_config("c01-heat-split", "split_exponential", 1e-8), out_root)
    exact = run_experiment(_heat_config("c01-heat-exact", "exact_exponential", 1e-12), out_root)
    err_split = _verdict(split, "heat_oracle").observed["max_rel_error"]
    err_exact = _verdict(exact, "heat_oracle").observed["max_rel_error"]
    passed = split.passed and exact.passed
    summary = f"split max rel err {err_split:.2e} (tol 1e-08), exact {err_exact:.2e} (tol 1e-12)"
    details = {"split": err_split, "exact": err_exact}
    return CriterionResult(1, "heat-kernel oracle equivalence", passed, summary, details, time.perf_counter() - start)


def criterion_2(out_root) -> CriterionResult:
    start = time.perf_counter()
    config = from_dict(
        {
            "name": "c02-dense-oracle",
            "seed": 2,
            "problem": {
                "grid": {"n": 1, "points": 256},
                "diffusion": {"kind": "sine_1d", "base": 1.5, "amplitude": 1.0},
                "forcing": {"kind": "zero"},
                "initial": {
                    "kind": "modes",
                    "modes": [
                        {"freq": [1], "amplitude": 1.0, "phase": "sin"},
                        {"freq": [2], "amplitude": 0.3, "phase": "cos"},
                    ],
                },
                "horizon": 0.1,
            },
            "solver": {
                "method": "split_exponential",
                "samples": {"count": 4, "spacing": "log", "start": 0.02, "stop": 0.1},
            },
            "checks": [
                {"kind": "galerkin_oracle", "modes": [9, 17, 33], "tol": 1e-6, "monotone": True},
                {"kind": "mass_balance"},
            ],
            "output": {"directory": "c02-dense-oracle"},
        }
    )
    report = run_experiment(config, out_root)
    gaps = _verdict(report, "galerkin_oracle").observed["gaps"]
    summary = "projected-vs-dense gaps " + ", ".join(f"m={m}: {gap:.2e}" for m, gap in zip((9, 17, 33), gaps))
    return CriterionResult(
        2, "dense Galerkin oracle equivalence", report.passed, summary, {"gaps": gaps}, time.perf_counter() - start
    )


def _rough_config(
    name: str,
    points: int,
    method: str,
    safety: float = 0.5,
    window=(1e-4, 1e-2),
    count: int = 48,
    max_order: int = 4,
) -> ExperimentConfig:
    lo, hi = window
    return from_dict(
        {
            "name": name,
            "seed": ROUGH_SEED,
            "problem": {
                "grid": {"n": 1, "points": points},
                "diffusion": {"kind": "isotropic", "scale": 1.0},
                "forcing": {"kind": "zero"},
                "initial": {"kind": "rough", "decay": 0.75},
                "horizon": hi,
            },
            "solver": {
                "method": method,
                "safety": safety,
                "samples": {"count": count, "spacing": "log", "start": lo, "stop": hi},
            },
            "norms": {"max_order": max_order},
            "checks": [
                {"kind": "rate_fit", "order": 1, "window": [lo, hi], "expected_slope": -0.75, "slope_tol": 0.12},
                {"kind": "rate_fit", "order": 2, "window": [lo, hi], "expected_slope": -1.75, "slope_tol": 0.12},
                {"kind": "smoothing_bound", "order": 1},
                {"kind": "smoothing_bound", "order": 2},
                {"kind": "smoothing_bound", "order": 3},
                {"kind": "gronwall", "order": 3, "max_c": 5.0},
                {"kind": "monotone_norms", "max_order": 4, "rtol": 1e-12},
                {"kind": "dissipation", "max_c": 1e-8},
                {"kind": "mass_balance"},
                {"kind": "spectral_decay"},
            ],
            "output": {"directory": name},
        }
    )


def _lattice_reference_slope(decay: float, theta: float, points: int, order: int, times: np.ndarray) -> float:
    """Log-log slope of the direct lattice sum of the sampler's modulus law
    under per-mode heat decay; computed without any solver or norm code."""
    xi = np.arange(1.0, points // 2)
    weights = xi ** (2 * order - 2 * decay)
    values = np.array([2.0 * np.sum(weights * np.exp(-2.0 * theta * xi**2 * t)) for t in times])
    x = np.log(times)
    y = np.log(values)
    slope = float(np.polyfit(x, y, 1)[0])
    return slope


def criterion_3(out_root) -> CriterionResult:
    start = time.perf_counter()
    config = _rough_config("c03-rough-rate", 4096, "exact_exponential")
    report = run_experiment(config, out_root)
    times = config.solver.schedule.times()
    details = {}
    passed = report.passed
    for order, analytic in ((1, -0.75), (2, -1.75)):
        fit = _verdict(report, "rate_fit", order=order).observed
        oracle = _lattice_reference_slope(0.75, 1.0, 4096, order, times)
        details[f"k{order}"] = {"slope": fit["slope"], "r2": fit["r2"], "oracle_slope": oracle, "analytic": analytic}
        if abs(fit["slope"] - oracle) > 0.02:
            passed = False
        if abs(oracle - analytic) > 0.12:
            passed = False
    bounds_ok = all(_verdict(report, "smoothing_bound", order=k).passed for k in (1, 2, 3))
    summary = (
        f"slopes k=1: {details['k1']['slope']:.3f} (oracle {details['k1']['oracle_slope']:.3f}), "
        f"k=2: {details['k2']['slope']:.3f} (oracle {details['k2']['oracle_slope']:.3f}); "
        f"bound checks k<=3 {'pass' if bounds_ok else 'FAIL'}"
    )
    return CriterionResult(3, "smoothing-rate ladder", passed, summary, details, time.perf_counter() - start)


def _forced_config(name: str, points: int, safety: float = 0.5) -> ExperimentConfig:
    return from_dict(
        {
            "name": name,
            "seed": ROUGH_SEED,
            "problem": {
                "grid": {"n": 1, "points": points},
                "diffusion": {"kind": "sine_1d", "base": 1.5, "amplitude": 1.0},
                "forcing": {"kind": "manufactured", "target": {"modes": [{"freq": [1], "amplitude": 1.0, "phase": "sin"}]}},
                "initial": {"kind": "rough", "decay": 0.75},
                "horizon": 0.1,
            },
            "solver": {
                "method": "split_exponential",
                "safety": safety,
                "samples": {"count": 32, "spacing": "log", "start": 1e-3, "stop": 0.1},
            },
            "norms": {"max_order": 3},
            "checks": [
                {"kind": "gronwall", "order": 3, "max_c": 5.0},
                {"kind": "smoothing_bound", "order": 1},
                {"kind": "dissipation"},
                {"kind": "mass_balance"},
            ],
            "output": {"directory": name},
        }
    )


def _stability(values) -> float:
    values = [v for v in values if v > 0]
    return max(values) / min(values) if values else 1.0


def criterion_4(out_root) -> CriterionResult:
    start = time.perf_counter()
    base = run_experiment(_rough_config("c04-rough-4096", 4096, "exact_exponential"), out_root)
    fine = run_experiment(_rough_config("c04-rough-8192", 8192, "exact_exponential"), out_root)
    split = run_experiment(_rough_config("c04-rough-split-1024", 1024, "split_exponential", 0.5), out_root)
    split_dt = run_experiment(_rough_config("c04-rough-split-1024-dthalf", 1024, "split_exponential", 0.25), out_root)
    split_fine = run_experiment(_rough_config("c04-rough-split-2048", 2048, "split_exponential", 0.5), out_root)
    forced = run_experiment(_forced_config("c04-forced-256", 256), out_root)
    forced_fine = run_experiment(_forced_config("c04-forced-512", 512), out_root)
    forced_dt = run_experiment(_forced_config("c04-forced-256-dthalf", 256, safety=0.25), out_root)

    gron_const = _verdict(base, "gronwall").observed
    gron_forced = _verdict(forced, "gronwall").observed
    gron_pass = _verdict(base, "gronwall").passed and _verdict(forced, "gronwall").passed

    def ct(report):
        return _verdict(report, "smoothing_bound", order=1).observed["fitted_ct"]

    groups = {
        "exact_refine_n": [ct(base), ct(fine)],
        "split_refine": [ct(split), ct(split_dt), ct(split_fine)],
        "forced_refine": [ct(forced), ct(forced_fine), ct(forced_dt)],
    }
    spreads = {key: _stability(vals) for key, vals in groups.items()}
    stable = all(spread <= 1.25 for spread in spreads.values())
    runs_ok = all(r.passed for r in (base, fine, split, split_dt, split_fine, forced, forced_fine, forced_dt))
    passed = gron_pass and stable and runs_ok
    summary = (
        f"envelope constants <= 5 (const {max(gron_const.values()):.3f}, forced {max(gron_forced.values()):.3f}); "
        f"fitted bound-constant spread {max(spreads.values()):.3f} <= 1.25 under refinement"
    )
    details = {"gronwall_const": gron_const, "gronwall_forced": gron_forced, "ct_groups": groups, "spreads": spreads}
    return CriterionResult(4, "energy functional boundedness", passed, summary, details, time.perf_counter() - start)


def _variable_dissipation_config(name: str, points: int) -> ExperimentConfig:
    return from_dict(
        {
            "name": name,
            "seed": 5,
            "problem": {
                "grid": {"n": 1, "points": points},
                "diffusion": {"kind": "sine_1d", "base": 1.5, "amplitude": 1.0},
                "forcing": {"kind": "zero"},
                "initial": {
                    "kind": "modes",
                    "modes": [
                        {"freq": [1], "amplitude": 1.0, "phase": "sin"},
                        {"freq": [2], "amplitude": 0.3, "phase": "cos"},
                    ],
                },
                "horizon": 0.25,
            },
            "solver": {
                "method": "split_exponential",
                "samples": {"count": 24, "spacing": "log", "start": 0.005, "stop": 0.25},
            },
            "norms": {"max_order": 3},
            "checks": [{"kind": "dissipation"}, {"kind": "mass_balance"}],
            "output": {"directory": name},
        }
    )


def criterion_5(out_root) -> CriterionResult:
    start = time.perf_counter()
    const = run_experiment(_rough_config("c05-const-dissipation", 4096, "exact_exponential"), out_root)
    mono = _verdict(const, "monotone_norms")
    diss_const = _verdict(const, "dissipation")
    var_a = run_experiment(_variable_dissipation_config("c05-sine-dissipation-128", 128), out_root)
    var_b = run_experiment(_variable_dissipation_config("c05-sine-dissipation-256", 256), out_root)
    ca = _verdict(var_a, "dissipation").observed["feasible_c"]
    cb = _verdict(var_b, "dissipation").observed["feasible_c"]
    floor = 1e-6
    stable = all(
        _stability([a, b]) <= 1.2 for a, b in zip(ca, cb) if max(a, b) > floor
    )
    passed = mono.passed and diss_const.passed and stable and var_a.passed and var_b.passed
    summary = (
        f"seminorms k<=4 nonincreasing (worst ratio {mono.observed['worst_ratio']:.12f}); "
        f"constant-coefficient fitted C {max(diss_const.observed['feasible_c']):.2e} (= 0 within tolerance); "
        f"variable-coefficient C stable under N-doubling"
    )
    details = {"const_c": diss_const.observed["feasible_c"], "var_c_128": ca, "var_c_256": cb}
    return CriterionResult(5, "dissipation inequalities", passed, summary, details, time.perf_counter() - start)


def criterion_6(out_root) -> CriterionResult:
    start = time.perf_counter()
    const_cfg = from_dict(
        {
            "name": "c06-uniqueness-const",
            "seed": 6,
            "problem": {
                "grid": {"n": 1, "points": 64},
                "diffusion": {"kind": "isotropic", "scale": 1.0},
                "forcing": {"kind": "zero"},
                "initial": {"kind": "modes", "modes": [{"freq": [1], "amplitude": 1.0, "phase": "sin"},
                                                        {"freq": [3], "amplitude": 0.4, "phase": "cos"}]},
                "horizon": 1.0,
            },
            "solver": {"method": "split_exponential", "samples": {"count": 10, "spacing": "log", "start": 0.05, "stop": 1.0}},
            "checks": [
                {"kind": "uniqueness", "freq": [2], "amplitude": 1e-3, "expect": "exact_decay", "rtol": 1e-8},
                {"kind": "mass_balance"},
            ],
            "output": {"directory": "c06-uniqueness-const"},
        }
    )
    var_cfg = from_dict(
        {
            "name": "c06-uniqueness-sine",
            "seed": 6,
            "problem": {
                "grid": {"n": 1, "points": 128},
                "diffusion": {"kind": "sine_1d", "base": 1.5, "amplitude": 1.0},
                "forcing": {"kind": "manufactured", "target": {"modes": [{"freq": [1], "amplitude": 1.0, "phase": "sin"}]}},
                "initial": {"kind": "modes", "modes": [{"freq": [1], "amplitude": 1.0, "phase": "sin"}]},
                "horizon": 0.25,
            },
            "solver": {"method": "split_exponential", "samples": {"count": 10, "spacing": "log", "start": 0.01, "stop": 0.25}},
            "checks": [
                {"kind": "uniqueness", "freq": [2], "amplitude": 1e-3, "expect": "nonincreasing"},
                {"kind": "mass_balance"},
            ],
            "output": {"directory": "c06-uniqueness-sine"},
        }
    )
    const_rep = run_experiment(const_cfg, out_root)
    var_rep = run_experiment(var_cfg, out_root)
    err = _verdict(const_rep, "uniqueness").observed["max_rel_error"]
    passed = const_rep.passed and var_rep.passed
    summary = f"constant-coefficient defect matches per-mode decay to {err:.2e} (tol 1e-08); variable pair contracts"
    details = {"const_rel_error": err, "variable_defects": _verdict(var_rep, "uniqueness").observed["defects"]}
    return CriterionResult(6, "uniqueness and stability", passed, summary, details, time.perf_counter() - start)


def criterion_7(out_root) -> CriterionResult:
    start = time.perf_counter()
    config = from_dict(
        {
            "name": "c07-continuity-rough",
            "seed": ROUGH_SEED,
            "problem": {
                "grid": {"n": 1, "points": 4096},
                "diffusion": {"kind": "isotropic", "scale": 1.0},
                "forcing": {"kind": "zero"},
                "initial": {"kind": "rough", "decay": 0.75},
                "horizon": 0.002,
            },
            "solver": {
                "method": "exact_exponential",
                "samples": {"count": 8, "spacing": "log", "start": 1e-4, "stop": 0.002},
            },
            "checks": [
                {"kind": "continuity", "t": 1e-3, "shifts": [1.6e-4, 8e-5, 4e-5, 2e-5, 1e-5], "ratio_tol": 0.1},
                {"kind": "mass_balance"},
            ],
            "output": {"directory": "c07-continuity-rough"},
        }
    )
    report = run_experiment(config, out_root)
    obs = _verdict(report, "continuity").observed
    ratios = obs["l2_ratios"] + obs["h1_ratios"]
    worst = max(abs(r - 0.5) for r in ratios)
    summary = f"shift-halving ratios within {worst:.3f} of 1/2 (tol 0.1) at t = 1e-3"
    return CriterionResult(7, "time continuity at t > 0", report.passed, summary, obs, time.perf_counter() - start)


def _weak_config(name: str, shuffle: bool) -> ExperimentConfig:
    checks = [
        {"kind": "weak_residual", "test_modes": 9, "max_normalized": 1e-6, "shuffle": False},
        {"kind": "mass_balance"},
    ]
    if shuffle:
        checks = [{"kind": "weak_residual", "test_modes": 9, "shuffle": True, "min_normalized": 0.1}]
    return from_dict(
        {
            "name": name,
            "seed": 8,
            "problem": {
                "grid": {"n": 1, "points": 256},
                "diffusion": {"kind": "isotropic", "scale": 1.0},
                "forcing": {"kind": "modes", "modes": [{"freq": [1], "amplitude": 0.5, "phase": "cos"}]},
                "initial": {"kind": "modes", "modes": [{"freq": [1], "amplitude": 1.0, "phase": "sin"},
                                                        {"freq": [2], "amplitude": 0.5, "phase": "cos"},
                                                        {"freq": [3], "amplitude": 0.25, "phase": "sin"}]},
                "horizon": 0.054,
            },
            "solver": {
                "method": "exact_exponential",
                "samples": {"count": 41, "spacing": "linear", "start": 0.05, "stop": 0.054},
            },
            "checks": checks,
            "output": {"directory": name},
        }
    )


def criterion_8(out_root) -> CriterionResult:
    start = time.perf_counter()
    clean = run_experiment(_weak_config("c08-weak-clean", shuffle=False), out_root)
    control = run_experiment(_weak_config("c08-weak-shuffled", shuffle=True), out_root)
    r_clean = _verdict(clean, "weak_residual", shuffle=False).observed["max_normalized_residual"]
    r_dirty = _verdict(control, "weak_residual", shuffle=True).observed["max_normalized_residual"]
    passed = clean.passed and control.passed
    summary = f"oracle residual {r_clean:.2e} <= 1e-06; shuffled control {r_dirty:.2e} >= 0.1"
    return CriterionResult(
        8, "weak-form residual", passed, summary, {"clean": r_clean, "shuffled": r_dirty}, time.perf_counter() - start
    )


def criterion_9(out_root) -> CriterionResult:
    start = time.perf_counter()
    stock = [
        _heat_config("c09-heat-split", "split_exponential", 1e-8),
        from_dict(
            {
                "name": "c09-constant-forcing",
                "seed": 9,
                "problem": {
                    "grid": {"n": 1, "points": 64},
                    "diffusion": {"kind": "isotropic", "scale": 1.0},
                    "forcing": {"kind": "constant", "value": 1.0},
                    "initial": {"kind": "zero"},
                    "horizon": 1.0,
                },
                "solver": {"method": "exact_exponential", "samples": {"count": 9, "spacing": "linear", "start": 0.125, "stop": 1.0}},
                "checks": [{"kind": "mass_balance"}],
                "output": {"directory": "c09-constant-forcing"},
            }
        ),
        from_dict(
            {
                "name": "c09-diagonal-2d",
                "seed": 9,
                "problem": {
                    "grid": {"n": 2, "points": 32},
                    "diffusion": {"kind": "diagonal", "values": [2.0, 3.0]},
                    "forcing": {"kind": "zero"},
                    "initial": {"kind": "modes", "modes": [{"freq": [1, 0], "amplitude": 1.0, "phase": "sin"},
                                                            {"freq": [1, 2], "amplitude": 0.5, "phase": "cos"}]},
                    "horizon": 0.2,
                },
                "solver": {"method": "split_exponential", "samples": {"count": 8, "spacing": "log", "start": 0.01, "stop": 0.2}},
                "norms": {"max_order": 2},
                "checks": [{"kind": "mass_balance"}, {"kind": "monotone_norms", "max_order": 2}],
                "output": {"directory": "c09-diagonal-2d"},
            }
        ),
        from_dict(
            {
                "name": "c09-rank1-2d",
                "seed": 9,
                "problem": {
                    "grid": {"n": 2, "points": 32},
                    "diffusion": {"kind": "sine_rank1_2d", "base": 1.5, "amplitude": 0.5, "rank1": 0.5},
                    "forcing": {"kind": "zero"},
                    "initial": {"kind": "modes", "modes": [{"freq": [1, 1], "amplitude": 1.0, "phase": "sin"}]},
                    "horizon": 0.2,
                },
                "solver": {"method": "split_exponential", "samples": {"count": 8, "spacing": "log", "start": 0.01, "stop": 0.2}},
                "norms": {"max_order": 2},
                "checks": [{"kind": "mass_balance"}, {"kind": "dissipation"}],
                "output": {"directory": "c09-rank1-2d"},
            }
        ),
        _forced_config("c09-forced-128", 128),
    ]
    reports = [run_experiment(cfg, out_root) for cfg in stock]
    defects = {}
    for report in reports:
        v = _verdict(report, "mass_balance")
        defects[report.name] = {"defect": v.observed["max_defect"], "bound": v.observed["bound"]}
    passed = all(r.passed for r in reports)
    worst = max(d["defect"] / max(d["bound"], 1e-300) for d in defects.values())
    summary = f"mean-mode defect within bound on {len(reports)} stock problems (worst defect/bound {worst:.2e})"
    return CriterionResult(9, "mass balance", passed, summary, defects, time.perf_counter() - start)


def criterion_10(out_root) -> CriterionResult:
    start = time.perf_counter()
    identical = []
    for stem, builder in (
        ("c10-heat", lambda name: _heat_config(name, "exact_exponential", 1e-12)),
        ("c10-rough", lambda name: _rough_config(name, 1024, "exact_exponential")),
    ):
        paths = []
        for attempt in ("first", "second"):
            config = builder(f"{stem}-{attempt}")
            report = run_experiment(config, out_root)
            paths.append(Path(report.output_dir) / "series.csv")
        identical.append(paths[0].read_bytes() == paths[1].read_bytes())
    passed = all(identical)
    summary = f"rerun series byte-identical: {identical}"
    return CriterionResult(10, "determinism and CLI contract", passed, summary, {"identical": identical}, time.perf_counter() - start)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}

SUITES = {
    "oracle": (1, 2),
    "smoothing": (3, 4),
    "galerkin": (5, 6, 7),
    "weakform": (8, 9, 10),
}


def verify_suite(name: str, out_root: Optional[str] = None, threads: int = 1, echo=print) -> SuiteReport:
    """Run one bundled suite, printing a one-line verdict per criterion."""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; valid suites: {sorted(SUITES)}")
    start = time.perf_counter()
    numbers = SUITES[name]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda k: CRITERIA[k](out_root), numbers))
    else:
        results = [CRITERIA[k](out_root) for k in numbers]
    for result in results:
        tag = "PASS" if result.passed else "FAIL"
        echo(f"{tag} criterion {result.number}: {result.title} - {result.summary} [{result.seconds:.1f}s]")
    return SuiteReport(suite=name, results=tuple(results), wall_seconds=time.perf_counter() - start)
