"""Acceptance gate: the ten bundled verification criteria.

Each test runs one criterion end to end at its stated tolerance and prints
one PASS/FAIL line (visible with ``pytest -s`` or on failure).  The same
criterion implementations back ``parasmooth verify <suite>``.
"""

import pytest
from click.testing import CliRunner

from parasmooth import suites
from parasmooth.cli import main


@pytest.fixture(scope="module")
def out_root(tmp_path_factory):
    return str(tmp_path_factory.mktemp("acceptance"))


def _report(result):
    tag = "PASS" if result.passed else "FAIL"
    print(f"\n{tag} criterion {result.number}: {result.title} - {result.summary} [{result.seconds:.1f}s]")
    return result


def test_criterion_01_heat_kernel_oracle(out_root):
    result = _report(suites.criterion_1(out_root))
    assert result.details["split"] <= 1e-8
    assert result.details["exact"] <= 1e-12
    assert result.passed


def test_criterion_02_dense_galerkin_oracle(out_root):
    result = _report(suites.criterion_2(out_root))
    gaps = result.details["gaps"]
    assert gaps[-1] <= 1e-6
    assert gaps[0] >= gaps[1] >= gaps[2]
    assert result.passed


def test_criterion_03_smoothing_rate_ladder(out_root):
    result = _report(suites.criterion_3(out_root))
    for order, analytic in ((1, -0.75), (2, -1.75)):
        info = result.details[f"k{order}"]
        assert abs(info["slope"] - analytic) <= 0.12
        assert info["r2"] >= 0.98
        assert abs(info["slope"] - info["oracle_slope"]) <= 0.02
    assert result.passed


def test_criterion_04_energy_boundedness(out_root):
    result = _report(suites.criterion_4(out_root))
    assert max(result.details["gronwall_const"].values()) <= 5.0
    assert max(result.details["gronwall_forced"].values()) <= 5.0
    assert max(result.details["spreads"].values()) <= 1.25
    assert result.passed


def test_criterion_05_dissipation_inequalities(out_root):
    result = _report(suites.criterion_5(out_root))
    assert max(result.details["const_c"]) <= 1e-8
    assert result.passed


def test_criterion_06_uniqueness_stability(out_root):
    result = _report(suites.criterion_6(out_root))
    assert result.details["const_rel_error"] <= 1e-8
    defects = result.details["variable_defects"]
    for a, b in zip(defects, defects[1:]):
        assert b <= a * (1 + 1e-12)
    assert result.passed


def test_criterion_07_time_continuity(out_root):
    result = _report(suites.criterion_7(out_root))
    for ratio in result.details["l2_ratios"] + result.details["h1_ratios"]:
        assert abs(ratio - 0.5) <= 0.1
    assert result.passed


def test_criterion_08_weak_form_residual(out_root):
    result = _report(suites.criterion_8(out_root))
    assert result.details["clean"] <= 1e-6
    assert result.details["shuffled"] >= 0.1
    assert result.passed


def test_criterion_09_mass_balance(out_root):
    result = _report(suites.criterion_9(out_root))
    for name, info in result.details.items():
        assert info["defect"] <= info["bound"], name
    assert result.passed


def test_criterion_10_determinism_and_cli(out_root, tmp_path):
    result = _report(suites.criterion_10(out_root))
    assert all(result.details["identical"])
    assert result.passed

    runner = CliRunner()
    ok = runner.invoke(main, ["verify", "oracle", "--out", str(tmp_path / "verify-out")])
    assert ok.exit_code == 0, ok.output
    assert "PASS criterion 1" in ok.output
    assert "PASS criterion 2" in ok.output

    bad = runner.invoke(main, ["verify", "nonsense", "--out", str(tmp_path / "verify-bad")])
    assert bad.exit_code == 2
