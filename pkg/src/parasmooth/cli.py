"""Command-line interface.

Verbs:

* ``run <config>``          - run one experiment with all configured checks
* ``verify <suite>``        - run a bundled verification suite
* ``rates <config>``        - run only the rate-fit checks of a config
* ``oracle-check <config>`` - run only the oracle-equivalence checks

Exit codes: 0 all checks passed, 1 at least one check failed,
2 configuration error, 3 runtime error.  The default output root comes
from ``--out``, falling back to the PARASMOOTH_OUT_ROOT environment
variable, then ./parasmooth-out.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import parse_config
from .errors import ParasmoothError, ParseError, UnknownSuite, ValidationError
from .runner import run_experiment
from .suites import SUITES, verify_suite

EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3


def _load_config(path: str, seed, fmt):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    try:
        config = parse_config(text)
    except ParseError as exc:
        where = f" (line {exc.line}, column {exc.column})" if exc.line else ""
        click.echo(f"config parse error{where}: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except ValidationError as exc:
        click.echo(f"config validation error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    if seed is not None or fmt is not None:
        data = config.to_dict()
        if seed is not None:
            data["seed"] = seed
        if fmt is not None:
            data["output"]["formats"] = [fmt]
        from .config import from_dict

        config = from_dict(data)
    return config


def _execute(config, out, check_filter=None):
    try:
        report = run_experiment(config, out_root=out, check_filter=check_filter)
    except (ValidationError, ParseError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except ParasmoothError as exc:
        click.echo(f"runtime error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME_ERROR)
    for verdict in report.verdicts:
        tag = "PASS" if verdict.passed else "FAIL"
        click.echo(f"{tag} {verdict.kind}: {verdict.observed}")
    click.echo(f"report: {report.output_dir}/report.json ({report.wall_seconds:.1f}s)")
    sys.exit(0 if report.passed else EXIT_CHECK_FAILED)


_out_option = click.option("--out", default=None, help="Output root directory (default: $PARASMOOTH_OUT_ROOT or ./parasmooth-out).")
_seed_option = click.option("--seed", default=None, type=int, help="Override the config seed.")
_format_option = click.option("--format", "fmt", default=None, type=click.Choice(["csv", "json"]), help="Restrict series output to one format.")
_threads_option = click.option("--threads", default=1, type=int, help="Parallel criteria for suite runs (single experiments are sequential).")


@click.group()
def main():
    """Parabolic smoothing laboratory: run experiments and verification suites."""


@main.command("run")
@click.argument("config_path", metavar="CONFIG")
@_out_option
@_seed_option
@_format_option
@_threads_option
def run_command(config_path, out, seed, fmt, threads):
    """Run one experiment config with all its checks."""
    config = _load_config(config_path, seed, fmt)
    _execute(config, out)


@main.command("rates")
@click.argument("config_path", metavar="CONFIG")
@_out_option
@_seed_option
@_format_option
@_threads_option
def rates_command(config_path, out, seed, fmt, threads):
    """Run only the rate-fit checks of a config."""
    config = _load_config(config_path, seed, fmt)
    _execute(config, out, check_filter=("rate_fit",))


@main.command("oracle-check")
@click.argument("config_path", metavar="CONFIG")
@_out_option
@_seed_option
@_format_option
@_threads_option
def oracle_command(config_path, out, seed, fmt, threads):
    """Run only the oracle-equivalence checks of a config."""
    config = _load_config(config_path, seed, fmt)
    _execute(config, out, check_filter=("heat_oracle", "galerkin_oracle"))


@main.command("verify")
@click.argument("suite", metavar=f"SUITE ({'|'.join(sorted(SUITES))})")
@_out_option
@_seed_option
@_format_option
@_threads_option
def verify_command(suite, out, seed, fmt, threads):
    """Run a bundled verification suite and print one verdict per criterion."""
    try:
        report = verify_suite(suite, out_root=out, threads=threads, echo=click.echo)
    except UnknownSuite as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except (ValidationError, ParseError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    except ParasmoothError as exc:
        click.echo(f"runtime error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME_ERROR)
    click.echo(f"suite {suite}: {'all criteria passed' if report.passed else 'FAILURES'} ({report.wall_seconds:.1f}s)")
    sys.exit(0 if report.passed else EXIT_CHECK_FAILED)


if __name__ == "__main__":
    main()
