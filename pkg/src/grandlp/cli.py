"""Command line interface.

Subcommands::

    grandlp norm CONFIG          modular and Luxemburg norm
    grandlp grand-norm CONFIG    grand variable exponent norm
    grandlp membership CONFIG    closure (vanishing) subspace test
    grandlp verify CONFIG        full theorem run; writes report.json, convergence.csv, convergence.svg

Exit codes: 0 success, 1 a theorem check failed, 2 invalid configuration or
failed hypothesis. Errors are printed to stderr as one JSON line.
"""

from __future__ import annotations

import json
import sys

import click

from . import config as cfg
from .ergodic import default_contraction_grid, run_theorem
from .errors import ConvergenceError, DomainError, HypothesisError
from .norms import default_vanishing_sequence, grand_norm, luxemburg_norm, modular, vanishing_limit
from .report import convergence_csv, render_convergence_svg, to_json

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2


def _fail(kind: str, name: str, message: str) -> int:
    key = "check" if kind == "hypothesis" else "field"
    click.echo(json.dumps({"error": kind, key: name, "message": message}, sort_keys=True), err=True)
    return EXIT_CONFIG


def _load(path, overrides: dict):
    doc = cfg.load(path)
    for k, v in overrides.items():
        if v is None:
            continue
        if k == "out_dir":
            doc.setdefault("output", {})["dir"] = v
        elif k == "no_svg":
            if v:
                doc.setdefault("output", {})["svg"] = None
        else:
            doc[k] = v
    return cfg.build(doc, base_dir=None)


def _need_theta(ex):
    if ex.theta is None:
        raise cfg.ConfigError("theta", "required for this command")
    return ex.theta


def run_experiment(config_path, theta=None, n_schedule=None, out_dir=None, no_svg=False, seed=None) -> int:
    """Run the full theorem check for a config file and write the artifacts."""
    try:
        ex = _load(config_path, {"theta": theta, "n_schedule": n_schedule, "out_dir": out_dir,
                                 "no_svg": no_svg, "seed": seed})
        if ex.transformation is None:
            raise cfg.ConfigError("transformation", "required for verify")
        theta_ = _need_theta(ex)
        pminus = ex.exponent.pminus
        contraction = ex.contraction_eps
        if isinstance(contraction, int):
            contraction = default_contraction_grid(pminus, contraction)
        report = run_theorem(
            ex.space, ex.function, ex.transformation, ex.exponent, theta_,
            n_schedule=ex.n_schedule, eps_grid=contraction, grid=ex.grid,
            vanishing_eps=default_vanishing_sequence(pminus, ex.vanishing_terms),
        )
    except cfg.ConfigError as exc:
        return _fail("config", exc.field, exc.message)
    except HypothesisError as exc:
        return _fail("hypothesis", exc.check, str(exc))
    except (DomainError, ConvergenceError) as exc:
        return _fail("config", "config", str(exc))

    ex.out_dir.mkdir(parents=True, exist_ok=True)
    doc = report.as_dict()
    # the effective experiment; where the files go is not part of it
    doc["config"] = {k: v for k, v in ex.raw.items() if k != "output"}
    (ex.out_dir / ex.report_name).write_text(to_json(doc))
    (ex.out_dir / ex.csv_name).write_text(convergence_csv(report.part_iii.rows))
    if ex.svg_name and len(report.part_iii.rows) >= 2:
        finite = all(r.diff_grand_norm != float("inf") for r in report.part_iii.rows)
        if finite:
            (ex.out_dir / ex.svg_name).write_text(render_convergence_svg(report.part_iii.rows))
    status = "PASS" if report.passed else "FAIL"
    click.echo(f"{status} {ex.out_dir / ex.report_name}")
    for v in report.violations:
        click.echo(f"  {v}")
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _schedule(ctx, param, value):
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter("expected comma-separated integers")


config_arg = click.argument("config_path", type=click.Path(dir_okay=False))
theta_opt = click.option("--theta", type=float, default=None, help="Override theta.")
seed_opt = click.option("--seed", type=int, default=None, help="Override the random seed.")


@click.group()
def main():
    """Variable exponent and grand Lebesgue norms, and ergodic theorem checks."""


@main.command()
@config_arg
@click.option("--eps", "eps", type=float, default=0.0, show_default=True, help="Exponent shift.")
@seed_opt
def norm(config_path, eps, seed):
    """Modular and Luxemburg norm of the configured function."""
    try:
        ex = _load(config_path, {"seed": seed})
        out = {
            "eps": eps,
            "modular": modular(ex.space, ex.function, ex.exponent, eps),
            "luxemburg_norm": luxemburg_norm(ex.space, ex.function, ex.exponent, eps),
            "pminus": ex.exponent.pminus,
            "pplus": ex.exponent.pplus,
        }
    except cfg.ConfigError as exc:
        sys.exit(_fail("config", exc.field, exc.message))
    except (DomainError, ConvergenceError) as exc:
        sys.exit(_fail("config", "config", str(exc)))
    click.echo(to_json(out), nl=False)


@main.command("grand-norm")
@config_arg
@theta_opt
@seed_opt
@click.option("--samples/--no-samples", default=False, help="Include every evaluated shift.")
def grand_norm_cmd(config_path, theta, seed, samples):
    """Grand variable exponent norm of the configured function."""
    try:
        ex = _load(config_path, {"theta": theta, "seed": seed})
        est = grand_norm(ex.space, ex.function, ex.exponent, _need_theta(ex), ex.grid)
    except cfg.ConfigError as exc:
        sys.exit(_fail("config", exc.field, exc.message))
    except (DomainError, ConvergenceError) as exc:
        sys.exit(_fail("config", "config", str(exc)))
    out = est.as_dict()
    if not samples:
        out.pop("samples")
    click.echo(to_json(out), nl=False)


@main.command()
@config_arg
@theta_opt
@seed_opt
def membership(config_path, theta, seed):
    """Test membership in the vanishing (closure) subspace."""
    try:
        ex = _load(config_path, {"theta": theta, "seed": seed})
        seq = default_vanishing_sequence(ex.exponent.pminus, ex.vanishing_terms)
        verdict = vanishing_limit(ex.space, ex.function, ex.exponent, _need_theta(ex), seq)
    except cfg.ConfigError as exc:
        sys.exit(_fail("config", exc.field, exc.message))
    except (DomainError, ConvergenceError) as exc:
        sys.exit(_fail("config", "config", str(exc)))
    click.echo(to_json(verdict.as_dict()), nl=False)


@main.command()
@config_arg
@theta_opt
@seed_opt
@click.option("--n-schedule", callback=_schedule, default=None, help="Comma-separated n values.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--no-svg", is_flag=True, help="Skip the SVG plot.")
def verify(config_path, theta, seed, n_schedule, out_dir, no_svg):
    """Run every theorem check and write the report files."""
    sys.exit(run_experiment(config_path, theta, n_schedule, out_dir, no_svg, seed))


if __name__ == "__main__":
    main()
