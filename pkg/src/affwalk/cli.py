"""Command line entry point.

Every experiment writes <id>.csv (one row per replica or grid point),
<id>.jsonl when it produces a measure, and <id>.summary.json. Exit codes:
0 when all statistics pass, 2 on an acceptance failure, 1 on usage errors.
"""

from __future__ import annotations

import inspect
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .experiments import REGISTRY, ExperimentResult

SCHEMA_VERSION = 1
CSV_VERSION = "affwalk.csv/1"


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise click.UsageError(f"cannot read config {path}: {e}")
    if not isinstance(cfg, dict):
        raise click.UsageError("config must be a JSON object")
    return cfg


def _resolve(experiment: str, flags: dict) -> dict:
    """Experiment defaults, then the config file, then explicit flags."""
    fn = REGISTRY[experiment]
    sig = inspect.signature(fn)
    params = {k: v.default for k, v in sig.parameters.items() if v.default is not inspect.Parameter.empty}
    cfg = _load_config(flags.get("config"))
    cfg.pop("experiment", None)
    unknown = set(cfg) - set(params) - {"out"}
    if unknown:
        raise click.UsageError(f"unknown config keys for {experiment}: {sorted(unknown)}")
    params.update(cfg)
    # flags default to None, so any value here was given explicitly
    for name, value in flags.items():
        if name == "config" or value is None:
            continue
        if name not in params and name != "out":
            raise click.UsageError(f"--{name.replace('_', '-')} does not apply to {experiment}")
        params[name] = value
    _validate(params)
    return params


def _validate(params: dict) -> None:
    if "replicas" in params and int(params["replicas"]) < 1:
        raise click.UsageError("replicas must be >= 1")
    if "step" in params and not (0 < float(params["step"]) <= 0.5):
        raise click.UsageError("step must lie in (0, 0.5]")
    if "threads" in params and int(params["threads"]) < 1:
        raise click.UsageError("threads must be >= 1")
    if "seed" in params and not (0 <= int(params["seed"]) < 2**64):
        raise click.UsageError("seed must be a 64-bit unsigned integer")


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def write_outputs(res: ExperimentResult, out: Path) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    csv = out / f"{res.experiment}.csv"
    rows = np.asarray(res.rows)
    fmt = "%d" if rows.dtype.kind in "iu" else "%.17g"
    np.savetxt(csv, rows.reshape(len(rows), -1), fmt=fmt, delimiter=",", header=",".join(res.columns), comments="")
    files["csv"] = csv.name
    if res.measures:
        jl = out / f"{res.experiment}.jsonl"
        jl.write_text("".join(json.dumps(_jsonable(m), sort_keys=True) + "\n" for m in res.measures))
        files["jsonl"] = jl.name
    summary = {
        "schema_version": SCHEMA_VERSION,
        "csv_format": CSV_VERSION,
        "tool_version": __version__,
        "experiment": res.experiment,
        "params": _jsonable({k: v for k, v in res.params.items() if k != "threads"}),
        "statistics": _jsonable([s.to_dict() for s in res.stats]),
        "passed": res.passed,
        "files": files,
    }
    path = out / f"{res.experiment}.summary.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def execute(experiment: str, flags: dict) -> int:
    if experiment not in REGISTRY:
        raise click.UsageError(f"unknown experiment {experiment!r}; choose from {sorted(REGISTRY)}")
    params = _resolve(experiment, flags)
    out = Path(params.pop("out", None) or "out")
    try:
        res = REGISTRY[experiment](**params)
    except ValueError as e:
        raise click.UsageError(str(e))
    summary = write_outputs(res, out)
    for s in summary["statistics"]:
        click.echo(f"{'PASS' if s['passed'] else 'FAIL'} {s['name']} = {s['value']} ({s['op']} {s['threshold']})")
    click.echo(f"wrote {out / (experiment + '.summary.json')}")
    return 0 if res.passed else 2


def common(f):
    opts = [
        click.option("--seed", type=int, default=None, help="64-bit seed of every random stream."),
        click.option("--replicas", type=int, default=None, help="Number of Monte Carlo replicas."),
        click.option("--step", type=float, default=None, help="Grid step (path time or sheet s-step)."),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory [out]."),
        click.option("--threads", type=int, default=None, help="Worker threads; never changes results."),
        click.option("--config", type=click.Path(dir_okay=False), default=None, help="JSON config; flags win."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _floats(text):
    if text is None:
        return None
    return tuple(float(v) for v in str(text).split(",") if v)


def _ints(text):
    if text is None:
        return None
    return tuple(int(v) for v in str(text).split(",") if v)


@click.group()
@click.version_option(__version__)
def cli():
    """Random walks, Pitman transforms and fusion for A1 affine data."""


@cli.command()
@common
@click.option("--n", type=int, default=None, help="Number of steps [200].")
@click.option("--q", type=float, default=None, help="Drift parameter q > 0 [1].")
def sl2(**flags):
    """Rescaled sl2 Doob chain against the Bessel(3) entrance law."""
    return execute("sl2-clt", flags)


@cli.command()
@common
@click.option("--n", type=int, default=None, help="Steps per unit time [100].")
@click.option("--t", type=float, default=None, help="Observation time [1].")
def affine(**flags):
    """Rescaled affine chain against the conditioned space-time law."""
    return execute("affine-clt", flags)


@cli.command()
@common
@click.option("--mode", type=click.Choice(["lambda", "interval", "gap"]), default="lambda", show_default=True)
@click.option("--t", type=float, default=None, help="Observation time [1].")
@click.option("--n-stages", type=int, default=None, help="Pitman stages before the Levy cap [40].")
@click.option("--ns", default=None, help="Comma list of stages for the gap mode.")
@click.option("--grid", default=None, help="Gap mode grid: 'uniform' or 'log:<lo>:<points>'.")
def pitman(mode, **flags):
    """Capped Pitman iteration, its time inversion, or the iterate gap."""
    flags["ns"] = _ints(flags.get("ns"))
    return execute(f"pitman-{mode}", flags)


@cli.command()
@common
@click.option("--mode", type=click.Choice(["sheet", "kf", "horn"]), default="sheet", show_default=True)
@click.option("--t", type=float, default=None, help="Sheet level [1].")
@click.option("--theta", type=float, default=None)
@click.option("--tau", type=float, default=None)
@click.option("--center", type=float, default=None, help="Radial bin center.")
@click.option("--width", type=float, default=None, help="Radial bin width.")
@click.option("--x-coords", default=None, help="Comma list of X coordinates.")
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
def radial(mode, **flags):
    """SU(2) radial parts: Brownian sheet, conditional Laplace transform, Horn."""
    flags["x_coords"] = _floats(flags.get("x_coords"))
    return execute(f"radial-{mode}", flags)


@cli.command()
@common
@click.option("--mode", type=click.Choice(["verlinde", "bkf", "spectrum", "doob", "horn"]), default="verlinde", show_default=True)
@click.option("--k", type=int, default=None, help="Level.")
@click.option("--k-max", type=int, default=None, help="Largest level scanned.")
@click.option("--p-max", type=int, default=None, help="Largest tensor power.")
@click.option("--d", type=int, default=None, help="Rank plus one (type A).")
@click.option("--N", "N", type=int, default=None, help="Circle size for the spectrum mode.")
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
def fusion(mode, **flags):
    """Exact fusion coefficients, alcove chains and Horn measures."""
    return execute(f"fusion-{mode}", flags)


@cli.command("fusion-verlinde")
@common
@click.option("--k", type=int, default=None, help="Level [6].")
def fusion_verlinde(**flags):
    """Verlinde residual and the SU(2) closed rule at level k."""
    return execute("fusion-verlinde", flags)


@cli.command()
@common
@click.option("--t", type=float, default=None, help="Observation time [1].")
@click.option("--n-chain", type=int, default=None, help="Chain steps per unit time [100].")
@click.option("--n-stages", type=int, default=None, help="Pitman stages [40].")
def triangle(**flags):
    """Pitman limit, affine chain and sheet radial part, pairwise KS."""
    return execute("triangle", flags)


@cli.command()
@common
@click.option("--experiment", required=True, help="Experiment id, e.g. triangle or fusion-bkf.")
def run(experiment, **flags):
    """Run any registered experiment; parameters come from --config."""
    return execute(experiment, flags)


@cli.command()
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default="out", show_default=True)
@click.option("--only", default=None, help="Comma list of criterion numbers.")
def verify(seed, threads, out, only):
    """Run the acceptance criteria and write verify.summary.json."""
    from .acceptance import verify_all

    sel = _ints(only)
    results = verify_all(seed=seed, threads=threads, only=sel, progress=click.echo)
    if not results:
        raise click.UsageError("no criterion selected")
    report = {
        "schema_version": SCHEMA_VERSION,
        "csv_format": CSV_VERSION,
        "tool_version": __version__,
        "experiment": "verify",
        "params": {"seed": seed},
        "statistics": _jsonable([dict(s.to_dict(), criterion=r.number) for r in results for s in r.stats]),
        "passed": all(r.passed for r in results),
        "files": {},
        "criteria": _jsonable([r.to_dict() for r in results]),
    }
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    (p / "verify.summary.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    n_pass = sum(r.passed for r in results)
    click.echo(f"{n_pass}/{len(results)} criteria passed")
    return 0 if report["passed"] else 2


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="affwalk", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
