"""Command-line interface.

Every command prints a machine-readable artifact on stdout (JSON, or CSV
for ``power``) that embeds a run manifest: the command, its full parameter
set, the seed and the library version. ``mhsic replay`` re-executes a
manifest. Logs go to stderr.

Exit codes: 0 success, 2 usage error, 3 data error, 4 degenerate sample.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
import time

from . import __version__
from .causal import discover, enumerate_dags, enumerate_full_dags
from .data import CsvSchema, GeneratorSpec, generate, load_csv
from .estimators import check_estimator_name, compute_statistic, nystrom_size
from .estimators._api import NYSTROM_ESTIMATORS
from .exceptions import DataError, DegenerateSampleError, InvalidInputError, MHSICError
from .kernels import parse_kernel_spec, resolve_specs
from .rng import derive_seed, make_rng
from .testing import TestConfig, default_n_jobs, permutation_test, power_curve

logger = logging.getLogger("mhsic")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DEGENERATE = 0, 2, 3, 4
COMMANDS = ("estimate", "test", "power", "discover")


class UsageError(Exception):
    pass


def _parse_roles(text):
    if text is None:
        return None
    roles = []
    for tok in text.split(","):
        tok = tok.strip()
        roles.append(None if tok in ("-", "") else int(tok))
    return tuple(roles)


def _parse_grid(text):
    grid = [int(tok) for tok in str(text).split(",") if tok.strip()]
    if not grid:
        raise UsageError("--n-grid is empty")
    if min(grid) < 1:
        raise UsageError("--n-grid entries must be positive")
    return grid


def _anm_dag(params):
    """The generating DAG for ``--generate anm``: a seeded fully connected one."""
    dags = enumerate_full_dags(params["M"])
    pick = make_rng(derive_seed(params["seed"], "anm-dag")).integers(len(dags))
    return dags[int(pick)]


def _generator(params):
    kind = params["generate"]
    M = params["M"]
    if kind in ("linear", "dependent") and M != 2:
        raise UsageError("the dependent generator has exactly 2 components")
    dag = _anm_dag(params) if kind == "anm" else None

    def make(n, seed):
        return generate(
            GeneratorSpec(
                kind, n, seed, M=M, d=params["d"], noise_sd=params["noise_sd"],
                dag=dag, f_seed=params["seed"] if dag is not None else None,
            )
        )

    return make, dag


def _load(params):
    """Sample for a command, plus extra output fields describing its origin."""
    if params.get("input"):
        schema = CsvSchema(
            column_roles=_parse_roles(params.get("roles")),
            has_header=params.get("header", False),
            delimiter=params.get("delimiter", ","),
        )
        return load_csv(params["input"], schema), {}
    if not params.get("generate"):
        raise UsageError("give --input or --generate")
    make, dag = _generator(params)
    extra = {"true_dag": dag.to_dict()} if dag is not None else {}
    return make(params["n"], params["seed"]), extra


def _config(params, estimator=None):
    return TestConfig(
        num_permutations=params["permutations"],
        alpha=params["alpha"],
        estimator=estimator or params["estimator"],
        nystrom_schedule=params["nystrom"],
        rng_seed=params["seed"],
        freeze_plan=params["freeze_plan"],
        n_jobs=min(params["threads"], default_n_jobs()),
    )


def _ms(seconds):
    return round(1e3 * seconds, 3)


def cmd_estimate(params):
    sample, extra = _load(params)
    name = check_estimator_name(params["estimator"], sample.M)
    t0 = time.perf_counter()
    specs = resolve_specs(parse_kernel_spec(params["gamma"]), sample)
    t1 = time.perf_counter()
    value = compute_statistic(sample, specs, name, params["nystrom"], seed=params["seed"])
    t2 = time.perf_counter()
    out = {
        "estimator": name,
        "n": sample.n,
        "M": sample.M,
        "n_prime": nystrom_size(params["nystrom"], sample.n) if name in NYSTROM_ESTIMATORS else None,
        "gammas": [s.gamma for s in specs],
        "statistic_squared": value.squared,
        "statistic": value.value,
        "rank_deficient": value.rank_deficient,
        "runtime_ms": _ms(t2 - t1),
        **extra,
    }
    return out, {"bandwidth_ms": _ms(t1 - t0), "statistic_ms": _ms(t2 - t1)}


def cmd_test(params):
    sample, extra = _load(params)
    specs = parse_kernel_spec(params["gamma"])
    result = permutation_test(sample, specs, _config(params))
    out = {
        "n": sample.n,
        "M": sample.M,
        **result.to_dict(include_null=params["include_null"]),
        "runtime_ms": _ms(result.runtime_s),
        **extra,
    }
    return out, {"test_ms": _ms(result.runtime_s)}


def cmd_power(params):
    if not params.get("generate"):
        raise UsageError("power needs --generate")
    grid = _parse_grid(params["n_grid"])
    make, _ = _generator(params)
    specs = parse_kernel_spec(params["gamma"])
    rows = []
    t0 = time.perf_counter()
    for est in [e.strip() for e in params["estimator"].split(",") if e.strip()]:
        for row in power_curve(make, _config(params, est), grid, params["trials"], specs):
            rows.append((est, row))
    return rows, {"power_ms": _ms(time.perf_counter() - t0)}


def cmd_discover(params):
    sample, extra = _load(params)
    if params["dags"] == "all":
        candidates = enumerate_dags(sample.M)
    else:
        candidates = enumerate_full_dags(sample.M)
    t0 = time.perf_counter()
    scores = discover(sample, candidates, _config(params))
    elapsed = time.perf_counter() - t0
    out = {
        "n": sample.n,
        "M": sample.M,
        "estimator": params["estimator"],
        "candidates": len(candidates),
        "best": scores[0].to_dict(),
        "ranking": [s.to_dict() for s in scores],
        "runtime_ms": _ms(elapsed),
        **extra,
    }
    return out, {"discover_ms": _ms(elapsed)}


_HANDLERS = {
    "estimate": cmd_estimate,
    "test": cmd_test,
    "power": cmd_power,
    "discover": cmd_discover,
}


def _add_common(p, permutations=False):
    src = p.add_argument_group("data source")
    src.add_argument("--input", help="CSV file, one row per joint observation")
    src.add_argument("--roles", help="component index per CSV column, '-' skips, e.g. 0,0,1")
    src.add_argument("--header", action="store_true", help="skip the first CSV row")
    src.add_argument("--delimiter", default=",")
    src.add_argument(
        "--generate", choices=["indep", "linear", "dependent", "anm"],
        help="synthetic data instead of --input",
    )
    src.add_argument("--n", type=int, default=1000, help="sample size for --generate")
    src.add_argument("--M", type=int, default=None, help="number of components")
    src.add_argument("--d", type=int, default=1, help="block width for indep")
    src.add_argument("--noise-sd", type=float, default=1.0, help="noise sd for linear")
    p.add_argument("--estimator", default="nmhsic")
    p.add_argument("--nystrom", default="2sqrt", help="landmarks: integer or '<c>sqrt'")
    p.add_argument("--gamma", default="median", help="'median' or 'fixed:<gamma>'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-timings", action="store_true",
                   help="omit wall-clock fields so reruns are byte-identical")
    if permutations:
        p.add_argument("--permutations", type=int, default=250)
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--freeze-plan", action="store_true",
                       help="reuse the observed landmarks in every permutation")
        p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mhsic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mhsic {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="HSIC statistic of one sample")
    _add_common(p)

    p = sub.add_parser("test", help="permutation test of joint independence")
    _add_common(p, permutations=True)
    p.add_argument("--include-null", action="store_true", help="emit the null samples")

    p = sub.add_parser("power", help="power and runtime over a grid of n (CSV)")
    _add_common(p, permutations=True)
    p.add_argument("--n-grid", default="50,100,200")
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("discover", help="rank candidate DAGs under an additive noise model")
    _add_common(p, permutations=True)
    p.add_argument("--dags", choices=["all", "full"], default="all")

    p = sub.add_parser("replay", help="re-run the manifest of an earlier output")
    p.add_argument("manifest", help="JSON or CSV output (or bare manifest); '-' reads stdin")
    return parser


def _params(args) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("verbose", "manifest")}
    defaults = {"estimate": {}, "test": {"include_null": False}}
    for key, value in defaults.get(params["command"], {}).items():
        params.setdefault(key, value)
    if params.get("M") is None:
        params["M"] = 4 if params.get("generate") == "anm" else 2
    return params


def _manifest(params, timings):
    return {
        "command": params["command"],
        "params": {k: v for k, v in sorted(params.items()) if k != "command"},
        "seed": params["seed"],
        "version": __version__,
        "timings": timings,
    }


def _render(params, result, timings) -> str:
    no_timings = params.get("no_timings", False)
    manifest = _manifest(params, None if no_timings else timings)
    if params["command"] == "power":
        buf = io.StringIO()
        buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
        buf.write("estimator,n,power,mean_runtime_ms,trials\n")
        for est, row in result:
            rt = "NA" if no_timings else f"{1e3 * row.mean_runtime_s:.3f}"
            buf.write(f"{est},{row.n},{row.power:.6g},{rt},{row.trials}\n")
        return buf.getvalue()
    if no_timings:
        result = {k: v for k, v in result.items() if k != "runtime_ms"}
    result["manifest"] = manifest
    return json.dumps(result, indent=2, sort_keys=True) + "\n"


def _read_manifest(path):
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if first.startswith("# manifest:"):
        doc = json.loads(first[len("# manifest:"):])
    else:
        doc = json.loads(text)
    doc = doc.get("manifest", doc)
    if doc.get("command") not in COMMANDS or "params" not in doc:
        raise DataError(f"{path} holds no run manifest")
    if doc.get("version") != __version__:
        logger.warning("manifest written by version %s, running %s", doc.get("version"), __version__)
    return {"command": doc["command"], **doc["params"]}


def run(argv=None) -> tuple:
    """Parse ``argv`` and execute; returns ``(exit_code, stdout_text)``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "replay":
            params = _read_manifest(args.manifest)
        else:
            params = _params(args)
        result, timings = _HANDLERS[params["command"]](params)
        return EXIT_OK, _render(params, result, timings)
    except DegenerateSampleError as exc:
        logger.error("degenerate sample: %s", exc)
        return EXIT_DEGENERATE, ""
    except (UsageError, InvalidInputError) as exc:
        logger.error("usage: %s", exc)
        return EXIT_USAGE, ""
    except (DataError, OSError, json.JSONDecodeError) as exc:
        logger.error("data: %s", exc)
        return EXIT_DATA, ""
    except MHSICError as exc:
        logger.error("%s", exc)
        return 1, ""


def main(argv=None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
