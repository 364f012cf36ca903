"""Command-line experiment driver.

Runs the requested strategies on one scenario and writes the convergence
CSV, per-attempt traces, best selection matrices and a cost summary into
``--out``. With ``--instance`` the network gains or loses one UE first; if
no ``--warm-start`` matrix is given, the base instance is optimized too and
the changed instance is re-optimized both with and without a warm start
(subdirectories ``base``, ``warm`` and ``cold``).

Failures exit nonzero and print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import selection
from .experiment import adapt_matrix, emit_csv, run_adaptability, run_experiment, transform
from .optimizer import STRATEGIES, check_strategy
from .scenario import ConfigError, load_config

EXIT_USAGE = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="radiostripe", description="AP-UE antenna selection experiments on a radio stripe.")
    p.add_argument("--scenario", default="scenario1", help="preset name (scenario1..scenario4) or INI file path")
    p.add_argument("--strategy", nargs="+", default=list(STRATEGIES),
                   help="strategies, space or comma separated (default: all)")
    p.add_argument("--seed", type=int, default=None, help="master seed (default: the config's)")
    p.add_argument("--attempts", type=int, default=None, help="GA attempts per strategy (default: the config's)")
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--warm-start", dest="warm_start", default=None, help="0/1 text matrix seeding the GA")
    p.add_argument("--instance", choices=("add", "remove"), default=None, help="add or remove one UE first")
    p.add_argument("--paper-fidelity", dest="paper_fidelity", action="store_true",
                   help="use the reference UE coordinates for --instance")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="GROUP.FIELD=VALUE",
                   help="override a config field, e.g. ga.pop_size=50 (repeatable)")
    p.add_argument("-q", "--quiet", action="store_true", help="no progress output")
    return p


def _strategies(raw: list[str]) -> list[str]:
    out = []
    for item in raw:
        out.extend(x for x in item.split(",") if x)
    return [check_strategy(s) for s in out]


def _overrides(cfg, items: list[str]):
    if not items:
        return cfg
    changes = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or "." not in key:
            raise ConfigError(f"--set {item!r}: expected GROUP.FIELD=VALUE")
        group, name = key.split(".", 1)
        obj = getattr(cfg, group, None)
        if obj is None or not hasattr(obj, name):
            raise ConfigError(f"{key}: unknown field")
        current = getattr(obj, name)
        try:
            if isinstance(current, bool):
                value = value.lower() in ("1", "true", "yes", "on")
            elif isinstance(current, int):
                value = int(value)
            elif isinstance(current, float):
                value = float(value)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {value!r}") from None
        changes[key] = value
    return cfg.replace(**changes)


def _progress(quiet: bool):
    if quiet:
        return None

    def report(strategy, attempt, trace):
        print(f"{strategy} attempt {attempt}: {trace.n_loops} loops, sum SE {trace.true_se[-1]:.3f}",
              file=sys.stderr, flush=True)

    return report


def run(argv=None) -> dict:
    args = build_parser().parse_args(argv)
    strategies = _strategies(args.strategy)
    if args.seed is not None and args.seed < 0:
        raise UsageError("--seed must be a nonnegative integer")
    if args.attempts is not None and args.attempts < 1:
        raise UsageError("--attempts must be >= 1")
    if args.paper_fidelity and args.instance is None:
        raise UsageError("--paper-fidelity needs --instance")
    cfg = _overrides(load_config(args.scenario, args.seed), args.overrides)
    out = Path(args.out)
    progress = _progress(args.quiet)
    g = cfg.geometry

    warm = None
    if args.warm_start is not None:
        warm = selection.load(args.warm_start, width=g.n_aps * g.n_antennas)
        if warm.shape[0] != g.n_ues:
            raise ConfigError(f"{args.warm_start}: has {warm.shape[0]} rows, the base network has {g.n_ues} UEs")

    if args.instance is None:
        result = run_experiment(cfg, strategies, args.attempts, warm, progress=progress)
        emit_csv(result, out)
        return {"status": "ok", "out": str(out), "strategies": strategies}

    if warm is not None:
        new_cfg, record = transform(cfg, args.instance, args.paper_fidelity)
        result = run_experiment(new_cfg, strategies, args.attempts, adapt_matrix(warm, record), progress=progress)
        emit_csv(result, out)
        return {"status": "ok", "out": str(out), "strategies": strategies, "ue_index": record.ue_index}

    study = run_adaptability(cfg, args.instance, strategies, args.attempts, args.paper_fidelity, progress=progress)
    emit_csv(study.base, out / "base")
    emit_csv(study.warm, out / "warm")
    emit_csv(study.cold, out / "cold")
    return {"status": "ok", "out": str(out), "strategies": strategies, "ue_index": study.record.ue_index}


def main(argv=None) -> int:
    try:
        info = run(argv)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except (OSError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_FAILURE
    print(json.dumps(info))
    return 0


if __name__ == "__main__":
    sys.exit(main())
