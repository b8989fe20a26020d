"""``pluri verify <suite>``: run a verification suite and write a JSON report.

Exit status is 0 when every record passes, 1 otherwise, 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import flower as fl
from . import quad_systems as qs
from . import variational as var
from .forms import FAMILIES, get_family
from .io import load_field, load_flowers, write_json

BUILTIN_FAMILIES = ("cross-ratio", "mixed")
SUITES = (
    "octahedron-consistency",
    "closedness",
    "pushforward-identity",
    "quad-consistency",
    "tetrahedron-property",
    "three-leg",
    "quad-implies-corner",
    "flip",
    "flower-decompose",
    "el-sum",
    "all",
)


class ConfigError(Exception):
    pass


def _families(args):
    if args.family is None:
        return list(BUILTIN_FAMILIES)
    try:
        return [get_family(args.family).name]
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None


def _systems(args):
    if args.system is None:
        return list(qs.SYSTEMS)
    key = args.system.replace("-", "_")
    if key not in qs.SYSTEMS:
        raise ConfigError(f"unknown system {args.system!r}; choose from {sorted(qs.SYSTEMS)}")
    return [key]


def _corpus(args):
    if args.flower_file:
        return load_flowers(args.flower_file)
    if args.corpus != "builtin":
        raise ConfigError(f"unknown corpus {args.corpus!r}")
    return fl.builtin_corpus(seed=args.seed)


def _tol(args, default):
    return args.tol if args.tol is not None else default


def run_suite(suite: str, args) -> list:
    """Reports (objects with ``to_dict`` and pass status) for one suite."""
    out = []
    if suite == "octahedron-consistency":
        for f in _families(args):
            out.append(var.octahedron_consistency_check(f, args.trials, args.seed))
    elif suite == "closedness":
        for f in _families(args):
            out.append(var.closedness_check(f, args.trials, args.seed, tol=_tol(args, 1e-9)))
    elif suite == "pushforward-identity":
        dropped = [args.dropped] if args.dropped is not None else [0, 1, 2, 3]
        for f in _families(args):
            for i in dropped:
                out.append(var.pushforward_identity_check(f, i, args.trials, args.seed, tol=_tol(args, 1e-12)))
    elif suite == "quad-consistency":
        for s in _systems(args):
            out.append(qs.consistency_trials(s, args.trials, args.seed, exact=args.rational, tol=_tol(args, 1e-9)))
    elif suite == "tetrahedron-property":
        for s in _systems(args):
            out.append(qs.tetrahedron_trials(s, args.trials, args.seed, args.perturbations, tol=_tol(args, 1e-9)))
    elif suite == "three-leg":
        for s in _systems(args):
            out.append(qs.three_leg_difference_check(s, args.trials, args.seed, tol=_tol(args, 1e-10)))
    elif suite == "quad-implies-corner":
        for s in _systems(args):
            out.append(qs.quad_solutions_satisfy_corners(s, args.extent, args.trials, args.seed,
                                                         tol=_tol(args, 1e-9)))
        out.append(_Witness(qs.non_inclusion_witness(args.seed)))
    elif suite == "flip":
        for s in _systems(args):
            out.append(qs.flip_trials(s, args.trials, args.seed, tol=_tol(args, 1e-10)))
    elif suite == "flower-decompose":
        out.append(fl.decomposition_suite(_corpus(args)))
    elif suite == "el-sum":
        corpus = _corpus(args)
        if args.field_file:
            out.extend(_el_sum_with_field(args, corpus))
        else:
            for f in _families(args):
                out.append(fl.el_sum_suite(f, corpus, args.seed, tol=_tol(args, 1e-9)))
    else:
        raise ConfigError(f"unknown suite {suite!r}")
    return out


class _Witness:
    def __init__(self, rec):
        self.rec = rec
        self.all_pass = rec["status"] == "PASS"

    def to_dict(self):
        return {"suite": "non-inclusion-witness", **self.rec}


class _Records:
    def __init__(self, suite, config, records):
        self.suite, self.config, self.records = suite, config, records
        self.all_pass = bool(records) and all(r["status"] == "PASS" for r in records)

    def to_dict(self):
        return {"suite": self.suite, "config": self.config, "records": self.records}


def _el_sum_with_field(args, corpus):
    from .sampling import rng_for, sample_alpha

    field = load_field(args.field_file)
    out = []
    for f in _families(args):
        records = []
        for k, (name, flower) in enumerate(corpus):
            alpha = sample_alpha(rng_for(args.seed, k), range(flower.manifold.ambient_dim + 1))
            rec = fl.el_sum_check(f, flower, field, alpha, args.seed, tol=_tol(args, 1e-9))
            records.append({"flower": name, **rec})
        out.append(_Records("el-sum", {"family": f, "seed": args.seed, "field_file": str(args.field_file)}, records))
    return out


def _passed(report) -> bool:
    ok = getattr(report, "all_pass", None)
    return bool(ok)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pluri", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--family", help=f"one of {sorted(FAMILIES)} (default: the built-in pair)")
    v.add_argument("--system", help=f"one of {sorted(qs.SYSTEMS)} (default: all)")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=None, help="default: $PLURI_SEED, else 0")
    v.add_argument("--output", "-o", help="report path (default: stdout)")
    v.add_argument("--rational", action="store_true", help="exact rational quad propagation")
    v.add_argument("--corpus", default="builtin")
    v.add_argument("--flower-file", help="JSON flower(s) to use instead of the corpus")
    v.add_argument("--field-file", help="JSON field for el-sum")
    v.add_argument("--dropped", type=int, choices=range(4), help="projection index for pushforward-identity")
    v.add_argument("--extent", type=int, default=2, help="patch extent for quad-implies-corner")
    v.add_argument("--perturbations", type=int, default=10)
    v.add_argument("--tol", type=float, help="override the suite's tolerance")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        env = os.environ.get("PLURI_SEED")
        try:
            args.seed = int(env) if env else 0
        except ValueError:
            print(f"pluri: PLURI_SEED must be an integer, got {env!r}", file=sys.stderr)
            return 2
    if args.trials < 1 or args.extent < 1:
        print("pluri: --trials and --extent must be >= 1", file=sys.stderr)
        return 2
    suites = [s for s in SUITES if s != "all"] if args.suite == "all" else [args.suite]
    try:
        reports = [r for s in suites for r in run_suite(s, args)]
    except ConfigError as exc:
        print(f"pluri: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"pluri: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    ok = all(_passed(r) for r in reports)
    config = {k: getattr(args, k) for k in sorted(vars(args)) if k != "output"}
    payload = {"config": config, "status": "PASS" if ok else "FAIL", "reports": reports}
    text = write_json(payload, args.output)
    if args.output is None:
        sys.stdout.write(text)
    for r in reports:
        d = r.to_dict()
        label = d.get("suite", "?")
        detail = d.get("config", {})
        name = detail.get("family") or detail.get("system") or d.get("family") or ""
        print(f"{label:24s} {name:18s} {'PASS' if _passed(r) else 'FAIL'}", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
