"""``cliffdirac`` command line.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 precondition or metric-axiom violation.
"""
import argparse
import json
import sys

from .errors import (BoundaryError, CompatibilityError, ConfigError, DegenerateMetricError, NotSpinError,
                     OffShellError, PreconditionError)
from .geometry import CATALOG
from .harness import SuiteConfig, exit_status, format_table, run_planewave, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _tol_pair(text):
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {val!r} is not a number") from None


def _floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    p = _Parser(prog="cliffdirac", description="Verify Clifford-algebra and tensor Dirac identities numerically.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--config", help="JSON config file; flags override its values")
    v.add_argument("--suite")
    v.add_argument("--metric", help="catalog id with optional parameters, e.g. flrw:1,0.1, or grid:path.json")
    v.add_argument("--box", help="lo:hi,lo:hi,lo:hi,lo:hi[@n or @n0xn1xn2xn3]")
    v.add_argument("--h", type=float)
    v.add_argument("--seed", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--tol", type=_tol_pair, action="append", default=[], metavar="KEY=VAL")
    v.add_argument("--inject-failure", action="store_true", default=None)
    v.add_argument("--out", help="write the JSON report here instead of stdout")
    v.add_argument("--table", action="store_true", help="also print a summary table to stderr")

    w = sub.add_parser("planewave", help="build and verify a Minkowski plane wave")
    w.add_argument("--p", type=_floats, required=True, help="t,x,y,z lower momentum components")
    w.add_argument("--m", type=float, required=True)
    w.add_argument("--box", default="-1:1,-1:1,-1:1,-1:1@3")
    w.add_argument("--h", type=float, default=1e-3)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--sign", type=int, choices=(1, -1), default=1)
    w.add_argument("--tol", type=_tol_pair, action="append", default=[], metavar="KEY=VAL")
    w.add_argument("--out")
    w.add_argument("--table", action="store_true")

    sub.add_parser("catalog", help="list the built-in metrics")
    return p


def _load_config(args):
    doc = {}
    if args.config:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
    for key in ("suite", "metric", "box", "h", "seed", "samples", "inject_failure"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    tols = dict(doc.get("tolerances", {}))
    tols.update(dict(args.tol))
    doc["tolerances"] = tols
    return SuiteConfig.from_dict(doc)


def _emit(report, args):
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.table:
        print(format_table(report), file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "catalog":
            for name, (factory, defaults) in sorted(CATALOG.items()):
                doc = (factory.__doc__ or "").strip().splitlines()
                params = ",".join(f"{d:g}" for d in defaults) or "-"
                print(f"{name:22s} params={params:28s} {doc[0] if doc else ''}")
            return EXIT_OK
        if args.command == "verify":
            report = run_suite(_load_config(args))
        else:
            report = run_planewave(args.p, args.m, args.box, args.seed, args.h, args.sign, dict(args.tol))
    except ConfigError as exc:
        print(f"cliffdirac: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateMetricError as exc:
        print(f"cliffdirac: metric axiom violated at node {exc.node}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (OffShellError, PreconditionError, NotSpinError, CompatibilityError, BoundaryError) as exc:
        print(f"cliffdirac: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    _emit(report, args)
    return exit_status(report)


if __name__ == "__main__":
    sys.exit(main())
