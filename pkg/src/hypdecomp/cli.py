"""Command-line interface: ``hypdecomp {eval,verify,list,report}``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .decomp import list_identities
from .hyperfun import DomainError, Family, FunctionSpec, NonConvergence, eval_numeric
from .scalar import PoleError
from .verify import TrialConfig, resolve_ids, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

FAMILY_LABELS = {
    Family.GAUSS2F1: "Gauss2F1",
    Family.GENPFQ: "GenPFQ",
    Family.HORN_H2: "HornH2",
    Family.HUMBERT_ETA2: "HumbertEta2",
    Family.HUMBERT_ETA3: "HumbertEta3",
    Family.HUMBERT_ETA4: "HumbertEta4",
    Family.HUMBERT_ETA5: "HumbertEta5",
    Family.HUMBERT_ETA11: "HumbertEta11",
    Family.LAURICELLA_FA: "LauricellaFA",
    Family.LAURICELLA_FB: "LauricellaFB",
    Family.ERDELYI_H: "ErdelyiH",
    Family.CONFLUENT_HA: "ConfluentHA",
    Family.BESSEL_JN: "BesselJn",
}


class UsageError(Exception):
    pass


def _parse_params(items: Sequence[str]) -> Dict[str, object]:
    params: Dict[str, object] = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"--param expects name=value, got {item!r}")
        name, raw = item.split("=", 1)
        try:
            values = [Fraction(v.strip()) for v in raw.split(",") if v.strip()]
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"--param {name}: {raw!r} is not a rational (use p/q)") from None
        params[name.strip()] = values[0] if len(values) == 1 and "," not in raw else tuple(values)
    return params


def _parse_point(raw: str) -> List[float]:
    try:
        return [float(v) for v in raw.split(",")] if raw.strip() else []
    except ValueError:
        raise UsageError(f"--point {raw!r} is not a comma-separated list of numbers") from None


def _build_spec(name: str, params: Dict[str, object], npoint: int) -> FunctionSpec:
    try:
        family = Family(name)
    except ValueError:
        choices = ", ".join(f.value for f in Family)
        raise UsageError(f"unknown function {name!r}; choose from {choices}") from None
    vec = ("a", "b") if family is Family.GENPFQ else ("b", "c", "d", "e")
    for key in vec:
        if key in params and not isinstance(params[key], tuple) and family not in (
            Family.GAUSS2F1,
            Family.HORN_H2,
            Family.HUMBERT_ETA2,
            Family.HUMBERT_ETA3,
            Family.HUMBERT_ETA4,
            Family.HUMBERT_ETA5,
            Family.HUMBERT_ETA11,
        ):
            params[key] = (params[key],)
    arity = None
    if family is Family.BESSEL_JN:
        arity = (0, npoint)
    elif family is Family.CONFLUENT_HA:
        m = len(params.get("b", ()))
        arity = (m, npoint - m)
    try:
        spec = FunctionSpec.make(family, arity, **params)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    if spec.m + spec.n != npoint:
        raise UsageError(f"{name} with these parameters takes {spec.m + spec.n} coordinates, got {npoint}")
    return spec


def cmd_eval(args: argparse.Namespace) -> int:
    params = _parse_params(args.param or [])
    point = _parse_point(args.point)
    spec = _build_spec(args.function, params, len(point))
    try:
        res = eval_numeric(spec, point, args.tol, args.max_layers)
    except (DomainError, NonConvergence, PoleError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.json:
        print(json.dumps({"value": res.value, "layers": res.layers, "lastLayerMag": res.last_layer_mag}))
    else:
        print(repr(res.value))
        print(f"layers={res.layers} lastLayerMag={res.last_layer_mag:.3e}", file=sys.stderr)
    return EXIT_OK


def _patterns(raw: Optional[List[str]]) -> Optional[List[str]]:
    if not raw:
        return None
    return [p.strip() for item in raw for p in item.split(",") if p.strip()]


def cmd_verify(args: argparse.Namespace) -> int:
    patterns = _patterns(args.ids)
    if patterns is not None and not resolve_ids(patterns):
        raise UsageError(f"no registered identity matches {patterns}")
    try:
        cfg = TrialConfig(
            degree=args.degree,
            degree_multi=args.degree_multi,
            trials=args.trials,
            seed=args.seed,
            mode=args.mode,
            tolerance=args.tol,
            ids=tuple(patterns) if patterns is not None else None,
            points=args.points,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = run_suite(cfg)
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
    for line in report.summary_lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_list(args: argparse.Namespace) -> int:
    for rec in list_identities():
        cols = [rec.id, FAMILY_LABELS[rec.lhs_family], rec.rhs_kind, rec.display]
        if rec.errata:
            cols.append("erratum:" + ",".join(sorted(rec.erratum_keys)))
        print("  ".join(cols))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    if args.input:
        try:
            data = json.loads(Path(args.input).read_text(encoding="utf-8"))
            entries = data["identities"]
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read report {args.input}: {exc}") from None
        for e in entries:
            status = "PASS" if e["pass"] else "FAIL"
            print(f"{status}  {e['id']:<18} trials={e['trials']} skipped={e['skipped']} maxDiscrepancy={e['maxDiscrepancy']}")
        return EXIT_OK if all(e["pass"] for e in entries) else EXIT_FAIL
    report = run_suite(TrialConfig(seed=args.seed, mode=args.mode))
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypdecomp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a hypergeometric function numerically")
    p.add_argument("--function", required=True, help="family name, e.g. gauss2f1, humbert-eta5")
    p.add_argument("--param", action="append", metavar="NAME=P/Q", help="parameter; vectors comma-separated")
    p.add_argument("--point", required=True, help="comma-separated coordinates, x-block then y-block")
    p.add_argument("--tol", type=float, default=1e-16)
    p.add_argument("--max-layers", type=int, default=400)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="verify identities over random rational instances")
    p.add_argument("--ids", action="append", help="glob pattern(s) over identity ids")
    p.add_argument("--degree", type=int, default=12)
    p.add_argument("--degree-multi", type=int, default=8, help="degree cap for 3+ variables")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--mode", choices=("exact", "numeric", "both"), default="exact")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--points", type=int, default=3)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("list", help="print the identity catalogue")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("report", help="run the default suite to JSON, or summarize an existing report")
    p.add_argument("--input", help="existing report to summarize")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--mode", choices=("exact", "numeric", "both"), default="exact")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    for stream in (sys.stdout, sys.stderr):
        if hasattr(stream, "reconfigure"):
            stream.reconfigure(line_buffering=True)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
