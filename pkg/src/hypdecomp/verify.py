"""Verification harness: random rational instances, exact and numeric checks, JSON reports."""

from __future__ import annotations

import fnmatch
import json
import math
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .decomp import (
    REGISTRY,
    IdentityRecord,
    Shape,
    get_identity,
)
from .hyperfun import DomainError, EvalPoint, NonConvergence
from .scalar import PoleError
from .tps import (
    TruncatedSeries,
    compare_series,
    from_coefficients,
    operator_pochhammer_brute,
)
from .scalar import pochhammer

DENOMINATORS = (2, 3, 5, 7)
NUMERATOR_RANGE = (-9, 9)
MAX_SKIP_FRACTION = 0.10


@dataclass(frozen=True)
class TrialConfig:
    degree: int = 12
    trials: int = 5
    seed: int = 42
    mode: str = "exact"
    tolerance: float = 1e-10
    ids: Optional[Tuple[str, ...]] = None
    degree_multi: int = 8
    points: int = 3

    def __post_init__(self) -> None:
        if self.degree < 1 or self.degree_multi < 1:
            raise ValueError("degree must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.mode not in ("exact", "numeric", "both"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def degree_for(self, shape: Shape) -> int:
        return self.degree if sum(shape) <= 2 else min(self.degree, self.degree_multi)


def resolve_ids(patterns: Optional[Iterable[str]]) -> List[str]:
    """Registered ids matching any of the glob patterns (all ids for None), in sorted order."""
    ids = sorted(REGISTRY)
    if patterns is None:
        return ids
    return [i for i in ids if any(fnmatch.fnmatchcase(i, p) for p in patterns)]


def _rng(*key) -> random.Random:
    return random.Random(":".join(str(k) for k in key))


def random_rational(rng: random.Random) -> Fraction:
    """A non-integer p/q with q in {2, 3, 5, 7} and p in [-9, 9]."""
    while True:
        value = Fraction(rng.randint(*NUMERATOR_RANGE), rng.choice(DENOMINATORS))
        if value.denominator != 1:
            return value


def random_params(identity_id: str, seed: int, trial: int) -> Tuple[Dict[str, object], Shape]:
    """Deterministic parameter assignment and arity for one trial of an identity."""
    rec = get_identity(identity_id)
    shape = rec.shapes[trial % len(rec.shapes)]
    rng = _rng(seed, identity_id, trial)
    params: Dict[str, object] = {name: random_rational(rng) for name in rec.scalar_slots}
    for name, block in rec.vector_slots:
        width = shape[0] if block == "x" else shape[1]
        params[name] = tuple(random_rational(rng) for _ in range(width))
    return params, shape


def sample_points(identity_id: str, shape: Shape, seed: int, trial: int, count: int) -> List[EvalPoint]:
    """Small rational-grid points (multiples of 1/100 in [-0.2, 0.2]) inside every factor's domain."""
    rng = _rng(seed, identity_id, trial, "points")
    pts = []
    for _ in range(count):
        coords = [rng.randint(-20, 20) / 100 for _ in range(sum(shape))]
        pts.append(EvalPoint(tuple(coords[: shape[0]]), tuple(coords[shape[0] :])))
    return pts


@dataclass
class InstanceResult:
    status: str  # "equal" | "mismatch" | "skipped"
    discrepancy: object = 0
    mismatches: List[Tuple] = field(default_factory=list)
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "equal"


def verify_exact(
    identity_id: str,
    params: Dict[str, object],
    degree: int,
    shape: Optional[Shape] = None,
    errata: Optional[Iterable[str]] = None,
) -> InstanceResult:
    """Build both sides as exact truncations and compare coefficient by coefficient."""
    rec = get_identity(identity_id)
    shape = shape or rec.shapes[0]
    applied = rec.erratum_keys if errata is None else frozenset(errata)
    try:
        lhs = rec.lhs(params, shape, degree, applied)
        rhs = rec.rhs(params, shape, degree, applied)
    except (PoleError, ZeroDivisionError) as exc:
        return InstanceResult("skipped", reason=f"pole: {exc}")
    report = compare_series(lhs, rhs)
    if report.equal:
        return InstanceResult("equal", Fraction(0))
    return InstanceResult("mismatch", report.max_discrepancy, report.mismatches)


def verify_numeric(
    identity_id: str,
    params: Dict[str, object],
    points: Sequence[EvalPoint],
    tol: float,
    shape: Optional[Shape] = None,
    errata: Optional[Iterable[str]] = None,
) -> InstanceResult:
    """Check ``|lhs - rhs| / max(1, |lhs|) <= tol`` at every point."""
    rec = get_identity(identity_id)
    shape = shape or rec.shapes[0]
    applied = rec.erratum_keys if errata is None else frozenset(errata)
    worst = 0.0
    bad = []
    evaluated = 0
    reasons = []
    for pt in points:
        try:
            lhs = rec.lhs_num(params, shape, pt, 1e-17, applied)
            rhs = rec.rhs_num(params, shape, pt, 1e-17, applied)
        except (DomainError, PoleError) as exc:
            reasons.append(f"{pt.coords}: {exc}")
            continue
        except NonConvergence as exc:
            return InstanceResult("mismatch", math.inf, [(pt.coords, None, None)], reason=str(exc))
        evaluated += 1
        err = abs(lhs - rhs) / max(1.0, abs(lhs))
        worst = max(worst, err)
        if not err <= tol:
            bad.append((pt.coords, lhs, rhs))
    if evaluated == 0:
        return InstanceResult("skipped", reason="; ".join(reasons) or "no points")
    return InstanceResult("mismatch" if bad else "equal", worst, bad)


def _fmt_rational(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _fmt_params(params: Dict[str, object]) -> Dict[str, object]:
    out = {}
    for k, v in sorted(params.items()):
        out[k] = [_fmt_rational(x) for x in v] if isinstance(v, tuple) else _fmt_rational(v)
    return out


@dataclass
class VerificationReport:
    suite: Dict[str, object]
    identities: List[Dict[str, object]]
    started: str = ""
    finished: str = ""

    @property
    def passed(self) -> bool:
        return all(entry["pass"] for entry in self.identities)

    def body(self) -> Dict[str, object]:
        return {"suite": self.suite, "identities": self.identities, "pass": self.passed}

    def to_dict(self) -> Dict[str, object]:
        out = self.body()
        out["meta"] = {"started": self.started, "finished": self.finished}
        return out

    def body_json(self) -> str:
        return json.dumps(self.body(), indent=2, sort_keys=True)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary_lines(self) -> List[str]:
        lines = []
        for e in self.identities:
            status = "PASS" if e["pass"] else "FAIL"
            extra = f" errata={','.join(e['errata'])}" if e["errata"] else ""
            note = f" ({e['diagnostic']})" if e.get("diagnostic") else ""
            lines.append(
                f"{status}  {e['id']:<18} trials={e['trials']} skipped={e['skipped']} "
                f"maxDiscrepancy={e['maxDiscrepancy']}{extra}{note}"
            )
        return lines


def _run_identity(rec: IdentityRecord, cfg: TrialConfig) -> Dict[str, object]:
    skipped = 0
    exact_worst = Fraction(0)
    numeric_worst = 0.0
    failures: List[Dict[str, object]] = []
    reasons: List[str] = []
    for trial in range(cfg.trials):
        params, shape = random_params(rec.id, cfg.seed, trial)
        D = cfg.degree_for(shape)
        results = []
        if cfg.mode in ("exact", "both"):
            results.append(("exact", verify_exact(rec.id, params, D, shape)))
        if cfg.mode in ("numeric", "both"):
            pts = sample_points(rec.id, shape, cfg.seed, trial, cfg.points)
            results.append(("numeric", verify_numeric(rec.id, params, pts, cfg.tolerance, shape)))
        for kind, res in results:
            if res.status == "skipped":
                skipped += 1
                reasons.append(f"trial {trial}: {res.reason}")
                continue
            if kind == "exact":
                exact_worst = max(exact_worst, abs(Fraction(res.discrepancy)))
            else:
                numeric_worst = max(numeric_worst, float(res.discrepancy))
            if not res.ok:
                first = res.mismatches[0] if res.mismatches else None
                failures.append(
                    {
                        "mode": kind,
                        "trial": trial,
                        "shape": list(shape),
                        "params": _fmt_params(params),
                        "firstMismatch": _fmt_mismatch(first),
                        "mismatchCount": len(res.mismatches),
                    }
                )
    runs = cfg.trials * (2 if cfg.mode == "both" else 1)
    diagnostic = ""
    too_many_skips = skipped > MAX_SKIP_FRACTION * runs
    if too_many_skips:
        diagnostic = f"{skipped}/{runs} instances skipped; check parameter generation"
    entry: Dict[str, object] = {
        "id": rec.id,
        "trials": cfg.trials,
        "skipped": skipped,
        "pass": not failures and not too_many_skips,
        "errata": sorted(rec.erratum_keys),
    }
    if cfg.mode == "numeric":
        entry["maxDiscrepancy"] = numeric_worst
    else:
        entry["maxDiscrepancy"] = _fmt_rational(exact_worst)
        if cfg.mode == "both":
            entry["numericMaxDiscrepancy"] = numeric_worst
    if failures:
        entry["failures"] = failures
    if diagnostic:
        entry["diagnostic"] = diagnostic
    if reasons:
        entry["skipReasons"] = reasons
    return entry


def _fmt_mismatch(m) -> Optional[Dict[str, object]]:
    if m is None:
        return None
    idx, lhs, rhs = m
    conv = (lambda v: _fmt_rational(v)) if isinstance(lhs, Fraction) else (lambda v: v)
    return {"index": list(idx), "lhs": conv(lhs), "rhs": conv(rhs)}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_suite(cfg: TrialConfig = TrialConfig()) -> VerificationReport:
    """Run every selected identity for ``cfg.trials`` instances; results ordered by id."""
    started = _now()
    entries = [_run_identity(get_identity(i), cfg) for i in resolve_ids(cfg.ids)]
    suite = {
        "seed": cfg.seed,
        "mode": cfg.mode,
        "degree": cfg.degree,
        "degreeMulti": cfg.degree_multi,
        "trials": cfg.trials,
        "tolerance": cfg.tolerance,
    }
    return VerificationReport(suite, entries, started, _now())


# ---------------------------------------------------------------------------
# Euler-operator Pochhammer actions: brute force against eigenvalues


def random_polynomial(rng: random.Random, arity: Shape, degree: int) -> TruncatedSeries:
    """Dense random rational polynomial of total degree <= ``degree``."""
    return from_coefficients(
        arity, degree, lambda idx: Fraction(rng.randint(-20, 20), rng.randint(1, 9))
    )


def euler_pochhammer_mismatches(f: TruncatedSeries, k: int) -> List[Tuple[str, Tuple[int, ...]]]:
    """Indices where the derivative form of ``(-sum d_i)_k`` or ``(sum s_j)_k`` misses the eigenvalue."""
    bad = []
    bx = operator_pochhammer_brute(f, k, "x")
    by = operator_pochhammer_brute(f, k, "y")
    for idx, c in f.coeffs.items():
        p, q = sum(idx[: f.m]), sum(idx[f.m :])
        if bx.coeffs[idx] != pochhammer(Fraction(-p), k) * c:
            bad.append(("x", idx))
        if by.coeffs[idx] != pochhammer(Fraction(q), k) * c:
            bad.append(("y", idx))
    return bad
