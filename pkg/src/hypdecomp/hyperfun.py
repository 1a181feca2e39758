"""Coefficients, truncations and numeric evaluation for the supported families.

Each family is described once as a *hypergeometric term*: a product of
Pochhammer symbols ``(base)_{L(idx)}`` raised to +-1, where ``L`` is a linear
form in the multi-index, times ``(-1)**S(idx)`` for a linear ``S``.  Exact
coefficients evaluate that product directly; float evaluation walks the
index lattice layer by layer using the ratio of neighbouring terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .scalar import PoleError, Scalar, as_rational
from .tps import MultiIndex, TruncatedSeries, compositions, from_coefficients

ParamValue = Union[Scalar, Tuple[Scalar, ...]]


class DomainError(ValueError):
    """Evaluation point lies outside the series' convergence region."""


class NonConvergence(RuntimeError):
    """The layered partial sum did not settle before the layer cap."""


class Family(str, Enum):
    GAUSS2F1 = "gauss2f1"
    GENPFQ = "genpfq"
    HORN_H2 = "horn-h2"
    HUMBERT_ETA2 = "humbert-eta2"
    HUMBERT_ETA3 = "humbert-eta3"
    HUMBERT_ETA4 = "humbert-eta4"
    HUMBERT_ETA5 = "humbert-eta5"
    HUMBERT_ETA11 = "humbert-eta11"
    LAURICELLA_FA = "lauricella-fa"
    LAURICELLA_FB = "lauricella-fb"
    ERDELYI_H = "erdelyi-h"
    CONFLUENT_HA = "confluent-ha"
    BESSEL_JN = "bessel-jn"


# scalar parameter names, vector parameter names (with the block whose width they follow)
_SIGNATURES: Dict[Family, Tuple[Tuple[str, ...], Tuple[Tuple[str, str], ...]]] = {
    Family.GAUSS2F1: (("a", "b", "c"), ()),
    Family.GENPFQ: ((), (("a", "*"), ("b", "*"))),
    Family.HORN_H2: (("a", "b", "c", "d", "e"), ()),
    Family.HUMBERT_ETA2: (("a", "b", "c", "d"), ()),
    Family.HUMBERT_ETA3: (("a", "b", "d"), ()),
    Family.HUMBERT_ETA4: (("a", "b", "d"), ()),
    Family.HUMBERT_ETA5: (("a", "d"), ()),
    Family.HUMBERT_ETA11: (("a", "b", "c", "d"), ()),
    Family.LAURICELLA_FA: (("a",), (("b", "x"), ("c", "x"))),
    Family.LAURICELLA_FB: (("a",), (("c", "x"), ("b", "x"))),
    Family.ERDELYI_H: (("a",), (("b", "x"), ("c", "x"), ("d", "y"), ("e", "y"))),
    Family.CONFLUENT_HA: (("a",), (("b", "x"), ("c", "x"))),
    Family.BESSEL_JN: (("a",), ()),
}

_ONE_VARIABLE = {Family.GAUSS2F1, Family.GENPFQ}
_TWO_VARIABLE = {
    Family.HORN_H2,
    Family.HUMBERT_ETA2,
    Family.HUMBERT_ETA3,
    Family.HUMBERT_ETA4,
    Family.HUMBERT_ETA5,
    Family.HUMBERT_ETA11,
}


@dataclass(frozen=True)
class FunctionSpec:
    """One hypergeometric family together with its parameters and arity ``(m, n)``."""

    family: Family
    params: Tuple[Tuple[str, ParamValue], ...]
    arity: Tuple[int, int]

    @classmethod
    def make(cls, family: Union[Family, str], arity: Optional[Tuple[int, int]] = None, **params) -> "FunctionSpec":
        family = Family(family)
        scalars, vectors = _SIGNATURES[family]
        missing = [p for p in scalars + tuple(v for v, _ in vectors) if p not in params]
        extra = [p for p in params if p not in scalars and p not in {v for v, _ in vectors}]
        if missing or extra:
            raise ValueError(f"{family.value}: missing {missing}, unexpected {extra}")
        norm: Dict[str, ParamValue] = {}
        for name in scalars:
            norm[name] = _norm_scalar(params[name])
        for name, _ in vectors:
            value = params[name]
            if not isinstance(value, (list, tuple)):
                value = (value,)
            norm[name] = tuple(_norm_scalar(v) for v in value)
        arity = _infer_arity(family, norm, arity)
        spec = cls(family, tuple(sorted(norm.items())), arity)
        spec._validate()
        return spec

    def __getitem__(self, name: str) -> ParamValue:
        for key, value in self.params:
            if key == name:
                return value
        raise KeyError(name)

    @property
    def m(self) -> int:
        return self.arity[0]

    @property
    def n(self) -> int:
        return self.arity[1]

    def with_params(self, **changes) -> "FunctionSpec":
        merged = dict(self.params)
        merged.update(changes)
        return FunctionSpec.make(self.family, self.arity, **merged)

    def as_float(self) -> "FunctionSpec":
        conv = {
            k: (tuple(float(x) for x in v) if isinstance(v, tuple) else float(v)) for k, v in self.params
        }
        return FunctionSpec(self.family, tuple(sorted(conv.items())), self.arity)

    def _validate(self) -> None:
        m, n = self.arity
        if m < 0 or n < 0:
            raise ValueError("arity entries must be non-negative")
        _, vectors = _SIGNATURES[self.family]
        for name, block in vectors:
            width = {"x": m, "y": n}.get(block)
            if width is not None and len(self[name]) != width:
                raise ValueError(f"{self.family.value}: parameter {name} needs {width} entries")
        if self.family in _ONE_VARIABLE and m + n != 1:
            raise ValueError(f"{self.family.value} takes one variable")
        if self.family in _TWO_VARIABLE and self.arity != (1, 1):
            raise ValueError(f"{self.family.value} has arity (1, 1)")
        if self.family in (Family.LAURICELLA_FA, Family.LAURICELLA_FB) and n != 0:
            raise ValueError(f"{self.family.value} is a pure x-block function")
        if self.family is Family.BESSEL_JN and m != 0:
            raise ValueError("bessel-jn is a pure y-block function")

    def __str__(self) -> str:
        def fmt(v):
            return "(" + ", ".join(map(str, v)) + ")" if isinstance(v, tuple) else str(v)

        body = ", ".join(f"{k}={fmt(v)}" for k, v in self.params)
        return f"{self.family.value}[{self.m},{self.n}]({body})"


def _norm_scalar(value) -> Scalar:
    if isinstance(value, float):
        return value
    return as_rational(value)


def _infer_arity(family: Family, params: Mapping[str, ParamValue], arity) -> Tuple[int, int]:
    if family in _TWO_VARIABLE:
        return arity or (1, 1)
    if family in _ONE_VARIABLE:
        return arity or (1, 0)
    if family in (Family.LAURICELLA_FA, Family.LAURICELLA_FB):
        return arity or (len(params["b"]), 0)
    if family is Family.ERDELYI_H:
        return arity or (len(params["b"]), len(params["d"]))
    if family is Family.CONFLUENT_HA:
        if arity is None:
            raise ValueError("confluent-ha needs an explicit arity (m, n)")
        return arity
    if family is Family.BESSEL_JN:
        if arity is None:
            raise ValueError("bessel-jn needs an explicit arity (0, n)")
        return arity
    raise ValueError(family)


# ---------------------------------------------------------------------------
# hypergeometric term description


@dataclass(frozen=True)
class PochFactor:
    base: Scalar
    weights: Tuple[int, ...]
    power: int  # +1 numerator, -1 denominator


@dataclass(frozen=True)
class HyperTerm:
    nvars: int
    factors: Tuple[PochFactor, ...]
    sign_weights: Tuple[int, ...]

    def shift_of(self, factor: PochFactor, idx: MultiIndex) -> int:
        return sum(w * i for w, i in zip(factor.weights, idx))


def _is_float(spec: FunctionSpec) -> bool:
    for _, v in spec.params:
        for item in v if isinstance(v, tuple) else (v,):
            return isinstance(item, float)
    return False


def _unit(nv: int, t: int) -> Tuple[int, ...]:
    return tuple(1 if s == t else 0 for s in range(nv))


def _block(nv: int, lo: int, hi: int, coef: int = 1) -> Tuple[int, ...]:
    return tuple(coef if lo <= s < hi else 0 for s in range(nv))


def hyper_term(spec: FunctionSpec) -> HyperTerm:
    """Pochhammer-product description of ``spec``'s series coefficient (factorials included)."""
    f = spec.family
    m, n = spec.arity
    nv = m + n
    one = 1.0 if _is_float(spec) else Fraction(1)
    factors: List[PochFactor] = [PochFactor(one, _unit(nv, t), -1) for t in range(nv)]
    sign = (0,) * nv
    whole = _block(nv, 0, nv)

    def num(base, weights):
        factors.append(PochFactor(base, weights, 1))

    def den(base, weights):
        factors.append(PochFactor(base, weights, -1))

    if f is Family.GAUSS2F1:
        num(spec["a"], whole), num(spec["b"], whole), den(spec["c"], whole)
    elif f is Family.GENPFQ:
        for v in spec["a"]:
            num(v, whole)
        for v in spec["b"]:
            den(v, whole)
    elif f in _TWO_VARIABLE:
        xw, yw = (1, 0), (0, 1)
        num(spec["a"], (1, -1))
        if f is Family.HORN_H2:
            num(spec["b"], xw), num(spec["c"], yw), num(spec["d"], yw), den(spec["e"], xw)
        else:
            den(spec["d"], xw)
            if f is Family.HUMBERT_ETA2:
                num(spec["b"], xw), num(spec["c"], yw)
            elif f is Family.HUMBERT_ETA3:
                num(spec["b"], xw)
            elif f is Family.HUMBERT_ETA4:
                num(spec["b"], yw)
            elif f is Family.HUMBERT_ETA11:
                num(spec["b"], yw), num(spec["c"], yw)
    elif f is Family.LAURICELLA_FA:
        num(spec["a"], whole)
        for t in range(m):
            num(spec["b"][t], _unit(nv, t)), den(spec["c"][t], _unit(nv, t))
    elif f is Family.LAURICELLA_FB:
        den(spec["a"], whole)
        for t in range(m):
            num(spec["b"][t], _unit(nv, t)), num(spec["c"][t], _unit(nv, t))
    elif f in (Family.ERDELYI_H, Family.CONFLUENT_HA):
        num(spec["a"], _block(nv, 0, m, 1)[:m] + _block(nv, m, nv, -1)[m:])
        for t in range(m):
            num(spec["b"][t], _unit(nv, t)), den(spec["c"][t], _unit(nv, t))
        if f is Family.ERDELYI_H:
            for s in range(n):
                num(spec["d"][s], _unit(nv, m + s)), num(spec["e"][s], _unit(nv, m + s))
    elif f is Family.BESSEL_JN:
        den(one + spec["a"], whole)
        sign = whole
    else:  # pragma: no cover
        raise ValueError(f)
    return HyperTerm(nv, tuple(factors), sign)


def _poch_exact(base: Fraction, k: int) -> Tuple[Fraction, Fraction]:
    """(numerator, denominator) of ``(base)_k`` without dividing; denominator may be 0."""
    top, bottom = Fraction(1), Fraction(1)
    if k >= 0:
        for j in range(k):
            top *= base + j
    else:
        for j in range(1, -k + 1):
            bottom *= base - j
    return top, bottom


def term_value(term: HyperTerm, idx: MultiIndex) -> Scalar:
    """Coefficient of ``idx`` computed directly from the Pochhammer product."""
    top: Scalar = 1
    bottom: Scalar = 1
    for fac in term.factors:
        k = term.shift_of(fac, idx)
        if isinstance(fac.base, float):
            t, b = _poch_float(fac.base, k)
        else:
            t, b = _poch_exact(fac.base, k)
        if fac.power < 0:
            t, b = b, t
        top *= t
        bottom *= b
    if bottom == 0:
        raise PoleError(f"pole in coefficient at {idx}", where=idx)
    sign = -1 if sum(w * i for w, i in zip(term.sign_weights, idx)) % 2 else 1
    return sign * top / bottom


def _poch_float(base: float, k: int) -> Tuple[float, float]:
    top, bottom = 1.0, 1.0
    if k >= 0:
        for j in range(k):
            top *= base + j
    else:
        for j in range(1, -k + 1):
            bottom *= base - j
    return top, bottom


def coefficient_of(spec: FunctionSpec, idx: Sequence[int]) -> Scalar:
    """Full multiplier of ``x^i y^j`` in the defining series (factorials and signs included)."""
    idx = tuple(idx)
    if len(idx) != spec.m + spec.n:
        raise ValueError(f"index {idx} does not match arity {spec.arity}")
    if any(i < 0 for i in idx):
        raise ValueError(f"negative exponent in {idx}")
    return term_value(hyper_term(spec), idx)


def _singular_length(base: Scalar, power: int, lo: int, hi: int) -> Optional[int]:
    """First length in [lo, hi] where the factor ``(base)_k ** power`` is infinite, if any."""
    if isinstance(base, float):
        if not base.is_integer():
            return None
        b = int(base)
    elif base.denominator != 1:
        return None
    else:
        b = int(base)
    if power > 0:
        # (b)_{-n} = 1 / ((b-1)...(b-n)) blows up once n >= b >= 1
        return -b if 1 <= b <= -lo else None
    # 1 / (b)_k blows up once k >= 1 - b for b <= 0
    return 1 - b if b <= 0 and 1 - b <= hi else None


def check_poles(spec: FunctionSpec, degree: int) -> None:
    """Raise PoleError if any Pochhammer in the coefficient is singular up to ``degree``."""
    for fac in hyper_term(spec).factors:
        lo = degree * min(0, min(fac.weights, default=0))
        hi = degree * max(0, max(fac.weights, default=0))
        k = _singular_length(fac.base, fac.power, lo, hi)
        if k is not None:
            raise PoleError(
                f"{spec.family.value}: Pochhammer ({fac.base})_{k} is singular within degree {degree}",
                where=(fac.base, k),
            )


def truncate(spec: FunctionSpec, degree: int) -> TruncatedSeries:
    """Exact truncation of the defining series to total degree ``degree``."""
    check_poles(spec, degree)
    term = hyper_term(spec)
    return from_coefficients(spec.arity, degree, lambda idx: term_value(term, idx))


# ---------------------------------------------------------------------------
# numeric evaluation


@dataclass(frozen=True)
class EvalPoint:
    x: Tuple[float, ...] = ()
    y: Tuple[float, ...] = ()

    @property
    def coords(self) -> Tuple[float, ...]:
        return tuple(self.x) + tuple(self.y)


@dataclass(frozen=True)
class EvalResult:
    value: float
    layers: int
    last_layer_mag: float


def check_domain(spec: FunctionSpec, pt: EvalPoint) -> None:
    """Raise DomainError when ``pt`` is outside the region where the series is summed."""
    f = spec.family
    xs = [abs(v) for v in pt.x]
    ys = [abs(v) for v in pt.y]
    if len(xs) != spec.m or len(ys) != spec.n:
        raise DomainError(f"point {pt} does not match arity {spec.arity}")
    if not all(math.isfinite(v) for v in xs + ys):
        raise DomainError("point has non-finite coordinates")
    r = max(xs, default=0.0)
    s = max(ys, default=0.0)
    bad = None
    if f in _ONE_VARIABLE:
        if f is Family.GAUSS2F1:
            p, q = 2, 1
        else:
            p, q = len(spec["a"]), len(spec["b"])
        z = max(r, s)
        if p == q + 1 and z >= 1:
            bad = "|z| < 1"
        elif p > q + 1 and z != 0:
            bad = "z = 0 (divergent series)"
    elif f is Family.HORN_H2:
        if not (r < 1 and s * (1 + r) < 1):
            bad = "|x| < 1 and |y| (1 + |x|) < 1"
    elif f in (Family.HUMBERT_ETA2, Family.HUMBERT_ETA3):
        if r >= 1:
            bad = "|x| < 1"
    elif f is Family.HUMBERT_ETA4:
        if r > 4:
            bad = "|x| <= 4 (experimental gate)"
    elif f is Family.HUMBERT_ETA11:
        if s >= 1:
            bad = "|y| < 1"
    elif f in (Family.LAURICELLA_FA, Family.CONFLUENT_HA):
        if sum(xs) >= 1:
            bad = "|x_1| + ... + |x_m| < 1"
    elif f is Family.LAURICELLA_FB:
        if r >= 1:
            bad = "max |x_i| < 1"
    elif f is Family.ERDELYI_H:
        if r + s > 0.25:
            bad = "max |x_i| + max |y_j| <= 0.25 (conservative gate)"
    if bad:
        raise DomainError(f"{f.value}: point {pt.coords} outside the region {bad}")


@lru_cache(maxsize=None)
def _layer_plan(nv: int, d: int) -> Tuple[Tuple[MultiIndex, int, MultiIndex], ...]:
    """For each index of degree ``d >= 1``: the coordinate it steps and its predecessor."""
    if d == 0:
        return ()
    plan = []
    for idx in compositions(d, nv):
        t = next(s for s in range(nv) if idx[s])
        plan.append((idx, t, idx[:t] + (idx[t] - 1,) + idx[t + 1 :]))
    return tuple(plan)


def layered_sum(
    coeff_at: Callable[[MultiIndex], float],
    coords: Sequence[float],
    tol: float,
    max_layers: int = 400,
    ratio_at: Optional[Callable[[MultiIndex, int, float], Optional[float]]] = None,
) -> EvalResult:
    """Sum ``coeff * coords**idx`` by total degree, stopping on three small layers in a row.

    ``ratio_at(idx, t, prev)`` may supply the coefficient at ``idx`` from the
    coefficient ``prev`` at ``idx - e_t``; returning None falls back to
    ``coeff_at``.
    """
    nv = len(coords)
    total = 0.0
    comp = 0.0  # Neumaier compensation
    quiet = 0
    prev_layer: Dict[MultiIndex, Tuple[float, float]] = {}
    last = 0.0
    for d in range(max_layers + 1):
        layer: Dict[MultiIndex, Tuple[float, float]] = {}
        terms = []
        if d == 0:
            origin = (0,) * nv
            c = coeff_at(origin)
            layer[origin] = (c, 1.0)
            terms.append(c)
        for idx, t, pidx in _layer_plan(nv, d):
            pc, pmono = prev_layer[pidx]
            mono = pmono * coords[t]
            c = ratio_at(idx, t, pc) if (ratio_at is not None and pc != 0) else None
            if c is None:
                c = coeff_at(idx)
            layer[idx] = (c, mono)
            terms.append(c * mono)
        acc = math.fsum(terms)
        new = total + acc
        if abs(total) >= abs(acc):
            comp += (total - new) + acc
        else:
            comp += (acc - new) + total
        total = new
        last = abs(acc)
        if not math.isfinite(total):
            raise NonConvergence(f"partial sum overflowed at layer {d}")
        if d > 0 and last <= tol * max(abs(total), 1e-300):
            quiet += 1
            if quiet >= 3:
                return EvalResult(total + comp, d + 1, last)
        else:
            quiet = 0
        prev_layer = layer
    raise NonConvergence(f"no convergence within {max_layers} layers (last layer {last:.3e})")


def _ratio_fn(term: HyperTerm) -> Callable[[MultiIndex, int, float], Optional[float]]:
    # per coordinate t: the factors whose length moves when idx[t] steps up by one
    steps = []
    for t in range(term.nvars):
        moving = []
        for f in term.factors:
            w = f.weights[t]
            if w:
                nz = tuple((s, ws) for s, ws in enumerate(f.weights) if ws)
                moving.append((float(f.base), nz, w, f.power if w > 0 else -f.power))
        steps.append((tuple(moving), term.sign_weights[t] % 2 == 1))

    def ratio(idx: MultiIndex, t: int, prev: float) -> Optional[float]:
        moving, flip = steps[t]
        r = prev
        for base, nz, w, power in moving:
            k_old = -w
            for s, ws in nz:
                k_old += ws * idx[s]
            # (b)_{k+1} / (b)_k = b + k ;  (b)_{k-1} / (b)_k = 1 / (b + k - 1)
            step = base + k_old if w > 0 else base + k_old - 1
            if step == 0:
                return None
            r = r * step if power > 0 else r / step
        return -r if flip else r

    return ratio


def eval_numeric(
    spec: FunctionSpec,
    pt: Union[EvalPoint, Sequence[float]],
    tol: float = 1e-16,
    max_layers: int = 400,
) -> EvalResult:
    """Double-precision partial sum of the defining series at ``pt``."""
    if not isinstance(pt, EvalPoint):
        coords = tuple(float(v) for v in pt)
        pt = EvalPoint(coords[: spec.m], coords[spec.m :])
    check_domain(spec, pt)
    fspec = spec.as_float()
    term = hyper_term(fspec)
    check_poles(fspec, min(max_layers, 60))
    return layered_sum(lambda idx: float(term_value(term, idx)), pt.coords, tol, max_layers, _ratio_fn(term))


def evaluate(spec: FunctionSpec, pt, tol: float = 1e-16) -> float:
    return eval_numeric(spec, pt, tol).value
