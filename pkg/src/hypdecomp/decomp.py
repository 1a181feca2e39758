"""Registry of operator identities and decomposition formulas, with side builders.

Every identity is stored as a record with an exact builder for each side
(truncated series over Fractions) and a numeric builder for each side.
Decomposition formulas are transcribed term by term: each record lists the
leading term, the sign and weight of the ``(k, l)`` summand, the monomial it
carries and the shifted-parameter functions it multiplies.

Errata are explicit toggles.  A builder receives the set of errata to apply;
dropping one reproduces the display exactly as printed, which is how the
negative controls are run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .hyperfun import (
    EvalPoint,
    Family,
    FunctionSpec,
    HyperTerm,
    PochFactor,
    eval_numeric,
    hyper_term,
    layered_sum,
    _ratio_fn,
    term_value,
    truncate,
)
from .scalar import pochhammer
from .tps import (
    MultiIndex,
    TruncatedSeries,
    apply_diagonal_split,
    apply_diagonal_xy,
    compositions,
    graded_indices,
    negate_y,
    outer,
)

OPERATOR_FORM = "operator-form"
SERIES_FORM = "series-form"

Params = Dict[str, object]
Shape = Tuple[int, int]

INNER_TOL = 1e-17


class UnknownIdentity(KeyError):
    pass


@dataclass(frozen=True)
class Erratum:
    key: str
    location: str
    note: str


@dataclass(frozen=True)
class IdentityRecord:
    """One registered display.

    ``lhs``/``rhs`` build exact truncations ``(params, shape, D, errata) -> series``;
    ``lhs_num``/``rhs_num`` evaluate ``(params, shape, point, tol, errata) -> float``.
    """

    id: str
    lhs_family: Family
    rhs_kind: str
    display: str
    scalar_slots: Tuple[str, ...]
    vector_slots: Tuple[Tuple[str, str], ...]
    shapes: Tuple[Shape, ...]
    lhs: Callable
    rhs: Callable
    lhs_num: Callable
    rhs_num: Callable
    errata: Tuple[Erratum, ...] = ()
    summary: str = ""

    @property
    def erratum_keys(self) -> FrozenSet[str]:
        return frozenset(e.key for e in self.errata)

    def nvars(self, shape: Shape) -> int:
        return sum(shape)


# ---------------------------------------------------------------------------
# small helpers


def _q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def gauss(a, b, c, block: str = "x") -> FunctionSpec:
    return FunctionSpec.make(Family.GAUSS2F1, _arity1(block), a=a, b=b, c=c)


def pfq(num: Sequence, den: Sequence, block: str = "x") -> FunctionSpec:
    return FunctionSpec.make(Family.GENPFQ, _arity1(block), a=tuple(num), b=tuple(den))


def _arity1(block: str) -> Shape:
    return (1, 0) if block == "x" else (0, 1)


def _fa(a, b, c) -> FunctionSpec:
    return FunctionSpec.make(Family.LAURICELLA_FA, a=a, b=tuple(b), c=tuple(c))


def _fb(c, b, a) -> FunctionSpec:
    return FunctionSpec.make(Family.LAURICELLA_FB, a=a, b=tuple(b), c=tuple(c))


def _bessel(a, n: int) -> FunctionSpec:
    return FunctionSpec.make(Family.BESSEL_JN, (0, n), a=a)


def _ha(a, b, c, n: int) -> FunctionSpec:
    return FunctionSpec.make(Family.CONFLUENT_HA, (len(b), n), a=a, b=tuple(b), c=tuple(c))


@dataclass(frozen=True)
class Factor:
    """A function appearing in a product, optionally with its y-block negated."""

    spec: FunctionSpec
    neg_y: bool = False


def _factor_series(f: Factor, degree: int) -> TruncatedSeries:
    s = _cached_truncate(f.spec, degree)
    return negate_y(s) if f.neg_y else s


@lru_cache(maxsize=4096)
def _cached_truncate(spec: FunctionSpec, degree: int) -> TruncatedSeries:
    return truncate(spec, degree)


def product_series(factors: Sequence[Factor], degree: int) -> TruncatedSeries:
    """Exact truncation of a product of functions in disjoint variable blocks."""
    acc = _factor_series(factors[0], degree)
    for f in factors[1:]:
        acc = outer(acc, _factor_series(f, degree))
    return acc


def _factor_value(f: Factor, x: Sequence[float], y: Sequence[float], tol: float) -> float:
    ys = tuple(-v for v in y) if f.neg_y else tuple(y)
    return _cached_eval(f.spec, tuple(x), ys, tol)


@lru_cache(maxsize=65536)
def _cached_eval(spec: FunctionSpec, x: Tuple[float, ...], y: Tuple[float, ...], tol: float) -> float:
    return eval_numeric(spec, EvalPoint(x, y), tol).value


def product_value(factors: Sequence[Tuple[Factor, str]], pt: EvalPoint, tol: float = INNER_TOL) -> float:
    """Numeric product; each factor is paired with the coordinates it reads.

    The coordinate selector is ``"x"``, ``"y"``, ``"xy"``, ``"x1"`` (first x)
    or ``"xrest"``.
    """
    value = 1.0
    for f, sel in factors:
        x, y = _select(pt, sel)
        value *= _factor_value(f, x, y, tol)
    return value


def _select(pt: EvalPoint, sel: str) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    if sel == "x":
        return pt.x, ()
    if sel == "y":
        return (), pt.y
    if sel == "xy":
        return pt.x, pt.y
    if sel == "x1":
        return pt.x[:1], ()
    if sel == "xrest":
        return pt.x[1:], ()
    if sel.startswith("x") and sel[1:].isdigit():
        t = int(sel[1:])
        return (pt.x[t],), ()
    raise ValueError(sel)


def _as_y_block(f: Factor) -> Factor:
    """Move a one-variable x-block function onto the y-block."""
    s = f.spec
    if s.arity == (1, 0):
        s = FunctionSpec(s.family, s.params, (0, 1))
    return Factor(s, f.neg_y)


# ---------------------------------------------------------------------------
# operator-form identities


def _neg_y_term(term: HyperTerm, m: int) -> HyperTerm:
    sign = tuple(w + (1 if t >= m else 0) for t, w in enumerate(term.sign_weights))
    return HyperTerm(term.nvars, term.factors, sign)


def _embed_term(term: HyperTerm, offset: int, nv: int) -> HyperTerm:
    """Re-index a term's variables into positions ``offset..offset+term.nvars`` of ``nv``."""

    def widen(w):
        return (0,) * offset + tuple(w) + (0,) * (nv - offset - term.nvars)

    facs = tuple(PochFactor(f.base, widen(f.weights), f.power) for f in term.factors)
    return HyperTerm(nv, facs, widen(term.sign_weights))


def _joint_term(blocks: Sequence[Tuple[HyperTerm, int]], nv: int) -> HyperTerm:
    facs: List[PochFactor] = []
    sign = [0] * nv
    for term, offset in blocks:
        e = _embed_term(term, offset, nv)
        facs.extend(e.factors)
        sign = [a + b for a, b in zip(sign, e.sign_weights)]
    return HyperTerm(nv, tuple(facs), tuple(sign))


def _operator_term(kind: str, h: float, m: int, n: int) -> List[PochFactor]:
    """Pochhammer factors of an operator eigenvalue as linear forms in the index."""
    nv = m + n
    xs = tuple(1 if t < m else 0 for t in range(nv))
    ys = tuple(-1 if t >= m else 0 for t in range(nv))
    both = tuple(a + b for a, b in zip(xs, ys))
    if kind == "nabla_xy":
        return [PochFactor(h, both, 1), PochFactor(h, xs, -1), PochFactor(h, ys, -1)]
    if kind == "delta_xy":
        return [PochFactor(h, both, -1), PochFactor(h, xs, 1), PochFactor(h, ys, 1)]
    first = tuple(1 if t == 0 else 0 for t in range(nv))
    rest = tuple(1 if 0 < t < m else 0 for t in range(nv))
    sgn = 1 if kind == "nabla_split" else -1
    return [PochFactor(h, xs, sgn), PochFactor(h, first, -sgn), PochFactor(h, rest, -sgn)]


def _operator_numeric(kind: str, h, inputs: Sequence[Tuple[Factor, int]], shape: Shape, pt: EvalPoint, tol: float) -> float:
    """Numeric value of ``operator(h)`` applied to a product of functions.

    The operator multiplies each coefficient of the product by a Gamma
    ratio; both are Pochhammer products, so the whole right side is summed
    as one hypergeometric series.
    """
    m, n = shape
    nv = m + n
    blocks = []
    for f, offset in inputs:
        spec = f.spec.as_float()
        term = hyper_term(spec)
        if f.neg_y:
            term = _neg_y_term(term, spec.m)
        blocks.append((term, offset))
    joint = _joint_term(blocks, nv)
    joint = HyperTerm(nv, joint.factors + tuple(_operator_term(kind, float(h), m, n)), joint.sign_weights)
    res = layered_sum(lambda idx: float(term_value(joint, idx)), pt.coords, tol, 400, _ratio_fn(joint))
    return res.value


def _apply_operator(kind: str, s: TruncatedSeries, h) -> TruncatedSeries:
    if kind == "nabla_xy":
        return apply_diagonal_xy(s, h, inverted=False)
    if kind == "delta_xy":
        return apply_diagonal_xy(s, h, inverted=True)
    if kind == "nabla_split":
        return apply_diagonal_split(s, h, inverted=False)
    if kind == "delta_split":
        return apply_diagonal_split(s, h, inverted=True)
    raise ValueError(kind)


# ---------------------------------------------------------------------------
# the two-variable catalogue

# Each entry: multivariable function (lhs of the forward display), x-factor,
# y-factor.  Arguments are functions of the parameter dict P.


@dataclass(frozen=True)
class TwoVar:
    key: str
    family: Family
    slots: Tuple[str, ...]
    big: Callable[[Params], FunctionSpec]
    xfac: Callable[[Params], FunctionSpec]
    yfac: Callable[[Params], FunctionSpec]
    op_display: Tuple[str, str]
    series_display: Tuple[str, str]


def _mk(family: Family, **kw) -> FunctionSpec:
    return FunctionSpec.make(family, **kw)


TWO_VARIABLE = (
    TwoVar(
        "H2",
        Family.HORN_H2,
        ("a", "b", "c", "d", "e"),
        lambda P: _mk(Family.HORN_H2, a=P["a"], b=P["b"], c=P["c"], d=P["d"], e=P["e"]),
        lambda P: gauss(P["a"], P["b"], P["e"]),
        lambda P: gauss(P["c"], P["d"], 1 - P["a"], "y"),
        ("Eq.(314)", "Eq.(315)"),
        ("Eq.(326)", "Eq.(327)"),
    ),
    TwoVar(
        "Eta2",
        Family.HUMBERT_ETA2,
        ("a", "b", "c", "d"),
        lambda P: _mk(Family.HUMBERT_ETA2, a=P["a"], b=P["b"], c=P["c"], d=P["d"]),
        lambda P: gauss(P["a"], P["b"], P["d"]),
        lambda P: pfq([P["c"]], [1 - P["a"]], "y"),
        ("Eq.(316)", "Eq.(317)"),
        ("Eq.(328)", "Eq.(329)"),
    ),
    TwoVar(
        "Eta3",
        Family.HUMBERT_ETA3,
        ("a", "b", "d"),
        lambda P: _mk(Family.HUMBERT_ETA3, a=P["a"], b=P["b"], d=P["d"]),
        lambda P: gauss(P["a"], P["b"], P["d"]),
        lambda P: pfq([], [1 - P["a"]], "y"),
        ("Eq.(318)", "Eq.(319)"),
        ("Eq.(330)", "Eq.(331)"),
    ),
    TwoVar(
        "Eta4",
        Family.HUMBERT_ETA4,
        ("a", "b", "d"),
        lambda P: _mk(Family.HUMBERT_ETA4, a=P["a"], b=P["b"], d=P["d"]),
        lambda P: pfq([P["a"]], [P["d"]]),
        lambda P: pfq([P["b"]], [1 - P["a"]], "y"),
        ("Eq.(320)", "Eq.(321)"),
        ("Eq.(332)", "Eq.(333)"),
    ),
    TwoVar(
        "Eta5",
        Family.HUMBERT_ETA5,
        ("a", "d"),
        lambda P: _mk(Family.HUMBERT_ETA5, a=P["a"], d=P["d"]),
        lambda P: pfq([P["a"]], [P["d"]]),
        lambda P: pfq([], [1 - P["a"]], "y"),
        ("Eq.(322)", "Eq.(323)"),
        ("Eq.(334)", "Eq.(335)"),
    ),
    TwoVar(
        "Eta11",
        Family.HUMBERT_ETA11,
        ("a", "b", "c", "d"),
        lambda P: _mk(Family.HUMBERT_ETA11, a=P["a"], b=P["b"], c=P["c"], d=P["d"]),
        lambda P: pfq([P["a"]], [P["d"]]),
        lambda P: gauss(P["b"], P["c"], 1 - P["a"], "y"),
        ("Eq.(324)", "Eq.(325)"),
        ("Eq.(336)", "Eq.(337)"),
    ),
)

# Displays whose inverse form keeps the product at -y and the big function at +y
# (Eqs. (317) and (325)); the others write the product at +y and the function at -y.
_INV_PRODUCT_AT_MINUS_Y = {"Eta2", "Eta11"}


def _two_var_operator_records(tv: TwoVar) -> List[IdentityRecord]:
    shape = (1, 1)

    def fwd_lhs(P, shape, D, errata):
        return _cached_truncate(tv.big(P), D)

    def fwd_rhs(P, shape, D, errata):
        prod_ = product_series([Factor(tv.xfac(P)), Factor(tv.yfac(P), neg_y=True)], D)
        return _apply_operator("nabla_xy", prod_, P["a"])

    def fwd_lhs_num(P, shape, pt, tol, errata):
        return eval_numeric(tv.big(P), pt, tol).value

    def fwd_rhs_num(P, shape, pt, tol, errata):
        ins = [(Factor(tv.xfac(P)), 0), (Factor(tv.yfac(P), neg_y=True), 1)]
        return _operator_numeric("nabla_xy", P["a"], ins, shape, pt, tol)

    prod_neg = tv.key in _INV_PRODUCT_AT_MINUS_Y

    def inv_lhs(P, shape, D, errata):
        return product_series([Factor(tv.xfac(P)), Factor(tv.yfac(P), neg_y=prod_neg)], D)

    def inv_rhs(P, shape, D, errata):
        big = _cached_truncate(tv.big(P), D)
        if not prod_neg:
            big = negate_y(big)
        return _apply_operator("delta_xy", big, P["a"])

    def inv_lhs_num(P, shape, pt, tol, errata):
        return product_value([(Factor(tv.xfac(P)), "x"), (Factor(tv.yfac(P), neg_y=prod_neg), "y")], pt, tol)

    def inv_rhs_num(P, shape, pt, tol, errata):
        ins = [(Factor(tv.big(P), neg_y=not prod_neg), 0)]
        return _operator_numeric("delta_xy", P["a"], ins, shape, pt, tol)

    common = dict(
        lhs_family=tv.family,
        rhs_kind=OPERATOR_FORM,
        scalar_slots=tv.slots,
        vector_slots=(),
        shapes=(shape,),
    )
    return [
        IdentityRecord(
            id=f"{tv.key}.op",
            display=tv.op_display[0],
            lhs=fwd_lhs,
            rhs=fwd_rhs,
            lhs_num=fwd_lhs_num,
            rhs_num=fwd_rhs_num,
            summary="function = nabla(a) [x-factor * y-factor(-y)]",
            **common,
        ),
        IdentityRecord(
            id=f"{tv.key}.op.inv",
            display=tv.op_display[1],
            lhs=inv_lhs,
            rhs=inv_rhs,
            lhs_num=inv_lhs_num,
            rhs_num=inv_rhs_num,
            summary="x-factor * y-factor = delta(a) function",
            **common,
        ),
    ]


# --- decomposition formulas (two variables) --------------------------------


def bc_weight(k: int, l: int) -> Fraction:
    """Combinatorial weight ``(k-1)! / ((l-1)! l! (k-l)!)`` shared by all expansions."""
    return Fraction(math.factorial(k - 1), math.factorial(l - 1) * math.factorial(l) * math.factorial(k - l))


@dataclass(frozen=True)
class SeriesForm:
    """Transcription of one expansion ``lead + sum_{k>=1} sum_{l=1}^{k} summand``.

    ``weight(P, k, l)`` is the printed coefficient (sign included, the shared
    combinatorial weight excluded); ``exps(k, l)`` the exponents of x and y;
    ``inner(P, k, l)`` the shifted functions, as Factors on x then y (or one
    two-variable Factor).
    """

    lead: Callable[[Params, FrozenSet[str]], Sequence[Factor]]
    weight: Callable[[Params, int, int], Fraction]
    exps: Callable[[int, int], Tuple[int, int]]
    inner: Callable[[Params, int, int], Sequence[Factor]]


def _pairs(D: int, exps: Callable[[int, int], Tuple[int, int]]) -> Iterable[Tuple[int, int]]:
    for k in range(1, D + 1):
        for l in range(1, k + 1):
            if sum(exps(k, l)) <= D:
                yield k, l


def _accumulate(acc: Dict[MultiIndex, Fraction], s: TruncatedSeries, exponent: MultiIndex, scale) -> None:
    for idx, c in s.coeffs.items():
        if c:
            key = tuple(i + e for i, e in zip(idx, exponent))
            acc[key] += scale * c


def _series_exact(form: SeriesForm, P: Params, D: int, errata: FrozenSet[str]) -> TruncatedSeries:
    acc = {idx: Fraction(0) for idx in graded_indices(2, D)}
    _accumulate(acc, product_series(list(form.lead(P, errata)), D), (0, 0), 1)
    for k, l in _pairs(D, form.exps):
        ex = form.exps(k, l)
        rest = D - sum(ex)
        w = bc_weight(k, l) * form.weight(P, k, l)
        _accumulate(acc, product_series(list(form.inner(P, k, l)), rest), ex, w)
    return TruncatedSeries(1, 1, D, acc)


def _factors_value(factors: Sequence[Factor], pt: EvalPoint, tol: float) -> float:
    if len(factors) == 1:
        return product_value([(factors[0], "xy")], pt, tol)
    return product_value([(factors[0], "x"), (factors[1], "y")], pt, tol)


def _outer_numeric(
    layer_value: Callable[[int], float],
    lead: float,
    tol: float,
    max_layers: int = 200,
) -> float:
    """Sum ``lead + sum_k layer_value(k)``, stopping after three negligible k-layers."""
    total = lead
    quiet = 0
    for k in range(1, max_layers + 1):
        term = layer_value(k)
        total += term
        if abs(term) <= tol * max(abs(total), 1e-300):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    from .hyperfun import NonConvergence

    raise NonConvergence(f"outer expansion did not settle within {max_layers} layers")


def _series_numeric(form: SeriesForm, P: Params, pt: EvalPoint, tol: float, errata: FrozenSet[str]) -> float:
    x, y = pt.x[0], pt.y[0]
    lead = _factors_value(form.lead(P, errata), pt, tol)

    scale = max(1.0, abs(lead))

    def layer(k: int) -> float:
        total = 0.0
        for l in range(1, k + 1):
            ex, ey = form.exps(k, l)
            mono = float(bc_weight(k, l) * form.weight(P, k, l)) * x**ex * y**ey
            if mono == 0.0:
                continue
            # a small outer term only needs its inner functions to matching absolute accuracy
            inner_tol = min(1e-6, max(tol, tol * scale / abs(mono)))
            total += mono * _factors_value(form.inner(P, k, l), pt, inner_tol)
        return total

    return _outer_numeric(layer, lead, tol)


def _p(a, k):
    return pochhammer(_q(a), k)


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def _forward_form(tv: TwoVar, num_k, num_l, den_k, den_l, x_shift, y_shift) -> SeriesForm:
    """Forward expansion: (-1)^{k+l} * prod(num)/prod(den) * x^k y^l * X_k(x) Y_l(-y)."""

    def weight(P, k, l):
        top = Fraction(1)
        for name in num_k:
            top *= _p(P[name], k)
        for name in num_l:
            top *= _p(P[name], l)
        bottom = Fraction(1)
        for name in den_k:
            bottom *= _p(P[name], k)
        for name in den_l:
            bottom *= _p(1 - P["a"] if name == "1-a" else P[name], l)
        return _sign(k + l) * top / bottom

    def inner(P, k, l):
        return [Factor(x_shift(P, k)), Factor(y_shift(P, l), neg_y=True)]

    return SeriesForm(
        lead=lambda P, errata: [Factor(tv.xfac(P)), Factor(tv.yfac(P), neg_y=True)],
        weight=weight,
        exps=lambda k, l: (k, l),
        inner=inner,
    )


def _shift(P: Params, **changes) -> Params:
    out = dict(P)
    for name, delta in changes.items():
        out[name] = P[name] + delta
    return out


# Forward expansions, Eqs. (326), (328), (330), (332), (334), (336).
FORWARD_FORMS: Dict[str, SeriesForm] = {
    "H2": _forward_form(
        TWO_VARIABLE[0],
        ["b"], ["c", "d"], ["e"], ["1-a"],
        lambda P, k: gauss(P["a"] + k, P["b"] + k, P["e"] + k),
        lambda P, l: gauss(P["c"] + l, P["d"] + l, 1 - P["a"] + l, "y"),
    ),
    "Eta2": _forward_form(
        TWO_VARIABLE[1],
        ["b"], ["c"], ["d"], ["1-a"],
        lambda P, k: gauss(P["a"] + k, P["b"] + k, P["d"] + k),
        lambda P, l: pfq([P["c"] + l], [1 - P["a"] + l], "y"),
    ),
    "Eta3": _forward_form(
        TWO_VARIABLE[2],
        ["b"], [], ["d"], ["1-a"],
        lambda P, k: gauss(P["a"] + k, P["b"] + k, P["d"] + k),
        lambda P, l: pfq([], [1 - P["a"] + l], "y"),
    ),
    "Eta4": _forward_form(
        TWO_VARIABLE[3],
        [], ["b"], ["d"], ["1-a"],
        lambda P, k: pfq([P["a"] + k], [P["d"] + k]),
        lambda P, l: pfq([P["b"] + l], [1 - P["a"] + l], "y"),
    ),
    "Eta5": _forward_form(
        TWO_VARIABLE[4],
        [], [], ["d"], ["1-a"],
        lambda P, k: pfq([P["a"] + k], [P["d"] + k]),
        lambda P, l: pfq([], [1 - P["a"] + l], "y"),
    ),
    "Eta11": _forward_form(
        TWO_VARIABLE[5],
        [], ["b", "c"], ["d"], ["1-a"],
        lambda P, k: pfq([P["a"] + k], [P["d"] + k]),
        lambda P, l: gauss(P["b"] + l, P["c"] + l, 1 - P["a"] + l, "y"),
    ),
}


def _inverse_form(tv: TwoVar, num_l, num_k, den_l, big_shift, lead_override=None) -> SeriesForm:
    """Inverse expansion: (-1)^{k-l} * prod/((1-a)_k (1-a)_{k-l} prod) * x^l y^k * Big(shifted; x, -y)."""

    def weight(P, k, l):
        top = Fraction(1)
        for name in num_l:
            top *= _p(P[name], l)
        for name in num_k:
            top *= _p(P[name], k)
        bottom = _p(1 - P["a"], k) * _p(1 - P["a"], k - l)
        for name in den_l:
            bottom *= _p(P[name], l)
        return _sign(k - l) * top / bottom

    def lead(P, errata):
        if lead_override is not None:
            return lead_override(P, errata)
        return [Factor(tv.big(P), neg_y=True)]

    return SeriesForm(
        lead=lead,
        weight=weight,
        exps=lambda k, l: (l, k),
        inner=lambda P, k, l: [Factor(big_shift(P, k, l), neg_y=True)],
    )


ETA5_LEAD_ERRATUM = Erratum(
    "eta5-lead-arity",
    "Eq.(335)",
    "leading function printed as H5(a,b;d;x,-y); H5 takes (a;d), registered as H5(a;d;x,-y)",
)


def _eta5_inverse_lead(P: Params, errata: FrozenSet[str]) -> Sequence[Factor]:
    if ETA5_LEAD_ERRATUM.key in errata:
        return [Factor(_mk(Family.HUMBERT_ETA5, a=P["a"], d=P["d"]), neg_y=True)]
    # as printed: numerator list (a, b) over d, i.e. the Humbert series with an extra (b)_m
    return [Factor(_mk(Family.HUMBERT_ETA3, a=P["a"], b=P["b"], d=P["d"]), neg_y=True)]


# Inverse expansions, Eqs. (327), (329), (331), (333), (335), (337).
INVERSE_FORMS: Dict[str, SeriesForm] = {
    "H2": _inverse_form(
        TWO_VARIABLE[0],
        ["b"], ["c", "d"], ["e"],
        lambda P, k, l: _mk(
            Family.HORN_H2, a=P["a"] - k + l, b=P["b"] + l, c=P["c"] + k, d=P["d"] + k, e=P["e"] + l
        ),
    ),
    "Eta2": _inverse_form(
        TWO_VARIABLE[1],
        ["b"], ["c"], ["d"],
        lambda P, k, l: _mk(Family.HUMBERT_ETA2, a=P["a"] - k + l, b=P["b"] + l, c=P["c"] + k, d=P["d"] + l),
    ),
    "Eta3": _inverse_form(
        TWO_VARIABLE[2],
        ["b"], [], ["d"],
        lambda P, k, l: _mk(Family.HUMBERT_ETA3, a=P["a"] - k + l, b=P["b"] + l, d=P["d"] + l),
    ),
    "Eta4": _inverse_form(
        TWO_VARIABLE[3],
        [], ["b"], ["d"],
        lambda P, k, l: _mk(Family.HUMBERT_ETA4, a=P["a"] - k + l, b=P["b"] + k, d=P["d"] + l),
    ),
    "Eta5": _inverse_form(
        TWO_VARIABLE[4],
        [], [], ["d"],
        lambda P, k, l: _mk(Family.HUMBERT_ETA5, a=P["a"] - k + l, d=P["d"] + l),
        lead_override=_eta5_inverse_lead,
    ),
    "Eta11": _inverse_form(
        TWO_VARIABLE[5],
        [], ["b", "c"], ["d"],
        lambda P, k, l: _mk(Family.HUMBERT_ETA11, a=P["a"] - k + l, b=P["b"] + k, c=P["c"] + k, d=P["d"] + l),
    ),
}


def _two_var_series_records(tv: TwoVar) -> List[IdentityRecord]:
    fwd, inv = FORWARD_FORMS[tv.key], INVERSE_FORMS[tv.key]
    shape = (1, 1)

    def big_lhs(P, shape, D, errata):
        return _cached_truncate(tv.big(P), D)

    def big_lhs_num(P, shape, pt, tol, errata):
        return eval_numeric(tv.big(P), pt, tol).value

    def prod_lhs(P, shape, D, errata):
        return product_series([Factor(tv.xfac(P)), Factor(tv.yfac(P))], D)

    def prod_lhs_num(P, shape, pt, tol, errata):
        return product_value([(Factor(tv.xfac(P)), "x"), (Factor(tv.yfac(P)), "y")], pt, tol)

    slots = tv.slots
    if tv.key == "Eta5":
        # the printed leading term mentions b; keep a slot for the negative control
        slots_inv = slots + ("b",)
    else:
        slots_inv = slots
    inv_errata = (ETA5_LEAD_ERRATUM,) if tv.key == "Eta5" else ()
    return [
        IdentityRecord(
            id=f"{tv.key}.series",
            lhs_family=tv.family,
            rhs_kind=SERIES_FORM,
            display=tv.series_display[0],
            scalar_slots=slots,
            vector_slots=(),
            shapes=(shape,),
            lhs=big_lhs,
            rhs=lambda P, shape, D, errata: _series_exact(fwd, P, D, errata),
            lhs_num=big_lhs_num,
            rhs_num=lambda P, shape, pt, tol, errata: _series_numeric(fwd, P, pt, tol, errata),
            summary="function = x-factor * y-factor(-y) + sum_k sum_l ...",
        ),
        IdentityRecord(
            id=f"{tv.key}.series.inv",
            lhs_family=tv.family,
            rhs_kind=SERIES_FORM,
            display=tv.series_display[1],
            scalar_slots=slots_inv,
            vector_slots=(),
            shapes=(shape,),
            lhs=prod_lhs,
            rhs=lambda P, shape, D, errata: _series_exact(inv, P, D, errata),
            lhs_num=prod_lhs_num,
            rhs_num=lambda P, shape, pt, tol, errata: _series_numeric(inv, P, pt, tol, errata),
            errata=inv_errata,
            summary="x-factor * y-factor = function(x, -y) + sum_k sum_l ...",
        ),
    ]


# ---------------------------------------------------------------------------
# multivariable identities: Lauricella split operators and the triangular-sum expansion of F_A


def _fa_tail(P: Params) -> FunctionSpec:
    b, c = P["b"], P["c"]
    return _fa(P["a"], b[1:], c[1:])


def _fa_op_lhs(P, shape, D, errata):
    return _cached_truncate(_fa(P["a"], P["b"], P["c"]), D)


def _fa_op_rhs(P, shape, D, errata):
    m = shape[0]
    first = Factor(gauss(P["a"], P["b"][0], P["c"][0]))
    s = _factor_series(first, D)
    if m > 1:
        s = outer(s, _factor_series(Factor(_fa_tail(P)), D))
    return apply_diagonal_split(s, P["a"])


def _fa_op_rhs_num(P, shape, pt, tol, errata):
    ins = [(Factor(gauss(P["a"], P["b"][0], P["c"][0])), 0)]
    if shape[0] > 1:
        ins.append((Factor(_fa_tail(P)), 1))
    return _operator_numeric("nabla_split", P["a"], ins, shape, pt, tol)


def _fa_lhs_num(P, shape, pt, tol, errata):
    return eval_numeric(_fa(P["a"], P["b"], P["c"]), pt, tol).value


def _fb_spec(P: Params, lo: int = 0) -> FunctionSpec:
    return _fb(P["c"][lo:], P["b"][lo:], P["a"])


def _fb_op_lhs(P, shape, D, errata):
    return _cached_truncate(_fb_spec(P), D)


def _fb_op_rhs(P, shape, D, errata):
    s = _factor_series(Factor(gauss(P["c"][0], P["b"][0], P["a"])), D)
    if shape[0] > 1:
        s = outer(s, _factor_series(Factor(_fb_spec(P, 1)), D))
    return apply_diagonal_split(s, P["a"], inverted=True)


def _fb_op_rhs_num(P, shape, pt, tol, errata):
    ins = [(Factor(gauss(P["c"][0], P["b"][0], P["a"])), 0)]
    if shape[0] > 1:
        ins.append((Factor(_fb_spec(P, 1)), 1))
    return _operator_numeric("delta_split", P["a"], ins, shape, pt, tol)


def _fb_lhs_num(P, shape, pt, tol, errata):
    return eval_numeric(_fb_spec(P), pt, tol).value


# Index functions over the triangular family n[i, j], 2 <= i <= j <= m.


def triangle_keys(m: int) -> Tuple[Tuple[int, int], ...]:
    return tuple((i, j) for i in range(2, m + 1) for j in range(i, m + 1))


def index_M(nij: Mapping[Tuple[int, int], int], l: int, k: int, m: int) -> int:
    """``M_l(k, m) = sum_{i=l}^{k} n[i,k] + sum_{i=k+1}^{m} n[k+1,i]``."""
    return sum(nij.get((i, k), 0) for i in range(l, k + 1)) + sum(
        nij.get((k + 1, i), 0) for i in range(k + 1, m + 1)
    )


def index_N(nij: Mapping[Tuple[int, int], int], l: int, k: int, m: int) -> int:
    """``N_l(k, m) = sum_{i=l}^{k+1} sum_{j=i}^{m} n[i,j]``."""
    return sum(nij.get((i, j), 0) for i in range(l, k + 2) for j in range(i, m + 1))


def triangle_assignments(m: int, max_total: int) -> Iterable[Dict[Tuple[int, int], int]]:
    """Every assignment of the triangular family whose entries sum to at most ``max_total``."""
    keys = triangle_keys(m)
    for total in range(max_total + 1):
        for comp in compositions(total, len(keys)):
            yield dict(zip(keys, comp))


def _triangle_term(P: Params, m: int, nij: Mapping[Tuple[int, int], int]):
    a, b, c = P["a"], P["b"], P["c"]
    Ms = [index_M(nij, 2, k, m) for k in range(1, m + 1)]
    Ns = [index_N(nij, 2, k, m) for k in range(1, m + 1)]
    coef = pochhammer(_q(a), index_N(nij, 2, m, m))
    for v in nij.values():
        coef /= math.factorial(v)
    factors = []
    for k in range(m):
        coef *= pochhammer(_q(b[k]), Ms[k]) / pochhammer(_q(c[k]), Ms[k])
        factors.append(gauss(a + Ns[k], b[k] + Ms[k], c[k] + Ms[k]))
    return coef, tuple(Ms), factors


def _triangle_rhs(P, shape, D, errata):
    m = shape[0]
    acc = {idx: Fraction(0) for idx in graded_indices(m, D)}
    for nij in triangle_assignments(m, D):
        coef, Ms, factors = _triangle_term(P, m, nij)
        if sum(Ms) > D:
            continue
        rest = D - sum(Ms)
        s = _factor_series(Factor(factors[0]), rest)
        for f in factors[1:]:
            s = outer(s, _factor_series(Factor(f), rest))
        _accumulate(acc, s, Ms, coef)
    return TruncatedSeries(m, 0, D, acc)


def _triangle_rhs_num(P, shape, pt, tol, errata):
    m = shape[0]
    keys = triangle_keys(m)

    def values(nij):
        coef, Ms, factors = _triangle_term(P, m, nij)
        v = float(coef)
        for k in range(m):
            v *= pt.x[k] ** Ms[k] * eval_numeric(factors[k], (pt.x[k],), tol).value
        return v

    lead = values({key: 0 for key in keys})

    def layer(total):
        return sum(values(dict(zip(keys, comp))) for comp in compositions(total, len(keys)))

    return _outer_numeric(layer, lead, tol)


def fa_pair_closed_form(P: Params, D: int) -> TruncatedSeries:
    """The m = 2 single sum ``sum_k (a)_k (b1)_k (b2)_k / (k! (c1)_k (c2)_k) x1^k x2^k F F``."""
    a, (b1, b2), (c1, c2) = P["a"], P["b"], P["c"]
    acc = {idx: Fraction(0) for idx in graded_indices(2, D)}
    for k in range(D // 2 + 1):
        w = _p(a, k) * _p(b1, k) * _p(b2, k) / (math.factorial(k) * _p(c1, k) * _p(c2, k))
        rest = D - 2 * k
        s = outer(
            _factor_series(Factor(gauss(a + k, b1 + k, c1 + k)), rest),
            _factor_series(Factor(gauss(a + k, b2 + k, c2 + k)), rest),
        )
        _accumulate(acc, s, (k, k), w)
    return TruncatedSeries(2, 0, D, acc)


# ---------------------------------------------------------------------------
# confluent H_A identities


def _ha_spec(P: Params, n: int) -> FunctionSpec:
    return _ha(P["a"], P["b"], P["c"], n)


def _fa_j(P: Params, n: int) -> List[Factor]:
    return [Factor(_fa(P["a"], P["b"], P["c"])), Factor(_bessel(-P["a"], n))]


def _ha_lhs(P, shape, D, errata):
    return _cached_truncate(_ha_spec(P, shape[1]), D)


def _ha_lhs_num(P, shape, pt, tol, errata):
    return eval_numeric(_ha_spec(P, shape[1]), pt, tol).value


def _fa_j_series(P, shape, D, errata):
    return product_series(_fa_j(P, shape[1]), D)


def _fa_j_num(P, shape, pt, tol, errata):
    fa, j = _fa_j(P, shape[1])
    return product_value([(fa, "x"), (j, "y")], pt, tol)


def _ha_op_rhs(P, shape, D, errata):
    return apply_diagonal_xy(product_series(_fa_j(P, shape[1]), D), P["a"])


def _ha_op_rhs_num(P, shape, pt, tol, errata):
    fa, j = _fa_j(P, shape[1])
    return _operator_numeric("nabla_xy", P["a"], [(fa, 0), (j, shape[0])], shape, pt, tol)


def _ha_op_inv_rhs(P, shape, D, errata):
    return apply_diagonal_xy(_cached_truncate(_ha_spec(P, shape[1]), D), P["a"], inverted=True)


def _ha_op_inv_rhs_num(P, shape, pt, tol, errata):
    return _operator_numeric("delta_xy", P["a"], [(Factor(_ha_spec(P, shape[1])), 0)], shape, pt, tol)


def _pf(a, k):
    return pochhammer(float(a), k)


def _multi_poch(bases: Sequence, idx: Sequence[int], poch=None) -> Fraction:
    poch = poch or _p
    out = 1
    for b, i in zip(bases, idx):
        out *= poch(b, i)
    return out


def _multi_fact(idx: Sequence[int]) -> int:
    return math.prod(math.factorial(i) for i in idx)


def _ha_series_terms(P: Params, shape: Shape, k: int, l: int, exact: bool = True):
    """Summands of the forward H_A expansion for one (k, l): |i| = k, |j| = l.

    With ``exact=False`` the weights are floats (for numeric summation).
    """
    m, n = shape
    a, b, c = P["a"], P["b"], P["c"]
    poch = _p if exact else _pf
    base = Fraction(_sign(k + l) * math.factorial(k) * math.factorial(k - 1), math.factorial(l - 1) * math.factorial(k - l))
    base = (base if exact else float(base)) / poch(1 - _q(a), l)
    for i in compositions(k, m):
        wi = _multi_poch(b, i, poch) / _multi_poch(c, i, poch) / _multi_fact(i)
        fa = _fa(a + k, [bb + ii for bb, ii in zip(b, i)], [cc + ii for cc, ii in zip(c, i)])
        jb = _bessel(-a + l, n)
        for j in compositions(l, n):
            yield base * wi / _multi_fact(j), i + j, [Factor(fa), Factor(jb)]


HA_INV_ERRATA = (
    Erratum("xy-argument", "Eq.(456)", "trailing H_A printed with argument (x); registered with (x,y)"),
    Erratum(
        "no-bessel-factor",
        "Eq.(456)",
        "summand printed with an extra factor J_{-a+k}(y); the y-derivatives of H_A leave no Bessel factor",
    ),
    Erratum(
        "parameter-shift",
        "Eq.(456)",
        "summand H_A printed with b, c unshifted; registered with b+i, c+i, as in the Eta3 inverse expansion",
    ),
    Erratum("sign", "Eq.(456)", "summand printed without sign; registered with (-1)^k, as in the Eta3 inverse expansion at y -> -y"),
)
HA_INV_ERRATUM_KEYS = frozenset(e.key for e in HA_INV_ERRATA)


def _ha_inv_terms(P: Params, shape: Shape, k: int, l: int, errata: FrozenSet[str], exact: bool = True):
    """Summands of the inverse H_A expansion for one (k, l): |i| = l, |j| = k."""
    m, n = shape
    a, b, c = P["a"], P["b"], P["c"]
    poch = _p if exact else _pf
    base = Fraction(math.factorial(k) * math.factorial(k - 1), math.factorial(l - 1) * math.factorial(k - l))
    base = (base if exact else float(base)) * poch(a, l - k) / poch(1 - _q(a), k)
    if "sign" in errata:
        base *= _sign(k)
    shift = "parameter-shift" in errata
    for i in compositions(l, m):
        wi = _multi_poch(b, i, poch) / _multi_poch(c, i, poch) / _multi_fact(i)
        bi = [bb + ii for bb, ii in zip(b, i)] if shift else list(b)
        ci = [cc + ii for cc, ii in zip(c, i)] if shift else list(c)
        ha = _ha(a + l - k, bi, ci, n)
        factors = [Factor(ha)]
        if "no-bessel-factor" not in errata:
            factors.append(Factor(_bessel(-a + k, n)))
        for j in compositions(k, n):
            yield base * wi / _multi_fact(j), i + j, factors


def _restrict_x(s: TruncatedSeries) -> TruncatedSeries:
    """Keep only the y-degree-zero part (the function read at (x) rather than (x, y))."""
    return s._with({idx: (c if not any(idx[s.m :]) else c * 0) for idx, c in s.coeffs.items()})


def _ha_expansion_exact(P, shape, D, lead_factors, terms, ha_restrict=False) -> TruncatedSeries:
    m, n = shape
    acc = {idx: Fraction(0) for idx in graded_indices(m + n, D)}
    _accumulate(acc, product_series(lead_factors, D), (0,) * (m + n), 1)
    for k in range(1, D + 1):
        for l in range(1, k + 1):
            if k + l > D:
                continue
            rest = D - k - l
            for w, exps, factors in terms(k, l):
                if len(factors) == 1:
                    s = _factor_series(factors[0], rest)
                    if ha_restrict:
                        s = _restrict_x(s)
                else:
                    first = _factor_series(factors[0], rest)
                    if ha_restrict:
                        first = _restrict_x(first)
                    s = _mul_same(first, _factor_series(factors[1], rest)) if factors[0].spec.n else product_series(factors, rest)
                _accumulate(acc, s, exps, w)
    return TruncatedSeries(m, n, D, acc)


def _mul_same(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Product of an (m, n) series with a pure y-block (0, n) series."""
    from .tps import multiply

    pad = {}
    for idx in a.coeffs:
        yb = idx[a.m :]
        pad[idx] = b.coeffs[yb] if not any(idx[: a.m]) else b.coeffs[yb] * 0
    return multiply(a, TruncatedSeries(a.m, a.n, a.degree, pad))


def _ha_series_rhs(P, shape, D, errata):
    return _ha_expansion_exact(P, shape, D, _fa_j(P, shape[1]), lambda k, l: _ha_series_terms(P, shape, k, l))


def _ha_series_inv_rhs(P, shape, D, errata):
    restrict = "xy-argument" not in errata
    return _ha_expansion_exact(
        P,
        shape,
        D,
        [Factor(_ha_spec(P, shape[1]))],
        lambda k, l: _ha_inv_terms(P, shape, k, l, errata),
        ha_restrict=restrict,
    )


def _freeze(P: Params) -> Tuple:
    return tuple(sorted((k, tuple(v) if isinstance(v, (list, tuple)) else v) for k, v in P.items()))


@lru_cache(maxsize=4096)
def _ha_layer_groups(kind: str, frozen: Tuple, shape: Shape, k: int, errata: FrozenSet[str]):
    """Summands of outer layer ``k`` grouped by their function factors, weights as floats."""
    P = dict(frozen)
    groups: Dict[tuple, List[Tuple[float, MultiIndex]]] = {}
    for l in range(1, k + 1):
        if kind == "fwd":
            terms = _ha_series_terms(P, shape, k, l, exact=False)
        else:
            terms = _ha_inv_terms(P, shape, k, l, errata, exact=False)
        for w, exps, factors in terms:
            groups.setdefault(tuple(factors), []).append((w, exps))
    return tuple((factors, tuple(members)) for factors, members in groups.items())


def _ha_expansion_numeric(P, shape, pt, tol, lead: float, kind: str, errata) -> float:
    coords = pt.coords
    restrict = "xy-argument" not in errata
    at_x = EvalPoint(pt.x, tuple(0.0 for _ in pt.y))
    frozen = _freeze(P)

    def factor_value(f: Factor, inner_tol: float) -> float:
        if f.spec.family is Family.BESSEL_JN:
            return product_value([(f, "y")], pt, inner_tol)
        if f.spec.family is Family.LAURICELLA_FA:
            return product_value([(f, "x")], pt, inner_tol)
        return product_value([(f, "xy")], at_x if restrict else pt, inner_tol)

    def layer(k):
        total = 0.0
        for factors, members in _ha_layer_groups(kind, frozen, shape, k, errata):
            acc = 0.0
            big = 0.0
            for w, exps in members:
                mono = w * math.prod(v**e for v, e in zip(coords, exps))
                acc += mono
                big = max(big, abs(mono))
            if big == 0.0:
                continue
            # each summand only needs absolute accuracy ~ tol
            inner_tol = min(1e-6, max(tol, tol / big))
            val = acc
            for f in factors:
                val *= factor_value(f, inner_tol)
            total += val
        return total

    return _outer_numeric(layer, lead, tol)


def _ha_series_rhs_num(P, shape, pt, tol, errata):
    lead = _fa_j_num(P, shape, pt, tol, errata)
    return _ha_expansion_numeric(P, shape, pt, tol, lead, "fwd", HA_INV_ERRATUM_KEYS)


def _ha_series_inv_rhs_num(P, shape, pt, tol, errata):
    lead = _ha_lhs_num(P, shape, pt, tol, errata)
    return _ha_expansion_numeric(P, shape, pt, tol, lead, "inv", frozenset(errata))


def ha_limit_value(P: Params, shape: Shape, pt: EvalPoint, eps: float, tol: float = 1e-15) -> float:
    """Erdelyi function with d = e = 1/eps and y scaled by eps**2 (tends to H_A as eps -> 0)."""
    m, n = shape
    big = Fraction(1) / Fraction(eps).limit_denominator(10**12)
    spec = FunctionSpec.make(
        Family.ERDELYI_H,
        (m, n),
        a=P["a"],
        b=tuple(P["b"]),
        c=tuple(P["c"]),
        d=(big,) * n,
        e=(big,) * n,
    )
    scaled = EvalPoint(pt.x, tuple(v * eps * eps for v in pt.y))
    return eval_numeric(spec, scaled, tol).value


# ---------------------------------------------------------------------------
# registry


def _build_registry() -> Dict[str, IdentityRecord]:
    records: List[IdentityRecord] = []
    for tv in TWO_VARIABLE:
        records.extend(_two_var_operator_records(tv))
    for tv in TWO_VARIABLE:
        records.extend(_two_var_series_records(tv))
    fa_shapes = ((2, 0), (3, 0))
    vec_x = (("b", "x"), ("c", "x"))
    records.append(
        IdentityRecord(
            id="FA.op",
            lhs_family=Family.LAURICELLA_FA,
            rhs_kind=OPERATOR_FORM,
            display="Eq.(241)",
            scalar_slots=("a",),
            vector_slots=vec_x,
            shapes=fa_shapes,
            lhs=_fa_op_lhs,
            rhs=_fa_op_rhs,
            lhs_num=_fa_lhs_num,
            rhs_num=_fa_op_rhs_num,
            summary="F_A(m) = nabla_split(a) [F(x1) F_A(m-1)(x2..xm)]",
        )
    )
    records.append(
        IdentityRecord(
            id="FB.op",
            lhs_family=Family.LAURICELLA_FB,
            rhs_kind=OPERATOR_FORM,
            display="Eq.(241b)",
            scalar_slots=("a",),
            vector_slots=vec_x,
            shapes=fa_shapes,
            lhs=_fb_op_lhs,
            rhs=_fb_op_rhs,
            lhs_num=_fb_lhs_num,
            rhs_num=_fb_op_rhs_num,
            summary="F_B(m) = delta_split(a) [F(x1) F_B(m-1)(x2..xm)]",
        )
    )
    records.append(
        IdentityRecord(
            id="FA.lemma1",
            lhs_family=Family.LAURICELLA_FA,
            rhs_kind=SERIES_FORM,
            display="Eq.(e28)",
            scalar_slots=("a",),
            vector_slots=vec_x,
            shapes=fa_shapes,
            lhs=_fa_op_lhs,
            rhs=_triangle_rhs,
            lhs_num=_fa_lhs_num,
            rhs_num=_triangle_rhs_num,
            summary="F_A(m) = sum over n[i,j] of products of Gauss functions",
        )
    )
    ha_shapes = ((1, 1), (2, 1), (1, 2), (2, 2))
    common = dict(lhs_family=Family.CONFLUENT_HA, scalar_slots=("a",), vector_slots=vec_x, shapes=ha_shapes)
    records.extend(
        [
            IdentityRecord(
                id="HA.op", rhs_kind=OPERATOR_FORM, display="Eq.(46)",
                lhs=_ha_lhs, rhs=_ha_op_rhs, lhs_num=_ha_lhs_num, rhs_num=_ha_op_rhs_num,
                summary="H_A = nabla(a) [F_A(x) J_{-a}(y)]", **common,
            ),
            IdentityRecord(
                id="HA.op.inv", rhs_kind=OPERATOR_FORM, display="Eq.(47)",
                lhs=_fa_j_series, rhs=_ha_op_inv_rhs, lhs_num=_fa_j_num, rhs_num=_ha_op_inv_rhs_num,
                summary="F_A(x) J_{-a}(y) = delta(a) H_A", **common,
            ),
            IdentityRecord(
                id="HA.series", rhs_kind=SERIES_FORM, display="Eq.(455)",
                lhs=_ha_lhs, rhs=_ha_series_rhs, lhs_num=_ha_lhs_num, rhs_num=_ha_series_rhs_num,
                summary="H_A = F_A J_{-a} + sum_k sum_l sum_M ...", **common,
            ),
            IdentityRecord(
                id="HA.series.inv", rhs_kind=SERIES_FORM, display="Eq.(456)",
                lhs=_fa_j_series, rhs=_ha_series_inv_rhs, lhs_num=_fa_j_num, rhs_num=_ha_series_inv_rhs_num,
                errata=HA_INV_ERRATA,
                summary="F_A J_{-a} = H_A + sum_k sum_l sum_N ...", **common,
            ),
        ]
    )
    return {r.id: r for r in records}


REGISTRY: Dict[str, IdentityRecord] = _build_registry()


def list_identities() -> List[IdentityRecord]:
    return list(REGISTRY.values())


def get_identity(identity_id: str) -> IdentityRecord:
    try:
        return REGISTRY[identity_id]
    except KeyError:
        raise UnknownIdentity(identity_id) from None


def _errata_for(rec: IdentityRecord, errata: Optional[Iterable[str]]) -> FrozenSet[str]:
    return rec.erratum_keys if errata is None else frozenset(errata)


def default_shape(rec: IdentityRecord) -> Shape:
    return rec.shapes[0]


def build_lhs(identity_id: str, params: Params, D: int, shape: Optional[Shape] = None, errata=None) -> TruncatedSeries:
    rec = get_identity(identity_id)
    return rec.lhs(params, shape or default_shape(rec), D, _errata_for(rec, errata))


def build_rhs_operator(identity_id: str, params: Params, D: int, shape: Optional[Shape] = None) -> TruncatedSeries:
    rec = get_identity(identity_id)
    if rec.rhs_kind != OPERATOR_FORM:
        raise ValueError(f"{identity_id} is not an operator identity")
    return rec.rhs(params, shape or default_shape(rec), D, rec.erratum_keys)


def build_rhs_series(
    identity_id: str, params: Params, D: int, shape: Optional[Shape] = None, errata=None
) -> TruncatedSeries:
    rec = get_identity(identity_id)
    if rec.rhs_kind != SERIES_FORM:
        raise ValueError(f"{identity_id} is not a series decomposition")
    return rec.rhs(params, shape or default_shape(rec), D, _errata_for(rec, errata))


def build_rhs(identity_id: str, params: Params, D: int, shape: Optional[Shape] = None, errata=None) -> TruncatedSeries:
    rec = get_identity(identity_id)
    return rec.rhs(params, shape or default_shape(rec), D, _errata_for(rec, errata))


def _point(pt, shape: Shape) -> EvalPoint:
    if isinstance(pt, EvalPoint):
        return pt
    coords = tuple(float(v) for v in pt)
    return EvalPoint(coords[: shape[0]], coords[shape[0] :])


def build_lhs_numeric(identity_id: str, params: Params, pt, tol: float = INNER_TOL, shape=None, errata=None) -> float:
    rec = get_identity(identity_id)
    shape = shape or default_shape(rec)
    return rec.lhs_num(params, shape, _point(pt, shape), tol, _errata_for(rec, errata))


def build_rhs_numeric(identity_id: str, params: Params, pt, tol: float = INNER_TOL, shape=None, errata=None) -> float:
    rec = get_identity(identity_id)
    shape = shape or default_shape(rec)
    return rec.rhs_num(params, shape, _point(pt, shape), tol, _errata_for(rec, errata))
