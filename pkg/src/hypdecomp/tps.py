"""Truncated multivariate power series in an x-block and a y-block of variables.

A series stores every coefficient with total degree ``<= degree`` (dense).
Indices are plain tuples: the first ``m`` entries are x-exponents, the
remaining ``n`` are y-exponents.  Coefficients may be Fractions or floats;
nothing here cares which, as long as one series does not mix them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .scalar import PoleError, Scalar, delta_eigen_xy, nabla_eigen_split, nabla_eigen_xy

MultiIndex = Tuple[int, ...]


class ArityError(ValueError):
    """Two series (or a series and an operator) disagree on arity or degree bound."""


@lru_cache(maxsize=None)
def compositions(total: int, parts: int) -> Tuple[MultiIndex, ...]:
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 0:
        return ((),) if total == 0 else ()
    if parts == 1:
        return ((total,),)
    out = []
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def graded_indices(nvars: int, degree: int) -> Tuple[MultiIndex, ...]:
    """All indices of total degree ``<= degree``, ordered by total degree."""
    out: List[MultiIndex] = []
    for d in range(degree + 1):
        out.extend(compositions(d, nvars))
    return tuple(out)


def split_index(idx: MultiIndex, m: int) -> Tuple[MultiIndex, MultiIndex]:
    return idx[:m], idx[m:]


def block_degrees(idx: MultiIndex, m: int) -> Tuple[int, int]:
    return sum(idx[:m]), sum(idx[m:])


def _zero_like(value: Scalar) -> Scalar:
    return 0.0 if isinstance(value, float) else Fraction(0)


@dataclass(frozen=True)
class TruncatedSeries:
    m: int
    n: int
    degree: int
    coeffs: Dict[MultiIndex, Scalar] = field(repr=False)

    @property
    def arity(self) -> Tuple[int, int]:
        return (self.m, self.n)

    @property
    def nvars(self) -> int:
        return self.m + self.n

    def __getitem__(self, idx: Sequence[int]) -> Scalar:
        idx = tuple(idx)
        if len(idx) != self.nvars:
            raise ArityError(f"index {idx} does not have {self.nvars} entries")
        if sum(idx) > self.degree:
            raise IndexError(f"index {idx} exceeds degree bound {self.degree}")
        return self.coeffs[idx]

    def items(self) -> Iterator[Tuple[MultiIndex, Scalar]]:
        return iter(self.coeffs.items())

    def _check(self, other: "TruncatedSeries") -> None:
        if self.arity != other.arity or self.degree != other.degree:
            raise ArityError(
                f"series mismatch: arity {self.arity}/D={self.degree} "
                f"vs arity {other.arity}/D={other.degree}"
            )

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        return self._with({i: c + other.coeffs[i] for i, c in self.coeffs.items()})

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        return self._with({i: c - other.coeffs[i] for i, c in self.coeffs.items()})

    def __neg__(self) -> "TruncatedSeries":
        return self._with({i: -c for i, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return multiply(self, other)
        return self._with({i: c * other for i, c in self.coeffs.items()})

    __rmul__ = __mul__

    def _with(self, coeffs: Dict[MultiIndex, Scalar]) -> "TruncatedSeries":
        return TruncatedSeries(self.m, self.n, self.degree, coeffs)

    def evaluate(self, x: Sequence[Scalar], y: Sequence[Scalar] = ()) -> Scalar:
        """Sum the stored polynomial at a point (exact if the inputs are exact)."""
        point = tuple(x) + tuple(y)
        if len(point) != self.nvars:
            raise ArityError(f"point has {len(point)} coordinates, series has {self.nvars}")
        total = None
        for idx, c in self.coeffs.items():
            if not c:
                continue
            term = c * prod(v**e for v, e in zip(point, idx))
            total = term if total is None else total + term
        return total if total is not None else Fraction(0)


def from_coefficients(
    arity: Tuple[int, int],
    degree: int,
    coeff_fn: Callable[[MultiIndex], Scalar],
) -> TruncatedSeries:
    """Materialize ``coeff_fn`` on every index of total degree ``<= degree``.

    A :class:`PoleError` from ``coeff_fn`` is re-raised naming the index.
    """
    if degree < 0:
        raise ValueError("degree bound must be non-negative")
    m, n = arity
    coeffs = {}
    for idx in graded_indices(m + n, degree):
        try:
            coeffs[idx] = coeff_fn(idx)
        except PoleError as exc:
            raise PoleError(f"pole at index {idx}: {exc}", where=idx) from exc
    return TruncatedSeries(m, n, degree, coeffs)


def constant(arity: Tuple[int, int], degree: int, value: Scalar = Fraction(1)) -> TruncatedSeries:
    zero = _zero_like(value)
    origin = (0,) * sum(arity)
    return from_coefficients(arity, degree, lambda idx: value if idx == origin else zero)


def monomial(
    arity: Tuple[int, int], degree: int, exponent: Sequence[int], value: Scalar = Fraction(1)
) -> TruncatedSeries:
    exponent = tuple(exponent)
    zero = _zero_like(value)
    return from_coefficients(arity, degree, lambda idx: value if idx == exponent else zero)


def multiply(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated to the common degree bound."""
    a._check(b)
    nv = a.nvars
    out = {idx: _zero_like(c) for idx, c in a.coeffs.items()}
    b_nonzero = [(j, c) for j, c in b.coeffs.items() if c]
    for i, ca in a.coeffs.items():
        if not ca:
            continue
        room = a.degree - sum(i)
        for j, cb in b_nonzero:
            if sum(j) > room:
                continue
            k = tuple(i[t] + j[t] for t in range(nv))
            out[k] += ca * cb
    return a._with(out)


def outer(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Product of two series in disjoint variable sets.

    The result has x-block ``a.x + b.x`` and y-block ``a.y + b.y``.  Both
    inputs must carry the same degree bound.
    """
    if a.degree != b.degree:
        raise ArityError(f"degree bounds differ: {a.degree} vs {b.degree}")
    m, n, D = a.m + b.m, a.n + b.n, a.degree
    out: Dict[MultiIndex, Scalar] = {}
    for ia, ca in a.coeffs.items():
        ax, ay = ia[: a.m], ia[a.m :]
        room = D - sum(ia)
        for ib, cb in b.coeffs.items():
            if sum(ib) > room:
                continue
            out[ax + ib[: b.m] + ay + ib[b.m :]] = ca * cb
    return TruncatedSeries(m, n, D, out)


def shift(s: TruncatedSeries, exponent: Sequence[int], degree: Optional[int] = None) -> TruncatedSeries:
    """Multiply by the monomial with the given exponent, truncating to ``degree``.

    ``degree`` defaults to the input's bound; a larger value is allowed so a
    residual-degree series can be lifted back to the working degree.
    """
    exponent = tuple(exponent)
    if len(exponent) != s.nvars:
        raise ArityError(f"exponent {exponent} has wrong length for arity {s.arity}")
    D = s.degree if degree is None else degree
    offset = sum(exponent)
    zero = _zero_like(next(iter(s.coeffs.values())))
    out = {idx: zero for idx in graded_indices(s.nvars, D)}
    for idx, c in s.coeffs.items():
        if sum(idx) + offset <= D:
            out[tuple(i + e for i, e in zip(idx, exponent))] = c
    return TruncatedSeries(s.m, s.n, D, out)


def retruncate(s: TruncatedSeries, degree: int) -> TruncatedSeries:
    """Drop every coefficient above ``degree`` (``degree <= s.degree``)."""
    if degree > s.degree:
        raise ArityError(f"cannot raise degree bound {s.degree} to {degree} without data")
    return TruncatedSeries(s.m, s.n, degree, {i: c for i, c in s.coeffs.items() if sum(i) <= degree})


def negate_y(s: TruncatedSeries) -> TruncatedSeries:
    """Substitute ``y -> -y`` in the y-block."""
    return s._with({i: (-c if sum(i[s.m :]) % 2 else c) for i, c in s.coeffs.items()})


def derivative(s: TruncatedSeries, orders: Sequence[int]) -> TruncatedSeries:
    """Mixed partial derivative; the degree bound drops by the total order."""
    orders = tuple(orders)
    if len(orders) != s.nvars:
        raise ArityError(f"derivative orders {orders} do not match arity {s.arity}")
    total = sum(orders)
    D = max(s.degree - total, 0)
    out = {}
    for idx in graded_indices(s.nvars, D):
        src = tuple(i + o for i, o in zip(idx, orders))
        if sum(src) > s.degree:
            out[idx] = _zero_like(s.coeffs[idx])
            continue
        weight = prod(factorial(i + o) // factorial(i) for i, o in zip(idx, orders))
        out[idx] = s.coeffs[src] * weight
    return TruncatedSeries(s.m, s.n, D, out)


def _eigen_scale(s: TruncatedSeries, eigen: Callable[[MultiIndex], object], label: str) -> TruncatedSeries:
    cache: Dict[object, Scalar] = {}
    out = {}
    for idx, c in s.coeffs.items():
        key, ev = eigen(idx)
        if key not in cache:
            cache[key] = ev().unwrap(where=(label,) + key)
        val = cache[key]
        out[idx] = c * (float(val) if isinstance(c, float) else val)
    return s._with(out)


def apply_diagonal_xy(s: TruncatedSeries, h: Fraction, inverted: bool = False) -> TruncatedSeries:
    """Apply the x/y-block nabla (or delta when ``inverted``) operator with parameter ``h``."""
    fn = delta_eigen_xy if inverted else nabla_eigen_xy

    def eigen(idx):
        p, q = block_degrees(idx, s.m)
        return (h, p, q), lambda: fn(h, p, q)

    return _eigen_scale(s, eigen, "delta_xy" if inverted else "nabla_xy")


def apply_diagonal_split(s: TruncatedSeries, h: Fraction, inverted: bool = False) -> TruncatedSeries:
    """Apply the split operator ``x_1 : x_2, ..., x_m`` (pure x-block series only)."""
    if s.n != 0:
        raise ArityError(f"split operator needs a pure x-block series, got arity {s.arity}")
    if s.m == 0:
        return s

    def eigen(idx):
        p, i1 = sum(idx), idx[0]
        return (h, p, i1), lambda: nabla_eigen_split(h, p, i1, inverted)

    return _eigen_scale(s, eigen, "delta_split" if inverted else "nabla_split")


def operator_pochhammer_brute(s: TruncatedSeries, k: int, block: str) -> TruncatedSeries:
    """Apply a Pochhammer of a block Euler operator through explicit derivatives.

    ``block="x"`` computes ``(-(d_1 + ... + d_m))_k f`` as
    ``(-1)^k k! sum_{|i|=k} x^i/i! D^i f``.
    ``block="y"`` computes ``(s_1 + ... + s_n)_k f`` as
    ``k! sum_{l=1..k} C(k-1, l-1) sum_{|j|=l} y^j/j! D^j f`` (``f`` itself when k = 0).
    Here ``d_i = x_i d/dx_i`` and ``s_j = y_j d/dy_j``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if block not in ("x", "y"):
        raise ValueError(f"block must be 'x' or 'y', got {block!r}")
    width = s.m if block == "x" else s.n
    if k == 0:
        return s
    if width == 0:
        # empty Euler sum is the zero operator and (0)_k = 0 for k >= 1
        return s * 0

    def pad(part: MultiIndex) -> MultiIndex:
        return part + (0,) * s.n if block == "x" else (0,) * s.m + part

    def euler_term(part: MultiIndex) -> TruncatedSeries:
        exps = pad(part)
        lifted = shift(derivative(s, exps), exps, degree=s.degree)
        return lifted * Fraction(1, prod(factorial(e) for e in exps))

    acc = s * 0
    if block == "x":
        for part in compositions(k, width):
            acc = acc + euler_term(part)
        return acc * ((-1) ** k * factorial(k))
    for l in range(1, k + 1):
        layer = s * 0
        for part in compositions(l, width):
            layer = layer + euler_term(part)
        acc = acc + layer * comb(k - 1, l - 1)
    return acc * factorial(k)


@dataclass(frozen=True)
class ComparisonReport:
    equal: bool
    mismatches: List[Tuple[MultiIndex, Scalar, Scalar]]

    @property
    def max_discrepancy(self) -> Scalar:
        if not self.mismatches:
            return Fraction(0)
        return max(abs(a - b) for _, a, b in self.mismatches)

    def first(self, count: int = 5) -> List[Tuple[MultiIndex, Scalar, Scalar]]:
        return self.mismatches[:count]


def compare_series(a: TruncatedSeries, b: TruncatedSeries) -> ComparisonReport:
    """Exact coefficient-by-coefficient comparison, listing every differing index."""
    a._check(b)
    bad = [(idx, ca, b.coeffs[idx]) for idx, ca in a.coeffs.items() if ca != b.coeffs[idx]]
    return ComparisonReport(not bad, bad)
