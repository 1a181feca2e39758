"""Exact Pochhammer symbols and the Gamma-ratio eigenvalues of the symbolic operators.

Every operator in this package is a Gamma ratio in Euler operators
``x_i d/dx_i``.  On a monomial those operators are scalars, so each operator
reduces to a number that depends only on block degrees.  The numbers are
computed from Pochhammer recurrences, never from a floating Gamma function.

The Pochhammer routines are generic: they accept :class:`fractions.Fraction`
(exact verification) or ``float`` (numeric evaluation).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

Scalar = Union[Fraction, float]


class PoleError(ArithmeticError):
    """A Pochhammer symbol or Gamma ratio hit a pole."""

    def __init__(self, message: str, *, where: object = None) -> None:
        super().__init__(message)
        self.where = where


def as_rational(value: object) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected so the exact/numeric boundary stays explicit.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def pochhammer(a: Scalar, k: int) -> Scalar:
    """Signed Pochhammer symbol ``Gamma(a + k) / Gamma(a)``.

    ``k >= 0`` gives the rising product ``a (a+1) ... (a+k-1)``.  Negative
    ``k = -n`` gives ``1 / ((a-1)(a-2)...(a-n))``, which equals
    ``(-1)**n / (1-a)_n``.

    >>> pochhammer(Fraction(1, 2), 3)
    Fraction(15, 8)
    >>> pochhammer(Fraction(3), -2)
    Fraction(1, 2)
    """
    one = Fraction(1) if isinstance(a, (Fraction, int)) else 1.0
    result = one
    if k >= 0:
        for j in range(k):
            result *= a + j
        return result
    for j in range(1, -k + 1):
        factor = a - j
        if factor == 0:
            raise PoleError(f"pochhammer({a}, {k}) has a pole", where=(a, k))
        result *= factor
    return one / result


@dataclass(frozen=True)
class Eigenvalue:
    """Scalar by which an operator multiplies a monomial; ``value`` is None at a pole."""

    value: Optional[Fraction]
    is_pole: bool = False

    @classmethod
    def pole(cls) -> "Eigenvalue":
        return cls(None, True)

    def unwrap(self, where: object = None) -> Fraction:
        if self.is_pole:
            raise PoleError(f"operator eigenvalue has a pole at {where}", where=where)
        return self.value  # type: ignore[return-value]

    def reciprocal(self) -> "Eigenvalue":
        if self.is_pole or self.value == 0:
            return Eigenvalue.pole()
        return Eigenvalue(1 / self.value)


def _ratio(num: list, den: list) -> Eigenvalue:
    # Each list holds (a, k) Pochhammer arguments; a pole anywhere poisons the ratio.
    try:
        top = Fraction(1)
        for a, k in num:
            top *= pochhammer(a, k)
        bottom = Fraction(1)
        for a, k in den:
            bottom *= pochhammer(a, k)
    except PoleError:
        return Eigenvalue.pole()
    if bottom == 0:
        return Eigenvalue.pole()
    return Eigenvalue(top / bottom)


def nabla_eigen_xy(h: Fraction, p: int, q: int) -> Eigenvalue:
    """Eigenvalue of the x/y-block nabla operator on a monomial of block degrees (p, q).

    ``Gamma(h) Gamma(h+p-q) / (Gamma(h+p) Gamma(h-q)) = (h)_{p-q} / ((h)_p (h)_{-q})``.
    """
    h = Fraction(h)
    return _ratio([(h, p - q)], [(h, p), (h, -q)])


def delta_eigen_xy(h: Fraction, p: int, q: int) -> Eigenvalue:
    """Eigenvalue of the x/y-block delta operator, the reciprocal of :func:`nabla_eigen_xy`."""
    h = Fraction(h)
    return _ratio([(h, p), (h, -q)], [(h, p - q)])


def nabla_eigen_split(h: Fraction, p: int, i1: int, inverted: bool = False) -> Eigenvalue:
    """Eigenvalue of the split operator ``x_1 : x_2, ..., x_m``.

    On a monomial of total degree ``p`` with degree ``i1`` in ``x_1`` the
    nabla form gives ``(h)_p / ((h)_{i1} (h)_{p-i1})``; ``inverted`` returns
    the delta form (the reciprocal).
    """
    if not 0 <= i1 <= p:
        raise ValueError(f"need 0 <= i1 <= p, got i1={i1}, p={p}")
    h = Fraction(h)
    num, den = [(h, p)], [(h, i1), (h, p - i1)]
    if inverted:
        num, den = den, num
    return _ratio(num, den)
