"""Exact SU(2) angular-momentum algebra.

Half-integers are carried as doubled integers so that selection rules are
decided exactly; Clebsch-Gordan coefficients and 6-j symbols are evaluated
with :class:`fractions.Fraction` arithmetic and converted to ``float`` once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from numbers import Real
from typing import Union

__all__ = [
    "HalfInt",
    "half",
    "dim",
    "triangle_ok",
    "clebsch_gordan",
    "wigner_6j",
    "spin_values",
    "projections",
]


@dataclass(frozen=True, order=True)
class HalfInt:
    """An exact half-integer, stored as ``twice_value = 2 * value``."""

    twice_value: int

    def __post_init__(self):
        if not isinstance(self.twice_value, int):
            raise TypeError(f"twice_value must be int, got {type(self.twice_value).__name__}")

    @classmethod
    def of(cls, value: "SpinLike") -> "HalfInt":
        return cls(_twice(value))

    @property
    def value(self) -> float:
        return self.twice_value / 2

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __float__(self) -> float:
        return self.value

    def __add__(self, other):
        return HalfInt(self.twice_value + _twice(other))

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInt(self.twice_value - _twice(other))

    def __rsub__(self, other):
        return HalfInt(_twice(other) - self.twice_value)

    def __neg__(self):
        return HalfInt(-self.twice_value)

    def __eq__(self, other):
        if isinstance(other, HalfInt):
            return self.twice_value == other.twice_value
        try:
            return self.twice_value == _twice(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(("HalfInt", self.twice_value))

    def __repr__(self):
        if self.is_integer:
            return f"HalfInt({self.twice_value // 2})"
        return f"HalfInt({self.twice_value}/2)"

    def __str__(self):
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


SpinLike = Union[HalfInt, int, float, Fraction]


def _twice(value) -> int:
    """Doubled-integer form of a half-integer; raises on anything else."""
    if isinstance(value, HalfInt):
        return value.twice_value
    if isinstance(value, bool):
        raise TypeError("bool is not a half-integer")
    if isinstance(value, int):
        return 2 * value
    if isinstance(value, (Fraction, Real)):
        doubled = 2 * Fraction(value)
        if doubled.denominator != 1:
            raise ValueError(f"{value!r} is not a half-integer")
        return int(doubled)
    raise TypeError(f"cannot interpret {value!r} as a half-integer")


def half(twice_value: int) -> HalfInt:
    """``half(1)`` is j = 1/2, ``half(2)`` is j = 1."""
    return HalfInt(twice_value)


def dim(j: SpinLike) -> int:
    """Dimension ``2j + 1`` of the spin-j irrep."""
    tj = _twice(j)
    if tj < 0:
        raise ValueError(f"angular momentum must be non-negative, got {tj}/2")
    return tj + 1


def spin_values(truncation: SpinLike) -> list[HalfInt]:
    """All j = 0, 1/2, ..., truncation."""
    return [HalfInt(t) for t in range(_twice(truncation) + 1)]


def projections(j: SpinLike) -> list[HalfInt]:
    """Projections m = -j, -j+1, ..., j."""
    tj = _twice(j)
    return [HalfInt(tm) for tm in range(-tj, tj + 1, 2)]


def _triangle2(a: int, b: int, c: int) -> bool:
    return a >= 0 and b >= 0 and c >= 0 and abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0


def triangle_ok(a: SpinLike, b: SpinLike, c: SpinLike) -> bool:
    """True iff (a, b, c) can couple: ``|a-b| <= c <= a+b`` with ``a+b+c`` integral."""
    return _triangle2(_twice(a), _twice(b), _twice(c))


def _fact(n2: int) -> int:
    # n2 is a doubled, even, non-negative argument
    return math.factorial(n2 // 2)


def _delta_sq(a: int, b: int, c: int) -> Fraction:
    return Fraction(
        _fact(a + b - c) * _fact(a - b + c) * _fact(-a + b + c), _fact(a + b + c + 2)
    )


def _signed_sqrt(x: Fraction, sign: int) -> float:
    return sign * math.sqrt(x)


@lru_cache(maxsize=None)
def _cg2(j1: int, m1: int, j2: int, m2: int, J: int, M: int) -> float:
    if M != m1 + m2 or not _triangle2(j1, j2, J):
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(M) > J:
        return 0.0
    if (j1 + m1) % 2 or (j2 + m2) % 2 or (J + M) % 2:
        return 0.0
    pref = Fraction(J + 1) * _delta_sq(j1, j2, J)
    pref *= (
        _fact(J + M) * _fact(J - M) * _fact(j1 - m1) * _fact(j1 + m1) * _fact(j2 - m2) * _fact(j2 + m2)
    )
    # doubled summation bounds; k runs over integers, step 2 in doubled units
    kmin = max(0, j2 - J - m1, j1 - J + m2)
    kmax = min(j1 + j2 - J, j1 - m1, j2 + m2)
    total = Fraction(0)
    for k in range(kmin, kmax + 1, 2):
        denom = (
            _fact(k)
            * _fact(j1 + j2 - J - k)
            * _fact(j1 - m1 - k)
            * _fact(j2 + m2 - k)
            * _fact(J - j2 + m1 + k)
            * _fact(J - j1 - m2 + k)
        )
        term = Fraction(1, denom)
        total += -term if (k // 2) % 2 else term
    if total == 0:
        return 0.0
    return _signed_sqrt(total * total * pref, 1 if total > 0 else -1)


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """Condon-Shortley coefficient ``<j1 m1; j2 m2 | J M>``.

    Selection-rule violations give 0 rather than raising.
    """
    return _cg2(_twice(j1), _twice(m1), _twice(j2), _twice(m2), _twice(J), _twice(M))


def _racah_6j(a: int, b: int, c: int, d: int, e: int, f: int) -> float:
    """Racah's single-sum formula on doubled arguments."""
    triads = ((a, b, c), (a, e, f), (d, b, f), (d, e, c))
    if not all(_triangle2(*t) for t in triads):
        return 0.0
    pref = Fraction(1)
    for t in triads:
        pref *= _delta_sq(*t)
    sums = [sum(t) for t in triads]
    quads = (a + b + d + e, b + c + e + f, c + a + f + d)
    total = Fraction(0)
    for t in range(max(sums), min(quads) + 1, 2):
        denom = _fact(quads[0] - t) * _fact(quads[1] - t) * _fact(quads[2] - t)
        for s in sums:
            denom *= _fact(t - s)
        term = Fraction(_fact(t + 2), denom)
        total += -term if (t // 2) % 2 else term
    if total == 0:
        return 0.0
    return _signed_sqrt(total * total * pref, 1 if total > 0 else -1)


def _images_6j(args: tuple[int, ...]):
    """The 24 tetrahedral-symmetry images of a 6-j argument list."""
    cols = ((args[0], args[3]), (args[1], args[4]), (args[2], args[5]))
    for perm in permutations(cols):
        # flipping upper/lower in exactly two columns (or none)
        for flips in ((0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)):
            top = [col[f] for col, f in zip(perm, flips)]
            bot = [col[1 - f] for col, f in zip(perm, flips)]
            yield (*top, *bot)


@lru_cache(maxsize=None)
def _cached_6j(canonical: tuple[int, ...]) -> float:
    return _racah_6j(*canonical)


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6-j symbol ``{j1 j2 j3; j4 j5 j6}``.

    Evaluated on the canonical member of the symmetry class so the cache is
    shared between equivalent argument orderings.
    """
    args = tuple(_twice(x) for x in (j1, j2, j3, j4, j5, j6))
    return _cached_6j(min(_images_6j(args)))
