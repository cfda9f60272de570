"""Exact rational scalars and divisors.

Every scalar in the package is a :class:`fractions.Fraction`.  Divisors are
finite maps from divisor identifiers to fractions; the reserved identifier
``"K"`` stands for the canonical class so that expressions such as
``K + Delta`` live in the same type as ordinary boundary divisors.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DomainError

CANONICAL = "K"

Scalar = Union[int, Fraction]
DivisorId = str


def as_fraction(value: Scalar | str) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused on purpose: they would silently lose exactness.
    """
    if type(value) is Fraction:
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValueError(f"not an exact rational string: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def floor_frac(x: Fraction) -> int:
    return math.floor(x)


def ceil_frac(x: Fraction) -> int:
    return math.ceil(x)


class QDivisor(Mapping[DivisorId, Fraction]):
    """Immutable Q-divisor: a finite map ``DivisorId -> Fraction``.

    Zero coefficients are dropped on construction, so ``len(D)`` counts the
    components of ``D`` (with ``K`` counted if present; see :meth:`nt`).
    """

    __slots__ = ("_data", "_hash")

    def __init__(self, entries: Mapping[DivisorId, Scalar | str] | Iterable[tuple[DivisorId, Scalar | str]] = ()) -> None:
        items = entries.items() if isinstance(entries, Mapping) else entries
        data: dict[DivisorId, Fraction] = {}
        for key, value in items:
            if not isinstance(key, str) or not key:
                raise DomainError(f"divisor identifiers must be non-empty strings, got {key!r}")
            coeff = as_fraction(value)
            if key in data:
                coeff += data[key]
            data[key] = coeff
        self._data = {k: data[k] for k in sorted(data) if data[k] != 0}
        self._hash: int | None = None

    # Mapping protocol -------------------------------------------------
    def __getitem__(self, key: DivisorId) -> Fraction:
        return self._data[key]

    def __iter__(self) -> Iterator[DivisorId]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._data.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QDivisor):
            return self._data == other._data
        if isinstance(other, Mapping):
            return self == QDivisor(other)
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {format_fraction(v)}" for k, v in self._data.items())
        return f"QDivisor({{{body}}})"

    # arithmetic --------------------------------------------------------
    def coeff(self, key: DivisorId) -> Fraction:
        return self._data.get(key, Fraction(0))

    def __add__(self, other: QDivisor) -> QDivisor:
        if not isinstance(other, QDivisor):
            return NotImplemented
        merged = dict(self._data)
        for k, v in other._data.items():
            merged[k] = merged.get(k, Fraction(0)) + v
        return QDivisor(merged)

    def __sub__(self, other: QDivisor) -> QDivisor:
        if not isinstance(other, QDivisor):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> QDivisor:
        return QDivisor({k: -v for k, v in self._data.items()})

    def __mul__(self, scalar: Scalar) -> QDivisor:
        if not isinstance(scalar, (int, Fraction)) or isinstance(scalar, bool):
            return NotImplemented
        return QDivisor({k: v * scalar for k, v in self._data.items()})

    __rmul__ = __mul__

    # queries -----------------------------------------------------------
    def components(self) -> tuple[DivisorId, ...]:
        """Support without the canonical symbol."""
        return tuple(k for k in self._data if k != CANONICAL)

    def nt(self) -> int:
        """Number of irreducible components (the canonical symbol is not one)."""
        return len(self.components())

    def is_effective(self) -> bool:
        return all(v >= 0 for v in self._data.values())

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self._data.values())

    def restrict(self, keys: Iterable[DivisorId]) -> QDivisor:
        keep = set(keys)
        return QDivisor({k: v for k, v in self._data.items() if k in keep})

    def drop(self, keys: Iterable[DivisorId]) -> QDivisor:
        gone = set(keys)
        return QDivisor({k: v for k, v in self._data.items() if k not in gone})

    def rename(self, mapping: Mapping[DivisorId, DivisorId]) -> QDivisor:
        return QDivisor([(mapping.get(k, k), v) for k, v in self._data.items()])

    def denominators_lcm(self) -> int:
        out = 1
        for v in self._data.values():
            out = math.lcm(out, v.denominator)
        return out

    def to_strings(self) -> dict[str, str]:
        return {k: format_fraction(v) for k, v in self._data.items()}


ZERO = QDivisor()


def canonical_plus(boundary: QDivisor) -> QDivisor:
    """The class ``K + boundary``."""
    return QDivisor({CANONICAL: 1}) + boundary


def floor_divisor(D: QDivisor) -> QDivisor:
    return QDivisor({k: floor_frac(v) for k, v in D.items()})


def ceil_divisor(D: QDivisor) -> QDivisor:
    return QDivisor({k: ceil_frac(v) for k, v in D.items()})


def decompose_boundary(D: QDivisor) -> tuple[QDivisor, QDivisor]:
    """Split a boundary into ``(part with coefficients < 1, reduced part)``."""
    for key, value in D.items():
        if not 0 <= value <= 1:
            raise DomainError(f"coefficient of {key} is {format_fraction(value)}, outside [0, 1]")
    less = QDivisor({k: v for k, v in D.items() if v < 1})
    equal = QDivisor({k: v for k, v in D.items() if v == 1})
    return less, equal


@dataclass(frozen=True)
class CoefficientSet:
    """Finite window of a DCC coefficient set, optionally with its declared infimum.

    ``dcc_floor`` is the minimum of the nonzero part of the full (possibly
    infinite) DCC set; when present it, not the window's minimum, drives the
    rounding grid so the grid is uniform across a family of pairs.
    """

    elements: tuple[Fraction, ...]
    dcc_floor: Fraction | None = None

    def __post_init__(self) -> None:
        elems = tuple(as_fraction(e) for e in self.elements)
        object.__setattr__(self, "elements", elems)
        if self.dcc_floor is not None:
            object.__setattr__(self, "dcc_floor", as_fraction(self.dcc_floor))
        for e in elems:
            if not 0 <= e <= 1:
                raise DomainError(f"coefficient {format_fraction(e)} outside [0, 1]")
        if any(a >= b for a, b in zip(elems, elems[1:])):
            raise DomainError("coefficient set must be strictly ascending")
        floor = self.dcc_floor
        if floor is not None:
            if not 0 < floor <= 1:
                raise DomainError("dcc_floor must lie in (0, 1]")
            if any(0 < e < floor for e in elems):
                raise DomainError("an element lies below the declared dcc_floor")

    @classmethod
    def of(cls, values: Iterable[Scalar | str], dcc_floor: Scalar | str | None = None) -> CoefficientSet:
        uniq = sorted({as_fraction(v) for v in values})
        return cls(tuple(uniq), None if dcc_floor is None else as_fraction(dcc_floor))

    def nonzero(self) -> tuple[Fraction, ...]:
        return tuple(e for e in self.elements if e != 0)

    def minimum(self) -> Fraction:
        """The minimum of the nonzero part (the declared floor if there is one)."""
        if self.dcc_floor is not None:
            return self.dcc_floor
        nz = self.nonzero()
        if not nz:
            raise DomainError("coefficient set has no nonzero element")
        return nz[0]


def rounding_grid(I: CoefficientSet, delta: Scalar) -> int:
    """``k = ceil(1 / (a * delta))`` with ``a`` the minimum of ``I`` minus zero."""
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {format_fraction(delta)}")
    if not I.nonzero() and I.dcc_floor is None:
        raise DomainError("coefficient set has no nonzero element")
    return ceil_frac(1 / (I.minimum() * delta))


def round_coefficients(I: CoefficientSet, delta: Scalar) -> tuple[int, dict[Fraction, Fraction]]:
    """Round every nonzero element of ``I`` down onto the grid ``(1/k) Z``.

    Returns ``k`` and the map ``a -> floor(k a) / k``.  The rounded value
    satisfies ``(1 - delta) a < a' <= a`` for every nonzero ``a`` in ``I``.
    """
    k = rounding_grid(I, delta)
    mapping = {a: Fraction(floor_frac(k * a), k) for a in I.nonzero()}
    return k, mapping


def round_divisor(D: QDivisor, k: int) -> QDivisor:
    """Apply ``a -> floor(k a) / k`` to every coefficient of ``D``."""
    return QDivisor({key: Fraction(floor_frac(k * v), k) for key, v in D.items()})


def on_grid(x: Fraction, k: int) -> bool:
    return (x * k).denominator == 1
