"""Discrepancies and singularity classes of SNC log surface pairs.

Closed forms: over a pair with SNC boundary ``sum a_i D_i`` the exceptional
divisors of smallest discrepancy sit over points.  A weighted blow-up with
weights ``(w1, w2)`` at a point of ``D_i & D_j`` has discrepancy
``w1 (1 - a_i) + w2 (1 - a_j) - 1``, minimised at ``w = (1, 1)`` when both
coefficients are at most one and unbounded below otherwise.  A point on a
single ``D_i`` gives ``1 - a_i``, a point off the boundary gives ``1``.

:func:`brute_force_min_discrepancy` recomputes the same minimum by actually
blowing up, and is the oracle the closed forms are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ResourceError
from .numeric import QDivisor
from .surface import BlowUpSpec, LogPair, ModelMorphism, SurfaceModel, blow_up, pullback

CLASSES = ("terminal", "canonical", "klt-not-canonical", "lc-not-klt", "not-lc")

EPSILON_KLT_CONVENTION = (
    "epsilon-klt means every exceptional discrepancy > -1 + epsilon "
    "and every boundary coefficient <= 1 - epsilon"
)

MAX_ORACLE_DEPTH = 6


@dataclass(frozen=True)
class Witness:
    """Where a discrepancy value is realised.

    ``kind`` is ``"intersection"`` (a point of ``D_i & D_j``), ``"free"`` (a
    point on one divisor only), ``"general"`` (off every tracked divisor) or
    ``"component"`` (a boundary component itself, discrepancy ``-a_i``).
    ``discrepancy`` is ``None`` for an unbounded (minus infinity) value.
    """

    kind: str
    divisors: tuple[str, ...]
    discrepancy: Fraction | None

    def blow_up_spec(self) -> BlowUpSpec | None:
        if self.kind == "intersection":
            return BlowUpSpec.intersection(*self.divisors)
        if self.kind == "free":
            return BlowUpSpec.free(self.divisors[0])
        if self.kind == "general":
            return BlowUpSpec.general()
        return None


@dataclass(frozen=True)
class SingularityReport:
    classification: str
    min_discrepancy: Fraction | None
    epsilon_klt_threshold: Fraction | None
    witnesses: tuple[Witness, ...]
    convention: str = EPSILON_KLT_CONVENTION

    @property
    def terminal(self) -> bool:
        return self.classification == "terminal"

    @property
    def klt(self) -> bool:
        return self.classification in CLASSES[:3]

    @property
    def lc(self) -> bool:
        return self.classification != "not-lc"


def _require_snc(pair: LogPair) -> None:
    if not pair.snc:
        raise DomainError("pair is not declared SNC; only log smooth pairs are supported")


def _candidates(pair: LogPair) -> list[Witness]:
    model = pair.model
    out = [Witness("general", (), Fraction(1))]
    for d in model.divisors:
        a = pair.coeff(d)
        out.append(Witness("free", (d,), None if a > 1 else 1 - a))
    for i, j, _ in model.intersections():
        ai, aj = pair.coeff(i), pair.coeff(j)
        value = None if ai > 1 or aj > 1 else 1 - ai - aj
        out.append(Witness("intersection", (i, j), value))
    return out


def _key(value: Fraction | None) -> tuple[int, Fraction]:
    return (0, Fraction(0)) if value is None else (1, value)


def min_discrepancy_snc(pair: LogPair) -> tuple[Fraction | None, tuple[Witness, ...]]:
    """Minimal discrepancy over exceptional divisors, with every location attaining it.

    The value ``None`` stands for minus infinity.
    """
    _require_snc(pair)
    cands = _candidates(pair)
    best = min(cands, key=lambda w: _key(w.discrepancy)).discrepancy
    return best, tuple(w for w in cands if w.discrepancy == best)


def epsilon_klt_threshold(pair: LogPair) -> Fraction | None:
    """``min(1 + min discrepancy, 1 - max coefficient)``, or ``None`` when not klt."""
    report = classify(pair)
    return report.epsilon_klt_threshold


def is_epsilon_klt(pair: LogPair, epsilon: Fraction) -> bool:
    value, _ = min_discrepancy_snc(pair)
    top = max(pair.boundary.values(), default=Fraction(0))
    return value is not None and value > -1 + epsilon and top <= 1 - epsilon


def classify(pair: LogPair) -> SingularityReport:
    value, witnesses = min_discrepancy_snc(pair)
    coeffs = list(pair.boundary.items())
    top = max((v for _, v in coeffs), default=Fraction(0))
    lc = value is not None and value >= -1 and top <= 1
    klt = value is not None and value > -1 and top < 1
    if not lc:
        cls = "not-lc"
    elif not klt:
        cls = "lc-not-klt"
    elif value > 0:
        cls = "terminal"
    elif value >= 0:
        cls = "canonical"
    else:
        cls = "klt-not-canonical"
    threshold = min(1 + value, 1 - top) if klt else None
    extra = tuple(Witness("component", (d,), -v) for d, v in coeffs if v == top and top > 0)
    return SingularityReport(cls, value, threshold, witnesses + extra)


def _oracle_specs(model: SurfaceModel, local: frozenset[str] | None) -> list[BlowUpSpec]:
    specs: list[BlowUpSpec] = []
    for i, j, _ in model.intersections():
        if local is None or i in local or j in local:
            specs.append(BlowUpSpec.intersection(i, j))
    for d in model.divisors:
        if local is None or d in local:
            specs.append(BlowUpSpec.free(d))
    if local is None:
        specs.append(BlowUpSpec.general())
    return specs


def brute_force_min_discrepancy(pair: LogPair, depth: int, prune: bool = True) -> Fraction:
    """Smallest discrepancy of any exceptional curve reached by ``depth`` blow-ups.

    Every blow-up sequence of length at most ``depth`` is enumerated, with
    crepant coefficients tracked by :func:`blow_up` (negative coefficients
    allowed).  With ``prune`` the second and later blow-ups are centred on
    the exceptional locus of the chain so far; blow-ups elsewhere are over a
    different point of the surface and reproduce values already seen at a
    smaller depth.
    """
    if depth < 1:
        raise DomainError("depth must be at least 1")
    if depth > MAX_ORACLE_DEPTH:
        raise ResourceError(f"oracle depth {depth} exceeds the cap {MAX_ORACLE_DEPTH}")
    _require_snc(pair)
    start = LogPair(pair.model, pair.boundary, True, True)
    best: list[Fraction] = []

    def walk(p: LogPair, remaining: int, local: frozenset[str] | None) -> None:
        for spec in _oracle_specs(p.model, local):
            q, _ = blow_up(p, spec)
            e = q.model.divisors[-1]
            disc = -q.coeff(e)
            if not best or disc < best[0]:
                best[:] = [disc]
            if remaining > 1:
                walk(q, remaining - 1, (local or frozenset()) | {e} if prune else None)

    walk(start, depth, None)
    return best[0]


def cartier_index(model: SurfaceModel, D: QDivisor, contracted: ModelMorphism) -> int:
    """Least ``N`` with ``N D`` and ``N f^*D`` integral, ``f`` the contraction record.

    Integrality of the numerical pullback is the computable stand-in for
    ``N D`` being Cartier at the points the contraction created.
    """
    if contracted.lower != model:
        raise DomainError("divisor model is not the target of the contraction record")
    up = pullback(contracted, D)
    return math.lcm(D.denominators_lcm(), up.denominators_lcm())
