"""Birational programs on log surface pairs.

* :func:`terminalize` extracts every exceptional divisor of non-positive
  discrepancy over a log smooth klt pair by blowing up intersection points
  whose coefficients sum to at least one.
* :func:`run_mmp` contracts ``(K + D)``-negative tracked curves until
  ``K + D`` is nef on the tracked configuration.
* :func:`redundant_part` greedily drops boundary components while bigness
  stays certified.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, ResourceError
from .numeric import CANONICAL, ZERO, QDivisor, floor_divisor
from .singularity import classify
from .surface import (
    BlowUpSpec,
    LogPair,
    ModelMorphism,
    SurfaceModel,
    blow_up,
    contract,
    degree_on,
    intersect,
    is_nef_on_tracked,
    pullback,
    pushforward,
    relative_log_discrepancies,
)

TERMINALIZE_STEP_BUDGET = 10_000


def terminalize(pair: LogPair, order: str = "lex", max_steps: int = TERMINALIZE_STEP_BUDGET) -> tuple[LogPair, ModelMorphism]:
    """Crepant terminal model of a log smooth klt pair.

    Blows up one intersection point at a time of two boundary components
    with ``a_i + a_j >= 1``; the exceptional curve gets ``a_i + a_j - 1``.
    ``order`` (``"lex"`` or ``"reverse"``) picks which such point goes
    first.  The returned pair satisfies ``K' + D' = f^*(K + D)``.
    """
    if order not in ("lex", "reverse"):
        raise DomainError(f"unknown order {order!r}")
    report = classify(pair)
    if not report.klt:
        raise DomainError(f"terminalization needs a klt pair, got {report.classification}")
    current = pair.as_boundary()
    morphism = ModelMorphism.identity(pair.model)
    for _ in range(max_steps):
        todo = [
            (i, j)
            for i, j, _ in current.model.intersections()
            if current.coeff(i) > 0 and current.coeff(j) > 0 and current.coeff(i) + current.coeff(j) >= 1
        ]
        if not todo:
            return current, morphism
        i, j = todo[0] if order == "lex" else todo[-1]
        current, step = blow_up(current, BlowUpSpec.intersection(i, j))
        morphism = morphism.then(step)
    raise ResourceError(f"terminalization did not finish within {max_steps} blow-ups")


# ---------------------------------------------------------------------------
# bigness certificates


@dataclass(frozen=True)
class BignessCertificate:
    """``nef + effective`` with ``nef`` nef on tracked curves and ``nef^2 > 0``.

    It certifies every class ``D`` with ``D - nef - effective`` effective.
    """

    nef: QDivisor
    effective: QDivisor = field(default_factory=QDivisor)

    def problems(self, model: SurfaceModel, D: QDivisor) -> list[str]:
        out = []
        if self.effective.coeff(CANONICAL) != 0 or not self.effective.is_effective():
            out.append("effective part is not an effective combination of tracked curves")
        check = is_nef_on_tracked(model, self.nef)
        if not check:
            out.append("nef part is negative on " + ", ".join(c for c, _ in check.violations))
        try:
            if intersect(model, self.nef, self.nef) <= 0:
                out.append("nef part has non-positive square")
        except DomainError as err:
            out.append(str(err))
        rest = D - self.nef - self.effective
        if rest.coeff(CANONICAL) != 0 or not rest.is_effective():
            out.append("divisor minus certificate is not effective")
        return out

    def certifies(self, model: SurfaceModel, D: QDivisor) -> bool:
        return not self.problems(model, D)

    def pullback(self, morphism: ModelMorphism) -> BignessCertificate:
        return BignessCertificate(pullback(morphism, self.nef), pullback(morphism, self.effective))


BignessOracle = Callable[[LogPair], bool]


def certificate_oracle(cert: BignessCertificate) -> BignessOracle:
    return lambda p: cert.certifies(p.model, p.log_canonical())


def redundant_part(pair: LogPair, bigness_oracle: BignessCertificate | BignessOracle) -> QDivisor:
    """Greedy redundant part: whole components removed while ``K + rest`` stays big.

    Components are tried in descending identifier order.  The result is
    maximal for that order only; redundant parts are not unique in general.
    """
    oracle = certificate_oracle(bigness_oracle) if isinstance(bigness_oracle, BignessCertificate) else bigness_oracle
    if not oracle(pair):
        raise DomainError("bigness of K + boundary is not certified")
    removed = ZERO
    for d in sorted(pair.boundary.components(), reverse=True):
        piece = QDivisor({d: pair.coeff(d)})
        trial = LogPair(pair.model, pair.boundary - removed - piece, pair.sub_boundary, pair.snc)
        if oracle(trial):
            removed = removed + piece
    return removed


# ---------------------------------------------------------------------------
# MMP


@dataclass(frozen=True)
class MMPStep:
    curve: str
    degree: Fraction  # (K + D) . C at contraction time
    self_intersection: Fraction
    discrepancy: Fraction  # over the pair right after this contraction


@dataclass(frozen=True)
class MMPTrace:
    start: LogPair
    steps: tuple[MMPStep, ...]
    final: LogPair
    morphism: ModelMorphism
    final_discrepancies: dict[str, Fraction]

    def contracted(self) -> tuple[str, ...]:
        return tuple(s.curve for s in self.steps)


def run_mmp(pair: LogPair, certificate: BignessCertificate | None = None, *, assume_big: bool = False) -> MMPTrace:
    """Contract ``(K + D)``-negative curves, most negative first, ties by identifier."""
    if certificate is not None:
        problems = certificate.problems(pair.model, pair.log_canonical())
        if problems:
            raise DomainError("bigness certificate rejected: " + "; ".join(problems))
    elif not assume_big:
        raise DomainError("run_mmp needs a bigness certificate or assume_big=True")
    current = pair
    morphism = ModelMorphism.identity(pair.model)
    steps: list[MMPStep] = []
    while True:
        lc = current.log_canonical()
        model = current.model
        candidates = []
        for c in model.divisors:
            c2 = model.pair(c, c)
            if c2 < 0:
                deg = degree_on(model, lc, c)
                if deg < 0:
                    candidates.append((deg, c, c2))
        if not candidates:
            break
        deg, c, c2 = min(candidates)
        current, step = contract(current, c)
        steps.append(MMPStep(c, deg, c2, step.steps[0].coefficient))
        morphism = morphism.then(step)
    finals = relative_log_discrepancies(pair, morphism, current)
    return MMPTrace(pair, tuple(steps), current, morphism, finals)


def count_negative_discrepancy(trace: MMPTrace) -> int:
    """Contracted curves with negative discrepancy over the final pair."""
    return sum(1 for v in trace.final_discrepancies.values() if v < 0)


def check_projection_formula(morphism: ModelMorphism, D: QDivisor, m: int, E: QDivisor) -> bool:
    """Divisor-level check of ``f_*(floor(m f^*D) + E) == floor(m D)``."""
    if m < 1:
        raise DomainError("m must be a positive integer")
    exc = set(morphism.exceptional())
    if not E.is_effective() or any(k not in exc for k in E):
        raise DomainError("E must be effective and supported on exceptional curves")
    lhs = pushforward(morphism, floor_divisor(m * pullback(morphism, D)) + E)
    return lhs == floor_divisor(m * D)
