"""Numerical surface models, log pairs, and the blow-up / contraction calculus.

A :class:`SurfaceModel` tracks a finite set of prime divisors together with
their intersection matrix and their degrees against the canonical class.
Blow-ups follow ``K_Y = f^*K_X + E`` and ``f^*D = D~ + mE``; contractions
are Mumford's numerical pullback, so a contracted model may carry rational
intersection numbers.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from .errors import DomainError
from .linalg import SingularMatrixError, solve
from .numeric import CANONICAL, QDivisor, Scalar, as_fraction, canonical_plus, format_fraction

Matrix = tuple[tuple[Fraction, ...], ...]


def _matrix(rows: Iterable[Iterable[Scalar | str]]) -> Matrix:
    return tuple(tuple(as_fraction(v) for v in row) for row in rows)


@dataclass(frozen=True)
class SurfaceModel:
    """Tracked prime divisors on a projective surface and their intersection data.

    ``form[i][j]`` is ``D_i . D_j``; ``canonical[i]`` is ``K . D_i``.
    ``canonical_square`` (``K^2``) is optional; it is only needed when a
    computation pairs ``K`` with itself.  ``smooth`` marks models whose
    integral data must obey adjunction parity.
    """

    divisors: tuple[str, ...]
    form: Matrix
    canonical: tuple[Fraction, ...]
    labels: tuple[str, ...] = ()
    canonical_square: Fraction | None = None
    smooth: bool = True
    _index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        ids = tuple(self.divisors)
        object.__setattr__(self, "divisors", ids)
        object.__setattr__(self, "form", _matrix(self.form))
        object.__setattr__(self, "canonical", tuple(as_fraction(v) for v in self.canonical))
        labels = tuple(self.labels) if self.labels else ids
        object.__setattr__(self, "labels", labels)
        if self.canonical_square is not None:
            object.__setattr__(self, "canonical_square", as_fraction(self.canonical_square))
        object.__setattr__(self, "_index", {d: i for i, d in enumerate(ids)})
        self._validate()

    def _validate(self) -> None:
        n = len(self.divisors)
        if len(self._index) != n:
            raise DomainError("divisor identifiers must be unique")
        if CANONICAL in self._index:
            raise DomainError(f"{CANONICAL!r} is reserved for the canonical class")
        if len(self.form) != n or any(len(row) != n for row in self.form):
            raise DomainError("intersection matrix must be square and match the divisor list")
        if len(self.canonical) != n or len(self.labels) != n:
            raise DomainError("canonical vector and labels must match the divisor list")
        for i in range(n):
            for j in range(i + 1, n):
                if self.form[i][j] != self.form[j][i]:
                    raise DomainError(f"intersection matrix not symmetric at ({self.divisors[i]}, {self.divisors[j]})")
                if self.form[i][j] < 0:
                    raise DomainError(
                        f"distinct prime divisors {self.divisors[i]}, {self.divisors[j]} have negative intersection"
                    )
        if self.smooth:
            for i, d in enumerate(self.divisors):
                total = self.canonical[i] + self.form[i][i]
                if total.denominator == 1 and total.numerator % 2:
                    raise DomainError(f"adjunction parity fails for {d}: K.D + D^2 = {total} is odd")

    @classmethod
    def _unchecked(cls, divisors, form, canonical, labels, canonical_square, smooth) -> SurfaceModel:
        # internal constructor for data already known to be valid Fractions
        obj = object.__new__(cls)
        for name, value in (
            ("divisors", divisors),
            ("form", form),
            ("canonical", canonical),
            ("labels", labels),
            ("canonical_square", canonical_square),
            ("smooth", smooth),
            ("_index", {d: i for i, d in enumerate(divisors)}),
        ):
            object.__setattr__(obj, name, value)
        return obj

    # access -------------------------------------------------------------
    def __contains__(self, divisor: object) -> bool:
        return divisor in self._index

    def index(self, divisor: str) -> int:
        try:
            return self._index[divisor]
        except KeyError:
            raise DomainError(f"unknown divisor {divisor!r}") from None

    def pair(self, a: str, b: str) -> Fraction:
        return self.form[self.index(a)][self.index(b)]

    def k_dot(self, divisor: str) -> Fraction:
        return self.canonical[self.index(divisor)]

    def label(self, divisor: str) -> str:
        return self.labels[self.index(divisor)]

    def fresh_id(self, prefix: str = "E") -> str:
        n = 1
        while f"{prefix}{n}" in self._index:
            n += 1
        return f"{prefix}{n}"

    def intersections(self) -> list[tuple[str, str, Fraction]]:
        """All unordered pairs of distinct tracked divisors that meet."""
        out = []
        ids = self.divisors
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                if self.form[i][j] > 0:
                    out.append((ids[i], ids[j], self.form[i][j]))
        return out


def intersect(model: SurfaceModel, D1: QDivisor, D2: QDivisor) -> Fraction:
    """Bilinear extension of the intersection form (``K`` allowed on either side)."""
    total = Fraction(0)
    for a, x in D1.items():
        for b, y in D2.items():
            if a == CANONICAL and b == CANONICAL:
                if model.canonical_square is None:
                    raise DomainError("K^2 is not tracked on this model")
                value = model.canonical_square
            elif a == CANONICAL:
                value = model.k_dot(b)
            elif b == CANONICAL:
                value = model.k_dot(a)
            else:
                value = model.pair(a, b)
            total += x * y * value
    return total


def degree_on(model: SurfaceModel, D: QDivisor, curve: str) -> Fraction:
    """``D . C`` for a tracked curve ``C``; never needs ``K^2``."""
    i = model.index(curve)
    total = Fraction(0)
    for a, x in D.items():
        total += x * (model.canonical[i] if a == CANONICAL else model.form[model.index(a)][i])
    return total


@dataclass(frozen=True)
class NefCheck:
    """Outcome of a nef test on tracked curves; falsy when some curve is negative."""

    nef: bool
    violations: tuple[tuple[str, Fraction], ...] = ()

    def __bool__(self) -> bool:
        return self.nef


def is_nef_on_tracked(model: SurfaceModel, D: QDivisor) -> NefCheck:
    bad = []
    for c in model.divisors:
        value = degree_on(model, D, c)
        if value < 0:
            bad.append((c, value))
    return NefCheck(not bad, tuple(bad))


def volume_nef(model: SurfaceModel, D: QDivisor) -> Fraction:
    """``vol(D) = D^2`` for ``D`` nef on the tracked curves."""
    check = is_nef_on_tracked(model, D)
    if not check:
        names = ", ".join(c for c, _ in check.violations)
        raise DomainError(f"divisor is not nef on tracked curves (negative on {names})")
    return intersect(model, D, D)


# ---------------------------------------------------------------------------
# log pairs


@dataclass(frozen=True)
class LogPair:
    """A surface model with a boundary divisor.

    ``sub_boundary`` pairs may carry negative coefficients; they arise inside
    discrepancy computations and must not leave them.  ``snc`` records the
    declaration that the boundary has simple normal crossing support.
    """

    model: SurfaceModel
    boundary: QDivisor = field(default_factory=QDivisor)
    sub_boundary: bool = False
    snc: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.boundary, QDivisor):
            object.__setattr__(self, "boundary", QDivisor(self.boundary))
        for key, value in self.boundary.items():
            if key == CANONICAL:
                raise DomainError("the boundary may not contain the canonical class")
            if key not in self.model:
                raise DomainError(f"boundary component {key!r} is not a tracked divisor")
            if not self.sub_boundary and not 0 <= value <= 1:
                raise DomainError(f"boundary coefficient of {key} is {format_fraction(value)}, outside [0, 1]")

    def log_canonical(self) -> QDivisor:
        """The class ``K + boundary``."""
        return canonical_plus(self.boundary)

    def coeff(self, divisor: str) -> Fraction:
        return self.boundary.coeff(divisor)

    def as_boundary(self) -> LogPair:
        """Return the same pair with the sub-boundary flag cleared (validates [0, 1])."""
        return LogPair(self.model, self.boundary, False, self.snc)


# ---------------------------------------------------------------------------
# elementary steps


@dataclass(frozen=True)
class BlowUpSpec:
    """Where to blow up: a point of ``D_i & D_j``, a point of ``D_i`` only, or a general point."""

    kind: Literal["intersection", "free", "general"]
    i: str | None = None
    j: str | None = None

    def __post_init__(self) -> None:
        if self.kind == "intersection":
            if self.i is None or self.j is None or self.i == self.j:
                raise DomainError("an intersection point needs two distinct divisors")
            if self.j < self.i:
                a, b = self.j, self.i
                object.__setattr__(self, "i", a)
                object.__setattr__(self, "j", b)
        elif self.kind == "free":
            if self.i is None or self.j is not None:
                raise DomainError("a free point lies on exactly one divisor")
        elif self.kind == "general":
            if self.i is not None or self.j is not None:
                raise DomainError("a general point lies on no tracked divisor")
        else:
            raise DomainError(f"unknown blow-up kind {self.kind!r}")

    @classmethod
    def intersection(cls, i: str, j: str) -> BlowUpSpec:
        return cls("intersection", i, j)

    @classmethod
    def free(cls, i: str) -> BlowUpSpec:
        return cls("free", i)

    @classmethod
    def general(cls) -> BlowUpSpec:
        return cls("general")

    def multiplicities(self) -> dict[str, int]:
        if self.kind == "intersection":
            return {self.i: 1, self.j: 1}
        if self.kind == "free":
            return {self.i: 1}
        return {}

    def validate(self, model: SurfaceModel) -> None:
        for d in self.multiplicities():
            if d not in model:
                raise DomainError(f"blow-up centre refers to unknown divisor {d!r}")
        if self.kind == "intersection" and model.pair(self.i, self.j) < 1:
            raise DomainError(f"{self.i} and {self.j} have no intersection point left to blow up")


@dataclass(frozen=True)
class Step:
    """One elementary blow-up or contraction.

    For a blow-up ``coefficient`` is the crepant boundary coefficient given
    to the new exceptional curve; for a contraction it is the discrepancy of
    the contracted curve over the contracted pair.  A contraction keeps the
    deleted row so that it can be undone exactly.
    """

    kind: Literal["blow-up", "contract"]
    divisor: str
    coefficient: Fraction
    spec: BlowUpSpec | None = None
    position: int = -1
    row: tuple[Fraction, ...] = ()
    self_intersection: Fraction | None = None
    canonical_degree: Fraction | None = None
    label: str | None = None
    was_smooth: bool = True


_SMALL = {v: Fraction(v) for v in range(-1, 3)}


def blow_up_model(model: SurfaceModel, spec: BlowUpSpec, new_id: str | None = None) -> SurfaceModel:
    spec.validate(model)
    new_id = new_id or model.fresh_id()
    if new_id in model or new_id == CANONICAL:
        raise DomainError(f"identifier {new_id!r} already in use")
    mult = spec.multiplicities()
    m = [mult.get(d, 0) for d in model.divisors]
    n = len(m)
    ints = [_SMALL[x] for x in m]
    form = tuple(
        tuple(v - m[a] * m[b] if m[a] and m[b] else v for b, v in enumerate(row)) + (ints[a],)
        for a, row in enumerate(model.form)
    ) + (tuple(ints) + (_SMALL[-1],),)
    canonical = tuple(model.canonical[a] + m[a] if m[a] else model.canonical[a] for a in range(n)) + (_SMALL[-1],)
    k2 = None if model.canonical_square is None else model.canonical_square - 1
    return SurfaceModel._unchecked(
        model.divisors + (new_id,), form, canonical, model.labels + (new_id,), k2, model.smooth
    )


def contract_model(model: SurfaceModel, curve: str) -> tuple[SurfaceModel, dict]:
    """Mumford contraction of a tracked curve with negative self-intersection.

    Returns the contracted model and the data needed to undo it.
    """
    c = model.index(curve)
    c2 = model.form[c][c]
    if c2 >= 0:
        raise DomainError(f"only negative curves contract numerically ({curve}^2 = {format_fraction(c2)})")
    keep = [a for a in range(len(model.divisors)) if a != c]
    col = [model.form[a][c] for a in keep]
    kc = model.canonical[c]
    form = tuple(
        tuple(model.form[a][b] - col[x] * col[y] / c2 for y, b in enumerate(keep))
        for x, a in enumerate(keep)
    )
    canonical = tuple(model.canonical[a] - kc * col[x] / c2 for x, a in enumerate(keep))
    k2 = None if model.canonical_square is None else model.canonical_square - kc * kc / c2
    smooth = model.smooth and c2 == -1 and kc == -1
    contracted = SurfaceModel(
        tuple(model.divisors[a] for a in keep),
        form,
        canonical,
        tuple(model.labels[a] for a in keep),
        k2,
        smooth,
    )
    undo = {
        "position": c,
        "row": tuple(col),
        "self_intersection": c2,
        "canonical_degree": kc,
        "label": model.labels[c],
        "was_smooth": model.smooth,
    }
    return contracted, undo


def uncontract_model(model: SurfaceModel, step: Step) -> SurfaceModel:
    """Exact inverse of :func:`contract_model` using the data kept in ``step``."""
    c2 = step.self_intersection
    kc = step.canonical_degree
    col = step.row
    n = len(model.divisors)
    if len(col) != n:
        raise DomainError("contraction record does not match the model")
    base = [[model.form[a][b] + col[a] * col[b] / c2 for b in range(n)] for a in range(n)]
    canonical = [model.canonical[a] + kc * col[a] / c2 for a in range(n)]
    pos = step.position
    ids = list(model.divisors)
    labels = list(model.labels)
    ids.insert(pos, step.divisor)
    labels.insert(pos, step.label or step.divisor)
    canonical.insert(pos, kc)
    rows = [list(r) for r in base]
    for a, r in enumerate(rows):
        r.insert(pos, col[a])
    new_row = list(col)
    new_row.insert(pos, c2)
    rows.insert(pos, new_row)
    k2 = None if model.canonical_square is None else model.canonical_square + kc * kc / c2
    return SurfaceModel(tuple(ids), tuple(tuple(r) for r in rows), tuple(canonical), tuple(labels), k2, step.was_smooth)


def apply_step(model: SurfaceModel, step: Step) -> SurfaceModel:
    if step.kind == "blow-up":
        return blow_up_model(model, step.spec, step.divisor)
    return contract_model(model, step.divisor)[0]


def invert_step(model: SurfaceModel, step: Step) -> SurfaceModel:
    if step.kind == "blow-up":
        return contract_model(model, step.divisor)[0]
    return uncontract_model(model, step)


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class ModelMorphism:
    """A birational morphism ``f: higher -> lower`` recorded as elementary steps.

    ``steps`` are applied in order starting from ``start`` and end at ``end``.
    A chain of blow-ups starts at the lower model, a chain of contractions
    at the higher one.
    """

    start: SurfaceModel
    end: SurfaceModel
    steps: tuple[Step, ...] = ()

    def __post_init__(self) -> None:
        kinds = {s.kind for s in self.steps}
        if len(kinds) > 1:
            raise DomainError("a morphism record mixes blow-ups and contractions")

    @classmethod
    def identity(cls, model: SurfaceModel) -> ModelMorphism:
        return cls(model, model, ())

    @property
    def blows_up(self) -> bool:
        return bool(self.steps) and self.steps[0].kind == "blow-up"

    @property
    def higher(self) -> SurfaceModel:
        return self.end if self.blows_up else self.start

    @property
    def lower(self) -> SurfaceModel:
        return self.start if self.blows_up else self.end

    def exceptional(self) -> tuple[str, ...]:
        low = set(self.lower.divisors)
        return tuple(d for d in self.higher.divisors if d not in low)

    def then(self, other: ModelMorphism) -> ModelMorphism:
        """Concatenate two records of the same kind (``self.end`` must be ``other.start``)."""
        if self.end != other.start:
            raise DomainError("morphisms do not compose: end/start models differ")
        if not self.steps:
            return other
        if not other.steps:
            return self
        return ModelMorphism(self.start, other.end, self.steps + other.steps)


def replay(morphism: ModelMorphism) -> SurfaceModel:
    model = morphism.start
    for step in morphism.steps:
        model = apply_step(model, step)
    return model


def replay_inverse(morphism: ModelMorphism) -> SurfaceModel:
    model = morphism.end
    for step in reversed(morphism.steps):
        model = invert_step(model, step)
    return model


def blow_up(pair: LogPair, spec: BlowUpSpec, new_id: str | None = None) -> tuple[LogPair, ModelMorphism]:
    """Blow up one point and give the exceptional curve its crepant coefficient.

    ``K_Y + D_Y = f^*(K_X + D)`` forces the coefficient ``sum(m_i a_i) - 1``
    on the exceptional curve; a negative value turns the result into a
    sub-boundary pair.
    """
    model = pair.model
    new_model = blow_up_model(model, spec, new_id)
    e = new_model.divisors[-1]
    coeff = sum((pair.coeff(d) * m for d, m in spec.multiplicities().items()), Fraction(0)) - 1
    boundary = pair.boundary + QDivisor({e: coeff})
    sub = pair.sub_boundary or coeff < 0
    step = Step("blow-up", e, coeff, spec, position=len(new_model.divisors) - 1)
    return LogPair(new_model, boundary, sub, pair.snc), ModelMorphism(model, new_model, (step,))


def contraction_discrepancy(pair: LogPair, curve: str) -> Fraction:
    """Discrepancy of ``curve`` over the pair obtained by contracting it.

    From ``K + D = f^*(K' + D') + (a + c) C`` with ``c`` the coefficient of
    ``C`` in ``D``: intersecting with ``C`` gives ``a = (K + D).C / C^2 - c``.
    """
    c2 = pair.model.pair(curve, curve)
    return degree_on(pair.model, pair.log_canonical(), curve) / c2 - pair.coeff(curve)


def contract(pair: LogPair, curve: str) -> tuple[LogPair, ModelMorphism]:
    model = pair.model
    if curve not in model:
        raise DomainError(f"unknown divisor {curve!r}")
    c2 = model.pair(curve, curve)
    if c2 >= 0:
        raise DomainError(f"only negative curves contract numerically ({curve}^2 = {format_fraction(c2)})")
    disc = contraction_discrepancy(pair, curve)
    new_model, undo = contract_model(model, curve)
    step = Step("contract", curve, disc, None, **undo)
    boundary = pair.boundary.drop([curve])
    sub = pair.sub_boundary and not all(0 <= v <= 1 for v in boundary.values())
    return LogPair(new_model, boundary, sub, pair.snc), ModelMorphism(model, new_model, (step,))


def pullback(morphism: ModelMorphism, D: QDivisor) -> QDivisor:
    """Numerical pullback ``f^*D``: pushes forward to ``D`` and is orthogonal to every exceptional curve."""
    higher, lower = morphism.higher, morphism.lower
    for key in D:
        if key != CANONICAL and key not in lower:
            raise DomainError(f"{key!r} is not a divisor on the target model")
    exc = morphism.exceptional()
    if not exc:
        return D
    matrix = [[higher.pair(a, b) for b in exc] for a in exc]
    rhs = [-degree_on(higher, D, e) for e in exc]
    try:
        xs = solve(matrix, rhs)
    except SingularMatrixError as err:  # pragma: no cover - contracted curves are negative definite
        raise AssertionError("exceptional intersection matrix is singular") from err
    return D + QDivisor(dict(zip(exc, xs)))


def pushforward(morphism: ModelMorphism, D: QDivisor) -> QDivisor:
    """Drop exceptional components; strict transforms keep their coefficients."""
    higher, lower = morphism.higher, morphism.lower
    for key in D:
        if key != CANONICAL and key not in higher:
            raise DomainError(f"{key!r} is not a divisor on the source model")
    return QDivisor({k: v for k, v in D.items() if k == CANONICAL or k in lower})


def relative_log_discrepancies(source: LogPair, morphism: ModelMorphism, target: LogPair) -> dict[str, Fraction]:
    """Discrepancy over ``target`` of each exceptional curve of ``morphism``.

    Writes ``K + D_source = f^*(K + D_target) + sum(e_C C)``; the discrepancy
    of ``C`` is ``e_C - coeff_{D_source}(C)``.
    """
    diff = source.log_canonical() - pullback(morphism, target.log_canonical())
    return {c: diff.coeff(c) - source.coeff(c) for c in morphism.exceptional()}


def model_from_rows(
    divisors: Sequence[str],
    form: Sequence[Sequence[Scalar | str]],
    canonical: Sequence[Scalar | str],
    labels: Sequence[str] | None = None,
    canonical_square: Scalar | str | None = None,
    smooth: bool = True,
) -> SurfaceModel:
    """Convenience constructor accepting ints and ``"p/q"`` strings."""
    return SurfaceModel(
        tuple(divisors),
        _matrix(form),
        tuple(as_fraction(v) for v in canonical),
        tuple(labels) if labels else (),
        None if canonical_square is None else as_fraction(canonical_square),
        smooth,
    )


def pair_from(model: SurfaceModel, boundary: Mapping[str, Scalar | str] | QDivisor = (), **kw) -> LogPair:
    return LogPair(model, boundary if isinstance(boundary, QDivisor) else QDivisor(dict(boundary)), **kw)
