"""Seeded random surface configurations for property suites and the oracle command."""

from __future__ import annotations

import random
from fractions import Fraction

from .numeric import QDivisor
from .singularity import classify
from .surface import BlowUpSpec, LogPair, ModelMorphism, SurfaceModel, blow_up, blow_up_model, contract


def random_model(rng: random.Random, n: int, *, max_meet: int = 1, k2: bool = True) -> SurfaceModel:
    """``n`` curves with random self-intersections, genera and pairwise meetings.

    ``K.C = 2g - 2 - C^2`` keeps adjunction parity.
    """
    ids = tuple(f"D{i + 1}" for i in range(n))
    form = [[0] * n for _ in range(n)]
    canonical = []
    for i in range(n):
        form[i][i] = rng.randint(-4, 2)
        genus = rng.choice((0, 0, 0, 1, 2))
        canonical.append(2 * genus - 2 - form[i][i])
        for j in range(i + 1, n):
            meet = rng.choice([0] + list(range(1, max_meet + 1)) * 2)
            form[i][j] = form[j][i] = meet
    return SurfaceModel(
        ids,
        tuple(tuple(Fraction(v) for v in r) for r in form),
        tuple(Fraction(v) for v in canonical),
        canonical_square=Fraction(rng.randint(1, 9)) if k2 else None,
    )


def random_klt_pair(rng: random.Random, k: int, max_components: int = 5, *, max_meet: int = 1) -> LogPair:
    """Random SNC klt pair with coefficients in ``{l/k : 1 <= l < k}`` (some curves left out of the boundary)."""
    n = rng.randint(1, max_components)
    model = random_model(rng, n, max_meet=max_meet)
    boundary = {}
    for d in model.divisors:
        if rng.random() < 0.85:
            boundary[d] = Fraction(rng.randint(1, k - 1), k)
    return LogPair(model, QDivisor(boundary))


def random_terminal_pair(rng: random.Random, k: int = 6, max_components: int = 5, extra_blowups: int = 2) -> LogPair:
    """Random terminal pair: meeting boundary curves have coefficient sum below one.

    A few general-point blow-ups (boundary coefficient 0 on the new curve) add
    ``(K + D)``-negative (-1)-curves for the MMP to find.
    """
    n = rng.randint(1, max_components)
    model = random_model(rng, n)
    coeffs: dict[str, Fraction] = {}
    for d in model.divisors:
        if rng.random() < 0.8:
            coeffs[d] = Fraction(rng.randint(1, k - 1), k)
    for i, j, _ in model.intersections():
        if i in coeffs and j in coeffs and coeffs[i] + coeffs[j] >= 1:
            room = 1 - coeffs[i] - Fraction(1, k)
            if room > 0:
                coeffs[j] = Fraction(rng.randint(1, int(room * k)), k)
            else:
                del coeffs[j]
    pair = LogPair(model, QDivisor(coeffs))
    for _ in range(rng.randint(0, extra_blowups)):
        choices = [BlowUpSpec.general()] + [BlowUpSpec.free(d) for d in pair.model.divisors if pair.coeff(d) == 0]
        spec = rng.choice(choices)
        pair = LogPair(blow_up_model(pair.model, spec), pair.boundary)
    assert classify(pair).terminal
    return pair


def random_spec(rng: random.Random, model: SurfaceModel) -> BlowUpSpec:
    options = [BlowUpSpec.general()]
    options += [BlowUpSpec.free(d) for d in model.divisors]
    options += [BlowUpSpec.intersection(i, j) for i, j, _ in model.intersections()]
    return rng.choice(options)


def random_blowup_chain(rng: random.Random, pair: LogPair, length: int) -> tuple[LogPair, ModelMorphism]:
    current = LogPair(pair.model, pair.boundary, True, pair.snc)
    morphism = ModelMorphism.identity(pair.model)
    for _ in range(length):
        current, step = blow_up(current, random_spec(rng, current.model))
        morphism = morphism.then(step)
    return current, morphism


def random_contraction_chain(rng: random.Random, pair: LogPair, length: int) -> tuple[LogPair, ModelMorphism]:
    """Contract up to ``length`` randomly chosen negative curves."""
    current = LogPair(pair.model, pair.boundary, True, pair.snc)
    morphism = ModelMorphism.identity(pair.model)
    for _ in range(length):
        negative = [c for c in current.model.divisors if current.model.pair(c, c) < 0]
        if not negative:
            break
        current, step = contract(current, rng.choice(negative))
        morphism = morphism.then(step)
    return current, morphism


def random_rational(rng: random.Random, max_den: int = 12, span: int = 3) -> Fraction:
    return Fraction(rng.randint(-span * max_den, span * max_den), rng.randint(1, max_den))


def random_divisor(rng: random.Random, model: SurfaceModel, *, with_canonical: bool = True) -> QDivisor:
    entries = {d: random_rational(rng) for d in model.divisors if rng.random() < 0.7}
    if with_canonical:
        entries["K"] = Fraction(rng.randint(-2, 2))
    return QDivisor(entries)
