"""Effective birationality thresholds.

If ``|floor((qN + 1)(K + D))|`` is birational for every ``q >= 1`` then so
is ``|floor(m (K + D))|`` for every ``m`` that is a sum of numbers
``qN + 1``; every ``m >= N^2 + 1`` is such a sum.  :func:`run_pipeline`
strings the reductions together (rounding, redundant components,
terminalization, MMP, Cartier index) and records each stage so that
:func:`verify_certificate` can replay it.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import DomainError, ResourceError, StageError
from .numeric import (
    CANONICAL,
    CoefficientSet,
    QDivisor,
    format_fraction,
    on_grid,
    round_coefficients,
)
from .programs import BignessCertificate, count_negative_discrepancy, redundant_part, run_mmp, terminalize
from .singularity import EPSILON_KLT_CONVENTION, cartier_index, classify, is_epsilon_klt
from .surface import LogPair, intersect, is_nef_on_tracked, pullback

MATSUSAKA_Q = 18
SEMIGROUP_TABLE_CAP = 10**6

STAGES = ("input", "round", "redundant", "terminalize", "epsilon-klt", "mmp", "negative-discrepancy", "cartier", "threshold")


# ---------------------------------------------------------------------------
# semigroup generated by {qN + 1 : q >= 1}


def _division_decomposition(N: int, m: int) -> list[int]:
    k = m - N * N
    a, b = divmod(k, N + 1)
    if b == 0:
        # N^2 + k = [(N + 1) N + 1] + (a - 1)(N + 1)
        return [N + 1] + [1] * (a - 1)
    # N^2 + k = (b - 1)(N + 1) + [(N - b + 1) N + 1] + a (N + 1)
    return [1] * (b - 1) + [N - b + 1] + [1] * a


def semigroup_table(N: int, limit: int) -> list[int]:
    """``table[m]`` is a generator index ``q`` that ends a decomposition of ``m`` (0: none; ``table[0]`` unused).

    Plain unbounded-knapsack reachability over the generators ``qN + 1 <= limit``.
    """
    if N < 1:
        raise DomainError("N must be a positive integer")
    if limit > SEMIGROUP_TABLE_CAP:
        raise ResourceError(f"semigroup table limit {limit} exceeds {SEMIGROUP_TABLE_CAP}")
    table = [0] * (limit + 1)
    reach = [False] * (limit + 1)
    reach[0] = True
    gens = [(q, q * N + 1) for q in range(1, (limit - 1) // N + 1)]
    for m in range(1, limit + 1):
        for q, g in gens:
            if g > m:
                break
            if reach[m - g]:
                reach[m] = True
                table[m] = q
                break
    return table


def semigroup_member(N: int, m: int) -> bool:
    """Independent membership oracle: is ``m`` a sum of numbers ``qN + 1``?"""
    if m < 1:
        return False
    return semigroup_table(N, m)[m] != 0


def semigroup_decompose(N: int, m: int) -> list[int] | None:
    """``[q_1, ..., q_r]`` with ``sum(q_i N + 1) == m``, or ``None`` if impossible.

    For ``m >= N^2 + 1`` the decomposition follows the division
    ``m - N^2 = (N + 1) a + b``; smaller ``m`` fall back to a table search.
    """
    if N < 1 or m < 1:
        raise DomainError("N and m must be positive integers")
    if m >= N * N + 1:
        return _division_decomposition(N, m)
    table = semigroup_table(N, m)
    if table[m] == 0:
        return None
    out = []
    while m:
        q = table[m]
        out.append(q)
        m -= q * N + 1
    return sorted(out, reverse=True)


def birationality_threshold(N: int) -> int:
    """``(18 N)^2 + 1``: the bound after replacing ``N`` by ``18 N``."""
    if N < 1:
        raise DomainError("N must be a positive integer")
    return (MATSUSAKA_Q * N) ** 2 + 1


# ---------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class BoundInputs:
    """Constants the reductions consume; ``N_cartier=None`` means use the computed index."""

    delta: Fraction
    epsilon: Fraction
    A: int
    N_cartier: int | None = None
    drop_redundant: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if not 0 < self.delta < 1:
            raise DomainError("delta must lie in (0, 1)")
        if not 0 < self.epsilon < 1:
            raise DomainError("epsilon must lie in (0, 1)")
        if isinstance(self.A, bool) or not isinstance(self.A, int) or self.A < 1:
            raise DomainError("A must be a positive integer")
        if self.N_cartier is not None and (
            isinstance(self.N_cartier, bool) or not isinstance(self.N_cartier, int) or self.N_cartier < 1
        ):
            raise DomainError("N_cartier must be a positive integer")


@dataclass(frozen=True)
class Stage:
    name: str
    input: LogPair
    output: LogPair
    constants: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BoundCertificate:
    inputs: BoundInputs
    bigness: BignessCertificate
    coefficient_set: CoefficientSet | None
    stages: tuple[Stage, ...]
    N: int
    N_final: int
    m0: int
    caveats: tuple[str, ...]

    def stage(self, name: str) -> Stage:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)


@dataclass
class _Context:
    inputs: BoundInputs
    bigness: BignessCertificate
    coefficient_set: CoefficientSet | None
    done: dict[str, Stage] = field(default_factory=dict)


def _fs(x: Fraction) -> str:
    return format_fraction(x)


def _stage_input(pair: LogPair, ctx: _Context) -> tuple[LogPair, dict]:
    if not pair.snc:
        raise StageError("input", "pair is not declared SNC")
    report = classify(pair)
    if not report.klt:
        raise StageError("input", f"pair must be klt, got {report.classification}")
    return pair, {
        "classification": report.classification,
        "min_discrepancy": _fs(report.min_discrepancy),
        "nt": pair.boundary.nt(),
    }


def _stage_round(pair: LogPair, ctx: _Context) -> tuple[LogPair, dict]:
    delta = ctx.inputs.delta
    margin = (1 - delta) * pair.boundary
    if not ctx.bigness.certifies(pair.model, QDivisor({CANONICAL: 1}) + margin):
        raise StageError("round", "K + (1 - delta) D is not certified big by the supplied certificate")
    if not pair.boundary:
        return pair, {"delta": _fs(delta), "k": None, "a": None, "map": {}, "margin_certified": True}
    coeffs = CoefficientSet.of(pair.boundary.values())
    I = ctx.coefficient_set or coeffs
    missing = [c for c in coeffs.elements if c not in I.elements]
    if missing:
        raise StageError("round", "boundary coefficient " + _fs(missing[0]) + " is not in the coefficient set")
    try:
        k, mapping = round_coefficients(I, delta)
    except DomainError as err:
        raise StageError("round", str(err)) from err
    for a, b in mapping.items():
        if not ((1 - delta) * a < b <= a):
            raise AssertionError(f"rounding inequality fails for {a}")
    rounded = QDivisor({d: mapping[v] for d, v in pair.boundary.items()})
    return LogPair(pair.model, rounded, False, pair.snc), {
        "delta": _fs(delta),
        "a": _fs(I.minimum()),
        "k": k,
        "map": {_fs(a): _fs(b) for a, b in sorted(mapping.items()) if a in coeffs.elements},
        "margin_certified": True,
    }


def _stage_redundant(pair: LogPair, ctx: _Context) -> tuple[LogPair, dict]:
    A = ctx.inputs.A
    if ctx.inputs.drop_redundant:
        try:
            removed = redundant_part(pair, ctx.bigness)
        except DomainError as err:
            raise StageError("redundant", str(err)) from err
    else:
        removed = QDivisor()
    out = LogPair(pair.model, pair.boundary - removed, False, pair.snc)
    nt = out.boundary.nt()
    if nt > A:
        raise StageError("redundant", f"{nt} non-redundant components exceed the component bound A = {A}")
    return out, {"A": A, "removed": removed.to_strings(), "nt": nt}


def _grid(ctx: _Context) -> int | None:
    return ctx.done["round"].constants["k"] if "round" in ctx.done else None


def _stage_terminalize(pair: LogPair, ctx: _Context) -> tuple[LogPair, dict]:
    try:
        out, morphism = terminalize(pair)
    except DomainError as err:
        raise StageError("terminalize", str(err)) from err
    if not classify(out).terminal:
        raise AssertionError("terminalization output is not terminal")
    if pullback(morphism, pair.log_canonical()) != out.log_canonical():
        raise AssertionError("terminalization is not crepant")
    k = _grid(ctx)
    if k is not None and not all(on_grid(v, k) for v in out.boundary.values()):
        raise AssertionError("terminalization left the coefficient grid")
    if not ctx.bigness.pullback(morphism).certifies(out.model, out.log_canonical()):
        raise StageError("terminalize", "bigness certificate does not survive pullback")
    blowups = [[s.spec.i, s.spec.j] for s in morphism.steps]
    coeffs = {s.divisor: _fs(s.coefficient) for s in morphism.steps}
    return out, {"blow_ups": blowups, "exceptional_coefficients": coeffs, "grid": k, "crepant": True}


def _stage_epsilon(pair: LogPair, ctx: _Context) -> tuple[LogPair, dict]:
    eps = ctx.inputs.epsilon
    report = classify(pair)
    if not is_epsilon_klt(pair, eps):
        raise StageError(
            "epsilon-klt",
            f"pair is not {_fs(eps)}-klt (threshold {_fs(report.epsilon_klt_threshold) if report.klt else 'not-klt'})",
        )
    return pair, {
        "epsilon": _fs(eps),
        "threshold": _fs(report.epsilon_klt_threshold),
        "classification": report.classification,
        "convention": report.convention,
    }


def _stage_mmp(pair: LogPair, ctx: _Context) -> tuple[LogPair, dict]:
    trace = run_mmp(pair, assume_big=True)
    check = is_nef_on_tracked(trace.final.model, trace.final.log_canonical())
    if not check:
        raise AssertionError("MMP output is not nef on tracked curves")
    return trace.final, {
        "steps": [
            {
                "curve": s.curve,
                "degree": _fs(s.degree),
                "self_intersection": _fs(s.self_intersection),
                "discrepancy": _fs(s.discrepancy),
            }
            for s in trace.steps
        ],
        "final_discrepancies": {c: _fs(v) for c, v in sorted(trace.final_discrepancies.items())},
        "nef_on_tracked": True,
    }


def _mmp_again(pair: LogPair):
    return run_mmp(pair, assume_big=True)


def _stage_negative(pair: LogPair, ctx: _Context) -> tuple[LogPair, dict]:
    trace = _mmp_again(pair)
    count = count_negative_discrepancy(trace)
    nt = pair.boundary.nt()
    if count > nt:
        raise AssertionError("more negative discrepancies than boundary components")
    if count > ctx.inputs.A:
        raise StageError("negative-discrepancy", f"{count} negative discrepancies exceed A = {ctx.inputs.A}")
    return trace.final, {"count": count, "nt": nt, "A": ctx.inputs.A}


def _stage_cartier(pair: LogPair, ctx: _Context) -> tuple[LogPair, dict]:
    trace = _mmp_again(pair)
    final = trace.final
    concrete = cartier_index(final.model, final.log_canonical(), trace.morphism)
    supplied = ctx.inputs.N_cartier
    if supplied is not None and supplied % concrete:
        raise StageError("cartier", f"supplied N = {supplied} is not a multiple of the computed index {concrete}")
    return final, {
        "source": "computed" if supplied is None else "supplied",
        "computed_index": concrete,
        "N": concrete if supplied is None else supplied,
    }


def _stage_threshold(pair: LogPair, ctx: _Context) -> tuple[LogPair, dict]:
    N = ctx.done["cartier"].constants["N"]
    lc = pair.log_canonical()
    if not is_nef_on_tracked(pair.model, lc):
        raise AssertionError("minimal model is not nef on tracked curves")
    volume = None
    if pair.model.canonical_square is not None:
        volume = intersect(pair.model, lc, lc)
        if volume <= 0:
            raise StageError("threshold", f"(K + D)^2 = {_fs(volume)} on the minimal model; not big")
    N_final = MATSUSAKA_Q * N
    return pair, {
        "N": N,
        "q_min": MATSUSAKA_Q,
        "N_final": N_final,
        "m0": birationality_threshold(N),
        "volume": None if volume is None else _fs(volume),
    }


_RUNNERS: dict[str, Callable[[LogPair, _Context], tuple[LogPair, dict]]] = {
    "input": _stage_input,
    "round": _stage_round,
    "redundant": _stage_redundant,
    "terminalize": _stage_terminalize,
    "epsilon-klt": _stage_epsilon,
    "mmp": _stage_mmp,
    "negative-discrepancy": _stage_negative,
    "cartier": _stage_cartier,
    "threshold": _stage_threshold,
}

# stages that re-derive from the MMP input rather than the previous output
_FROM_MMP_INPUT = {"negative-discrepancy", "cartier"}


def _stage_source(name: str, done: dict[str, Stage], previous: Stage | None, first: LogPair) -> LogPair:
    if previous is None:
        return first
    if name in _FROM_MMP_INPUT:
        return done["mmp"].input
    return previous.output


def pipeline_caveats(final: LogPair) -> tuple[str, ...]:
    out = [
        "nef and big are certified relative to the tracked curve configuration only",
        "contractions are numerical; contractibility and projectivity of the models are not certified",
        "delta, epsilon, A and any supplied Cartier bound are inputs, not derived from the coefficient set",
        EPSILON_KLT_CONVENTION,
        "the comparison (K + D)^2 >= vol(K) on the minimal model needs untracked data and is not checked",
    ]
    if final.model.canonical_square is None:
        out.append("K^2 is not tracked: positivity of (K + D)^2 on the minimal model was not checked")
    return tuple(out)


def default_bigness(pair: LogPair, delta: Fraction) -> BignessCertificate | None:
    """Try ``K + (1 - delta) D`` itself as the nef part of a certificate."""
    candidate = BignessCertificate(QDivisor({CANONICAL: 1}) + (1 - delta) * pair.boundary)
    target = QDivisor({CANONICAL: 1}) + (1 - delta) * pair.boundary
    return candidate if candidate.certifies(pair.model, target) else None


def run_pipeline(
    pair: LogPair,
    inputs: BoundInputs,
    bigness: BignessCertificate | None = None,
    coefficient_set: CoefficientSet | None = None,
) -> BoundCertificate:
    """Run every reduction in order and return the replayable certificate."""
    if bigness is None:
        bigness = default_bigness(pair, inputs.delta)
        if bigness is None:
            raise StageError("input", "no bigness certificate supplied and K + (1 - delta) D is not nef with positive square")
    ctx = _Context(inputs, bigness, coefficient_set)
    previous: Stage | None = None
    for name in STAGES:
        source = _stage_source(name, ctx.done, previous, pair)
        output, constants = _RUNNERS[name](source, ctx)
        previous = Stage(name, source, output, constants)
        ctx.done[name] = previous
    th = ctx.done["threshold"].constants
    return BoundCertificate(
        inputs,
        bigness,
        coefficient_set,
        tuple(ctx.done[n] for n in STAGES),
        th["N"],
        th["N_final"],
        th["m0"],
        pipeline_caveats(previous.output),
    )


def verify_certificate(cert: BoundCertificate) -> list[str]:
    """Replay every stage from its recorded input; return the list of mismatches."""
    problems: list[str] = []
    names = tuple(s.name for s in cert.stages)
    if names != STAGES:
        return [f"stage sequence {list(names)} differs from {list(STAGES)}"]
    ctx = _Context(cert.inputs, cert.bigness, cert.coefficient_set)
    previous: Stage | None = None
    first = cert.stages[0].input
    for stage in cert.stages:
        expected_source = _stage_source(stage.name, ctx.done, previous, first)
        if stage.input != expected_source:
            problems.append(f"{stage.name}: recorded input does not chain from the previous stage")
        try:
            output, constants = _RUNNERS[stage.name](stage.input, ctx)
        except (DomainError, AssertionError, ResourceError) as err:
            problems.append(f"{stage.name}: replay failed: {err}")
            ctx.done[stage.name] = stage
            previous = stage
            continue
        if output != stage.output:
            problems.append(f"{stage.name}: recorded output differs from replay")
        if constants != stage.constants:
            keys = sorted(k for k in set(constants) | set(stage.constants) if constants.get(k) != stage.constants.get(k))
            problems.append(f"{stage.name}: constants differ from replay ({', '.join(keys)})")
        ctx.done[stage.name] = replace(stage)
        previous = stage
    th = cert.stage("threshold").constants
    if cert.N != cert.stage("cartier").constants.get("N"):
        problems.append("N differs from the cartier stage")
    if cert.N_final != MATSUSAKA_Q * cert.N or th.get("N_final") != cert.N_final:
        problems.append("N_final is not 18 N")
    if cert.m0 != cert.N_final**2 + 1 or th.get("m0") != cert.m0:
        problems.append("m0 is not N_final^2 + 1")
    final = cert.stages[-1].output
    if not is_nef_on_tracked(final.model, final.log_canonical()):
        problems.append("final pair is not nef on tracked curves")
    if not classify(cert.stage("terminalize").output).terminal:
        problems.append("terminalization output is not terminal")
    if cert.caveats != pipeline_caveats(final):
        problems.append("caveats differ from the required list")
    return problems
