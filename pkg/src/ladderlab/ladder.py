"""Ladder systems on a finite horizon.

A ladder system assigns to every ``delta`` in ``S`` a sequence of ``length``
nonzero vectors (steps) whose supports lie below ``delta``, whose minimal
support coordinates strictly increase, and each of which brings at least one
coordinate not used by the earlier steps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .algebra import MAX_HORIZON, FieldCtx, Vec
from .errors import InfeasibleParams


@dataclass(frozen=True)
class LadderSystem:
    field: FieldCtx
    horizon: int
    length: int
    S: tuple[int, ...]
    steps: tuple[tuple[Vec, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "S", tuple(int(d) for d in self.S))
        object.__setattr__(self, "steps", tuple(tuple(lad) for lad in self.steps))
        if len(self.S) != len(self.steps):
            raise ValueError("one ladder is needed for every delta in S")

    @classmethod
    def from_mapping(cls, field: FieldCtx, horizon: int, length: int,
                     ladders: dict[int, Sequence[Vec]]) -> LadderSystem:
        S = tuple(sorted(ladders))
        return cls(field, horizon, length, S, tuple(tuple(ladders[d]) for d in S))

    def ladder(self, delta: int) -> tuple[Vec, ...]:
        return self.steps[self.S.index(delta)]

    def items(self) -> Iterator[tuple[int, tuple[Vec, ...]]]:
        return zip(self.S, self.steps)

    def support(self, delta: int) -> frozenset[int]:
        return frozenset(x for y in self.ladder(delta) for x in y.support)

    def with_S(self, S: Sequence[int], steps: Sequence[Sequence[Vec]]) -> LadderSystem:
        return LadderSystem(self.field, self.horizon, self.length, tuple(S), tuple(map(tuple, steps)))


class Violation(NamedTuple):
    clause: str
    delta: int | None
    n: int | None
    message: str

    def __str__(self) -> str:
        loc = f"delta={self.delta}" if self.delta is not None else "system"
        if self.n is not None:
            loc += f", n={self.n}"
        return f"[{self.clause}] {loc}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def clauses(self) -> set[str]:
        return {v.clause for v in self.violations}


# clause labels used in reports
UNION = "(i) union"
INCREASING = "(ii) increasing"
NOT_COVER = "(iii) not_cover"
NONZERO = "nonzero"
SHAPE = "shape"


def validate(sys: LadderSystem) -> ValidationReport:
    """Check every ladder against the defining clauses; violations are data."""
    report = ValidationReport()
    add = report.violations.append
    if not 0 < sys.horizon <= MAX_HORIZON:
        add(Violation(SHAPE, None, None, f"horizon {sys.horizon} outside [1, {MAX_HORIZON}]"))
    if sys.length < 1:
        add(Violation(SHAPE, None, None, f"ladder length must be >= 1, got {sys.length}"))
    if list(sys.S) != sorted(set(sys.S)):
        add(Violation(SHAPE, None, None, "S must be strictly increasing"))

    for delta, ladder in sys.items():
        if not sys.length <= delta < sys.horizon:
            add(Violation(SHAPE, delta, None,
                          f"delta must satisfy length <= delta < horizon ({sys.length} <= {delta} < {sys.horizon})"))
        if len(ladder) != sys.length:
            add(Violation(SHAPE, delta, None, f"ladder has {len(ladder)} steps, expected {sys.length}"))
        covered: set[int] = set()
        prev_min = None
        for n, y in enumerate(ladder):
            if y.horizon != sys.horizon:
                add(Violation(SHAPE, delta, n, f"step horizon {y.horizon} != {sys.horizon}"))
            supp = set(y.support)
            if not supp:
                add(Violation(NONZERO, delta, n, "step is the zero vector"))
                continue
            if max(supp) >= delta:
                add(Violation(UNION, delta, n, f"support {sorted(supp)} not below delta"))
            low = min(supp)
            if prev_min is not None and low <= prev_min:
                add(Violation(INCREASING, delta, n, f"min support {low} <= previous {prev_min}"))
            prev_min = low
            if supp <= covered:
                add(Violation(NOT_COVER, delta, n, "support covered by earlier steps"))
            covered |= supp
    return report


def is_window_separated(sys: LadderSystem, D) -> bool:
    """True iff each window step of delta lives strictly above every smaller delta' in S."""
    window = sorted(D.window)
    lower = -1
    for delta, ladder in sys.items():
        for n in window:
            supp = ladder[n].support
            if supp and min(supp) <= lower:
                return False
        lower = delta
    return True


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenParams:
    horizon: int
    length: int
    S: tuple[int, ...]
    window: tuple[int, ...]
    regime: str
    field: FieldCtx


def _check_params(params: GenParams) -> None:
    S, L = params.S, params.length
    if params.regime not in ("separated", "overlapping"):
        raise InfeasibleParams(f"unknown regime {params.regime!r}")
    if L < 1:
        raise InfeasibleParams("ladder length must be >= 1")
    if not 0 < params.horizon <= MAX_HORIZON:
        raise InfeasibleParams(f"horizon outside [1, {MAX_HORIZON}]")
    if list(S) != sorted(set(S)):
        raise InfeasibleParams("S must be strictly increasing")
    if not params.window or any(not 0 <= n < L for n in params.window):
        raise InfeasibleParams("window must be a nonempty subset of range(length)")
    for delta in S:
        if delta < L:
            raise InfeasibleParams(f"delta={delta} < length={L}: no room for increasing minima")
        if delta >= params.horizon:
            raise InfeasibleParams(f"delta={delta} not below horizon {params.horizon}")
    if params.regime == "overlapping" and len(S) < 2:
        raise InfeasibleParams("overlapping regime needs at least two ladders")


def _sample_minima(rng: random.Random, delta: int, L: int, k: int, floor: int) -> list[int]:
    """Strictly increasing minima below delta with minima[n] >= floor for n >= k."""
    start = max(floor, k)
    if delta - start < L - k:
        raise InfeasibleParams(f"delta={delta}: window steps need {L - k} coordinates in [{start}, {delta})")
    upper = sorted(rng.sample(range(start, delta), L - k))
    lower = sorted(rng.sample(range(0, upper[0]), k)) if k else []
    return lower + upper


def _build_ladder(rng: random.Random, F: FieldCtx, horizon: int, delta: int,
                  minima: list[int], density: float) -> tuple[Vec, ...]:
    # each step gets its own minimum (fresh: later minima are never used as
    # extras by earlier steps) plus random extras above that minimum
    steps = []
    for n, low in enumerate(minima):
        reserved = set(minima[n + 1:])
        coeffs = {low: rng.randrange(1, F.q)}
        for x in range(low + 1, delta):
            if x not in reserved and rng.random() < density:
                coeffs[x] = rng.randrange(1, F.q)
        steps.append(Vec.from_mapping(horizon, coeffs))
    return tuple(steps)


def _overlaps(sys: LadderSystem, window: Sequence[int]) -> bool:
    seen: dict[int, int] = {}
    for delta, ladder in sys.items():
        coords = {x for n in window for x in ladder[n].support}
        for x in coords:
            if x in seen and seen[x] != delta:
                return True
        for x in coords:
            seen.setdefault(x, delta)
    return False


def generate(seed: int, params: GenParams, max_tries: int = 500) -> LadderSystem:
    """Deterministic random ladder system for the given regime.

    ``separated``: every window step of delta uses only coordinates above all
    smaller members of S.  ``overlapping``: minima are drawn without that
    constraint and extras are denser; draws are repeated until two distinct
    ladders share a window-step coordinate.  The overlapping distribution is a
    free choice, not derived from anything deeper.
    """
    _check_params(params)
    rng = random.Random(seed)
    F, L = params.field, params.length
    k = min(params.window)
    for _ in range(max_tries):
        ladders = []
        lower = -1
        for delta in params.S:
            if params.regime == "separated":
                minima = _sample_minima(rng, delta, L, k, lower + 1)
                ladders.append(_build_ladder(rng, F, params.horizon, delta, minima, 0.3))
            else:
                minima = sorted(rng.sample(range(delta), L))
                ladders.append(_build_ladder(rng, F, params.horizon, delta, minima, 0.5))
            lower = delta
        sys = LadderSystem(F, params.horizon, L, params.S, tuple(ladders))
        if params.regime == "separated" or _overlaps(sys, params.window):
            return sys
    raise InfeasibleParams(f"no overlapping system found in {max_tries} draws")
