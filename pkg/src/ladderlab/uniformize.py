"""Constructive uniformization.

The per-delta equation system is solved step by step using the fresh
coordinate each ladder step is guaranteed to have; partial uniformizers are
extended delta by delta with the merge rule "old values win, then the fresh
solution, then 0".  At finite scale the merge can break a window constraint
when ladders of different deltas share coordinates, so every merge is
verified, and ``global_uniformize`` falls back to an exact linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import FieldCtx, FieldElem, Vec
from .colouring import Colouring, FilterD, check_shape
from .errors import ExtensionFailed, NoFreshCoordinate, NotAUniformizer, PatchFailed
from .ladder import LadderSystem


@dataclass(frozen=True)
class PartialUniformizer:
    """A function ``{0, ..., mu-1} -> F`` (its domain is an initial segment)."""

    horizon: int
    values: tuple[FieldElem, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) > self.horizon:
            raise ValueError(f"domain [0, {len(self.values)}) exceeds horizon {self.horizon}")

    @classmethod
    def empty(cls, horizon: int) -> PartialUniformizer:
        return cls(horizon, ())

    @property
    def mu(self) -> int:
        return len(self.values)

    @property
    def is_total(self) -> bool:
        return self.mu == self.horizon

    def __getitem__(self, xi: int) -> FieldElem:
        return self.values[xi]

    def __len__(self) -> int:
        return len(self.values)

    def restrict(self, mu: int) -> PartialUniformizer:
        return PartialUniformizer(self.horizon, self.values[:mu])


def evaluate_prefix(F: FieldCtx, values: Sequence[FieldElem], y: Vec) -> FieldElem:
    """f(y) for f defined on an initial segment containing Supp(y)."""
    acc = 0
    for x, c in y.entries:
        if x >= len(values):
            raise ValueError(f"generator {x} outside the domain [0, {len(values)})")
        v = values[x]
        if v:
            acc = F.add(acc, F.mul(c, v))
    return acc


def covered(sys: LadderSystem, mu: int) -> list[int]:
    """The deltas a function on [0, mu) must handle: S intersected with mu+1."""
    return [d for d in sys.S if d <= mu]


def window_violation(sys: LadderSystem, D: FilterD, a: Colouring,
                     values: Sequence[FieldElem], mu: int | None = None) -> int | None:
    """First delta <= mu whose window steps disagree with a, or None."""
    mu = len(values) if mu is None else mu
    F = sys.field
    for delta, ladder in sys.items():
        if delta > mu:
            break
        target = a(delta)
        for n in D.sorted_window:
            if evaluate_prefix(F, values, ladder[n]) != target[n]:
                return delta
    return None


def uniformizes(sys: LadderSystem, D: FilterD, a: Colouring, f: PartialUniformizer) -> bool:
    return window_violation(sys, D, a, f.values, f.mu) is None


def solve_ladder_equations(F: FieldCtx, ladder: Sequence[Vec],
                           target: Sequence[FieldElem]) -> dict[int, FieldElem]:
    """Solve ``g(y_n) = target[n]`` for every step, one step at a time.

    Step n uses its least fresh coordinate as the unknown; every other
    still-unset coordinate of its support is set to 0.
    """
    if len(target) != len(ladder):
        raise ValueError(f"{len(ladder)} steps but {len(target)} targets")
    g: dict[int, FieldElem] = {}
    for n, (y, t) in enumerate(zip(ladder, target)):
        fresh = [x for x in y.support if x not in g]
        if not fresh:
            raise NoFreshCoordinate(n)
        pivot = fresh[0]
        rest = 0
        for x, c in y.entries:
            if x == pivot:
                continue
            g.setdefault(x, 0)
            rest = F.add(rest, F.mul(c, g[x]))
        g[pivot] = F.div(F.sub(t, rest), y.coeff(pivot))
    return g


def extend_uniformizer(sys: LadderSystem, D: FilterD, a: Colouring,
                       f0: PartialUniformizer, mu1: int) -> PartialUniformizer:
    """Extend f0 (uniformizing a on deltas <= f0.mu) to [0, mu1).

    Raises ExtensionFailed when a merge breaks the window constraint of the
    delta being added.
    """
    check_shape(sys, a)
    mu0 = f0.mu
    if not mu0 <= mu1 <= sys.horizon:
        raise ValueError(f"need {mu0} <= mu1 <= {sys.horizon}, got mu1={mu1}")
    bad = window_violation(sys, D, a, f0.values, mu0)
    if bad is not None:
        raise NotAUniformizer(bad, f"f0 does not uniformize the colouring at delta={bad}")

    F = sys.field
    values = list(f0.values)
    for delta, ladder in sys.items():
        if delta <= mu0 or delta > mu1:
            continue
        g = solve_ladder_equations(F, ladder, a(delta))
        values.extend(g.get(x, 0) for x in range(len(values), delta))
        target = a(delta)
        for n in D.sorted_window:
            if evaluate_prefix(F, values, ladder[n]) != target[n]:
                raise ExtensionFailed(delta)
    values.extend([0] * (mu1 - len(values)))
    return PartialUniformizer(sys.horizon, tuple(values))


def global_uniformize(sys: LadderSystem, D: FilterD, a: Colouring) -> PartialUniformizer | None:
    """A total uniformizer of a, or None when a is not uniform."""
    from .quotient import unifset_membership

    try:
        f = extend_uniformizer(sys, D, a, PartialUniformizer.empty(sys.horizon), sys.horizon)
    except ExtensionFailed:
        ok, f = unifset_membership(sys, D, a)
        if not ok:
            return None
    if not uniformizes(sys, D, a, f):
        raise RuntimeError("uniformizer failed its own verification")
    return f


def patch_initial(sys: LadderSystem, D: FilterD, a: Colouring, g: Sequence[FieldElem],
                  mu: int) -> PartialUniformizer | None:
    """Glue a uniformizer of a below mu onto g, which is correct from mu on.

    Returns None when no function uniformizes the deltas <= mu (so a is not
    uniform).  Raises PatchFailed when the glued function breaks a window
    constraint of some delta >= mu.
    """
    from .quotient import uniformizer_space

    check_shape(sys, a)
    if len(g) != sys.horizon:
        raise ValueError(f"g must be total on {sys.horizon} generators")
    if not 0 <= mu <= sys.horizon:
        raise ValueError(f"mu={mu} outside [0, {sys.horizon}]")
    try:
        f = extend_uniformizer(sys, D, a, PartialUniformizer.empty(sys.horizon), mu)
    except ExtensionFailed:
        f, _ = uniformizer_space(sys, D, a, mu)
        if f is None:
            return None

    F = sys.field
    for delta, ladder in sys.items():
        if delta < mu:
            continue
        target = a(delta)
        if any(evaluate_prefix(F, g, ladder[n]) != target[n] for n in D.sorted_window):
            raise NotAUniformizer(delta, f"g does not uniformize the colouring at delta={delta} >= mu")

    h = tuple(f.values[:mu]) + tuple(g[mu:])
    bad = window_violation(sys, D, a, h)
    if bad is not None:
        raise PatchFailed(bad)
    return PartialUniformizer(sys.horizon, h)


def extension_safe_bounds(sys: LadderSystem, D: FilterD) -> list[int]:
    """Bounds mu from which every extension is guaranteed to exist.

    mu qualifies when each window step of every delta > mu has its whole
    support in [mu, delta).  In a window-separated system this holds for
    mu = 0, for every delta in S and for every delta + 1.
    """
    safe = []
    for mu in range(sys.horizon + 1):
        ok = True
        for delta, ladder in sys.items():
            if delta <= mu:
                continue
            if any(min(ladder[n].support, default=mu) < mu for n in D.window):
                ok = False
                break
        if ok:
            safe.append(mu)
    return safe
