"""Colourings, the window filter and the vector-space structure on ColSet."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

from .algebra import FieldCtx, FieldElem, evaluate
from .errors import HorizonMismatch, LengthMismatch, ShapeMismatch

if TYPE_CHECKING:
    from .ladder import LadderSystem


@dataclass(frozen=True)
class FilterD:
    """Principal filter on ``range(length)`` generated by ``window``.

    A finite family closed under supersets and intersections is generated by
    its smallest member, so a set I is large iff it contains the window.
    """

    length: int
    window: frozenset[int]

    def __post_init__(self):
        window = frozenset(int(n) for n in self.window)
        if not window:
            raise ValueError("filter window must be nonempty")
        if any(not 0 <= n < self.length for n in window):
            raise ValueError(f"window {sorted(window)} not inside range({self.length})")
        object.__setattr__(self, "window", window)

    @classmethod
    def tail(cls, length: int, start: int | None = None) -> FilterD:
        """Finite stand-in for the cofinite filter: ``{start, ..., length-1}``.

        The default start is ceil(length/2), clamped so the window is never empty.
        """
        if start is None:
            start = min(-(-length // 2), length - 1)
        return cls(length, frozenset(range(start, length)))

    @property
    def sorted_window(self) -> tuple[int, ...]:
        return tuple(sorted(self.window))

    @property
    def off_window(self) -> tuple[int, ...]:
        return tuple(n for n in range(self.length) if n not in self.window)

    def contains(self, indices: Iterable[int]) -> bool:
        return self.window <= set(indices)

    def __contains__(self, indices) -> bool:
        return self.contains(indices)


@dataclass(frozen=True)
class Colouring:
    """Map ``delta -> (value_0, ..., value_{L-1})`` on the index list S."""

    S: tuple[int, ...]
    values: tuple[tuple[FieldElem, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "S", tuple(int(d) for d in self.S))
        object.__setattr__(self, "values", tuple(tuple(int(v) for v in row) for row in self.values))
        if len(self.S) != len(self.values):
            raise ShapeMismatch("one value tuple is needed for every delta")
        if len({len(row) for row in self.values}) > 1:
            raise ShapeMismatch("value tuples must share one length")

    @classmethod
    def from_mapping(cls, mapping: dict[int, Sequence[FieldElem]]) -> Colouring:
        S = tuple(sorted(mapping))
        return cls(S, tuple(tuple(mapping[d]) for d in S))

    @classmethod
    def zero(cls, S: Sequence[int], length: int) -> Colouring:
        return cls(tuple(S), tuple((0,) * length for _ in S))

    @classmethod
    def from_flat(cls, S: Sequence[int], length: int, flat: Sequence[FieldElem]) -> Colouring:
        if len(flat) != len(S) * length:
            raise ShapeMismatch(f"flat vector has {len(flat)} entries, expected {len(S) * length}")
        return cls(tuple(S), tuple(tuple(flat[i * length:(i + 1) * length]) for i in range(len(S))))

    @property
    def length(self) -> int:
        return len(self.values[0]) if self.values else 0

    def __call__(self, delta: int) -> tuple[FieldElem, ...]:
        return self.values[self.S.index(delta)]

    def flat(self) -> tuple[FieldElem, ...]:
        return tuple(v for row in self.values for v in row)

    def items(self) -> Iterator[tuple[int, tuple[FieldElem, ...]]]:
        return zip(self.S, self.values)

    def __str__(self) -> str:
        return "; ".join(f"{d}:{','.join(map(str, row))}" for d, row in self.items())


def check_shape(sys: LadderSystem, a: Colouring) -> None:
    if a.S != sys.S:
        raise ShapeMismatch(f"colouring is defined on {a.S}, ladder system on {sys.S}")
    if a.values and a.length != sys.length:
        raise ShapeMismatch(f"colouring rows have length {a.length}, ladders {sys.length}")
    q = sys.field.q
    if any(not 0 <= v < q for row in a.values for v in row):
        raise ShapeMismatch(f"colouring value outside {sys.field}")


def all_colourings(sys: LadderSystem) -> Iterator[Colouring]:
    size = len(sys.S) * sys.length
    for flat in product(range(sys.field.q), repeat=size):
        yield Colouring.from_flat(sys.S, sys.length, flat)


def almost_equal(D: FilterD, s: Sequence[FieldElem], t: Sequence[FieldElem]) -> bool:
    if len(s) != len(t):
        raise LengthMismatch(f"sequences of length {len(s)} and {len(t)}")
    if len(s) != D.length:
        raise LengthMismatch(f"sequences of length {len(s)}, filter over range({D.length})")
    return all(s[n] == t[n] for n in D.window)


def colour_combine(F: FieldCtx, e0: FieldElem, a: Colouring, e1: FieldElem, b: Colouring) -> Colouring:
    """Componentwise ``e0*a + e1*b``; the difference a - b is ``(1, a, -1, b)``."""
    if a.S != b.S or (a.values and a.length != b.length):
        raise ShapeMismatch("colourings differ in S or ladder length")
    rows = tuple(
        tuple(F.add(F.mul(e0, x), F.mul(e1, y)) for x, y in zip(ra, rb))
        for ra, rb in zip(a.values, b.values)
    )
    return Colouring(a.S, rows)


def difference(F: FieldCtx, a: Colouring, b: Colouring) -> Colouring:
    return colour_combine(F, 1, a, F.neg(1), b)


def apply_uniformizer(f: Sequence[FieldElem], sys: LadderSystem) -> Colouring:
    """The colouring ``delta -> (f(z_{delta,0}), ..., f(z_{delta,L-1}))``."""
    if len(f) != sys.horizon:
        raise HorizonMismatch(f"function has {len(f)} values, horizon is {sys.horizon}")
    F = sys.field
    return Colouring(sys.S, tuple(tuple(evaluate(F, f, y) for y in ladder) for ladder in sys.steps))


def is_equivalent(sys: LadderSystem, D: FilterD, a: Colouring, b: Colouring) -> bool:
    """a and b are equivalent iff a - b is uniform."""
    from .uniformize import global_uniformize

    check_shape(sys, a)
    check_shape(sys, b)
    return global_uniformize(sys, D, difference(sys.field, a, b)) is not None
