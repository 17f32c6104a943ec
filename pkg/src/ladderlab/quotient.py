"""The uniform colourings as a linear subspace, and the quotient ColSet/UnifSet.

Coordinates of ColSet are the pairs (delta, n) in the order of S, then n;
the flat index of (S[i], n) is ``i * length + n``.  A colouring is uniform
iff its window coordinates lie in the image of the window-evaluation map
``f -> (f(z_{delta,n}))_{delta, n in window}``; off-window coordinates are
unconstrained.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .algebra import FieldElem
from .colouring import Colouring, FilterD, check_shape
from .errors import CapExceeded, TooLarge
from .ladder import LadderSystem
from .linalg import rref, solve
from .uniformize import PartialUniformizer

DEFAULT_CAP = 256
BUDGET_ENV = "LADDERLAB_ORACLE_BUDGET"


def oracle_budget() -> int:
    """Upper bound on brute-force enumeration counts (env-overridable)."""
    return int(os.environ.get(BUDGET_ENV, 1 << 20))


def window_rows(sys: LadderSystem, D: FilterD, mu: int | None = None) -> list[tuple[int, int]]:
    """Row labels (delta, n) of the window map for deltas <= mu."""
    mu = sys.horizon if mu is None else mu
    return [(d, n) for d in sys.S if d <= mu for n in D.sorted_window]


def _window_matrix(sys: LadderSystem, D: FilterD, mu: int) -> list[list[FieldElem]]:
    return [sys.ladder(d)[n].dense(sys.horizon)[:mu] for d, n in window_rows(sys, D, mu)]


def uniformizer_space(sys: LadderSystem, D: FilterD, a: Colouring, mu: int | None = None,
                      prefix: Sequence[FieldElem] = ()) -> tuple[PartialUniformizer | None, list[tuple]]:
    """All f on [0, mu) extending ``prefix`` that uniformize a on deltas <= mu.

    Returns a particular solution (free values 0), or None, together with a
    kernel basis; kernel vectors vanish on the prefix.
    """
    check_shape(sys, a)
    mu = sys.horizon if mu is None else mu
    k = len(prefix)
    if not k <= mu <= sys.horizon:
        raise ValueError(f"need len(prefix) <= mu <= horizon, got {k}, {mu}")
    F = sys.field
    rows = _window_matrix(sys, D, mu)
    rhs = []
    for (d, n), row in zip(window_rows(sys, D, mu), rows):
        fixed = F.dot(row[:k], prefix)
        rhs.append(F.sub(a(d)[n], fixed))
    free_rows = [row[k:] for row in rows]
    x, ker = solve(F, free_rows, rhs, mu - k)
    kernel = [tuple([0] * k + v) for v in ker]
    if x is None:
        return None, kernel
    return PartialUniformizer(sys.horizon, tuple(prefix) + tuple(x)), kernel


def unifset_membership(sys: LadderSystem, D: FilterD, a: Colouring) -> tuple[bool, PartialUniformizer | None]:
    f, _ = uniformizer_space(sys, D, a)
    return f is not None, f


@dataclass
class QuotientBasis:
    """RREF basis of UnifSet inside the flat coordinates of ColSet."""

    rows: list[tuple[FieldElem, ...]]
    pivots: list[int]
    dim_colset: int

    @property
    def non_pivots(self) -> list[int]:
        piv = set(self.pivots)
        return [j for j in range(self.dim_colset) if j not in piv]


def window_rank(sys: LadderSystem, D: FilterD) -> int:
    return len(rref(sys.field, _window_matrix(sys, D, sys.horizon), sys.horizon)[1])


def _quotient_basis(sys: LadderSystem, D: FilterD) -> QuotientBasis:
    F, L = sys.field, sys.length
    dim = len(sys.S) * L
    labels = window_rows(sys, D)
    W = _window_matrix(sys, D, sys.horizon)
    # column space of W = row space of its transpose
    WT = [[W[r][c] for r in range(len(W))] for c in range(sys.horizon)] if W else []
    R, piv = rref(F, WT, len(labels))
    gens: list[list[FieldElem]] = []
    index = {(d, n): i * L + n for i, d in enumerate(sys.S) for n in range(L)}
    for row in R[:len(piv)]:
        v = [0] * dim
        for (d, n), val in zip(labels, row):
            v[index[d, n]] = val
        gens.append(v)
    for i in range(len(sys.S)):
        for n in D.off_window:
            v = [0] * dim
            v[i * L + n] = 1
            gens.append(v)
    R2, piv2 = rref(F, gens, dim)
    return QuotientBasis([tuple(r) for r in R2[:len(piv2)]], piv2, dim)


def unifset_basis(sys: LadderSystem, D: FilterD) -> list[tuple[FieldElem, ...]]:
    """Echelonized basis of UnifSet as flat vectors."""
    return _quotient_basis(sys, D).rows


def normal_form(sys: LadderSystem, D: FilterD, a: Colouring,
                basis: QuotientBasis | None = None) -> Colouring:
    """Canonical representative of the coset a + UnifSet.

    Two colourings are equivalent iff their normal forms coincide; the normal
    form is supported on the non-pivot coordinates of the RREF basis.
    """
    check_shape(sys, a)
    basis = basis or _quotient_basis(sys, D)
    F = sys.field
    v = list(a.flat())
    for row, p in zip(basis.rows, basis.pivots):
        c = v[p]
        if c:
            v = [F.sub(x, F.mul(c, y)) for x, y in zip(v, row)]
    return Colouring.from_flat(sys.S, sys.length, v)


def coset_representatives(sys: LadderSystem, D: FilterD, cap: int = DEFAULT_CAP,
                          basis: QuotientBasis | None = None) -> list[Colouring]:
    basis = basis or _quotient_basis(sys, D)
    free = basis.non_pivots
    q = sys.field.q
    count = q ** len(free)
    if count > cap:
        raise CapExceeded(f"{count} coset representatives exceed cap {cap}")
    reps = []
    for vals in product(range(q), repeat=len(free)):
        v = [0] * basis.dim_colset
        for j, val in zip(free, vals):
            v[j] = val
        reps.append(Colouring.from_flat(sys.S, sys.length, v))
    return reps


@dataclass
class QuotientReport:
    dim_colset: int
    dim_unifset: int
    class_count: int
    q: int
    coset_reps: list[Colouring] | None = field(default=None, repr=False)

    @property
    def codim(self) -> int:
        return self.dim_colset - self.dim_unifset

    def as_dict(self) -> dict:
        out = {
            "class_count": self.class_count,
            "codim": self.codim,
            "dim_colset": self.dim_colset,
            "dim_unifset": self.dim_unifset,
            "q": self.q,
        }
        if self.coset_reps is not None:
            out["coset_reps"] = [str(c) for c in self.coset_reps]
        return out


def class_count(sys: LadderSystem, D: FilterD, cap: int = DEFAULT_CAP) -> QuotientReport:
    """Exact |ColSet / UnifSet| with coset representatives when at most ``cap``."""
    basis = _quotient_basis(sys, D)
    dim_unif = len(basis.rows)
    q = sys.field.q
    count = q ** (basis.dim_colset - dim_unif)
    reps = None
    if count <= cap:
        reps = coset_representatives(sys, D, cap, basis)
        for rep in reps:
            if normal_form(sys, D, rep, basis) != rep:
                raise RuntimeError(f"representative {rep} is not in normal form")
    return QuotientReport(basis.dim_colset, dim_unif, count, q, reps)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def _all_functions(q: int, horizon: int) -> np.ndarray:
    """Every f: range(horizon) -> F as rows, lexicographic order."""
    grids = np.indices((q,) * horizon, dtype=np.uint8) if horizon else np.zeros((0, 1), np.uint8)
    return grids.reshape(horizon, -1).T


def brute_class_count(sys: LadderSystem, D: FilterD, budget: int | None = None) -> int:
    """Count equivalence classes by exhaustive enumeration.

    Every f: range(horizon) -> F is evaluated on every window step, giving
    the set P of window patterns of uniform colourings.  Colourings with the
    same window projection are equivalent (f = 0 witnesses), so the classes
    are the connected components of the graph on window projections joining
    w and w + p for p in P.  Edges are added for a subset B of P generating
    the same subgroup (B collects the patterns that enlarge the additive
    closure), which leaves the components unchanged.  No rank, pivot or
    field inverse is used.
    """
    budget = oracle_budget() if budget is None else budget
    F = sys.field
    q = F.q
    if q ** (len(sys.S) * sys.length) > budget or q ** sys.horizon > budget:
        raise TooLarge(f"oracle needs q^(|S|L) and q^horizon <= {budget}")
    rows = window_rows(sys, D)
    k = len(rows)
    if k == 0:
        return 1
    T = F.np_tables
    add, mul = T["add"], T["mul"]

    fs = _all_functions(q, sys.horizon)
    weights = q ** np.arange(k, dtype=np.int64)
    codes = np.zeros(len(fs), dtype=np.int64)
    for j, (d, n) in enumerate(rows):
        acc = np.zeros(len(fs), dtype=np.int64)
        for x, c in sys.ladder(d)[n].entries:
            acc = add[acc, mul[c, fs[:, x]]]
        codes += acc * weights[j]
    patterns = np.unique(codes)

    N = q ** k
    digits = (np.arange(N, dtype=np.int64)[:, None] // weights[None, :]) % q

    def shift(members: np.ndarray, p: int) -> np.ndarray:
        pd = (p // weights) % q
        return (add[digits[members], pd[None, :]] * weights).sum(axis=1)

    closure = np.zeros(N, dtype=bool)
    closure[0] = True
    generators = []
    for p in patterns:
        if closure[p]:
            continue
        generators.append(int(p))
        while True:
            members = np.flatnonzero(closure)
            grown = shift(members, int(p))
            if closure[grown].all():
                break
            closure[grown] = True

    everyone = np.arange(N, dtype=np.int64)
    src = np.concatenate([everyone] * len(generators)) if generators else everyone
    dst = np.concatenate([shift(everyone, p) for p in generators]) if generators else everyone
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(N, N))
    n_comp, _ = connected_components(graph, directed=False)
    if n_comp * int(closure.sum()) != N:
        raise RuntimeError("component count disagrees with the closure size")
    return int(n_comp)
