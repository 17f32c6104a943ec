"""Isomorphisms of coded models and their correspondence with uniformizers.

An isomorphism between restrictions of M_a and M_b is determined by the
function f with ``iota(g_xi, 0) = (g_xi, f(xi))``; it exists iff f
uniformizes b - a on the deltas that survive the restriction.  The
searches here never assume that correspondence: ``brute_iso`` picks images
of the generator lines and of the S-point representatives, propagates
through ``+``, ``T_e``, ``P_b`` and ``P_u``, and verifies every table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb
from typing import Sequence

import numpy as np

from .algebra import Vec
from .colouring import Colouring, FilterD, all_colourings, check_shape, difference, is_equivalent
from .errors import MalformedIso, NotAUniformizer, NotCoded, TooLarge, VocabularyMismatch
from .ladder import LadderSystem
from .modelcode import (CodedModel, SPoint, Structure, UnionModel, VPoint, _skeleton,
                        build_model, disjoint_union, expected_size, restrict_model)
from .quotient import DEFAULT_CAP, class_count, coset_representatives, oracle_budget, uniformizer_space
from .uniformize import PartialUniformizer, evaluate_prefix, window_violation

RAW_LIMIT = 128
ISO_DOMAIN_LIMIT = 1 << 13


@dataclass(eq=False)
class StructureMap:
    """A bijection ``source -> target`` given as ``mapping[x] = image``."""

    source: Structure
    target: Structure
    mapping: np.ndarray
    verified: bool = False

    def __call__(self, x: int) -> int:
        return int(self.mapping[x])

    def inverse(self) -> StructureMap:
        inv = np.empty_like(self.mapping)
        inv[self.mapping] = np.arange(len(self.mapping))
        return StructureMap(self.target, self.source, inv, self.verified)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, int(j)) for i, j in enumerate(self.mapping)]


def verify_isomorphism(M: Structure, N: Structure, mapping: Sequence[int]) -> str | None:
    """None when ``mapping`` is an isomorphism M -> N, else a description of a failure."""
    if M.vocabulary() != N.vocabulary():
        return "vocabularies differ"
    if M.size != N.size:
        return f"domain sizes {M.size} and {N.size}"
    m = np.asarray(mapping, dtype=np.int64)
    if m.shape != (M.size,) or not np.array_equal(np.sort(m), np.arange(M.size)):
        return "map is not a bijection of the domains"
    bad_key = _unary_mismatch(M, N, m)
    if bad_key is not None:
        return f"relation {bad_key} not preserved"
    ext = np.append(m, -1)
    for k, t in M.functions.items():
        bad = np.flatnonzero(ext[t] != N.functions[k][m])
        if len(bad):
            return f"function {k} not preserved at element {bad[0]}"
    if M.has_plus:
        PM, PN = M.plus, N.plus
        ext32 = ext.astype(np.int32)
        for lo in range(0, M.size, 512):
            rows = slice(lo, lo + 512)
            if not np.array_equal(ext32[PM[rows]], PN[m[rows]][:, m]):
                return "+ not preserved"
    if M.sim is not None:
        pairs = set(zip(M.sim.tolist(), N.sim[m].tolist()))
        left = {x for x, _ in pairs}
        right = {y for _, y in pairs}
        if len(pairs) != len(left) or len(pairs) != len(right):
            return "~ not preserved"
    return None


def _unary_mismatch(M: Structure, N: Structure, m: np.ndarray):
    """First unary key whose image under m differs from N's relation, else None."""
    keys = list(M.unary)
    if not keys:
        return None
    lens = np.array([len(M.unary[k]) for k in keys])
    if not np.array_equal(lens, [len(N.unary[k]) for k in keys]):
        return keys[int(np.flatnonzero(lens != [len(N.unary[k]) for k in keys])[0])]
    tags = np.repeat(np.arange(len(keys)), lens)
    left = m[np.concatenate([M.unary[k] for k in keys])]
    right = np.concatenate([N.unary[k] for k in keys])
    left = left[np.lexsort((left, tags))]
    right = right[np.lexsort((right, tags))]
    diff = np.flatnonzero(left != right)
    return None if not len(diff) else keys[int(tags[diff[0]])]


# ---------------------------------------------------------------------------
# uniformizers <-> isomorphisms
# ---------------------------------------------------------------------------

def _restricted_pair(Ma: CodedModel, Mb: CodedModel, mu: int) -> tuple[CodedModel, CodedModel]:
    if (Ma.sys, Ma.D) != (Mb.sys, Mb.D):
        raise VocabularyMismatch("models come from different instances")
    return restrict_model(Ma, mu), restrict_model(Mb, mu)


def iso_from_uniformizer(Ma: CodedModel, Mb: CodedModel, f: PartialUniformizer) -> StructureMap:
    """The isomorphism between the restrictions to f.mu given by f.

    ``(y, c) -> (y, f(y) + c)`` and ``(delta, u) -> (delta, h_delta + u)``
    with ``h_delta(n) = f(z_{delta,n}) - (b - a)_{delta,n}``.
    """
    sys, D = Ma.sys, Ma.D
    F = sys.field
    mu = f.mu
    a, b = Ma.colouring, Mb.colouring
    diff = difference(F, b, a)
    bad = window_violation(sys, D, diff, f.values, mu)
    if bad is not None:
        raise NotAUniformizer(bad, f"f does not uniformize b - a at delta={bad}")
    A, B = _restricted_pair(Ma, Mb, mu)

    mapping = np.empty(A.size, dtype=np.int64)
    shift: dict[int, tuple[int, ...]] = {}
    for i, pt in enumerate(A.points):
        if isinstance(pt, VPoint):
            image = VPoint(pt.y, F.add(evaluate_prefix(F, f.values, pt.y), pt.c))
        else:
            h = shift.get(pt.delta)
            if h is None:
                h = tuple(F.sub(evaluate_prefix(F, f.values, z), d)
                          for z, d in zip(sys.ladder(pt.delta), diff(pt.delta)))
                shift[pt.delta] = h
            image = SPoint(pt.delta, tuple(F.add(x, y) for x, y in zip(h, pt.u)))
        mapping[i] = B.index[image]
    problem = verify_isomorphism(A, B, mapping)
    if problem is not None:
        raise RuntimeError(f"constructed map failed verification: {problem}")
    return StructureMap(A, B, mapping, True)


def uniformizer_from_iso(iota: StructureMap) -> PartialUniformizer:
    """Read f off an isomorphism of restrictions: ``iota(g_xi, 0) = (g_xi, f(xi))``."""
    A, B = iota.source, iota.target
    if not (isinstance(A, CodedModel) and isinstance(B, CodedModel)):
        raise MalformedIso("both ends must be coded models")
    if A.mu != B.mu or (A.sys, A.D) != (B.sys, B.D):
        raise MalformedIso("restrictions of different instances or bounds")
    problem = verify_isomorphism(A, B, iota.mapping)
    if problem is not None:
        raise MalformedIso(problem)
    sys = A.sys
    values = []
    for xi in range(A.mu):
        g = Vec.gen(xi, sys.horizon)
        image = B.points[iota(A.index[VPoint(g, 0)])]
        if not isinstance(image, VPoint) or image.y != g:
            raise MalformedIso(f"generator line {xi} not preserved")
        values.append(image.c)
    f = PartialUniformizer(sys.horizon, tuple(values))
    diff = difference(sys.field, B.colouring, A.colouring)
    bad = window_violation(sys, A.D, diff, f.values, A.mu)
    if bad is not None:
        raise MalformedIso(f"extracted function fails at delta={bad}")
    return f


# ---------------------------------------------------------------------------
# structure-guided search
# ---------------------------------------------------------------------------

def _vpoint_arrays(M: CodedModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """V-point element ids, prefix codes of y (first mu coordinates) and c."""
    q = M.sys.field.q
    n_s = M.n_spoints
    if M.mu == M.sys.horizon and M.size - n_s == q ** (M.sys.horizon + 1):
        # full model: V-point index is n_s + ycode * q + c
        ids = np.arange(n_s, M.size, dtype=np.int64)
        return ids, (ids - n_s) // q, (ids - n_s) % q
    ids, codes, cs = [], [], []
    for i, pt in enumerate(M.points):
        if isinstance(pt, VPoint):
            code = 0
            dense = pt.y.dense(M.sys.horizon)
            for x in range(M.mu):
                code = code * q + dense[x]
            ids.append(i)
            codes.append(code)
            cs.append(pt.c)
    return np.array(ids, dtype=np.int64), np.array(codes, dtype=np.int64), np.array(cs, dtype=np.int64)


def _first(N: Structure, key) -> int | None:
    members = N.unary.get(key)
    return None if members is None or not len(members) else int(members[0])


def _image_of_vec(N: Structure, zero: int, gens: dict[int, int], y: Vec) -> int:
    """iota(y, 0) computed in N from the images of the (g_xi, 0)."""
    acc = zero
    for x, c in y.entries:
        term = N.functions[("T", c)][gens[x]]
        if acc < 0 or term < 0:
            return -1
        acc = int(N.plus[acc, term])
    return acc


def _vector_images(M: CodedModel, N: Structure, zero: int, gens: dict[int, int]) -> np.ndarray | None:
    """iota on every V-point of M, by additivity and P_b."""
    q = M.sys.field.q
    arr = np.array([zero], dtype=np.int64)
    P = N.plus
    for xi in range(M.mu):
        terms = np.array([N.functions[("T", d)][gens[xi]] for d in range(q)], dtype=np.int64)
        if (terms < 0).any() or (arr < 0).any():
            return None
        arr = P[arr[:, None], terms[None, :]].astype(np.int64).reshape(-1)
    if (arr < 0).any():
        return None
    ids, codes, cs = _vpoint_arrays(M)
    base = arr[codes]
    out = np.empty(len(ids), dtype=np.int64)
    for c in range(q):
        sel = cs == c
        out[sel] = N.functions[("Pb", c)][base[sel]]
    return out


def _spoint_lookup(N: Structure, delta: int, length: int) -> dict | None:
    """Pr-pattern -> element of R_delta; None if the pattern is not injective."""
    members = N.unary.get(("Rd", delta))
    if members is None:
        return {}
    pats = np.stack([N.functions[("Pr", n)][members] for n in range(length)], axis=1)
    table = {}
    for s, row in zip(members.tolist(), map(tuple, pats.tolist())):
        if row in table:
            return None
        table[row] = s
    return table


def _assemble(M: CodedModel, N: Structure, zero: int, gens: dict[int, int],
              reps: dict[int, int]) -> np.ndarray | None:
    """Full map from generator images and the images ``reps[delta]`` of (delta, 0)."""
    vimg = _vector_images(M, N, zero, gens)
    if vimg is None:
        return None
    mapping = np.full(M.size, -1, dtype=np.int64)
    ids, _, _ = _vpoint_arrays(M)
    mapping[ids] = vimg
    zero_u = tuple([0] * M.sys.length)
    for i, pt in enumerate(M.points):
        if isinstance(pt, SPoint):
            img = N.functions[("Pu", pt.u)][reps[pt.delta]] if pt.u != zero_u else reps[pt.delta]
            mapping[i] = img
    if (mapping < 0).any():
        return None
    return mapping


def _guided_iso(M: CodedModel, N: Structure) -> StructureMap | None:
    sys = M.sys
    q, lam, L = sys.field.q, sys.horizon, sys.length
    if M.vocabulary() != N.vocabulary() or M.size != N.size:
        return None
    for k, v in M.unary.items():
        if len(N.unary[k]) != len(v):
            return None
    zero_line = _first(N, ("R", Vec.zero(lam)))
    if zero_line is None:
        return None
    zero = int(N.functions[("T", 0)][zero_line])
    if zero < 0:
        return None

    deltas = [d for d in sys.S if d <= M.mu]
    lines = {}
    for xi in range(M.mu):
        members = N.unary.get(("R", Vec.gen(xi, lam)))
        if members is None or len(members) != q:
            return None
        lines[xi] = members
    support = sorted({x for d in deltas for y in sys.ladder(d) for x in y.support})
    n_cand = q ** len(support)
    if n_cand > oracle_budget():
        raise TooLarge(f"{n_cand} generator-image candidates exceed the oracle budget")
    choice = np.indices((q,) * len(support), dtype=np.int64).reshape(len(support), n_cand)
    cand = {x: lines[x][choice[j]] for j, x in enumerate(support)}

    lookups = {}
    for d in deltas:
        table = _spoint_lookup(N, d, L)
        if table is None:
            return None
        lookups[d] = table
    P = N.plus
    alive = np.ones(n_cand, dtype=bool)
    patterns: dict[int, np.ndarray] = {}
    a = M.colouring
    for d in deltas:
        cols = []
        for n, z in enumerate(sys.ladder(d)):
            acc = np.full(n_cand, zero, dtype=np.int64)
            for x, c in z.entries:
                term = N.functions[("T", c)][cand[x]]
                ok = (acc >= 0) & (term >= 0)
                acc = np.where(ok, P[np.maximum(acc, 0), np.maximum(term, 0)], -1)
            img = np.where(acc >= 0, N.functions[("Pb", a(d)[n])][np.maximum(acc, 0)], -1)
            cols.append(img)
        patterns[d] = np.stack(cols, axis=1)
        table = lookups[d]
        for j in np.flatnonzero(alive):
            if tuple(patterns[d][j].tolist()) not in table:
                alive[j] = False

    for j in np.flatnonzero(alive):
        gens = {xi: int(lines[xi][0]) for xi in range(M.mu)}
        gens.update({x: int(cand[x][j]) for x in support})
        reps = {d: lookups[d][tuple(patterns[d][j].tolist())] for d in deltas}
        mapping = _assemble(M, N, zero, gens, reps)
        if mapping is not None and verify_isomorphism(M, N, mapping) is None:
            return StructureMap(M, N, mapping, True)
    return None


# ---------------------------------------------------------------------------
# raw backtracking search
# ---------------------------------------------------------------------------

def _signatures(M: Structure) -> list[tuple]:
    sig: list[list] = [[] for _ in range(M.size)]
    for k in sorted(M.unary, key=repr):
        for x in M.unary[k].tolist():
            sig[x].append(repr(k))
    for k in sorted(M.functions, key=repr):
        t = M.functions[k]
        for x in range(M.size):
            sig[x].append(t[x] >= 0)
    if M.has_plus:
        defined = (M.plus >= 0).sum(axis=1)
        for x in range(M.size):
            sig[x].append(int(defined[x]))
    if M.sim is not None:
        counts = np.bincount(M.sim)
        for x in range(M.size):
            sig[x].append(int(counts[M.sim[x]]))
    return [tuple(s) for s in sig]


def _raw_iso(M: Structure, N: Structure) -> StructureMap | None:
    if M.size > RAW_LIMIT:
        raise TooLarge(f"raw search is limited to {RAW_LIMIT} elements, got {M.size}")
    if M.vocabulary() != N.vocabulary() or M.size != N.size:
        return None
    sM, sN = _signatures(M), _signatures(N)
    if sorted(sM) != sorted(sN):
        return None
    n = M.size
    fwd = [-1] * n
    bwd = [-1] * n
    keys = list(M.functions)
    fM = [M.functions[k].tolist() for k in keys]
    fN = [N.functions[k].tolist() for k in keys]
    PM = M.plus.tolist() if M.has_plus else None
    PN = N.plus.tolist() if N.has_plus else None
    simM = M.sim.tolist() if M.sim is not None else None
    simN = N.sim.tolist() if N.sim is not None else None

    def assign(x: int, y: int, trail: list) -> bool:
        stack = [(x, y)]
        while stack:
            x, y = stack.pop()
            if fwd[x] == y:
                continue
            if fwd[x] != -1 or bwd[y] != -1 or sM[x] != sN[y]:
                return False
            if simM is not None:
                for z in trail:
                    if (simM[x] == simM[z]) != (simN[y] == simN[fwd[z]]):
                        return False
            fwd[x], bwd[y] = y, x
            trail.append(x)
            for tm, tn in zip(fM, fN):
                if (tm[x] < 0) != (tn[y] < 0):
                    return False
                if tm[x] >= 0:
                    stack.append((tm[x], tn[y]))
            if PM is not None:
                for z in trail:
                    w = fwd[z]
                    for u, v in ((PM[x][z], PN[y][w]), (PM[z][x], PN[w][y])):
                        if (u < 0) != (v < 0):
                            return False
                        if u >= 0:
                            stack.append((u, v))
        return True

    def undo(trail: list, mark: int) -> None:
        while len(trail) > mark:
            x = trail.pop()
            bwd[fwd[x]] = -1
            fwd[x] = -1

    trail: list[int] = []

    def search() -> bool:
        free = [x for x in range(n) if fwd[x] < 0]
        if not free:
            return True
        options = {x: [y for y in range(n) if bwd[y] < 0 and sN[y] == sM[x]] for x in free}
        x = min(free, key=lambda v: len(options[v]))
        for y in options[x]:
            mark = len(trail)
            if assign(x, y, trail) and search():
                return True
            undo(trail, mark)
        return False

    if not search():
        return None
    mapping = np.array(fwd, dtype=np.int64)
    if verify_isomorphism(M, N, mapping) is not None:
        raise RuntimeError("raw search produced an invalid map")
    return StructureMap(M, N, mapping, True)


# ---------------------------------------------------------------------------
# unions
# ---------------------------------------------------------------------------

def _blocks(U: Structure) -> list[tuple[Structure, np.ndarray]]:
    """The ~-blocks of U as (structure, element ids in U)."""
    if isinstance(U, UnionModel) and U.components:
        return [(C, np.arange(off, off + C.size)) for C, off in zip(U.components, U.offsets)]
    out = []
    for tag in np.unique(U.sim):
        ids = np.flatnonzero(U.sim == tag)
        sub, _ = U.induced(ids)
        sub.sim = None
        out.append((sub, ids))
    return out


def _union_iso(M: Structure, N: Structure) -> StructureMap | None:
    if M.vocabulary() != N.vocabulary() or M.size != N.size:
        return None
    bm, bn = _blocks(M), _blocks(N)
    if len(bm) != len(bn):
        return None
    used = [False] * len(bn)
    mapping = np.full(M.size, -1, dtype=np.int64)
    for C, ids in bm:
        for j, (E, jds) in enumerate(bn):
            if used[j] or C.size != E.size:
                continue
            iota = brute_iso(C, E)
            if iota is not None:
                used[j] = True
                mapping[ids] = jds[iota.mapping]
                break
        else:
            return None
    if verify_isomorphism(M, N, mapping) is not None:
        return None
    return StructureMap(M, N, mapping, True)


def brute_iso(M: Structure, N: Structure, mode: str = "auto") -> StructureMap | None:
    """Decide M = N up to isomorphism; returns a verified map or None.

    ``mode`` is "guided" (M must be a coded model), "raw" (backtracking, at
    most 128 elements) or "auto".  Unions with ~ are split into blocks.
    """
    if mode not in ("auto", "guided", "raw"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "raw":
        return _raw_iso(M, N)
    if M.sim is not None or N.sim is not None:
        if M.sim is None or N.sim is None:
            return None
        return _union_iso(M, N)
    if isinstance(M, CodedModel):
        return _guided_iso(M, N)
    if isinstance(N, CodedModel):
        iota = _guided_iso(N, M)
        return None if iota is None else iota.inverse()
    if mode == "guided":
        raise ValueError("guided search needs a coded model on one side")
    return _raw_iso(M, N)


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------

def decode_structure(N: Structure, sys: LadderSystem, D: FilterD) -> tuple[Colouring, StructureMap]:
    """Find b and a verified isomorphism N -> M_b.

    Deterministic: generator images are the first elements of their lines,
    and (delta, 0) is sent to the first element of R_delta.  Only the coset
    of b is meaningful.
    """
    F = sys.field
    q, lam, L = F.q, sys.horizon, sys.length
    sk = _skeleton(sys, D)
    if (frozenset(N.unary), frozenset(N.functions), N.has_plus, N.sim is not None) != \
            (frozenset(sk.unary), frozenset(sk.functions) | {("Pr", n) for n in range(L)}, True, False):
        raise NotCoded("structure does not have the vocabulary of the instance")
    if N.size != expected_size(sys, D):
        raise NotCoded(f"domain has {N.size} elements, expected {expected_size(sys, D)}")
    zero_line = _first(N, ("R", Vec.zero(lam)))
    zero = int(N.functions[("T", 0)][zero_line]) if zero_line is not None else -1
    if zero < 0:
        raise NotCoded("no additive identity")
    gens = {}
    for xi in range(lam):
        g = _first(N, ("R", Vec.gen(xi, lam)))
        if g is None:
            raise NotCoded(f"generator line {xi} is empty")
        gens[xi] = g
    reps, rows = {}, []
    for d in sys.S:
        s = _first(N, ("Rd", d))
        if s is None:
            raise NotCoded(f"R_{d} is empty")
        reps[d] = s
        row = []
        for n, z in enumerate(sys.ladder(d)):
            w = _image_of_vec(N, zero, gens, z)
            r = int(N.functions[("Pr", n)][s])
            hit = [c for c in range(q) if w >= 0 and N.functions[("Pb", c)][w] == r]
            if len(hit) != 1:
                raise NotCoded(f"Pr_{n} of the delta={d} representative is not on its line")
            row.append(hit[0])
        rows.append(tuple(row))
    b = Colouring(sys.S, tuple(rows))
    Mb = build_model(sys, D, b)
    mapping = _assemble(Mb, N, zero, gens, reps)
    if mapping is None:
        raise NotCoded("propagation left elements unmapped")
    problem = verify_isomorphism(Mb, N, mapping)
    if problem is not None:
        raise NotCoded(problem)
    return b, StructureMap(Mb, N, mapping, True).inverse()


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

@dataclass
class Classification:
    class_count: int
    representatives: list[Colouring] | None
    iso_class_count: int | None = None
    checked: int = 0

    @property
    def cross_checked(self) -> bool:
        return self.iso_class_count is not None

    @property
    def ok(self) -> bool:
        return self.iso_class_count is None or self.iso_class_count == self.class_count

    def as_dict(self) -> dict:
        out = {"class_count": self.class_count}
        if self.representatives is not None:
            out["representatives"] = [str(c) for c in self.representatives]
        if self.cross_checked:
            out["iso_class_count"] = self.iso_class_count
            out["models_checked"] = self.checked
            out["agree"] = self.ok
        return out


def iso_classes(models: Sequence[Structure]) -> list[int]:
    """Label each model by its isomorphism class (first occurrence order)."""
    reps: list[Structure] = []
    labels = []
    for M in models:
        for i, R in enumerate(reps):
            if brute_iso(R, M) is not None:
                labels.append(i)
                break
        else:
            labels.append(len(reps))
            reps.append(M)
    return labels


def _check_iso_bounds(sys: LadderSystem, D: FilterD, n_models: int) -> None:
    size = expected_size(sys, D)
    if size > ISO_DOMAIN_LIMIT:
        raise TooLarge(f"coded models have {size} elements (iso limit {ISO_DOMAIN_LIMIT})")
    if n_models > oracle_budget():
        raise TooLarge(f"{n_models} models exceed the oracle budget")


def classify_No(sys: LadderSystem, D: FilterD, colourings: Sequence[Colouring] | None = None,
                cross_check: bool = False, cap: int = DEFAULT_CAP) -> Classification:
    """|ColSet/UnifSet|, optionally recounted as isomorphism classes of coded models.

    Without an explicit list the cross-check runs over every colouring.
    """
    report = class_count(sys, D, cap)
    result = Classification(report.class_count, report.coset_reps)
    if not cross_check:
        return result
    if colourings is None:
        n = sys.field.q ** (len(sys.S) * sys.length)
        _check_iso_bounds(sys, D, n)
        colourings = list(all_colourings(sys))
    else:
        _check_iso_bounds(sys, D, len(colourings))
    labels = iso_classes([build_model(sys, D, c) for c in colourings])
    result.iso_class_count = len(set(labels))
    result.checked = len(colourings)
    return result


def classify_union(sys: LadderSystem, D: FilterD, reps: Sequence[Colouring], copies: int,
                   cross_check: bool = False) -> int:
    """Isomorphism types of unions of ``copies`` coded models drawn from the classes of ``reps``.

    With ``cross_check`` every tuple of reps is built and the unions are
    classified by search; a disagreement raises RuntimeError.
    """
    nu = len(reps)
    if nu < 1 or copies < 1:
        raise ValueError("need at least one representative and one copy")
    expected = comb(nu + copies - 1, copies)
    if not cross_check:
        return expected
    n = nu ** copies
    if n > oracle_budget():
        raise TooLarge(f"{n} unions exceed the oracle budget")
    _check_iso_bounds(sys, D, n)
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            if is_equivalent(sys, D, a, b):
                raise ValueError(f"representatives {a} and {b} are equivalent")
    models = [build_model(sys, D, c) for c in reps]
    unions = [disjoint_union([models[i] for i in idx]) for idx in product(range(nu), repeat=copies)]
    found = len(set(iso_classes(unions)))
    if found != expected:
        raise RuntimeError(f"union classification found {found} types, expected {expected}")
    return expected


# ---------------------------------------------------------------------------
# back and forth
# ---------------------------------------------------------------------------

@dataclass
class ExtensionResult:
    holds: bool
    isos_checked: int
    witness: PartialUniformizer | None = None
    iso: StructureMap | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        out = {"holds": self.holds, "isos_checked": self.isos_checked}
        if self.witness is not None:
            out["non_extendable"] = list(self.witness.values)
        return out


def check_extension_property(sys: LadderSystem, D: FilterD, a: Colouring, b: Colouring,
                             mu0: int, mu1: int) -> ExtensionResult:
    """Does every isomorphism of the mu0-restrictions of M_a, M_b extend to mu1?

    The isomorphisms are enumerated through the functions f on [0, mu0)
    they correspond to; each is tested for an extension by an exact solve.
    """
    check_shape(sys, a)
    check_shape(sys, b)
    if not 0 <= mu0 <= mu1 <= sys.horizon:
        raise ValueError(f"need 0 <= mu0 <= mu1 <= {sys.horizon}")
    F = sys.field
    diff = difference(F, b, a)
    base, kernel = uniformizer_space(sys, D, diff, mu0)
    if base is None:
        return ExtensionResult(True, 0)
    count = F.q ** len(kernel)
    if count > oracle_budget():
        raise TooLarge(f"{count} isomorphisms exceed the oracle budget")
    checked = 0
    for coeffs in product(range(F.q), repeat=len(kernel)):
        values = list(base.values)
        for c, v in zip(coeffs, kernel):
            if c:
                values = [F.add(x, F.mul(c, y)) for x, y in zip(values, v)]
        f0 = PartialUniformizer(sys.horizon, tuple(values))
        checked += 1
        if mu1 == mu0:
            continue
        ext, _ = uniformizer_space(sys, D, diff, mu1, prefix=f0.values)
        if ext is None:
            Ma, Mb = build_model(sys, D, a), build_model(sys, D, b)
            return ExtensionResult(False, checked, f0, iso_from_uniformizer(Ma, Mb, f0))
    return ExtensionResult(True, checked)
