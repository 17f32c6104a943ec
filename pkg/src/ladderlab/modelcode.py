"""Finite coded models M_a and the operations on them.

The domain of M_a is ``(S x OD) u (Vec x F)``.  OD is the set of
``u in F^L`` vanishing on the window.  Elements are numbered 0..size-1:
first the S-points ordered by (delta, u), then the V-points ordered by
(y as a dense tuple, c).  Relations are stored as tables:

* unary relations ``R_y`` and ``R_delta`` as sorted element arrays,
* unary functions ``Pr_n``, ``P_b``, ``P_u``, ``T_e`` as arrays with -1
  where undefined,
* ``+`` as a square table, -1 off the V-points,
* the optional copy relation ``~`` of disjoint unions as a tag per element.

Symbol keys: ``("R", y)``, ``("Rd", delta)``, ``("Pr", n)``, ``("Pb", b)``,
``("Pu", u)``, ``("T", e)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Callable, Hashable, NamedTuple, Sequence

import numpy as np

from .algebra import Vec
from .colouring import Colouring, FilterD, check_shape
from .errors import TooLarge, VocabularyMismatch
from .ladder import LadderSystem

MAX_DOMAIN = 1 << 20
MAX_PLUS = 1 << 13


class SPoint(NamedTuple):
    delta: int
    u: tuple[int, ...]


class VPoint(NamedTuple):
    y: Vec
    c: int


@dataclass(eq=False)
class Structure:
    """A finite structure over a vocabulary of unary relations and functions."""

    size: int
    unary: dict[Hashable, np.ndarray]
    functions: dict[Hashable, np.ndarray]
    _plus: np.ndarray | None = field(default=None, repr=False)
    sim: np.ndarray | None = None
    _plus_factory: Callable[[], np.ndarray] | None = field(default=None, repr=False)

    @property
    def plus(self) -> np.ndarray | None:
        if self._plus is None and self._plus_factory is not None:
            self._plus = self._plus_factory()
            self._plus_factory = None
        return self._plus

    @property
    def has_plus(self) -> bool:
        return self._plus is not None or self._plus_factory is not None

    def vocabulary(self) -> tuple:
        return (frozenset(self.unary), frozenset(self.functions), self.has_plus, self.sim is not None)

    def permuted(self, perm: Sequence[int]) -> Structure:
        """The isomorphic copy in which element x is renamed perm[x]."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.size)):
            raise ValueError("perm is not a permutation of the domain")
        inv = np.empty_like(perm)
        inv[perm] = np.arange(self.size)
        ext = np.append(perm, -1)  # ext[-1] == -1 keeps undefined entries

        unary = {k: np.sort(perm[v]) for k, v in self.unary.items()}
        functions = {k: ext[t[inv]] for k, t in self.functions.items()}
        plus = None
        if self.has_plus:
            P = self.plus
            plus = ext[P[np.ix_(inv, inv)]].astype(np.int32)
        sim = None if self.sim is None else self.sim[inv].copy()
        return Structure(self.size, unary, functions, plus, sim)

    def induced(self, elements: Sequence[int]) -> tuple[Structure, np.ndarray]:
        """Substructure on ``elements`` (kept in the given order) and the old->new map."""
        keep = np.asarray(elements, dtype=np.int64)
        remap = np.full(self.size + 1, -1, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        unary = {}
        for k, v in self.unary.items():
            new = remap[v]
            new = np.sort(new[new >= 0])
            if len(new):
                unary[k] = new
        functions = {k: remap[t[keep]] for k, t in self.functions.items()}
        plus = None
        if self.has_plus:
            plus = remap[self.plus[np.ix_(keep, keep)]].astype(np.int32)
        sim = None if self.sim is None else self.sim[keep].copy()
        return Structure(len(keep), unary, functions, plus, sim), remap[:-1]

    def copy(self) -> Structure:
        return Structure(self.size, {k: v.copy() for k, v in self.unary.items()},
                         {k: v.copy() for k, v in self.functions.items()},
                         None if not self.has_plus else self.plus.copy(),
                         None if self.sim is None else self.sim.copy())


@dataclass(eq=False)
class CodedModel(Structure):
    """M_a (or its restriction to mu+1) with the provenance of every element."""

    sys: LadderSystem | None = None
    D: FilterD | None = None
    colouring: Colouring | None = None
    mu: int = 0
    points: list = field(default_factory=list, repr=False)
    index: dict = field(default_factory=dict, repr=False)

    @property
    def n_spoints(self) -> int:
        # S-points come first
        return next((i for i, p in enumerate(self.points) if isinstance(p, VPoint)), len(self.points))


@dataclass(eq=False)
class UnionModel(Structure):
    """Disjoint union of coded models; ``components[i]`` occupies ``offsets[i]:``."""

    components: list[Structure] = field(default_factory=list, repr=False)
    offsets: list[int] = field(default_factory=list)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def od_functions(D: FilterD, q: int) -> list[tuple[int, ...]]:
    """F^L functions vanishing on the window, lexicographic."""
    off = D.off_window
    out = []
    for vals in product(range(q), repeat=len(off)):
        u = [0] * D.length
        for n, v in zip(off, vals):
            u[n] = v
        out.append(tuple(u))
    return out


def expected_size(sys: LadderSystem, D: FilterD, mu: int | None = None) -> int:
    mu = sys.horizon if mu is None else mu
    q = sys.field.q
    n_delta = sum(1 for d in sys.S if d <= mu)
    return n_delta * q ** (sys.length - len(D.window)) + q ** mu * q


@dataclass(frozen=True)
class _Skeleton:
    points: tuple
    index: dict
    unary: dict
    functions: dict
    plus_factory: Callable[[], np.ndarray]
    n_s: int
    od: tuple
    od_index: dict


def _vpoint_digits(q: int, horizon: int) -> np.ndarray:
    return np.indices((q,) * (horizon + 1), dtype=np.int64).reshape(horizon + 1, -1).T


@lru_cache(maxsize=16)
def _skeleton(sys: LadderSystem, D: FilterD) -> _Skeleton:
    """Everything in M_a except the Pr_n tables (which depend on a)."""
    F, lam = sys.field, sys.horizon
    q = F.q
    size = expected_size(sys, D)
    if size > MAX_DOMAIN:
        raise TooLarge(f"coded model would have {size} elements (cap {MAX_DOMAIN})")
    T = F.np_tables
    od = od_functions(D, q)
    od_index = {u: i for i, u in enumerate(od)}
    points: list = [SPoint(d, u) for d in sys.S for u in od]
    n_s = len(points)

    digits = _vpoint_digits(q, lam)
    n_v = len(digits)
    weights = q ** np.arange(lam, -1, -1, dtype=np.int64)
    vecs = [Vec.from_dense(tuple(int(v) for v in row)) for row in digits[::q, :lam]]
    points.extend(VPoint(y, c) for y in vecs for c in range(q))
    index = {pt: i for i, pt in enumerate(points)}
    size = len(points)

    def vcode(dig: np.ndarray) -> np.ndarray:
        return n_s + dig @ weights

    unary: dict = {}
    for j, y in enumerate(vecs):
        unary[("R", y)] = np.arange(n_s + j * q, n_s + (j + 1) * q, dtype=np.int64)
    for i, d in enumerate(sys.S):
        unary[("Rd", d)] = np.arange(i * len(od), (i + 1) * len(od), dtype=np.int64)

    functions: dict = {}
    undefined_s = np.full(n_s, -1, dtype=np.int64)
    for b in range(q):
        dig = digits.copy()
        dig[:, lam] = T["add"][dig[:, lam], b]
        functions[("Pb", b)] = np.concatenate([undefined_s, vcode(dig)])
    for e in range(q):
        functions[("T", e)] = np.concatenate([undefined_s, vcode(T["mul"][e][digits])])
    undefined_v = np.full(n_v, -1, dtype=np.int64)
    add = F.add
    for u in od:
        table = np.empty(n_s, dtype=np.int64)
        for i, d in enumerate(sys.S):
            for j, v in enumerate(od):
                w = tuple(add(x, y) for x, y in zip(v, u))
                table[i * len(od) + j] = i * len(od) + od_index[w]
        functions[("Pu", u)] = np.concatenate([table, undefined_v])

    def plus_factory() -> np.ndarray:
        if n_v > MAX_PLUS:
            raise TooLarge(f"+ table over {n_v} V-points exceeds {MAX_PLUS}")
        table = np.full((size, size), -1, dtype=np.int32)
        acc = np.zeros((n_v, n_v), dtype=np.int64)
        for col in range(lam + 1):
            acc += T["add"][digits[:, col][:, None], digits[:, col][None, :]] * weights[col]
        table[n_s:, n_s:] = acc + n_s
        return table

    # shared between every model of the instance, so freeze them
    for arr in (*unary.values(), *functions.values()):
        arr.setflags(write=False)
    return _Skeleton(tuple(points), index, unary, functions, plus_factory, n_s, tuple(od), od_index)


def _pr_tables(sys: LadderSystem, D: FilterD, a: Colouring, sk: _Skeleton, size: int) -> dict:
    F = sys.field
    tables = {}
    for n in range(sys.length):
        table = np.full(size, -1, dtype=np.int64)
        k = 0
        for d, ladder in sys.items():
            z = ladder[n]
            base = a(d)[n]
            for u in sk.od:
                table[k] = sk.index[VPoint(z, F.add(base, u[n]))]
                k += 1
        tables[("Pr", n)] = table
    return tables


def build_model(sys: LadderSystem, D: FilterD, a: Colouring) -> CodedModel:
    """Materialize M_a.  Tables other than Pr_n are shared between models."""
    check_shape(sys, a)
    sk = _skeleton(sys, D)
    size = len(sk.points)
    functions = dict(sk.functions)
    functions.update(_pr_tables(sys, D, a, sk, size))
    shared = _shared_plus(sys, D)
    return CodedModel(size, dict(sk.unary), functions, None, None, shared,
                      sys=sys, D=D, colouring=a, mu=sys.horizon,
                      points=list(sk.points), index=sk.index)


@lru_cache(maxsize=4)
def _plus_cache(sys: LadderSystem, D: FilterD) -> np.ndarray:
    table = _skeleton(sys, D).plus_factory()
    table.setflags(write=False)
    return table


def _shared_plus(sys: LadderSystem, D: FilterD) -> Callable[[], np.ndarray]:
    return lambda: _plus_cache(sys, D)


def restrict_model(M: CodedModel, mu: int) -> CodedModel:
    """Induced substructure on {(y, c): Supp y below mu} u {(delta, u): delta <= mu}."""
    if not 0 <= mu <= M.mu:
        raise ValueError(f"mu={mu} outside [0, {M.mu}]")
    if mu == M.mu:
        return M
    keep = [i for i, pt in enumerate(M.points)
            if (isinstance(pt, SPoint) and pt.delta <= mu)
            or (isinstance(pt, VPoint) and (not pt.y.support or pt.y.support[-1] < mu))]
    base = Structure(M.size, M.unary, M.functions)  # + is rebuilt below, not sliced
    sub, _ = base.induced(keep)
    points = [M.points[i] for i in keep]
    plus = M._plus if M._plus is not None and M._plus_factory is None and not _is_shared(M) else None
    factory = None
    if plus is not None:
        keep_arr = np.asarray(keep, dtype=np.int64)
        remap = np.full(M.size + 1, -1, dtype=np.int64)
        remap[keep_arr] = np.arange(len(keep_arr))
        plus = remap[plus[np.ix_(keep_arr, keep_arr)]].astype(np.int32)
    elif M.has_plus:
        factory = _restricted_plus(M.sys.field, points)
    return CodedModel(sub.size, sub.unary, sub.functions, plus, None, factory,
                      sys=M.sys, D=M.D, colouring=M.colouring, mu=mu,
                      points=points, index={pt: i for i, pt in enumerate(points)})


def _is_shared(M: Structure) -> bool:
    return M._plus is not None and not M._plus.flags.writeable


def _restricted_plus(F, points: list) -> Callable[[], np.ndarray]:
    """+ on the V-points of a restriction, computed from coordinates."""
    def factory() -> np.ndarray:
        v_idx = [i for i, pt in enumerate(points) if isinstance(pt, VPoint)]
        table = np.full((len(points), len(points)), -1, dtype=np.int32)
        if not v_idx:
            return table
        horizon = points[v_idx[0]].y.horizon
        digits = np.array([list(points[i].y.dense(horizon)) + [points[i].c] for i in v_idx],
                          dtype=np.int64)
        weights = F.q ** np.arange(digits.shape[1] - 1, -1, -1, dtype=np.int64)
        codes = digits @ weights
        lookup = np.full(int(codes.max()) + 1 if len(codes) else 1, -1, dtype=np.int64)
        lookup[codes] = v_idx
        add = F.np_tables["add"]
        acc = np.zeros((len(v_idx), len(v_idx)), dtype=np.int64)
        for col in range(digits.shape[1]):
            acc += add[digits[:, col][:, None], digits[:, col][None, :]] * weights[col]
        v = np.asarray(v_idx, dtype=np.int64)
        table[np.ix_(v, v)] = lookup[acc]
        return table
    return factory


def disjoint_union(models: Sequence[Structure], add_sim: bool = True) -> UnionModel:
    """Tagged disjoint union; with ``add_sim`` the relation ~ joins same-copy elements."""
    if not models:
        raise ValueError("need at least one model")
    first = models[0]
    for M in models[1:]:
        if M.vocabulary() != first.vocabulary():
            raise VocabularyMismatch("models do not share a vocabulary")
        if isinstance(M, CodedModel) and isinstance(first, CodedModel):
            if (M.sys, M.D, M.mu) != (first.sys, first.D, first.mu):
                raise VocabularyMismatch("models come from different instances")
    offsets = []
    total = 0
    for M in models:
        offsets.append(total)
        total += M.size

    def shifted(t: np.ndarray, off: int) -> np.ndarray:
        return np.where(t >= 0, t + off, -1)

    unary: dict = {}
    for k in first.unary:
        unary[k] = np.concatenate([M.unary[k] + off for M, off in zip(models, offsets)])
    functions = {k: np.concatenate([shifted(M.functions[k], off) for M, off in zip(models, offsets)])
                 for k in first.functions}
    plus = None
    if first.has_plus:
        plus = np.full((total, total), -1, dtype=np.int32)
        for M, off in zip(models, offsets):
            plus[off:off + M.size, off:off + M.size] = shifted(M.plus, off)
    sim = None
    if add_sim:
        sim = np.concatenate([np.full(M.size, i, dtype=np.int64) for i, M in enumerate(models)])
    return UnionModel(total, unary, functions, plus, sim, components=list(models), offsets=offsets)


# ---------------------------------------------------------------------------
# checking
# ---------------------------------------------------------------------------

@dataclass
class ModelStats:
    domain_size: int
    relation_sizes: dict[str, int]
    clauses: dict[str, str | None]

    @property
    def valid(self) -> bool:
        return all(w is None for w in self.clauses.values())

    def failures(self) -> dict[str, str]:
        return {k: w for k, w in self.clauses.items() if w is not None}

    def as_dict(self) -> dict:
        return {
            "domain_size": self.domain_size,
            "relation_sizes": self.relation_sizes,
            "clauses": {k: ("ok" if w is None else w) for k, w in self.clauses.items()},
            "valid": self.valid,
        }


def symbol_name(key: Hashable) -> str:
    kind, arg = key
    if kind == "R":
        return f"R{arg}"
    if kind == "Rd":
        return f"R_{arg}"
    if kind == "Pu":
        return "P_u(" + ",".join(map(str, arg)) + ")"
    return {"Pr": "Pr_", "Pb": "P_b", "T": "T_"}[kind] + str(arg)


def model_stats(M: CodedModel) -> ModelStats:
    """Recheck every defining clause of the coded model; each failure carries a witness."""
    sys, D, a, mu = M.sys, M.D, M.colouring, M.mu
    F = sys.field
    q = F.q
    od = od_functions(D, q)
    pts = M.points
    clauses: dict[str, str | None] = {}

    def first_bad(name: str, checks) -> None:
        for ok, witness in checks:
            if not ok:
                clauses[name] = witness
                return
        clauses[name] = None

    exp = expected_size(sys, D, mu)
    spts = [i for i, p in enumerate(pts) if isinstance(p, SPoint)]
    vpts = [i for i, p in enumerate(pts) if isinstance(p, VPoint)]
    clauses["domain"] = None if (M.size == exp == len(pts)) else f"size {M.size}, expected {exp}"

    def r_checks():
        by_y: dict = {}
        for i in vpts:
            by_y.setdefault(pts[i].y, []).append(i)
        for y, members in by_y.items():
            got = M.unary.get(("R", y))
            yield got is not None and sorted(got.tolist()) == members and len(members) == q, f"R{y}"
        for k in M.unary:
            if k[0] == "R":
                yield k[1] in by_y, f"R{k[1]} has no V-points"
    first_bad("R_y", r_checks())

    def rd_checks():
        for d in sys.S:
            members = [i for i in spts if pts[i].delta == d]
            if d > mu:
                yield not members and ("Rd", d) not in M.unary, f"R_{d} beyond mu"
                continue
            got = M.unary.get(("Rd", d))
            ok = got is not None and sorted(got.tolist()) == members and sorted(pts[i].u for i in members) == od
            yield ok, f"R_{d}"
    first_bad("R_delta", rd_checks())

    def lookup(pt):
        return M.index.get(pt, -2)

    def pr_checks():
        for n in range(sys.length):
            t = M.functions.get(("Pr", n))
            if t is None:
                yield False, f"Pr_{n} missing"
                continue
            for i, p in enumerate(pts):
                if isinstance(p, SPoint):
                    z = sys.ladder(p.delta)[n]
                    want = lookup(VPoint(z, F.add(a(p.delta)[n], p.u[n])))
                    yield t[i] == want, f"Pr_{n}({p.delta},{p.u}) = {t[i]}, expected {want}"
                else:
                    yield t[i] == -1, f"Pr_{n} defined on V-point {i}"
    first_bad("Pr", pr_checks())

    def pb_checks():
        for b in range(q):
            t = M.functions[("Pb", b)]
            for i, p in enumerate(pts):
                want = lookup(VPoint(p.y, F.add(p.c, b))) if isinstance(p, VPoint) else -1
                yield t[i] == want, f"P_{b} at element {i}"
            yield _is_bijection_on(t, vpts), f"P_{b} not a bijection of V-points"
    first_bad("P_b", pb_checks())

    def pu_checks():
        for u in od:
            t = M.functions[("Pu", u)]
            for i, p in enumerate(pts):
                if isinstance(p, SPoint):
                    want = lookup(SPoint(p.delta, tuple(F.add(x, y) for x, y in zip(p.u, u))))
                else:
                    want = -1
                yield t[i] == want, f"P_u{u} at element {i}"
            yield _is_bijection_on(t, spts), f"P_u{u} not a bijection of S-points"
    first_bad("P_u", pu_checks())

    def t_checks():
        from .algebra import scale
        for e in range(q):
            t = M.functions[("T", e)]
            for i, p in enumerate(pts):
                want = lookup(VPoint(scale(F, e, p.y), F.mul(e, p.c))) if isinstance(p, VPoint) else -1
                yield t[i] == want, f"T_{e} at element {i}"
            if e:
                yield _is_bijection_on(t, vpts), f"T_{e} not a bijection"
    first_bad("T_e", t_checks())

    def plus_checks():
        # vectorized: coordinates of every V-point (y, c), summed with the
        # field table and looked up by a code built from the point list
        P = M.plus
        if P is None or P.shape != (M.size, M.size):
            yield False, "+ table missing or misshapen"
            return
        vp = np.array(vpts, dtype=np.int64)
        coords = np.array([pts[i].y.dense(sys.horizon) + [pts[i].c] for i in vpts], dtype=np.int64)
        weights = q ** np.arange(coords.shape[1], dtype=np.int64)
        by_code = np.full(q ** coords.shape[1], -2, dtype=np.int64)
        by_code[coords @ weights] = vp
        add = F.np_tables["add"]
        undefined = np.ones((M.size, M.size), dtype=bool)
        undefined[np.ix_(vp, vp)] = False
        bad = np.argwhere(undefined & (P != -1))
        yield not len(bad), f"+ defined off the V-points at {bad[:1].tolist()}"
        for lo in range(0, len(vp), 256):
            block = add[coords[lo:lo + 256, None, :], coords[None, :, :]] @ weights
            want = by_code[block]
            got = P[np.ix_(vp[lo:lo + 256], vp)]
            diff = np.argwhere(got != want)
            if len(diff):
                i, j = diff[0]
                yield False, f"+({vp[lo + i]},{vp[j]}) = {got[i, j]}, expected {want[i, j]}"
                return
    first_bad("plus", plus_checks())

    sizes = {symbol_name(k): len(v) for k, v in M.unary.items() if k[0] == "Rd"}
    sizes["R_y (all)"] = sum(len(v) for k, v in M.unary.items() if k[0] == "R")
    for k, t in M.functions.items():
        sizes[symbol_name(k)] = int((t >= 0).sum())
    sizes["+"] = int((M.plus >= 0).sum())
    return ModelStats(M.size, sizes, clauses)


def _is_bijection_on(table: np.ndarray, members: list[int]) -> bool:
    img = table[members]
    return sorted(img.tolist()) == sorted(members)


# ---------------------------------------------------------------------------
# permutation and serialization
# ---------------------------------------------------------------------------

def random_permutation(M: Structure, rng: np.random.Generator) -> tuple[Structure, np.ndarray]:
    """A renamed copy of M (provenance dropped) and the renaming used."""
    perm = rng.permutation(M.size)
    return M.permuted(perm), perm


_SYMBOL_RE = re.compile(r"^(?:R(\(.*\))|R_(\d+)|Pr_(\d+)|P_b(\d+)|P_u\(([\d,]*)\)|T_(\d+))$")


def parse_symbol(text: str, horizon: int) -> tuple:
    m = _SYMBOL_RE.match(text)
    if not m:
        raise ValueError(f"unknown symbol {text!r}")
    vec, rd, pr, pb, pu, te = m.groups()
    if vec is not None:
        return ("R", Vec.parse(vec, horizon))
    if rd is not None:
        return ("Rd", int(rd))
    if pr is not None:
        return ("Pr", int(pr))
    if pb is not None:
        return ("Pb", int(pb))
    if pu is not None:
        return ("Pu", tuple(int(v) for v in pu.split(",")) if pu else ())
    return ("T", int(te))


def point_name(pt) -> str:
    if isinstance(pt, SPoint):
        return f"S{pt.delta}[" + ",".join(map(str, pt.u)) + "]"
    return f"V{pt.y}[{pt.c}]"


def structure_to_dict(M: Structure) -> dict:
    """JSON-ready form: element names (when known) plus every table."""
    out: dict = {"size": M.size}
    if isinstance(M, CodedModel):
        out["horizon"] = M.sys.horizon
        out["mu"] = M.mu
        out["colouring"] = str(M.colouring)
        out["elements"] = [point_name(p) for p in M.points]
    elif isinstance(M, UnionModel) and M.components and isinstance(M.components[0], CodedModel):
        out["horizon"] = M.components[0].sys.horizon
    out["unary"] = {symbol_name(k): v.tolist() for k, v in M.unary.items()}
    out["functions"] = {symbol_name(k): t.tolist() for k, t in M.functions.items()}
    out["plus"] = M.plus.tolist() if M.has_plus else None
    out["sim"] = M.sim.tolist() if M.sim is not None else None
    return out


def structure_from_dict(data: dict, horizon: int | None = None) -> Structure:
    horizon = data.get("horizon", horizon)
    if horizon is None:
        raise ValueError("horizon is needed to parse R_y symbols")
    unary = {parse_symbol(k, horizon): np.asarray(v, dtype=np.int64) for k, v in data["unary"].items()}
    functions = {parse_symbol(k, horizon): np.asarray(v, dtype=np.int64) for k, v in data["functions"].items()}
    plus = None if data.get("plus") is None else np.asarray(data["plus"], dtype=np.int32)
    sim = None if data.get("sim") is None else np.asarray(data["sim"], dtype=np.int64)
    return Structure(int(data["size"]), unary, functions, plus, sim)
