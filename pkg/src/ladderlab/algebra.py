"""Exact arithmetic in GF(p^m) and in the free vector space Vec[F].

Field elements are plain ints.  The element with coefficient tuple
``(c_0, ..., c_{m-1})`` (the polynomial ``c_0 + c_1 x + ...``) is stored as
``c_0 + c_1 p + ... + c_{m-1} p^(m-1)``, so ``0`` and ``1`` are the zero and
unit of every field and the prime subfield is ``range(p)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegreeMismatch, HorizonMismatch, NotPrime, ReducibleModulus

MAX_HORIZON = 1 << 16
TABLE_LIMIT = 256

FieldElem = int


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


# ---------------------------------------------------------------------------
# polynomials over GF(p), coefficient lists low -> high
# ---------------------------------------------------------------------------

def _trim(poly: list[int]) -> list[int]:
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_mod(num: Sequence[int], den: Sequence[int], p: int) -> list[int]:
    num = _trim([c % p for c in num])
    den = _trim([c % p for c in den])
    lead_inv = pow(den[-1], p - 2, p)
    while len(num) >= len(den):
        shift = len(num) - len(den)
        factor = num[-1] * lead_inv % p
        for i, c in enumerate(den):
            num[shift + i] = (num[shift + i] - factor * c) % p
        _trim(num)
    return num


def _monic_polys(p: int, degree: int) -> Iterable[tuple[int, ...]]:
    """Monic polynomials of the given degree, in increasing integer encoding."""
    for k in range(p ** degree):
        low = [(k // p ** i) % p for i in range(degree)]
        yield tuple(low) + (1,)


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial factorization against every monic polynomial of degree <= deg/2."""
    poly = _trim([c % p for c in poly])
    degree = len(poly) - 1
    if degree < 1:
        return False
    for d in range(1, degree // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(poly, g, p):
                return False
    return True


def least_irreducible(p: int, m: int) -> tuple[int, ...]:
    for poly in _monic_polys(p, m):
        if is_irreducible(poly, p):
            return poly
    raise AssertionError(f"no irreducible polynomial of degree {m} over GF({p})")  # pragma: no cover


# ---------------------------------------------------------------------------
# the field
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldCtx:
    """GF(p^m) presented as GF(p)[x] / (modulus).

    ``modulus`` lists the coefficients of a monic degree-m polynomial from the
    constant term up to the leading 1.
    """

    p: int
    m: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if self.m < 1:
            raise DegreeMismatch(f"extension degree must be positive, got {self.m}")
        mod = tuple(int(c) % self.p for c in self.modulus)
        if len(_trim(list(mod))) != self.m + 1:
            raise DegreeMismatch(f"modulus {self.modulus} does not have degree {self.m}")
        if mod[-1] != 1:
            raise DegreeMismatch("modulus must be monic")
        if not is_irreducible(mod, self.p):
            raise ReducibleModulus(f"modulus {mod} is reducible over GF({self.p})")
        object.__setattr__(self, "modulus", mod)

    @property
    def q(self) -> int:
        return self.p ** self.m

    def __str__(self) -> str:
        return f"GF({self.p}^{self.m};{','.join(map(str, self.modulus))})"

    def __repr__(self) -> str:
        return f"FieldCtx({self})"

    # -- representation ---------------------------------------------------

    def elements(self) -> range:
        return range(self.q)

    def coeffs(self, a: FieldElem) -> tuple[int, ...]:
        self._check(a)
        return tuple((a // self.p ** i) % self.p for i in range(self.m))

    def elem(self, coeffs: Sequence[int]) -> FieldElem:
        if len(coeffs) > self.m:
            coeffs = _poly_mod(coeffs, self.modulus, self.p) if self.m else []
        return sum((int(c) % self.p) * self.p ** i for i, c in enumerate(coeffs))

    def from_int(self, k: int) -> FieldElem:
        """Image of the integer k in the prime subfield."""
        return k % self.p

    def _check(self, a) -> None:
        if not (isinstance(a, (int, np.integer)) and 0 <= a < self.q):
            raise ValueError(f"{a!r} is not an element of {self}")

    # -- slow exact arithmetic (any q) --------------------------------------

    def _slow_add(self, a: int, b: int) -> int:
        ca, cb = self.coeffs(a), self.coeffs(b)
        return self.elem([x + y for x, y in zip(ca, cb)])

    def _slow_mul(self, a: int, b: int) -> int:
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        rem = _poly_mod(prod, self.modulus, self.p)
        return self.elem(rem)

    def _slow_neg(self, a: int) -> int:
        return self.elem([-c for c in self.coeffs(a)])

    def _slow_inv(self, a: int) -> int:
        # a^(q-2) by square-and-multiply
        result, base, e = 1, a, self.q - 2
        while e:
            if e & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            e >>= 1
        return result

    @cached_property
    def _tables(self) -> tuple[list[list[int]], list[list[int]], list[int], list[int]] | None:
        if self.q > TABLE_LIMIT:
            return None
        q = self.q
        add = [[self._slow_add(a, b) for b in range(q)] for a in range(q)]
        mul = [[self._slow_mul(a, b) for b in range(q)] for a in range(q)]
        neg = [self._slow_neg(a) for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            inv[a] = mul[a].index(1)
        return add, mul, neg, inv

    @cached_property
    def np_tables(self) -> dict[str, np.ndarray]:
        """Operation tables as numpy arrays, for vectorized oracles."""
        if self._tables is None:
            raise ValueError(f"vectorized tables need q <= {TABLE_LIMIT}, got q={self.q}")
        add, mul, neg, inv = self._tables
        neg_arr = np.array(neg, dtype=np.int64)
        add_arr = np.array(add, dtype=np.int64)
        return {
            "add": add_arr,
            "mul": np.array(mul, dtype=np.int64),
            "neg": neg_arr,
            "sub": add_arr[:, neg_arr],
            "inv": np.array(inv, dtype=np.int64),
        }

    # -- public scalar operations ---------------------------------------------

    def add(self, a: FieldElem, b: FieldElem) -> FieldElem:
        t = self._tables
        return t[0][a][b] if t else self._slow_add(a, b)

    def mul(self, a: FieldElem, b: FieldElem) -> FieldElem:
        t = self._tables
        return t[1][a][b] if t else self._slow_mul(a, b)

    def neg(self, a: FieldElem) -> FieldElem:
        t = self._tables
        return t[2][a] if t else self._slow_neg(a)

    def sub(self, a: FieldElem, b: FieldElem) -> FieldElem:
        return self.add(a, self.neg(b))

    def inv(self, a: FieldElem) -> FieldElem:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self}")
        t = self._tables
        return t[3][a] if t else self._slow_inv(a)

    def div(self, a: FieldElem, b: FieldElem) -> FieldElem:
        return self.mul(a, self.inv(b))

    def dot(self, xs: Iterable[FieldElem], ys: Iterable[FieldElem]) -> FieldElem:
        acc = 0
        for x, y in zip(xs, ys):
            if x and y:
                acc = self.add(acc, self.mul(x, y))
        return acc


def make_field(p: int, m: int = 1, modulus: Sequence[int] | None = None) -> FieldCtx:
    """Build GF(p^m).

    Without an explicit modulus the least monic irreducible polynomial of
    degree ``m`` is used, where polynomials are ordered by their integer
    encoding (lexicographic in ``c_{m-1}, ..., c_0``).  GF(2) therefore gets
    modulus ``x`` and GF(4) gets ``x^2 + x + 1``.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if m < 1:
        raise DegreeMismatch(f"extension degree must be positive, got {m}")
    if modulus is None:
        modulus = least_irreducible(p, m)
    return FieldCtx(p, m, tuple(modulus))


_FIELD_RE = re.compile(r"^\s*GF\(\s*(\d+)\s*\^\s*(\d+)\s*(?:;\s*([\d,\s]+))?\)\s*$")


def parse_field_spec(text: str) -> FieldCtx:
    """Parse ``GF(p^m;c_0,...,c_m)``; the modulus part may be omitted."""
    match = _FIELD_RE.match(text)
    if not match:
        raise ValueError(f"malformed field spec {text!r}")
    p, m = int(match.group(1)), int(match.group(2))
    modulus = None
    if match.group(3):
        modulus = [int(c) for c in match.group(3).split(",") if c.strip()]
    return make_field(p, m, modulus)


def field_op(ctx: FieldCtx, op: str, a: FieldElem, b: FieldElem | None = None) -> FieldElem:
    ctx._check(a)
    if op in ("add", "mul", "sub", "div"):
        if b is None:
            raise ValueError(f"{op} needs two operands")
        ctx._check(b)
        return getattr(ctx, op)(a, b)
    if op in ("neg", "inv"):
        return getattr(ctx, op)(a)
    raise ValueError(f"unknown field operation {op!r}")


# ---------------------------------------------------------------------------
# Vec[F]
# ---------------------------------------------------------------------------

_VEC_RE = re.compile(r"^\(\s*(.*?)\s*\)$")


@dataclass(frozen=True, order=True)
class Vec:
    """Finitely supported vector over the generators g_0 .. g_{horizon-1}.

    ``entries`` is the sorted tuple of ``(xi, coefficient)`` pairs with
    nonzero coefficients; its key set is the support.
    """

    horizon: int
    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not 0 < self.horizon <= MAX_HORIZON:
            raise HorizonMismatch(f"horizon must lie in [1, {MAX_HORIZON}], got {self.horizon}")
        entries = tuple((int(x), int(c)) for x, c in self.entries)
        last = -1
        for xi, c in entries:
            if xi <= last:
                raise ValueError("Vec entries must be strictly increasing in the generator index")
            if not 0 <= xi < self.horizon:
                raise HorizonMismatch(f"generator {xi} outside horizon {self.horizon}")
            if c == 0:
                raise ValueError("Vec must not store zero coefficients")
            last = xi
        object.__setattr__(self, "entries", entries)

    @classmethod
    def gen(cls, xi: int, horizon: int, coeff: FieldElem = 1) -> Vec:
        return cls(horizon, ((xi, coeff),) if coeff else ())

    @classmethod
    def zero(cls, horizon: int) -> Vec:
        return cls(horizon, ())

    @classmethod
    def from_mapping(cls, horizon: int, mapping: Mapping[int, FieldElem]) -> Vec:
        return cls(horizon, tuple(sorted((x, c) for x, c in mapping.items() if c)))

    @classmethod
    def from_dense(cls, dense: Sequence[FieldElem]) -> Vec:
        return cls(len(dense), tuple((x, int(c)) for x, c in enumerate(dense) if c))

    @classmethod
    def parse(cls, text: str, horizon: int) -> Vec:
        """Parse ``(xi:c,xi:c,...)``."""
        match = _VEC_RE.match(text.strip())
        if not match:
            raise ValueError(f"malformed vector {text!r}")
        body = match.group(1)
        mapping: dict[int, int] = {}
        for item in filter(None, (s.strip() for s in body.split(","))):
            xi, _, c = item.partition(":")
            if not _:
                raise ValueError(f"malformed vector entry {item!r}")
            xi_i = int(xi)
            if xi_i in mapping:
                raise ValueError(f"generator {xi_i} listed twice in {text!r}")
            mapping[xi_i] = int(c)
        return cls.from_mapping(horizon, mapping)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(x for x, _ in self.entries)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def coeff(self, xi: int) -> FieldElem:
        for x, c in self.entries:
            if x == xi:
                return c
        return 0

    def dense(self, length: int | None = None) -> list[FieldElem]:
        out = [0] * (self.horizon if length is None else length)
        for x, c in self.entries:
            out[x] = c
        return out

    def __str__(self) -> str:
        return "(" + ",".join(f"{x}:{c}" for x, c in self.entries) + ")"


def combine(F: FieldCtx, e0: FieldElem, y0: Vec, e1: FieldElem, y1: Vec) -> Vec:
    """Return ``e0*y0 + e1*y1`` with zero coefficients dropped."""
    if y0.horizon != y1.horizon:
        raise HorizonMismatch(f"horizons differ: {y0.horizon} vs {y1.horizon}")
    acc: dict[int, int] = {}
    for e, y in ((e0, y0), (e1, y1)):
        if not e:
            continue
        for x, c in y.entries:
            acc[x] = F.add(acc.get(x, 0), F.mul(e, c))
    return Vec.from_mapping(y0.horizon, acc)


def scale(F: FieldCtx, e: FieldElem, y: Vec) -> Vec:
    return combine(F, e, y, 0, y)


def evaluate(F: FieldCtx, f: Sequence[FieldElem], y: Vec) -> FieldElem:
    """``f(y) = sum_xi e_xi * f(xi)`` for a total function f given densely."""
    if y.horizon > len(f):
        raise HorizonMismatch(f"function covers {len(f)} generators, vector horizon is {y.horizon}")
    acc = 0
    for x, c in y.entries:
        v = f[x]
        if v:
            acc = F.add(acc, F.mul(c, v))
    return acc


def all_vectors(F: FieldCtx, horizon: int) -> Iterable[tuple[int, ...]]:
    """Dense coefficient tuples of every vector, in lexicographic order."""
    return product(range(F.q), repeat=horizon)
