from __future__ import annotations

from itertools import combinations, product
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import col, twin_q, separated
from oracles import brute_uniformizers
from ladderlab.colouring import Colouring, all_colourings, difference, is_equivalent
from ladderlab.corpus import generate_corpus
from ladderlab.errors import MalformedIso, NotAUniformizer, NotCoded, TooLarge
from ladderlab.isobridge import (StructureMap, brute_iso, check_extension_property, classify_No,
                                 classify_union, decode_structure, iso_classes, iso_from_uniformizer,
                                 uniformizer_from_iso, verify_isomorphism)
from ladderlab.ladder import is_window_separated
from ladderlab.modelcode import build_model, disjoint_union, random_permutation, restrict_model
from ladderlab.uniformize import PartialUniformizer, extension_safe_bounds

ZERO = col({3: (0,), 4: (0,)})
DIAG = col({3: (1,), 4: (1,)})
SPLIT = col({3: (1,), 4: (0,)})


class TestIsoFromUniformizer:
    def test_identity(self, pq2):
        M = build_model(*pq2, ZERO)
        iota = iso_from_uniformizer(M, M, PartialUniformizer(5, (0,) * 5))
        assert (iota.mapping == np.arange(M.size)).all()

    def test_diagonal(self, pq2):
        sys, D = pq2
        Ma, Mb = build_model(sys, D, ZERO), build_model(sys, D, DIAG)
        iota = iso_from_uniformizer(Ma, Mb, PartialUniformizer(5, (0, 1, 0, 0, 0)))
        assert iota.verified
        for d in (3, 4):
            src = Ma.index[(d, (0,))]
            assert Mb.points[iota(src)] == (d, (0,))

    def test_not_a_uniformizer(self, pq2):
        sys, D = pq2
        with pytest.raises(NotAUniformizer) as exc:
            iso_from_uniformizer(build_model(sys, D, ZERO), build_model(sys, D, SPLIT),
                                 PartialUniformizer(5, (0, 1, 0, 0, 0)))
        assert exc.value.delta == 4


class TestUniformizerFromIso:
    def test_identity(self, pq2):
        M = build_model(*pq2, ZERO)
        iota = StructureMap(M, M, np.arange(M.size))
        assert uniformizer_from_iso(iota).values == (0,) * 5

    def test_round_trip_all(self):
        sys, D = separated()
        rng = np.random.default_rng(0)
        cols = list(all_colourings(sys))
        for _ in range(20):
            a, b = (cols[i] for i in rng.choice(len(cols), 2))
            Ma, Mb = build_model(sys, D, a), build_model(sys, D, b)
            for mu in (0, 3, 6):
                fs = brute_uniformizers(sys, D, difference(sys.field, b, a), mu)
                for f in fs[:5]:
                    f = PartialUniformizer(6, f)
                    assert uniformizer_from_iso(iso_from_uniformizer(Ma, Mb, f)) == f

    def test_malformed(self, pq2):
        M = build_model(*pq2, ZERO)
        bad = np.arange(M.size)
        bad[[10, 11]] = bad[[11, 10]]
        with pytest.raises(MalformedIso):
            uniformizer_from_iso(StructureMap(M, M, bad))

    def test_found_iso_gives_uniformizer(self, pq2):
        sys, D = pq2
        Ma, Mb = build_model(sys, D, ZERO), build_model(sys, D, DIAG)
        f = uniformizer_from_iso(brute_iso(Ma, Mb))
        assert f.values[1] == 1


class TestBruteIso:
    def test_self(self, pq2):
        M = build_model(*pq2, ZERO)
        assert (brute_iso(M, M).mapping == np.arange(M.size)).all()

    def test_twin_q(self, pq2):
        sys, D = pq2
        M = build_model(sys, D, ZERO)
        assert brute_iso(M, build_model(sys, D, DIAG)) is not None
        assert brute_iso(M, build_model(sys, D, SPLIT)) is None

    def test_permuted_target(self, pq2):
        sys, D = pq2
        N, _ = random_permutation(build_model(sys, D, DIAG), np.random.default_rng(1))
        iota = brute_iso(build_model(sys, D, ZERO), N)
        assert iota is not None and verify_isomorphism(iota.source, N, iota.mapping) is None

    @pytest.mark.parametrize("q,mu", [(2, 3), (2, 4), (2, 5), (3, 2), (3, 3)])
    def test_raw_agrees_with_guided(self, q, mu):
        sys, D = twin_q(q)
        cols = list(all_colourings(sys))
        models = [restrict_model(build_model(sys, D, c), mu) for c in cols]
        for A, B in product(models[:3], models):
            raw = brute_iso(A, B, mode="raw")
            guided = brute_iso(A, B, mode="guided")
            assert (raw is None) == (guided is None)

    def test_raw_limit(self):
        sys, D = twin_q(4)
        M = build_model(sys, D, col({3: (0,), 4: (0,)}))
        with pytest.raises(TooLarge):
            brute_iso(M, M, mode="raw")

    def test_agrees_with_equivalence_on_corpus(self):
        checked = 0
        for inst in generate_corpus(2, 40, max_horizon=4):
            sys, D = inst.sys, inst.D
            cols = list(all_colourings(sys))
            if len(cols) > 27:
                continue
            models = [build_model(sys, D, c) for c in cols]
            for i, j in combinations(range(len(cols)), 2):
                iso = brute_iso(models[i], models[j]) is not None
                assert iso == is_equivalent(sys, D, cols[i], cols[j])
                checked += 1
        assert checked > 100


class TestDecode:
    def test_self(self, pq2):
        sys, D = pq2
        b, iota = decode_structure(build_model(sys, D, DIAG), sys, D)
        assert is_equivalent(sys, D, b, DIAG) and iota.verified

    def test_permutations(self):
        rng = np.random.default_rng(5)
        for sys, D in (twin_q(3), separated()):
            for a in list(all_colourings(sys))[:8]:
                N, _ = random_permutation(build_model(sys, D, a), rng)
                b, iota = decode_structure(N, sys, D)
                assert is_equivalent(sys, D, a, b)
                assert verify_isomorphism(N, iota.target, iota.mapping) is None

    def test_broken_plus(self, pq2):
        sys, D = pq2
        M = build_model(sys, D, ZERO)
        N = M.copy()
        N._plus[10, 12], N._plus[10, 13] = N._plus[10, 13], N._plus[10, 12]
        with pytest.raises(NotCoded):
            decode_structure(N, sys, D)

    def test_wrong_vocabulary(self, pq2):
        sys, D = pq2
        with pytest.raises(NotCoded):
            decode_structure(build_model(*twin_q(3), col({3: (0,), 4: (0,)})), sys, D)


class TestClassify:
    def test_twin_q2(self, pq2):
        r = classify_No(*pq2, cross_check=True)
        assert r.class_count == r.iso_class_count == 2

    def test_separated(self, sep):
        r = classify_No(*sep, cross_check=True)
        assert r.class_count == r.iso_class_count == 1

    def test_gf3(self):
        r = classify_No(*twin_q(3), cross_check=True)
        assert r.class_count == r.iso_class_count == 3


class TestUnion:
    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_two_classes(self, pq2, l):
        assert classify_union(*pq2, [ZERO, SPLIT], l, cross_check=True) == l + 1

    def test_one_class(self, pq2):
        assert classify_union(*pq2, [ZERO], 4, cross_check=True) == 1

    def test_three_classes(self):
        sys, D = twin_q(3)
        reps = [col({3: (0,), 4: (k,)}) for k in range(3)]
        assert classify_union(sys, D, reps, 2, cross_check=True) == 6 == comb(4, 2)

    def test_distinct_multisets(self, pq2):
        sys, D = pq2
        Ma, Mb = build_model(sys, D, ZERO), build_model(sys, D, SPLIT)
        assert brute_iso(disjoint_union([Ma, Mb]), disjoint_union([Ma, Ma])) is None
        assert brute_iso(disjoint_union([Ma, Mb]), disjoint_union([Mb, Ma])) is not None

    def test_union_uses_classes_not_colourings(self, pq2):
        sys, D = pq2
        Ma, Md = build_model(sys, D, ZERO), build_model(sys, D, DIAG)
        labels = iso_classes([disjoint_union([Ma, Ma]), disjoint_union([Md, Ma])])
        assert labels == [0, 0]

    def test_equivalent_reps_rejected(self, pq2):
        with pytest.raises(ValueError):
            classify_union(*pq2, [ZERO, DIAG], 2, cross_check=True)


class TestExtensionProperty:
    def test_twin_q_counterexample(self, pq2):
        sys, D = pq2
        r = check_extension_property(sys, D, ZERO, SPLIT, 3, 4)
        assert not r.holds and r.witness.values[1] == 1
        assert r.iso.verified

    def test_equal_bounds(self, pq2):
        assert check_extension_property(*pq2, ZERO, SPLIT, 3, 3).holds

    def test_separated_from_safe_bounds(self):
        for inst in generate_corpus(4, 25, max_horizon=5, regime="separated"):
            sys, D = inst.sys, inst.D
            assert is_window_separated(sys, D)
            safe = extension_safe_bounds(sys, D)
            cols = list(all_colourings(sys))[:9]
            for a, b in product(cols, repeat=2):
                for mu0 in safe:
                    for mu1 in range(mu0, sys.horizon + 1):
                        assert check_extension_property(sys, D, a, b, mu0, mu1).holds

    def test_separated_unsafe_bound_counterexample(self):
        from ladderlab.algebra import Vec, make_field
        from ladderlab.colouring import FilterD
        from ladderlab.ladder import LadderSystem
        v = lambda *xs: Vec.from_mapping(7, {x: 1 for x in xs})
        sys = LadderSystem.from_mapping(make_field(2), 7, 2, {3: [v(0), v(1, 2)], 6: [v(1), v(4)]})
        D = FilterD(2, frozenset({1}))
        zero = Colouring.zero(sys.S, 2)
        r = check_extension_property(sys, D, zero, col({3: (0, 0), 6: (0, 1)}), 5, 6)
        assert is_window_separated(sys, D) and not r.holds


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_permuted_iso_yields_uniformizer(seed, q):
    sys, D = twin_q(q)
    rng = np.random.default_rng(seed)
    cols = list(all_colourings(sys))
    a, b = (cols[i] for i in rng.choice(len(cols), 2))
    Ma = build_model(sys, D, a)
    N, perm = random_permutation(build_model(sys, D, b), rng)
    iota = brute_iso(Ma, N)
    assert (iota is not None) == is_equivalent(sys, D, a, b)
    if iota is not None:
        # pull back along the shuffle to land in the coded target
        Mb = build_model(sys, D, b)
        inv = np.argsort(perm)
        back = StructureMap(Ma, Mb, inv[iota.mapping])
        assert verify_isomorphism(Ma, Mb, back.mapping) is None
        f = uniformizer_from_iso(back)
        assert iso_from_uniformizer(Ma, Mb, f).verified
