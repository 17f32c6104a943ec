from __future__ import annotations

from itertools import product

import pytest
from hypothesis import assume, given, strategies as st

from conftest import col, twin_q, separated
from oracles import brute_uniform, brute_uniformizers, window_patterns
from ladderlab.algebra import Vec, evaluate, make_field
from ladderlab.colouring import all_colourings
from ladderlab.corpus import generate_corpus
from ladderlab.errors import ExtensionFailed, NoFreshCoordinate, NotAUniformizer
from ladderlab.ladder import is_window_separated
from ladderlab.quotient import unifset_membership
from ladderlab.uniformize import (PartialUniformizer, extend_uniformizer, extension_safe_bounds,
                                  global_uniformize, patch_initial, solve_ladder_equations,
                                  uniformizes)


def v(h, *xs):
    return Vec.from_mapping(h, {x: 1 for x in xs})


class TestSolve:
    def test_gf2_example(self):
        F = make_field(2)
        g = solve_ladder_equations(F, [v(3, 0, 1), v(3, 1, 2)], (1, 0))
        assert g == {0: 1, 1: 0, 2: 0}

    def test_zero_target(self):
        F = make_field(3)
        g = solve_ladder_equations(F, [v(4, 0, 1), v(4, 1, 3)], (0, 0))
        assert set(g.values()) == {0}

    def test_no_fresh_coordinate(self):
        with pytest.raises(NoFreshCoordinate):
            solve_ladder_equations(make_field(2), [v(3, 1), v(3, 1)], (0, 0))

    @given(st.data())
    def test_solution_satisfies_equations(self, data):
        q = data.draw(st.sampled_from([2, 3, 4]))
        F = make_field(*{2: (2, 1), 3: (3, 1), 4: (2, 2)}[q])
        L = data.draw(st.integers(1, 4))
        H = L + 4
        steps, used = [], set()
        low = -1
        for n in range(L):
            low = data.draw(st.integers(low + 1, H - (L - n)))
            extra = data.draw(st.sets(st.integers(low + 1, H - 1), max_size=3)) if low < H - 1 else set()
            supp = {low} | extra
            assume(not supp <= used)  # the ladders must be valid
            coeffs = {x: data.draw(st.integers(1, q - 1)) for x in sorted(supp)}
            steps.append(Vec.from_mapping(H, coeffs))
            used |= supp
        target = data.draw(st.lists(st.integers(0, q - 1), min_size=L, max_size=L))
        g = solve_ladder_equations(F, steps, target)
        f = [g.get(x, 0) for x in range(H)]
        assert [evaluate(F, f, y) for y in steps] == target


class TestExtend:
    def test_separated_example(self, sep):
        sys, D = sep
        a = col({3: (0, 0), 5: (0, 1)})
        f1 = extend_uniformizer(sys, D, a, PartialUniformizer(6, (0, 0, 0, 0)), 6)
        assert f1.values[4] == 1 and f1.values[5] == 0
        assert f1.values[:4] == (0, 0, 0, 0)

    def test_no_new_bound(self, sep):
        sys, D = sep
        f0 = PartialUniformizer(6, (1, 0, 1))
        assert extend_uniformizer(sys, D, col({3: (0, 1), 5: (0, 0)}), f0, 3) == f0

    def test_twin_q_conflict(self, pq2):
        sys, D = pq2
        with pytest.raises(ExtensionFailed) as exc:
            extend_uniformizer(sys, D, col({3: (0,), 4: (1,)}), PartialUniformizer.empty(5), 5)
        assert exc.value.delta == 4

    def test_bad_f0(self, sep):
        sys, D = sep
        with pytest.raises(NotAUniformizer):
            extend_uniformizer(sys, D, col({3: (0, 1), 5: (0, 0)}), PartialUniformizer(6, (0, 0, 0, 0)), 6)

    def test_never_fails_when_separated_from_safe_bounds(self):
        for inst in generate_corpus(11, 60, max_horizon=5, regime="separated"):
            sys, D = inst.sys, inst.D
            assert is_window_separated(sys, D)
            safe = extension_safe_bounds(sys, D)
            assert 0 in safe
            for a in list(all_colourings(sys))[:64]:
                for mu0 in safe:
                    for f0 in brute_uniformizers(sys, D, a, mu0)[:4]:
                        pf = PartialUniformizer(sys.horizon, f0)
                        for mu1 in range(mu0, sys.horizon + 1):
                            f1 = extend_uniformizer(sys, D, a, pf, mu1)
                            assert f1.values[:mu0] == f0
                            assert uniformizes(sys, D, a, f1)

    def test_unsafe_start_can_fail(self):
        # window step g4 of delta=6 lies below mu0=5, so f0(4) is frozen
        F = make_field(2)
        sys = type(separated()[0]).from_mapping(F, 7, 2, {3: [v(7, 0), v(7, 1, 2)], 6: [v(7, 1), v(7, 4)]})
        from ladderlab.colouring import FilterD
        D = FilterD(2, frozenset({1}))
        assert is_window_separated(sys, D)
        assert 5 not in extension_safe_bounds(sys, D)
        a = col({3: (0, 0), 6: (0, 1)})
        with pytest.raises(ExtensionFailed):
            extend_uniformizer(sys, D, a, PartialUniformizer(7, (0, 0, 0, 0, 0)), 7)
        # and no extension of that f0 exists at all
        assert not [f for f in brute_uniformizers(sys, D, a, 7) if f[:5] == (0,) * 5]


class TestGlobal:
    def test_zero(self, pq2):
        sys, D = pq2
        assert global_uniformize(sys, D, col({3: (0,), 4: (0,)})).values == (0,) * 5

    def test_diagonal(self, pq2):
        sys, D = pq2
        f = global_uniformize(sys, D, col({3: (1,), 4: (1,)}))
        assert f.values[1] == 1

    def test_split(self, pq2):
        sys, D = pq2
        assert global_uniformize(sys, D, col({3: (1,), 4: (0,)})) is None

    def test_agrees_with_brute_and_linear_solve(self):
        for inst in generate_corpus(5, 40, max_horizon=5):
            sys, D = inst.sys, inst.D
            patterns = window_patterns(sys, D)
            for a in list(all_colourings(sys))[:81]:
                f = global_uniformize(sys, D, a)
                assert (f is not None) == brute_uniform(sys, D, a, patterns) == unifset_membership(sys, D, a)[0]
                if f is not None:
                    assert uniformizes(sys, D, a, f) and f.is_total


class TestPatch:
    def test_g_already_good(self, pq2):
        sys, D = pq2
        g = (0, 1, 0, 1, 1)
        h = patch_initial(sys, D, col({3: (1,), 4: (1,)}), g, 0)
        assert h.values == g

    def test_separated(self, sep):
        sys, D = sep
        a = col({3: (1, 1), 5: (0, 1)})
        g = (0, 0, 0, 0, 1, 0)  # right on delta=5 only
        assert not uniformizes(sys, D, a, PartialUniformizer(6, g))
        h = patch_initial(sys, D, a, g, 4)
        assert uniformizes(sys, D, a, h) and h.values[4:] == g[4:]

    def test_twin_q_split(self, pq2):
        sys, D = pq2
        assert patch_initial(sys, D, col({3: (1,), 4: (0,)}), (0, 1, 0, 0, 0), 4) is None

    def test_bad_g(self, pq2):
        sys, D = pq2
        with pytest.raises(NotAUniformizer):
            patch_initial(sys, D, col({3: (1,), 4: (1,)}), (0, 0, 0, 0, 0), 4)
