import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from tsapproval import (
    Tournament,
    TournamentError,
    all_tournaments,
    arc_pairs,
    cyclic_regular,
    near_regular,
    random_tournament,
    source_tournament,
    tournament_code,
    tournament_from_code,
    transitive,
)
from oracles import condense_oracle, regular_oracle, top_cycle_oracle


def tournaments(min_m=1, max_m=7):
    return st.integers(min_m, max_m).flatmap(
        lambda m: st.integers(0, 2 ** (m * (m - 1) // 2) - 1).map(
            lambda code: tournament_from_code(m, code)))


class TestBuild:
    def test_single_candidate(self):
        t = Tournament.build(1, set())
        assert t.m == 1
        assert t.out_neighbors(0) == frozenset()

    def test_triangle(self, triangle):
        assert triangle.beats(0, 1) and triangle.beats(1, 2) and triangle.beats(2, 0)

    def test_t_star_arcs(self, t_star):
        assert t_star.out_neighbors(1) == {2, 3}
        assert t_star.out_neighbors(3) == {0}
        assert t_star.in_neighbors(0) == {2, 3}

    def test_missing_pair(self):
        with pytest.raises(TournamentError, match=r"missing orientation for pair \(1, 2\)"):
            Tournament.build(3, {(0, 1), (0, 2)})

    def test_both_orientations(self):
        with pytest.raises(TournamentError, match=r"both orientations"):
            Tournament.build(2, {(0, 1), (1, 0)})

    def test_duplicate(self):
        with pytest.raises(TournamentError, match="duplicated arc"):
            Tournament.build(2, [(0, 1), (0, 1)])

    def test_self_loop(self):
        with pytest.raises(TournamentError, match="self-loop"):
            Tournament.build(2, {(0, 0), (0, 1)})

    def test_out_of_range_candidate(self, t_star):
        with pytest.raises(TournamentError):
            t_star.out_neighbors(4)


class TestReverseArc:
    def test_t_star_reversal(self, t_star):
        flipped = t_star.reverse_arc(3, 0)
        assert flipped.out_neighbors(0) == {1, 3}
        assert t_star.out_neighbors(0) == {1}, "input must stay unchanged"

    def test_self_pair_rejected(self, t_star):
        with pytest.raises(TournamentError):
            t_star.reverse_arc(2, 2)

    @settings(max_examples=120, deadline=None)
    @given(tournaments(min_m=2), st.data())
    def test_involution(self, t, data):
        a = data.draw(st.integers(0, t.m - 1))
        b = data.draw(st.integers(0, t.m - 1).filter(lambda x: x != a))
        assert t.reverse_arc(a, b).reverse_arc(a, b) == t

    def test_triangle_source_after_reversal(self, triangle):
        # Flipping 0>1 hands candidate 1 both other candidates.
        assert triangle.reverse_arc(0, 1).source() == 1


class TestInduced:
    def test_identity(self, t_star):
        sub, mapping = t_star.induced(range(4))
        assert sub == t_star and mapping == (0, 1, 2, 3)

    def test_t_star_triangle(self, t_star):
        sub, mapping = t_star.induced({0, 1, 2})
        assert mapping == (0, 1, 2)
        assert sub.beats(0, 1) and sub.beats(1, 2) and sub.beats(2, 0)

    def test_single(self, triangle):
        sub, mapping = triangle.induced({1})
        assert sub.m == 1 and mapping == (1,)

    def test_empty_rejected(self, triangle):
        with pytest.raises(TournamentError):
            triangle.induced(set())


class TestSource:
    def test_triangle_has_none(self, triangle):
        assert triangle.source() is None

    def test_transitive_max(self):
        assert transitive(4, [2, 0, 3, 1]).source() == 2

    def test_t_star_has_none(self, t_star):
        assert t_star.source() is None

    @settings(max_examples=150, deadline=None)
    @given(tournaments())
    def test_source_iff_full_outdegree(self, t):
        expected = [c for c in range(t.m) if t.outdegree(c) == t.m - 1]
        assert t.source() == (expected[0] if expected else None)
        assert len(expected) <= 1


class TestCondense:
    def test_transitive_chain(self):
        cond = transitive(3).condense()
        assert cond.components == (frozenset({0}), frozenset({1}), frozenset({2}))

    def test_t_star_single_component(self, t_star):
        assert t_star.condense().components == (frozenset({0, 1, 2, 3}),)

    def test_three_chain_named(self):
        # r=0 beats p=1 and q=2; p beats q.
        t = Tournament.build(3, {(0, 1), (1, 2), (0, 2)})
        assert [set(c) for c in t.condense()] == [{0}, {1}, {2}]

    def test_exhaustive_small_vs_oracle(self):
        for m in range(1, 6):
            for t in all_tournaments(m):
                got = [set(c) for c in t.condense()]
                assert got == condense_oracle(t)

    @settings(max_examples=80, deadline=None)
    @given(tournaments(min_m=6, max_m=7))
    def test_sampled_vs_oracle(self, t):
        assert [set(c) for c in t.condense()] == condense_oracle(t)

    @settings(max_examples=100, deadline=None)
    @given(tournaments())
    def test_component_invariants(self, t):
        comps = t.condense().components
        seen = set()
        for comp in comps:
            assert comp and not comp & seen
            seen |= comp
        assert seen == set(range(t.m))
        for i, earlier in enumerate(comps):
            for later in comps[i + 1:]:
                assert all(t.beats(a, b) for a in earlier for b in later)


class TestRegular:
    def test_triangle_regular(self, triangle):
        assert triangle.is_regular()

    def test_chain_not_regular(self):
        assert not transitive(3).is_regular()

    def test_cyclic_regular_examples(self):
        assert cyclic_regular(1).m == 1
        five = cyclic_regular(5)
        assert [five.outdegree(i) for i in range(5)] == [2] * 5
        assert five.is_regular() and regular_oracle(five)

    def test_cyclic_regular_rejects_even(self):
        with pytest.raises(TournamentError, match="odd"):
            cyclic_regular(4)

    @pytest.mark.parametrize("m", range(1, 11))
    def test_near_regular(self, m):
        t = near_regular(m)
        assert t.is_regular() and regular_oracle(t)
        t.validate()

    @settings(max_examples=150, deadline=None)
    @given(tournaments())
    def test_is_regular_matches_oracle(self, t):
        assert t.is_regular() == regular_oracle(t)


class TestInvariants:
    @settings(max_examples=150, deadline=None)
    @given(tournaments())
    def test_outdegree_sum(self, t):
        assert sum(t.outdegree(c) for c in range(t.m)) == t.m * (t.m - 1) // 2

    @settings(max_examples=100, deadline=None)
    @given(tournaments(min_m=2), st.data())
    def test_operations_preserve_validity(self, t, data):
        a = data.draw(st.integers(0, t.m - 1))
        b = data.draw(st.integers(0, t.m - 1).filter(lambda x: x != a))
        t.reverse_arc(a, b).validate()
        keep = data.draw(st.sets(st.integers(0, t.m - 1), min_size=1))
        t.induced(keep)[0].validate()

    def test_top_component_is_top_cycle_oracle(self):
        rng = random.Random(7)
        for _ in range(200):
            t = random_tournament(rng.randint(1, 7), rng)
            assert set(t.condense()[0]) == top_cycle_oracle(t)


class TestEnumeration:
    def test_arc_pairs_lexicographic(self):
        assert arc_pairs(4) == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

    def test_code_roundtrip(self):
        for m in range(1, 5):
            for code in range(1 << (m * (m - 1) // 2)):
                assert tournament_code(tournament_from_code(m, code)) == code

    def test_all_tournaments_count_and_uniqueness(self):
        for m in range(1, 5):
            seen = {t.rows for t in all_tournaments(m)}
            assert len(seen) == 1 << (m * (m - 1) // 2)

    def test_all_tournaments_valid(self):
        for t in all_tournaments(4):
            t.validate()


class TestStockConstructions:
    def test_source_tournament(self):
        t = source_tournament(5, 3)
        assert t.source() == 3

    def test_random_tournament_deterministic(self):
        a = random_tournament(6, random.Random(99))
        b = random_tournament(6, random.Random(99))
        assert a == b
        a.validate()

    def test_relabel_roundtrip(self):
        rng = random.Random(3)
        for _ in range(50):
            m = rng.randint(1, 6)
            t = random_tournament(m, rng)
            perm = list(range(m))
            rng.shuffle(perm)
            relabeled = t.relabel(perm)
            relabeled.validate()
            for a, b in itertools.permutations(range(m), 2):
                assert t.beats(a, b) == relabeled.beats(perm[a], perm[b])
