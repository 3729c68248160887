import random

import pytest
from hypothesis import given, settings, strategies as st

from tsapproval import (
    Election,
    ElectionError,
    SolutionRule,
    WinnerModel,
    concat,
    dichotomize,
    random_election,
    relabel,
    score_vector,
    source_tournament,
    ts_score,
    winners,
    wins,
)
from oracles import winners_oracle

RULES = (SolutionRule.TC, SolutionRule.CO, SolutionRule.UC)


def elections(max_m=5, max_n=4):
    def build(args):
        m, n, seed = args
        return random_election(m, n, random.Random(seed))
    return st.tuples(st.integers(1, max_m), st.integers(1, max_n),
                     st.integers(0, 10**6)).map(build)


@pytest.fixture
def one_vote_t_star(t_star):
    return Election(("a", "b", "c", "d"), (t_star,))


class TestConstruction:
    def test_zero_votes_rejected(self):
        with pytest.raises(ElectionError, match="at least one vote"):
            Election(("a", "b"), ())

    def test_vote_size_mismatch(self, t_star):
        with pytest.raises(ElectionError, match="roster"):
            Election(("a", "b"), (t_star,))

    def test_duplicate_names(self, t_star):
        with pytest.raises(ElectionError, match="distinct"):
            Election(("a", "a", "b", "c"), (t_star,))

    def test_whitespace_name(self, t_star):
        with pytest.raises(ElectionError, match="token"):
            Election(("a", "b b", "c", "d"), (t_star,))


class TestScoring:
    def test_t_star_scores(self, one_vote_t_star):
        e = one_vote_t_star
        assert ts_score(e, SolutionRule.CO, 1) == 1  # b is approved
        assert ts_score(e, SolutionRule.CO, 0) == 0  # a is not
        assert score_vector(e, SolutionRule.UC) == (1, 1, 1, 0)

    def test_unknown_candidate(self, one_vote_t_star):
        with pytest.raises(ElectionError, match="unknown"):
            ts_score(one_vote_t_star, SolutionRule.CO, 7)

    def test_two_source_votes(self):
        e = Election.of((source_tournament(3, 1), source_tournament(3, 1)))
        for rule in RULES:
            assert ts_score(e, rule, 1) == 2

    def test_winners_per_rule(self, one_vote_t_star):
        e = one_vote_t_star
        assert winners(e, SolutionRule.CO) == {1, 2}
        assert winners(e, SolutionRule.UC) == {0, 1, 2}
        assert winners(e, SolutionRule.TC) == {0, 1, 2, 3}


class TestWins:
    def test_models(self, one_vote_t_star):
        e = one_vote_t_star
        assert wins(e, SolutionRule.CO, 1, WinnerModel.NONUNIQUE)
        assert not wins(e, SolutionRule.CO, 1, WinnerModel.UNIQUE)

    def test_unique_source_winner(self):
        e = Election.of((source_tournament(3, 0), source_tournament(3, 0)))
        assert wins(e, SolutionRule.TC, 0, WinnerModel.UNIQUE)


class TestDichotomize:
    def test_t_star(self, one_vote_t_star):
        assert dichotomize(one_vote_t_star, SolutionRule.UC) == ({0, 1, 2},)

    def test_triangle_full(self, triangle):
        e = Election.of((triangle,))
        for rule in RULES:
            assert dichotomize(e, rule) == ({0, 1, 2},)

    def test_source_vote(self):
        e = Election.of((source_tournament(4, 2),))
        assert dichotomize(e, SolutionRule.CO) == ({2},)

    @settings(max_examples=60, deadline=None)
    @given(elections())
    def test_approval_counting_equals_winners(self, e):
        for rule in RULES:
            profile = dichotomize(e, rule)
            scores = [0] * e.m
            for approved in profile:
                assert approved, "solution sets are never empty"
                for c in approved:
                    scores[c] += 1
            best = max(scores)
            assert winners(e, rule) == {c for c, s in enumerate(scores) if s == best}


class TestConcat:
    def test_roster_mismatch(self, t_star, triangle):
        with pytest.raises(ElectionError, match="roster"):
            concat(Election.of((t_star,)), Election.of((triangle,)))

    def test_doubling(self, one_vote_t_star):
        doubled = concat(one_vote_t_star, one_vote_t_star)
        for rule in RULES:
            assert score_vector(doubled, rule) == tuple(
                2 * s for s in score_vector(one_vote_t_star, rule))

    def test_two_sources(self):
        e = concat(Election.of((source_tournament(3, 0),)),
                   Election.of((source_tournament(3, 1),)))
        for rule in RULES:
            assert winners(e, rule) == {0, 1}

    @settings(max_examples=80, deadline=None)
    @given(elections(), elections())
    def test_additivity(self, e1, e2):
        if e1.m != e2.m:
            return
        e2 = Election(e1.names, e2.votes)
        joined = concat(e1, e2)
        for rule in RULES:
            s1, s2 = score_vector(e1, rule), score_vector(e2, rule)
            assert score_vector(joined, rule) == tuple(a + b for a, b in zip(s1, s2))

    @settings(max_examples=80, deadline=None)
    @given(elections(), elections())
    def test_consistency(self, e1, e2):
        if e1.m != e2.m:
            return
        e2 = Election(e1.names, e2.votes)
        for rule in RULES:
            inter = winners(e1, rule) & winners(e2, rule)
            if inter:
                assert winners(concat(e1, e2), rule) == inter


class TestAxiomsDirect:
    @settings(max_examples=60, deadline=None)
    @given(elections(), st.randoms(use_true_random=False))
    def test_anonymity(self, e, rnd):
        votes = list(e.votes)
        rnd.shuffle(votes)
        shuffled = Election(e.names, tuple(votes))
        for rule in RULES:
            assert winners(e, rule) == winners(shuffled, rule)

    @settings(max_examples=60, deadline=None)
    @given(elections(), st.randoms(use_true_random=False))
    def test_neutrality(self, e, rnd):
        perm = list(range(e.m))
        rnd.shuffle(perm)
        mapped = relabel(e, perm)
        for rule in RULES:
            assert winners(mapped, rule) == {perm[c] for c in winners(e, rule)}
        for i, name in enumerate(e.names):
            assert mapped.names[perm[i]] == name

    def test_majority(self):
        rng = random.Random(11)
        for _ in range(200):
            m, n = rng.randint(1, 5), rng.randint(1, 5)
            c = rng.randrange(m)
            votes = [source_tournament(m, c)] * (n // 2 + 1)
            votes += [random_election(m, 1, rng).votes[0] for _ in range(n - len(votes))]
            rng.shuffle(votes)
            e = Election.of(tuple(votes))
            for rule in RULES:
                assert c in winners(e, rule)

    @settings(max_examples=60, deadline=None)
    @given(elections())
    def test_winners_match_oracle(self, e):
        for rule in RULES:
            assert winners(e, rule) == winners_oracle(e, rule)
