"""Axiom auditors for tournament solutions and the approval correspondence.

Two families of searches live here.  Solution-level audits quantify over
single tournaments and monotone lifts of one candidate: a lift keeps the
relation among the other candidates fixed and only enlarges the lifted
candidate's out-neighborhood.  Correspondence-level audits quantify over
whole elections.  Small spaces are searched exhaustively in a fixed order
(so the first witness is the lexicographically least one and parallel runs
agree with serial ones); larger spaces are sampled with a seeded generator
and every witness embeds the seed that produced it.

Witness records store inputs only.  ``verify`` re-derives the violation
from scratch, so a witness loaded from a file is as trustworthy as a fresh
one.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from enum import Enum
from multiprocessing import Pool

from .election import Election, concat, random_election, relabel, winners
from .solutions import SolutionRule, apply_rule, solution_mask
from .tournament import (
    Tournament,
    arc_pairs,
    iter_bits,
    random_tournament,
    rows_from_code,
    source_tournament,
)

# Exhaustive solution audits walk 2**(m*(m-1)/2) tournaments per size, and
# per (tournament, candidate) another factor 2**indegree of lifts; beyond
# these caps only seeded random search is offered.
EXHAUSTIVE_TS_BOUND = 6
EXHAUSTIVE_VC_CANDIDATE_BOUND = 4
EXHAUSTIVE_VC_VOTE_BOUND = 3


class TsCriterion(Enum):
    """Solution-level monotonicity variants."""

    TS_MONOTONICITY = "ts-monotonicity"
    EXCLUSIVE_MONOTONICITY = "exclusive-monotonicity"
    ENM = "enm"

    @classmethod
    def parse(cls, text: str) -> "TsCriterion":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown solution criterion {text!r}") from None

    def __str__(self):
        return self.value


class VcCriterion(Enum):
    """Correspondence-level axioms."""

    MONOTONICITY = "monotonicity"
    PARETO = "pareto"
    CONSISTENCY = "consistency"
    MAJORITY = "majority"
    ANONYMITY = "anonymity"
    NEUTRALITY = "neutrality"

    @classmethod
    def parse(cls, text: str) -> "VcCriterion":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown correspondence criterion {text!r}") from None

    def __str__(self):
        return self.value


class InvalidWitnessError(ValueError):
    """A witness record does not exhibit the violation it claims."""


def is_monotone_lift(t: Tournament, lifted: Tournament, c: int) -> bool:
    """True iff ``lifted`` fixes everything except arcs flipped toward ``c``."""
    if t.m != lifted.m:
        return False
    off = ~(1 << c)
    for i in range(t.m):
        if i != c and t.rows[i] & off != lifted.rows[i] & off:
            return False
    return t.rows[c] & ~lifted.rows[c] == 0


@dataclass(frozen=True)
class TsCounterexample:
    """A (tournament, lift, candidate) triple falsifying a solution criterion."""

    rule: SolutionRule
    criterion: TsCriterion
    tournament: Tournament
    lifted: Tournament
    candidate: int
    seed: int | None = None

    @property
    def lift_arcs(self) -> tuple[int, ...]:
        """The former in-neighbors of the candidate flipped by the lift."""
        gained = self.lifted.rows[self.candidate] & ~self.tournament.rows[self.candidate]
        return tuple(iter_bits(gained))

    def verify(self) -> bool:
        self.tournament.validate()
        self.lifted.validate()
        c = self.candidate
        if not 0 <= c < self.tournament.m:
            return False
        if not is_monotone_lift(self.tournament, self.lifted, c):
            return False
        before = apply_rule(self.rule, self.tournament)
        after = apply_rule(self.rule, self.lifted)
        if self.criterion is TsCriterion.TS_MONOTONICITY:
            return c in before and c not in after
        if self.criterion is TsCriterion.EXCLUSIVE_MONOTONICITY:
            return c in before and (c not in after or not after <= before)
        return c not in before and not after <= before and c not in after


@dataclass(frozen=True)
class VcCounterexample:
    """An election (or pair of elections) falsifying a correspondence axiom."""

    rule: SolutionRule
    criterion: VcCriterion
    election: Election
    modified: Election | None = None
    candidate: int | None = None
    other: int | None = None
    mapping: tuple[int, ...] | None = None
    seed: int | None = None

    def verify(self) -> bool:
        crit = self.criterion
        e = self.election
        if crit is VcCriterion.MONOTONICITY:
            e2, c = self.modified, self.candidate
            if e2 is None or c is None or e.names != e2.names or e.n != e2.n:
                return False
            if not all(is_monotone_lift(t, t2, c) for t, t2 in zip(e.votes, e2.votes)):
                return False
            return c in winners(e, self.rule) and c not in winners(e2, self.rule)
        if crit is VcCriterion.PARETO:
            b, a = self.candidate, self.other
            if b is None or a is None:
                return False
            if not all(v.beats(a, b) for v in e.votes):
                return False
            won = winners(e, self.rule)
            return a not in won and b in won
        if crit is VcCriterion.CONSISTENCY:
            if self.modified is None:
                return False
            w1 = winners(e, self.rule)
            w2 = winners(self.modified, self.rule)
            inter = w1 & w2
            return bool(inter) and winners(concat(e, self.modified), self.rule) != inter
        if crit is VcCriterion.MAJORITY:
            c = self.candidate
            if c is None:
                return False
            sources = sum(1 for v in e.votes if v.source() == c)
            return 2 * sources > e.n and c not in winners(e, self.rule)
        if crit is VcCriterion.ANONYMITY:
            e2 = self.modified
            if e2 is None or sorted(map(hash, e.votes)) != sorted(map(hash, e2.votes)):
                return False
            return winners(e, self.rule) != winners(e2, self.rule)
        if crit is VcCriterion.NEUTRALITY:
            e2, perm = self.modified, self.mapping
            if e2 is None or perm is None:
                return False
            if tuple(v.relabel(perm) for v in e.votes) != e2.votes:
                return False
            expected = frozenset(perm[c] for c in winners(e, self.rule))
            return winners(e2, self.rule) != expected
        return False


@dataclass(frozen=True)
class AuditOutcome:
    """Result of a solution-level audit: optional witness plus enumeration counts.

    When no witness is found the counts are exact: every labeled tournament
    up to the size bound and, per (tournament, candidate), every subset of
    the candidate's in-neighborhood.  On a hit enumeration stops early and
    the counts cover at least the space inspected so far.
    """

    witness: TsCounterexample | None
    tournaments_checked: int
    lifts_checked: int


def expected_ts_enumeration(m_max: int) -> tuple[int, int]:
    """Exact (tournament, lift) counts a full exhaustive audit must visit."""
    tournaments = sum(1 << (m * (m - 1) // 2) for m in range(1, m_max + 1))
    lifts = sum(m * 3 ** (m - 1) * (1 << ((m - 1) * (m - 2) // 2)) for m in range(1, m_max + 1))
    return tournaments, lifts


def _violates(criterion, c, base_mask, new_mask) -> bool:
    c_bit = 1 << c
    if criterion is TsCriterion.TS_MONOTONICITY:
        return bool(base_mask & c_bit) and not new_mask & c_bit
    if criterion is TsCriterion.EXCLUSIVE_MONOTONICITY:
        return bool(base_mask & c_bit) and (not new_mask & c_bit or bool(new_mask & ~base_mask))
    return (not base_mask & c_bit) and bool(new_mask & ~base_mask) and not new_mask & c_bit


def _scan_codes(rule, criterion, m, lo, hi, match):
    """Scan tournament codes [lo, hi) at size m; first qualifying witness wins."""
    pairs = arc_pairs(m)
    tournaments = 0
    lifts = 0
    needs_winner = criterion is not TsCriterion.ENM
    for code in range(lo, hi):
        rows = rows_from_code(m, pairs, code)
        tournaments += 1
        base_mask = solution_mask(rule, rows, m)
        for c in range(m):
            in_list = [i for i in range(m) if rows[i] >> c & 1]
            lifts += 1 << len(in_list)
            if needs_winner != bool(base_mask >> c & 1):
                continue
            c_bit = 1 << c
            for sub in range(1, 1 << len(in_list)):
                lifted = list(rows)
                for k in iter_bits(sub):
                    b = in_list[k]
                    lifted[b] &= ~c_bit
                    lifted[c] |= 1 << b
                new_mask = solution_mask(rule, lifted, m)
                if _violates(criterion, c, base_mask, new_mask):
                    witness = TsCounterexample(
                        rule, criterion, Tournament(rows), Tournament(lifted), c)
                    if match is None or match(witness):
                        return witness, tournaments, lifts
    return None, tournaments, lifts


def _scan_codes_star(args):
    return args[:3], _scan_codes(*args)


def audit_ts(
    rule: SolutionRule,
    criterion: TsCriterion,
    m_max: int,
    *,
    exhaustive: bool = True,
    trials: int = 0,
    seed: int | None = None,
    match=None,
    jobs: int = 1,
) -> AuditOutcome:
    """Search for a violation of ``criterion`` by ``rule``.

    Exhaustive mode walks all labeled tournaments with at most ``m_max``
    candidates (capped at ``EXHAUSTIVE_TS_BOUND``) and, for each candidate,
    every monotone lift, in a fixed order.  Random mode needs ``trials`` and
    ``seed``.  ``match`` optionally filters which violations are acceptable
    as witnesses (shape-constrained regeneration); ``jobs`` splits the
    exhaustive scan across processes without changing the returned witness.
    """
    if exhaustive:
        if m_max > EXHAUSTIVE_TS_BOUND:
            raise ValueError(
                f"exhaustive solution audits are capped at {EXHAUSTIVE_TS_BOUND} candidates; "
                f"use exhaustive=False with trials and a seed for m_max={m_max}")
        return _audit_ts_exhaustive(rule, criterion, m_max, match, jobs)
    if seed is None:
        raise ValueError("randomized audits require a seed")
    return _audit_ts_random(rule, criterion, m_max, trials, seed, match)


def _audit_ts_exhaustive(rule, criterion, m_max, match, jobs):
    tournaments = 0
    lifts = 0
    for m in range(1, m_max + 1):
        total = 1 << len(arc_pairs(m))
        if jobs <= 1 or total < 4096 or match is not None:
            witness, t_count, l_count = _scan_codes(rule, criterion, m, 0, total, match)
            tournaments += t_count
            lifts += l_count
            if witness is not None:
                return AuditOutcome(witness, tournaments, lifts)
        else:
            chunk = -(-total // (jobs * 4))
            tasks = [
                (rule, criterion, m, lo, min(lo + chunk, total), None)
                for lo in range(0, total, chunk)
            ]
            with Pool(jobs) as pool:
                results = pool.map(_scan_codes_star, tasks)
            best_key = None
            best = None
            for key, (witness, t_count, l_count) in results:
                tournaments += t_count
                lifts += l_count
                if witness is not None:
                    # key[3] is the chunk start; the in-chunk witness is the
                    # first of its chunk, so chunk order decides.
                    order = key[3] if len(key) > 3 else 0
                    if best_key is None or order < best_key:
                        best_key, best = order, witness
            if best is not None:
                return AuditOutcome(best, tournaments, lifts)
    return AuditOutcome(None, tournaments, lifts)


def _audit_ts_random(rule, criterion, m_max, trials, seed, match):
    rng = random.Random(seed)
    lifts = 0
    needs_winner = criterion is not TsCriterion.ENM
    low = min(3, m_max)
    for _ in range(trials):
        m = rng.randint(low, m_max)
        t = random_tournament(m, rng)
        c = rng.randrange(m)
        lifts += 1
        base_mask = solution_mask(rule, t.rows, m)
        if needs_winner != bool(base_mask >> c & 1):
            continue
        in_list = [i for i in range(m) if t.rows[i] >> c & 1]
        flips = [b for b in in_list if rng.getrandbits(1)]
        if not flips:
            continue
        lifted = list(t.rows)
        for b in flips:
            lifted[b] &= ~(1 << c)
            lifted[c] |= 1 << b
        new_mask = solution_mask(rule, lifted, m)
        if _violates(criterion, c, base_mask, new_mask):
            witness = TsCounterexample(rule, criterion, t, Tournament(lifted), c, seed=seed)
            if match is None or match(witness):
                return AuditOutcome(witness, trials, lifts)
    return AuditOutcome(None, trials, lifts)


# -- correspondence-level audits ---------------------------------------------


def _check_vc_exhaustive_bounds(m, n):
    if m > EXHAUSTIVE_VC_CANDIDATE_BOUND or n > EXHAUSTIVE_VC_VOTE_BOUND:
        raise ValueError(
            f"exhaustive correspondence audits are capped at "
            f"{EXHAUSTIVE_VC_CANDIDATE_BOUND} candidates / {EXHAUSTIVE_VC_VOTE_BOUND} votes")


def _all_elections(m, n):
    pairs = arc_pairs(m)
    codes = range(1 << len(pairs))
    for combo in itertools.product(codes, repeat=n):
        yield Election.of(tuple(Tournament(rows_from_code(m, pairs, c)) for c in combo))


def _lift_vote(t, c, flips):
    rows = list(t.rows)
    for b in flips:
        rows[b] &= ~(1 << c)
        rows[c] |= 1 << b
    return Tournament(rows)


def _subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def audit_vc_monotonicity(
    rule: SolutionRule,
    m: int,
    n: int,
    trials: int,
    seed: int | None = None,
    exhaustive: bool = False,
) -> VcCounterexample | None:
    """Search for a winner dethroned by a per-vote monotone lift of itself."""
    if exhaustive:
        _check_vc_exhaustive_bounds(m, n)
        for e in _all_elections(m, n):
            for c in sorted(winners(e, rule)):
                per_vote = [sorted(v.in_neighbors(c)) for v in e.votes]
                for combo in itertools.product(*(_subsets(nb) for nb in per_vote)):
                    if not any(combo):
                        continue
                    e2 = Election(e.names, tuple(
                        _lift_vote(v, c, flips) for v, flips in zip(e.votes, combo)))
                    if c not in winners(e2, rule):
                        return VcCounterexample(rule, VcCriterion.MONOTONICITY, e, e2, c)
        return None
    if seed is None:
        raise ValueError("randomized audits require a seed")
    rng = random.Random(seed)
    for _ in range(trials):
        e = random_election(m, n, rng)
        c = rng.choice(sorted(winners(e, rule)))
        lifted = []
        for v in e.votes:
            flips = [b for b in sorted(v.in_neighbors(c)) if rng.getrandbits(1)]
            lifted.append(_lift_vote(v, c, flips))
        e2 = Election(e.names, tuple(lifted))
        if c not in winners(e2, rule):
            return VcCounterexample(rule, VcCriterion.MONOTONICITY, e, e2, c, seed=seed)
    return None


def audit_pareto(
    rule: SolutionRule,
    m: int,
    n: int,
    trials: int,
    seed: int | None = None,
    exhaustive: bool = False,
) -> VcCounterexample | None:
    """Search for a unanimously dominated candidate winning while its dominator loses."""

    def scan(e):
        won = winners(e, rule)
        for a in range(e.m):
            if a in won:
                continue
            for b in won:
                if b != a and all(v.beats(a, b) for v in e.votes):
                    return VcCounterexample(
                        rule, VcCriterion.PARETO, e, candidate=b, other=a)
        return None

    if exhaustive:
        _check_vc_exhaustive_bounds(m, n)
        for e in _all_elections(m, n):
            hit = scan(e)
            if hit is not None:
                return hit
        return None
    if seed is None:
        raise ValueError("randomized audits require a seed")
    rng = random.Random(seed)
    for _ in range(trials):
        a, b = rng.sample(range(m), 2)
        votes = []
        for _ in range(n):
            v = random_tournament(m, rng)
            if v.beats(b, a):
                v = v.reverse_arc(b, a)
            votes.append(v)
        e = Election.of(tuple(votes))
        hit = scan(e)
        if hit is not None:
            return VcCounterexample(
                rule, hit.criterion, hit.election,
                candidate=hit.candidate, other=hit.other, seed=seed)
    return None


def audit_consistency(
    rule: SolutionRule,
    m: int,
    n: int,
    trials: int,
    seed: int | None = None,
    exhaustive: bool = False,
) -> VcCounterexample | None:
    """Check that joining elections with overlapping winners yields exactly the overlap.

    Randomized mode examines ``trials`` generated pairs whose winner sets
    overlap (pairs without overlap are discarded and regenerated).
    """
    def check(e1, e2):
        inter = winners(e1, rule) & winners(e2, rule)
        if not inter:
            return None, False
        if winners(concat(e1, e2), rule) != inter:
            return VcCounterexample(rule, VcCriterion.CONSISTENCY, e1, e2), True
        return None, True

    if exhaustive:
        _check_vc_exhaustive_bounds(m, n)
        universe = list(_all_elections(m, n))
        for e1 in universe:
            for e2 in universe:
                hit, _ = check(e1, e2)
                if hit is not None:
                    return hit
        return None
    if seed is None:
        raise ValueError("randomized audits require a seed")
    rng = random.Random(seed)
    checked = 0
    attempts = 0
    cap = max(100, trials * 200)
    while checked < trials:
        attempts += 1
        if attempts > cap:
            raise RuntimeError(
                f"could not generate {trials} overlapping election pairs in {cap} attempts")
        e1 = random_election(m, n, rng)
        e2 = Election(e1.names, random_election(m, n, rng).votes)
        hit, counted = check(e1, e2)
        if hit is not None:
            return VcCounterexample(rule, hit.criterion, hit.election, hit.modified, seed=seed)
        if counted:
            checked += 1
    return None


def audit_majority(
    rule: SolutionRule,
    m: int,
    n: int,
    trials: int,
    seed: int | None = None,
    exhaustive: bool = False,
) -> VcCounterexample | None:
    """Search for a candidate who is the source of a strict vote majority yet loses."""
    if exhaustive:
        _check_vc_exhaustive_bounds(m, n)
        for e in _all_elections(m, n):
            for c in range(m):
                sources = sum(1 for v in e.votes if v.source() == c)
                if 2 * sources > n and c not in winners(e, rule):
                    return VcCounterexample(rule, VcCriterion.MAJORITY, e, candidate=c)
        return None
    if seed is None:
        raise ValueError("randomized audits require a seed")
    rng = random.Random(seed)
    for _ in range(trials):
        c = rng.randrange(m)
        votes = []
        for _ in range(n // 2 + 1):
            v = random_tournament(m, rng)
            rows = list(v.rows)
            rows[c] = ((1 << m) - 1) ^ (1 << c)
            for i in range(m):
                if i != c:
                    rows[i] &= ~(1 << c)
            votes.append(Tournament(rows))
        for _ in range(n - len(votes)):
            votes.append(random_tournament(m, rng))
        rng.shuffle(votes)
        e = Election.of(tuple(votes))
        if c not in winners(e, rule):
            return VcCounterexample(rule, VcCriterion.MAJORITY, e, candidate=c, seed=seed)
    return None


def audit_anonymity(
    rule: SolutionRule, m: int, n: int, trials: int, seed: int | None = None
) -> VcCounterexample | None:
    """Check that reordering the vote list never changes the winners."""
    if seed is None:
        raise ValueError("randomized audits require a seed")
    rng = random.Random(seed)
    for _ in range(trials):
        e = random_election(m, n, rng)
        votes = list(e.votes)
        rng.shuffle(votes)
        e2 = Election(e.names, tuple(votes))
        if winners(e, rule) != winners(e2, rule):
            return VcCounterexample(rule, VcCriterion.ANONYMITY, e, e2, seed=seed)
    return None


def audit_neutrality(
    rule: SolutionRule, m: int, n: int, trials: int, seed: int | None = None
) -> VcCounterexample | None:
    """Check that relabeling candidates maps the winners through the same relabeling."""
    if seed is None:
        raise ValueError("randomized audits require a seed")
    rng = random.Random(seed)
    for _ in range(trials):
        e = random_election(m, n, rng)
        perm = list(range(m))
        rng.shuffle(perm)
        e2 = Election(e.names, tuple(v.relabel(perm) for v in e.votes))
        expected = frozenset(perm[c] for c in winners(e, rule))
        if winners(e2, rule) != expected:
            return VcCounterexample(
                rule, VcCriterion.NEUTRALITY, e, e2, mapping=tuple(perm), seed=seed)
    return None


# -- from solution witness to correspondence witness -------------------------


def build_monotonicity_counterexample(
    rule: SolutionRule, w: TsCounterexample
) -> VcCounterexample:
    """Turn a solution-level witness into a correspondence-level one.

    The witness must falsify exclusive monotonicity or the negative variant
    for ``rule``.  The returned election pair is re-checked by direct
    evaluation: the lifted candidate wins the first election and loses the
    second although the change is a per-vote monotone lift of it.
    """
    if w.rule is not rule:
        raise InvalidWitnessError("witness was found for a different rule")
    if not w.verify():
        raise InvalidWitnessError(
            f"witness does not falsify {w.criterion} for {rule}")
    t, t2, c = w.tournament, w.lifted, w.candidate
    m = t.m
    before = apply_rule(rule, t)
    after = apply_rule(rule, t2)

    if w.criterion is TsCriterion.EXCLUSIVE_MONOTONICITY and c not in after:
        votes1 = (t,)
        votes2 = (t2,)
    elif w.criterion is TsCriterion.EXCLUSIVE_MONOTONICITY:
        b = min(after - before)
        fill = (source_tournament(m, b), source_tournament(m, b), source_tournament(m, c))
        votes1 = (t,) + fill
        votes2 = (t2,) + fill
    elif w.criterion is TsCriterion.ENM:
        b = min(after - before)
        fill = (source_tournament(m, b), source_tournament(m, c))
        votes1 = (t,) + fill
        votes2 = (t2,) + fill
    else:
        raise InvalidWitnessError(
            "only exclusive-monotonicity and enm witnesses convert to election pairs")

    e1 = Election.of(votes1)
    e2 = Election(e1.names, votes2)
    out = VcCounterexample(rule, VcCriterion.MONOTONICITY, e1, e2, candidate=c, seed=w.seed)
    if not out.verify():
        raise InvalidWitnessError("constructed election pair failed re-evaluation")
    return out
