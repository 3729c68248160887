"""Hardness-gadget generators and tiny oracles for their source problems.

Each generator builds a control or bribery instance whose structure encodes
a source-problem instance (exact cover by 3-sets, or tournament dominating
set).  Generation is self-checking: every structural claim the construction
relies on (per-vote solution sets, initial scores, regularity of filler
blocks) is asserted before the instance is returned, and a violation raises
:class:`GadgetError` rather than emitting a wrong gadget.

Arcs the constructions leave open are filled canonically (smaller index
beats larger) unless a seed requests a randomized fill; identical inputs
and seed produce bit-identical instances.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .election import Election, WinnerModel, score_vector
from .solutions import SolutionRule, apply_rule, copeland_set, uncovered_set
from .strategy import (
    BriberyInstance,
    BriberyProblem,
    ControlInstance,
    ControlProblem,
    SizeError,
    StrategyAction,
)
from .tournament import Tournament, cyclic_regular, near_regular

X3C_ORACLE_KAPPA_BOUND = 4
TDS_ORACLE_SUBSET_BOUND = 1_000_000


class GadgetError(RuntimeError):
    """A generated gadget failed one of its structural self-checks."""


# -- exact cover by 3-sets ----------------------------------------------------


@dataclass(frozen=True)
class X3cInstance:
    """Universe of 3*kappa elements plus 3*kappa 3-subsets, each element in exactly three."""

    kappa: int
    universe: tuple[str, ...]
    sets: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be at least 1")
        size = 3 * self.kappa
        if len(self.universe) != size:
            raise ValueError(f"universe must have {size} elements, got {len(self.universe)}")
        if len(set(self.universe)) != size:
            raise ValueError("universe element tokens must be distinct")
        if len(self.sets) != size:
            raise ValueError(f"expected {size} sets, got {len(self.sets)}")
        occurrences = [0] * size
        for s in self.sets:
            if len(set(s)) != 3:
                raise ValueError(f"set {s} must contain three distinct elements")
            for x in s:
                if not 0 <= x < size:
                    raise ValueError(f"element index {x} outside [0, {size})")
                occurrences[x] += 1
        bad = [self.universe[i] for i, c in enumerate(occurrences) if c != 3]
        if bad:
            raise ValueError(f"elements {bad} do not occur in exactly three sets")

    @classmethod
    def make(cls, kappa: int, sets, universe=None) -> "X3cInstance":
        if universe is None:
            universe = tuple(f"e{i + 1}" for i in range(3 * kappa))
        return cls(kappa, tuple(universe), tuple(tuple(sorted(s)) for s in sets))


def x3c_oracle(inst: X3cInstance) -> tuple[int, ...] | None:
    """Exhaustive exact-cover search; returns chosen set indices or None."""
    if inst.kappa > X3C_ORACLE_KAPPA_BOUND:
        raise SizeError(
            f"exact-cover oracle is capped at kappa={X3C_ORACLE_KAPPA_BOUND}")
    size = 3 * inst.kappa
    full = frozenset(range(size))
    for combo in itertools.combinations(range(len(inst.sets)), inst.kappa):
        union = set()
        count = 0
        for i in combo:
            union.update(inst.sets[i])
            count += 3
        if count == len(union) and union == full:
            return combo
    return None


# -- tournament dominating set ------------------------------------------------


def is_dominating(t: Tournament, candidates) -> bool:
    mask = 0
    for v in candidates:
        mask |= 1 << v
        mask |= t.rows[v]
    return mask == (1 << t.m) - 1


def dbra_gadget_min_size(k: int) -> int:
    """Smallest tournament the destructive-bribery gadget can be built from."""
    block = max(k + 1, 3)
    return max((k + 1) * (2 * k + 4), block * (2 * k + 3) + 1)


@dataclass(frozen=True)
class TdsInstance:
    """A dominating-set question (T, k) with a designated non-king vertex.

    The tournament must already be padded to the gadget size; use
    :func:`pad_tds` to grow a raw instance without changing its answer.
    """

    tournament: Tournament
    k: int
    non_king: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        t = self.tournament
        if not 0 <= self.non_king < t.m:
            raise ValueError(f"non_king {self.non_king} outside [0, {t.m})")
        if self.non_king in uncovered_set(t):
            raise ValueError(f"vertex {self.non_king} is a king, but a non-king is required")
        floor = (self.k + 1) * (2 * self.k + 4)
        if t.m < floor:
            raise ValueError(
                f"instance must be padded to at least {floor} vertices, got {t.m}")


def pad_tds(t: Tournament, k: int, non_king: int, target: int | None = None) -> TdsInstance:
    """Grow ``t`` with beaten-by-everyone vertices until it reaches the gadget size.

    Every original vertex beats every added one, so dominating sets and the
    non-king status of ``non_king`` carry over unchanged.
    """
    if target is None:
        target = dbra_gadget_min_size(k)
    if t.m >= target:
        return TdsInstance(t, k, non_king)
    extra = target - t.m
    rows = list(t.rows)
    tail = (1 << target) - (1 << t.m)
    for i in range(t.m):
        rows[i] |= tail
    for i in range(t.m, target):
        row = 0
        for j in range(i + 1, target):
            row |= 1 << j
        rows.append(row)
    return TdsInstance(Tournament(rows), k, non_king)


def tds_oracle(inst: TdsInstance) -> frozenset[int] | None:
    """Exhaustive search for a dominating set of size at most k."""
    t, k = inst.tournament, inst.k
    space = sum(math.comb(t.m, r) for r in range(k + 1))
    if space > TDS_ORACLE_SUBSET_BOUND:
        raise SizeError(
            f"{space} subsets exceed the dominating-set oracle bound {TDS_ORACLE_SUBSET_BOUND}")
    for r in range(k + 1):
        for combo in itertools.combinations(range(t.m), r):
            if is_dominating(t, combo):
                return frozenset(combo)
    return None


# -- deterministic vote assembly ----------------------------------------------


class _VoteBuilder:
    """Accumulates pinned arcs, then fills the free pairs deterministically."""

    def __init__(self, m: int):
        self.m = m
        self.rows = [0] * m
        self.decided = [0] * m

    def set_arc(self, a: int, b: int):
        if a == b:
            raise GadgetError(f"self-arc on candidate {a}")
        if self.decided[a] >> b & 1:
            if self.rows[a] >> b & 1:
                return  # same orientation repinned by an overlapping condition
            raise GadgetError(f"conflicting orientations pinned for pair ({a}, {b})")
        self.decided[a] |= 1 << b
        self.decided[b] |= 1 << a
        self.rows[a] |= 1 << b

    def place(self, pattern: Tournament, onto):
        """Copy a tournament onto the candidate list ``onto`` (index i maps to onto[i])."""
        for i in range(pattern.m):
            for j in range(pattern.m):
                if pattern.rows[i] >> j & 1:
                    self.set_arc(onto[i], onto[j])

    def finish(self, rng: random.Random | None) -> Tournament:
        for a in range(self.m):
            for b in range(a + 1, self.m):
                if not self.decided[a] >> b & 1:
                    if rng is not None and rng.getrandbits(1):
                        self.set_arc(b, a)
                    else:
                        self.set_arc(a, b)
        return Tournament(self.rows)


def _source_vote(m: int, s: int, rng: random.Random | None) -> Tournament:
    b = _VoteBuilder(m)
    for c in range(m):
        if c != s:
            b.set_arc(s, c)
    return b.finish(rng)


ALL_RULES = (SolutionRule.TC, SolutionRule.CO, SolutionRule.UC)


def _assert_solution_sets(vote: Tournament, expected: frozenset[int], where: str):
    for rule in ALL_RULES:
        got = apply_rule(rule, vote)
        if got != expected:
            raise GadgetError(
                f"{where}: {rule} selects {sorted(got)}, expected {sorted(expected)}")


def _assert_scores(e: Election, rule: SolutionRule, expected: dict[int, int], where: str):
    scores = score_vector(e, rule)
    for c, want in expected.items():
        if scores[c] != want:
            raise GadgetError(
                f"{where}: candidate {e.names[c]} scores {scores[c]}, expected {want}")


# -- exact cover -> constructive vote control ----------------------------------


def x3c_to_ccav(
    inst: X3cInstance,
    rule: SolutionRule,
    model: WinnerModel,
    seed: int | None = None,
) -> ControlInstance:
    """Constructive control by adding votes, encoding an exact-cover question.

    Candidates: one per element, plus the distinguished p and a dummy q.
    Registered votes give every element candidate a head start over p;
    each unregistered vote approves exactly one set's three elements
    together with p and q (a strongly connected regular five-block that
    beats everything else, so all three rules select exactly the block).
    """
    rng = random.Random(seed) if seed is not None else None
    kappa = inst.kappa
    size = 3 * kappa
    m = size + 2
    p, q = size, size + 1
    names = tuple(f"a_{tok}" for tok in inst.universe) + ("p", "q")

    per_element = kappa - 1 if model is WinnerModel.UNIQUE else kappa
    registered = []
    for c in range(size):
        registered.extend(_source_vote(m, c, rng) for _ in range(per_element))
    registered.append(_source_vote(m, p, rng))

    pool = []
    pattern = cyclic_regular(5)
    for s in inst.sets:
        block = sorted(s) + [p, q]
        builder = _VoteBuilder(m)
        builder.place(pattern, block)
        for a in block:
            for c in range(m):
                if c not in block:
                    builder.set_arc(a, c)
        vote = builder.finish(rng)
        _assert_solution_sets(vote, frozenset(block), f"set vote for {s}")
        pool.append(vote)

    election = Election(names, tuple(registered))
    expected = {c: per_element for c in range(size)}
    expected[p] = 1
    expected[q] = 0
    for r in ALL_RULES:
        _assert_scores(election, r, expected, "registered scores")
    return ControlInstance(
        ControlProblem.CCAV, rule, model, election, p, kappa,
        unregistered_votes=tuple(pool))


def x3c_to_ccdv(
    inst: X3cInstance,
    rule: SolutionRule,
    model: WinnerModel,
    seed: int | None = None,
) -> ControlInstance:
    """Constructive control by deleting votes, encoding an exact-cover question.

    One vote per set approves exactly that set's three element candidates (a
    directed triangle dominating everyone else); p is approved by its own
    source votes.  Deleting votes that jointly cover every element is the
    only way to pull all element candidates below p.
    """
    rng = random.Random(seed) if seed is not None else None
    kappa = inst.kappa
    size = 3 * kappa
    m = size + 1
    p = size
    names = tuple(f"a_{tok}" for tok in inst.universe) + ("p",)

    votes = []
    for s in inst.sets:
        tri = sorted(s)
        builder = _VoteBuilder(m)
        builder.set_arc(tri[0], tri[1])
        builder.set_arc(tri[1], tri[2])
        builder.set_arc(tri[2], tri[0])
        for a in tri:
            for c in range(m):
                if c not in tri:
                    builder.set_arc(a, c)
        vote = builder.finish(rng)
        _assert_solution_sets(vote, frozenset(tri), f"set vote for {s}")
        votes.append(vote)
    p_votes = 3 if model is WinnerModel.UNIQUE else 2
    votes.extend(_source_vote(m, p, rng) for _ in range(p_votes))

    election = Election(names, tuple(votes))
    expected = {c: 3 for c in range(size)}
    expected[p] = p_votes
    for r in ALL_RULES:
        _assert_scores(election, r, expected, "initial scores")
    return ControlInstance(ControlProblem.CCDV, rule, model, election, p, kappa)


# -- exact cover -> constructive bribery under the Copeland rule ---------------


def x3c_to_cbra_co(
    inst: X3cInstance,
    model: WinnerModel,
    seed: int | None = None,
    allow_small: bool = False,
) -> BriberyInstance:
    """Constructive arc-reversal bribery under the Copeland rule.

    The scoring argument that makes the instance resistant needs kappa of at
    least 4; smaller kappa is allowed only behind ``allow_small`` so the
    brute-force oracle can validate the forward direction at toy scale.
    All structural self-checks run in either mode.
    """
    kappa = inst.kappa
    if kappa < 4 and not allow_small:
        raise GadgetError(
            "the resistance argument needs kappa >= 4; pass allow_small=True "
            "for toy-scale forward validation only")
    rng = random.Random(seed) if seed is not None else None
    k = kappa
    size = 3 * kappa
    m = 6 * kappa + 1
    p = m - 1
    names = (tuple(f"a_{tok}" for tok in inst.universe)
             + tuple(f"s{i + 1}" for i in range(size)) + ("p",))

    votes = []
    remainder_pattern = cyclic_regular(m - 4)
    for i, s in enumerate(inst.sets):
        set_id = size + i
        x, y, z = sorted(s)
        distinguished = (set_id, x, y, z)
        rest = [c for c in range(m) if c not in distinguished]
        builder = _VoteBuilder(m)
        builder.set_arc(x, y)
        builder.set_arc(y, z)
        builder.set_arc(z, x)
        for e in (x, y, z):
            builder.set_arc(set_id, e)
            for c in rest:
                builder.set_arc(e, c)
        pool = [c for c in rest if c != p]
        if rng is not None:
            u, v = rng.sample(pool, 2)
        else:
            u, v = pool[0], pool[1]
        for c in rest:
            if c in (u, v):
                builder.set_arc(c, set_id)
            else:
                builder.set_arc(set_id, c)
        builder.place(remainder_pattern, rest)
        vote = builder.finish(rng)
        want = 6 * k - 2
        for c in distinguished:
            got = vote.outdegree(c)
            if got != want:
                raise GadgetError(
                    f"set vote {i}: candidate {names[c]} has outdegree {got}, expected {want}")
        if copeland_set(vote) != frozenset(distinguished):
            raise GadgetError(f"set vote {i}: Copeland set is not the distinguished four")
        votes.append(vote)

    def anchored_regular_vote(anchor: int) -> Tournament:
        builder = _VoteBuilder(m)
        rest = [c for c in range(m) if c != anchor]
        for c in rest:
            builder.set_arc(anchor, c)
        builder.place(near_regular(m - 1), rest)
        vote = builder.finish(rng)
        if vote.source() != anchor or not vote.induced(rest)[0].is_regular():
            raise GadgetError("anchored vote failed its source/regularity check")
        return vote

    p_vote_count = k + 2 if model is WinnerModel.NONUNIQUE else k + 3
    votes.extend(anchored_regular_vote(p) for _ in range(p_vote_count))
    for x in range(size):
        votes.extend(anchored_regular_vote(x) for _ in range(k))

    election = Election(names, tuple(votes))
    expected = {c: k + 3 for c in range(size)}
    expected.update({size + i: 1 for i in range(size)})
    expected[p] = p_vote_count
    _assert_scores(election, SolutionRule.CO, expected, "initial Copeland scores")
    return BriberyInstance(
        BriberyProblem.CBRA, SolutionRule.CO, model, election, p, kappa)


def cbra_cover_witness(gadget: BriberyInstance, inst: X3cInstance,
                       cover) -> StrategyAction:
    """The reversal set an exact cover induces in the generated instance.

    In each chosen set vote, flipping the arc from a designated in-neighbor
    of the set candidate to the set candidate makes it the sole Copeland
    winner, costing each covered element one approval.
    """
    reversals = []
    for i in sorted(cover):
        vote = gadget.election.votes[i]
        set_id = 3 * inst.kappa + i
        blocked = set(inst.sets[i]) | {set_id, gadget.p}
        beaters = [c for c in sorted(vote.in_neighbors(set_id)) if c not in blocked]
        reversals.append((i, beaters[0], set_id))
    return StrategyAction(reversals=tuple(reversals))


# -- dominating set -> destructive bribery under the uncovered set -------------


def tds_to_dbra_uc(
    inst: TdsInstance,
    model: WinnerModel,
    seed: int | None = None,
) -> BriberyInstance:
    """Destructive arc-reversal bribery under the uncovered-set rule.

    One vote copies the dominating-set tournament with a fresh candidate q
    beaten by everyone; a batch of q-source votes ties q's score to p's; and
    a ring of block votes props p up while keeping every other candidate's
    score negligible.  Blocks have max(k+1, 3) members: two-member blocks
    cannot avoid an internal source, which would leak an extra king.
    """
    rng = random.Random(seed) if seed is not None else None
    t, k, w = inst.tournament, inst.k, inst.non_king
    n = t.m
    block_size = max(k + 1, 3)
    ring = 2 * k + 3
    if n - 1 < block_size * ring:
        raise GadgetError(
            f"gadget needs at least {block_size * ring + 1} vertices "
            f"(pad the instance to {dbra_gadget_min_size(k)}), got {n}")
    m = n + 1
    q = n
    p = w
    names = tuple(f"v{i}" for i in range(n)) + ("q",)

    rows = [t.rows[i] | 1 << q for i in range(n)]
    rows.append(0)
    copy_vote = Tournament(rows)
    if p in uncovered_set(copy_vote) or q in uncovered_set(copy_vote):
        raise GadgetError("the copied vote must leave both p and q uncrowned")
    votes = [copy_vote]

    q_vote_count = ring if model is WinnerModel.NONUNIQUE else ring - 1
    for _ in range(q_vote_count):
        builder = _VoteBuilder(m)
        for c in range(m):
            if c != q:
                builder.set_arc(q, c)
        vote = builder.finish(rng)
        if uncovered_set(vote) != frozenset((q,)):
            raise GadgetError("q-anchored vote has stray kings")
        votes.append(vote)

    carriers = [c for c in range(n) if c != p][: block_size * ring]
    blocks = [carriers[i * block_size:(i + 1) * block_size] for i in range(ring)]
    inner = cyclic_regular(block_size) if block_size % 2 else near_regular(block_size)
    if inner.source() is not None:
        raise GadgetError("block pattern must not have a source")
    for i in range(ring):
        cur, nxt = blocks[i], blocks[(i + 1) % ring]
        builder = _VoteBuilder(m)
        builder.place(inner, cur)
        builder.place(inner, nxt)
        for pos, a in enumerate(cur):
            builder.set_arc(nxt[pos], a)
            for other in range(block_size):
                if other != pos:
                    builder.set_arc(a, nxt[other])
        outside = [c for c in range(m) if c != p and c not in cur and c not in nxt]
        for a in cur:
            builder.set_arc(a, p)
            for c in outside:
                builder.set_arc(a, c)
        for c in range(m):
            if c != p and c not in cur:
                builder.set_arc(p, c)
        for c in range(m):
            if c != q:
                builder.set_arc(c, q)
        vote = builder.finish(rng)
        want = frozenset(cur) | {p}
        got = uncovered_set(vote)
        if got != want:
            raise GadgetError(
                f"ring vote {i}: kings are {sorted(got)}, expected {sorted(want)}")
        votes.append(vote)

    election = Election(names, tuple(votes))
    scores = score_vector(election, SolutionRule.UC)
    want_p, want_q = ring, q_vote_count
    if scores[p] != want_p or scores[q] != want_q:
        raise GadgetError(
            f"p/q scores are {scores[p]}/{scores[q]}, expected {want_p}/{want_q}")
    worst = max(scores[c] for c in range(m) if c not in (p, q))
    if worst > 2:
        raise GadgetError(f"some rival scores {worst}, expected at most 2")
    return BriberyInstance(BriberyProblem.DBRA, SolutionRule.UC, model, election, p, k)


def tds_reversal_witness(gadget: BriberyInstance, dominating) -> StrategyAction:
    """Reversals that crown q in the copied vote given a dominating set."""
    q = gadget.election.m - 1
    return StrategyAction(reversals=tuple((0, v, q) for v in sorted(dominating)))
