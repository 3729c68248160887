"""Exact solvers for election control and bribery.

Vote control adds or deletes whole votes; candidate control adds or deletes
candidates, with every vote restricted to the active candidate set by
induction (a deleted candidate never changes the preference among the
rest).  Bribery reverses individual arcs inside votes, the budget counting
reversals summed over all votes.

Destructive goals unfold the winner models directly: under the nonunique
model the distinguished candidate stops winning only when some rival scores
strictly higher; under the unique model a rival merely tying suffices.

``solve_bruteforce`` is the ground-truth oracle: it enumerates modification
subsets in deterministic order of increasing cost, so the returned witness
has minimum cost and the lexicographically least encoding among those.
Budgeted closed-form paths exist for destructive vote control (provably
equivalent to the oracle) and for destructive bribery under the top-cycle
rule (a shortcut whose verdicts can drift from the oracle; disagreements
are recorded, never silenced).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .election import Election, WinnerModel, score_vector, dichotomize, winners, wins
from .solutions import SolutionRule, apply_rule
from .tournament import Tournament, arc_pairs

# Enumeration guards: subset spaces beyond this are refused unless the
# caller passes unsafe=True; arc-reversal budgets are capped separately
# because their slot space grows as votes * pairs.
SUBSET_ENUMERATION_BOUND = 1_000_000
REVERSAL_BUDGET_BOUND = 4


class InstanceError(ValueError):
    """A control or bribery instance violates its invariants."""


class SizeError(ValueError):
    """An enumeration bound would be exceeded; names the blown bound."""


class ControlProblem(Enum):
    CCAV = "ccav"
    CCDV = "ccdv"
    CCAC = "ccac"
    CCDC = "ccdc"
    DCAV = "dcav"
    DCDV = "dcdv"
    DCAC = "dcac"
    DCDC = "dcdc"

    @classmethod
    def parse(cls, text: str) -> "ControlProblem":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown control problem {text!r}") from None

    @property
    def constructive(self) -> bool:
        return self.value[0] == "c"

    @property
    def operation(self) -> str:
        """One of av, dv, ac, dc."""
        return self.value[2:]

    def __str__(self):
        return self.value


class BriberyProblem(Enum):
    CBRA = "cbra"
    DBRA = "dbra"

    @classmethod
    def parse(cls, text: str) -> "BriberyProblem":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown bribery problem {text!r}") from None

    @property
    def constructive(self) -> bool:
        return self.value[0] == "c"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ControlInstance:
    problem: ControlProblem
    rule: SolutionRule
    model: WinnerModel
    election: Election
    p: int
    k: int
    unregistered_votes: tuple[Tournament, ...] = ()
    unregistered_candidates: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.k < 1:
            raise InstanceError("budget must be at least 1")
        m = self.election.m
        if not 0 <= self.p < m:
            raise InstanceError(f"distinguished candidate {self.p} outside [0, {m})")
        op = self.problem.operation
        if op == "av":
            for i, v in enumerate(self.unregistered_votes):
                if v.m != m:
                    raise InstanceError(f"unregistered vote {i} has wrong candidate count")
        elif self.unregistered_votes:
            raise InstanceError(f"{self.problem} does not take unregistered votes")
        if op == "ac":
            bad = [c for c in self.unregistered_candidates if not 0 <= c < m]
            if bad:
                raise InstanceError(f"unregistered candidates {bad} outside [0, {m})")
            if self.p in self.unregistered_candidates:
                raise InstanceError("the distinguished candidate is always registered")
        elif self.unregistered_candidates:
            raise InstanceError(f"{self.problem} does not take unregistered candidates")

    @property
    def constructive(self) -> bool:
        return self.problem.constructive


@dataclass(frozen=True)
class BriberyInstance:
    problem: BriberyProblem
    rule: SolutionRule
    model: WinnerModel
    election: Election
    p: int
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InstanceError("budget must be at least 1")
        if not 0 <= self.p < self.election.m:
            raise InstanceError(
                f"distinguished candidate {self.p} outside [0, {self.election.m})")

    @property
    def constructive(self) -> bool:
        return self.problem.constructive


@dataclass(frozen=True)
class StrategyAction:
    """A concrete modification: exactly one family of fields is populated."""

    added_votes: tuple[int, ...] = ()
    deleted_votes: tuple[int, ...] = ()
    added_candidates: tuple[int, ...] = ()
    deleted_candidates: tuple[int, ...] = ()
    reversals: tuple[tuple[int, int, int], ...] = ()

    @property
    def cost(self) -> int:
        return (len(self.added_votes) + len(self.deleted_votes)
                + len(self.added_candidates) + len(self.deleted_candidates)
                + len(self.reversals))


@dataclass(frozen=True)
class StrategyOutcome:
    feasible: bool
    action: StrategyAction | None
    cost: int


def registered_active(inst) -> tuple[int, ...]:
    """The initially registered candidate set, ascending."""
    m = inst.election.m
    if isinstance(inst, ControlInstance) and inst.problem.operation == "ac":
        return tuple(c for c in range(m) if c not in inst.unregistered_candidates)
    return tuple(range(m))


def evaluate_action(inst, action: StrategyAction) -> tuple[Election, int]:
    """Apply ``action`` and return the election to judge plus p's index in it."""
    e = inst.election
    if action.reversals:
        votes = list(e.votes)
        for v, a, b in action.reversals:
            votes[v] = votes[v].reverse_arc(a, b)
        return Election(e.names, tuple(votes)), inst.p
    if action.added_votes or action.deleted_votes:
        votes = [v for i, v in enumerate(e.votes) if i not in set(action.deleted_votes)]
        votes.extend(inst.unregistered_votes[i] for i in action.added_votes)
        return Election(e.names, tuple(votes)), inst.p
    active = set(registered_active(inst))
    active.update(action.added_candidates)
    active.difference_update(action.deleted_candidates)
    keep = tuple(sorted(active))
    if keep == tuple(range(e.m)):
        return e, inst.p
    names = tuple(e.names[c] for c in keep)
    votes = tuple(v.induced(keep)[0] for v in e.votes)
    return Election(names, votes), keep.index(inst.p)


def goal_holds(inst, election: Election, p: int | None = None) -> bool:
    """Constructive: p wins the given election; destructive: p does not."""
    if p is None:
        p = inst.p
    won = wins(election, inst.rule, p, inst.model)
    return won if inst.constructive else not won


def replay(inst, action: StrategyAction) -> bool:
    """Re-apply a witness action and re-evaluate the goal from scratch."""
    election, p = evaluate_action(inst, action)
    return goal_holds(inst, election, p)


def _subset_space(options: int, cap: int) -> int:
    return sum(math.comb(options, r) for r in range(cap + 1))


def _enumeration_plan(inst):
    """Option list, action factory and effective budget for the oracle."""
    e = inst.election
    if isinstance(inst, BriberyInstance):
        slots = [(v, a, b) for v in range(e.n) for a, b in arc_pairs(e.m)]
        cap = min(inst.k, len(slots))
        make = lambda combo: StrategyAction(reversals=tuple(slots[i] for i in combo))
        return slots, make, cap
    op = inst.problem.operation
    if op == "av":
        pool = range(len(inst.unregistered_votes))
        cap = min(inst.k, len(inst.unregistered_votes))
        make = lambda combo: StrategyAction(added_votes=combo)
        return list(pool), make, cap
    if op == "dv":
        # Deleting every vote is disallowed: winners are undefined on an
        # empty election, so deletions cap at n - 1.
        cap = min(inst.k, e.n - 1)
        make = lambda combo: StrategyAction(deleted_votes=combo)
        return list(range(e.n)), make, cap
    if op == "ac":
        pool = sorted(inst.unregistered_candidates)
        cap = min(inst.k, len(pool))
        make = lambda combo: StrategyAction(added_candidates=tuple(pool[i] for i in combo))
        return pool, make, cap
    deletable = [c for c in range(e.m) if c != inst.p]
    cap = min(inst.k, len(deletable))
    make = lambda combo: StrategyAction(deleted_candidates=tuple(deletable[i] for i in combo))
    return deletable, make, cap


def solve_bruteforce(inst, unsafe: bool = False) -> StrategyOutcome:
    """Exact oracle: enumerate modification subsets in increasing cost.

    Deterministic: subsets of equal size come in lexicographic order, so the
    witness is the minimum-cost, lexicographically least one.  Refuses
    instances whose subset space exceeds ``SUBSET_ENUMERATION_BOUND`` (or,
    for bribery, whose budget exceeds ``REVERSAL_BUDGET_BOUND``) unless
    ``unsafe`` is set.
    """
    options, make, cap = _enumeration_plan(inst)
    if isinstance(inst, BriberyInstance) and cap > REVERSAL_BUDGET_BOUND and not unsafe:
        raise SizeError(
            f"reversal budget {cap} exceeds REVERSAL_BUDGET_BOUND={REVERSAL_BUDGET_BOUND}")
    space = _subset_space(len(options), cap)
    if space > SUBSET_ENUMERATION_BOUND and not unsafe:
        raise SizeError(
            f"{space} subsets exceed SUBSET_ENUMERATION_BOUND={SUBSET_ENUMERATION_BOUND}")
    import itertools

    for r in range(cap + 1):
        for combo in itertools.combinations(range(len(options)), r):
            action = make(combo)
            election, p = evaluate_action(inst, action)
            if goal_holds(inst, election, p):
                return StrategyOutcome(True, action, r)
    return StrategyOutcome(False, None, 0)


def _destructive_need(inst, s_p: int, s_q: int) -> int:
    """Score swing needed for rival q to break p, per winner model."""
    if inst.model is WinnerModel.UNIQUE:
        return s_p - s_q
    return s_p - s_q + 1


def solve_dcav_fast(inst: ControlInstance) -> StrategyOutcome:
    """Destructive control by adding votes, via per-rival gap counting.

    For each rival q only the unregistered votes approving q but not p can
    close the gap; adding the cheapest sufficient number of them is optimal.
    """
    if inst.problem is not ControlProblem.DCAV:
        raise InstanceError(f"expected a dcav instance, got {inst.problem}")
    e = inst.election
    if goal_holds(inst, e, inst.p):
        return StrategyOutcome(True, StrategyAction(), 0)
    scores = score_vector(e, inst.rule)
    pool = tuple(apply_rule(inst.rule, v) for v in inst.unregistered_votes)
    best = None
    for q in range(e.m):
        if q == inst.p:
            continue
        helpers = [i for i, approved in enumerate(pool)
                   if q in approved and inst.p not in approved]
        need = max(0, _destructive_need(inst, scores[inst.p], scores[q]))
        if need <= min(inst.k, len(helpers)):
            if best is None or need < best[0]:
                best = (need, helpers[:need])
    if best is None:
        return StrategyOutcome(False, None, 0)
    action = StrategyAction(added_votes=tuple(best[1]))
    assert replay(inst, action)
    return StrategyOutcome(True, action, best[0])


def solve_dcdv_fast(inst: ControlInstance) -> StrategyOutcome:
    """Destructive control by deleting votes, via per-rival gap counting.

    Only registered votes approving p but not the rival help; deletions cap
    at n - 1 so at least one vote remains.
    """
    if inst.problem is not ControlProblem.DCDV:
        raise InstanceError(f"expected a dcdv instance, got {inst.problem}")
    e = inst.election
    if goal_holds(inst, e, inst.p):
        return StrategyOutcome(True, StrategyAction(), 0)
    scores = score_vector(e, inst.rule)
    approvals = dichotomize(e, inst.rule)
    best = None
    for q in range(e.m):
        if q == inst.p:
            continue
        helpers = [i for i, approved in enumerate(approvals)
                   if inst.p in approved and q not in approved]
        need = max(0, _destructive_need(inst, scores[inst.p], scores[q]))
        if need <= min(inst.k, len(helpers), e.n - 1):
            if best is None or need < best[0]:
                best = (need, helpers[:need])
    if best is None:
        return StrategyOutcome(False, None, 0)
    action = StrategyAction(deleted_votes=tuple(best[1]))
    assert replay(inst, action)
    return StrategyOutcome(True, action, best[0])


@dataclass(frozen=True)
class TcEntryEffects:
    """What single arc reversals can do for a candidate outside the top cycle."""

    entry_cost: int
    p_joins: bool


def tc_entry_effects(t: Tournament, p: int, q: int) -> TcEntryEffects:
    """Cost for q to enter the top cycle, and whether p always rides along.

    ``entry_cost`` is 0 when q is already in the top cycle (then ``p_joins``
    is False by convention) and 1 otherwise: one reversal between q and a
    top-cycle member always suffices.  ``p_joins`` reports whether every
    single reversal admitting q also newly admits p, checked by enumerating
    all m(m-1)/2 single reversals.
    """
    from .solutions import top_cycle

    tc = top_cycle(t)
    if q in tc:
        return TcEntryEffects(0, False)
    p_inside = p in tc
    joins = not p_inside
    admitted = False
    for a, b in arc_pairs(t.m):
        t2 = t.reverse_arc(a, b)
        tc2 = top_cycle(t2)
        if q in tc2:
            admitted = True
            if p_inside or p not in tc2:
                joins = False
    return TcEntryEffects(1, joins and admitted)


def solve_dbra_tc_fast(inst: BriberyInstance) -> StrategyOutcome:
    """Closed-form feasibility test for destructive bribery under the top cycle.

    For each rival q it counts the votes whose top cycle misses q (call it
    k'), takes the achievable score lift as min(k, k') on the premise that a
    single reversal per vote admits q without moving p, and compares against
    the model threshold.  The premise can fail: a reversal that admits q may
    also admit or evict p, so this path can disagree with the oracle in both
    directions.  Replay the witness, or cross-check with
    :func:`solve_bruteforce`, before trusting a verdict.
    """
    if inst.problem is not BriberyProblem.DBRA:
        raise InstanceError(f"expected a dbra instance, got {inst.problem}")
    if inst.rule is not SolutionRule.TC:
        raise InstanceError("the closed-form path only covers the top-cycle rule")
    from .solutions import top_cycle

    e = inst.election
    if goal_holds(inst, e, inst.p):
        return StrategyOutcome(True, StrategyAction(), 0)
    scores = score_vector(e, SolutionRule.TC)
    if e.m == 1:
        return StrategyOutcome(False, None, 0)
    if e.m == 2:
        return _solve_dbra_two_candidates(inst, scores)
    per_vote_tc = [top_cycle(v) for v in e.votes]
    best = None
    for q in range(e.m):
        if q == inst.p:
            continue
        missing = [i for i, tc in enumerate(per_vote_tc) if q not in tc]
        need = max(0, _destructive_need(inst, scores[inst.p], scores[q]))
        if need <= min(inst.k, len(missing)):
            if best is None or need < best[0]:
                reversals = []
                for i in missing[:need]:
                    anchor = min(per_vote_tc[i])
                    reversals.append((i, anchor, q))
                best = (need, tuple(reversals))
    if best is None:
        return StrategyOutcome(False, None, 0)
    return StrategyOutcome(True, StrategyAction(reversals=best[1]), best[0])


def _solve_dbra_two_candidates(inst, scores):
    # With two candidates each reversal flips a whole vote, moving both
    # scores at once; solved directly.
    e = inst.election
    q = 1 - inst.p
    p_votes = [i for i, v in enumerate(e.votes) if v.beats(inst.p, q)]
    for r in range(min(inst.k, len(p_votes)) + 1):
        swung_p = scores[inst.p] - r
        swung_q = scores[q] + r
        ok = swung_q >= swung_p if inst.model is WinnerModel.UNIQUE else swung_q > swung_p
        if ok:
            action = StrategyAction(
                reversals=tuple((i, inst.p, q) for i in p_votes[:r]))
            return StrategyOutcome(True, action, r)
    return StrategyOutcome(False, None, 0)


def within_oracle_bounds(inst) -> bool:
    """True when the brute-force oracle would accept the instance as-is."""
    options, _, cap = _enumeration_plan(inst)
    if isinstance(inst, BriberyInstance) and cap > REVERSAL_BUDGET_BOUND:
        return False
    return _subset_space(len(options), cap) <= SUBSET_ENUMERATION_BOUND


class StrategyInternalError(AssertionError):
    """A fast path contradicted the oracle; this indicates a solver bug."""


def solve_control(inst: ControlInstance, cross_check: bool = True) -> StrategyOutcome:
    """Dispatch a control instance to its best solver.

    Destructive vote control takes the closed-form path, cross-checked
    against the oracle whenever the instance is within oracle bounds; the
    other six problems go straight to the oracle.
    """
    if inst.problem is ControlProblem.DCAV:
        out = solve_dcav_fast(inst)
    elif inst.problem is ControlProblem.DCDV:
        out = solve_dcdv_fast(inst)
    else:
        return solve_bruteforce(inst)
    if cross_check and within_oracle_bounds(inst):
        oracle = solve_bruteforce(inst)
        if oracle.feasible != out.feasible or (out.feasible and oracle.cost != out.cost):
            raise StrategyInternalError(
                f"fast path disagreed with oracle on {inst.problem}: "
                f"fast={out.feasible}/{out.cost} oracle={oracle.feasible}/{oracle.cost}")
    return out


def solve_bribery(inst: BriberyInstance, algorithm: str = "bruteforce",
                  unsafe: bool = False) -> StrategyOutcome:
    """Dispatch a bribery instance.

    ``bruteforce`` is authoritative; ``tc-fast`` selects the closed-form
    destructive top-cycle path, whose verdicts should be replayed.
    """
    if algorithm == "tc-fast":
        return solve_dbra_tc_fast(inst)
    if algorithm != "bruteforce":
        raise ValueError(f"unknown bribery algorithm {algorithm!r}")
    return solve_bruteforce(inst, unsafe=unsafe)
