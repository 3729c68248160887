"""Elections with tournament ballots and implicit-approval scoring.

A vote is a tournament over the full roster; the candidates selected by the
tournament solution count as that vote's approvals.  Winners are the argmax
of the approval scores.  Ties are never broken: the correspondence returns
the full winning set and :func:`wins` interprets it per winner model.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from enum import Enum

from .solutions import SolutionRule, apply_rule
from .tournament import Tournament, random_tournament

_DEFAULT_NAMES = "abcdefghijklmnopqrstuvwxyz"


class ElectionError(ValueError):
    """Roster or vote list violates an election invariant."""


class WinnerModel(Enum):
    """UNIQUE: winning means being the sole winner; NONUNIQUE: being a co-winner."""

    UNIQUE = "unique"
    NONUNIQUE = "nonunique"

    @classmethod
    def parse(cls, text: str) -> "WinnerModel":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown winner model {text!r}; expected unique or nonunique") from None

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Election:
    """Ordered candidate names plus an ordered, nonempty sequence of votes."""

    names: tuple[str, ...]
    votes: tuple[Tournament, ...]

    def __post_init__(self):
        if not self.votes:
            raise ElectionError("an election needs at least one vote")
        m = len(self.names)
        if m == 0:
            raise ElectionError("an election needs at least one candidate")
        if len(set(self.names)) != m:
            raise ElectionError("candidate names must be distinct")
        for name in self.names:
            if not name or any(ch.isspace() for ch in name) or not name.isascii():
                raise ElectionError(f"candidate name {name!r} must be a nonempty ASCII token")
        for idx, vote in enumerate(self.votes):
            if vote.m != m:
                raise ElectionError(
                    f"vote {idx} has {vote.m} candidates, roster has {m}")

    @classmethod
    def of(cls, votes, names=None) -> "Election":
        """Convenience constructor; names default to a, b, c, ..."""
        votes = tuple(votes)
        if names is None:
            m = votes[0].m if votes else 0
            if m <= len(_DEFAULT_NAMES):
                names = tuple(_DEFAULT_NAMES[:m])
            else:
                names = tuple(f"c{i}" for i in range(m))
        return cls(tuple(names), votes)

    @property
    def m(self) -> int:
        return len(self.names)

    @property
    def n(self) -> int:
        return len(self.votes)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ElectionError(f"unknown candidate {name!r}") from None


@functools.lru_cache(maxsize=1 << 17)
def _approvals(rule: SolutionRule, vote: Tournament) -> frozenset[int]:
    # Memoized per (rule, tournament): brute-force solvers re-score thousands
    # of modified elections that share most of their votes.
    return apply_rule(rule, vote)


def ts_score(e: Election, rule: SolutionRule, c: int) -> int:
    """Number of votes whose solution set contains ``c``."""
    if not 0 <= c < e.m:
        raise ElectionError(f"unknown candidate index {c}")
    return sum(1 for vote in e.votes if c in _approvals(rule, vote))


def score_vector(e: Election, rule: SolutionRule) -> tuple[int, ...]:
    scores = [0] * e.m
    for vote in e.votes:
        for c in _approvals(rule, vote):
            scores[c] += 1
    return tuple(scores)


def winners(e: Election, rule: SolutionRule) -> frozenset[int]:
    """The nonempty argmax of the approval scores."""
    scores = score_vector(e, rule)
    best = max(scores)
    return frozenset(c for c, s in enumerate(scores) if s == best)


def wins(e: Election, rule: SolutionRule, p: int, model: WinnerModel) -> bool:
    if not 0 <= p < e.m:
        raise ElectionError(f"unknown candidate index {p}")
    won = winners(e, rule)
    if model is WinnerModel.UNIQUE:
        return won == frozenset((p,))
    return p in won


def dichotomize(e: Election, rule: SolutionRule) -> tuple[frozenset[int], ...]:
    """Per-vote approved sets; approval-counting these reproduces the winners."""
    return tuple(_approvals(rule, vote) for vote in e.votes)


def concat(e1: Election, e2: Election) -> Election:
    """Join two elections over the same roster by concatenating their votes."""
    if e1.names != e2.names:
        raise ElectionError("cannot concatenate elections with different rosters")
    return Election(e1.names, e1.votes + e2.votes)


def relabel(e: Election, perm) -> Election:
    """Rename candidate indices through ``perm`` in every vote (old i becomes perm[i])."""
    perm = tuple(perm)
    names = [""] * e.m
    for i, name in enumerate(e.names):
        names[perm[i]] = name
    return Election(tuple(names), tuple(v.relabel(perm) for v in e.votes))


def random_election(m: int, n: int, rng: random.Random, names=None) -> Election:
    return Election.of(tuple(random_tournament(m, rng) for _ in range(n)), names)
