"""Tournament solutions: Copeland set, top cycle, uncovered set.

Each solution maps a tournament to a nonempty candidate subset.  A uniform
rule value dispatches between them so scoring, auditors and solvers can be
written once and quantified over the rule.
"""

from __future__ import annotations

from enum import Enum

from .tournament import Tournament, condensation_masks, iter_bits


class SolutionRule(Enum):
    """Tag selecting one of the three supported tournament solutions."""

    TC = "tc"
    CO = "co"
    UC = "uc"

    @classmethod
    def parse(cls, text: str) -> "SolutionRule":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown rule {text!r}; expected one of tc, co, uc") from None

    def __str__(self):
        return self.value


def copeland_mask(rows, m: int) -> int:
    """Bitmask of the candidates attaining the maximum outdegree."""
    best = -1
    mask = 0
    for i in range(m):
        d = rows[i].bit_count()
        if d > best:
            best = d
            mask = 1 << i
        elif d == best:
            mask |= 1 << i
    return mask


def top_cycle_mask(rows, m: int) -> int:
    """Bitmask of the minimal set with all arcs outgoing to its complement.

    This is the first component of the condensation: the smallest prefix of
    the outdegree-sorted candidates whose total outdegree accounts for all
    internal pairs plus every arc to the outside.
    """
    order = sorted(range(m), key=lambda i: -rows[i].bit_count())
    running = 0
    mask = 0
    for k, v in enumerate(order, 1):
        running += rows[v].bit_count()
        mask |= 1 << v
        if running == k * (k - 1) // 2 + k * (m - k):
            return mask
    return mask


def uncovered_mask(rows, m: int) -> int:
    """Bitmask of all kings: candidates reaching everyone in at most two steps."""
    full = (1 << m) - 1
    mask = 0
    for i in range(m):
        reach = rows[i] | 1 << i
        rest = rows[i]
        while rest:
            low = rest & -rest
            reach |= rows[low.bit_length() - 1]
            rest ^= low
        if reach == full:
            mask |= 1 << i
    return mask


_MASK_FN = {
    SolutionRule.CO: copeland_mask,
    SolutionRule.TC: top_cycle_mask,
    SolutionRule.UC: uncovered_mask,
}


def solution_mask(rule: SolutionRule, rows, m: int) -> int:
    return _MASK_FN[rule](rows, m)


def copeland_set(t: Tournament) -> frozenset[int]:
    """Candidates of maximum outdegree."""
    return frozenset(iter_bits(copeland_mask(t.rows, t.m)))


def top_cycle(t: Tournament) -> frozenset[int]:
    """First component of the condensation."""
    return frozenset(iter_bits(top_cycle_mask(t.rows, t.m)))


def uncovered_set(t: Tournament) -> frozenset[int]:
    """All kings of the tournament; never empty."""
    return frozenset(iter_bits(uncovered_mask(t.rows, t.m)))


def apply_rule(rule: SolutionRule, t: Tournament) -> frozenset[int]:
    """Dispatch ``rule`` on ``t``; the result is a nonempty candidate set."""
    return frozenset(iter_bits(_MASK_FN[rule](t.rows, t.m)))


# Re-exported so callers that already work on raw rows can reuse it.
__all__ = [
    "SolutionRule",
    "apply_rule",
    "copeland_mask",
    "copeland_set",
    "condensation_masks",
    "solution_mask",
    "top_cycle",
    "top_cycle_mask",
    "uncovered_mask",
    "uncovered_set",
]
