"""Tournaments: complete asymmetric relations stored as bit-adjacency rows.

Candidates are plain integer indices in ``[0, m)``; named rosters live one
level up in the election layer.  ``rows[i]`` is a bitmask whose bit ``j`` is
set iff candidate ``i`` beats candidate ``j``.  Tournaments are immutable
values: every operation returns a fresh instance, so they can be shared
freely across parallel workers.
"""

from __future__ import annotations

import random

CandidateId = int

# Exhaustive searches walk 2**(m*(m-1)/2) labeled tournaments, so they only
# ever see tiny m; evaluation paths (scoring parsed elections) may be larger.
MAX_ENUMERATION_CANDIDATES = 64
MAX_CANDIDATES = 10_000


class TournamentError(ValueError):
    """Relation input violates completeness, asymmetry or a size bound."""


def iter_bits(mask: int):
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def arc_pairs(m: int) -> tuple[tuple[int, int], ...]:
    """Unordered candidate pairs (i, j) with i < j, in lexicographic order.

    This is the canonical arc ordering used by every enumeration path, so
    brute-force traversals are reproducible.
    """
    return tuple((i, j) for i in range(m) for j in range(i + 1, m))


class Condensation:
    """Ordered maximal strongly connected components of a tournament.

    Every candidate of ``components[i]`` beats every candidate of
    ``components[j]`` for i < j; each component induces a strongly connected
    subtournament; the ordering is unique.
    """

    __slots__ = ("components",)

    def __init__(self, components: tuple[frozenset[int], ...]):
        self.components = components

    def __eq__(self, other):
        return isinstance(other, Condensation) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __repr__(self):
        parts = ["{" + ",".join(map(str, sorted(c))) + "}" for c in self.components]
        return "Condensation(%s)" % " > ".join(parts)


class Tournament:
    """A complete asymmetric relation over candidates ``0..m-1``."""

    __slots__ = ("m", "rows", "_hash")

    def __init__(self, rows):
        rows = tuple(rows)
        m = len(rows)
        if not 1 <= m <= MAX_CANDIDATES:
            raise TournamentError(f"candidate count {m} outside [1, {MAX_CANDIDATES}]")
        self.m = m
        self.rows = rows
        self._hash = None

    # -- construction ------------------------------------------------------

    @classmethod
    def build(cls, m: int, arcs) -> "Tournament":
        """Validating constructor from a set of ordered (winner, loser) pairs.

        Exactly one orientation per unordered pair must be given; offending
        pairs are named in the error.
        """
        if m < 1:
            raise TournamentError(f"candidate count {m} outside [1, {MAX_CANDIDATES}]")
        rows = [0] * m
        seen = [0] * m
        for a, b in arcs:
            if a == b:
                raise TournamentError(f"self-loop on candidate {a}")
            if not (0 <= a < m and 0 <= b < m):
                raise TournamentError(f"arc ({a}, {b}) outside candidate range [0, {m})")
            if seen[a] >> b & 1:
                if rows[a] >> b & 1:
                    raise TournamentError(f"duplicated arc for pair ({min(a, b)}, {max(a, b)})")
                raise TournamentError(f"both orientations given for pair ({min(a, b)}, {max(a, b)})")
            seen[a] |= 1 << b
            seen[b] |= 1 << a
            rows[a] |= 1 << b
        full = (1 << m) - 1
        for i in range(m):
            missing = full & ~seen[i] & ~(1 << i)
            if missing:
                j = next(iter_bits(missing))
                raise TournamentError(f"missing orientation for pair ({min(i, j)}, {max(i, j)})")
        return cls(rows)

    def validate(self) -> None:
        """Recheck irreflexivity, completeness and asymmetry."""
        m, rows = self.m, self.rows
        full = (1 << m) - 1
        for i in range(m):
            if rows[i] >> i & 1:
                raise TournamentError(f"self-loop on candidate {i}")
            if rows[i] & ~full:
                raise TournamentError(f"row {i} refers to candidates outside [0, {m})")
        for i in range(m):
            for j in range(i + 1, m):
                fwd = rows[i] >> j & 1
                bwd = rows[j] >> i & 1
                if fwd == bwd:
                    kind = "both orientations" if fwd else "missing orientation"
                    raise TournamentError(f"{kind} for pair ({i}, {j})")

    # -- basic queries -----------------------------------------------------

    def beats(self, a: int, b: int) -> bool:
        return bool(self.rows[a] >> b & 1)

    def outdegree(self, c: int) -> int:
        return self.rows[c].bit_count()

    def indegree(self, c: int) -> int:
        return self.m - 1 - self.rows[c].bit_count()

    def out_neighbors(self, c: int) -> frozenset[int]:
        self._check_candidate(c)
        return frozenset(iter_bits(self.rows[c]))

    def in_neighbors(self, c: int) -> frozenset[int]:
        self._check_candidate(c)
        return frozenset(i for i in range(self.m) if self.rows[i] >> c & 1)

    def in_mask(self, c: int) -> int:
        mask = 0
        for i in range(self.m):
            mask |= (self.rows[i] >> c & 1) << i
        return mask

    def _check_candidate(self, c):
        if not 0 <= c < self.m:
            raise TournamentError(f"candidate {c} outside [0, {self.m})")

    # -- derived values ----------------------------------------------------

    def reverse_arc(self, a: int, b: int) -> "Tournament":
        """Flip the orientation between ``a`` and ``b``; the input is unchanged."""
        if a == b:
            raise TournamentError(f"cannot reverse a self-pair on candidate {a}")
        self._check_candidate(a)
        self._check_candidate(b)
        rows = list(self.rows)
        if rows[a] >> b & 1:
            rows[a] &= ~(1 << b)
            rows[b] |= 1 << a
        else:
            rows[b] &= ~(1 << a)
            rows[a] |= 1 << b
        return Tournament(rows)

    def induced(self, keep) -> tuple["Tournament", tuple[int, ...]]:
        """Restrict the relation to ``keep``.

        Returns the subtournament together with the remapping table: new
        index ``i`` corresponds to original candidate ``mapping[i]``.
        """
        mapping = tuple(sorted(set(keep)))
        if not mapping:
            raise TournamentError("cannot induce on an empty candidate set")
        for c in mapping:
            self._check_candidate(c)
        rows = []
        for a in mapping:
            row = 0
            for new_j, b in enumerate(mapping):
                row |= (self.rows[a] >> b & 1) << new_j
            rows.append(row)
        return Tournament(rows), mapping

    def relabel(self, perm) -> "Tournament":
        """Apply the index permutation ``perm`` (old index i becomes perm[i])."""
        perm = tuple(perm)
        rows = [0] * self.m
        for i in range(self.m):
            row = 0
            for j in iter_bits(self.rows[i]):
                row |= 1 << perm[j]
            rows[perm[i]] = row
        return Tournament(rows)

    def source(self) -> int | None:
        """The unique candidate beating all others, if one exists."""
        want = self.m - 1
        for i in range(self.m):
            if self.rows[i].bit_count() == want:
                return i
        return None

    def condense(self) -> Condensation:
        comps = [frozenset(iter_bits(mask)) for mask in condensation_masks(self.rows, self.m)]
        return Condensation(tuple(comps))

    def is_regular(self) -> bool:
        """True iff every candidate's out/in-degree difference is at most 1."""
        m = self.m
        return all(abs(2 * row.bit_count() - (m - 1)) <= 1 for row in self.rows)

    # -- value semantics ---------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Tournament) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        arcs = ",".join(f"{i}>{j}" for i in range(self.m) for j in iter_bits(self.rows[i]))
        return f"Tournament({self.m}; {arcs})"


def condensation_masks(rows, m: int) -> list[int]:
    """Component bitmasks of the condensation, strongest component first.

    Candidates of an earlier component strictly out-rank every candidate of a
    later one in outdegree, so sorting by outdegree groups the components
    contiguously; a prefix of the sorted order is a union of leading
    components exactly when its total outdegree equals the count of internal
    pairs plus all arcs to the outside.
    """
    order = sorted(range(m), key=lambda i: (-rows[i].bit_count(), i))
    comps = []
    running = 0
    current = 0
    for k, v in enumerate(order, 1):
        running += rows[v].bit_count()
        current |= 1 << v
        if running == k * (k - 1) // 2 + k * (m - k):
            comps.append(current)
            current = 0
    return comps


# -- stock constructions ----------------------------------------------------


def transitive(m: int, order=None) -> Tournament:
    """The transitive tournament where earlier entries of ``order`` beat later ones."""
    if order is None:
        order = range(m)
    order = tuple(order)
    rows = [0] * m
    for pos, a in enumerate(order):
        for b in order[pos + 1:]:
            rows[a] |= 1 << b
    return Tournament(rows)


def source_tournament(m: int, s: int) -> Tournament:
    """``s`` beats everyone; the rest is filled canonically (smaller index beats larger)."""
    rest = [i for i in range(m) if i != s]
    return transitive(m, [s] + rest)


def cyclic_regular(m: int) -> Tournament:
    """The rotational tournament on odd ``m``: i beats the next (m-1)/2 candidates mod m."""
    if m < 1 or m % 2 == 0:
        raise TournamentError(f"cyclic construction needs an odd candidate count, got {m}")
    half = (m - 1) // 2
    rows = []
    for i in range(m):
        row = 0
        for step in range(1, half + 1):
            row |= 1 << ((i + step) % m)
        rows.append(row)
    return Tournament(rows)


def near_regular(m: int) -> Tournament:
    """A tournament with every out/in-degree difference at most 1, any ``m``.

    Odd m is the rotational construction; even m extends the odd one on
    m-1 candidates by a final vertex that beats the even-indexed ones.
    """
    if m % 2 == 1:
        return cyclic_regular(m)
    base = cyclic_regular(m - 1)
    rows = list(base.rows)
    last = m - 1
    last_row = 0
    for i in range(m - 1):
        if i % 2 == 0:
            last_row |= 1 << i
        else:
            rows[i] |= 1 << last
    rows.append(last_row)
    return Tournament(rows)


def random_tournament(m: int, rng: random.Random) -> Tournament:
    """Uniformly random labeled tournament drawn from ``rng``."""
    rows = [0] * m
    for i, j in arc_pairs(m):
        if rng.getrandbits(1):
            rows[i] |= 1 << j
        else:
            rows[j] |= 1 << i
    return Tournament(rows)


# -- enumeration -------------------------------------------------------------


def tournament_from_code(m: int, code: int) -> Tournament:
    """Decode a tournament from its arc-orientation code.

    Bit k of ``code`` orients the k-th pair of :func:`arc_pairs`; a set bit
    means the smaller index beats the larger one.
    """
    return Tournament(rows_from_code(m, arc_pairs(m), code))


def rows_from_code(m: int, pairs, code: int) -> list[int]:
    rows = [0] * m
    for k, (i, j) in enumerate(pairs):
        if code >> k & 1:
            rows[i] |= 1 << j
        else:
            rows[j] |= 1 << i
    return rows


def tournament_code(t: Tournament) -> int:
    """Inverse of :func:`tournament_from_code`; total order used to break witness ties."""
    code = 0
    for k, (i, j) in enumerate(arc_pairs(t.m)):
        if t.rows[i] >> j & 1:
            code |= 1 << k
    return code


def all_tournaments(m: int):
    """Yield every labeled tournament on ``m`` candidates in code order."""
    if m > MAX_ENUMERATION_CANDIDATES:
        raise TournamentError(
            f"enumeration limited to {MAX_ENUMERATION_CANDIDATES} candidates, got {m}")
    pairs = arc_pairs(m)
    for code in range(1 << len(pairs)):
        yield Tournament(rows_from_code(m, pairs, code))
