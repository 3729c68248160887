"""Flat text formats: elections, tournaments, witnesses, instances, reports.

All formats are line-oriented UTF-8.  Lines starting with ``#`` and blank
lines are ignored everywhere.  Election blocks are bit-exact: a header
``election <m> <n>``, one line of m whitespace-separated names (indices
assigned in order of appearance), then n blocks of m lines of m characters
from ``{0,1}``; row i column j is ``1`` iff candidate i beats j.  Canonical
output (what the formatters emit) round-trips byte-identically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .election import Election, ElectionError, WinnerModel
from .properties import TsCounterexample, TsCriterion, VcCounterexample, VcCriterion
from .solutions import SolutionRule
from .strategy import (
    BriberyInstance,
    BriberyProblem,
    ControlInstance,
    ControlProblem,
    StrategyAction,
    StrategyOutcome,
)
from .tournament import Tournament, TournamentError


class FormatError(ValueError):
    """Malformed input text; carries the offending line (and column) if known."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)
        self.line = line
        self.column = column


class _Cursor:
    """Iterates the logical (non-blank, non-comment) lines of a text."""

    def __init__(self, text: str):
        self.lines = [
            (i + 1, line.strip())
            for i, line in enumerate(text.splitlines())
            if line.strip() and not line.strip().startswith("#")
        ]
        self.pos = 0

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else (None, None)

    def next(self, what="line"):
        if self.pos >= len(self.lines):
            raise FormatError(f"unexpected end of input, expected {what}")
        item = self.lines[self.pos]
        self.pos += 1
        return item

    def at_end(self):
        return self.pos >= len(self.lines)


def _parse_matrix(cur: _Cursor, m: int) -> list[int]:
    rows = []
    row_lines = []
    for i in range(m):
        lineno, line = cur.next(f"matrix row {i}")
        if len(line) != m or any(ch not in "01" for ch in line):
            raise FormatError(f"matrix row must be {m} characters of 0/1", line=lineno)
        row_lines.append((lineno, line))
        rows.append(int(line[::-1], 2) if "1" in line else 0)
    for i in range(m):
        lineno, line = row_lines[i]
        if line[i] != "0":
            raise FormatError("diagonal entry must be 0", line=lineno, column=i + 1)
    for i in range(m):
        for j in range(i + 1, m):
            fwd = rows[i] >> j & 1
            bwd = rows[j] >> i & 1
            if fwd == bwd:
                kind = "both orientations set" if fwd else "missing orientation"
                raise FormatError(
                    f"{kind} for pair ({i}, {j})", line=row_lines[j][0], column=i + 1)
    return rows


def _parse_names(cur: _Cursor, m: int) -> tuple[str, ...]:
    lineno, line = cur.next("candidate names")
    names = tuple(line.split())
    if len(names) != m:
        raise FormatError(f"expected {m} candidate names, got {len(names)}", line=lineno)
    if len(set(names)) != m:
        raise FormatError("candidate names must be distinct", line=lineno)
    return names


def _matrix_lines(t: Tournament) -> list[str]:
    return ["".join("1" if t.rows[i] >> j & 1 else "0" for j in range(t.m))
            for i in range(t.m)]


def parse_election_block(cur: _Cursor, keyword: str = "election") -> Election:
    lineno, line = cur.next(f"{keyword} header")
    parts = line.split()
    if len(parts) != 3 or parts[0] != keyword:
        raise FormatError(f"expected header '{keyword} <m> <n>'", line=lineno)
    try:
        m, n = int(parts[1]), int(parts[2])
    except ValueError:
        raise FormatError(f"{keyword} header needs integer sizes", line=lineno) from None
    if m < 1:
        raise FormatError("candidate count must be at least 1", line=lineno)
    if n < 1:
        raise FormatError("an election needs at least one vote", line=lineno)
    names = _parse_names(cur, m)
    votes = tuple(Tournament(_parse_matrix(cur, m)) for _ in range(n))
    try:
        return Election(names, votes)
    except ElectionError as exc:
        raise FormatError(str(exc), line=lineno) from None


def parse_election(text: str) -> Election:
    cur = _Cursor(text)
    e = parse_election_block(cur)
    if not cur.at_end():
        lineno, _ = cur.peek()
        raise FormatError("trailing content after the election", line=lineno)
    return e


def format_election_block(e: Election, keyword: str = "election") -> str:
    parts = [f"{keyword} {e.m} {e.n}", " ".join(e.names)]
    for vote in e.votes:
        parts.append("")
        parts.extend(_matrix_lines(vote))
    return "\n".join(parts)


def format_election(e: Election) -> str:
    return format_election_block(e) + "\n"


def parse_tournament_block(cur: _Cursor) -> tuple[tuple[str, ...], Tournament]:
    lineno, line = cur.next("tournament header")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "tournament":
        raise FormatError("expected header 'tournament <m>'", line=lineno)
    try:
        m = int(parts[1])
    except ValueError:
        raise FormatError("tournament header needs an integer size", line=lineno) from None
    names = _parse_names(cur, m)
    try:
        return names, Tournament(_parse_matrix(cur, m))
    except TournamentError as exc:
        raise FormatError(str(exc), line=lineno) from None


def format_tournament_block(names, t: Tournament) -> str:
    return "\n".join([f"tournament {t.m}", " ".join(names)] + _matrix_lines(t))


# -- witnesses ----------------------------------------------------------------


def _header_fields(tokens):
    fields = {}
    for tok in tokens:
        if "=" not in tok:
            raise FormatError(f"malformed header field {tok!r}")
        key, value = tok.split("=", 1)
        fields[key] = value
    return fields


def format_ts_witness(w: TsCounterexample, names=None) -> str:
    if names is None:
        names = Election.of((w.tournament,)).names
    head = (f"witness ts {w.criterion} rule={w.rule} "
            f"candidate={names[w.candidate]}")
    if w.seed is not None:
        head += f" seed={w.seed}"
    return "\n".join([
        head,
        format_tournament_block(names, w.tournament),
        "",
        format_tournament_block(names, w.lifted),
    ]) + "\n"


def format_vc_witness(w: VcCounterexample) -> str:
    names = w.election.names
    head = f"witness vc {w.criterion} rule={w.rule}"
    if w.candidate is not None:
        head += f" candidate={names[w.candidate]}"
    if w.other is not None:
        head += f" other={names[w.other]}"
    if w.mapping is not None:
        head += " mapping=" + ",".join(str(i) for i in w.mapping)
    if w.seed is not None:
        head += f" seed={w.seed}"
    parts = [head, format_election_block(w.election)]
    if w.modified is not None:
        parts.append("")
        parts.append(format_election_block(w.modified))
    return "\n".join(parts) + "\n"


def format_witness(w) -> str:
    if isinstance(w, TsCounterexample):
        return format_ts_witness(w)
    return format_vc_witness(w)


def parse_witness(text: str):
    """Parse either witness flavor, dispatching on the header line."""
    cur = _Cursor(text)
    lineno, line = cur.next("witness header")
    tokens = line.split()
    if len(tokens) < 3 or tokens[0] != "witness":
        raise FormatError("expected header 'witness <ts|vc> <criterion> ...'", line=lineno)
    kind = tokens[1]
    fields = _header_fields(tokens[3:])
    rule = SolutionRule.parse(fields["rule"])
    seed = int(fields["seed"]) if "seed" in fields else None
    if kind == "ts":
        criterion = TsCriterion.parse(tokens[2])
        names, t = parse_tournament_block(cur)
        names2, lifted = parse_tournament_block(cur)
        if names != names2:
            raise FormatError("witness tournaments must share one roster", line=lineno)
        candidate = names.index(fields["candidate"])
        return TsCounterexample(rule, criterion, t, lifted, candidate, seed=seed)
    if kind == "vc":
        criterion = VcCriterion.parse(tokens[2])
        election = parse_election_block(cur)
        modified = None if cur.at_end() else parse_election_block(cur)
        candidate = election.index(fields["candidate"]) if "candidate" in fields else None
        other = election.index(fields["other"]) if "other" in fields else None
        mapping = None
        if "mapping" in fields:
            mapping = tuple(int(x) for x in fields["mapping"].split(","))
        return VcCounterexample(
            rule, criterion, election, modified, candidate, other, mapping, seed)
    raise FormatError(f"unknown witness kind {kind!r}", line=lineno)


# -- control / bribery instances and their outcomes ---------------------------


def format_action(action: StrategyAction, e: Election) -> str:
    if action.added_votes:
        return "add-votes " + " ".join(map(str, action.added_votes))
    if action.deleted_votes:
        return "delete-votes " + " ".join(map(str, action.deleted_votes))
    if action.added_candidates:
        return "add-candidates " + " ".join(e.names[c] for c in action.added_candidates)
    if action.deleted_candidates:
        return "delete-candidates " + " ".join(e.names[c] for c in action.deleted_candidates)
    if action.reversals:
        return "reverse " + " ".join(
            f"{v}:{e.names[a]}:{e.names[b]}" for v, a, b in action.reversals)
    return "none"


def parse_action(text: str, e: Election) -> StrategyAction:
    parts = text.split()
    if not parts:
        raise FormatError("empty action")
    kind, args = parts[0], parts[1:]
    if kind == "none":
        return StrategyAction()
    if kind == "add-votes":
        return StrategyAction(added_votes=tuple(int(x) for x in args))
    if kind == "delete-votes":
        return StrategyAction(deleted_votes=tuple(int(x) for x in args))
    if kind == "add-candidates":
        return StrategyAction(added_candidates=tuple(e.index(x) for x in args))
    if kind == "delete-candidates":
        return StrategyAction(deleted_candidates=tuple(e.index(x) for x in args))
    if kind == "reverse":
        revs = []
        for arg in args:
            v, a, b = arg.split(":")
            revs.append((int(v), e.index(a), e.index(b)))
        return StrategyAction(reversals=tuple(revs))
    raise FormatError(f"unknown action kind {kind!r}")


def format_strategy(inst, outcome: StrategyOutcome | None = None) -> str:
    e = inst.election
    head = (f"strategy {inst.problem} rule={inst.rule} model={inst.model} "
            f"distinguished={e.names[inst.p]} budget={inst.k}")
    parts = [head]
    if outcome is not None:
        parts.append(f"feasible {1 if outcome.feasible else 0}")
        parts.append(f"cost {outcome.cost}")
        if outcome.action is not None:
            parts.append("action " + format_action(outcome.action, e))
    parts.append(format_election_block(e))
    if isinstance(inst, ControlInstance):
        if inst.unregistered_votes:
            pool = Election(e.names, inst.unregistered_votes)
            parts.append("")
            parts.append(format_election_block(pool, keyword="pool"))
        if inst.unregistered_candidates:
            names = " ".join(e.names[c] for c in sorted(inst.unregistered_candidates))
            parts.append("unregistered-candidates " + names)
    return "\n".join(parts) + "\n"


def parse_strategy(text: str):
    """Parse an instance file; returns (instance, outcome_or_None)."""
    cur = _Cursor(text)
    lineno, line = cur.next("strategy header")
    tokens = line.split()
    if len(tokens) < 2 or tokens[0] != "strategy":
        raise FormatError("expected header 'strategy <problem> ...'", line=lineno)
    problem_text = tokens[1]
    fields = _header_fields(tokens[2:])
    rule = SolutionRule.parse(fields["rule"])
    model = WinnerModel.parse(fields["model"])
    budget = int(fields["budget"])

    feasible = None
    cost = 0
    action_text = None
    while True:
        _, nxt = cur.peek()
        if nxt is None or nxt.split()[0] not in ("feasible", "cost", "action"):
            break
        _, consumed = cur.next()
        key, _, rest = consumed.partition(" ")
        if key == "feasible":
            feasible = rest.strip() == "1"
        elif key == "cost":
            cost = int(rest)
        else:
            action_text = rest.strip()

    election = parse_election_block(cur)
    p = election.index(fields["distinguished"])
    pool: tuple[Tournament, ...] = ()
    unregistered: frozenset[int] = frozenset()
    while not cur.at_end():
        peek_line = cur.peek()[1]
        if peek_line.startswith("pool "):
            pool_block = parse_election_block(cur, keyword="pool")
            if pool_block.names != election.names:
                raise FormatError("pool roster must match the election roster")
            pool = pool_block.votes
        elif peek_line.startswith("unregistered-candidates"):
            _, consumed = cur.next()
            names = consumed.split()[1:]
            unregistered = frozenset(election.index(x) for x in names)
        else:
            raise FormatError("unexpected content in strategy file", line=cur.peek()[0])

    try:
        problem = ControlProblem.parse(problem_text)
        inst = ControlInstance(problem, rule, model, election, p, budget,
                               unregistered_votes=pool,
                               unregistered_candidates=unregistered)
    except ValueError:
        problem = BriberyProblem.parse(problem_text)
        if pool or unregistered:
            raise FormatError("bribery instances take no unregistered votes or candidates")
        inst = BriberyInstance(problem, rule, model, election, p, budget)

    outcome = None
    if feasible is not None:
        action = parse_action(action_text, election) if action_text else None
        outcome = StrategyOutcome(feasible, action, cost)
    return inst, outcome


# -- source-problem files ------------------------------------------------------


def parse_x3c(text: str):
    from .reductions import X3cInstance

    cur = _Cursor(text)
    lineno, line = cur.next("x3c header")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "x3c":
        raise FormatError("expected header 'x3c <kappa>'", line=lineno)
    kappa = int(parts[1])
    order: list[str] = []
    index: dict[str, int] = {}
    sets = []
    for _ in range(3 * kappa):
        set_lineno, set_line = cur.next("a 3-set line")
        tokens = set_line.split()
        if len(tokens) != 3:
            raise FormatError("each set line needs three element tokens", line=set_lineno)
        members = []
        for tok in tokens:
            if tok not in index:
                index[tok] = len(order)
                order.append(tok)
            members.append(index[tok])
        sets.append(tuple(sorted(members)))
    try:
        return X3cInstance(kappa, tuple(order), tuple(sets))
    except ValueError as exc:
        raise FormatError(str(exc), line=lineno) from None


def format_x3c(inst) -> str:
    lines = [f"x3c {inst.kappa}"]
    for s in inst.sets:
        lines.append(" ".join(inst.universe[i] for i in s))
    return "\n".join(lines) + "\n"


def parse_tds(text: str):
    from .reductions import TdsInstance, pad_tds

    cur = _Cursor(text)
    lineno, line = cur.next("tds header")
    parts = line.split()
    if len(parts) != 3 or parts[0] != "tds":
        raise FormatError("expected header 'tds <k> <non_king>'", line=lineno)
    k = int(parts[1])
    names, t = parse_tournament_block(cur)
    if parts[2] not in names:
        raise FormatError(f"non-king token {parts[2]!r} is not a vertex name", line=lineno)
    non_king = names.index(parts[2])
    try:
        if t.m >= (k + 1) * (2 * k + 4):
            return TdsInstance(t, k, non_king)
        return pad_tds(t, k, non_king)
    except ValueError as exc:
        raise FormatError(str(exc), line=lineno) from None


def format_tds(inst, names=None) -> str:
    t = inst.tournament
    if names is None:
        names = tuple(f"v{i}" for i in range(t.m))
    head = f"tds {inst.k} {names[inst.non_king]}"
    return head + "\n" + format_tournament_block(names, t) + "\n"


# -- run reports ---------------------------------------------------------------


@dataclass(frozen=True)
class RunReport:
    """Flat ordered key-value record of one CLI invocation."""

    fields: tuple[tuple[str, str], ...]

    def get(self, key: str) -> str | None:
        for k, v in self.fields:
            if k == key:
                return v
        return None


def format_report(report: RunReport) -> str:
    return "".join(f"{k}: {v}\n" for k, v in report.fields)


def parse_report(text: str) -> RunReport:
    fields = []
    for i, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        if ": " not in line:
            raise FormatError("expected 'key: value'", line=i + 1)
        key, value = line.split(": ", 1)
        fields.append((key, value))
    return RunReport(tuple(fields))
