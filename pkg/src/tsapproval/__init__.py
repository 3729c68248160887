"""Approval voting over tournament ballots.

Votes are tournaments; a tournament solution (top cycle, Copeland set or
uncovered set) turns each vote into an implicit approval set, and the
candidates with the most approvals win.  The package adds axiom auditors
with replayable counterexamples, exact solvers for control and bribery
problems, and generators for the hardness-gadget instances, all behind one
rule-generic interface and a small CLI.
"""

from .tournament import (
    CandidateId,
    Condensation,
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
from .solutions import (
    SolutionRule,
    apply_rule,
    copeland_set,
    top_cycle,
    uncovered_set,
)
from .election import (
    Election,
    ElectionError,
    WinnerModel,
    concat,
    dichotomize,
    random_election,
    relabel,
    score_vector,
    ts_score,
    winners,
    wins,
)
from .properties import (
    AuditOutcome,
    InvalidWitnessError,
    TsCounterexample,
    TsCriterion,
    VcCounterexample,
    VcCriterion,
    audit_anonymity,
    audit_consistency,
    audit_majority,
    audit_neutrality,
    audit_pareto,
    audit_ts,
    audit_vc_monotonicity,
    build_monotonicity_counterexample,
    expected_ts_enumeration,
)
from .strategy import (
    BriberyInstance,
    BriberyProblem,
    ControlInstance,
    ControlProblem,
    InstanceError,
    SizeError,
    StrategyAction,
    StrategyOutcome,
    goal_holds,
    replay,
    solve_bribery,
    solve_bruteforce,
    solve_control,
    solve_dbra_tc_fast,
    solve_dcav_fast,
    solve_dcdv_fast,
    tc_entry_effects,
)
from .reductions import (
    GadgetError,
    TdsInstance,
    X3cInstance,
    cbra_cover_witness,
    pad_tds,
    tds_oracle,
    tds_reversal_witness,
    tds_to_dbra_uc,
    x3c_oracle,
    x3c_to_cbra_co,
    x3c_to_ccav,
    x3c_to_ccdv,
)

__version__ = "0.1.0"
