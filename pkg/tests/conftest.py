import sys
from pathlib import Path

import pytest

from tsapproval import Tournament

sys.path.insert(0, str(Path(__file__).parent))

# The four-candidate tournament with arcs a>b, b>{c,d}, c>{a,d}, d>a.
# Its Copeland set is {b,c}, its uncovered set {a,b,c}, and it is strongly
# connected; the single-vote election over it separates the three rules.
T_STAR_ARCS = {(0, 1), (1, 2), (1, 3), (2, 0), (2, 3), (3, 0)}


@pytest.fixture
def t_star() -> Tournament:
    return Tournament.build(4, T_STAR_ARCS)


@pytest.fixture
def triangle() -> Tournament:
    return Tournament.build(3, {(0, 1), (1, 2), (2, 0)})
