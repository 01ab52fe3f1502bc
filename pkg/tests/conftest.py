import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "package",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("package")


FOUR_NODE_COLOURING = """\
node(a). node(b). node(c). node(d).
edge(a,b). edge(b,c). edge(b,d). edge(c,d).
col(X,red) | col(X,yellow) | col(X,green) :- node(X).
:- edge(X,Y), col(X,C), col(Y,C).
"""


@pytest.fixture
def four_node_colouring() -> str:
    """The diamond-graph 3-colouring instance used as a golden case in
    several suites: 4 nodes, 4 edges, one disjunctive rule and one
    constraint."""
    return FOUR_NODE_COLOURING
