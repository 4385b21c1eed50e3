import pytest

from walkcount.generators import (
    gen_barbell,
    gen_clique_expander,
    gen_clique_with_paths,
    gen_complete,
    gen_cycle,
    gen_random_regular_3,
    gen_subdivided_expander,
)


def bundled_graphs():
    """The fixture graphs shared by the oracle and acceptance suites."""
    return {
        "K2": gen_complete(2),
        "K3": gen_complete(3),
        "K4": gen_complete(4),
        "C4": gen_cycle(4),
        "C16": gen_cycle(16),
        "C64": gen_cycle(64),
        "barbell(4,4)": gen_barbell(4, 4),
        "barbell(6,6)": gen_barbell(6, 6),
        "clique_with_paths(5,3)": gen_clique_with_paths(5, 3),
        "clique_expander(4,3)": gen_clique_expander(4, 3, seed=2),
        "subdivided_expander(8,5)": gen_subdivided_expander(8, 5, seed=7),
        "random_regular_3(20)": gen_random_regular_3(20, seed=1),
    }


BUNDLED = bundled_graphs()


@pytest.fixture(params=sorted(BUNDLED), scope="session")
def bundled(request):
    return request.param, BUNDLED[request.param]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
