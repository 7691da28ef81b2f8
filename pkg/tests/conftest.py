import pytest
from hypothesis import settings

from dgformal.complexes import truncated_heisenberg, heisenberg
from dgformal.dga import reduce_if_unital, induced_cohomology_algebra

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def theis():
    return truncated_heisenberg()


@pytest.fixture(scope="session")
def theis_reduced(theis):
    R = reduce_if_unital(theis)
    return R, induced_cohomology_algebra(R)


@pytest.fixture(scope="session")
def fheis():
    return heisenberg()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
