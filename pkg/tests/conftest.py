from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from flagdesigns import atlas, families, geom

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def table1_designs():
    return {rec.line: families.table1_design(rec.line) for rec in families.TABLE1}


@pytest.fixture(scope="session")
def example_designs():
    """name -> (design, group) for every desk-scale family instance."""
    out = {}
    for n, q in ((3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (5, 2)):
        out[f"pg-{n}-{q}"] = (geom.pg_design(n, q), atlas.psl_group(n, q))
    for n, q in ((3, 4), (3, 8), (4, 3)):
        out[f"pg-lines-{n}-{q}"] = (geom.pg_line_design(n, q), atlas.psl_group(n, q))
    for q in (3, 4):
        out[f"hermitian-{q}"] = (geom.hermitian_unital(q), atlas.psu3_group(q))
    for q in (8, 16, 32):
        out[f"wbs-{q}"] = families.wbs_design(q)
    for q in (8, 32):
        out[f"suzuki-{q}"] = families.suzuki_design(q)
    return out


@pytest.fixture(scope="session")
def all_designs(table1_designs, example_designs):
    out = {f"table1-{line}": (d, g) for line, (d, g, _) in table1_designs.items()}
    out.update(example_designs)
    return out
