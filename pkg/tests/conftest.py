import pytest

from dbakit.concepts import build_proto_dba, build_semi_dba
from dbakit.context import FormalContext
from dbakit.dba import boolean_power, from_boolean
from dbakit.generate import seeded_contexts
from dbakit.samples import survey_context

SMALL_SEED = 20241


@pytest.fixture(scope="session")
def survey():
    return survey_context()


@pytest.fixture(scope="session")
def survey_proto(survey):
    return build_proto_dba(survey)


@pytest.fixture(scope="session")
def survey_semi(survey):
    return build_semi_dba(survey)


@pytest.fixture(scope="session")
def small_contexts():
    return seeded_contexts(SMALL_SEED, 12, 3, 3)


@pytest.fixture(scope="session")
def small_algebras(small_contexts):
    out = []
    for ctx in small_contexts:
        out.append(build_proto_dba(ctx))
        out.append(build_semi_dba(ctx))
    return out


@pytest.fixture(scope="session")
def boolean_dbas():
    return [from_boolean(boolean_power(k)) for k in range(4)]


def ctx_from_rows(rows, objects=None, attributes=None):
    """Build a context from strings of 'X' and '.'."""
    objects = objects or [f"g{i + 1}" for i in range(len(rows))]
    attributes = attributes or [f"m{j + 1}" for j in range(len(rows[0]) if rows else 0)]
    return FormalContext.from_matrix(objects, attributes, [[c == "X" for c in r] for r in rows])


# one summary line per acceptance criterion

_criteria: dict[str, tuple[str, float]] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.outcome == "failed":
        prev = _criteria.get(name)
        if prev is None or prev[0] == "PASS":
            _criteria[name] = ("PASS" if report.passed else "FAIL", report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_")[2])):
        outcome, secs = _criteria[name]
        number, label = name.split("_")[2], " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"criterion {number} ({label}): {outcome} [{secs:.2f}s]")
