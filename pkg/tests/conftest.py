import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=list(HealthCheck))
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SMALL_GROUPS = [
    "cyclic:1",
    "cyclic:2",
    "cyclic:7",
    "cyclic:12",
    "dihedral:1",
    "dihedral:2",
    "dihedral:5",
    "dihedral:6",
    "symmetric:3",
    "symmetric:4",
    "elem2:0",
    "elem2:3",
    "product(cyclic:2,cyclic:4)",
    "product(symmetric:3,cyclic:5)",
    "product(elem2:2,dihedral:3)",
    "dicyclic:2",
    "dicyclic:3",
    "metacyclic:8.2.5",
]


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
