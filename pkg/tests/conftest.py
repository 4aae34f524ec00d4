import os
from collections import defaultdict

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=30, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA = defaultdict(list)

TITLES = {
    1: "Cantor string closed form vs truncated Dirichlet sum",
    2: "infinite-order total length",
    3: "Laurent principal coefficient",
    4: "power-series lift identity at s = 1",
    5: "prescribed-abscissae construction",
    6: "dimension recovery by prefix regression",
    7: "distance zeta at s = N equals the neighborhood volume",
    8: "shift property for the Cantor grill",
    9: "Monte Carlo determinism",
}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA[mark.args[0]].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        runs = _CRITERIA[n]
        bad = [name for name, ok in runs if not ok]
        verdict = "PASS" if not bad else "FAIL"
        tail = f" ({len(bad)}/{len(runs)} checks failed: {', '.join(bad[:4])}{', ...' if len(bad) > 4 else ''})" if bad else f" ({len(runs)} checks)"
        tr.write_line(f"{verdict} criterion {n}: {TITLES.get(n, '')}{tail}")
