import os

import pytest

from h3nr import catalog
from h3nr import groups as grp
from h3nr import resolutions as res


def load(name):
    return catalog.entry(name).load()


def rg(name):
    """Default resolution of a catalog group, shared through the default cache."""
    return res.default_cache.get(load(name))


RECORDS = {}


def record(name):
    """Full pipeline record for a catalog group, computed once per session."""
    if name not in RECORDS:
        RECORDS[name] = catalog.run_pipeline(catalog.entry(name))
    return RECORDS[name]


def small_group_names(max_order=16):
    return sorted((e.name for e in catalog.load_catalog().values()
                   if e.name.startswith("G_") and e.order <= max_order),
                  key=lambda n: tuple(int(x) for x in n.split("_")[1:]))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


# criterion number -> list of (test id, outcome)
CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        CRITERIA.setdefault(marker.args[0], []).append((item.name, rep.outcome, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    from test_acceptance import DESCRIPTIONS
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        results = CRITERIA[k]
        outcomes = {o for _, o, _ in results}
        if "failed" in outcomes:
            verdict = "FAIL"
        elif outcomes == {"skipped"}:
            verdict = "SKIP"
        else:
            verdict = "PASS"
        secs = sum(d for _, _, d in results)
        failed = [n for n, o, _ in results if o == "failed"]
        extra = f"  failed: {', '.join(failed)}" if failed else ""
        terminalreporter.write_line(f"criterion {k}: {verdict}  {DESCRIPTIONS[k]}  "
                                    f"({len(results)} checks, {secs:.0f}s){extra}")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("H3NR_EXTENDED"):
        return
    skip = pytest.mark.skip(reason="extended tier; set H3NR_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def s3():
    return grp.from_permutations([[1, 0, 2], [1, 2, 0]])
