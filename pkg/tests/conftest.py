import collections

import pytest

from kocover import builtin

CATALOG_NAMES = [
    "delta-2", "delta-3", "boundary-delta-3", "boundary-delta-4", "s1",
    "torus-7", "rp2-6", "s1-x-s1", "s1-x-s2",
]

SMALL_NAMES = ["s1", "delta-2", "boundary-delta-3", "torus-7", "rp2-6"]

# acceptance results: criterion id -> list of (label, passed, detail)
ACCEPTANCE = collections.defaultdict(list)


def record_acceptance(criterion: int, label: str, passed: bool, detail: str = ""):
    ACCEPTANCE[criterion].append((label, passed, detail))


@pytest.fixture(scope="session")
def catalog():
    return {name: builtin(name) for name in CATALOG_NAMES}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[crit]
        ok = all(p for _, p, _ in rows)
        n_fail = sum(1 for _, p, _ in rows if not p)
        status = "PASS" if ok else f"FAIL ({n_fail}/{len(rows)} instances failed)"
        tr.write_line(f"criterion {crit}: {status}")
        for label, passed, detail in rows:
            mark = "pass" if passed else "FAIL"
            line = f"  [{mark}] {label}"
            if detail and not passed:
                line += f" :: {detail}"
            tr.write_line(line)
