from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("repo", derandomize=True, deadline=None, print_blob=True)
settings.load_profile("repo")

ROOT = Path(__file__).resolve().parent.parent
S2_CONFIG = ROOT / "configs" / "s2_sqrt2.cfg"


@pytest.fixture(scope="session")
def s2_config():
    from cgindex.config import load_config
    return load_config(str(S2_CONFIG))


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance verdict; the terminal summary prints them in order."""
    def record(number: int, ok: bool, detail: str = "") -> bool:
        ACCEPTANCE[number] = (bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in range(1, 9):
        if number not in ACCEPTANCE:
            tr.write_line(f"criterion {number}: not run")
            continue
        ok, detail = ACCEPTANCE[number]
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
