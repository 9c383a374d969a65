from functools import lru_cache

from cliffcayley import engine

HC = "H1,H2,C12,C21"
FULL = "H1,H2,P1,P2,C12,C21"


@lru_cache(maxsize=None)
def cached_group(gens: str, n: int | None = None, mode: str = engine.EXACT):
    return engine.enumerate_group(gens, n, mode)


# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[2:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}: {detail}")
