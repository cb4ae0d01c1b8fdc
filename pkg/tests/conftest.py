import pytest

ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture
def record():
    """Collect one verdict per acceptance criterion for the terminal summary."""
    def _record(criterion: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0])):
        results = ACCEPTANCE[crit]
        ok = all(r for r, _ in results)
        failed = [d for r, d in results if not r]
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {crit}"
        if failed:
            line += f"  ({len(failed)}/{len(results)} sub-checks failed: {'; '.join(failed[:4])})"
        else:
            details = [d for _, d in results if d]
            if details:
                line += f"  {details[-1]}"
        terminalreporter.write_line(line)
