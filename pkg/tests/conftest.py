import pytest


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line straight to the terminal, then assert."""

    def emit(label: str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}" + (f" :: {detail}" if detail else ""))
        assert ok, f"{label}: {detail}"

    return emit
