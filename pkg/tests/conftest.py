import pytest

from hadamard_rw import kernels
from hadamard_rw.scalar import ScalarMode


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return kernels.BACKENDS[request.param]


@pytest.fixture(params=[ScalarMode.EXACT, ScalarMode.FLOAT64], ids=["exact", "float"])
def mode(request):
    return request.param


_ACCEPTANCE: dict[int, tuple[str, bool, float]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion: ``criterion(number, title)`` then run the body."""
    import time

    state = {}

    def begin(number, title):
        state.update(number=number, title=title, t0=time.perf_counter())

    yield begin
    if state:
        failed = request.node.rep_call.failed if hasattr(request.node, "rep_call") else True
        elapsed = time.perf_counter() - state["t0"]
        _ACCEPTANCE[state["number"]] = (state["title"], not failed, elapsed)
        line = f"criterion {state['number']}: {'PASS' if not failed else 'FAIL'} - {state['title']} ({elapsed:.2f}s)"
        print("\n" + line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok, elapsed = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title} ({elapsed:.2f}s)")
