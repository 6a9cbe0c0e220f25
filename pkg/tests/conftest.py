import contextlib

import numpy as np
import pytest

from sukp.instance import SukpInstance, generate_instance

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line[1])


@pytest.fixture
def acceptance(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion."""
    log = request.config.stash[_ACCEPTANCE]

    @contextlib.contextmanager
    def criterion(number, title):
        detail = {}
        try:
            yield detail
        except BaseException as exc:
            if isinstance(exc, pytest.skip.Exception):
                log.append((number, f"[{number:2d}] SKIP  {title}: {exc}"))
            else:
                msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
                log.append((number, f"[{number:2d}] FAIL  {title}: {msg}"))
            raise
        extra = ", ".join(f"{k}={v}" for k, v in detail.items())
        log.append((number, f"[{number:2d}] PASS  {title}" + (f" ({extra})" if extra else "")))

    return criterion


@pytest.fixture
def motif():
    """Five elements; U0={e0,e2,e3} and U1={e0,e3,e4} share e0 and e3, U2={e1}."""
    return SukpInstance.from_sets(
        profits=[30, 20, 10],
        weights=[4, 6, 2, 8, 5],
        items=[[0, 2, 3], [0, 3, 4], [1]],
        capacity=20,
    )


def random_instance(seed, m_range=(2, 12), n_range=(2, 12), density=0.3, ratio=None):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(*m_range, endpoint=True))
    n = int(rng.integers(*n_range, endpoint=True))
    density = max(density, max(m, n) / (m * n))
    if ratio is None:
        ratio = float(rng.choice([0.25, 0.5, 0.75]))
    return generate_instance(m, n, density, ratio, seed)


@pytest.fixture
def small_instances():
    return [random_instance(s) for s in range(25)]
