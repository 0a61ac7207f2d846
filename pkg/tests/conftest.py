import numpy as np
import pytest

from sqkd import attack, qmath, sim


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timed tests measure steady state."""
    qmath.eigh(np.eye(2))
    sim.run(sim.SimulationConfig(attack.identity_attack(), 10, seed=0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = []


@pytest.fixture
def record():
    """Log one acceptance line; collected lines print in the terminal summary."""
    def _record(n, ok, detail):
        line = f"[{n}] {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s[1:s.index("]")])):
            terminalreporter.write_line(line)
