import numpy as np
import pytest

from unitindex import Algebra, FockSpec, FockUnit, KernelSystem, SuperOp, fock_system

ACCEPTANCE_FILE = "test_acceptance.py"
_outcomes: dict[str, tuple[str, bool]] = {}


def expm_series(m: np.ndarray, terms: int = 60) -> np.ndarray:
    """Truncated Taylor series; an oracle independent of Pade approximation."""
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def m2():
    return Algebra((2,))


@pytest.fixture
def zero_system():
    alg = Algebra((2,))
    return KernelSystem(alg, ["omega"], {("omega", "omega"): SuperOp.zero(alg)}, "omega")


def scalar_fock(vectors: dict, betas: dict | None = None) -> KernelSystem:
    """Fock system over B = C from plain complex vectors."""
    alg = Algebra((1,))
    betas = betas or {}
    m = len(next(iter(vectors.values())))
    units = {
        k: FockUnit([alg.scalar(c) for c in v], alg.scalar(betas.get(k, 0.0)))
        for k, v in vectors.items()
    }
    return fock_system(FockSpec(alg, m, units))


def pytest_runtest_logreport(report):
    if ACCEPTANCE_FILE in report.nodeid and report.when == "call":
        _outcomes[report.nodeid] = (report.nodeid.split("::")[-1], report.passed)
    elif ACCEPTANCE_FILE in report.nodeid and report.failed:
        _outcomes[report.nodeid] = (report.nodeid.split("::")[-1], False)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in _outcomes.values():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
