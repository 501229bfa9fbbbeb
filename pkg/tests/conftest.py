import numpy as np
import pytest

ACCEPTANCE_LINES = []


def random_unitary(rng, dim):
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_occupations(rng, n_particles, n_modes, species):
    if species == "fermion":
        occ = np.zeros(n_modes, dtype=int)
        occ[rng.choice(n_modes, size=n_particles, replace=False)] = 1
        return tuple(int(x) for x in occ)
    return tuple(int(x) for x in rng.multinomial(n_particles, [1.0 / n_modes] * n_modes))


def local_maxima(values):
    v = list(values)
    return sum(
        1 for a in range(len(v))
        if (a == 0 or v[a] > v[a - 1]) and (a == len(v) - 1 or v[a] > v[a + 1])
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
