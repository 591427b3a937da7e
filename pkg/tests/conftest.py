import itertools

import numpy as np
import pytest

from gamma_stft import convex as cg


def brute_vertices(A, b, tol=1e-9):
    """Vertex enumeration: solve every d x d subsystem, keep the feasible points."""
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    d = A.shape[1]
    out = []
    for rows in itertools.combinations(range(A.shape[0]), d):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        v = np.linalg.solve(M, b[list(rows)])
        if np.all(A @ v <= b + tol):
            out.append(v)
    return np.array(out)


def random_hpolytope(rng, d, m=None):
    while True:
        m = m or int(rng.integers(d + 1, 11))
        A = rng.standard_normal((m, d))
        center = rng.uniform(-1, 1, d)
        b = A @ center + rng.uniform(0.1, 2.0, m)
        try:
            return cg.HPolytope(A, b)
        except ValueError:
            m = None


def random_body(rng, d, depth=0):
    kind = rng.integers(0, 6 if depth < 2 else 3)
    if kind == 0:
        return cg.Ball(rng.uniform(-2, 2, d), rng.uniform(0, 2))
    if kind == 1:
        return cg.VPolytope(rng.uniform(-2, 2, (int(rng.integers(1, 6)), d)))
    if kind == 2:
        return random_hpolytope(rng, d)
    if kind == 3:
        return cg.Scaled(rng.uniform(0, 3), random_body(rng, d, depth + 1))
    if kind == 4:
        return cg.Reflected(random_body(rng, d, depth + 1))
    return cg.MinkowskiSum(tuple(random_body(rng, d, depth + 1) for _ in range(int(rng.integers(2, 4)))))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed after the test summary
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
