import cmath
import math

import numpy as np
import pytest

from vofdm import FrameParams, SymbolGrid


def naive_dft(v, sign=-1):
    """Direct O(K^2) unitary DFT with plain Python complex arithmetic."""
    K = len(v)
    scale = 1 / math.sqrt(K)
    return np.array(
        [scale * sum(v[n] * cmath.exp(sign * 2j * math.pi * n * k / K) for n in range(K)) for k in range(K)]
    )


def naive_modulate(vectors):
    """Componentwise IDFT across k, then block interleave with explicit loops."""
    N, M = vectors.shape
    cols = [naive_dft([vectors[k, m] for k in range(N)], sign=+1) for m in range(M)]
    out = np.zeros(M * N, dtype=complex)
    for n2 in range(N):
        for n1 in range(M):
            out[n2 * M + n1] = cols[n1][n2]
    return out


def random_grid(rng, M, N, scale=1.0):
    vec = rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M))
    return SymbolGrid(FrameParams(M, N), scale * vec)


def bpsk(rng, size):
    return rng.choice([-1.0, 1.0], size=size).astype(complex)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_RESULTS = []


def record(name, passed, detail=""):
    ACCEPTANCE_RESULTS.append((name, bool(passed), detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
