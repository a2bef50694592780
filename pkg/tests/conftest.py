import itertools
import math

import numpy as np
import pytest

from entanglement_aep.tensor_core import MultipartiteState


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)


def dense_reduced(psi: MultipartiteState, keep) -> np.ndarray:
    """Reduced density matrix by explicit summation over basis strings."""
    dims = psi.dims
    keep = sorted(keep)
    drop = [j for j in range(len(dims)) if j not in keep]
    dk = math.prod(dims[j] for j in keep)
    out = np.zeros((dk, dk), dtype=complex)
    tens = psi.tensor()
    keep_idx = list(itertools.product(*[range(dims[j]) for j in keep]))
    for rest in itertools.product(*[range(dims[j]) for j in drop]):
        vec = np.empty(dk, dtype=complex)
        for a, ki in enumerate(keep_idx):
            full = [0] * len(dims)
            for j, v in zip(keep, ki):
                full[j] = v
            for j, v in zip(drop, rest):
                full[j] = v
            vec[a] = tens[tuple(full)]
        out += np.outer(vec, vec.conj())
    return out


def plain_entropy(w, alpha=1.0) -> float:
    """Reference Renyi entropy by the textbook formula."""
    w = np.asarray(w, dtype=float)
    w = w[w > 1e-15]
    w = w / w.sum()
    if alpha == 1.0:
        return float(-sum(x * math.log2(x) for x in w))
    if alpha == 0.0:
        return math.log2(len(w))
    return math.log2(sum(x**alpha for x in w)) / (1 - alpha)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("]")[0].split()[-1])):
            terminalreporter.write_line(line)
