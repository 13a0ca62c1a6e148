import numpy as np
import pytest
from hypothesis import strategies as st

from souq.simplex import EmpiricalSecondOrder


@st.composite
def second_orders(draw, min_k=2, max_k=6, max_m=12):
    K = draw(st.integers(min_k, max_k))
    M = draw(st.integers(1, max_m))
    raw = draw(st.lists(st.lists(st.floats(0.0, 1.0), min_size=K, max_size=K), min_size=M, max_size=M))
    atoms = np.array(raw) + 1e-3
    atoms /= atoms.sum(axis=1, keepdims=True)
    if draw(st.booleans()):
        w = np.array(draw(st.lists(st.floats(0.01, 1.0), min_size=M, max_size=M)))
        w /= w.sum()
    else:
        w = None
    return EmpiricalSecondOrder(atoms, w)


@pytest.fixture
def gen():
    return np.random.Generator(np.random.PCG64(12345))


def random_q(gen, K=None, M=None):
    K = K or int(gen.integers(2, 8))
    M = M or int(gen.integers(1, 20))
    atoms = gen.dirichlet(np.ones(K), size=M)
    w = gen.dirichlet(np.ones(M)) if M > 1 else None
    return EmpiricalSecondOrder(atoms, w)
