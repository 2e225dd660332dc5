import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mrfrank.graphs import EntityIndex, GraphSet, SparseMatrix


def random_sparse(rng, r, c, density=0.5, symmetric=False, nodiag=False):
    a = rng.random((r, c)) * (rng.random((r, c)) < density)
    if symmetric:
        a = a + a.T
    if nodiag:
        np.fill_diagonal(a, 0)
    rows, cols = np.nonzero(a)
    return SparseMatrix((r, c), rows, cols, a[rows, cols])


def random_instance(rng, max_dim=12):
    """Random small GraphSet + innovativeness vector for oracle tests."""
    n, m, k = rng.integers(3, max_dim, 3)
    idx = EntityIndex(
        tuple(f"p{i:02d}" for i in range(n)),
        tuple(f"a{i:02d}" for i in range(m)),
        tuple(f"f{i:02d}" for i in range(k)),
        {f"p{i:02d}": i for i in range(n)},
        {f"a{i:02d}": i for i in range(m)},
        {f"f{i:02d}": i for i in range(k)},
    )
    gs = GraphSet(
        index=idx,
        citation=random_sparse(rng, n, n, nodiag=True),
        coauthor=random_sparse(rng, m, m, symmetric=True),
        author_paper=random_sparse(rng, m, n),
        paper_feature=random_sparse(rng, n, k),
        author_feature=random_sparse(rng, m, k),
    )
    e = rng.random(k) + 0.05
    return gs, e


def random_hyperparams(rng, **overrides):
    from mrfrank.ranking import HyperParams
    kwargs = dict(
        alpha_p=rng.uniform(0.1, 0.9), beta_p=rng.uniform(0.1, 0.9),
        alpha_a=rng.uniform(0.1, 0.9), beta_a=rng.uniform(0.1, 0.9),
        alpha_f=rng.uniform(0.1, 0.9),
    )
    kwargs.update(overrides)
    return HyperParams(**kwargs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240824)
