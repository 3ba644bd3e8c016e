import numpy as np
import pytest

from credotune.credo_core import CredoVector, TeamStructure


def random_partition(rng: np.random.Generator, n: int) -> TeamStructure:
    perm = rng.permutation(n)
    cuts = sorted(rng.choice(np.arange(1, n), size=rng.integers(0, n), replace=False)) if n > 1 else []
    teams = [list(map(int, block)) for block in np.split(perm, cuts)]
    return TeamStructure(n, teams)


def random_credo(rng: np.random.Generator) -> CredoVector:
    w = rng.dirichlet(np.ones(3))
    # some exact zeros to exercise the zero-denominator branch
    mask = rng.random(3) < 0.25
    if mask.all():
        mask[rng.integers(3)] = False
    w = np.where(mask, 0.0, w)
    w = w / w.sum()
    return CredoVector(*map(float, w))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
