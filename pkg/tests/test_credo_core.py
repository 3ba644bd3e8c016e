import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from credotune.credo_core import (
    CredoVector,
    RewardLedger,
    TeamStructure,
    redistribute,
    redistribution_matrix,
    system_pot,
    team_pot,
    validate_credo,
)
from credotune.errors import ConfigurationError

from conftest import random_credo, random_partition


def cv(*xs):
    return CredoVector(*xs)


@pytest.mark.parametrize("credo", [(1.0, 0.0, 0.0), (0.2, 0.0, 0.8), (0.0, 1.0, 0.0)])
def test_validate_credo_accepts_simplex_points(credo):
    assert validate_credo(credo) is None


def test_validate_credo_reports_sum():
    problem = validate_credo((0.5, 0.5, 0.5))
    assert problem is not None and "1.5" in problem


def test_validate_credo_names_negative_component():
    problem = validate_credo((-0.1, 0.6, 0.5))
    assert "psi" in problem


def test_credo_vector_rejects_instead_of_renormalising():
    with pytest.raises(ConfigurationError, match="sum"):
        CredoVector(0.5, 0.5, 0.2)


@pytest.mark.parametrize(
    "phi, rewards, expected",
    [((1, 1), (1, 0), 1.0), ((0.5, 0.5), (2, 4), 3.0), ((0, 0), (5, 5), 0.0)],
)
def test_team_pot(phi, rewards, expected):
    credos = [cv(1 - p, p, 0.0) for p in phi]
    assert team_pot({0, 1}, credos, rewards) == pytest.approx(expected, abs=1e-12)


def test_team_pot_unknown_agent():
    with pytest.raises(ConfigurationError):
        team_pot({0, 5}, [cv(0, 1, 0)] * 2, (1, 1))


@pytest.mark.parametrize(
    "omega, rewards, expected",
    [((1, 1, 1), (1, 1, 1), 3.0), ((0, 0, 0), (7, 0, 0), 0.0), ((0.8, 0.2, 0.4), (1, 2, 3), 2.4)],
)
def test_system_pot(omega, rewards, expected):
    credos = [cv(1 - w, 0.0, w) for w in omega]
    assert system_pot(credos, rewards) == pytest.approx(expected, abs=1e-12)


def test_system_pot_length_mismatch():
    with pytest.raises(ConfigurationError):
        system_pot([cv(0, 0, 1)] * 2, (1, 2, 3))


def test_redistribute_pure_self_is_identity():
    out = redistribute(TeamStructure(1, [[0]]), [cv(1, 0, 0)], [3.5])
    assert out.tolist() == [3.5]


def test_redistribute_team_split():
    out = redistribute(TeamStructure(2, [[0, 1]]), [cv(0, 1, 0)] * 2, [1.0, 0.0])
    np.testing.assert_allclose(out, [0.5, 0.5], atol=1e-12)


def test_redistribute_full_system_sharing():
    s = TeamStructure.consecutive(6, 2)
    out = redistribute(s, [cv(0, 0, 1)] * 6, [6, 0, 0, 0, 0, 0])
    np.testing.assert_allclose(out, np.ones(6), atol=1e-12)


def test_redistribute_heterogeneous_hand_computed():
    # team {0,1}: phi=(0.5, 0.25); system omega=(0.5, 0.25, 1.0)
    s = TeamStructure(3, [[0, 1], [2]])
    credos = [cv(0.0, 0.5, 0.5), cv(0.5, 0.25, 0.25), cv(0.0, 0.0, 1.0)]
    r = [4.0, 2.0, 1.0]
    team = 0.5 * 4 + 0.25 * 2  # 2.5
    system = 0.5 * 4 + 0.25 * 2 + 1.0 * 1  # 3.5
    expected = [
        (0.5 / 0.75) * team + (0.5 / 1.75) * system,
        0.5 * 2 + (0.25 / 0.75) * team + (0.25 / 1.75) * system,
        (1.0 / 1.75) * system,
    ]
    np.testing.assert_allclose(redistribute(s, credos, r), expected, atol=1e-12)


def test_team_structure_validation():
    with pytest.raises(ConfigurationError):
        TeamStructure(3, [[0, 1], [1, 2]])
    with pytest.raises(ConfigurationError):
        TeamStructure(3, [[0, 1]])
    with pytest.raises(ConfigurationError):
        TeamStructure(2, [[0, 1], []])
    with pytest.raises(ConfigurationError):
        TeamStructure.consecutive(5, 2)
    s = TeamStructure.consecutive(6, 2)
    assert [sorted(t) for t in s.teams] == [[0, 1], [2, 3], [4, 5]]
    assert s.team_of(5) == 2


def test_reward_ledger_conservation_error():
    ledger = RewardLedger((1.0, 0.0), (0.5, 0.5))
    assert ledger.conservation_error == 0.0


def test_matrix_route_matches_direct(rng):
    for _ in range(200):
        n = int(rng.integers(1, 13))
        s = random_partition(rng, n)
        credos = [random_credo(rng) for _ in range(n)]
        r = rng.normal(size=n) * 5
        np.testing.assert_allclose(
            redistribution_matrix(s, credos) @ r, redistribute(s, credos, r), atol=1e-12
        )


@st.composite
def instances(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    n = draw(st.integers(1, 12))
    s = random_partition(rng, n)
    credos = [random_credo(rng) for _ in range(n)]
    rewards = rng.uniform(-10, 10, size=n)
    return s, credos, rewards


@settings(max_examples=200, deadline=None)
@given(instances())
def test_conservation(inst):
    s, credos, r = inst
    assert abs(redistribute(s, credos, r).sum() - r.sum()) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(instances(), st.floats(-100, 100, allow_nan=False))
def test_scale_equivariance(inst, c):
    s, credos, r = inst
    np.testing.assert_allclose(
        redistribute(s, credos, c * r), c * redistribute(s, credos, r), atol=1e-9
    )


@settings(max_examples=100, deadline=None)
@given(instances(), st.integers(0, 2**32 - 1))
def test_permutation_equivariance(inst, seed):
    s, credos, r = inst
    perm = np.random.default_rng(seed).permutation(s.num_agents)  # new id of old agent i is perm[i]
    inv = np.argsort(perm)
    s2 = TeamStructure(s.num_agents, [[int(perm[a]) for a in team] for team in s.teams])
    credos2 = [credos[inv[k]] for k in range(s.num_agents)]
    r2 = r[inv]
    out = redistribute(s, credos, r)
    np.testing.assert_allclose(redistribute(s2, credos2, r2), out[inv], atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(instances())
def test_zero_input_gives_zero_output(inst):
    s, credos, r = inst
    assert not redistribute(s, credos, np.zeros_like(r)).any()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_homogeneity_reduction(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 13))
    s = random_partition(rng, n)
    c = random_credo(rng)
    r = rng.uniform(0, 5, size=n)
    out = redistribute(s, [c] * n, r)
    for team in s.teams:
        team_mean = np.mean([r[j] for j in team])
        for i in team:
            expected = c.psi * r[i] + c.phi * team_mean + c.omega * r.mean()
            assert out[i] == pytest.approx(expected, abs=1e-9)
