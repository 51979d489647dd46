import numpy as np
import pytest

from core.dynamics import (
    check_times, evolve, evolve_ewa, evolve_exact, norm_decay_rate, psi_a_bound, psi_a_bound_series,
    spectral_decay_rates,
)
from core.errors import DimensionError, ValidationError
from core.ewa import hb_ewa
from core.model import BlockSystem, full_hamiltonian
from zeno.utils.oracles import rk4_propagate
from zeno.utils.random_systems import random_state, random_system


def fig2a_system(gamma: float = 5.0) -> BlockSystem:
    return BlockSystem(omegas_A=(0.0,), gammas_A=(gamma,), B_block=[[0.0, 0.5], [0.5, 1.0]], C_block=[[0.5, 0.5]])


@pytest.mark.smoke
def test_null_generator_gives_constant_trajectory():
    psi0 = np.array([0.6, 0.8j])
    traj = evolve(np.zeros((2, 2)), psi0, np.linspace(0, 5, 11))
    assert np.allclose(traj.states, np.tile(psi0, (11, 1)))


@pytest.mark.smoke
def test_pure_decay():
    gamma = 0.7
    times = np.linspace(0, 4, 41)
    traj = evolve(np.diag([-1j * gamma, 0.0]), np.array([1.0, 0.0]), times, dim_A=1)
    assert np.allclose(traj.norms_full, np.exp(-gamma * times), atol=1e-12)
    assert np.allclose(traj.norms_B, 0.0)


def test_exact_evolution_matches_rk4_oracle():
    sys_ = fig2a_system()
    psi0 = np.array([0.0, 0.0, 1.0])
    times = np.linspace(0.0, 2.0, 5)
    traj = evolve_exact(sys_, psi0, times)
    h = full_hamiltonian(sys_)
    ref = rk4_propagate(h, psi0, 2.0, 1e-4)
    assert abs(traj.norms_full[-1] - np.linalg.norm(ref)) <= 1e-7
    assert np.allclose(traj.states[-1], ref, atol=1e-7)


def test_non_uniform_grid_matches_uniform():
    sys_ = fig2a_system()
    psi0 = np.array([0.0, 0.0, 1.0])
    uniform = evolve_exact(sys_, psi0, np.linspace(0, 2, 5))
    ragged = evolve_exact(sys_, psi0, [0.0, 0.5, 0.6, 2.0])
    assert np.allclose(ragged.states[1], uniform.states[1], atol=1e-12)
    assert np.allclose(ragged.states[-1], uniform.states[-1], atol=1e-12)


def test_dimension_and_grid_errors():
    with pytest.raises(DimensionError):
        evolve(np.eye(3), np.ones(2), [0.0, 1.0])
    with pytest.raises(DimensionError):
        evolve(np.eye(2), np.ones(2), [0.0, 1.0], dim_A=3)
    with pytest.raises(ValidationError):
        check_times([0.1, 1.0])
    with pytest.raises(ValidationError):
        check_times([0.0, 1.0, 1.0])
    with pytest.raises(DimensionError):
        evolve_ewa(fig2a_system(), np.ones(3), [0.0])


def test_norm_split_and_monotonicity(rng):
    sys_ = random_system(rng, dim_A=2, dim_B=3, gamma_over_c=2.0)
    psi0 = random_state(rng, sys_.dim)
    traj = evolve_exact(sys_, psi0, np.linspace(0, 10, 201))
    assert np.allclose(traj.norms_A ** 2 + traj.norms_B ** 2, traj.norms_full ** 2, atol=1e-12)
    assert np.all(np.diff(traj.norms_full) <= 1e-9)


def test_semigroup_property(rng):
    sys_ = random_system(rng, dim_A=1, dim_B=2)
    psi0 = random_state(rng, sys_.dim)
    h = full_hamiltonian(sys_)
    direct = evolve(h, psi0, [0.0, 2.5]).states[-1]
    first = evolve(h, psi0, [0.0, 1.0]).states[-1]
    second = evolve(h, first, [0.0, 1.5]).states[-1]
    assert np.allclose(direct, second, atol=1e-9)


def test_ewa_without_coupling_is_rabi():
    g = 0.5
    sys_ = fig2a_system().replace(C_block=[[0.0, 0.0]])
    times = np.linspace(0, 20, 401)
    traj = evolve_ewa(sys_, np.array([0.0, 1.0]), times)
    omega = np.sqrt(1.0 + 4 * g ** 2)
    stay = 1.0 - (4 * g ** 2 / omega ** 2) * np.sin(omega * times / 2) ** 2
    assert np.allclose(np.abs(traj.states[:, 1]) ** 2, stay, atol=1e-10)
    assert np.allclose(traj.norms_A, 0.0)


def test_ewa_norm_loss_is_bounded_by_dressing():
    sys_ = fig2a_system(gamma=100.0)
    times = np.linspace(0, 20, 401)
    traj = evolve_ewa(sys_, np.array([0.0, 1.0]), times)
    d = hb_ewa(sys_).d_b
    top = np.linalg.eigvalsh(0.5 * (d + d.conj().T)).max()
    assert np.all(traj.norms_full >= np.exp(-top * times) - 1e-12)
    assert traj.norms_full[-1] < 1.0


def test_ewa_norm_near_unity_deep_in_zeno_regime():
    traj = evolve_ewa(fig2a_system(gamma=1e4), np.array([0.0, 1.0]), np.linspace(0, 20, 401))
    assert np.all(np.abs(traj.norms_full - 1.0) <= 1e-2)


@pytest.mark.smoke
def test_bound_vanishes_at_start_for_b_states():
    assert psi_a_bound(fig2a_system(), np.array([0.0, 0.0, 1.0]), 0.0) == 0.0


def test_bound_long_time_limit():
    bound = psi_a_bound(fig2a_system(), np.array([0.0, 0.0, 1.0]), 50.0)
    assert bound == pytest.approx(0.2, abs=1e-12)


def test_bound_variants():
    sys_ = fig2a_system().replace(omegas_A=(0.7,))
    psi0 = np.array([0.3, 0.0, np.sqrt(0.91)])
    times = np.linspace(0, 5, 11)
    literal = psi_a_bound_series(sys_, psi0, times)
    conservative = psi_a_bound_series(sys_, psi0, times, conservative=True)
    assert np.all(conservative >= literal)
    assert literal[3] == pytest.approx(psi_a_bound(sys_, psi0, times[3]))
    with pytest.raises(ValidationError):
        psi_a_bound(sys_, psi0, -1.0)


def test_bound_for_undamped_level_grows_linearly():
    sys_ = BlockSystem(omegas_A=(0.0,), gammas_A=(0.0,), B_block=np.diag([0.0, 1.0]), C_block=[[0.1, 0.1]])
    assert psi_a_bound(sys_, np.array([0.0, 1.0, 0.0]), 3.0) == pytest.approx(0.6)


def test_bound_dominates_exact_component(rng):
    for _ in range(10):
        sys_ = random_system(rng, dim_A=2, dim_B=2, zero_omegas=True)
        psi0 = random_state(rng, sys_.dim, a_weight=0.2, dim_A=2)
        times = np.linspace(0, 5, 101)
        traj = evolve_exact(sys_, psi0, times)
        assert np.all(traj.norms_A <= psi_a_bound_series(sys_, psi0, times) + 1e-12)


def test_conservative_bound_dominates_with_detuning(rng):
    for _ in range(10):
        sys_ = random_system(rng, dim_A=2, dim_B=2, omega_scale=3.0)
        psi0 = random_state(rng, sys_.dim, a_weight=0.2, dim_A=2)
        times = np.linspace(0, 5, 101)
        traj = evolve_exact(sys_, psi0, times)
        assert np.all(traj.norms_A <= psi_a_bound_series(sys_, psi0, times, conservative=True) + 1e-12)


def test_decaying_component_is_order_c_over_gamma(rng):
    for _ in range(10):
        sys_ = random_system(rng, dim_A=2, dim_B=2)
        sys_ = sys_.replace(gammas_A=(10 * 0.5, 10 * 0.5))
        psi0 = random_state(rng, sys_.dim, a_weight=0.0, dim_A=2)
        traj = evolve_exact(sys_, psi0, np.linspace(0, 10, 201))
        rows = np.abs(sys_.C_block).sum(axis=1).sum()
        assert traj.norms_A.max() <= 2 * rows / 5.0


def test_norm_decay_rate_matches_finite_difference(rng):
    sys_ = random_system(rng, dim_A=2, dim_B=2, gamma_over_c=3.0)
    psi0 = random_state(rng, sys_.dim)
    t, dt = 1.0, 1e-5
    traj = evolve_exact(sys_, psi0, [0.0, t - dt, t, t + dt])
    fd = (traj.norms_full[3] ** 2 - traj.norms_full[1] ** 2) / (2 * dt)
    assert norm_decay_rate(sys_, traj.states[2]) == pytest.approx(fd, abs=1e-6)


def test_spectral_decay_rates_without_coupling():
    sys_ = BlockSystem(omegas_A=(0.0, 0.3), gammas_A=(5.0, 2.0), B_block=[[0.0, 0.5], [0.5, 1.0]],
                       C_block=np.zeros((2, 2)))
    assert np.allclose(spectral_decay_rates(sys_), [5.0, 2.0, 0.0, 0.0], atol=1e-12)
