import numpy as np
import pytest

from core.errors import QuadratureRangeError, SingularConfigurationError, ValidationError
from core.ewa import (
    EwaConfig, d_blocks_numeric, db_ewa, db_ewa_resolvent, ewa_validity, hb_ewa, heff_full, pseudo_lamb_shifts,
)
from core.model import BlockSystem, bare_hamiltonian
from zeno.utils.random_systems import random_system


def diag_b_system(gamma: float = 5.0, c=(0.5, 0.5)) -> BlockSystem:
    return BlockSystem(omegas_A=(0.0,), gammas_A=(gamma,), B_block=np.diag([0.0, 1.0]), C_block=[list(c)])


def fig2a_system() -> BlockSystem:
    return BlockSystem(omegas_A=(0.0,), gammas_A=(5.0,), B_block=[[0.0, 0.5], [0.5, 1.0]], C_block=[[0.5, 0.5]])


def rel_max(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.abs(a - b).max() / np.abs(b).max())


@pytest.mark.smoke
def test_db_ewa_zero_coupling():
    assert np.array_equal(db_ewa(diag_b_system(c=(0.0, 0.0))), np.zeros((2, 2)))


@pytest.mark.smoke
def test_db_ewa_closed_form_entries():
    d = db_ewa(diag_b_system())
    assert d[0, 0] == pytest.approx(0.05, abs=1e-15)
    assert d[1, 0] == pytest.approx(0.05, abs=1e-15)
    expected = 0.25 / (5.0 - 1.0j)
    assert abs(d[0, 1] - expected) < 1e-15 and abs(d[1, 1] - expected) < 1e-15
    assert abs(expected - (0.048077 + 0.009615j)) < 1e-6


def test_db_ewa_is_additive_over_decaying_levels():
    b = [[0.0, 0.3], [0.3, 1.0]]
    two = BlockSystem(omegas_A=(0.2, -0.1), gammas_A=(5.0, 6.0), B_block=b, C_block=[[0.5, 0.5j], [0.4, 0.1]])
    one_a = BlockSystem(omegas_A=(0.2,), gammas_A=(5.0,), B_block=b, C_block=[[0.5, 0.5j]])
    one_b = BlockSystem(omegas_A=(-0.1,), gammas_A=(6.0,), B_block=b, C_block=[[0.4, 0.1]])
    assert np.allclose(db_ewa(two), db_ewa(one_a) + db_ewa(one_b), atol=1e-15)


def test_db_ewa_bilinear_and_bounded(rng):
    sys_ = random_system(rng, dim_A=2, dim_B=3)
    half = sys_.replace(C_block=0.5 * sys_.C_block)
    assert np.allclose(db_ewa(half), 0.25 * db_ewa(sys_), atol=1e-15)
    c = np.abs(sys_.C_block)
    bound = (c / np.asarray(sys_.gammas_A)[:, None]).T @ c
    assert np.all(np.abs(db_ewa(sys_)) <= bound + 1e-15)


def test_db_ewa_finite_at_degeneracy():
    sys_ = BlockSystem(omegas_A=(1.0,), gammas_A=(2.0,), B_block=np.diag([0.0, 1.0]), C_block=[[0.5, 0.5]])
    d = db_ewa(sys_)
    assert np.all(np.isfinite(d))
    assert d[1, 1] == pytest.approx(0.125)


def test_db_ewa_singular_configuration():
    sys_ = BlockSystem(omegas_A=(1.0,), gammas_A=(0.0,), B_block=np.diag([0.0, 1.0]), C_block=[[0.5, 0.5]])
    with pytest.raises(SingularConfigurationError):
        db_ewa(sys_)
    with pytest.raises(SingularConfigurationError):
        db_ewa_resolvent(sys_)


def test_db_ewa_uncoupled_zero_rate_level_is_ignored():
    sys_ = BlockSystem(omegas_A=(0.0, 0.0), gammas_A=(5.0, 0.0), B_block=np.diag([0.0, 1.0]),
                       C_block=[[0.5, 0.5], [0.0, 0.0]])
    assert np.allclose(db_ewa(sys_), db_ewa(diag_b_system()))


def test_resolvent_equals_closed_form_for_diagonal_b(rng):
    sys_ = random_system(rng, dim_A=2, dim_B=3, diagonal_b=True)
    assert np.allclose(db_ewa_resolvent(sys_), db_ewa(sys_), atol=1e-14)


@pytest.mark.smoke
def test_ewa_config():
    cfg = EwaConfig.for_system(fig2a_system())
    assert cfg.delta_t == pytest.approx(6.0)
    assert cfg.quadrature_n == 2000
    with pytest.raises(ValidationError):
        EwaConfig(delta_t=0.0)
    with pytest.raises(ValidationError):
        EwaConfig(delta_t=1.0, quadrature_n=7)
    with pytest.raises(ValidationError):
        EwaConfig.for_system(diag_b_system(gamma=0.0))


def test_numeric_blocks_vanish_without_coupling():
    sys_ = diag_b_system(c=(0.0, 0.0))
    d_a, d_b = d_blocks_numeric(sys_, EwaConfig(delta_t=6.0))
    assert np.array_equal(d_a, np.zeros((1, 1))) and np.array_equal(d_b, np.zeros((2, 2)))


def test_numeric_db_converges_to_closed_form():
    sys_ = diag_b_system()
    _, d_b = d_blocks_numeric(sys_, EwaConfig(delta_t=30.0 / 5.0, quadrature_n=2000))
    assert rel_max(d_b, db_ewa(sys_)) <= 1e-6


def test_numeric_db_far_from_closed_form_in_short_window():
    sys_ = diag_b_system()
    _, d_b = d_blocks_numeric(sys_, EwaConfig(delta_t=0.5 / 5.0, quadrature_n=2000))
    assert rel_max(d_b, db_ewa(sys_)) > 0.1


def test_numeric_db_converges_to_resolvent_for_coupled_b():
    sys_ = fig2a_system()
    _, d_b = d_blocks_numeric(sys_, EwaConfig.for_system(sys_))
    assert rel_max(d_b, db_ewa_resolvent(sys_)) <= 1e-6


def test_numeric_window_cap():
    with pytest.raises(QuadratureRangeError):
        d_blocks_numeric(diag_b_system(), EwaConfig(delta_t=50.0))


@pytest.mark.smoke
def test_hb_ewa_without_coupling_is_b():
    sys_ = diag_b_system(c=(0.0, 0.0))
    assert np.array_equal(hb_ewa(sys_).matrix, sys_.B_block)


def test_hb_ewa_composition():
    sys_ = fig2a_system()
    h = hb_ewa(sys_)
    assert np.allclose(h.matrix, sys_.B_block - 1j * h.d_b, atol=1e-12)
    assert np.allclose(h.d_b, db_ewa(sys_))
    assert np.allclose(hb_ewa(sys_, exact_limit=True).d_b, db_ewa_resolvent(sys_))


def test_hb_ewa_zeno_limit():
    sys_ = fig2a_system().replace(gammas_A=(1e3,))
    h = hb_ewa(sys_)
    assert np.abs(h.matrix - sys_.B_block).max() <= 1 * 0.5 ** 2 / 1e3


def test_heff_full_structure():
    sys_ = diag_b_system()
    cfg = EwaConfig.for_system(sys_)
    h = heff_full(sys_, cfg)
    assert np.array_equal(h[1:, :1], np.zeros((2, 1)))
    assert np.array_equal(h[:1, 1:], sys_.C_block)
    assert np.abs(h[1:, 1:] - hb_ewa(sys_).matrix).max() <= 1e-6 * np.abs(db_ewa(sys_)).max()


def test_heff_full_without_coupling_is_bare():
    sys_ = diag_b_system(c=(0.0, 0.0))
    assert np.allclose(heff_full(sys_, EwaConfig(delta_t=6.0)), bare_hamiltonian(sys_), atol=0)


def test_ewa_validity_report():
    sys_ = BlockSystem(omegas_A=(0.0, 0.0), gammas_A=(5.0, 0.0), B_block=np.diag([0.0, 1.0]),
                       C_block=[[0.5, 0.5], [0.0, 0.0]])
    report = ewa_validity(sys_, EwaConfig.for_system(sys_))
    assert report["gamma_min"] == 5.0
    assert report["c_max"] == 0.5
    assert report["gamma_over_c"] == pytest.approx(10.0)
    assert report["evanescent_factor"] == pytest.approx(np.exp(-30.0))


def test_pseudo_lamb_shifts_reassemble_dressing(rng):
    sys_ = random_system(rng, dim_A=2, dim_B=3)
    parts = pseudo_lamb_shifts(sys_)
    d = db_ewa(sys_)
    rebuilt = np.diag(parts["decay_rates"] + 1j * parts["energy_shifts"]) + 1j * parts["couplings"]
    assert np.allclose(rebuilt, d, atol=1e-15)
    assert np.all(np.diag(parts["couplings"]) == 0)
