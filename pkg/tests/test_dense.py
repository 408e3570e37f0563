"""Dense-backbone tests: states, channels, integrator, spectral QFI."""

import numpy as np
import pytest

from qmet import dense


def test_ket_msb_convention():
    v = dense.ket([1, 0])
    assert v.shape == (4,)
    np.testing.assert_allclose(v, [0, 0, 1, 0])


def test_ghz_and_plus_state():
    g = dense.ghz(3)
    np.testing.assert_allclose(np.linalg.norm(g), 1.0)
    np.testing.assert_allclose(g[0], g[-1])
    assert np.count_nonzero(g) == 2
    p = dense.plus_state(2)
    np.testing.assert_allclose(p, np.full(4, 0.5))


def test_kron_all_matches_numpy():
    rng = np.random.default_rng(1)
    mats = [rng.normal(size=(2, 2)) for _ in range(3)]
    want = np.kron(np.kron(mats[0], mats[1]), mats[2])
    np.testing.assert_allclose(dense.kron_all(mats), want)


def test_pure_and_as_density():
    rho = dense.pure(dense.ghz(2))
    np.testing.assert_allclose(np.trace(rho), 1.0)
    np.testing.assert_allclose(rho, rho.conj().T)
    out = dense.as_density(rho)
    np.testing.assert_allclose(out, rho)
    with pytest.raises(ValueError):
        dense.as_density(2.0 * rho)
    with pytest.raises(ValueError):
        dense.as_density(np.diag([1.5, -0.5]).astype(complex))


def test_hermitian_eig_reconstructs():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = a + a.conj().T
    vals, vecs = dense.hermitian_eig(h)
    np.testing.assert_allclose(vecs @ np.diag(vals) @ vecs.conj().T, h, atol=1e-12)


def test_hermitian_expm_is_unitary_rotation():
    sx = dense.SX
    u = dense.hermitian_expm(sx, -1j * np.pi / 2)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(u, -1j * sx, atol=1e-14)


def test_fidelity_and_trace_distance_extremes():
    zero = dense.pure(dense.ket([0]))
    one = dense.pure(dense.ket([1]))
    np.testing.assert_allclose(dense.fidelity(zero, zero), 1.0, atol=1e-12)
    np.testing.assert_allclose(dense.fidelity(zero, one), 0.0, atol=1e-12)
    np.testing.assert_allclose(dense.trace_distance(zero, one), 1.0, atol=1e-12)
    np.testing.assert_allclose(dense.trace_distance(zero, zero), 0.0, atol=1e-12)


def test_fidelity_pure_states_is_overlap():
    psi = dense.ket([0])
    phi = (dense.ket([0]) + dense.ket([1])) / np.sqrt(2)
    f = dense.fidelity(dense.pure(psi), dense.pure(phi))
    np.testing.assert_allclose(f, 0.5, atol=1e-12)


def test_partial_trace_product_and_ghz():
    rho_a = dense.pure(dense.ket([1]))
    rho_b = dense.pure((dense.ket([0]) + dense.ket([1])) / np.sqrt(2))
    joint = np.kron(rho_a, rho_b)
    np.testing.assert_allclose(dense.partial_trace(joint, [0]), rho_a, atol=1e-12)
    np.testing.assert_allclose(dense.partial_trace(joint, [1]), rho_b, atol=1e-12)
    red = dense.partial_trace(dense.pure(dense.ghz(3)), [0])
    np.testing.assert_allclose(red, np.diag([0.5, 0.5]), atol=1e-12)


def test_lindblad_pure_dephasing_rate():
    # a single qubit with a Z jump at rate g: coherences decay as exp(-2 g t)
    plus = dense.pure(dense.plus_state(1))
    g, t = 0.3, 0.7
    rho = dense.evolve_lindblad(plus, np.zeros((2, 2)), [(dense.SZ, g)], t, tol=1e-12)
    np.testing.assert_allclose(rho[0, 1], 0.5 * np.exp(-2 * g * t), rtol=1e-9)
    np.testing.assert_allclose(np.trace(rho), 1.0, atol=1e-12)


def test_lindblad_unitary_only_matches_expm():
    psi0 = dense.plus_state(1)
    ham = 0.4 * dense.SZ
    t = 1.3
    u = dense.hermitian_expm(ham, -1j * t)
    want = dense.pure(u @ psi0)
    got = dense.evolve_lindblad(dense.pure(psi0), ham, [], t, tol=1e-12)
    np.testing.assert_allclose(got, want, atol=1e-10)


def _phase_family(n):
    psi0 = dense.ghz(n)
    weights = np.array([bin(i).count("1") for i in range(2 ** n)], dtype=float)

    def fun(theta):
        return np.exp(-0.5j * theta * (n - 2 * weights)) * psi0

    return fun


def test_qfi_pure_single_qubit_and_ghz():
    np.testing.assert_allclose(dense.qfi_pure(_phase_family(1), 0.2), 1.0, rtol=1e-7)
    np.testing.assert_allclose(dense.qfi_pure(_phase_family(4), 0.3), 16.0, rtol=1e-7)


def test_qfi_pure_rejects_norm_drift():
    def bad(theta):
        return (1.0 + theta) * dense.ghz(2)

    with pytest.raises(ValueError):
        dense.qfi_pure(bad, 0.5)


def test_qfi_spectral_matches_pure_case():
    fun = _phase_family(3)

    def family(theta):
        return dense.pure(fun(theta))

    q = dense.qfi_spectral(dense.ThetaFamily(family), 0.4)
    np.testing.assert_allclose(q, 9.0, rtol=1e-6)


def test_qfi_spectral_dephased_qubit():
    # rotation of a partially dephased qubit: QFI = r^2 for a Bloch vector
    # of length r orthogonal to the rotation axis
    r = 0.6

    def family(theta):
        rho = 0.5 * (np.eye(2) + r * (np.cos(theta) * dense.SX + np.sin(theta) * dense.SY))
        return rho

    q = dense.qfi_spectral(family, 0.3)
    np.testing.assert_allclose(q, r ** 2, rtol=1e-6)
    qf = dense.qfi_fidelity_limit(family, 0.3)
    np.testing.assert_allclose(qf, r ** 2, rtol=1e-4)


def test_default_fd_step_scales():
    assert dense.default_fd_step(0.0) == pytest.approx(1e-5)
    assert dense.default_fd_step(100.0) == pytest.approx(1e-3)
