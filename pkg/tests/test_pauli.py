"""Pauli/Clifford tableau tests against explicit matrices."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmet import dense, pauli


def test_label_roundtrip_basics():
    p = pauli.PauliString.from_label("-XIZ")
    assert p.label() == "-XIZ"
    assert p.n == 3
    assert p.weight == 2
    assert p.support == 0b101
    q = pauli.PauliString.from_label("iYY")
    assert q.label() == "iYY"
    with pytest.raises(ValueError):
        pauli.PauliString.from_label("XQ")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from("IXYZ"), min_size=1, max_size=6),
       st.sampled_from(["", "-", "i", "-i"]))
def test_label_roundtrip_random(letters, sign):
    label = sign + "".join(letters)
    assert pauli.PauliString.from_label(label).label() == label


def test_mul_and_commute_against_matrices():
    rng = np.random.default_rng(3)
    labels = ["XYZ", "ZZI", "IYX", "YIY", "XXZ"]
    for _ in range(10):
        a = pauli.PauliString.from_label(rng.choice(labels))
        b = pauli.PauliString.from_label(rng.choice(labels))
        prod = pauli.pauli_mul(a, b)
        np.testing.assert_allclose(
            prod.to_matrix(), a.to_matrix() @ b.to_matrix(), atol=1e-12)
        comm = a.to_matrix() @ b.to_matrix() - b.to_matrix() @ a.to_matrix()
        assert pauli.commutes(a, b) == (np.abs(comm).max() < 1e-12)


def test_all_paulis_counts():
    assert len(list(pauli.all_paulis(2))) == 16
    assert len(list(pauli.all_paulis(2, include_identity=False))) == 15
    on_first = list(pauli.paulis_on_support(2, 0b10))
    assert len(on_first) == 3
    assert all(p.support == 0b10 for p in on_first)


def test_clifford_identity_and_apply():
    ident = pauli.clifford_identity(2)
    p = pauli.PauliString.from_label("XZ")
    assert pauli.clifford_apply(ident, p) == p


def test_random_clifford_conjugation_matches_matrix():
    rng = np.random.default_rng(4)
    for _ in range(5):
        c = pauli.random_clifford(2, rng)
        u = pauli.clifford_to_matrix(c)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
        for label in ("XI", "IZ", "YX"):
            p = pauli.PauliString.from_label(label)
            q = pauli.clifford_apply(c, p)
            np.testing.assert_allclose(
                u @ p.to_matrix() @ u.conj().T, q.to_matrix(), atol=1e-12)


def test_compose_and_tensor_match_matrices():
    rng = np.random.default_rng(5)
    a = pauli.random_clifford(1, rng)
    b = pauli.random_clifford(1, rng)
    comp = pauli.clifford_compose(a, b)
    ua, ub = pauli.clifford_to_matrix(a), pauli.clifford_to_matrix(b)
    p = pauli.PauliString.from_label("Y")
    want = (ub @ ua) @ p.to_matrix() @ (ub @ ua).conj().T
    np.testing.assert_allclose(
        pauli.clifford_apply(comp, p).to_matrix(), want, atol=1e-12)
    tens = pauli.clifford_tensor(a, b)
    ut = pauli.clifford_to_matrix(tens)
    q = pauli.PauliString.from_label("XZ")
    np.testing.assert_allclose(
        ut @ q.to_matrix() @ ut.conj().T,
        pauli.clifford_apply(tens, q).to_matrix(), atol=1e-12)


def test_channel_pauli_coeffs_depolarizing():
    s = 0.3
    kraus = [np.sqrt(1 - 3 * s / 4) * dense.ID2,
             np.sqrt(s / 4) * dense.SX,
             np.sqrt(s / 4) * dense.SY,
             np.sqrt(s / 4) * dense.SZ]
    ch = pauli.channel_pauli_coeffs(kraus)
    weights = {}
    for term in ch.terms:
        for coeff, p in term:
            weights[p.label().lstrip("-i")] = weights.get(p.label().lstrip("-i"), 0.0) \
                + abs(coeff) ** 2
    np.testing.assert_allclose(weights["I"], 1 - 3 * s / 4, atol=1e-12)
    for ax in "XYZ":
        np.testing.assert_allclose(weights[ax], s / 4, atol=1e-12)


def test_verify_twirl_residuals_small():
    rng = np.random.default_rng(6)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    q = pauli.PauliString.from_label("XI")
    qp = pauli.PauliString.from_label("ZY")
    assert pauli.verify_twirl("pauli", q, qp, rho) < 1e-10
    assert pauli.verify_twirl("clifford", q, qp, rho) < 1e-10
    assert pauli.verify_twirl("local_clifford", q, qp, rho) < 1e-10


def test_verify_twirl_rejects_same_axes():
    rho = np.eye(4) / 4
    q = pauli.PauliString.from_label("XI")
    with pytest.raises(ValueError):
        pauli.verify_twirl("pauli", q, q, rho)
