"""Authenticated-channel tests: soundness, privacy, replay, integrity."""

import numpy as np
import pytest

from qmet import crypto, pauli


def test_parse_attack_variants():
    assert crypto.parse_attack("id").variant == "identity"
    a = crypto.parse_attack("pauli:-XIZ")
    assert a.variant == "fixed_pauli"
    assert a.pauli.label() == "-XIZ"
    m = crypto.parse_attack("mix:0.9*III,0.1*ZII")
    assert m.variant == "pauli_mixture"
    np.testing.assert_allclose(sum(w for w, _ in m.mixture), 1.0)
    d = crypto.parse_attack("depol:0.3")
    assert d.variant == "depolarizing" and d.strength == 0.3
    dd = crypto.parse_attack("double:pauli:XI;depol:0.5")
    assert dd.variant == "double"
    assert dd.pair[0].variant == "fixed_pauli"


def test_parse_attack_rejections():
    for text in ("mix:0.5*II,0.6*XI", "depol:1.5", "pauli:XQ", "double:id", "junk"):
        with pytest.raises(ValueError):
            crypto.parse_attack(text)


def test_bounds():
    np.testing.assert_allclose(crypto.trap_bound(2, 1), 3.0)
    np.testing.assert_allclose(crypto.trap_bound(2, 2), 1.5)
    np.testing.assert_allclose(crypto.clifford_bound(2), 0.25)
    np.testing.assert_allclose(crypto.trap_double_bound(1, 1), 2.25)


def test_trap_single_fixed_pauli():
    r = crypto.soundness_trap_single(2, 1, crypto.parse_attack("pauli:XII"))
    np.testing.assert_allclose(r.lhs, 2.0 / 3.0, rtol=1e-12)
    np.testing.assert_allclose(r.accept_rate, 7.0 / 9.0, rtol=1e-12)
    assert r.mode == "exact"
    assert r.lhs <= r.bound
    r = crypto.soundness_trap_single(2, 1, crypto.parse_attack("pauli:XIZ"))
    np.testing.assert_allclose(r.lhs, 4.0 / 9.0, rtol=1e-12)
    np.testing.assert_allclose(r.accept_rate, 5.0 / 9.0, rtol=1e-12)


def test_identity_attack_is_harmless():
    for fn in (crypto.soundness_trap_single, crypto.soundness_clifford_single):
        r = fn(2, 1, crypto.AttackSpec.identity())
        np.testing.assert_allclose(r.lhs, 0.0, atol=1e-12)
        np.testing.assert_allclose(r.accept_rate, 1.0, atol=1e-12)


def test_worst_fixed_pauli():
    lhs, worst = crypto.worst_fixed_pauli("trap", 2, 2)
    np.testing.assert_allclose(lhs, 0.5, rtol=1e-12)
    assert worst.label() == "ZIII"
    assert lhs <= crypto.trap_bound(2, 2)


def test_clifford_full_depolarizing():
    r = crypto.soundness_clifford_single(2, 2, crypto.parse_attack("depol:1.0"))
    np.testing.assert_allclose(r.lhs, 0.1875, rtol=1e-12)
    np.testing.assert_allclose(r.accept_rate, 0.25, rtol=1e-12)
    np.testing.assert_allclose(r.trace_distance_budget(), np.sqrt(0.1875 / 0.25))


def test_delegated_pads_against_bound():
    r = crypto.soundness_delegated(2, 2, crypto.parse_attack("pauli:XIII"))
    np.testing.assert_allclose(r.lhs, 0.5, rtol=1e-12)
    np.testing.assert_allclose(r.accept_rate, 2.0 / 3.0, rtol=1e-12)
    np.testing.assert_allclose(r.bound, 1.5)


def test_exact_reduction_matches_dense_enumeration():
    att = crypto.parse_attack("mix:0.7*III,0.3*ZXY")
    r = crypto.soundness_trap_single(2, 1, att)
    lhs, accept = crypto.dense_trap_single(2, 1, att)
    np.testing.assert_allclose(r.lhs, lhs, atol=1e-9)
    np.testing.assert_allclose(r.accept_rate, accept, atol=1e-9)
    att = crypto.parse_attack("depol:0.3")
    r = crypto.soundness_clifford_single(1, 1, att)
    np.testing.assert_allclose(r.lhs, 0.075, rtol=1e-12)
    lhs, accept = crypto.dense_clifford_single(1, 1, att)
    np.testing.assert_allclose(r.lhs, lhs, atol=1e-9)


def test_double_use():
    att = crypto.parse_attack("double:pauli:XI;pauli:ZY")
    r = crypto.soundness_double("trap", 1, 1, att)
    np.testing.assert_allclose(r.lhs, 7.0 / 27.0, rtol=1e-10)
    np.testing.assert_allclose(r.bound, 2.25)
    np.testing.assert_allclose(r.accept_rate, 4.0 / 9.0, rtol=1e-10)
    lhs, accept = crypto.dense_trap_double(1, 1, att)
    np.testing.assert_allclose(r.lhs, lhs, atol=1e-9)
    with pytest.raises(ValueError):
        crypto.soundness_double("trap", 1, 1, crypto.parse_attack("pauli:XI"))


def test_double_use_mixture_point():
    att = crypto.parse_attack("double:mix:0.6*IIII,0.4*XZYX;depol:0.5")
    r = crypto.soundness_double("trap", 2, 2, att)
    np.testing.assert_allclose(r.lhs, 0.10856481481, rtol=1e-9)
    assert r.lhs <= r.bound


def test_sampled_mode_agrees_with_bound():
    att = crypto.parse_attack("mix:0.9*IIIIIII,0.1*XZYXZYX")
    r = crypto.soundness_trap_single(5, 2, att, mode="sampled", trials=400, seed=7)
    assert r.mode == "sampled"
    assert r.trials == 400
    assert r.stderr > 0
    assert r.lhs <= r.bound
    again = crypto.soundness_trap_single(5, 2, att, mode="sampled", trials=400, seed=7)
    np.testing.assert_allclose(r.lhs, again.lhs, atol=0)


def test_report_rejects_exact_bound_violation():
    with pytest.raises(ArithmeticError):
        crypto.SoundnessReport(lhs=0.5, bound=0.25, accept_rate=0.5, mode="exact")


def test_report_dict_order():
    r = crypto.soundness_trap_single(2, 1, crypto.AttackSpec.identity())
    assert list(r.as_dict().keys()) == [
        "lhs", "bound", "accept_rate", "trace_distance_budget", "mode"]


def test_replay_breaks_reused_key():
    broken, honest, bound = crypto.replay_attack_demo(1, 4, np.pi / 2)
    np.testing.assert_allclose(broken, 2.0 / 3.0, rtol=1e-9)
    np.testing.assert_allclose(bound, 0.5625)
    assert broken > bound
    assert honest < bound
    np.testing.assert_allclose(honest, 0.042337719521, rtol=1e-8)


def test_replay_reduction_matches_dense():
    b1, h1, bd1 = crypto.replay_attack_demo(2, 1, 0.7)
    b2, h2, bd2 = crypto.replay_attack_demo(2, 1, 0.7, dense=True)
    np.testing.assert_allclose(b1, b2, atol=1e-9)
    np.testing.assert_allclose(h1, h2, atol=1e-9)
    np.testing.assert_allclose(bd1, bd2)


def test_privacy_of_all_protocols():
    assert crypto.privacy_deviation("trap", 1, 1) < 1e-10
    assert crypto.privacy_deviation("clifford", 1, 1) < 1e-10
    assert crypto.privacy_deviation("delegated", 2, 1) < 1e-10


def test_integrity_params():
    ip = crypto.IntegrityParams(o=1.0, dO_dtheta=-2.0, delta=0.02, alpha=0.8, nu=1000)
    np.testing.assert_allclose(ip.epsilon, np.sqrt(0.02 / 0.8))
    # the bias bound rescales as 2 |o| eps / |dO/dtheta|
    np.testing.assert_allclose(crypto.integrity_bias_bound(ip), ip.epsilon)
    wide = crypto.IntegrityParams(o=2.0, dO_dtheta=-2.0, delta=0.02, alpha=0.8, nu=1000)
    np.testing.assert_allclose(crypto.integrity_bias_bound(wide), 2.0 * ip.epsilon)
    steep = crypto.IntegrityParams(o=1.0, dO_dtheta=-4.0, delta=0.02, alpha=0.8, nu=1000)
    np.testing.assert_allclose(crypto.integrity_bias_bound(steep), 0.5 * ip.epsilon)
    assert crypto.integrity_mse_bound(ip) > crypto.integrity_bias_bound(ip) ** 2
    with pytest.raises(ValueError):
        crypto.IntegrityParams(o=1.0, dO_dtheta=0.0, delta=0.02, alpha=0.8, nu=10)


def test_flags_required():
    assert crypto.flags_required("trap", 2, 100, 0.5) == 600
    assert crypto.flags_required("clifford", 2, 100, 0.5) == 8
    assert crypto.flags_required("trap", 2, 10000, 0.9) == 33334
    assert crypto.flags_required("clifford", 2, 10000, 0.9) == 14


def test_end_to_end_demo_obeys_bounds():
    att = crypto.parse_attack("mix:0.99*III,0.01*ZII")
    res = crypto.end_to_end_demo(2, 1, 4000, att, seed=13)
    assert res.rounds_accepted == 3993
    np.testing.assert_allclose(res.accept_rate, 0.99825, atol=1e-5)
    assert abs(res.empirical_bias) <= res.bound_bias + 4 * res.bias_stderr
    excess = res.empirical_mse - res.ideal_mse
    assert excess <= res.bound_mse + 4 * res.mse_stderr
