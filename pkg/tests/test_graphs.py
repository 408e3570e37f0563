"""Graph-state QFI tests: closed forms, noise reductions, measurement schemes."""

import numpy as np
import pytest

from qmet import graphs, pauli


def test_parse_and_format_roundtrip():
    text = "5\n# hub and spokes\n0 1\n0 2\n0 3\n0 4\n"
    g = graphs.parse_graph(text)
    assert g.n == 5
    assert g == graphs.star(5)
    assert graphs.parse_graph(graphs.format_graph(g)) == g


def test_parse_rejects_bad_input():
    with pytest.raises(ValueError):
        graphs.parse_graph("3\n0 3\n")
    with pytest.raises(ValueError):
        graphs.parse_graph("2\n0 0\n")
    with pytest.raises(ValueError):
        graphs.parse_graph("")


def test_constructors_edge_counts():
    assert len(graphs.star(6).edges) == 5
    assert len(graphs.cycle(6).edges) == 6
    assert len(graphs.path(6).edges) == 5
    assert len(graphs.complete(5).edges) == 10


def test_star_family_closed_form():
    for n in range(3, 9):
        assert graphs.qfi_x(graphs.star(n)) == (n - 1) ** 2 + 1


def test_named_graph_values():
    assert graphs.qfi_x(graphs.cycle(6)) == 6
    assert graphs.qfi_x(graphs.path(4)) == 4
    assert graphs.qfi_y(graphs.path(4)) == 4
    # all neighborhoods of a complete graph differ, so every class is a
    # singleton and the QFI degrades to the shot-noise value n
    assert graphs.qfi_x(graphs.complete(3)) == 3
    assert graphs.qfi_x(graphs.complete(4)) == 4


def test_partition_star():
    part = graphs.partition(graphs.star(5))
    sizes = sorted(len(members) for members, _ in part.classes)
    assert sizes == [1, 4]
    assert graphs.qfi_x(graphs.star(5)) == sum(
        len(members) ** 2 for members, _ in part.classes)


def test_qfi_matches_oracle_small():
    for g in (graphs.star(4), graphs.cycle(5), graphs.path(4)):
        np.testing.assert_allclose(
            graphs.qfi_x(g), graphs.oracle_graph_qfi(g, encoding="x"), rtol=1e-9)
        np.testing.assert_allclose(
            graphs.qfi_y(g), graphs.oracle_graph_qfi(g, encoding="y"), rtol=1e-9)


def test_isolated_vertex_rejected():
    g = graphs.Graph.from_edges(3, [(0, 1)])
    assert g.has_isolated_vertex()
    with pytest.raises(ValueError):
        graphs.qfi_x(g)


def test_bundle_triangle():
    b = graphs.bundle(graphs.complete(3), [3, 4, 3])
    assert b.n == 10
    assert graphs.qfi_x(b) == 34


def test_bundle_size_mismatch():
    with pytest.raises(ValueError):
        graphs.bundle(graphs.complete(3), [3, 4])
    with pytest.raises(ValueError):
        graphs.bundle(graphs.complete(3), [3, 0, 3])


def test_bundled_star_merges_leaf_bundles():
    # every leaf clone shares the hub bundle as its neighborhood, so the
    # leaves form a single class of n - n/k vertices
    n, k = 12, 3
    b = graphs.bundle(graphs.star(k), [n // k] * k)
    assert b.n == n
    assert graphs.qfi_x(b) == (n // k) ** 2 + (n - n // k) ** 2


def test_dephasing_values_and_limits():
    np.testing.assert_allclose(
        graphs.qfi_dephasing(graphs.star(5), 0.1), 8.411975670713, rtol=1e-10)
    np.testing.assert_allclose(
        graphs.qfi_dephasing(graphs.cycle(5), 0.1), 3.902439024390, rtol=1e-10)
    np.testing.assert_allclose(
        graphs.qfi_dephasing(graphs.path(4), 0.1), 2.840975609756, rtol=1e-10)
    g = graphs.star(5)
    np.testing.assert_allclose(graphs.qfi_dephasing(g, 0.0), graphs.qfi_x(g))
    np.testing.assert_allclose(graphs.qfi_dephasing(g, 0.5), 0.0, atol=1e-12)


def test_dephasing_matches_oracle_point():
    g = graphs.cycle(4)
    want = graphs.oracle_graph_qfi(g, noise=("dephasing", 0.15))
    np.testing.assert_allclose(graphs.qfi_dephasing(g, 0.15), want, atol=1e-8)


def test_erasure_values_and_oracle():
    c6 = graphs.cycle(6)
    np.testing.assert_allclose(graphs.qfi_erasure(c6, [0]), 5.0, atol=1e-12)
    np.testing.assert_allclose(graphs.qfi_erasure(c6, [0, 3]), 0.0, atol=1e-12)
    np.testing.assert_allclose(graphs.qfi_erasure(c6, [0, 1]), 4.0, atol=1e-12)
    want = graphs.oracle_graph_qfi(graphs.cycle(5), noise=("erasure", (1,)))
    np.testing.assert_allclose(graphs.qfi_erasure(graphs.cycle(5), [1]), want, atol=1e-8)


def test_mean_erasure():
    np.testing.assert_allclose(graphs.mean_qfi_erasure(graphs.cycle(6), 1), 5.0)
    np.testing.assert_allclose(graphs.mean_qfi_erasure(graphs.star(5), 1), 0.8)
    np.testing.assert_allclose(graphs.mean_qfi_erasure(graphs.cycle(6), 2), 2.4)


def test_light_cone():
    lc = graphs.light_cone(graphs.cycle(6), [0])
    assert lc.erased == (0,)
    assert set(lc.light_cone) == {0, 1, 5}


def test_stabilizers_and_expectations():
    g = graphs.star(4)
    gens = graphs.stabilizer_generators(g)
    assert len(gens) == 4
    state = graphs.graph_state(g)
    for s in gens:
        assert graphs.expval_pauli(g, s) == 1
        np.testing.assert_allclose(s.to_matrix() @ state, state, atol=1e-12)
    x0 = pauli.PauliString.from_label("XIII")
    assert graphs.expval_pauli(g, x0) == 0


def test_yz_stabilizer_search():
    assert graphs.find_yz_stabilizer(graphs.star(5)).label() == "YZZZY"
    assert graphs.find_yz_stabilizer(graphs.complete(2)).label() == "YY"
    assert graphs.find_yz_stabilizer(graphs.bundle(graphs.cycle(6), [2] * 6)) is None
    got = graphs.find_yz_stabilizer(graphs.bundle(graphs.cycle(8), [2] * 8))
    assert got.label() == "ZZZZZYZYZZZZZYZY"


def test_extend_with_ancilla():
    ext = graphs.extend_with_ancilla(
        graphs.path(3), pauli.PauliString.from_label("XZI"))
    assert ext.n == 4
    assert graphs.find_yz_stabilizer(ext).label() == "ZZYY"


def test_measurement_variance_saturates_crb():
    np.testing.assert_allclose(
        graphs.measurement_variance(graphs.star(4), 1e-3), 0.1, rtol=1e-5)
    np.testing.assert_allclose(
        graphs.measurement_variance(graphs.complete(2), 1e-3), 0.5, rtol=1e-5)


def test_counting_bounds():
    assert graphs.heisenberg_count_bound(4, 1.0) == 880
    assert [graphs.stabilizer_count(m) for m in (1, 2, 3)] == [6, 60, 1080]
