"""Closed-form-vs-oracle cross-check suite shared by the CLI and the tests.

Every check recomputes a closed form and an independent reference (dense
oracle, exact enumeration, or a printed constant) and reports the measured
deviation.  Check output contains no timing or other run-local state, so two
runs with the same build produce byte-identical reports.

Setting the environment variable QMET_VERIFY_PERTURB to a non-empty value
biases one constant inside the star-graph check; the suite must then fail.
That is the negative control for the harness itself.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import crypto, dense, ecc, estimation, graphs, pauli


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


_REGISTRY: list[tuple[str, bool, Callable[[], tuple[bool, str]]]] = []


def _register(name: str, *, quick: bool):
    def deco(fn):
        _REGISTRY.append((name, quick, fn))
        return fn
    return deco


def check_names(*, quick: bool = False) -> list[str]:
    return [name for name, q, _ in _REGISTRY if q or not quick]


def run_checks(*, quick: bool = False,
               names: Iterable[str] | None = None) -> list[CheckResult]:
    wanted = set(names) if names is not None else None
    results = []
    for name, is_quick, fn in _REGISTRY:
        if wanted is not None and name not in wanted:
            continue
        if wanted is None and quick and not is_quick:
            continue
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            ok, detail = False, "%s: %s" % (type(exc).__name__, exc)
        results.append(CheckResult(name, ok, detail))
    return results


# graph helpers


def _is_connected(n: int, edges: list[tuple[int, int]]) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def connected_graphs_upto_iso(n: int) -> list[graphs.Graph]:
    """All connected graphs on n vertices, one representative per isomorphism class."""
    pairs = list(itertools.combinations(range(n), 2))
    perms = list(itertools.permutations(range(n)))
    seen: set[tuple] = set()
    out = []
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1]
        if not _is_connected(n, edges):
            continue
        canon = min(
            tuple(sorted(tuple(sorted((p[u], p[v]))) for u, v in edges))
            for p in perms
        )
        if canon in seen:
            continue
        seen.add(canon)
        out.append(graphs.Graph.from_edges(n, edges))
    return out


def seeded_connected_graphs(n: int, count: int, seed: int) -> list[graphs.Graph]:
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    out = []
    while len(out) < count:
        edges = [e for e in pairs if rng.random() < 0.5]
        if _is_connected(n, edges):
            out.append(graphs.Graph.from_edges(n, edges))
    return out


def _bundled_star(n: int, k: int) -> graphs.Graph:
    return graphs.bundle(graphs.star(k), [n // k] * k)


@_register("graph-closed-forms", quick=True)
def _check_graph_closed_forms() -> tuple[bool, str]:
    bias = 1 if os.environ.get("QMET_VERIFY_PERTURB") else 0
    for n in range(3, 9):
        got = graphs.qfi_x(graphs.star(n))
        want = (n - 1) ** 2 + 1 + bias
        if got != want:
            extra = " (perturbation hook active)" if bias else ""
            return False, "star n=%d: qfi %d != %d%s" % (n, got, want, extra)
    tri = graphs.qfi_x(graphs.bundle(graphs.complete(3), [3, 4, 3]))
    if tri != 34:
        return False, "triangle bundle (3,4,3): qfi %d != 34" % tri
    vals = []
    for n, k in ((12, 3), (12, 4), (20, 5)):
        got = graphs.qfi_x(_bundled_star(n, k))
        want = (n // k) ** 2 + (n - n // k) ** 2
        if got != want:
            return False, "bundled star (%d,%d): qfi %d != %d" % (n, k, got, want)
        vals.append(got)
    small = _bundled_star(4, 2)
    delta = abs(graphs.qfi_x(small) - graphs.oracle_graph_qfi(small))
    if delta > 1e-6:
        return False, "bundled star (4,2) vs oracle: delta %.3e" % delta
    return True, ("stars n=3..8 exact; bundled stars %d/%d/%d; "
                  "oracle delta %.1e at (4,2)" % (*vals, delta))


@_register("graph-oracle-quick", quick=True)
def _check_graph_oracle_quick() -> tuple[bool, str]:
    cases = [graphs.star(5), graphs.cycle(5), graphs.cycle(6), graphs.path(4),
             graphs.complete(4), graphs.bundle(graphs.star(3), [2, 2, 2])]
    worst = 0.0
    for g in cases:
        got = graphs.qfi_x(g)
        ref = graphs.oracle_graph_qfi(g)
        worst = max(worst, abs(got - ref) / ref)
    if worst > 1e-6:
        return False, "qfi_x vs oracle: worst rel %.3e" % worst
    worst_y = 0.0
    for g in (graphs.star(5), graphs.complete(3)):
        got = graphs.qfi_y(g)
        ref = graphs.oracle_graph_qfi(g, "y")
        worst_y = max(worst_y, abs(got - ref) / ref)
    if worst_y > 1e-6:
        return False, "qfi_y vs oracle: worst rel %.3e" % worst_y
    g = graphs.star(5)
    got = graphs.qfi_dephasing(g, 0.1)
    ref = graphs.oracle_graph_qfi(g, noise=("dephasing", 0.1))
    d_deph = abs(got - ref) / max(1.0, abs(ref))
    if d_deph > 1e-8:
        return False, "dephasing p=0.1 star5: delta %.3e" % d_deph
    g = graphs.star(4)
    worst_e = 0.0
    for pat in ((0,), (1, 2)):
        got = graphs.qfi_erasure(g, pat)
        ref = graphs.oracle_graph_qfi(g, noise=("erasure", pat))
        worst_e = max(worst_e, abs(got - ref) / max(1.0, abs(ref)))
    if worst_e > 1e-8:
        return False, "erasure star4: worst delta %.3e" % worst_e
    return True, ("x/y rel %.1e/%.1e, dephasing %.1e, erasure %.1e"
                  % (worst, worst_y, d_deph, worst_e))


@_register("graph-oracle-exhaustive", quick=False)
def _check_graph_oracle_exhaustive() -> tuple[bool, str]:
    pool = []
    for n in range(2, 6):
        pool.extend(connected_graphs_upto_iso(n))
    pool.extend(seeded_connected_graphs(6, 20, seed=601))
    worst_x = worst_d = worst_e = 0.0
    for g in pool:
        got = graphs.qfi_x(g)
        ref = graphs.oracle_graph_qfi(g)
        worst_x = max(worst_x, abs(got - ref) / ref)
        for p in (0.05, 0.1, 0.25):
            got = graphs.qfi_dephasing(g, p)
            ref = graphs.oracle_graph_qfi(g, noise=("dephasing", p))
            worst_d = max(worst_d, abs(got - ref) / max(1.0, abs(ref)))
        patterns = [(v,) for v in range(g.n)]
        patterns += list(itertools.combinations(range(g.n), 2))
        for pat in patterns:
            got = graphs.qfi_erasure(g, pat)
            ref = graphs.oracle_graph_qfi(g, noise=("erasure", pat))
            worst_e = max(worst_e, abs(got - ref) / max(1.0, abs(ref)))
    ok = worst_x <= 1e-6 and worst_d <= 1e-8 and worst_e <= 1e-8
    return ok, ("%d graphs; worst rel noiseless %.1e, dephasing %.1e, "
                "erasure %.1e" % (len(pool), worst_x, worst_d, worst_e))


@_register("graph-z-encoding", quick=True)
def _check_graph_z_encoding() -> tuple[bool, str]:
    rng = np.random.default_rng(401)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 7))
        g = seeded_connected_graphs(n, 1, seed=int(rng.integers(1 << 30)))[0]
        q = graphs.oracle_graph_qfi(g, "z")
        worst = max(worst, abs(q - n) / n)
    return worst <= 1e-6, "20 graphs n<=6: worst rel deviation from n: %.1e" % worst


# ecc helpers


def lindblad_ghz_qfi(n: int, omega: float, gamma: float, t: float) -> float:
    """Dense Lindblad QFI of the uncorrected GHZ probe (transverse noise)."""
    ham_ops = []
    jump_ops = []
    for j in range(n):
        ops = [dense.ID2] * n
        ops[j] = dense.SZ
        ham_ops.append(dense.kron_all(ops))
        ops[j] = dense.SX
        jump_ops.append(dense.kron_all(ops))
    rho0 = dense.pure(dense.ghz(n))

    def fam(w: float) -> np.ndarray:
        ham = 0.5 * w * sum(ham_ops)
        return dense.evolve_lindblad(rho0, ham, [(op, gamma) for op in jump_ops],
                                     t, tol=1e-12)

    return dense.qfi_spectral(dense.ThetaFamily(fam), omega)


_FREE_POINTS = [(1.0, 0.10, 0.15), (1.0, 0.25, 0.15), (0.7, 0.20, 0.2),
                (1.3, 0.05, 0.25), (0.5, 0.15, 0.25), (1.0, 0.20, 0.1),
                (0.8, 0.10, 0.225), (1.2, 0.15, 0.125), (0.6, 0.25, 0.175)]


@_register("ecc-free-decay", quick=False)
def _check_ecc_free_decay() -> tuple[bool, str]:
    worst = 0.0
    for n in range(2, 6):
        for omega, gamma, t in _FREE_POINTS:
            ref = lindblad_ghz_qfi(n, omega, gamma, t)
            got = ecc.qfi_no_ecc(n, omega, gamma, t)
            worst = max(worst, abs(got - ref) / ref)
    if worst > 1e-6:
        return False, "closed form vs Lindblad oracle: worst rel %.3e" % worst
    coefs = []
    for n in (5, 10):
        gamma = 1.0
        ts = np.array([0.004, 0.008, 0.012, 0.016, 0.020])
        vals = np.array([ecc.qfi_no_ecc(n, gamma, gamma, t) for t in ts])
        coef = np.polyfit(ts, 1.0 - vals / (n * ts) ** 2, 2)[1]
        target = 2.0 - 4.0 / (3.0 * n)
        coefs.append((coef, target))
        if abs(coef - target) / target > 0.01:
            return False, ("short-time coefficient n=%d: fitted %.5f vs %.5f"
                           % (n, coef, target))
    return True, ("36 points worst rel %.1e; decay coefficients %.4f/%.4f "
                  "vs 2-4/(3n) %.4f/%.4f"
                  % (worst, coefs[0][0], coefs[1][0], coefs[0][1], coefs[1][1]))


_PARITY_POINTS = [(1.0, 0.2, 0.1, 0.3, 0.05), (0.8, 0.35, 0.07, 0.1, 0.02),
                  (1.2, 0.1, 0.12, 0.5, 0.08)]


@_register("ecc-parity-oracle", quick=False)
def _check_ecc_parity_oracle() -> tuple[bool, str]:
    worst = {"ideal": 0.0, "noisy_ancilla": 0.0, "imperfect": 0.0, "general": 0.0}
    for n in (2, 3, 4):
        for rounds in (1, 2, 5):
            for omega, gamma, tau, xi, p in _PARITY_POINTS:
                base = dict(n=n, omega=omega, gamma=gamma, tau=tau, t=rounds * tau)
                cases = {
                    "ideal": (ecc.EccParams(**base),
                              lambda q: ecc.qfi_parity_ideal(q)),
                    "noisy_ancilla": (ecc.EccParams(**base, xi=xi),
                                      lambda q: ecc.qfi_parity_noisy_ancilla(q)[0]),
                    "imperfect": (ecc.EccParams(**base, p=p),
                                  lambda q: ecc.qfi_parity_imperfect(q)),
                    "general": (ecc.EccParams(**base, xi=xi, p=p),
                                lambda q: ecc.qfi_parity(q)),
                }
                for label, (params, fn) in cases.items():
                    _, ref = ecc.amplitude_oracle(params, "parity")
                    got = fn(params)
                    worst[label] = max(worst[label], abs(got - ref) / ref)
    bad = {k: v for k, v in worst.items() if v > 1e-6}
    if bad:
        return False, "closed form vs amplitude oracle: " + ", ".join(
            "%s rel %.3e" % kv for kv in sorted(bad.items()))
    limit = ecc.qfi_parity_imperfect(
        ecc.EccParams(n=25, omega=1.0, gamma=1.0, tau=1e-5, t=1e-2, p=0.01))
    norm = limit / (25 * 1e-2) ** 2
    target = (1.0 - 2 * 0.01) ** 2
    if abs(norm - target) > 1e-4:
        return False, "tau->0 limit: %.6f vs %.6f" % (norm, target)
    return True, ("108 cases worst rel " + ", ".join(
        "%s %.1e" % kv for kv in sorted(worst.items()))
        + "; tau->0 limit %.6f vs %.4f" % (norm, target))


@_register("ecc-bitflip", quick=False)
def _check_ecc_bitflip() -> tuple[bool, str]:
    ratios_all = []
    for n in (3, 5):
        gaps = []
        for rounds in (10, 20, 40):
            params = ecc.EccParams(n=n, omega=1.0, gamma=1.0, tau=0.8 / rounds,
                                   t=0.8)
            gaps.append(abs(ecc.qfi_bitflip(params) - ecc.qfi_parity_ideal(params)))
        ratios = [gaps[0] / gaps[1], gaps[1] / gaps[2]]
        ratios_all.append(ratios)
        lo, hi = 2 ** ((n - 1) / 2 - 0.5), 2 ** ((n - 1) / 2 + 0.5)
        if not all(lo <= r <= hi for r in ratios):
            return False, ("halving ratios n=%d: %.3f/%.3f outside [%.3f, %.3f]"
                           % (n, *ratios, lo, hi))
    params = ecc.EccParams(n=3, omega=1.0, gamma=0.2, tau=0.1, t=0.3)
    _, ref = ecc.amplitude_oracle(params, "bitflip")
    got = ecc.qfi_bitflip(params)
    rel = abs(got - ref) / ref
    if rel > 1e-6:
        return False, "bitflip vs amplitude oracle n=3: rel %.3e" % rel
    return True, ("halving ratios n=3: %.2f/%.2f, n=5: %.2f/%.2f; "
                  "oracle rel %.1e" % (*ratios_all[0], *ratios_all[1], rel))


@_register("ecc-plateau-collapse", quick=True)
def _check_ecc_plateau() -> tuple[bool, str]:
    n = 25
    onsets = []
    for ratio in (20.0, 1.0 / 20.0):
        omega = 1.0
        gamma = omega / ratio
        for rounds in (10 ** 3, 10 ** 6):
            taus = np.geomspace(1e-7, 1.0, 71)

            def norm_qfi(tau: float) -> float:
                t = rounds * tau
                params = ecc.EccParams(n=n, omega=omega, gamma=gamma, tau=tau, t=t)
                return ecc.qfi_parity_ideal(params) / (n * t) ** 2

            curve = np.array([norm_qfi(tau) for tau in taus])
            if curve[0] < 0.9:
                return False, ("ratio %.3g rounds 1e%d: plateau %.3f below 0.9"
                               % (ratio, int(math.log10(rounds)), curve[0]))
            if curve[-1] > 0.1:
                return False, ("ratio %.3g rounds 1e%d: tail %.3f has not collapsed"
                               % (ratio, int(math.log10(rounds)), curve[-1]))
            if np.any(np.diff(curve) > 1e-6):
                return False, ("ratio %.3g rounds 1e%d: curve not monotone"
                               % (ratio, int(math.log10(rounds))))
            if ratio > 1.0:
                idx = int(np.searchsorted(-curve, -0.5))
                lo, hi = taus[idx - 1], taus[idx]
                for _ in range(60):
                    mid = math.sqrt(lo * hi)
                    if norm_qfi(mid) > 0.5:
                        lo = mid
                    else:
                        hi = mid
                tau_star = math.sqrt(lo * hi)
                onset = (4.0 / 3.0) * n * omega ** 2 * tau_star ** 2 * gamma \
                    * (rounds * tau_star)
                onsets.append(onset)
                if not 0.3 <= onset <= 3.0:
                    return False, ("collapse onset %.3f outside [0.3, 3] "
                                   "at rounds 1e%d" % (onset, int(math.log10(rounds))))
    return True, ("plateau/collapse shape holds; onsets %.3f/%.3f in [0.3, 3]"
                  % tuple(onsets))


def _random_density(m: int, rng: np.random.Generator) -> np.ndarray:
    dim = 1 << m
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


@_register("twirl-lemmas", quick=False)
def _check_twirl_lemmas() -> tuple[bool, str]:
    worst_p = 0.0
    for m in (1, 2, 3):
        rng = np.random.default_rng(70 + m)
        rho = _random_density(m, rng)
        elems = list(pauli.all_paulis(m))
        for q, qp in itertools.permutations(elems, 2):
            worst_p = max(worst_p, pauli.verify_twirl("pauli", q, qp, rho))
            if worst_p > 1e-10:
                return False, ("pauli twirl m=%d %s,%s residual %.3e"
                               % (m, q.label(), qp.label(), worst_p))
    worst_c = 0.0
    rng = np.random.default_rng(81)
    elems2 = list(pauli.all_paulis(2))
    for _ in range(40):
        q, qp = rng.choice(len(elems2), size=2, replace=False)
        q, qp = elems2[int(q)], elems2[int(qp)]
        rho = _random_density(2, rng)
        worst_c = max(worst_c, pauli.verify_twirl("clifford", q, qp, rho))
    if worst_c > 1e-10:
        return False, "clifford twirl residual %.3e" % worst_c
    worst_l = 0.0
    rng = np.random.default_rng(82)
    for _ in range(40):
        m = int(rng.integers(1, 4))
        elems = list(pauli.all_paulis(m))
        q, qp = rng.choice(len(elems), size=2, replace=False)
        q, qp = elems[int(q)], elems[int(qp)]
        rho = _random_density(m, rng)
        worst_l = max(worst_l, pauli.verify_twirl("local_clifford", q, qp, rho))
    if worst_l > 1e-10:
        return False, "local clifford twirl residual %.3e" % worst_l
    return True, ("residuals: pauli %.1e, clifford %.1e, local %.1e"
                  % (worst_p, worst_c, worst_l))


# soundness battery


def battery_attacks(m: int, seed: int = 90) -> list[crypto.AttackSpec]:
    """Identity, every fixed Pauli, 20 seeded mixtures, depolarizing at 4 strengths."""
    rng = np.random.default_rng(seed + m)
    specs = [crypto.AttackSpec.identity()]
    for p in pauli.all_paulis(m, include_identity=False):
        specs.append(crypto.AttackSpec.fixed_pauli(p))
    axes = "IXYZ"
    for _ in range(20):
        k = int(rng.integers(2, 5))
        labels = ["".join(rng.choice(list(axes), size=m)) for _ in range(k)]
        w = rng.dirichlet(np.ones(k))
        terms = [(float(w[i]), pauli.PauliString.from_label(labels[i]))
                 for i in range(k)]
        specs.append(crypto.AttackSpec.pauli_mixture(terms))
    for s in (0.1, 0.4, 0.7, 1.0):
        specs.append(crypto.AttackSpec.depolarizing(s))
    return specs


_BATTERY_SIZES = [(1, 1), (2, 1), (2, 2), (3, 1)]


@_register("soundness-exact-battery", quick=False)
def _check_soundness_battery() -> tuple[bool, str]:
    count = 0
    rng = np.random.default_rng(91)
    for n, t in _BATTERY_SIZES:
        m = n + t
        specs = battery_attacks(m)
        for spec in specs:
            # SoundnessReport raises if an exact lhs exceeds its bound
            crypto.soundness_trap_single(n, t, spec)
            crypto.soundness_clifford_single(n, t, spec)
            crypto.soundness_delegated(n, t, spec, theta=0.3)
            count += 3
        pair_idx = rng.choice(len(specs), size=(10, 2))
        pairs = [(specs[int(i)], specs[int(j)]) for i, j in pair_idx]
        pairs += [(specs[0], specs[0]), (specs[1], specs[1]),
                  (specs[-1], specs[-1])]
        for first, second in pairs:
            spec2 = crypto.AttackSpec.double(first, second)
            crypto.soundness_double("trap", n, t, spec2)
            crypto.soundness_double("clifford", n, t, spec2)
            count += 2
    lhs, worst = crypto.worst_fixed_pauli("trap", 2, 2)
    if lhs > 0.75:
        return False, "worst fixed Pauli at (2,2): %.4f exceeds 0.75" % lhs
    return True, ("%d exact reports within bounds at sizes %s; worst (2,2) "
                  "Pauli %s lhs %.4f" % (count, _BATTERY_SIZES, worst.label(), lhs))


@_register("soundness-dual-path", quick=False)
def _check_soundness_dual_path() -> tuple[bool, str]:
    worst = 0.0

    def agree(report, dense_pair):
        nonlocal worst
        d = max(abs(report.lhs - dense_pair[0]),
                abs(report.accept_rate - dense_pair[1]))
        worst = max(worst, d)
        return d <= 1e-9

    cases = []
    for label in ("XI", "-YZ", "ZZ"):
        cases.append((1, 1, crypto.AttackSpec.fixed_pauli(label)))
    cases.append((1, 1, crypto.AttackSpec.depolarizing(0.3)))
    cases.append((1, 1, crypto.AttackSpec.depolarizing(1.0)))
    cases.append((1, 1, crypto.AttackSpec.pauli_mixture(
        [(0.6, pauli.PauliString.from_label("IX")),
         (0.4, pauli.PauliString.from_label("ZY"))])))
    for label in ("XIZ", "YYX"):
        cases.append((2, 1, crypto.AttackSpec.fixed_pauli(label)))
    cases.append((2, 1, crypto.AttackSpec.pauli_mixture(
        [(0.5, pauli.PauliString.from_label("III")),
         (0.3, pauli.PauliString.from_label("ZXI")),
         (0.2, pauli.PauliString.from_label("XYZ"))])))
    cases.append((1, 2, crypto.AttackSpec.fixed_pauli("XZY")))
    for n, t, spec in cases:
        rep = crypto.soundness_trap_single(n, t, spec)
        if not agree(rep, crypto.dense_trap_single(n, t, spec)):
            return False, "trap single (%d,%d) %s: delta %.3e" % (n, t, spec.variant, worst)
    cliff_cases = [crypto.AttackSpec.identity(),
                   crypto.AttackSpec.depolarizing(0.6),
                   crypto.AttackSpec.fixed_pauli("XZ"),
                   crypto.AttackSpec.fixed_pauli("-IY"),
                   crypto.AttackSpec.pauli_mixture(
                       [(0.7, pauli.PauliString.from_label("II")),
                        (0.3, pauli.PauliString.from_label("XY"))])]
    for spec in cliff_cases:
        rep = crypto.soundness_clifford_single(1, 1, spec)
        if not agree(rep, crypto.dense_clifford_single(1, 1, spec)):
            return False, "clifford single (1,1) %s: delta %.3e" % (spec.variant, worst)
    dbl_cases = [
        (1, 1, crypto.AttackSpec.double(crypto.AttackSpec.fixed_pauli("XI"),
                                        crypto.AttackSpec.fixed_pauli("ZY"))),
        (1, 1, crypto.AttackSpec.double(crypto.AttackSpec.depolarizing(0.5),
                                        crypto.AttackSpec.pauli_mixture(
                                            [(0.8, pauli.PauliString.from_label("II")),
                                             (0.2, pauli.PauliString.from_label("XX"))]))),
        (2, 1, crypto.AttackSpec.double(crypto.AttackSpec.fixed_pauli("XIZ"),
                                        crypto.AttackSpec.fixed_pauli("IYI"))),
    ]
    for n, t, spec in dbl_cases:
        rep = crypto.soundness_double("trap", n, t, spec)
        if not agree(rep, crypto.dense_trap_double(n, t, spec)):
            return False, "trap double (%d,%d): delta %.3e" % (n, t, worst)
    spec = crypto.AttackSpec.double(crypto.AttackSpec.fixed_pauli("XY"),
                                    crypto.AttackSpec.fixed_pauli("XY"))
    rep = crypto.soundness_double("clifford", 1, 1, spec)
    if not agree(rep, crypto.dense_clifford_double(1, 1, spec)):
        return False, "clifford double (1,1): delta %.3e" % worst
    broken, honest, bound = crypto.replay_attack_demo(2, 1, 0.7)
    broken_d, honest_d, _ = crypto.replay_attack_demo(2, 1, 0.7, dense=True)
    d = max(abs(broken - broken_d), abs(honest - honest_d))
    worst = max(worst, d)
    if d > 1e-9:
        return False, "replay demo two-path delta %.3e" % d
    broken, honest, bound = crypto.replay_attack_demo(1, 4, 0.5 * math.pi)
    if not (broken > bound and honest <= bound + 1e-9):
        return False, ("replay at (1,4): broken %.4f vs bound %.4f, honest %.4f"
                       % (broken, bound, honest))
    return True, ("casework vs dense enumeration: worst delta %.1e; replay "
                  "broken %.4f > bound %.4f > honest %.4f"
                  % (worst, broken, bound, honest))


@_register("privacy", quick=True)
def _check_privacy() -> tuple[bool, str]:
    worst = 0.0
    for protocol, n, t in (("trap", 1, 1), ("trap", 2, 1), ("trap", 1, 2),
                           ("clifford", 1, 1), ("delegated", 2, 1)):
        dev = crypto.privacy_deviation(protocol, n, t)
        worst = max(worst, dev)
        if dev > 1e-10:
            return False, "%s (%d,%d): deviation %.3e" % (protocol, n, t, dev)
    return True, "key-averaged deviation from I/2^m: worst %.1e" % worst


@_register("integrity-demo", quick=False)
def _check_integrity_demo() -> tuple[bool, str]:
    attack = crypto.parse_attack("mix:0.99*III,0.01*ZII")
    r = crypto.end_to_end_demo(2, 1, 10 ** 4, attack, seed=13)
    bias_ok = abs(r.empirical_bias) <= r.bound_bias + 4 * r.bias_stderr
    excess = r.empirical_mse - r.ideal_mse
    mse_ok = excess <= r.bound_mse + 4 * r.mse_stderr
    if not (bias_ok and mse_ok):
        return False, ("bias %.4e vs bound %.4e (4sig %.1e); mse excess %.4e "
                       "vs bound %.4e (4sig %.1e)"
                       % (r.empirical_bias, r.bound_bias, 4 * r.bias_stderr,
                          excess, r.bound_mse, 4 * r.mse_stderr))
    return True, ("bias %.4e <= %.4e, mse excess %.4e <= %.4e "
                  "(accept rate %.3f, %d rounds kept)"
                  % (abs(r.empirical_bias), r.bound_bias + 4 * r.bias_stderr,
                     excess, r.bound_mse + 4 * r.mse_stderr,
                     r.accept_rate, r.rounds_accepted))


@_register("estimation-primitives", quick=True)
def _check_estimation() -> tuple[bool, str]:
    for p_true in (0.3, 0.42, 0.5, 0.8):
        for n_flips in range(1, 21):
            s = estimation.coin_mle_stats(p_true, n_flips)
            if abs(s.bias) > 1e-12:
                return False, "coin p=%.2f N=%d: bias %.2e" % (p_true, n_flips, s.bias)
            want = p_true * (1 - p_true) / n_flips
            if abs(s.variance - want) > 1e-12:
                return False, ("coin p=%.2f N=%d: variance %.12f != %.12f"
                               % (p_true, n_flips, s.variance, want))
    for n in range(1, 7):
        if estimation.phase_qfi(n, "ghz") != n * n:
            return False, "ghz phase qfi n=%d" % n
        if estimation.phase_qfi(n, "separable") != n:
            return False, "separable phase qfi n=%d" % n
    worst_mse = 0.0
    for n in range(2, 7):
        theta = 0.9 / n
        pmf = estimation.Pmf([
            ("+", lambda th, n=n: (1 + math.cos(n * th)) / 2),
            ("-", lambda th, n=n: (1 - math.cos(n * th)) / 2)])
        stats = estimation.local_estimator_stats(pmf, theta, 10)
        want = 1.0 / (10 * n * n)
        worst_mse = max(worst_mse, abs(stats.mse - want) / want)
    if worst_mse > 1e-8:
        return False, "parity estimator mse vs 1/(nu n^2): worst rel %.3e" % worst_mse
    rng = np.random.default_rng(55)
    worst_t = 0.0
    for _ in range(5):
        levels = np.sort(rng.uniform(0.0, 3.0, size=4))
        temp = float(rng.uniform(0.4, 2.0))
        h = 1e-5 * temp

        def mean_energy(tt: float) -> float:
            w = estimation.gibbs_weights(levels, tt)
            return float(np.dot(w, levels))

        fd = (mean_energy(temp + h) - mean_energy(temp - h)) / (2 * h)
        hc = estimation.heat_capacity(levels, temp)
        worst_t = max(worst_t, abs(fd - hc) / max(abs(hc), 1e-12))
        link = abs(estimation.thermometry_qfi(levels, temp)
                   - hc / temp ** 2)
        if link > 1e-12:
            return False, "thermometry qfi vs C/T^2: delta %.3e" % link
    if worst_t > 1e-6:
        return False, "heat capacity identity: worst rel %.3e" % worst_t
    return True, ("coin exact to 1e-12 (N<=20); phase qfi n/n^2; parity mse "
                  "rel %.1e; heat capacity rel %.1e" % (worst_mse, worst_t))


@_register("output-determinism", quick=True)
def _check_output_determinism() -> tuple[bool, str]:
    from . import cli

    csv_a = cli.ecc_csv("parity", n=3, omega=1.0, gamma=0.2, xi=0.05, p=0.02,
                        tau=0.1, t=0.5, sweep=("tau", 0.05, 0.25, 5, "lin"))
    csv_b = cli.ecc_csv("parity", n=3, omega=1.0, gamma=0.2, xi=0.05, p=0.02,
                        tau=0.1, t=0.5, sweep=("tau", 0.05, 0.25, 5, "lin"))
    if csv_a != csv_b:
        return False, "ecc sweep CSV differs between identical runs"
    json_a = cli.crypto_json("trap1", 2, 1, "mix:0.9*III,0.1*XZY",
                             trials=400, seed=7)
    json_b = cli.crypto_json("trap1", 2, 1, "mix:0.9*III,0.1*XZY",
                             trials=400, seed=7)
    if json_a != json_b:
        return False, "exact-mode JSON differs between identical runs"
    sm_a = cli.crypto_json("trap1", 5, 2, "mix:0.9*IIIIIII,0.1*XZYXZYX",
                           trials=400, seed=7)
    sm_b = cli.crypto_json("trap1", 5, 2, "mix:0.9*IIIIIII,0.1*XZYXZYX",
                           trials=400, seed=7)
    if sm_a != sm_b or '"mode": "sampled"' not in sm_a:
        return False, "sampled-mode JSON differs between identical runs"
    return True, ("%d CSV bytes, %d exact and %d sampled JSON bytes "
                  "reproduced exactly" % (len(csv_a), len(json_a), len(sm_a)))
