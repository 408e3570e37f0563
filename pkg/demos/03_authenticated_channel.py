"""
Authenticating the probe against a malicious channel
====================================================

Appending t flag qubits, encrypting with random local Cliffords, and
accepting only when every flag survives limits how much damage any channel
attack can do to the accepted state. The lhs reported below is the
key-averaged p_accept * (1 - fidelity); the protocols bound it by
3(m-t)/(2t) (trap code), 2^-t (Clifford code), and 3n/(2t) (delegated).
"""

import numpy as np

from qmet import crypto, pauli

# a fixed Pauli attack on the single-use trap code, evaluated exactly
for text in ("id", "pauli:XIZ", "depol:0.3", "mix:0.7*III,0.3*ZXY"):
    attack = crypto.parse_attack(text)
    rep = crypto.soundness_trap_single(2, 1, attack)
    print("trap (n=2,t=1) %-20s lhs=%.6f  bound=%.2f  accept=%.4f"
          % (text, rep.lhs, rep.bound, rep.accept_rate))

# exact casework agrees with literally averaging over every key
attack = crypto.parse_attack("pauli:XIZ")
lhs, accept = crypto.dense_trap_single(2, 1, attack)
print("dense key enumeration: lhs=%.6f accept=%.4f" % (lhs, accept))

# the most damaging fixed Pauli at (2,2) reaches only a third of the bound
lhs, worst = crypto.worst_fixed_pauli("trap", 2, 2)
print("worst fixed Pauli at (2,2): %s with lhs=%.4f" % (worst.label(), lhs))

# the Clifford code trades key length for an exponentially small bound
for s in (0.25, 1.0):
    rep = crypto.soundness_clifford_single(2, 2, crypto.AttackSpec.depolarizing(s))
    print("clifford (n=2,t=2) depol %.2f: lhs=%.6f bound=%.4f" % (s, rep.lhs, rep.bound))

# larger registers switch to seeded key sampling with a reported stderr
attack = crypto.parse_attack("mix:0.9*IIIIIII,0.1*XZYXZYX")
rep = crypto.soundness_trap_single(5, 2, attack, "sampled", trials=4000, seed=3)
print("sampled trap (n=5,t=2): lhs=%.4f +- %.4f (bound %.2f)"
      % (rep.lhs, rep.stderr, rep.bound))

# reusing one key across two channel uses breaks soundness: the replay
# attack applies a correlated Pauli twice and exceeds the single-use bound
broken, honest, bound = crypto.replay_attack_demo(1, 4, 0.5 * np.pi)
print("replay with a reused key: lhs=%.4f > bound=%.4f (fresh keys: %.4f)"
      % (broken, bound, honest))

# with fresh keys the double-use bound holds again
attack = crypto.AttackSpec.double(crypto.AttackSpec.fixed_pauli("XX"),
                                  crypto.AttackSpec.fixed_pauli("XX"))
rep = crypto.soundness_double("trap", 1, 1, attack)
print("double use, fresh keys: lhs=%.6f bound=%.4f" % (rep.lhs, rep.bound))

# privacy: averaged over keys, the transmitted register carries nothing
for protocol, n, t in (("trap", 2, 1), ("clifford", 1, 1), ("delegated", 2, 1)):
    dev = crypto.privacy_deviation(protocol, n, t)
    print("privacy %-9s (n=%d,t=%d): max deviation from I/2^m = %.2e"
          % (protocol, n, t, dev))
