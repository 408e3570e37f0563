"""
End-to-end integrity of delegated phase estimation
==================================================

A client hands GHZ probes to an untrusted server for measurement. The
delegated protocol's soundness (delta) and acceptance rate (alpha) turn
into concrete bias and MSE guarantees for the final frequency estimate via
epsilon = sqrt(delta/alpha). This script runs the whole loop under three
channel attacks and compares the empirical errors with the bounds.
"""

from qmet import crypto

nu = 20000
for label, text, seed in (
        ("honest channel", "id", 11),
        ("weak dephasing", "mix:0.99*III,0.01*ZII", 13),
        ("strong depolarizing", "depol:0.5", 17)):
    attack = crypto.parse_attack(text)
    r = crypto.end_to_end_demo(2, 1, nu, attack, seed=seed)
    print("%s (%s), %d rounds, %d accepted:" % (label, text, nu, r.rounds_accepted))
    # the bound is on the true bias; the empirical value carries sampling
    # noise of order bias_stderr, so compare with that slack in mind
    print("  bias %.5f vs bound %.5f  (stderr %.5f)"
          % (abs(r.empirical_bias), r.bound_bias, r.bias_stderr))
    print("  mse excess %.6f vs bound %.6f  (ideal mse %.6f)"
          % (r.empirical_mse - r.ideal_mse, r.bound_mse, r.ideal_mse))

# the bounds come from the exact soundness of the delegated protocol
attack = crypto.parse_attack("mix:0.99*III,0.01*ZII")
rep = crypto.soundness_delegated(2, 1, attack)
ip = crypto.IntegrityParams(o=1.0, dO_dtheta=-2.0, delta=rep.lhs,
                            alpha=rep.accept_rate, nu=nu)
print("\nsoundness lhs %.6f, accept %.4f -> epsilon %.5f"
      % (rep.lhs, rep.accept_rate, ip.epsilon))
print("bias bound %.5f, mse bound %.6f"
      % (crypto.integrity_bias_bound(ip), crypto.integrity_mse_bound(ip)))

# how many flags guarantee a target precision: the trap code needs a
# linear number, the Clifford code a logarithmic one
for nu_target, alpha in ((100, 0.5), (10000, 0.9)):
    t_trap = crypto.flags_required("trap", 2, nu_target, alpha)
    t_cliff = crypto.flags_required("clifford", 2, nu_target, alpha)
    print("nu=%-6d alpha=%.1f: trap needs t=%d, clifford t=%d"
          % (nu_target, alpha, t_trap, t_cliff))
