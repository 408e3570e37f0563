"""
Classical estimation layer: Fisher information to error bars
============================================================

The quantum side of the package produces QFI values; this layer turns
measured outcome distributions into Fisher information, Cramer-Rao bounds,
and exact finite-sample estimator statistics.
"""

import math

import numpy as np

from qmet import estimation

# the coin: Fisher information 1/(p(1-p)), and the MLE is exactly efficient
pmf = estimation.Pmf([("heads", lambda p: p), ("tails", lambda p: 1 - p)])
for p in (0.2, 0.5):
    print("coin p=%.1f: FI=%.4f  CRB(25 flips)=%.5f"
          % (p, estimation.fisher_information(pmf, p),
             estimation.crb(estimation.fisher_information(pmf, p), 25)))
stats = estimation.coin_mle_stats(0.5, 10)
print("coin MLE, 10 flips: bias=%.1e variance=%.5f" % (stats.bias, stats.variance))

# GHZ parity measurement: P(+-) = (1 +- cos(n theta))/2 carries the full
# n^2 quantum Fisher information, so the local estimator reaches 1/(nu n^2)
for n in (2, 4, 6):
    theta = 0.9 / n
    pmf = estimation.Pmf([
        ("+", lambda th, n=n: (1 + math.cos(n * th)) / 2),
        ("-", lambda th, n=n: (1 - math.cos(n * th)) / 2)])
    fi = estimation.fisher_information(pmf, theta)
    stats = estimation.local_estimator_stats(pmf, theta, 10)
    print("ghz parity n=%d: FI=%.4f (n^2=%d)  mse(10 rounds)=%.6f vs 1/(10 n^2)=%.6f"
          % (n, fi, n * n, stats.mse, 1 / (10 * n * n)))

# the same conclusion by error propagation on the parity observable
n, nu, theta = 4, 100, 0.3
var_o = math.sin(n * theta) ** 2
slope = -n * math.sin(n * theta)
print("noon parity, error propagation: %.6f vs 1/(nu n^2) = %.6f"
      % (estimation.error_propagation(var_o, slope, nu), 1 / (nu * n * n)))

# probe-level comparison: separable vs GHZ scaling
print("phase QFI:", [(n, estimation.phase_qfi(n, "separable"),
                      estimation.phase_qfi(n, "ghz")) for n in (2, 4, 6)])

# thermometry: the QFI for temperature is the heat capacity over T^2
levels = np.array([0.0, 0.8, 1.5, 1.9])
for temp in (0.5, 1.0, 2.0):
    q = estimation.thermometry_qfi(levels, temp)
    c = estimation.heat_capacity(levels, temp)
    print("T=%.1f: thermometry QFI=%.5f  heat capacity/T^2=%.5f" % (temp, q, c / temp ** 2))
