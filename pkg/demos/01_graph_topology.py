"""
Graph-state QFI from topology alone
===================================

The QFI of a graph state under a local X phase encoding depends only on
how vertices share neighborhoods: grouping the vertices into classes with
identical open neighborhoods and summing the squared class sizes gives the
exact value. This script walks the closed forms and checks a few of them
against the dense density-matrix oracle.
"""

import numpy as np

from qmet import graphs

# star graphs: the n-1 leaves share the hub as their neighborhood, so the
# class sizes are (n-1, 1) and the QFI is (n-1)^2 + 1
for n in range(3, 9):
    g = graphs.star(n)
    print("star  n=%d  qfi=%d" % (n, graphs.qfi_x(g)))

# a cycle has no repeated neighborhoods, so it only reaches the SQL
g = graphs.cycle(6)
print("cycle n=6  qfi=%d  (SQL)" % graphs.qfi_x(g))

# bundling a vertex into clones multiplies its class size: the triangle
# bundled with sizes (3,4,3) reaches 3^2 + 4^2 + 3^2 = 34 on 10 qubits
tri = graphs.bundle(graphs.complete(3), [3, 4, 3])
print("bundled triangle  n=%d  qfi=%d" % (tri.n, graphs.qfi_x(tri)))

# the partition behind the closed form
for i, (us, ms) in enumerate(graphs.partition(tri).classes):
    print("  class %d: %d vertices sharing a %d-vertex neighborhood"
          % (i, len(us), len(ms)))

# dense oracle cross-check at a size where 2^n is still comfortable
small = graphs.bundle(graphs.star(3), [2, 2, 2])
closed = graphs.qfi_x(small)
oracle = graphs.oracle_graph_qfi(small)
print("bundled star n=6: closed form %d vs oracle %.9f" % (closed, oracle))

# local dephasing shrinks each class contribution by an explicit factor;
# at p = 1/2 the phase information is gone entirely
g = graphs.star(5)
for p in (0.0, 0.05, 0.1, 0.25, 0.5):
    print("star5 dephasing p=%.2f  qfi=%.6f" % (p, graphs.qfi_dephasing(g, p)))

# erasures act through the light cone of the lost vertices
g = graphs.cycle(6)
for pattern in ((0,), (0, 3), (0, 1)):
    print("cycle6 erased %-6s qfi=%.6f"
          % (pattern, graphs.qfi_erasure(g, pattern)))
print("cycle6 mean over single erasures: %.6f" % graphs.mean_qfi_erasure(g, 1))

# saturating the QCRB needs a stabilizer with no X factor; a star always
# has one, a bundled cycle only when the bundle count is divisible by 4
print("star5 Y/Z stabilizer:", graphs.find_yz_stabilizer(graphs.star(5)).label())
for k in (6, 8):
    g = graphs.bundle(graphs.cycle(k), [2] * k)
    stab = graphs.find_yz_stabilizer(g)
    print("bundled cycle k=%d: %s" % (k, stab.label() if stab else "absent"))

# when the stabilizer exists, the measurement variance at small angle
# matches 1/qfi, so the bound is tight
g = graphs.star(4)
var = graphs.measurement_variance(g, 1e-3)
print("star4: variance %.6f vs 1/qfi %.6f" % (var, 1.0 / graphs.qfi_x(g)))
