"""qmet: quantum metrology closed forms with brute-force cross-checks.

Subpackages cover dense density-matrix simulation, Pauli/Clifford algebra,
graph-state sensing, error-corrected GHZ sensing, cryptographic estimation
protocols, and classical estimation utilities.
"""

__version__ = "0.1.0"
