"""
Kernel selection for density estimation.

Penalized least-squares selection among projection, Parzen and weighted
projection kernel estimators, with oracle-mode diagnostics and a seeded
replication harness for the minimal-penalty experiments.
"""

__version__ = "0.1.0"
