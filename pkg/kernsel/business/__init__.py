"""
Core computations: kernel families, known densities, the penalized criterion,
oracle diagnostics and the replication harness.
"""
