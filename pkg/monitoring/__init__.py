"""
Training monitoring: the per-run history of objective, loss, lambda and open gates.
"""
