"""
Feature-leveling network: gated forward and backward passes, training,
the plain FCNN baseline, pruning and checkpoints.
"""
