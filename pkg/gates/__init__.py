"""
Hard-concrete stochastic gates with exact zeros, their expected-L0 penalty
and the binary complement that routes gated features to the GLM head.
"""
