"""
Dense float64 numerics: matrix products, activations, losses, Adam and a
seeded counter-based random stream.

Matrices are 2-D numpy float64 arrays; vectors are 1-D float64 arrays.
"""
