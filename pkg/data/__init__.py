"""
Datasets: the IXOR generator, MNIST / CIFAR-10 / California Housing readers,
normalization and the seeded 4:1 split.
"""
