"""
Finite approximation modules and certified precision
====================================================

Distributions are stored by their moments modulo the filtration
p^(N - j).  The Sigma0(p) action preserves the filtration, and the
weight-direction error (the log-twisted action) is certified only to the
precision that survives it.
"""

import numpy as np

from eigentangent.distributions import (
    FinApproxDist,
    Sigma0Element,
    act_dist,
    epsilon_error,
    filtration_moduli,
    log_precision,
)

p, k, N = 5, 0, 6
print("filtration moduli:", filtration_moduli(p, N))

rng = np.random.default_rng(0)
mu = FinApproxDist(p, k, N, [int(x) for x in rng.integers(0, p**N, N)])
g = Sigma0Element(2, 1, 5, 3, p)
h = Sigma0Element(1, 4, 10, 7, p)

# a right action: (mu | g) | h == mu | (g h)
lhs = act_dist(h, act_dist(g, mu))
rhs = act_dist(g @ h, mu)
print("action composes:", lhs == rhs)

print("certified digits of the log-twisted error at depth", N, ":", log_precision(p, N, k))
print("error of mu under g:", epsilon_error(g, mu))
