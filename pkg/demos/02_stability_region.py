"""Computing the exact stability region of a two-queue, two-server system.

Every direction alpha pairs with its support value h(alpha) -- the largest
alpha-weighted service rate any allocation policy can sustain -- to give
one inequality alpha . rate <= h(alpha).  The full list is the region.
"""

import numpy as np

from mqms import (
    DiscreteChannelModel,
    brute_force_support,
    build_region,
    membership_margin,
    support_function,
    support_vertex,
)

# ON-OFF links: queue n reaches server k with probability p[n][k]
model = DiscreteChannelModel.bernoulli([[0.8, 0.4], [0.5, 0.6]])

region = build_region(model)
print("stability region inequalities (alpha . rate <= beta):")
for alpha, beta in region.inequalities:
    terms = " + ".join(f"{a}*r{n+1}" for n, a in enumerate(alpha) if a)
    print(f"  {terms:22s} <= {beta:.4f}")

# support values decompose per server, but a literal search over every
# allocation matrix agrees -- that is the correctness anchor
alpha = (1.0, 1.0)
fast = support_function(model, alpha)
slow = brute_force_support(model, alpha)
print(f"\nsupport in direction {alpha}: fast path {fast:.12f}, brute force {slow:.12f}")

# the rate point achieving a support value is a vertex of the region
vertex = support_vertex(model, alpha)
print(f"achieving rate point: {vertex.round(6)} with alpha . r = {np.dot(alpha, vertex):.6f}")

# membership margin: how much every queue's rate could grow before leaving
# the region (negative = already outside)
for rates in ([0.5, 0.4], [0.75, 0.55], [0.9, 0.9]):
    delta = membership_margin(region, rates)
    print(f"rates {rates}: margin {delta:+.4f} -> {region.verdict(rates)}")
