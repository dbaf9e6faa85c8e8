"""What does the stability region of a scheduling system look like?

It is a polytope: finitely many half-spaces alpha . rate <= beta.  The
interesting part is which directions alpha are needed.  This script walks
through the construction of the canonical direction set for small systems.
"""

from mqms import build_vhat, build_w, in_v, wn_count

# Capacities live in {0, ..., M}.  Candidate direction coordinates are
# products of N-1 capacity values: that is the value set W.
for M in (1, 2, 3):
    print(f"M={M}: coordinate values W = {build_w(M, 3)} (for N=3)")

# Directions are filtered by a partition test: a direction can define a
# maximal face only if, however you split its support in two, some pair of
# coordinates across the split has a ratio expressible with capacities.
print()
print("partition filter examples (M=2):")
for alpha in [(1, 1), (1, 2), (1, 3), (2, 3)]:
    print(f"  alpha={alpha}: {'kept' if in_v(alpha, 2) else 'dropped'}")
# (1,3) is dropped: no m, n <= 2 satisfy 1*m == 3*n.

# The full canonical set for a few system sizes, next to the size of the
# unfiltered candidate space: filtering pays off quickly.
print()
print("  N  M   directions   candidates")
for N in (2, 3):
    for M in (1, 2, 3, 4):
        vhat = build_vhat(M, N)
        print(f"  {N}  {M}   {len(vhat):10d}   {wn_count(M, N) - 1:10d}")

print()
print("canonical directions for N=2, M=2:", build_vhat(2, 2))
print("each one, paired with its support value, is one facet inequality")
print("of the region -- see 02_stability_region.py")
