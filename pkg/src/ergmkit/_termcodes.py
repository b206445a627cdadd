"""Integer codes for statistic kinds, shared by both kernels.

The compiled kernel hard-codes the same values; an import-time assertion in
kernel.py keeps the two in sync.
"""

EDGES = 0
TWOPATH = 1
KCYCLE3 = 2
KCYCLE4 = 3
KDEGREE = 4
GWD = 5
GWESP = 6
GWNSP = 7
GWDSP = 8
NODEMATCH = 9

# Kinds whose change score needs the common-neighbour count of the focal dyad.
NEEDS_CN = frozenset({KCYCLE3, KCYCLE4, GWESP, GWNSP, GWDSP})
# Kinds whose change score needs per-neighbour shared-partner counts.
NEEDS_NEIGHBORS = frozenset({KCYCLE4, GWESP, GWNSP, GWDSP})
