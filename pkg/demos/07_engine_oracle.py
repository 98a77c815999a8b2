"""
Cross-checking the two engines
==============================

The stabilizer tableau scales to large lattices; the dense vector is
exact but small.  On the smallest torus both run the same random Clifford
protocols and must agree on every probe.
"""

import numpy as np

from anyonsim.lattice import build
from anyonsim import oracle

tor = build(4, 2, "torus")
rep = oracle.run_oracle(tor, count=50, seed=7)
print(rep.to_dict()["passed"], rep.checks, "checks")

rng = np.random.default_rng(0)
for p in oracle.random_protocol(tor.site_count, 4, rng):
    print(f"{p.angle.value:6s} {p.op}")
